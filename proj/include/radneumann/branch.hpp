#pragma once

// Half-branches of nontrivial solutions of
//
//     -v'' - ((N-1)/r) v' + v = lambda h(v),   v'(0) = v'(1) = 0,
//
// traced in the (lambda, zeta) shooting plane with zeta = v(0), and the
// radial solutions u = v + beta they deliver at lambda = 1.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "radneumann/nonlinearity.hpp"
#include "radneumann/radial_ode.hpp"

namespace radneumann {

struct ShootResult {
    double G = 0.0;  // v'(1)
    Trajectory profile;
};

struct BranchPoint {
    double lambda = 0.0;
    double zeta = 0.0;
    Trajectory profile;
    int nodal_count = 0;
    double min_v = 0.0;
    double norm_inf = 0.0;
    double norm_dinf = 0.0;
    double residual = 0.0;  // G = v'(1) at the accepted point
};

enum class Termination { ReachedTarget, BudgetExhausted, MonitorViolation };

std::string_view to_string(Termination t);

struct BranchCurve {
    int k = 2;
    int nu = 1;  // +1 or -1
    double lambda_star = 0.0;
    std::vector<BranchPoint> points;
    Termination terminated = Termination::BudgetExhausted;
    std::string detail;
    /// Indices (i, i+1) of the accepted points whose lambda values bracket 1.
    std::optional<std::pair<std::size_t, std::size_t>> crossing;
};

struct ContinuationOptions {
    Tolerances tol;
    double epsilon = 1e-3;        // onset amplitude, in units of beta
    double initial_step = 0.02;   // arclength in the (lambda, zeta/beta) plane
    double min_step = 1e-9;
    double max_step = 0.25;
    int max_steps = 10000;
    int max_corrector_iterations = 5;
    int easy_iterations = 3;
    double growth = 1.3;
    double lambda_target = 1.0;
    double lambda_margin = 0.05;
    double fd_relative_step = 1e-6;
    double corrector_tol = 1e-9;
    /// Return the curve with Termination::MonitorViolation instead of
    /// throwing when a monitor fails at an accepted point.
    bool report_violations = false;
};

enum class Monotone { Decreasing, Increasing, None };

std::string_view to_string(Monotone m);

struct RadialSolution {
    Trajectory u;  // u = v + beta
    double zeta = 0.0;
    double residual = 0.0;
    int sign_changes = 0;  // crossings of the level beta in (0, 1)
    bool positive = true;
    double min_u = 0.0;
    Monotone monotone = Monotone::None;
    int k = 2;
    int nu = 1;
    double beta = 1.0;
};

struct SweepRoot {
    double zeta = 0.0;
    int nodal_count = 0;
};

struct BoundReport {
    bool passed = true;
    double lhs = 0.0;  // ||v'||_inf
    double rhs = 0.0;  // L0 ||v||_inf
    double L0 = 0.0;
    std::string detail;
};

struct FluxReport {
    bool passed = true;
    double t1 = 0.0;
    std::string detail;
};

/// Right-hand side lambda h(v) - v of the shooting equation.
RadialRHS branch_rhs(double lambda, const HTransform& ht);

/// G(lambda, zeta) = v'(1) for v(0) = zeta, v'(0) = 0.
ShootResult shoot_residual(double lambda, double zeta, const HTransform& ht, const RadialProblem& prob,
                           const Tolerances& tol = {});

/// lambda_k / f'(beta); throws Error(NoBifurcation) when f'(beta) <= lambda_k.
double bifurcation_point(int k, const NonlinearitySpec& spec, const RadialProblem& prob,
                         const Tolerances& tol = {});

/// Root of lambda -> G(lambda, zeta) nearest to lambda_star, bracketed by
/// widening a window around it.
double onset_lambda(double zeta, double lambda_star, const HTransform& ht, const RadialProblem& prob,
                    const Tolerances& tol = {});

/// Pseudo-arclength continuation of the half-branch (k, nu) from its
/// bifurcation point until an accepted step brackets lambda_target.
BranchCurve trace_branch(int k, int nu, const HTransform& ht, const RadialProblem& prob,
                         const ContinuationOptions& opts = {});

/// Polishes the lambda = 1 crossing of the curve and builds u = v + beta.
RadialSolution solve_at_unit_lambda(const BranchCurve& curve, const HTransform& ht,
                                    const RadialProblem& prob, const Tolerances& tol = {});

/// Every root of zeta -> G(lambda, zeta) on a uniform grid of n intervals
/// over [zeta_lo, zeta_hi] (plus zeta = 0 when inside), refined and tagged
/// with its nodal count.
std::vector<SweepRoot> zeta_sweep_serial(double lambda, const HTransform& ht, const RadialProblem& prob,
                                         double zeta_lo, double zeta_hi, int n, const Tolerances& tol = {});
std::vector<SweepRoot> zeta_sweep_parallel(double lambda, const HTransform& ht, const RadialProblem& prob,
                                           double zeta_lo, double zeta_hi, int n, const Tolerances& tol = {});
std::vector<SweepRoot> zeta_sweep_oracle(double lambda, const HTransform& ht, const RadialProblem& prob,
                                         double zeta_lo, double zeta_hi, int n, const Tolerances& tol = {},
                                         bool parallel = true);

/// ||v'||_inf <= L0 ||v||_inf with L0 = sup |g(s)/s| over the range of the
/// profile, g the right-hand side as a function of v alone.
BoundReport apriori_bound_check(const Trajectory& profile, const std::function<double(double)>& g);
BoundReport apriori_bound_check(const BranchPoint& pt, const HTransform& ht);

/// Sign of (r^{N-1} v')' on either side of the single zero t1 of v: negative
/// then positive for nu = +, mirrored for nu = -. Only defined for k = 2.
FluxReport monotone_flux_check(const RadialSolution& sol, const RadialProblem& prob);

}  // namespace radneumann
