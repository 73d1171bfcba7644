#pragma once

// Singular radial initial value problems
//
//     -u'' - ((N-1)/r) u' = F(r, u),   u(0) = zeta,  u'(0) = 0,
//
// on [0, r_end], with dense output, zero location and the structural checks
// that every solution of this form must pass.

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "radneumann/tolerances.hpp"

namespace radneumann {

struct RadialProblem {
    int dimension = 2;
    double r_end = 1.0;

    void validate() const;
};

struct RadialRHS {
    std::function<double(double r, double u)> F;
    /// Lipschitz constant of F in u on the working range, when known.
    std::optional<double> lipschitz_bound;
};

struct Node {
    double r;
    double u;
    double du;
};

struct State {
    double u;
    double du;
};

/// Dense numerical solution of a radial IVP.
///
/// Node 0 sits at r = 0 with u' = 0. On [0, r_series] the solution is the
/// quadratic series start; past it every accepted integrator step carries a
/// degree-7 continuous extension for both u and u'.
class Trajectory {
public:
    Trajectory() = default;

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    int dimension() const noexcept { return dimension_; }
    double r_end() const noexcept { return nodes_.empty() ? 0.0 : nodes_.back().r; }
    double zeta() const noexcept { return zeta_; }
    double series_radius() const noexcept { return r_series_; }
    const Tolerances& tol_used() const noexcept { return tol_; }
    const RadialRHS& rhs() const noexcept { return rhs_; }
    std::size_t step_count() const noexcept { return segments_.size(); }

    /// (u, u') at any r in [0, r_end]; exact at nodes.
    State eval(double r) const;
    double u(double r) const { return eval(r).u; }
    double du(double r) const { return eval(r).du; }

    /// u'' recovered from the equation itself (2c at the origin).
    double second_derivative(double r) const;

    /// max |u| over nodes.
    double sup_norm() const;
    /// max |u'| over nodes.
    double sup_norm_derivative() const;

    /// Same trajectory with u replaced by u + offset (u' untouched).
    Trajectory shifted(double offset) const;

    /// CSV with header `r,u,du`, one row per node.
    void write_csv(std::ostream& os) const;

private:
    friend Trajectory integrate_ivp(const RadialProblem&, const RadialRHS&, double,
                                    const Tolerances&);

    struct Segment {
        double r0;
        double h;
        std::array<double, 8> cu;
        std::array<double, 8> cdu;
    };

    std::vector<Node> nodes_;
    std::vector<Segment> segments_;
    RadialRHS rhs_;
    Tolerances tol_;
    int dimension_ = 2;
    double zeta_ = 0.0;
    double series_c_ = 0.0;
    double r_series_ = 0.0;
};

struct UZero {
    double r;
    double slope;
};

struct DuZero {
    double r;
    double curvature;
};

/// Zeros of u and u' strictly inside (0, r_end). Zeros landing on r = 0 or
/// r = r_end are kept apart as boundary events so that both the open and the
/// closed-interval counts are available.
struct ZeroTable {
    std::vector<UZero> u_zeros;
    std::vector<DuZero> du_zeros;
    std::vector<UZero> u_boundary;
    std::vector<DuZero> du_boundary;

    std::size_t interior_count() const noexcept { return u_zeros.size(); }
    std::size_t closed_count() const noexcept { return u_zeros.size() + u_boundary.size(); }
};

struct InterlacingReport {
    bool passed = true;
    std::string detail;
    /// First violating pair of consecutive events, if any.
    std::optional<std::pair<double, double>> violation;
};

/// Window (relative to r_end) inside which an event counts as a boundary event.
inline constexpr double kBoundaryWindow = 1e-7;

/// Unique solution of the IVP with u(0) = zeta, u'(0) = 0 on [0, prob.r_end].
///
/// The origin is crossed with u = zeta - F(0,zeta) r^2 / (2N) on [0, r0],
/// then an embedded 8(5,3) Runge-Kutta pair takes over.
/// Throws Error(NonFinite) on blow-up and Error(EvaluationDomain) when F is
/// not finite at a finite state.
Trajectory integrate_ivp(const RadialProblem& prob, const RadialRHS& rhs, double zeta,
                         const Tolerances& tol);

/// Series-start radius used by integrate_ivp.
double series_start_radius(const RadialProblem& prob, double F0, const Tolerances& tol);

/// Locate and classify every sign change of u and u'.
/// Throws Error(DegenerateZero) when a u-zero fails the simplicity check.
ZeroTable locate_zeros(const Trajectory& traj, const Tolerances& tol);

/// Exactly one u-zero between consecutive u'-zeros (r = 0 included as the
/// first u'-zero) and exactly one u'-zero between consecutive u-zeros.
InterlacingReport check_interlacing(const ZeroTable& zt);

/// Defect of the integrated conservative form,
///   max over nodes of |r^{N-1} u'(r) + int_0^r t^{N-1} F(t,u(t)) dt|,
/// divided by max(1, ||u||_inf) * max(1, r_end^{N-1}).
double conservative_residual(const Trajectory& traj, const RadialRHS& rhs);

}  // namespace radneumann
