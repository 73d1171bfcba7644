#pragma once

// Radial Neumann eigenvalues of -u'' - ((N-1)/r) u' = mu a(r) u on the unit
// ball, computed by shooting from the origin.

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "radneumann/radial_ode.hpp"

namespace radneumann {

struct WeightFn {
    std::function<double(double)> a;
    double a_lower = 1.0;
    double a_upper = 1.0;

    void validate() const;

    static WeightFn unit();
    /// c * a, with the bounds scaled accordingly (c > 0).
    static WeightFn scaled(const WeightFn& w, double c);
    /// Linear interpolation on a uniform grid, constant beyond its ends.
    static WeightFn from_samples(std::vector<double> r, std::vector<double> a);
    /// Two-column CSV `r,a` on a uniform grid.
    static WeightFn from_csv_file(const std::filesystem::path& path);
};

struct EigenPair {
    int k = 0;
    double mu = 0.0;
    Trajectory psi;  // normalised by psi(0) = 1
    ZeroTable zeros;

    /// Characteristic value of the shifted operator, mu + 1.
    double lambda() const { return mu + 1.0; }
};

struct ComparisonSolution {
    Trajectory y;
    std::vector<double> xi;

    std::vector<double> spacings() const;
};

struct ScanSample {
    double mu = 0.0;
    double miss = 0.0;
    int zero_count = 0;
};

struct EigenOptions {
    int grid_points = 16;
    int refine_budget = 80;
    int retry_budget = 3;
    bool parallel = true;
};

struct MonotonicityReport {
    std::vector<double> mu;
    /// tau[k-1][i] is the k-th zero of u at mu[i]; r[k-1][i] the k-th zero of u'.
    std::vector<std::vector<double>> tau;
    std::vector<std::vector<double>> r;
    std::vector<double> r_end_used;
    bool passed = true;
    std::string detail;
};

/// Right-hand side mu * a(r) * u of the eigen-equation.
RadialRHS eigen_rhs(double mu, const WeightFn& a);

/// u'(1) for the solution with u(0) = 1, u'(0) = 0.
double miss_distance(double mu, const WeightFn& a, const RadialProblem& prob, const Tolerances& tol);

/// Interior zeros of u(.; 1, mu) in (0, r_end).
int zero_count(double mu, const WeightFn& a, const RadialProblem& prob, const Tolerances& tol = {});

/// Miss distance and zero count at every mu of the grid.
std::vector<ScanSample> scan_serial(std::span<const double> mu_grid, const WeightFn& a,
                                    const RadialProblem& prob, const Tolerances& tol);
std::vector<ScanSample> scan_parallel(std::span<const double> mu_grid, const WeightFn& a,
                                      const RadialProblem& prob, const Tolerances& tol);

/// The k-th radial Neumann eigenpair (k = 0 gives mu = 0, psi = 1).
///
/// A geometric scan brackets the eigenvalue between a sample that lies to
/// its left (fewer than k zeros, or exactly k with miss distance of sign
/// (-1)^k) and one to its right; uniform sub-scans then shrink the bracket
/// until both ends carry exactly k zeros and a sign change of the miss
/// distance, which TOMS 748 refines to rel_tol.
EigenPair eigenvalue(int k, const WeightFn& a, const RadialProblem& prob, const Tolerances& tol,
                     const EigenOptions& opts = {});

/// lambda_j = mu_{j-1} + 1 for the unit weight (j >= 1).
double lambda_radial(int j, const RadialProblem& prob, const Tolerances& tol);

struct MonotonicityOptions {
    bool auto_extend = true;
    bool parallel = true;
    int max_doublings = 12;
};

/// tau_k(mu) and r_k(mu) for k = 1..depth over the grid, with a strict
/// decrease check in mu and the ordering tau_k < r_k < tau_{k+1}.
/// Throws Error(InsufficientOscillation) when r_end (after any extension)
/// shows fewer than `depth` zeros.
MonotonicityReport zero_monotonicity_table(const WeightFn& a, const RadialProblem& prob,
                                           std::span<const double> mu_grid, int depth,
                                           const Tolerances& tol,
                                           const MonotonicityOptions& opts = {});

/// Solution of (r^{N-1} y')' + r^{N-1} y = 0, y(0) = 1, on [0, R] with its zeros.
ComparisonSolution oscillation_comparison(const RadialProblem& prob, double R, const Tolerances& tol);

/// Largest |zeta_n - xi_n / gamma| between the zeros zeta_n of the solution of
/// (r^{N-1} u')' + gamma^2 r^{N-1} u = 0 and the rescaled comparison zeros.
double scaled_zero_deviation(const ComparisonSolution& cs, double gamma, const RadialProblem& prob,
                             const Tolerances& tol);

}  // namespace radneumann
