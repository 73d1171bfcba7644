#pragma once

// The nonlinearity f, the hypotheses it must satisfy, and the shifted and
// truncated transform h(s) = f(s + beta) - beta that centres the problem at
// the constant solution beta.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "radneumann/radial_ode.hpp"

namespace radneumann {

struct NonlinearitySpec {
    std::function<double(double)> f;
    std::function<double(double)> df;
    double beta = 1.0;
    double f_inf = 1.0;
    std::string label;

    /// Structural sanity only (callables set, beta > 0, f_inf finite).
    /// The hypotheses themselves are checked by validate_conditions.
    void validate() const;
};

/// f(s) = s + A s (s - beta) / (1 + C s).
NonlinearitySpec make_rational_family(double A, double C, double beta);

/// Piecewise-cubic monotone (PCHIP) interpolant of the samples, extended
/// linearly past the last sample. Samples must start at s = 0.
NonlinearitySpec make_sampled(std::vector<double> s, std::vector<double> f, double beta,
                              double f_inf, std::string label = "samples");

/// Parses the nonlinearity config format:
///
///     beta = 1
///     f_inf = 3
///     samples
///     0,0
///     ...
///
/// or a single line `family = rational A=<a> C=<c> beta=<b>`.
NonlinearitySpec parse_nonlinearity(std::istream& is);
NonlinearitySpec load_nonlinearity(const std::filesystem::path& path);

struct HTransform {
    NonlinearitySpec spec;
    double slope0 = 0.0;  // h'(0) = f'(beta)

    explicit HTransform(NonlinearitySpec s);

    /// f(s + beta) - beta for s >= -beta, flat at -beta below.
    double h(double s) const;
    /// h(v) - slope0 * v.
    double xi(double v) const;
};

struct SamplingPlan {
    std::uint64_t seed = 1;
    int log_points = 200;     // geometric grid on (0, horizon]
    int random_points = 200;  // seeded uniform draws on (0, horizon]
    double horizon = 1e4;     // in units of beta
};

struct ConditionCheck {
    std::string name;
    bool passed = true;
    std::string detail;
    std::vector<double> violations;  // sample points where the check failed
};

struct ConditionReport {
    int k = 2;
    double slope_at_beta = 0.0;
    double lambda_k = 0.0;
    std::vector<double> grid;
    std::vector<ConditionCheck> checks;

    bool passed() const;
    /// nullptr when every check passed.
    const ConditionCheck* first_failure() const;
};

/// Samples the hypotheses on the plan's grid: f(0) = 0 and f in C^1, a finite
/// asymptotic slope matching f_inf, f(beta) = beta with f(s) < s below beta and
/// f(s) > s above it, the sign condition [f(s+beta) - (s+beta)] s > 0 on
/// (-beta, 0) and (0, horizon), and f'(beta) > lambda_k.
ConditionReport validate_conditions(const NonlinearitySpec& spec, int k, const RadialProblem& prob,
                                    const SamplingPlan& plan = {}, const Tolerances& tol = {});

/// Largest |df - central difference| / max(1, |df|) over `points` equally
/// spaced s in [0, 10 beta].
double derivative_deviation(const NonlinearitySpec& spec, int points = 1000);

struct XiReport {
    bool passed = true;
    std::vector<double> v;      // delta, delta/2, ...
    std::vector<double> ratio;  // max(|xi(v)/v|, |xi(-v)/v|) at each level
    std::string detail;
};

/// |xi(v)/v| at |v| = delta, delta/2, ... must not increase and must fall
/// below tol within `max_levels` halvings.
XiReport xi_smallness(const HTransform& ht, double delta, double tol, int max_levels = 40);

}  // namespace radneumann
