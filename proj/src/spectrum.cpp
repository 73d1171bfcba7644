#include "radneumann/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>

#include <boost/math/tools/toms748_solve.hpp>

#include "radneumann/csv.hpp"
#include "radneumann/errors.hpp"
#include "radneumann/kernels.hpp"

namespace radneumann {

// --- weights ---------------------------------------------------------------

void WeightFn::validate() const
{
    if (!a)
        throw Error(ErrorKind::Precondition, "weight function not set");
    if (!(a_lower > 0.0 && a_lower <= a_upper && std::isfinite(a_upper)))
        throw Error(ErrorKind::Precondition, "weight bounds must satisfy 0 < a_lower <= a_upper");
}

WeightFn WeightFn::unit()
{
    return {[](double) { return 1.0; }, 1.0, 1.0};
}

WeightFn WeightFn::scaled(const WeightFn& w, double c)
{
    if (!(c > 0.0))
        throw Error(ErrorKind::Precondition, "weight scale must be positive");
    auto inner = w.a;
    return {[inner, c](double r) { return c * inner(r); }, c * w.a_lower, c * w.a_upper};
}

WeightFn WeightFn::from_samples(std::vector<double> r, std::vector<double> a)
{
    if (r.size() != a.size() || r.size() < 2)
        throw Error(ErrorKind::Precondition, "weight samples need at least two (r, a) pairs");
    const double r0 = r.front();
    const double dr = (r.back() - r0) / static_cast<double>(r.size() - 1);
    if (!(dr > 0.0))
        throw Error(ErrorKind::Precondition, "weight grid must be increasing");
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (std::abs(r[i] - (r0 + dr * static_cast<double>(i))) > 1e-9 * std::max(1.0, std::abs(r.back())))
            throw Error(ErrorKind::Precondition, "weight grid is not uniform");
        if (!(a[i] > 0.0) || !std::isfinite(a[i]))
            throw Error(ErrorKind::Precondition, "weight samples must be positive");
    }
    const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
    WeightFn w;
    w.a_lower = *lo;
    w.a_upper = *hi;
    w.a = [r0, dr, vals = std::move(a)](double x) {
        const double s = (x - r0) / dr;
        if (s <= 0.0)
            return vals.front();
        const auto last = static_cast<double>(vals.size() - 1);
        if (s >= last)
            return vals.back();
        const auto i = static_cast<std::size_t>(s);
        const double t = s - static_cast<double>(i);
        return (1.0 - t) * vals[i] + t * vals[i + 1];
    };
    return w;
}

WeightFn WeightFn::from_csv_file(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw Error(ErrorKind::Precondition, "cannot open weight file " + path.string());
    const auto rows = read_numeric_csv(is, 2);
    std::vector<double> r, a;
    for (const auto& row : rows) {
        r.push_back(row[0]);
        a.push_back(row[1]);
    }
    return from_samples(std::move(r), std::move(a));
}

// --- shooting --------------------------------------------------------------

RadialRHS eigen_rhs(double mu, const WeightFn& a)
{
    auto w = a.a;
    return {[mu, w](double r, double u) { return mu * w(r) * u; }, mu * a.a_upper};
}

double miss_distance(double mu, const WeightFn& a, const RadialProblem& prob, const Tolerances& tol)
{
    if (!(mu >= 0.0))
        throw Error(ErrorKind::Precondition, "mu must be >= 0");
    const Trajectory t = integrate_ivp(prob, eigen_rhs(mu, a), 1.0, tol);
    return t.nodes().back().du;
}

int zero_count(double mu, const WeightFn& a, const RadialProblem& prob, const Tolerances& tol)
{
    if (!(mu >= 0.0))
        throw Error(ErrorKind::Precondition, "mu must be >= 0");
    const Trajectory t = integrate_ivp(prob, eigen_rhs(mu, a), 1.0, tol);
    return static_cast<int>(locate_zeros(t, tol).interior_count());
}

namespace {

ScanSample sample_at(double mu, const WeightFn& a, const RadialProblem& prob, const Tolerances& tol)
{
    const Trajectory t = integrate_ivp(prob, eigen_rhs(mu, a), 1.0, tol);
    return {mu, t.nodes().back().du, static_cast<int>(locate_zeros(t, tol).interior_count())};
}

std::vector<ScanSample> scan(std::span<const double> grid, const WeightFn& a,
                             const RadialProblem& prob, const Tolerances& tol, bool parallel)
{
    return kernels::map<ScanSample>(grid.size(), parallel,
                                    [&](std::size_t i) { return sample_at(grid[i], a, prob, tol); });
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

EigenPair make_pair(int k, double mu, const WeightFn& a, const RadialProblem& prob,
                    const Tolerances& tol)
{
    EigenPair p;
    p.k = k;
    p.mu = mu;
    p.psi = integrate_ivp(prob, eigen_rhs(mu, a), 1.0, tol);
    p.zeros = locate_zeros(p.psi, tol);
    return p;
}

}  // namespace

std::vector<ScanSample> scan_serial(std::span<const double> mu_grid, const WeightFn& a,
                                    const RadialProblem& prob, const Tolerances& tol)
{
    return scan(mu_grid, a, prob, tol, false);
}

std::vector<ScanSample> scan_parallel(std::span<const double> mu_grid, const WeightFn& a,
                                      const RadialProblem& prob, const Tolerances& tol)
{
    return scan(mu_grid, a, prob, tol, true);
}

EigenPair eigenvalue(int k, const WeightFn& a, const RadialProblem& prob, const Tolerances& tol,
                     const EigenOptions& opts)
{
    if (k < 0)
        throw Error(ErrorKind::Precondition, "eigenvalue index must be >= 0");
    a.validate();
    prob.validate();
    tol.validate();
    if (k == 0)
        return make_pair(0, 0.0, a, prob, tol);

    // A sample lies left of mu_k if it has fewer than k zeros, or exactly k
    // zeros and a miss distance of sign (-1)^k (the k-th zero has just
    // entered through r = r_end with slope of that sign).
    const int s_left = (k % 2 == 0) ? 1 : -1;
    auto is_left = [&](const ScanSample& s) {
        return s.zero_count < k || (s.zero_count == k && sign_of(s.miss) == s_left);
    };

    // geometric phase
    const double step = std::numbers::pi * std::numbers::pi / (a.a_upper * prob.r_end * prob.r_end);
    ScanSample lo{0.0, 0.0, 0};
    ScanSample hi = sample_at(step, a, prob, tol);
    for (int it = 0; is_left(hi); ++it) {
        if (it > 80)
            throw Error(ErrorKind::BracketFailure, "geometric scan cap reached for k=" + std::to_string(k));
        lo = hi;
        hi = sample_at(2.0 * hi.mu, a, prob, tol);
    }
    if (hi.zero_count == k && hi.miss == 0.0)
        return make_pair(k, hi.mu, a, prob, tol);

    auto G = [&](double mu) { return miss_distance(mu, a, prob, tol); };

    for (int attempt = 0; attempt <= opts.retry_budget; ++attempt) {
        const int m = opts.grid_points << attempt;
        ScanSample L = lo, H = hi;
        bool bracketed = false;
        for (int iter = 0; iter < opts.refine_budget; ++iter) {
            if (L.zero_count == k && H.zero_count == k) {
                bracketed = true;
                break;
            }
            std::vector<double> grid(static_cast<std::size_t>(m) - 1);
            for (int i = 1; i < m; ++i)
                grid[static_cast<std::size_t>(i - 1)] = L.mu + (H.mu - L.mu) * i / m;
            if (grid.front() <= L.mu || grid.back() >= H.mu)
                throw Error(ErrorKind::BracketFailure,
                            "bracket for k=" + std::to_string(k) + " collapsed below resolution");
            const auto samples = scan(grid, a, prob, tol, opts.parallel);
            for (const ScanSample& s : samples) {
                if (s.zero_count == k && s.miss == 0.0)
                    return make_pair(k, s.mu, a, prob, tol);
                if (is_left(s))
                    L = s;
                else {
                    H = s;
                    break;
                }
            }
        }
        if (!bracketed)
            throw Error(ErrorKind::BracketFailure,
                        "no sign change with index " + std::to_string(k) + " found within the refine budget");

        std::uintmax_t max_iter = 200;
        const double rel = tol.rel_tol;
        auto stop = [rel](double x0, double x1) {
            return std::abs(x1 - x0) <= std::max(rel, 4e-16) * std::max(std::abs(x0), std::abs(x1));
        };
        const auto root = boost::math::tools::toms748_solve(G, L.mu, H.mu, L.miss, H.miss, stop, max_iter);
        const double mu = 0.5 * (root.first + root.second);
        EigenPair p = make_pair(k, mu, a, prob, tol);
        if (static_cast<int>(p.zeros.interior_count()) == k)
            return p;
    }
    throw Error(ErrorKind::IndexMismatch,
                "converged eigenvalue does not carry " + std::to_string(k) + " interior zeros");
}

double lambda_radial(int j, const RadialProblem& prob, const Tolerances& tol)
{
    if (j < 1)
        throw Error(ErrorKind::Precondition, "characteristic value index must be >= 1");
    if (j == 1)
        return 1.0;
    return eigenvalue(j - 1, WeightFn::unit(), prob, tol).mu + 1.0;
}

// --- zero monotonicity -----------------------------------------------------

namespace {

struct ZeroRow {
    std::vector<double> tau;
    std::vector<double> r;
    double r_end = 0.0;
};

}  // namespace

MonotonicityReport zero_monotonicity_table(const WeightFn& a, const RadialProblem& prob,
                                           std::span<const double> mu_grid, int depth,
                                           const Tolerances& tol, const MonotonicityOptions& opts)
{
    a.validate();
    prob.validate();
    if (depth < 1)
        throw Error(ErrorKind::Precondition, "depth must be >= 1");
    for (std::size_t i = 0; i < mu_grid.size(); ++i) {
        if (!(mu_grid[i] > 0.0) || (i > 0 && !(mu_grid[i] > mu_grid[i - 1])))
            throw Error(ErrorKind::Precondition, "mu grid must be positive and strictly increasing");
    }

    const auto need = static_cast<std::size_t>(depth);
    auto row_at = [&](std::size_t i) {
        RadialProblem p = prob;
        for (int d = 0;; ++d) {
            const Trajectory t = integrate_ivp(p, eigen_rhs(mu_grid[i], a), 1.0, tol);
            const ZeroTable zt = locate_zeros(t, tol);
            if (zt.u_zeros.size() >= need && zt.du_zeros.size() >= need) {
                ZeroRow row;
                for (std::size_t k = 0; k < need; ++k) {
                    row.tau.push_back(zt.u_zeros[k].r);
                    row.r.push_back(zt.du_zeros[k].r);
                }
                // the ordering check needs tau_{depth+1} when it is visible
                if (zt.u_zeros.size() > need)
                    row.tau.push_back(zt.u_zeros[need].r);
                row.r_end = p.r_end;
                return row;
            }
            if (!opts.auto_extend || d >= opts.max_doublings)
                throw Error(ErrorKind::InsufficientOscillation,
                            "fewer than " + std::to_string(depth) + " zeros on [0, " +
                                std::to_string(p.r_end) + "] at mu=" + std::to_string(mu_grid[i]));
            p.r_end *= 2.0;
        }
    };
    const auto rows = kernels::map<ZeroRow>(mu_grid.size(), opts.parallel, row_at);

    MonotonicityReport rep;
    rep.mu.assign(mu_grid.begin(), mu_grid.end());
    rep.tau.assign(need, std::vector<double>(mu_grid.size()));
    rep.r.assign(need, std::vector<double>(mu_grid.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rep.r_end_used.push_back(rows[i].r_end);
        for (std::size_t k = 0; k < need; ++k) {
            rep.tau[k][i] = rows[i].tau[k];
            rep.r[k][i] = rows[i].r[k];
        }
    }

    auto fail = [&](const std::string& msg) {
        if (rep.passed) {
            rep.passed = false;
            rep.detail = msg;
        }
    };
    for (std::size_t k = 0; k < need; ++k) {
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (!(rep.tau[k][i] < rep.tau[k][i - 1]))
                fail("tau_" + std::to_string(k + 1) + " not decreasing between mu=" +
                     std::to_string(rep.mu[i - 1]) + " and mu=" + std::to_string(rep.mu[i]));
            if (!(rep.r[k][i] < rep.r[k][i - 1]))
                fail("r_" + std::to_string(k + 1) + " not decreasing between mu=" +
                     std::to_string(rep.mu[i - 1]) + " and mu=" + std::to_string(rep.mu[i]));
        }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < need; ++k) {
            if (!(rows[i].tau[k] < rows[i].r[k]))
                fail("tau_k < r_k violated at mu=" + std::to_string(rep.mu[i]));
            if (k + 1 < rows[i].tau.size() && !(rows[i].r[k] < rows[i].tau[k + 1]))
                fail("r_k < tau_{k+1} violated at mu=" + std::to_string(rep.mu[i]));
        }
    }
    if (rep.passed)
        rep.detail = "tau_k and r_k strictly decreasing for k <= " + std::to_string(depth) + " over " +
                     std::to_string(rows.size()) + " values of mu";
    return rep;
}

// --- comparison equation ---------------------------------------------------

std::vector<double> ComparisonSolution::spacings() const
{
    std::vector<double> d;
    for (std::size_t i = 1; i < xi.size(); ++i)
        d.push_back(xi[i] - xi[i - 1]);
    return d;
}

ComparisonSolution oscillation_comparison(const RadialProblem& prob, double R, const Tolerances& tol)
{
    RadialProblem p = prob;
    p.r_end = R;
    ComparisonSolution cs;
    cs.y = integrate_ivp(p, {[](double, double y) { return y; }, 1.0}, 1.0, tol);
    const ZeroTable zt = locate_zeros(cs.y, tol);
    for (const auto& z : zt.u_zeros)
        cs.xi.push_back(z.r);
    if (cs.xi.size() < 20)
        throw Error(ErrorKind::InsufficientOscillation,
                    "only " + std::to_string(cs.xi.size()) + " zeros on [0, " + std::to_string(R) + "]");
    return cs;
}

double scaled_zero_deviation(const ComparisonSolution& cs, double gamma, const RadialProblem& prob,
                             const Tolerances& tol)
{
    if (!(gamma > 0.0))
        throw Error(ErrorKind::Precondition, "gamma must be positive");
    RadialProblem p = prob;
    p.r_end = cs.y.r_end() / gamma;
    const double g2 = gamma * gamma;
    const Trajectory t = integrate_ivp(p, {[g2](double, double u) { return g2 * u; }, g2}, 1.0, tol);
    const ZeroTable zt = locate_zeros(t, tol);
    const std::size_t n = std::min(zt.u_zeros.size(), cs.xi.size());
    if (n == 0)
        throw Error(ErrorKind::InsufficientOscillation, "scaled equation shows no zeros");
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(zt.u_zeros[i].r - cs.xi[i] / gamma));
    return worst;
}

}  // namespace radneumann
