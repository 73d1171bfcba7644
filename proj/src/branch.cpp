#include "radneumann/branch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include <boost/math/tools/toms748_solve.hpp>

#include "radneumann/csv.hpp"
#include "radneumann/errors.hpp"
#include "radneumann/kernels.hpp"
#include "radneumann/spectrum.hpp"

namespace radneumann {

std::string_view to_string(Termination t)
{
    switch (t) {
    case Termination::ReachedTarget: return "reached lambda target";
    case Termination::BudgetExhausted: return "step budget exhausted";
    case Termination::MonitorViolation: return "monitor violation";
    }
    return "unknown";
}

std::string_view to_string(Monotone m)
{
    switch (m) {
    case Monotone::Decreasing: return "decreasing";
    case Monotone::Increasing: return "increasing";
    case Monotone::None: return "none";
    }
    return "unknown";
}

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

std::string num(double x) { return format_real(x); }

// Stops TOMS 748 once the bracket is down to a few ulps.
struct TightStop {
    bool operator()(double a, double b) const
    {
        return std::abs(b - a) <= 4e-16 * std::max(std::abs(a), std::abs(b)) + 1e-300;
    }
};

template <class Fn>
double refine_root(Fn&& fn, double a, double b, double fa, double fb)
{
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(fn, a, b, fa, fb, TightStop{}, iters);
    return 0.5 * (r.first + r.second);
}

BranchPoint make_point(double lambda, double zeta, ShootResult&& s, const Tolerances& tol)
{
    BranchPoint p;
    p.lambda = lambda;
    p.zeta = zeta;
    p.residual = s.G;
    p.profile = std::move(s.profile);
    p.nodal_count = static_cast<int>(locate_zeros(p.profile, tol).interior_count());
    p.min_v = p.profile.nodes().front().u;
    for (const Node& n : p.profile.nodes())
        p.min_v = std::min(p.min_v, n.u);
    p.norm_inf = p.profile.sup_norm();
    p.norm_dinf = p.profile.sup_norm_derivative();
    return p;
}

}  // namespace

RadialRHS branch_rhs(double lambda, const HTransform& ht)
{
    return {[lambda, ht](double, double v) { return lambda * ht.h(v) - v; }, std::nullopt};
}

ShootResult shoot_residual(double lambda, double zeta, const HTransform& ht, const RadialProblem& prob,
                           const Tolerances& tol)
{
    RadialProblem p = prob;
    p.r_end = 1.0;
    ShootResult out;
    out.profile = integrate_ivp(p, branch_rhs(lambda, ht), zeta, tol);
    out.G = out.profile.nodes().back().du;
    return out;
}

double bifurcation_point(int k, const NonlinearitySpec& spec, const RadialProblem& prob, const Tolerances& tol)
{
    if (k < 2)
        throw Error(ErrorKind::Precondition, "branch index k must be >= 2");
    spec.validate();
    RadialProblem p = prob;
    p.r_end = 1.0;
    const double lk = lambda_radial(k, p, tol);
    const double slope = spec.df(spec.beta);
    if (!(slope > lk))
        throw Error(ErrorKind::NoBifurcation, "f'(beta) = " + num(slope) + " <= lambda_" + std::to_string(k) +
                                                  " = " + num(lk) + "; condition f'(beta) > lambda_k fails");
    return lk / slope;
}

double onset_lambda(double zeta, double lambda_star, const HTransform& ht, const RadialProblem& prob,
                    const Tolerances& tol)
{
    auto G = [&](double lambda) { return shoot_residual(lambda, zeta, ht, prob, tol).G; };
    for (double w = 1e-4; w <= 0.5; w *= 2.0) {
        const double a = lambda_star * (1.0 - w), b = lambda_star * (1.0 + w);
        const double ga = G(a), gb = G(b);
        if (ga == 0.0)
            return a;
        if (gb == 0.0)
            return b;
        if (sign_of(ga) != sign_of(gb))
            return refine_root(G, a, b, ga, gb);
    }
    throw Error(ErrorKind::BracketFailure, "no onset root near lambda = " + num(lambda_star) +
                                               " for zeta = " + num(zeta));
}

BranchCurve trace_branch(int k, int nu, const HTransform& ht, const RadialProblem& prob,
                         const ContinuationOptions& opts)
{
    if (nu != 1 && nu != -1)
        throw Error(ErrorKind::Precondition, "nu must be +1 or -1");
    const Tolerances& tol = opts.tol;
    const double beta = ht.spec.beta;
    const int nodal = k - 1;

    BranchCurve curve;
    curve.k = k;
    curve.nu = nu;
    curve.lambda_star = bifurcation_point(k, ht.spec, prob, tol);

    auto shoot = [&](double lambda, double z) { return shoot_residual(lambda, z * beta, ht, prob, tol); };

    // onset: two small-amplitude points seed the secant predictor
    const double eps = opts.epsilon;
    for (double z : {nu * eps, 2.0 * nu * eps}) {
        const double lambda = onset_lambda(z * beta, curve.lambda_star, ht, prob, tol);
        BranchPoint p = make_point(lambda, z * beta, shoot(lambda, z), tol);
        if (p.nodal_count != nodal)
            throw Error(ErrorKind::NodalJump, "onset point at zeta=" + num(p.zeta) + " has " +
                                                  std::to_string(p.nodal_count) + " interior zeros, expected " +
                                                  std::to_string(nodal));
        curve.points.push_back(std::move(p));
    }

    auto violation = [&](ErrorKind kind, const std::string& msg) {
        if (!opts.report_violations)
            throw Error(kind, msg);
        curve.terminated = Termination::MonitorViolation;
        curve.detail = msg;
    };

    using Vec = std::array<double, 2>;
    auto xof = [&](const BranchPoint& p) { return Vec{p.lambda, p.zeta / beta}; };
    const double lambda_max = opts.lambda_target + opts.lambda_margin;

    double step = opts.initial_step;
    int easy = 0;
    for (int n = 0; n < opts.max_steps; ++n) {
        const Vec x0 = xof(curve.points[curve.points.size() - 2]);
        const Vec x1 = xof(curve.points.back());
        Vec t{x1[0] - x0[0], x1[1] - x0[1]};
        const double tn = std::hypot(t[0], t[1]);
        t = {t[0] / tn, t[1] / tn};

        // corrector on {G = 0, t.(y - x1) = step}
        Vec y{x1[0] + step * t[0], x1[1] + step * t[1]};
        bool converged = false;
        int iterations = 0;
        std::string failure = "corrector did not converge";
        ShootResult at_y;
        try {
            for (int it = 1; it <= opts.max_corrector_iterations; ++it) {
                iterations = it;
                if (!(y[0] >= 0.0 && y[0] <= lambda_max)) {
                    failure = "corrector left lambda range";
                    break;
                }
                at_y = shoot(y[0], y[1]);
                const double g = at_y.G;
                const double arc = t[0] * (y[0] - x1[0]) + t[1] * (y[1] - x1[1]) - step;
                const double hl = opts.fd_relative_step * std::max(1.0, std::abs(y[0]));
                const double hz = opts.fd_relative_step * std::max(1.0, std::abs(y[1]));
                const double gl = (shoot(y[0] + hl, y[1]).G - g) / hl;
                const double gz = (shoot(y[0], y[1] + hz).G - g) / hz;
                const double det = gl * t[1] - gz * t[0];
                if (det == 0.0 || !std::isfinite(det)) {
                    failure = "singular corrector Jacobian";
                    break;
                }
                Vec d{(-g * t[1] + gz * arc) / det, (-gl * arc + g * t[0]) / det};
                // safeguard: never move further than the step itself in one update
                const double dn = std::hypot(d[0], d[1]);
                if (dn > step)
                    d = {d[0] * step / dn, d[1] * step / dn};
                y = {y[0] + d[0], y[1] + d[1]};
                if (std::max(std::abs(d[0]), std::abs(d[1])) <=
                    opts.corrector_tol * std::max(1.0, std::max(std::abs(y[0]), std::abs(y[1])))) {
                    if (!(y[0] >= 0.0 && y[0] <= lambda_max)) {
                        failure = "corrector left lambda range";
                        break;
                    }
                    at_y = shoot(y[0], y[1]);
                    if (std::abs(at_y.G) <= 100.0 * opts.corrector_tol * std::max(1.0, std::abs(y[1] * beta)))
                        converged = true;
                    break;
                }
            }
        } catch (const Error& e) {
            failure = e.what();
        }

        std::optional<BranchPoint> cand;
        if (converged) {
            cand = make_point(y[0], y[1] * beta, std::move(at_y), tol);
            if (cand->nodal_count != nodal || sign_of(cand->zeta) != nu) {
                failure = "nodal class changed (" + std::to_string(cand->nodal_count) + " zeros, zeta=" +
                          num(cand->zeta) + ")";
                cand.reset();
            }
        }
        if (!cand) {
            step *= 0.5;
            easy = 0;
            if (step < opts.min_step) {
                const bool nodal_failure = failure.rfind("nodal", 0) == 0;
                const std::string msg = "step fell below " + num(opts.min_step) + " at lambda=" +
                                        num(x1[0]) + ", zeta=" + num(x1[1] * beta) + ": " + failure;
                throw Error(nodal_failure ? ErrorKind::NodalJump : ErrorKind::Stall, msg);
            }
            continue;
        }

        if (cand->lambda > 0.0 && cand->lambda <= opts.lambda_target && !(cand->min_v > -beta)) {
            violation(ErrorKind::LowerBoundViolation,
                      "min v = " + num(cand->min_v) + " <= -beta at lambda=" + num(cand->lambda));
            curve.points.push_back(std::move(*cand));
            return curve;
        }

        const double prev_lambda = curve.points.back().lambda;
        curve.points.push_back(std::move(*cand));
        const double new_lambda = curve.points.back().lambda;
        if (prev_lambda < opts.lambda_target && new_lambda >= opts.lambda_target) {
            curve.crossing = std::make_pair(curve.points.size() - 2, curve.points.size() - 1);
            curve.terminated = Termination::ReachedTarget;
            curve.detail = "crossed lambda=" + num(opts.lambda_target) + " after " +
                           std::to_string(curve.points.size()) + " points";
            return curve;
        }

        if (iterations <= opts.easy_iterations) {
            if (++easy >= 2) {
                step = std::min(step * opts.growth, opts.max_step);
                easy = 0;
            }
        } else {
            easy = 0;
        }
    }
    curve.terminated = Termination::BudgetExhausted;
    curve.detail = "no lambda=" + num(opts.lambda_target) + " crossing within " + std::to_string(opts.max_steps) +
                   " steps";
    return curve;
}

RadialSolution solve_at_unit_lambda(const BranchCurve& curve, const HTransform& ht, const RadialProblem& prob,
                                    const Tolerances& tol)
{
    if (curve.terminated != Termination::ReachedTarget || !curve.crossing)
        throw Error(ErrorKind::Precondition, "curve did not bracket lambda = 1");
    const BranchPoint& a = curve.points[curve.crossing->first];
    const BranchPoint& b = curve.points[curve.crossing->second];
    const double lambda = 1.0;
    const double w = (lambda - a.lambda) / (b.lambda - a.lambda);
    const double guess = a.zeta + w * (b.zeta - a.zeta);
    const int nu = curve.nu;

    auto G = [&](double z) { return shoot_residual(lambda, z, ht, prob, tol).G; };

    double zeta = guess;
    double g0 = G(guess);
    if (g0 != 0.0) {
        bool found = false;
        double d = std::max(std::abs(b.zeta - a.zeta), 1e-8 * std::max(1.0, std::abs(guess)));
        for (int j = 0; j < 40 && !found; ++j, d *= 2.0) {
            double lo = guess - d, hi = guess + d;
            // stay on the nu side of the trivial solution
            if (nu > 0)
                lo = std::max(lo, 0.5 * guess);
            else
                hi = std::min(hi, 0.5 * guess);
            const double glo = G(lo), ghi = G(hi);
            for (auto [l, gl_, h, gh] : {std::array<double, 4>{lo, glo, guess, g0},
                                         std::array<double, 4>{guess, g0, hi, ghi}}) {
                if (sign_of(gl_) != sign_of(gh)) {
                    zeta = (gl_ == 0.0) ? l : (gh == 0.0) ? h : refine_root(G, l, h, gl_, gh);
                    found = true;
                    break;
                }
            }
        }
        if (!found) {
            // bracket search failed; fall back to a secant iteration from the guess
            double z0 = a.zeta, z1 = guess, f0 = G(a.zeta), f1 = g0;
            for (int it = 0; it < 50 && f1 != 0.0; ++it) {
                if (f1 == f0)
                    break;
                const double z2 = z1 - f1 * (z1 - z0) / (f1 - f0);
                z0 = z1;
                f0 = f1;
                z1 = z2;
                f1 = G(z1);
                if (std::abs(z1 - z0) <= 1e-15 * std::max(1.0, std::abs(z1)))
                    break;
            }
            if (!(std::abs(f1) <= 1e-10 * std::max(1.0, std::abs(z1))))
                throw Error(ErrorKind::Stall, "could not polish the lambda=1 root near zeta=" + num(guess));
            zeta = z1;
        }
    }

    ShootResult s = shoot_residual(lambda, zeta, ht, prob, tol);
    const ZeroTable zt = locate_zeros(s.profile, tol);
    const int nodal = static_cast<int>(zt.interior_count());
    if (nodal != curve.k - 1 || sign_of(zeta) != nu)
        throw Error(ErrorKind::ClassEscape, "polished root zeta=" + num(zeta) + " has " + std::to_string(nodal) +
                                                " interior zeros, expected " + std::to_string(curve.k - 1) +
                                                " with sign " + (nu > 0 ? "+" : "-"));

    const double beta = ht.spec.beta;
    RadialSolution sol;
    sol.zeta = zeta;
    sol.residual = s.G;
    sol.sign_changes = nodal;
    sol.k = curve.k;
    sol.nu = nu;
    sol.beta = beta;

    const double scale = std::max(1.0, s.profile.sup_norm());
    bool nonincreasing = true, nondecreasing = true;
    for (const Node& n : s.profile.nodes()) {
        if (n.du > 1e-8 * scale)
            nonincreasing = false;
        if (n.du < -1e-8 * scale)
            nondecreasing = false;
    }
    sol.monotone = nonincreasing ? Monotone::Decreasing : nondecreasing ? Monotone::Increasing : Monotone::None;

    sol.u = s.profile.shifted(beta);
    sol.min_u = sol.u.nodes().front().u;
    for (const Node& n : sol.u.nodes())
        sol.min_u = std::min(sol.min_u, n.u);
    sol.positive = sol.min_u > 0.0;
    if (!sol.positive)
        throw Error(ErrorKind::PositivityViolation, "min u = " + num(sol.min_u) + " <= 0");
    return sol;
}

namespace {

std::vector<SweepRoot> sweep(double lambda, const HTransform& ht, const RadialProblem& prob, double lo, double hi,
                             int n, const Tolerances& tol, bool parallel)
{
    if (!(hi > lo) || n < 1)
        throw Error(ErrorKind::Precondition, "zeta sweep needs zeta_lo < zeta_hi and n >= 1");
    std::vector<double> grid;
    for (int i = 0; i <= n; ++i)
        grid.push_back(lo + (hi - lo) * i / n);
    if (lo < 0.0 && hi > 0.0) {
        grid.push_back(0.0);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }

    auto G = [&](double z) { return shoot_residual(lambda, z, ht, prob, tol).G; };
    const auto g = kernels::map<double>(grid.size(), parallel, [&](std::size_t i) { return G(grid[i]); });

    // cells holding a root: exact grid zeros and strict sign changes
    std::vector<std::size_t> cells;
    std::vector<bool> exact;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (g[i] == 0.0) {
            cells.push_back(i);
            exact.push_back(true);
        } else if (i + 1 < grid.size() && g[i + 1] != 0.0 && sign_of(g[i]) != sign_of(g[i + 1])) {
            cells.push_back(i);
            exact.push_back(false);
        }
    }
    return kernels::map<SweepRoot>(cells.size(), parallel, [&](std::size_t c) {
        const std::size_t i = cells[c];
        const double z = exact[c] ? grid[i] : refine_root(G, grid[i], grid[i + 1], g[i], g[i + 1]);
        const ShootResult s = shoot_residual(lambda, z, ht, prob, tol);
        return SweepRoot{z, static_cast<int>(locate_zeros(s.profile, tol).interior_count())};
    });
}

}  // namespace

std::vector<SweepRoot> zeta_sweep_serial(double lambda, const HTransform& ht, const RadialProblem& prob,
                                         double zeta_lo, double zeta_hi, int n, const Tolerances& tol)
{
    return sweep(lambda, ht, prob, zeta_lo, zeta_hi, n, tol, false);
}

std::vector<SweepRoot> zeta_sweep_parallel(double lambda, const HTransform& ht, const RadialProblem& prob,
                                           double zeta_lo, double zeta_hi, int n, const Tolerances& tol)
{
    return sweep(lambda, ht, prob, zeta_lo, zeta_hi, n, tol, true);
}

std::vector<SweepRoot> zeta_sweep_oracle(double lambda, const HTransform& ht, const RadialProblem& prob,
                                         double zeta_lo, double zeta_hi, int n, const Tolerances& tol, bool parallel)
{
    return sweep(lambda, ht, prob, zeta_lo, zeta_hi, n, tol, parallel);
}

BoundReport apriori_bound_check(const Trajectory& profile, const std::function<double(double)>& g)
{
    BoundReport rep;
    double lo = 0.0, hi = 0.0;
    for (const Node& n : profile.nodes()) {
        lo = std::min(lo, n.u);
        hi = std::max(hi, n.u);
    }
    rep.lhs = profile.sup_norm_derivative();
    const double norm = profile.sup_norm();
    if (hi > lo) {
        constexpr int samples = 2000;
        for (int i = 0; i <= samples; ++i) {
            const double s = lo + (hi - lo) * i / samples;
            if (s != 0.0)
                rep.L0 = std::max(rep.L0, std::abs(g(s) / s));
        }
        // slope at the origin, reached as a limit
        const double tiny = 1e-7 * (hi - lo);
        if (lo < 0.0)
            rep.L0 = std::max(rep.L0, std::abs(g(-tiny) / tiny));
        if (hi > 0.0)
            rep.L0 = std::max(rep.L0, std::abs(g(tiny) / tiny));
    } else if (hi != 0.0) {
        rep.L0 = std::abs(g(hi) / hi);
    }
    rep.rhs = rep.L0 * norm;
    rep.passed = rep.lhs <= rep.rhs * (1.0 + 1e-9) + 1e-300;
    rep.detail = "||v'||_inf = " + num(rep.lhs) + (rep.passed ? " <= " : " > ") + "L0 ||v||_inf = " +
                 num(rep.rhs) + " (L0 = " + num(rep.L0) + ")";
    return rep;
}

BoundReport apriori_bound_check(const BranchPoint& pt, const HTransform& ht)
{
    const double lambda = pt.lambda;
    return apriori_bound_check(pt.profile, [&](double s) { return lambda * ht.h(s) - s; });
}

FluxReport monotone_flux_check(const RadialSolution& sol, const RadialProblem& prob)
{
    if (sol.k != 2)
        throw Error(ErrorKind::Precondition, "flux sign check is defined for k = 2 only (got k = " +
                                                 std::to_string(sol.k) + ")");
    prob.validate();
    const Trajectory v = sol.u.shifted(-sol.beta);
    const ZeroTable zt = locate_zeros(v, v.tol_used());
    FluxReport rep;
    if (zt.u_zeros.size() != 1) {
        rep.passed = false;
        rep.detail = "v has " + std::to_string(zt.u_zeros.size()) + " interior zeros, expected 1";
        return rep;
    }
    rep.t1 = zt.u_zeros.front().r;
    const int N = v.dimension();
    const auto& F = v.rhs().F;
    const double floor = 1e-12 * std::max(1.0, v.sup_norm());
    int checked = 0;
    for (const Node& n : v.nodes()) {
        if (n.r == 0.0 || std::abs(n.r - rep.t1) <= 1e-9 || std::abs(n.u) <= floor)
            continue;
        // (r^{N-1} v')' = -r^{N-1} F(r, v)
        const double q = -std::pow(n.r, N - 1) * F(n.r, n.u);
        const int want = (n.r < rep.t1 ? -1 : 1) * sol.nu;
        ++checked;
        if (sign_of(q) != want) {
            rep.passed = false;
            rep.detail = "(r^{N-1} v')' = " + num(q) + " has the wrong sign at r = " + num(n.r) +
                         " (t1 = " + num(rep.t1) + ")";
            return rep;
        }
    }
    rep.detail = "sign pattern holds at " + std::to_string(checked) + " nodes around t1 = " + num(rep.t1);
    return rep;
}

}  // namespace radneumann
