// Runs the nine acceptance criteria and prints one PASS/FAIL line each.
// Exits 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "radneumann/branch.hpp"
#include "radneumann/cli.hpp"
#include "radneumann/errors.hpp"
#include "radneumann/nonlinearity.hpp"
#include "radneumann/spectrum.hpp"

using namespace radneumann;
using std::numbers::pi;

namespace {

struct Verdict {
    bool passed = true;
    std::string detail;

    void fail(const std::string& why)
    {
        if (passed)
            detail = why;
        passed = false;
    }
};

std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

bool monotone(const Trajectory& t)
{
    const double scale = 1e-8 * std::max(1.0, t.sup_norm());
    bool up = true, down = true;
    for (const Node& n : t.nodes()) {
        if (n.du > scale)
            down = false;
        if (n.du < -scale)
            up = false;
    }
    return up || down;
}

// --- shared state --------------------------------------------------------

const HTransform& standard()
{
    static const HTransform ht(make_rational_family(120.0, 1.0, 1.0));
    return ht;
}

struct Run {
    int k;
    int nu;
    BranchCurve curve;
    std::optional<RadialSolution> sol;
    std::string error;
};

std::vector<Run>& runs()
{
    static std::vector<Run> all = [] {
        std::vector<Run> out;
        for (int k : {2, 3})
            for (int nu : {1, -1}) {
                Run r{k, nu, {}, std::nullopt, {}};
                try {
                    r.curve = trace_branch(k, nu, standard(), {2, 1.0});
                    r.sol = solve_at_unit_lambda(r.curve, standard(), {2, 1.0});
                } catch (const Error& e) {
                    r.error = e.what();
                }
                out.push_back(std::move(r));
            }
        return out;
    }();
    return all;
}

std::string tag(const Run& r) { return "(" + std::to_string(r.k) + "," + (r.nu > 0 ? "+" : "-") + ")"; }

// --- criteria --------------------------------------------------------------

Verdict eigenvalue_oracles()
{
    Verdict v;
    const Tolerances tol;
    const double j11 = oracle::bessel_zero(1, 1), j12 = oracle::bessel_zero(1, 2), w1 = oracle::tan_root(1);
    struct Case {
        const char* name;
        int N, k;
        double expect;
    };
    for (const Case& c : {Case{"mu_1(N=2)", 2, 1, j11 * j11}, Case{"mu_1(N=3)", 3, 1, w1 * w1},
                          Case{"mu_2(N=2)", 2, 2, j12 * j12}}) {
        const double mu = eigenvalue(c.k, WeightFn::unit(), {c.N, 1.0}, tol).mu;
        const double err = std::abs(mu - c.expect);
        if (!(err <= 1e-8 * mu))
            v.fail(std::string(c.name) + " = " + fmt(mu) + " misses oracle " + fmt(c.expect));
        else if (v.passed)
            v.detail += std::string(c.name) + " rel err " + fmt(err / mu) + "; ";
    }
    for (int N : {2, 3}) {
        const double mu0 = eigenvalue(0, WeightFn::unit(), {N, 1.0}, tol).mu;
        if (!(std::abs(mu0) <= tol.abs_tol))
            v.fail("mu_0 = " + fmt(mu0));
    }
    return v;
}

Verdict eigenfunction_structure()
{
    Verdict v;
    const Tolerances tol;
    for (int N : {2, 3}) {
        double prev = -1.0;
        for (int k = 0; k <= 5; ++k) {
            const EigenPair p = eigenvalue(k, WeightFn::unit(), {N, 1.0}, tol);
            const std::string at = " (N=" + std::to_string(N) + ", k=" + std::to_string(k) + ")";
            if (static_cast<int>(p.zeros.interior_count()) != k)
                v.fail(std::to_string(p.zeros.interior_count()) + " interior zeros" + at);
            for (const UZero& z : p.zeros.u_zeros)
                if (!(std::abs(z.slope) > tol.simplicity_floor * p.psi.sup_norm()))
                    v.fail("non-simple zero at r=" + fmt(z.r) + at);
            if (monotone(p.psi) != (k <= 1))
                v.fail(std::string("monotonicity ") + (k <= 1 ? "expected" : "unexpected") + at);
            if (!(p.mu > prev))
                v.fail("ladder not increasing" + at);
            prev = p.mu;
        }
    }
    if (v.passed)
        v.detail = "k = 0..5 for N = 2, 3";
    return v;
}

Verdict zero_monotonicity()
{
    Verdict v;
    std::vector<double> grid;
    for (int i = 0; i < 20; ++i)
        grid.push_back(std::pow(10.0, 3.0 * i / 19.0));
    const Tolerances tol;
    for (int N : {2, 3}) {
        const MonotonicityReport rep = zero_monotonicity_table(WeightFn::unit(), {N, 1.0}, grid, N == 3 ? 3 : 2, tol);
        if (!rep.passed)
            v.fail("N=" + std::to_string(N) + ": " + rep.detail);
        if (N == 3) {
            double worst = 0.0;
            for (std::size_t k = 0; k < 3; ++k)
                for (std::size_t i = 0; i < grid.size(); ++i)
                    worst = std::max(worst, std::abs(rep.tau[k][i] - (k + 1) * pi / std::sqrt(grid[i])));
            if (!(worst <= 1e-6))
                v.fail("N=3: |tau_k - k pi/sqrt(mu)| = " + fmt(worst));
            else if (v.passed)
                v.detail = "N=3 max |tau_k - k pi/sqrt(mu)| = " + fmt(worst);
        }
    }
    return v;
}

Verdict zero_spacing()
{
    Verdict v;
    // the comparison solution decays like r^{(1-N)/2}; the tail zeros need
    // a tighter integration than the library default to resolve pi exactly
    Tolerances tol;
    tol.abs_tol = 1e-16;
    tol.rel_tol = 1e-14;
    for (int N : {2, 3, 5}) {
        const ComparisonSolution cs = oscillation_comparison({N, 1.0}, 100.0, tol);
        const auto d = cs.spacings();
        double tail = 0.0, all = 0.0;
        for (std::size_t n = 0; n < d.size(); ++n) {
            all = std::max(all, std::abs(d[n] - pi));
            if (n + 1 >= 20)
                tail = std::max(tail, std::abs(d[n] - pi));
        }
        if (!(tail < 1e-3))
            v.fail("N=" + std::to_string(N) + ": tail spacing deviation " + fmt(tail));
        if (N == 3 && !(all <= tol.zero_refine_tol))
            v.fail("N=3: spacing deviates from pi by " + fmt(all));
        if (v.passed)
            v.detail += "N=" + std::to_string(N) + " " + fmt(N == 3 ? all : tail) + "; ";
    }
    return v;
}

Verdict desk_reproduction()
{
    Verdict v;
    const std::vector<int> expected{1, 1, 2, 2};
    for (std::size_t i = 0; i < runs().size(); ++i) {
        const Run& r = runs()[i];
        if (!r.sol) {
            v.fail(tag(r) + ": " + r.error);
            continue;
        }
        if (r.curve.terminated != Termination::ReachedTarget)
            v.fail(tag(r) + " did not reach lambda=1");
        if (r.sol->sign_changes != expected[i])
            v.fail(tag(r) + " has " + std::to_string(r.sol->sign_changes) + " sign changes");
        if (!(r.sol->min_u > 0.0))
            v.fail(tag(r) + " min u = " + fmt(r.sol->min_u));
        if (r.k == 2) {
            const Monotone want = r.nu > 0 ? Monotone::Decreasing : Monotone::Increasing;
            if (r.sol->monotone != want)
                v.fail(tag(r) + " is " + std::string(to_string(r.sol->monotone)));
            const FluxReport fr = monotone_flux_check(*r.sol, {2, 1.0});
            if (!fr.passed)
                v.fail(tag(r) + " flux: " + fr.detail);
        }
    }
    if (v.passed) {
        for (const Run& r : runs())
            v.detail += tag(r) + " zeta=" + fmt(r.sol->zeta) + " ";
    }
    return v;
}

Verdict oracle_equivalence()
{
    Verdict v;
    const double beta = standard().spec.beta;
    const auto roots = zeta_sweep_oracle(1.0, standard(), {2, 1.0}, -0.99 * beta, 10.0 * beta, 2000);
    for (const Run& r : runs()) {
        if (!r.sol) {
            v.fail(tag(r) + " has no solution to compare");
            continue;
        }
        const double z = r.sol->zeta;
        int hits = 0;
        for (const SweepRoot& s : roots)
            if (std::abs(s.zeta - z) <= 1e-6 * std::max(1.0, std::abs(z)) && s.nodal_count == r.k - 1 &&
                (s.zeta > 0) == (r.nu > 0))
                ++hits;
        if (hits != 1)
            v.fail(tag(r) + " zeta=" + fmt(z) + " matched by " + std::to_string(hits) +
                   " sweep roots; sweep window starts at " + fmt(-0.99 * beta));
    }
    if (v.passed)
        v.detail = std::to_string(roots.size()) + " sweep roots";
    return v;
}

Verdict lower_bound()
{
    Verdict v;
    const double beta = standard().spec.beta;
    std::size_t n = 0;
    double worst = INFINITY;
    for (const Run& r : runs())
        for (const BranchPoint& p : r.curve.points)
            if (p.lambda > 0.0 && p.lambda <= 1.0) {
                ++n;
                worst = std::min(worst, p.min_v);
                if (!(p.min_v > -beta))
                    v.fail(tag(r) + " min v = " + fmt(p.min_v) + " at lambda=" + fmt(p.lambda));
            }
    if (n == 0)
        v.fail("no branch points traced");
    if (v.passed)
        v.detail = std::to_string(n) + " points, lowest min v = " + fmt(worst);
    return v;
}

Verdict structural_suites()
{
    Verdict v;
    const Tolerances tol;
    std::size_t checked = 0;
    double worst_res = 0.0;
    for (int N : {2, 3})
        for (int k = 0; k <= 5; ++k) {
            const EigenPair p = eigenvalue(k, WeightFn::unit(), {N, 1.0}, tol);
            const std::string at = "psi_" + std::to_string(k) + " N=" + std::to_string(N);
            ++checked;
            if (!check_interlacing(p.zeros).passed)
                v.fail(at + " interlacing");
            const double res = conservative_residual(p.psi, p.psi.rhs());
            worst_res = std::max(worst_res, res);
            if (!(res <= 10 * tol.abs_tol))
                v.fail(at + " conservative residual " + fmt(res));
            const double mu = p.mu;
            if (!apriori_bound_check(p.psi, [mu](double s) { return mu * s; }).passed)
                v.fail(at + " a priori bound");
        }
    for (const Run& r : runs()) {
        for (const BranchPoint& p : r.curve.points) {
            ++checked;
            const double res = conservative_residual(p.profile, p.profile.rhs());
            worst_res = std::max(worst_res, res);
            if (!(res <= 10 * tol.abs_tol))
                v.fail(tag(r) + " conservative residual " + fmt(res) + " at lambda=" + fmt(p.lambda));
            const BoundReport b = apriori_bound_check(p, standard());
            if (!b.passed)
                v.fail(tag(r) + " a priori bound at lambda=" + fmt(p.lambda) + ": " + b.detail);
        }
        if (r.sol) {
            const Trajectory vprof = r.sol->u.shifted(-r.sol->beta);
            if (!check_interlacing(locate_zeros(vprof, tol)).passed)
                v.fail(tag(r) + " interlacing at lambda=1");
        }
    }
    const XiReport xi = xi_smallness(standard(), 1e-2, 1e-3);
    if (!xi.passed)
        v.fail("xi smallness: " + xi.detail);
    if (v.passed)
        v.detail = std::to_string(checked) + " profiles, worst conservative residual " + fmt(worst_res);
    return v;
}

Verdict hypothesis_gating()
{
    Verdict v;
    std::ostringstream out, err;
    const int code = cli::run({"solve", "--family", "rational:1,1,1", "--k", "2"}, out, err);
    if (code != cli::kExitValidation)
        v.fail("exit code " + std::to_string(code));
    if (err.str().find("f'(beta) = 1.5 <= lambda_2") == std::string::npos)
        v.fail("message does not cite f'(beta) <= lambda_2: " + err.str());
    if (!out.str().empty())
        v.fail("output produced before the gate");
    if (v.passed) {
        std::string msg = err.str();
        while (!msg.empty() && msg.back() == '\n')
            msg.pop_back();
        v.detail = msg;
    }
    return v;
}

}  // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"eigenvalue oracles", eigenvalue_oracles},
        {"eigenfunction structure", eigenfunction_structure},
        {"zero monotonicity", zero_monotonicity},
        {"zero spacing", zero_spacing},
        {"desk-scale branches", desk_reproduction},
        {"sweep oracle equivalence", oracle_equivalence},
        {"lower bound on branches", lower_bound},
        {"structural suites", structural_suites},
        {"hypothesis gating", hypothesis_gating},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (v.passed ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << ": "
                  << v.detail << " [" << fmt(secs) << "s]" << std::endl;
        failed += v.passed ? 0 : 1;
    }
    std::cout << "acceptance: " << criteria.size() - failed << "/" << criteria.size() << " passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
