#include "radneumann/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "radneumann/branch.hpp"
#include "radneumann/csv.hpp"
#include "radneumann/errors.hpp"
#include "radneumann/kernels.hpp"
#include "radneumann/spectrum.hpp"

namespace radneumann {

namespace {

constexpr int kLadderDepth = 5;

std::string num(double x) { return format_real(x); }

struct BranchRun {
    int k = 2;
    int nu = 1;
    BranchCurve curve;
    RadialSolution sol;
};

// Shared, lazily computed inputs of the suites. Safe to use from concurrent
// suite runs.
class Context {
public:
    explicit Context(const VerifyOptions& o) : opts(o), prob{o.dim, 1.0}, ht(o.spec) {}

    const VerifyOptions opts;
    const RadialProblem prob;
    const HTransform ht;

    const std::vector<EigenPair>& eigenpairs()
    {
        std::call_once(eig_once_, [&] {
            for (int k = 0; k <= kLadderDepth; ++k)
                eig_.push_back(eigenvalue(k, WeightFn::unit(), prob, opts.tol));
        });
        return eig_;
    }

    /// Branch indices k in {2, 3} with f'(beta) > lambda_k.
    const std::vector<int>& admissible()
    {
        std::call_once(adm_once_, [&] {
            for (int k : {2, 3}) {
                try {
                    bifurcation_point(k, ht.spec, prob, opts.tol);
                    adm_.push_back(k);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::NoBifurcation)
                        throw;
                }
            }
        });
        return adm_;
    }

    /// One entry per admissible (k, nu); failures are kept as messages.
    const std::vector<std::pair<std::string, std::optional<BranchRun>>>& runs()
    {
        std::call_once(run_once_, [&] {
            for (int k : admissible()) {
                for (int nu : {1, -1}) {
                    const std::string tag = "k=" + std::to_string(k) + (nu > 0 ? ",+" : ",-");
                    try {
                        ContinuationOptions co;
                        co.tol = opts.tol;
                        BranchRun r;
                        r.k = k;
                        r.nu = nu;
                        r.curve = trace_branch(k, nu, ht, prob, co);
                        r.sol = solve_at_unit_lambda(r.curve, ht, prob, opts.tol);
                        runs_.emplace_back(tag, std::move(r));
                    } catch (const std::exception& e) {
                        runs_.emplace_back(tag + ": " + e.what(), std::nullopt);
                    }
                }
            }
        });
        return runs_;
    }

private:
    std::once_flag eig_once_, adm_once_, run_once_;
    std::vector<EigenPair> eig_;
    std::vector<int> adm_;
    std::vector<std::pair<std::string, std::optional<BranchRun>>> runs_;
};

using Checks = std::vector<CheckResult>;

class Recorder {
public:
    explicit Recorder(std::string suite) : suite_(std::move(suite)) {}

    void add(std::string name, bool passed, std::string detail = {})
    {
        out_.push_back({suite_, std::move(name), passed, std::move(detail)});
    }

    // Runs body; an exception becomes a failed check under `name`.
    void guard(const std::string& name, const std::function<void()>& body)
    {
        try {
            body();
        } catch (const std::exception& e) {
            add(name, false, e.what());
        }
    }

    /// Adds one failed check per branch run that did not complete.
    template <class Fn>
    void each_run(Context& ctx, Fn&& fn)
    {
        if (ctx.admissible().empty()) {
            add("branches", false, "f'(beta) <= lambda_2: no branch to trace");
            return;
        }
        for (const auto& [tag, run] : ctx.runs()) {
            if (!run)
                add("branch " + tag, false, "run failed");
            else
                fn(tag, *run);
        }
    }

    Checks take() { return std::move(out_); }

private:
    std::string suite_;
    Checks out_;
};

std::vector<double> seeded_mus(std::uint64_t seed, int n)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> expo(0.0, 3.0);
    std::vector<double> mus;
    for (int i = 0; i < n; ++i)
        mus.push_back(std::pow(10.0, expo(rng)));
    return mus;
}

// --- suites ------------------------------------------------------------------

Checks simplicity(Context& ctx)
{
    Recorder rec("simplicity");
    rec.guard("eigenfunctions", [&] {
        for (const EigenPair& e : ctx.eigenpairs()) {
            const double scale = e.psi.sup_norm();
            double worst = std::numeric_limits<double>::infinity();
            for (const UZero& z : e.zeros.u_zeros)
                worst = std::min(worst, std::abs(z.slope) / scale);
            const bool ok = e.zeros.u_zeros.empty() || worst > ctx.opts.tol.simplicity_floor;
            rec.add("psi_" + std::to_string(e.k) + " zeros simple", ok,
                    e.zeros.u_zeros.empty() ? "no zeros" : "min |u'(tau)|/||u|| = " + num(worst));
        }
    });
    rec.guard("seeded trajectories", [&] {
        int zeros = 0;
        for (double mu : seeded_mus(ctx.opts.seed, 20)) {
            const Trajectory t = integrate_ivp(ctx.prob, eigen_rhs(mu, WeightFn::unit()), 1.0, ctx.opts.tol);
            zeros += static_cast<int>(locate_zeros(t, ctx.opts.tol).interior_count());
        }
        rec.add("20 seeded mu in [1,1e3]", true, std::to_string(zeros) + " zeros, all above the simplicity floor");
    });
    return rec.take();
}

Checks interlacing(Context& ctx)
{
    Recorder rec("interlacing");
    rec.guard("eigenfunctions", [&] {
        for (const EigenPair& e : ctx.eigenpairs()) {
            const InterlacingReport r = check_interlacing(e.zeros);
            rec.add("psi_" + std::to_string(e.k), r.passed, r.detail);
        }
    });
    rec.guard("seeded trajectories", [&] {
        std::mt19937_64 rng(ctx.opts.seed + 1);
        std::uniform_int_distribution<int> dims(2, 6);
        int failed = 0;
        std::string first;
        for (double mu : seeded_mus(ctx.opts.seed + 1, 20)) {
            const RadialProblem p{dims(rng), 1.0};
            const Trajectory t = integrate_ivp(p, eigen_rhs(mu, WeightFn::unit()), 1.0, ctx.opts.tol);
            const InterlacingReport r = check_interlacing(locate_zeros(t, ctx.opts.tol));
            if (!r.passed && failed++ == 0)
                first = "N=" + std::to_string(p.dimension) + ", mu=" + num(mu) + ": " + r.detail;
        }
        rec.add("20 seeded (mu, N) pairs", failed == 0,
                failed == 0 ? "all alternate" : std::to_string(failed) + " failed; first " + first);
    });
    return rec.take();
}

Checks conservative(Context& ctx)
{
    Recorder rec("conservative");
    const double bound = 10.0 * ctx.opts.tol.abs_tol;
    rec.guard("eigenfunctions", [&] {
        for (const EigenPair& e : ctx.eigenpairs()) {
            const double r = conservative_residual(e.psi, e.psi.rhs());
            rec.add("psi_" + std::to_string(e.k), r <= bound, "residual " + num(r) + " vs " + num(bound));
        }
    });
    rec.guard("branch points", [&] {
        rec.each_run(ctx, [&](const std::string& tag, const BranchRun& run) {
            double worst = 0.0;
            for (const BranchPoint& p : run.curve.points)
                worst = std::max(worst, conservative_residual(p.profile, p.profile.rhs()));
            rec.add("branch " + tag + " (" + std::to_string(run.curve.points.size()) + " points)", worst <= bound,
                    "max residual " + num(worst) + " vs " + num(bound));
        });
    });
    return rec.take();
}

Checks zero_monotonicity(Context& ctx)
{
    Recorder rec("zero-monotonicity");
    rec.guard("tau_k and r_k in mu", [&] {
        std::vector<double> grid;
        for (int i = 0; i < 20; ++i)
            grid.push_back(std::pow(10.0, 3.0 * i / 19.0));
        const int depth = ctx.prob.dimension == 3 ? 3 : 2;
        const MonotonicityReport rep = zero_monotonicity_table(WeightFn::unit(), ctx.prob, grid, depth, ctx.opts.tol);
        rec.add("strict decrease over 20-point grid in [1,1e3]", rep.passed, rep.detail);
        if (ctx.prob.dimension == 3) {
            double worst = 0.0;
            for (std::size_t k = 0; k < 3; ++k)
                for (std::size_t i = 0; i < grid.size(); ++i)
                    worst = std::max(worst, std::abs(rep.tau[k][i] - (k + 1) * std::numbers::pi / std::sqrt(grid[i])));
            rec.add("tau_k(mu) = k pi / sqrt(mu)", worst <= 1e-6, "max deviation " + num(worst));
        }
    });
    return rec.take();
}

Checks spacing(Context& ctx)
{
    Recorder rec("spacing");
    rec.guard("comparison zeros", [&] {
        // the comparison solution decays like r^{(1-N)/2}; zeros at r ~ 100
        // need tighter absolute control than the default
        Tolerances tight = ctx.opts.tol;
        tight.abs_tol = std::min(tight.abs_tol, 1e-16);
        tight.rel_tol = std::min(tight.rel_tol, 1e-14);
        const ComparisonSolution cs = oscillation_comparison(ctx.prob, 100.0, tight);
        const auto gaps = cs.spacings();
        double tail = 0.0, all = 0.0;
        for (std::size_t n = 0; n < gaps.size(); ++n) {
            const double d = std::abs(gaps[n] - std::numbers::pi);
            all = std::max(all, d);
            if (n >= 19)
                tail = std::max(tail, d);
        }
        rec.add("|gap - pi| < 1e-3 from the 20th gap", tail < 1e-3,
                std::to_string(gaps.size()) + " gaps, max tail deviation " + num(tail));
        if (ctx.prob.dimension == 3)
            rec.add("every gap equals pi", all <= tight.zero_refine_tol, "max deviation " + num(all));
        const double dev = scaled_zero_deviation(cs, 2.0, ctx.prob, tight);
        rec.add("gamma = 2 rescaling", dev <= 10.0 * tight.zero_refine_tol, "max |zeta_n - xi_n/2| = " + num(dev));
    });
    return rec.take();
}

Checks ladder(Context& ctx)
{
    Recorder rec("ladder");
    rec.guard("eigenvalues", [&] {
        const auto& eig = ctx.eigenpairs();
        bool increasing = eig.front().mu == 0.0;
        for (std::size_t k = 1; k < eig.size(); ++k)
            increasing = increasing && eig[k].mu > eig[k - 1].mu;
        std::ostringstream os;
        for (const auto& e : eig)
            os << (e.k ? ", " : "") << num(e.mu);
        rec.add("0 = mu_0 < mu_1 < ... < mu_5", increasing, os.str());
        for (const EigenPair& e : eig) {
            const bool zeros = static_cast<int>(e.zeros.interior_count()) == e.k;
            const bool monotone = e.zeros.du_zeros.empty();
            const bool expect_monotone = e.k <= 1;
            rec.add("psi_" + std::to_string(e.k) + " index and monotonicity", zeros && monotone == expect_monotone,
                    std::to_string(e.zeros.interior_count()) + " interior zeros, " +
                        std::to_string(e.zeros.du_zeros.size()) + " interior zeros of psi'");
            if (e.k == 0)
                continue;
            const double lo = miss_distance(e.mu * (1 - 1e-6), WeightFn::unit(), ctx.prob, ctx.opts.tol);
            const double hi = miss_distance(e.mu * (1 + 1e-6), WeightFn::unit(), ctx.prob, ctx.opts.tol);
            rec.add("mu_" + std::to_string(e.k) + " transversal", lo * hi < 0.0,
                    "miss distance " + num(lo) + " -> " + num(hi));
        }
    });
    rec.guard("weight scaling", [&] {
        const WeightFn doubled = WeightFn::scaled(WeightFn::unit(), 2.0);
        bool ok = true;
        std::string detail;
        for (int k = 1; k <= 3; ++k) {
            const double base = ctx.eigenpairs()[static_cast<std::size_t>(k)].mu;
            const double scaled = eigenvalue(k, doubled, ctx.prob, ctx.opts.tol).mu;
            ok = ok && scaled < base;
            detail += (k > 1 ? ", " : "") + num(base) + " -> " + num(scaled);
        }
        rec.add("mu_k(2a) < mu_k(a), k=1..3", ok, detail);
    });
    return rec.take();
}

Checks hypotheses(Context& ctx)
{
    Recorder rec("hypotheses");
    rec.guard("conditions", [&] {
        SamplingPlan plan;
        plan.seed = ctx.opts.seed;
        const ConditionReport rep = validate_conditions(ctx.ht.spec, ctx.opts.k, ctx.prob, plan, ctx.opts.tol);
        for (const ConditionCheck& c : rep.checks)
            rec.add(c.name, c.passed, c.detail);
    });
    return rec.take();
}

Checks xi(Context& ctx)
{
    Recorder rec("xi");
    rec.guard("remainder", [&] {
        const XiReport r = xi_smallness(ctx.ht, 1e-2 * ctx.ht.spec.beta, 1e-3);
        rec.add("|xi(v)/v| -> 0", r.passed, r.detail);
        const double beta = ctx.ht.spec.beta;
        const double below = ctx.ht.h(std::nextafter(-beta, -2.0 * beta));
        const double at = ctx.ht.h(-beta);
        rec.add("h continuous at -beta", below == -beta && at == -beta,
                "h(-beta-) = " + num(below) + ", h(-beta) = " + num(at));
        rec.add("xi(0) = 0", ctx.ht.xi(0.0) == 0.0, "xi(0) = " + num(ctx.ht.xi(0.0)));
    });
    return rec.take();
}

Checks apriori(Context& ctx)
{
    Recorder rec("apriori");
    rec.guard("eigenfunctions", [&] {
        for (const EigenPair& e : ctx.eigenpairs()) {
            const double mu = e.mu;
            const BoundReport b = apriori_bound_check(e.psi, [mu](double s) { return mu * s; });
            rec.add("psi_" + std::to_string(e.k), b.passed, b.detail);
        }
    });
    rec.guard("branch points", [&] {
        rec.each_run(ctx, [&](const std::string& tag, const BranchRun& run) {
            int failed = 0;
            std::string first;
            for (const BranchPoint& p : run.curve.points) {
                const BoundReport b = apriori_bound_check(p, ctx.ht);
                if (!b.passed && failed++ == 0)
                    first = "lambda=" + num(p.lambda) + ": " + b.detail;
            }
            rec.add("branch " + tag, failed == 0,
                    failed == 0 ? std::to_string(run.curve.points.size()) + " points" : first);
        });
    });
    return rec.take();
}

Checks lower_bound(Context& ctx)
{
    Recorder rec("lower-bound");
    rec.guard("branch points", [&] {
        const double beta = ctx.ht.spec.beta;
        rec.each_run(ctx, [&](const std::string& tag, const BranchRun& run) {
            double worst = std::numeric_limits<double>::infinity();
            for (const BranchPoint& p : run.curve.points)
                if (p.lambda > 0.0 && p.lambda <= 1.0)
                    worst = std::min(worst, p.min_v);
            rec.add("branch " + tag + " min v > -beta", worst > -beta, "min v = " + num(worst));
            rec.add("branch " + tag + " min u > 0 at lambda=1", run.sol.min_u > 0.0, "min u = " + num(run.sol.min_u));
        });
    });
    return rec.take();
}

Checks flux(Context& ctx)
{
    Recorder rec("flux");
    rec.guard("k=2 solutions", [&] {
        bool any = false;
        rec.each_run(ctx, [&](const std::string& tag, const BranchRun& run) {
            if (run.k != 2)
                return;
            any = true;
            const FluxReport r = monotone_flux_check(run.sol, ctx.prob);
            rec.add("branch " + tag, r.passed, r.detail);
        });
        if (!any && !ctx.admissible().empty())
            rec.add("k=2 solutions", false, "no k=2 solution available");
    });
    return rec.take();
}

Checks solutions(Context& ctx)
{
    Recorder rec("solutions");
    rec.guard("lambda=1 solutions", [&] {
        const double beta = ctx.ht.spec.beta;
        std::vector<SweepRoot> roots;
        bool swept = false;
        rec.each_run(ctx, [&](const std::string& tag, const BranchRun& run) {
            const RadialSolution& s = run.sol;
            rec.add("branch " + tag + " reaches lambda=1", run.curve.terminated == Termination::ReachedTarget,
                    run.curve.detail);
            rec.add("branch " + tag + " sign changes", s.sign_changes == run.k - 1,
                    std::to_string(s.sign_changes) + " crossings of beta");
            if (run.k == 2) {
                const Monotone want = run.nu > 0 ? Monotone::Decreasing : Monotone::Increasing;
                rec.add("branch " + tag + " monotone", s.monotone == want, std::string(to_string(s.monotone)));
            }
            const Trajectory v = s.u.shifted(-beta);
            const InterlacingReport il = check_interlacing(locate_zeros(v, ctx.opts.tol));
            rec.add("branch " + tag + " interlacing", il.passed, il.detail);

            if (!swept) {
                roots = zeta_sweep_oracle(1.0, ctx.ht, ctx.prob, -(1.0 - 1e-4) * beta, 10.0 * beta, 2000,
                                          ctx.opts.tol, ctx.opts.parallel);
                swept = true;
            }
            int matches = 0;
            double dz = std::numeric_limits<double>::infinity();
            for (const SweepRoot& r : roots) {
                if (r.nodal_count == run.k - 1 && (r.zeta > 0) == (run.nu > 0) && r.zeta != 0.0) {
                    ++matches;
                    dz = std::min(dz, std::abs(r.zeta - s.zeta));
                }
            }
            const bool ok = matches == 1 && dz <= 1e-6 * std::max(1.0, std::abs(s.zeta));
            rec.add("branch " + tag + " matches zeta sweep", ok,
                    std::to_string(matches) + " sweep roots in class, |dzeta| = " + num(dz));
        });
    });
    return rec.take();
}

using Suite = Checks (*)(Context&);

const std::vector<std::pair<std::string, Suite>>& registry()
{
    static const std::vector<std::pair<std::string, Suite>> r = {
        {"simplicity", simplicity},
        {"interlacing", interlacing},
        {"conservative", conservative},
        {"zero-monotonicity", zero_monotonicity},
        {"spacing", spacing},
        {"ladder", ladder},
        {"hypotheses", hypotheses},
        {"xi", xi},
        {"apriori", apriori},
        {"lower-bound", lower_bound},
        {"flux", flux},
        {"solutions", solutions},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, fn] : registry())
            n.push_back(name);
        return n;
    }();
    return names;
}

std::vector<CheckResult> run_suites(const std::string& selector, const VerifyOptions& opts)
{
    std::vector<Suite> chosen;
    for (const auto& [name, fn] : registry())
        if (selector == "all" || selector == name)
            chosen.push_back(fn);
    if (chosen.empty())
        throw Error(ErrorKind::Precondition, "unknown suite '" + selector + "'");

    Context ctx(opts);
    // each suite fills its own buffer; concatenation keeps the registry order
    const auto per_suite =
        kernels::map<Checks>(chosen.size(), opts.parallel, [&](std::size_t i) { return chosen[i](ctx); });
    std::vector<CheckResult> out;
    for (const auto& c : per_suite)
        out.insert(out.end(), c.begin(), c.end());
    return out;
}

int run_verify(const std::string& selector, const VerifyOptions& opts, std::ostream& out)
{
    const auto results = run_suites(selector, opts);
    int failed = 0;
    for (const CheckResult& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.suite << ": " << r.name;
        if (!r.detail.empty())
            out << " (" << r.detail << ')';
        out << '\n';
        failed += r.passed ? 0 : 1;
    }
    out << "verify: " << results.size() << " checks, " << failed << " failed\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace radneumann
