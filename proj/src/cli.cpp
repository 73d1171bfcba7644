#include "radneumann/cli.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "radneumann/branch.hpp"
#include "radneumann/csv.hpp"
#include "radneumann/errors.hpp"
#include "radneumann/run_config.hpp"
#include "radneumann/spectrum.hpp"
#include "radneumann/verify.hpp"

namespace radneumann::cli {

namespace {

// Writes to --out atomically, or to stdout when no path was given.
void emit(const RunConfig& cfg, std::ostream& out, const std::function<void(std::ostream&)>& writer)
{
    if (cfg.out.empty())
        writer(out);
    else
        write_file_atomically(cfg.out, writer);
}

std::ostream& summary_stream(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    return cfg.out.empty() ? err : out;
}

std::string sign_text(int nu) { return nu > 0 ? "+" : "-"; }

int do_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const RadialProblem prob{cfg.dim, 1.0};
    const WeightFn a = cfg.weight_fn();
    const Tolerances tol = cfg.tolerances();
    EigenOptions eo;
    eo.parallel = cfg.parallel;
    std::vector<EigenPair> pairs;
    for (int k = 0; k <= cfg.k_max; ++k)
        pairs.push_back(eigenvalue(k, a, prob, tol, eo));

    emit(cfg, out, [&](std::ostream& os) {
        os << "k,mu,lambda,zero_count\n";
        for (const EigenPair& p : pairs)
            os << p.k << ',' << format_real(p.mu) << ',' << format_real(p.lambda()) << ','
               << p.zeros.interior_count() << '\n';
    });
    auto& s = summary_stream(cfg, out, err);
    for (const EigenPair& p : pairs)
        s << "k=" << p.k << ",mu=" << format_real(p.mu) << ",lambda=" << format_real(p.lambda())
          << ",zero_count=" << p.zeros.interior_count() << '\n';
    return kExitOk;
}

// Returns the exit code of a failed hypothesis check, or 0.
int gate(const RunConfig& cfg, const NonlinearitySpec& spec, std::ostream& err)
{
    SamplingPlan plan;
    plan.seed = cfg.seed;
    const ConditionReport rep =
        validate_conditions(spec, cfg.k, RadialProblem{cfg.dim, 1.0}, plan, cfg.tolerances());
    if (const ConditionCheck* c = rep.first_failure()) {
        err << "radneumann: hypothesis failed for " << spec.label << ": " << c->name << " (" << c->detail
            << ")\n";
        return kExitValidation;
    }
    return kExitOk;
}

BranchCurve traced(const RunConfig& cfg, const HTransform& ht)
{
    ContinuationOptions co;
    co.tol = cfg.tolerances();
    BranchCurve curve = trace_branch(cfg.k, cfg.sign, ht, RadialProblem{cfg.dim, 1.0}, co);
    if (curve.terminated != Termination::ReachedTarget)
        throw Error(ErrorKind::Stall, "branch k=" + std::to_string(cfg.k) + " did not reach lambda=1: " +
                                          curve.detail);
    return curve;
}

int do_branch(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const NonlinearitySpec spec = cfg.nonlinearity();
    if (int rc = gate(cfg, spec, err))
        return rc;
    const HTransform ht(spec);
    const BranchCurve curve = traced(cfg, ht);
    emit(cfg, out, [&](std::ostream& os) {
        os << "lambda,zeta,norm_inf,nodal_count,min_v\n";
        for (const BranchPoint& p : curve.points)
            os << format_real(p.lambda) << ',' << format_real(p.zeta) << ',' << format_real(p.norm_inf) << ','
               << p.nodal_count << ',' << format_real(p.min_v) << '\n';
    });
    summary_stream(cfg, out, err) << "k=" << curve.k << ",sign=" << sign_text(curve.nu)
                                  << ",lambda_star=" << format_real(curve.lambda_star)
                                  << ",points=" << curve.points.size() << ",terminated=" << to_string(curve.terminated)
                                  << '\n';
    return kExitOk;
}

int do_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const NonlinearitySpec spec = cfg.nonlinearity();
    if (int rc = gate(cfg, spec, err))
        return rc;
    const HTransform ht(spec);
    const BranchCurve curve = traced(cfg, ht);
    const RadialSolution sol = solve_at_unit_lambda(curve, ht, RadialProblem{cfg.dim, 1.0}, cfg.tolerances());
    emit(cfg, out, [&](std::ostream& os) { sol.u.write_csv(os); });
    summary_stream(cfg, out, err) << "k=" << sol.k << ",sign=" << sign_text(sol.nu)
                                  << ",sign_changes=" << sol.sign_changes << ",monotone=" << to_string(sol.monotone)
                                  << ",min_u=" << format_real(sol.min_u) << '\n';
    return kExitOk;
}

int do_verify(const RunConfig& cfg, std::ostream& out)
{
    VerifyOptions vo;
    vo.dim = cfg.dim;
    vo.k = cfg.k;
    vo.tol = cfg.tolerances();
    vo.spec = cfg.nonlinearity();
    vo.seed = cfg.seed;
    vo.parallel = cfg.parallel;
    if (cfg.out.empty())
        return run_verify(cfg.suite, vo, out);
    std::ostringstream report;
    const int rc = run_verify(cfg.suite, vo, report);
    write_file_atomically(cfg.out, [&](std::ostream& os) { os << report.str(); });
    const std::string text = report.str();
    const auto last = text.rfind('\n', text.size() - 2);
    out << text.substr(last == std::string::npos ? 0 : last + 1);
    return rc;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    std::string sign = "+";

    CLI::App app{"Radial Neumann eigenvalues, bifurcation branches and oscillatory radial solutions"};
    app.name("radneumann");
    app.require_subcommand(1);

    auto common = [&](CLI::App* sub) {
        sub->add_option("--dim", cfg.dim, "space dimension N >= 2")->capture_default_str();
        sub->add_option("--tol", cfg.tol, "integration tolerance (absolute and relative)")->capture_default_str();
        sub->add_option("--out", cfg.out, "output path (written atomically); stdout when omitted");
        sub->add_flag("--parallel", cfg.parallel, "evaluate independent work concurrently");
    };
    auto nonlinear = [&](CLI::App* sub) {
        sub->add_option("--k", cfg.k, "branch index k >= 2")->capture_default_str();
        sub->add_option("--sign", sign, "half-branch, + or -")
            ->check(CLI::IsMember({"+", "-"}))
            ->capture_default_str();
        auto* fam = sub->add_option("--family", cfg.family, "built-in nonlinearity rational:A,C,beta")
                        ->capture_default_str();
        sub->add_option("--f", cfg.f_path, "nonlinearity config file")->excludes(fam);
        sub->add_option("--seed", cfg.seed, "seed of the sampled hypothesis grid")->capture_default_str();
    };

    auto* spectrum = app.add_subcommand("spectrum", "radial Neumann eigenvalues mu_0..mu_K");
    common(spectrum);
    spectrum->add_option("--k-max", cfg.k_max, "largest eigenvalue index")->capture_default_str();
    spectrum->add_option("--weight", cfg.weight, "unit or file:<path> (two-column r,a CSV on a uniform grid)")
        ->capture_default_str();

    auto* branch = app.add_subcommand("branch", "trace one half-branch to lambda = 1");
    common(branch);
    nonlinear(branch);

    auto* solve = app.add_subcommand("solve", "radial solution on one half-branch at lambda = 1");
    common(solve);
    nonlinear(solve);

    auto* verify = app.add_subcommand("verify", "run check suites");
    common(verify);
    nonlinear(verify);
    std::vector<std::string> suites{"all"};
    suites.insert(suites.end(), suite_names().begin(), suite_names().end());
    verify->add_option("--suite", cfg.suite, "check suite, or all")
        ->check(CLI::IsMember(suites))
        ->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    cfg.sign = sign == "+" ? 1 : -1;
    cfg.subcommand = app.get_subcommands().front()->get_name();

    try {
        cfg.validate();
        if (cfg.subcommand == "spectrum")
            return do_spectrum(cfg, out, err);
        if (cfg.subcommand == "branch")
            return do_branch(cfg, out, err);
        if (cfg.subcommand == "solve")
            return do_solve(cfg, out, err);
        return do_verify(cfg, out);
    } catch (const Error& e) {
        err << "radneumann: " << e.what() << '\n';
        return e.is_validation() ? kExitValidation : kExitNumerical;
    } catch (const std::exception& e) {
        err << "radneumann: " << e.what() << '\n';
        return kExitCheckFailed;
    }
}

}  // namespace radneumann::cli
