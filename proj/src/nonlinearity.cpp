#include "radneumann/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

// pchip.hpp in Boost 1.74 calls isnan unqualified
#include <math.h>
#include <boost/math/interpolators/pchip.hpp>

#include "radneumann/csv.hpp"
#include "radneumann/errors.hpp"
#include "radneumann/spectrum.hpp"

namespace radneumann {

void NonlinearitySpec::validate() const
{
    if (!f || !df)
        throw Error(ErrorKind::Precondition, "nonlinearity callables not set");
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw Error(ErrorKind::Precondition, "beta must be positive and finite");
    if (!std::isfinite(f_inf))
        throw Error(ErrorKind::Precondition, "f_inf must be finite");
}

NonlinearitySpec make_rational_family(double A, double C, double beta)
{
    if (!(A > 0.0 && C > 0.0 && beta > 0.0))
        throw Error(ErrorKind::Precondition, "rational family needs A, C, beta > 0");
    NonlinearitySpec spec;
    spec.f = [=](double s) { return s + A * s * (s - beta) / (1.0 + C * s); };
    spec.df = [=](double s) {
        const double d = 1.0 + C * s;
        return 1.0 + A * (C * s * s + 2.0 * s - beta) / (d * d);
    };
    spec.beta = beta;
    spec.f_inf = 1.0 + A / C;
    std::ostringstream os;
    os << "rational:" << format_real(A) << ',' << format_real(C) << ',' << format_real(beta);
    spec.label = os.str();
    return spec;
}

NonlinearitySpec make_sampled(std::vector<double> s, std::vector<double> f, double beta,
                              double f_inf, std::string label)
{
    if (s.size() != f.size() || s.size() < 4)
        throw Error(ErrorKind::Precondition, "sampled nonlinearity needs at least four (s, f) pairs");
    if (s.front() != 0.0)
        throw Error(ErrorKind::Precondition, "samples must start at s = 0");
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!(s[i] > s[i - 1]))
            throw Error(ErrorKind::Precondition, "sample abscissae must be strictly increasing");

    using Pchip = boost::math::interpolators::pchip<std::vector<double>>;
    const double s_last = s.back();
    auto spline = std::make_shared<Pchip>(std::move(s), std::move(f));
    const double f_last = (*spline)(s_last);
    const double slope_last = spline->prime(s_last);

    NonlinearitySpec spec;
    spec.f = [=](double x) {
        if (x > s_last)
            return f_last + slope_last * (x - s_last);
        return (*spline)(std::max(x, 0.0));
    };
    spec.df = [=](double x) {
        if (x > s_last)
            return slope_last;
        return spline->prime(std::max(x, 0.0));
    };
    spec.beta = beta;
    spec.f_inf = f_inf;
    spec.label = std::move(label);
    return spec;
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || trim(text.substr(used)).size() != 0)
        throw Error(ErrorKind::Precondition, "cannot parse " + what + " from '" + text + "'");
    return v;
}

NonlinearitySpec parse_family(const std::string& rest)
{
    std::istringstream is(rest);
    std::string name;
    is >> name;
    if (name != "rational")
        throw Error(ErrorKind::Precondition, "unknown family '" + name + "'");
    double A = NAN, C = NAN, beta = NAN;
    std::string tok;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::Precondition, "expected key=value, got '" + tok + "'");
        const std::string key = tok.substr(0, eq);
        const double val = parse_real(tok.substr(eq + 1), key);
        if (key == "A")
            A = val;
        else if (key == "C")
            C = val;
        else if (key == "beta")
            beta = val;
        else
            throw Error(ErrorKind::Precondition, "unknown rational family parameter '" + key + "'");
    }
    if (std::isnan(A) || std::isnan(C) || std::isnan(beta))
        throw Error(ErrorKind::Precondition, "rational family needs A, C and beta");
    return make_rational_family(A, C, beta);
}

}  // namespace

NonlinearitySpec parse_nonlinearity(std::istream& is)
{
    double beta = NAN, f_inf = NAN;
    std::string line;
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        if (line == "samples") {
            const auto rows = read_numeric_csv(is, 2);
            if (std::isnan(beta) || std::isnan(f_inf))
                throw Error(ErrorKind::Precondition, "beta and f_inf must precede the samples block");
            std::vector<double> s, f;
            for (const auto& r : rows) {
                s.push_back(r[0]);
                f.push_back(r[1]);
            }
            return make_sampled(std::move(s), std::move(f), beta, f_inf);
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::Precondition, "unrecognised config line '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "family")
            return parse_family(val);
        if (key == "beta")
            beta = parse_real(val, "beta");
        else if (key == "f_inf")
            f_inf = parse_real(val, "f_inf");
        else
            throw Error(ErrorKind::Precondition, "unknown config key '" + key + "'");
    }
    throw Error(ErrorKind::Precondition, "config has neither a family line nor a samples block");
}

NonlinearitySpec load_nonlinearity(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw Error(ErrorKind::Precondition, "cannot open nonlinearity config " + path.string());
    NonlinearitySpec spec = parse_nonlinearity(is);
    if (spec.label == "samples")
        spec.label = path.string();
    return spec;
}

// --- h transform -----------------------------------------------------------

HTransform::HTransform(NonlinearitySpec s) : spec(std::move(s))
{
    spec.validate();
    slope0 = spec.df(spec.beta);
}

double HTransform::h(double s) const
{
    const double beta = spec.beta;
    if (s < -beta)
        return -beta;
    return spec.f(s + beta) - beta;
}

double HTransform::xi(double v) const
{
    return h(v) - slope0 * v;
}

// --- hypotheses ------------------------------------------------------------

bool ConditionReport::passed() const
{
    return first_failure() == nullptr;
}

const ConditionCheck* ConditionReport::first_failure() const
{
    for (const auto& c : checks)
        if (!c.passed)
            return &c;
    return nullptr;
}

double derivative_deviation(const NonlinearitySpec& spec, int points)
{
    double worst = 0.0;
    const double top = 10.0 * spec.beta;
    for (int i = 0; i < points; ++i) {
        const double s = top * i / (points - 1);
        const double step = 6e-6 * std::max(1.0, s);
        // second-order one-sided formula where the central stencil leaves [0, inf)
        const double fd = s - step < 0.0
                              ? (-3.0 * spec.f(s) + 4.0 * spec.f(s + step) - spec.f(s + 2.0 * step)) / (2.0 * step)
                              : (spec.f(s + step) - spec.f(s - step)) / (2.0 * step);
        const double d = spec.df(s);
        worst = std::max(worst, std::abs(d - fd) / std::max(1.0, std::abs(d)));
    }
    return worst;
}

namespace {

std::vector<double> sample_grid(double beta, const SamplingPlan& plan)
{
    std::vector<double> g;
    const double top = plan.horizon * beta;
    const double bottom = 1e-6 * beta;
    const double ratio = std::log(top / bottom);
    for (int i = 0; i < plan.log_points; ++i)
        g.push_back(bottom * std::exp(ratio * i / std::max(1, plan.log_points - 1)));
    const int near = std::max(2, plan.log_points / 2);
    for (int i = 1; i < near; ++i)
        g.push_back(2.0 * beta * i / near);
    std::mt19937_64 rng(plan.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < plan.random_points; ++i)
        g.push_back(bottom * std::exp(ratio * unit(rng)));
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    g.erase(std::remove(g.begin(), g.end(), beta), g.end());
    return g;
}

std::string num(double x) { return format_real(x); }

}  // namespace

ConditionReport validate_conditions(const NonlinearitySpec& spec, int k, const RadialProblem& prob,
                                    const SamplingPlan& plan, const Tolerances& tol)
{
    spec.validate();
    if (k < 2)
        throw Error(ErrorKind::Precondition, "branch index k must be >= 2");

    ConditionReport rep;
    rep.k = k;
    const double beta = spec.beta;
    rep.grid = sample_grid(beta, plan);

    // (A1) f(0) = 0, f and f' finite, f' consistent with f
    {
        ConditionCheck c{"A1: f(0)=0 and f in C^1", true, {}, {}};
        const double f0 = spec.f(0.0);
        if (std::abs(f0) > 1e-12 * std::max(1.0, beta)) {
            c.passed = false;
            c.violations.push_back(0.0);
        }
        for (double s : rep.grid)
            if (!std::isfinite(spec.f(s)) || !std::isfinite(spec.df(s))) {
                c.passed = false;
                c.violations.push_back(s);
            }
        const double dev = derivative_deviation(spec);
        if (!(dev <= 1e-6))
            c.passed = false;
        c.detail = "f(0)=" + num(f0) + ", max relative |f' - central difference| on [0,10beta] = " + num(dev);
        rep.checks.push_back(std::move(c));
    }

    // (A2) finite asymptotic slope, estimated from f' far out
    {
        ConditionCheck c{"A2: finite f_inf", true, {}, {}};
        const double d2 = spec.df(1e2 * beta), d3 = spec.df(1e3 * beta), d4 = spec.df(1e4 * beta);
        const double lo = std::min({d2, d3, d4}), hi = std::max({d2, d3, d4});
        const bool agree = std::isfinite(lo) && std::isfinite(hi) &&
                           (hi - lo) <= 0.01 * std::max(std::abs(lo), std::abs(hi));
        const bool matches = std::abs(d4 - spec.f_inf) <= 0.01 * std::max(1.0, std::abs(spec.f_inf));
        c.passed = agree && matches;
        c.detail = "f' at 1e2,1e3,1e4 beta = " + num(d2) + ", " + num(d3) + ", " + num(d4) +
                   "; declared f_inf = " + num(spec.f_inf) +
                   " (a limit cannot be verified numerically; slopes must agree within 1%)";
        rep.checks.push_back(std::move(c));
    }

    // (A3) fixed point and sign pattern around it
    {
        ConditionCheck c{"A3: f(beta)=beta", true, {}, {}};
        const double fb = spec.f(beta);
        c.passed = std::abs(fb - beta) <= 1e-10 * std::max(1.0, beta);
        c.detail = "f(beta) - beta = " + num(fb - beta);
        rep.checks.push_back(std::move(c));
    }
    {
        ConditionCheck c{"A3: f(s)<s on (0,beta), f(s)>s on (beta,horizon)", true, {}, {}};
        for (double s : rep.grid) {
            const double d = spec.f(s) - s;
            if ((s < beta && !(d < 0.0)) || (s > beta && !(d > 0.0))) {
                c.passed = false;
                c.violations.push_back(s);
            }
        }
        c.detail = std::to_string(c.violations.size()) + " violations on " + std::to_string(rep.grid.size()) +
                   " points up to " + num(plan.horizon * beta);
        rep.checks.push_back(std::move(c));
    }

    // (A4) [f(s+beta) - (s+beta)] s > 0 on (-beta,0) and (0,horizon)
    {
        ConditionCheck c{"A4: [f(s+beta)-(s+beta)]s > 0", true, {}, {}};
        for (double t : rep.grid) {
            const double s = t - beta;
            if (s == 0.0)
                continue;
            if (!((spec.f(t) - t) * s > 0.0)) {
                c.passed = false;
                c.violations.push_back(s);
            }
        }
        c.detail = std::to_string(c.violations.size()) + " violations";
        rep.checks.push_back(std::move(c));
    }

    // f'(beta) > lambda_k
    {
        rep.slope_at_beta = spec.df(beta);
        RadialProblem unit_ball = prob;
        unit_ball.r_end = 1.0;
        rep.lambda_k = lambda_radial(k, unit_ball, tol);
        ConditionCheck c{"f'(beta) > lambda_" + std::to_string(k), rep.slope_at_beta > rep.lambda_k, {}, {}};
        c.detail = "f'(beta) = " + num(rep.slope_at_beta) + (c.passed ? " > " : " <= ") + "lambda_" +
                   std::to_string(k) + " = " + num(rep.lambda_k);
        rep.checks.push_back(std::move(c));
    }
    return rep;
}

XiReport xi_smallness(const HTransform& ht, double delta, double tol, int max_levels)
{
    if (!(delta > 0.0) || !(tol > 0.0))
        throw Error(ErrorKind::Precondition, "xi_smallness needs delta > 0 and tol > 0");
    XiReport rep;
    double v = delta;
    for (int level = 0; level < max_levels; ++level, v *= 0.5) {
        const double r = std::max(std::abs(ht.xi(v) / v), std::abs(ht.xi(-v) / v));
        rep.v.push_back(v);
        rep.ratio.push_back(r);
        if (level > 0 && r > rep.ratio[rep.ratio.size() - 2]) {
            rep.passed = false;
            rep.detail = "|xi(v)/v| increased from " + num(rep.ratio[rep.ratio.size() - 2]) + " to " + num(r) +
                         " at v=" + num(v);
            return rep;
        }
        if (r < tol) {
            rep.detail = "|xi(v)/v| = " + num(r) + " < " + num(tol) + " at v=" + num(v) + " after " +
                         std::to_string(level) + " halvings";
            return rep;
        }
    }
    rep.passed = false;
    rep.detail = "|xi(v)/v| still " + num(rep.ratio.back()) + " after " + std::to_string(max_levels) + " levels";
    return rep;
}

}  // namespace radneumann
