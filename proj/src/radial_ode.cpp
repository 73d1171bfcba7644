#include "radneumann/radial_ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "dop853.hpp"
#include "radneumann/errors.hpp"

namespace radneumann {

void RadialProblem::validate() const
{
    if (dimension < 2)
        throw Error(ErrorKind::Precondition, "dimension must be >= 2");
    if (!(std::isfinite(r_end) && r_end > 0.0))
        throw Error(ErrorKind::Precondition, "r_end must be finite and positive");
}

double series_start_radius(const RadialProblem& prob, double F0, const Tolerances& tol)
{
    const double r_min = 1e-6 * prob.r_end;
    const double r_cap = 1e-3 * prob.r_end;
    // radius at which the quadratic term itself drops below abs_tol
    double r_flat = r_cap;
    if (F0 != 0.0)
        r_flat = std::min(r_cap, std::sqrt(2.0 * prob.dimension * tol.abs_tol / std::abs(F0)));
    return std::max(r_min, r_flat);
}

namespace {

constexpr int kMaxSteps = 200000;

double checked_F(const RadialRHS& rhs, double r, double u)
{
    const double f = rhs.F(r, u);
    if (!std::isfinite(f) && std::isfinite(u))
        throw Error(ErrorKind::EvaluationDomain,
                    "F not finite at r=" + std::to_string(r) + ", u=" + std::to_string(u));
    return f;
}

}  // namespace

Trajectory integrate_ivp(const RadialProblem& prob, const RadialRHS& rhs, double zeta,
                         const Tolerances& tol)
{
    prob.validate();
    tol.validate();
    if (!std::isfinite(zeta))
        throw Error(ErrorKind::Precondition, "initial value zeta must be finite");
    if (!rhs.F)
        throw Error(ErrorKind::Precondition, "right-hand side not set");

    const int N = prob.dimension;
    const double r_end = prob.r_end;

    Trajectory traj;
    traj.rhs_ = rhs;
    traj.tol_ = tol;
    traj.dimension_ = N;
    traj.zeta_ = zeta;

    const double F0 = checked_F(rhs, 0.0, zeta);
    const double c = -F0 / (2.0 * N);
    traj.series_c_ = c;

    // Shrink the series start until F is flat enough over it that the
    // neglected terms stay below abs_tol.
    double r0 = series_start_radius(prob, F0, tol);
    const double r_min = 1e-6 * r_end;
    while (r0 > r_min) {
        const double drift = checked_F(rhs, r0, zeta + c * r0 * r0) - F0;
        if (std::abs(drift) * r0 * r0 / (2.0 * N) <= tol.abs_tol)
            break;
        r0 = std::max(r_min, 0.5 * r0);
    }
    r0 = std::min(r0, r_end);
    traj.r_series_ = r0;

    traj.nodes_.push_back({0.0, zeta, 0.0});
    detail::Vec2 y{zeta + c * r0 * r0, 2.0 * c * r0};
    traj.nodes_.push_back({r0, y[0], y[1]});
    if (r0 >= r_end)
        return traj;

    auto f = [&](double x, const detail::Vec2& s) -> detail::Vec2 {
        if (!std::isfinite(s[0]) || !std::isfinite(s[1]))
            return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
        return {s[1], -(N - 1) / x * s[1] - checked_F(rhs, x, s[0])};
    };

    const double atol = tol.abs_tol, rtol = tol.rel_tol;
    double x = r0;
    detail::Vec2 f0 = f(x, y);
    const double hmax = r_end - r0;

    // initial step guess (Hairer's HINIT)
    double h;
    {
        double dnf = 0.0, dny = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double sk = atol + rtol * std::abs(y[i]);
            dnf += (f0[i] / sk) * (f0[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, hmax);
        detail::Vec2 y1{y[0] + h * f0[0], y[1] + h * f0[1]};
        const detail::Vec2 f1 = f(x + h, y1);
        double der2 = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double sk = atol + rtol * std::abs(y[i]);
            der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
        }
        der2 = std::sqrt(der2) / h;
        const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
        const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 1.0 / 8.0);
        h = std::min({100.0 * h, h1, hmax});
        if (!std::isfinite(h) || h <= 0.0)
            h = 1e-6 * hmax;
    }

    bool rejected_last = false;
    int steps = 0;
    while (x < r_end) {
        if (++steps > kMaxSteps)
            throw Error(ErrorKind::NonFinite, "step budget exhausted at r=" + std::to_string(x));
        if (0.1 * h <= x * std::numeric_limits<double>::epsilon())
            throw Error(ErrorKind::NonFinite, "step size underflow at r=" + std::to_string(x) +
                                                  " (solution blow-up?)");
        bool last = false;
        if (x + 1.01 * h >= r_end) {
            h = r_end - x;
            last = true;
        }
        const detail::Dop853Step st = detail::dop853_trial(f, x, y, f0, h, atol, rtol);
        if (std::isnan(st.err)) {
            h *= 0.333;
            rejected_last = true;
            continue;
        }
        const double fac11 = std::pow(st.err, 0.125);
        if (st.err <= 1.0) {
            const double fac = std::clamp(fac11 / 0.9, 1.0 / 6.0, 1.0 / 0.333);
            const double x_new = last ? r_end : x + h;
            traj.segments_.push_back({x, x_new - x, st.cont[0], st.cont[1]});
            traj.nodes_.push_back({x_new, st.y_new[0], st.y_new[1]});
            x = x_new;
            y = st.y_new;
            f0 = st.f_new;
            double h_new = std::min(h / fac, hmax);
            if (rejected_last)
                h_new = std::min(h_new, h);
            rejected_last = false;
            h = h_new;
        } else {
            h /= std::min(1.0 / 0.333, fac11 / 0.9);
            rejected_last = true;
        }
    }
    return traj;
}

namespace {

struct Bracketed {
    double a;
    double b;
};

template <class Fn>
double refine_root(const Fn& fn, double a, double b, double fa, double fb, double width)
{
    if (fa == 0.0)
        return a;
    if (fb == 0.0)
        return b;
    std::uintmax_t max_iter = 200;
    auto tol = [width](double lo, double hi) { return std::abs(hi - lo) <= width; };
    auto res = boost::math::tools::toms748_solve(fn, a, b, fa, fb, tol, max_iter);
    return 0.5 * (res.first + res.second);
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

ZeroTable locate_zeros(const Trajectory& traj, const Tolerances& tol)
{
    tol.validate();
    ZeroTable zt;
    const auto& nodes = traj.nodes();
    if (nodes.size() < 2)
        return zt;
    const double scale = traj.sup_norm();
    if (scale == 0.0)
        return zt;  // u identically zero: every point is a zero, none is simple

    const double r_end = traj.r_end();
    const double window = kBoundaryWindow * r_end;
    constexpr int kSub = 4;

    auto u_of = [&](double r) { return traj.u(r); };
    auto du_of = [&](double r) { return traj.du(r); };

    auto record_u = [&](double r) {
        const double slope = traj.du(r);
        if (std::abs(slope) < tol.simplicity_floor * scale)
            throw Error(ErrorKind::DegenerateZero,
                        "zero of u at r=" + std::to_string(r) + " has slope " + std::to_string(slope) +
                            " below the simplicity floor");
        if (r >= r_end - window)
            zt.u_boundary.push_back({r_end, slope});
        else
            zt.u_zeros.push_back({r, slope});
    };
    auto record_du = [&](double r) {
        const double curv = traj.second_derivative(r);
        if (r >= r_end - window)
            zt.du_boundary.push_back({r_end, curv});
        else if (r > window)
            zt.du_zeros.push_back({r, curv});
    };

    zt.du_boundary.push_back({0.0, traj.second_derivative(0.0)});

    struct Tracker {
        int sign = 0;
        double r = 0.0;
        double v = 0.0;
    } tu, tdu;

    auto visit = [&](double r, double u, double du) {
        const int su = sign_of(u);
        if (su != 0) {
            if (tu.sign != 0 && su != tu.sign)
                record_u(refine_root(u_of, tu.r, r, tu.v, u, tol.zero_refine_tol));
            tu = {su, r, u};
        }
        const int sd = sign_of(du);
        if (sd != 0 && r > 0.0) {
            if (tdu.sign != 0 && sd != tdu.sign)
                record_du(refine_root(du_of, tdu.r, r, tdu.v, du, tol.zero_refine_tol));
            tdu = {sd, r, du};
        }
    };

    visit(nodes[0].r, nodes[0].u, nodes[0].du);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double ra = nodes[i - 1].r, rb = nodes[i].r;
        for (int j = 1; j < kSub; ++j) {
            const double r = ra + (rb - ra) * j / kSub;
            const State s = traj.eval(r);
            visit(r, s.u, s.du);
        }
        visit(rb, nodes[i].u, nodes[i].du);
    }

    // zeros sitting on r_end without a sign change inside the interval
    const Node& end = nodes.back();
    if (zt.u_boundary.empty() && std::abs(end.u) <= window * std::abs(end.du) &&
        std::abs(end.du) >= tol.simplicity_floor * scale)
        zt.u_boundary.push_back({r_end, end.du});
    if (zt.du_boundary.size() == 1) {
        const double curv = traj.second_derivative(r_end);
        // u' == 0 together with u'' == 0 (a constant) is not an isolated zero
        if (curv != 0.0 && std::abs(end.du) <= window * std::abs(curv))
            zt.du_boundary.push_back({r_end, curv});
    }
    return zt;
}

InterlacingReport check_interlacing(const ZeroTable& zt)
{
    struct Event {
        double r;
        bool is_u;
    };
    std::vector<Event> ev;
    for (const auto& z : zt.u_zeros)
        ev.push_back({z.r, true});
    for (const auto& z : zt.u_boundary)
        ev.push_back({z.r, true});
    for (const auto& z : zt.du_zeros)
        ev.push_back({z.r, false});
    for (const auto& z : zt.du_boundary)
        ev.push_back({z.r, false});
    std::stable_sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.r < b.r; });

    InterlacingReport rep;
    for (std::size_t i = 1; i < ev.size(); ++i) {
        if (ev[i].is_u == ev[i - 1].is_u) {
            rep.passed = false;
            rep.violation = std::make_pair(ev[i - 1].r, ev[i].r);
            rep.detail = std::string("consecutive ") + (ev[i].is_u ? "zeros of u" : "zeros of u'") +
                         " at " + std::to_string(ev[i - 1].r) + " and " + std::to_string(ev[i].r) +
                         " enclose no zero of " + (ev[i].is_u ? "u'" : "u");
            return rep;
        }
    }
    rep.detail = "zeros of u and u' alternate (" + std::to_string(ev.size()) + " events)";
    return rep;
}

double conservative_residual(const Trajectory& traj, const RadialRHS& rhs)
{
    const auto& nodes = traj.nodes();
    const int N = traj.dimension();
    auto integrand = [&](double t) { return std::pow(t, N - 1) * rhs.F(t, traj.u(t)); };
    using Gauss = boost::math::quadrature::gauss<double, 10>;

    const double r_end = traj.r_end();
    const double scale = std::max(1.0, traj.sup_norm()) * std::max(1.0, std::pow(r_end, N - 1));
    double integral = 0.0;
    double worst = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        integral += Gauss::integrate(integrand, nodes[i - 1].r, nodes[i].r);
        const double r = nodes[i].r;
        const double defect = std::pow(r, N - 1) * nodes[i].du + integral;
        worst = std::max(worst, std::abs(defect));
    }
    return worst / scale;
}

}  // namespace radneumann
