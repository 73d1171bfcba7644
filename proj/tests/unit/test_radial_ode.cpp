#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "radneumann/errors.hpp"
#include "radneumann/radial_ode.hpp"

using namespace radneumann;
using std::numbers::pi;

namespace {

RadialRHS linear(double mu)
{
    return {[mu](double, double u) { return mu * u; }, mu};
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

}  // namespace

TEST_CASE("constant solution when F vanishes")
{
    const Trajectory t = integrate_ivp({3, 1.0}, {[](double, double) { return 0.0; }, 0.0}, 1.0, {});
    for (const Node& n : t.nodes()) {
        CHECK(n.u == 1.0);
        CHECK(n.du == 0.0);
    }
    CHECK(t.u(0.37) == 1.0);
}

TEST_CASE("sinc solution in three dimensions")
{
    const Tolerances tol;
    const Trajectory t = integrate_ivp({3, 1.0}, linear(pi * pi), 1.0, tol);
    const Node& end = t.nodes().back();
    CHECK(end.r == 1.0);
    CHECK(std::abs(end.u) < 1e-10);
    CHECK(std::abs(end.du + 1.0) < 1e-10);

    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double r = i / 400.0;
        worst = std::max(worst, std::abs(t.u(r) - sinc(pi * r)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("order-zero Bessel function in two dimensions")
{
    const Trajectory t = integrate_ivp({2, 1.0}, linear(1.0), 1.0, {});
    const double j0 = static_cast<double>(oracle::bessel_j(0, 1.0L));
    CHECK(t.nodes().back().u == doctest::Approx(j0).epsilon(1e-10));
    CHECK(j0 == doctest::Approx(0.7651976866).epsilon(1e-10));
}

TEST_CASE("trajectory structure")
{
    const Trajectory t = integrate_ivp({4, 2.0}, linear(30.0), 0.5, {});
    const auto& nodes = t.nodes();
    REQUIRE(nodes.size() > 2);
    CHECK(nodes.front().r == 0.0);
    CHECK(nodes.front().du == 0.0);
    CHECK(nodes.front().u == 0.5);
    for (std::size_t i = 1; i < nodes.size(); ++i)
        CHECK(nodes[i].r > nodes[i - 1].r);
    for (const Node& n : nodes) {
        const State s = t.eval(n.r);
        CHECK(s.u == n.u);
        CHECK(s.du == n.du);
    }
    CHECK(t.r_end() == 2.0);
    CHECK(t.series_radius() >= 1e-6 * 2.0);
    CHECK_THROWS_AS(t.eval(2.5), Error);
}

TEST_CASE("series start radius keeps the quadratic term below abs_tol")
{
    const RadialProblem prob{3, 1.0};
    Tolerances tol;
    for (double F0 : {1e-3, 1.0, 1e3, 1e8}) {
        const double r0 = series_start_radius(prob, F0, tol);
        CHECK(r0 >= 1e-6);
        CHECK(r0 <= 1e-3);
        if (r0 > 1e-6)
            CHECK(std::abs(F0) * r0 * r0 / (2.0 * 3) <= tol.abs_tol * (1 + 1e-12));
    }
}

TEST_CASE("integration is deterministic")
{
    const Trajectory a = integrate_ivp({3, 1.0}, linear(57.0), 1.0, {});
    const Trajectory b = integrate_ivp({3, 1.0}, linear(57.0), 1.0, {});
    REQUIRE(a.nodes().size() == b.nodes().size());
    for (std::size_t i = 0; i < a.nodes().size(); ++i) {
        CHECK(a.nodes()[i].r == b.nodes()[i].r);
        CHECK(a.nodes()[i].u == b.nodes()[i].u);
        CHECK(a.nodes()[i].du == b.nodes()[i].du);
    }
}

TEST_CASE("error at r=1 falls with the step count at high order")
{
    // least-squares slope of log(error) against log(step count)
    std::vector<double> xs, ys;
    for (double t = 1e-6; t >= 1e-12; t /= 2.0) {
        const Trajectory tr = integrate_ivp({3, 1.0}, linear(pi * pi), 1.0, Tolerances::with_tol(t));
        const double err = std::abs(tr.nodes().back().du + 1.0) + std::abs(tr.nodes().back().u);
        xs.push_back(std::log(static_cast<double>(tr.step_count())));
        ys.push_back(std::log(err));
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope <= -7.0);
}

TEST_CASE("blow-up and evaluation failures")
{
    // u'' = u^3 from u(0) = 10 blows up near r = 0.14
    const RadialRHS cubic{[](double, double u) { return -u * u * u; }, std::nullopt};
    CHECK_THROWS_WITH_AS(integrate_ivp({2, 1.0}, cubic, 10.0, {}), doctest::Contains("NonFinite"), Error);

    const RadialRHS partial{[](double, double u) { return u < 0.5 ? NAN : pi * pi * u; }, std::nullopt};
    try {
        integrate_ivp({3, 1.0}, partial, 1.0, {});
        FAIL("expected EvaluationDomain");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EvaluationDomain);
    }

    CHECK_THROWS_AS(integrate_ivp({1, 1.0}, linear(1.0), 1.0, {}), Error);
    CHECK_THROWS_AS(integrate_ivp({2, -1.0}, linear(1.0), 1.0, {}), Error);
    CHECK_THROWS_AS(integrate_ivp({2, 1.0}, linear(1.0), INFINITY, {}), Error);
}

TEST_CASE("zeros of a constant are empty")
{
    const Trajectory t = integrate_ivp({3, 1.0}, {[](double, double) { return 0.0; }, 0.0}, 1.0, {});
    const ZeroTable zt = locate_zeros(t, {});
    CHECK(zt.u_zeros.empty());
    CHECK(zt.du_zeros.empty());
    CHECK(zt.u_boundary.empty());
    REQUIRE(zt.du_boundary.size() == 1);
    CHECK(zt.du_boundary[0].r == 0.0);
    CHECK(check_interlacing(zt).passed);
}

TEST_CASE("sinc(2 pi r) zeros: interior at 1/2, boundary at 1")
{
    const Tolerances tol;
    const Trajectory t = integrate_ivp({3, 1.0}, linear(4 * pi * pi), 1.0, tol);
    const ZeroTable zt = locate_zeros(t, tol);
    REQUIRE(zt.u_zeros.size() == 1);
    CHECK(zt.u_zeros[0].r == doctest::Approx(0.5).epsilon(1e-11));
    CHECK(zt.u_zeros[0].slope < 0.0);
    REQUIRE(zt.u_boundary.size() == 1);
    CHECK(zt.u_boundary[0].r == 1.0);
    CHECK(zt.interior_count() == 1);
    CHECK(zt.closed_count() == 2);

    // u' vanishes where tan(2 pi r) = 2 pi r
    REQUIRE(zt.du_zeros.size() == 1);
    CHECK(zt.du_zeros[0].r == doctest::Approx(oracle::tan_root(1) / (2 * pi)).epsilon(1e-11));
    CHECK(zt.du_zeros[0].curvature > 0.0);
    REQUIRE(!zt.du_boundary.empty());
    CHECK(zt.du_boundary.front().r == 0.0);
}

TEST_CASE("Bessel zero ratio in two dimensions")
{
    const double j01 = oracle::bessel_zero(0, 1);
    const double j02 = oracle::bessel_zero(0, 2);
    const Trajectory t = integrate_ivp({2, 1.0}, linear(j02 * j02), 1.0, {});
    const ZeroTable zt = locate_zeros(t, {});
    REQUIRE(zt.u_zeros.size() == 1);
    CHECK(zt.u_zeros[0].r == doctest::Approx(j01 / j02).epsilon(1e-10));
    CHECK(j01 / j02 == doctest::Approx(0.43565).epsilon(1e-4));
}

TEST_CASE("non-simple zero is rejected")
{
    // u*(r) = (r^2 - 1/4)^3 has a triple zero at r = 1/2
    const int N = 2;
    const RadialRHS rhs{[](double r, double) {
                            const double q = r * r - 0.25;
                            // u*' / r = 6 q^2 stays finite at the origin
                            const double d2 = 6.0 * q * q + 24.0 * r * r * q;
                            return -d2 - (N - 1) * 6.0 * q * q;
                        },
                        std::nullopt};
    const Trajectory t = integrate_ivp({N, 1.0}, rhs, -1.0 / 64.0, {});
    try {
        locate_zeros(t, {});
        FAIL("expected DegenerateZero");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateZero);
    }
}

TEST_CASE("interlacing")
{
    CHECK(check_interlacing(ZeroTable{}).passed);

    const Trajectory t = integrate_ivp({3, 1.0}, linear(4 * pi * pi), 1.0, {});
    CHECK(check_interlacing(locate_zeros(t, {})).passed);

    ZeroTable bad;
    bad.u_zeros = {{0.3, -1.0}, {0.5, 1.0}};
    bad.du_boundary = {{0.0, -1.0}};
    const InterlacingReport r = check_interlacing(bad);
    CHECK_FALSE(r.passed);
    REQUIRE(r.violation.has_value());
    CHECK(r.violation->first == 0.3);
    CHECK(r.violation->second == 0.5);
}

TEST_CASE("conservative residual")
{
    const Tolerances tol;
    const RadialRHS zero{[](double, double) { return 0.0; }, 0.0};
    const Trajectory flat = integrate_ivp({3, 1.0}, zero, 1.0, tol);
    CHECK(conservative_residual(flat, zero) == 0.0);

    const Trajectory s = integrate_ivp({3, 1.0}, linear(pi * pi), 1.0, tol);
    CHECK(conservative_residual(s, linear(pi * pi)) <= 10 * tol.abs_tol);

    // manufactured u*(r) = 1 + r^2: -u'' - (N-1)/r u' = -2N
    for (int N : {2, 3, 5}) {
        const RadialRHS rhs{[N](double, double) { return -2.0 * N; }, 0.0};
        const Trajectory m = integrate_ivp({N, 1.0}, rhs, 1.0, tol);
        CHECK(m.nodes().back().u == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(conservative_residual(m, rhs) <= 10 * tol.abs_tol);
    }
}

TEST_CASE("random eigen-equation trajectories: simple zeros, interlacing, conservative form")
{
    std::mt19937_64 rng(20261015);
    std::uniform_real_distribution<double> expo(0.0, 3.5);
    std::uniform_int_distribution<int> dims(2, 7);
    std::uniform_real_distribution<double> amp(0.2, 5.0);
    const Tolerances tol;
    for (int i = 0; i < 25; ++i) {
        const double mu = std::pow(10.0, expo(rng));
        const int N = dims(rng);
        const double zeta = amp(rng);
        CAPTURE(mu);
        CAPTURE(N);
        const Trajectory t = integrate_ivp({N, 1.0}, linear(mu), zeta, tol);
        const ZeroTable zt = locate_zeros(t, tol);
        for (const UZero& z : zt.u_zeros)
            CHECK(std::abs(z.slope) > tol.simplicity_floor * t.sup_norm());
        CHECK(check_interlacing(zt).passed);
        CHECK(conservative_residual(t, linear(mu)) <= 10 * tol.abs_tol);
    }
}

TEST_CASE("csv export")
{
    const Trajectory t = integrate_ivp({3, 1.0}, linear(10.0), 1.0, {});
    std::ostringstream os;
    t.write_csv(os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "r,u,du");
    std::size_t rows = 0;
    while (std::getline(is, line))
        ++rows;
    CHECK(rows == t.nodes().size());
}
