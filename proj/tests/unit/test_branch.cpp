#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "radneumann/branch.hpp"
#include "radneumann/errors.hpp"

using namespace radneumann;

namespace {

ErrorKind kind_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Precondition;
}

// f(s) = beta + m (s - beta): h(v) = m v for v >= -beta
NonlinearitySpec affine(double m)
{
    NonlinearitySpec s;
    s.f = [m](double x) { return 1.0 + m * (x - 1.0); };
    s.df = [m](double) { return m; };
    s.beta = 1.0;
    s.f_inf = m;
    s.label = "affine";
    return s;
}

const HTransform& standard()
{
    static const HTransform ht(make_rational_family(120.0, 1.0, 1.0));
    return ht;
}

const BranchCurve& curve(int k, int nu)
{
    static const BranchCurve c2p = trace_branch(2, 1, standard(), {2, 1.0});
    static const BranchCurve c2m = trace_branch(2, -1, standard(), {2, 1.0});
    static const BranchCurve c3p = trace_branch(3, 1, standard(), {2, 1.0});
    static const BranchCurve c3m = trace_branch(3, -1, standard(), {2, 1.0});
    if (k == 2)
        return nu > 0 ? c2p : c2m;
    return nu > 0 ? c3p : c3m;
}

}  // namespace

TEST_CASE("shooting residual of an affine problem is a Bessel function")
{
    // -v'' - v'/r + v = lambda m v  =>  v = zeta J0(w r), v'(1) = -zeta w J1(w), w^2 = lambda m - 1
    const HTransform ht(affine(30.0));
    for (double lambda : {0.2, 0.5, 0.9}) {
        const double zeta = 0.1;
        const double w = std::sqrt(lambda * 30.0 - 1.0);
        const double expect = -zeta * w * static_cast<double>(oracle::bessel_j(1, w));
        CHECK(shoot_residual(lambda, zeta, ht, {2, 1.0}).G == doctest::Approx(expect).epsilon(1e-9));
    }
    CHECK(shoot_residual(0.5, 0.0, ht, {2, 1.0}).G == 0.0);
}

TEST_CASE("bifurcation points")
{
    const double j11 = oracle::bessel_zero(1, 1), j12 = oracle::bessel_zero(1, 2);
    const NonlinearitySpec f = make_rational_family(120.0, 1.0, 1.0);
    CHECK(bifurcation_point(2, f, {2, 1.0}) == doctest::Approx((j11 * j11 + 1.0) / 61.0).epsilon(1e-10));
    CHECK(bifurcation_point(3, f, {2, 1.0}) == doctest::Approx((j12 * j12 + 1.0) / 61.0).epsilon(1e-10));

    try {
        bifurcation_point(2, make_rational_family(1.0, 1.0, 1.0), {2, 1.0});
        FAIL("expected NoBifurcation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoBifurcation);
        CHECK(e.is_validation());
        CHECK(std::string(e.what()).find("f'(beta) > lambda_k") != std::string::npos);
    }
    CHECK(kind_of([&] { bifurcation_point(1, f, {2, 1.0}); }) == ErrorKind::Precondition);
}

TEST_CASE("onset approaches the bifurcation point linearly in the amplitude")
{
    const HTransform& ht = standard();
    const double ls = bifurcation_point(2, ht.spec, {2, 1.0});
    std::vector<double> shift;
    for (double eps : {4e-3, 2e-3, 1e-3}) {
        const double a = onset_lambda(eps, ls, ht, {2, 1.0});
        const double b = onset_lambda(-eps, ls, ht, {2, 1.0});
        CHECK(std::abs(a - ls) < 10 * eps);
        shift.push_back(a - ls);
        // the two halves leave in opposite lambda-directions only through O(eps) terms
        CHECK(std::abs(a - b) < 10 * eps);
    }
    CHECK(shift[1] / shift[0] == doctest::Approx(0.5).epsilon(0.05));
    CHECK(shift[2] / shift[1] == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("all four half-branches reach lambda = 1")
{
    for (int k : {2, 3}) {
        for (int nu : {1, -1}) {
            const BranchCurve& c = curve(k, nu);
            CAPTURE(k);
            CAPTURE(nu);
            CHECK(c.terminated == Termination::ReachedTarget);
            REQUIRE(c.crossing.has_value());
            CHECK(c.points[c.crossing->first].lambda < 1.0);
            CHECK(c.points[c.crossing->second].lambda >= 1.0);
            for (const BranchPoint& p : c.points) {
                CHECK(p.nodal_count == k - 1);
                CHECK((p.zeta > 0) == (nu > 0));
                CHECK(p.min_v > -1.0);
                CHECK(p.residual == p.profile.nodes().back().du);
                CHECK(std::abs(p.residual) <= 1e-7 * std::max(1.0, std::abs(p.zeta)));
                CHECK(conservative_residual(p.profile, p.profile.rhs()) <= 1e-11);
            }
        }
    }
}

TEST_CASE("lambda = 1 solutions")
{
    const HTransform& ht = standard();
    const RadialProblem prob{2, 1.0};

    const RadialSolution a = solve_at_unit_lambda(curve(2, 1), ht, prob);
    CHECK(a.zeta == doctest::Approx(1.65343562183893).epsilon(1e-8));
    CHECK(a.sign_changes == 1);
    CHECK(a.monotone == Monotone::Decreasing);
    CHECK(a.positive);
    CHECK(a.u.nodes().front().u == doctest::Approx(1.0 + a.zeta));

    const RadialSolution b = solve_at_unit_lambda(curve(2, -1), ht, prob);
    CHECK(b.zeta == doctest::Approx(-0.997528148032745).epsilon(1e-8));
    CHECK(b.sign_changes == 1);
    CHECK(b.monotone == Monotone::Increasing);
    CHECK(b.min_u > 0.0);
    CHECK(b.min_u < 0.01);

    for (int nu : {1, -1}) {
        const RadialSolution c = solve_at_unit_lambda(curve(3, nu), ht, prob);
        CHECK(c.sign_changes == 2);
        CHECK(c.monotone == Monotone::None);
        CHECK(c.positive);
    }

    // the polished zeta is a root of the shooting residual
    for (const RadialSolution* s : {&a, &b})
        CHECK(std::abs(shoot_residual(1.0, s->zeta, ht, prob).G) < 1e-9);
}

TEST_CASE("flux sign pattern")
{
    const HTransform& ht = standard();
    const RadialProblem prob{2, 1.0};
    for (int nu : {1, -1}) {
        const RadialSolution s = solve_at_unit_lambda(curve(2, nu), ht, prob);
        const FluxReport r = monotone_flux_check(s, prob);
        CHECK(r.passed);
        CHECK(r.t1 > 0.0);
        CHECK(r.t1 < 1.0);
    }
    const RadialSolution s3 = solve_at_unit_lambda(curve(3, 1), ht, prob);
    CHECK(kind_of([&] { monotone_flux_check(s3, prob); }) == ErrorKind::Precondition);

    // flipping nu reverses the expected pattern
    RadialSolution flipped = solve_at_unit_lambda(curve(2, 1), ht, prob);
    flipped.nu = -1;
    CHECK_FALSE(monotone_flux_check(flipped, prob).passed);
}

TEST_CASE("a priori derivative bound")
{
    const HTransform& ht = standard();
    for (int k : {2, 3})
        for (int nu : {1, -1})
            for (const BranchPoint& p : curve(k, nu).points)
                CHECK(apriori_bound_check(p, ht).passed);

    // v = J0(j11 r) solves v'' + v'/r + j11^2 v = 0 with ||v'|| = j11 J1(j11 r*) < j11
    const double j11 = oracle::bessel_zero(1, 1);
    const Trajectory t = integrate_ivp({2, 1.0}, {[j11](double, double u) { return j11 * j11 * u; }, std::nullopt},
                                       1.0, {});
    const BoundReport r = apriori_bound_check(t, [j11](double s) { return j11 * j11 * s; });
    CHECK(r.passed);
    CHECK(r.L0 == doctest::Approx(j11 * j11));

    const BoundReport tight = apriori_bound_check(t, [](double s) { return 0.01 * s; });
    CHECK_FALSE(tight.passed);
}

TEST_CASE("zeta sweep at lambda = 1 finds the traced roots")
{
    const HTransform& ht = standard();
    const RadialProblem prob{2, 1.0};
    const auto roots = zeta_sweep_serial(1.0, ht, prob, -0.999, 10.0, 2000);
    auto has = [&](double z, int nodal) {
        int hits = 0;
        for (const SweepRoot& r : roots)
            if (std::abs(r.zeta - z) <= 1e-6 * std::max(1.0, std::abs(z)) && r.nodal_count == nodal)
                ++hits;
        return hits == 1;
    };
    CHECK(has(0.0, 0));
    CHECK(has(1.65343562183893, 1));
    CHECK(has(-0.997528148032745, 1));
    CHECK(has(solve_at_unit_lambda(curve(3, 1), ht, prob).zeta, 2));
    CHECK(has(solve_at_unit_lambda(curve(3, -1), ht, prob).zeta, 2));

    CHECK(kind_of([&] { zeta_sweep_serial(1.0, ht, prob, 1.0, 0.0, 10); }) == ErrorKind::Precondition);
    CHECK(kind_of([&] { zeta_sweep_serial(1.0, ht, prob, 0.0, 1.0, 0); }) == ErrorKind::Precondition);
}

TEST_CASE("continuation failure modes")
{
    const HTransform& ht = standard();
    const RadialProblem prob{2, 1.0};
    CHECK(kind_of([&] { trace_branch(2, 0, ht, prob); }) == ErrorKind::Precondition);

    ContinuationOptions starved;
    starved.max_corrector_iterations = 1;
    starved.min_step = 1e-3;
    CHECK(kind_of([&] { trace_branch(2, 1, ht, prob, starved); }) == ErrorKind::Stall);

    ContinuationOptions short_budget;
    short_budget.max_steps = 2;
    const BranchCurve c = trace_branch(2, 1, ht, prob, short_budget);
    CHECK(c.terminated == Termination::BudgetExhausted);
    CHECK_FALSE(c.crossing.has_value());
    CHECK(kind_of([&] { solve_at_unit_lambda(c, ht, prob); }) == ErrorKind::Precondition);

    const HTransform weak(make_rational_family(1.0, 1.0, 1.0));
    CHECK(kind_of([&] { trace_branch(2, 1, weak, prob); }) == ErrorKind::NoBifurcation);
}

TEST_CASE("three-dimensional branches")
{
    const HTransform& ht = standard();
    const RadialProblem prob{3, 1.0};
    for (int nu : {1, -1}) {
        const BranchCurve c = trace_branch(2, nu, ht, prob);
        REQUIRE(c.terminated == Termination::ReachedTarget);
        const RadialSolution s = solve_at_unit_lambda(c, ht, prob);
        CHECK(s.sign_changes == 1);
        CHECK(s.monotone == (nu > 0 ? Monotone::Decreasing : Monotone::Increasing));
        CHECK(monotone_flux_check(s, prob).passed);
    }
}

TEST_CASE("termination names")
{
    CHECK(to_string(Termination::ReachedTarget) == "reached lambda target");
    CHECK(to_string(Monotone::Decreasing) == "decreasing");
}
