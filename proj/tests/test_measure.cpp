#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sep/measure.hpp"
#include "sep/rng.hpp"

using namespace sep;

namespace {

TargetMeasure uniform11() {
    return TargetMeasure::from_parts({}, {DensityPiece::uniform(-1.0, 1.0, 1.0)});
}

TargetMeasure two_point() { return TargetMeasure::from_parts({{-1.0, 0.5}, {1.0, 0.5}}, {}); }

TargetMeasure pareto1() { return TargetMeasure::from_parts({}, {DensityPiece::pareto(1.0, 1.0)}); }

TargetMeasure three_atom_zero() {
    return TargetMeasure::from_parts({{-1.0, 0.25}, {0.0, 0.5}, {1.0, 0.25}}, {});
}

}  // namespace

TEST_CASE("uniform[-1,1] call curve matches the closed form") {
    auto m = uniform11();
    CHECK(m.call(0.0) == doctest::Approx(0.25).epsilon(1e-14));
    for (double x : {-0.9, -0.5, 0.0, 0.3, 0.7, 1.0})
        CHECK(m.call(x) == doctest::Approx((x - 1.0) * (x - 1.0) / 4.0).epsilon(1e-13));
    for (double x : {-0.9, -0.5, 0.0, 0.3, 0.7})
        CHECK(m.put(x) == doctest::Approx((x + 1.0) * (x + 1.0) / 4.0).epsilon(1e-13));
    CHECK(m.call(-2.0) == doctest::Approx(2.0));
    CHECK(m.call(1.5) == doctest::Approx(0.0));
    CHECK(m.support_lo() == -1.0);
    CHECK(m.support_hi() == 1.0);
}

TEST_CASE("pareto family: C(k) = 1/(2+k) and infinite variance") {
    auto m = pareto1();
    CHECK(m.call(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    for (double k : {-1.0, -0.5, 0.0, 1.0, 5.0})
        CHECK(m.call(k) == doctest::Approx(1.0 / (2.0 + k)).epsilon(1e-13));
    // P(k) = k + 1/(2+k) on the support
    CHECK(m.put(1.0) == doctest::Approx(1.0 + 1.0 / 3.0).epsilon(1e-13));
    CHECK(m.put(-1.0) == doctest::Approx(0.0));
    CHECK(std::isinf(m.variance()));
    CHECK(std::isinf(m.support_hi()));
    CHECK(m.mean() == doctest::Approx(0.0));
}

TEST_CASE("two-point measure: U(0) = 1") {
    auto m = two_point();
    CHECK(m.potential(0.0) == doctest::Approx(1.0));
    CHECK(m.call(0.0) == doctest::Approx(0.5));
    CHECK(m.variance() == doctest::Approx(1.0));
}

TEST_CASE("validation rejects the spec'd degenerate inputs") {
    CHECK_THROWS_AS(TargetMeasure::from_parts({{0.0, 1.0}}, {}), DegenerateDelta0Error);
    CHECK_THROWS_AS(TargetMeasure::from_parts({{-1.0, 0.5}, {1.0, 0.4}}, {}), MassNotOneError);
    CHECK_THROWS_AS(TargetMeasure::from_parts({{-1.0, 0.4}, {1.0, 0.6}}, {}), NonCentredError);
    CHECK_THROWS_AS(TargetMeasure::from_parts({{-1.0, -0.5}, {1.0, 1.5}}, {}), ValidationError);
}

TEST_CASE("centred put-call parity holds everywhere") {
    auto ms = {uniform11(), two_point(), pareto1(), three_atom_zero()};
    for (const auto& m : ms)
        for (double x = -3.0; x <= 3.0; x += 0.1)
            CHECK(m.call(x) - m.put(x) + x == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("potential is convex, dominates |x|, and hugs |x| outside the support") {
    Rng rng(5, 1);
    auto ms = {uniform11(), two_point(), three_atom_zero(), pareto1()};
    for (const auto& m : ms) {
        for (int i = 0; i < 300; ++i) {
            const double a = -2.5 + 5.0 * rng.uniform();
            const double b = -2.5 + 5.0 * rng.uniform();
            const double mid = 0.5 * (a + b);
            CHECK(m.potential(mid) <= 0.5 * (m.potential(a) + m.potential(b)) + 1e-12);
            CHECK(m.potential(a) >= std::abs(a) - 1e-12);
        }
    }
    CHECK(uniform11().potential(-5.0) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(uniform11().potential(7.0) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("call against the brute-force definition on a mixed measure") {
    // atoms plus a uniform chunk plus a piecewise-linear-cdf chunk
    auto m = TargetMeasure::from_parts_uncentred(
        {{-2.0, 0.2}, {0.5, 0.3}},
        {DensityPiece::uniform(-1.0, 0.0, 0.3),
         DensityPiece::piecewise_linear_cdf({{0.2, 0.0}, {0.8, 0.5}, {1.4, 1.0}}, 0.2)});
    auto density = [](double t) {
        double d = 0.0;
        if (t >= -1.0 && t <= 0.0) d += 0.3;
        if (t >= 0.2 && t <= 0.8) d += 0.2 * 0.5 / 0.6;
        if (t > 0.8 && t <= 1.4) d += 0.2 * 0.5 / 0.6;
        return d;
    };
    for (double x : {-2.5, -2.0, -1.2, -0.7, 0.0, 0.4, 0.5, 1.3, 4.0}) {
        const double direct =
            oracle::call_by_definition({{-2.0, 0.2}, {0.5, 0.3}}, density, -1.0, 1.4, x);
        // the oracle's fixed-grid Simpson carries O(h) error at density jumps
        CHECK(std::abs(m.call(x) - direct) < 1e-4);
    }
}

TEST_CASE("one-sided derivatives count atoms correctly") {
    auto m = three_atom_zero();
    CHECK(m.call_dminus(0.0) == doctest::Approx(-0.75));
    CHECK(m.call_dplus(0.0) == doctest::Approx(-0.25));
    CHECK(m.put_dminus(0.0) == doctest::Approx(0.25));
    CHECK(m.put_dplus(0.0) == doctest::Approx(0.75));
}

TEST_CASE("reflection is an involution and maps families correctly") {
    auto p = TargetMeasure::from_parts({{-2.0, 1.0 / 3.0}, {1.0, 2.0 / 3.0}}, {});
    auto r = p.reflected();
    CHECK(r.atom_at(2.0) == doctest::Approx(1.0 / 3.0));
    CHECK(r.atom_at(-1.0) == doctest::Approx(2.0 / 3.0));
    auto rr = r.reflected();
    CHECK(rr.atom_at(-2.0) == doctest::Approx(1.0 / 3.0));
    CHECK(rr.atom_at(1.0) == doctest::Approx(2.0 / 3.0));

    // symmetric measure reflects to itself
    auto u = uniform11();
    auto ur = u.reflected();
    for (double x = -2.0; x <= 2.0; x += 0.17)
        CHECK(u.call(x) == doctest::Approx(ur.call(x)).epsilon(1e-13));

    // pareto reflects to support (-inf, 1]
    auto pr = pareto1().reflected();
    CHECK(pr.support_hi() == doctest::Approx(1.0));
    CHECK(std::isinf(pr.support_lo()));
    // C of the reflection at x equals P of the original at -x
    for (double x : {-3.0, -1.0, 0.0, 0.5, 1.0})
        CHECK(pr.call(x) == doctest::Approx(pareto1().put(-x)).epsilon(1e-12));
}

TEST_CASE("star measure removes the zero atom and records its mass") {
    auto s = three_atom_zero().star();
    CHECK(s.removed_mass == doctest::Approx(0.5));
    CHECK(s.measure.atom_at(1.0) == doctest::Approx(0.5));
    CHECK(s.measure.atom_at(-1.0) == doctest::Approx(0.5));
    CHECK(s.measure.mass_at_zero() == 0.0);

    auto nountouched = uniform11().star();
    CHECK(nountouched.removed_mass == 0.0);

    CHECK_THROWS_AS(TargetMeasure::from_parts({{0.0, 1.0}}, {}), DegenerateDelta0Error);
}

TEST_CASE("convex order via potentials") {
    std::vector<double> grid;
    for (double x = -1.5; x <= 1.5; x += 0.01) grid.push_back(x);
    CHECK(convex_order_leq(uniform11(), two_point(), grid));
    CHECK_FALSE(convex_order_leq(two_point(), uniform11(), grid));
    CHECK(convex_order_leq(uniform11(), uniform11(), grid));
}

TEST_CASE("barycentre and reverse barycentre") {
    auto u = uniform11();
    for (double x = -1.0; x < 1.0; x += 0.05)
        CHECK(u.barycentre(x) == doctest::Approx((x + 1.0) / 2.0).epsilon(1e-12));
    CHECK(u.barycentre(1.7) == doctest::Approx(1.7));

    CHECK(u.reverse_barycentre(0.0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(u.reverse_barycentre(2.0) == doctest::Approx(0.0));
    CHECK(two_point().reverse_barycentre(0.0) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(two_point().reverse_barycentre(-1.5), NoMassBelowError);

    // direct conditional-expectation oracle on the uniform density
    const double num = oracle::integrate([](double t) { return t * 0.5; }, -1.0, 0.3);
    const double den = oracle::integrate([](double) { return 0.5; }, -1.0, 0.3);
    CHECK(u.reverse_barycentre(0.3) == doctest::Approx(num / den).epsilon(1e-9));
}

TEST_CASE("breeden-litzenberger ingestion: two quotes give the two-point law") {
    const double x0 = 1.0;
    auto m = TargetMeasure::from_call_prices({{0.0, x0}, {2.0 * x0, 0.0}}, x0);
    CHECK(m.atom_at(-x0) == doctest::Approx(0.5));
    CHECK(m.atom_at(x0) == doctest::Approx(0.5));
    CHECK(m.mean() == doctest::Approx(0.0));

    // oracle: the call curve of the recovered measure reproduces the quotes
    for (double k : {0.0, 0.5, 1.0, 1.7, 2.0}) {
        const double expect = k <= 0.0 ? x0 - k : (k >= 2.0 ? 0.0 : x0 - k / 2.0 * 1.0);
        CHECK(m.call(k - x0) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("breeden-litzenberger ingestion: dense quotes recover U[-1,1]") {
    // price law U[0,2]: C_price(k) = (k-2)^2/4 on [0,2]
    std::vector<std::pair<double, double>> quotes;
    const int n = 512;
    for (int i = 0; i <= n; ++i) {
        const double k = 2.0 * i / n;
        quotes.emplace_back(k, (k - 2.0) * (k - 2.0) / 4.0);
    }
    auto m = TargetMeasure::from_call_prices(quotes, 1.0);
    auto u = uniform11();
    auto cdf_m = [&](double x) { return m.cdf(x); };
    auto cdf_u = [&](double x) { return u.cdf(x); };
    CHECK(oracle::wasserstein1(cdf_m, cdf_u, -1.5, 1.5, 60001) < 1e-3);
}

TEST_CASE("breeden-litzenberger ingestion: quote pathologies are rejected") {
    CHECK_THROWS_AS(TargetMeasure::from_call_prices({{0.0, 1.0}, {1.0, 0.8}, {2.0, 0.0}}, 1.0),
                    ArbitrageViolationError);  // convexity violated
    CHECK_THROWS_AS(TargetMeasure::from_call_prices({{0.0, 1.0}, {1.0, 1.2}}, 1.0),
                    ArbitrageViolationError);  // increasing price
    CHECK_THROWS_AS(TargetMeasure::from_call_prices({{0.0, 0.7}, {2.0, 0.0}}, 1.0),
                    NonCentredError);  // strike-zero price inconsistent with spot
    CHECK_THROWS_AS(TargetMeasure::from_call_prices({{1.0, 1.0}, {0.5, 0.2}}, 1.0),
                    ValidationError);  // strikes not increasing
}

TEST_CASE("exact kink recovery: discrete law round-trips through its call curve") {
    auto m = TargetMeasure::from_parts({{-1.0, 0.3}, {0.0, 0.2}, {0.6, 0.5}}, {});
    // quote the price-space call curve at every kink strike (spot 2)
    const double x0 = 2.0;
    std::vector<std::pair<double, double>> quotes;
    for (double k : {0.0, 1.0, 2.0, 2.6}) quotes.emplace_back(k, m.call(k - x0));
    auto back = TargetMeasure::from_call_prices(quotes, x0);
    auto atom_near = [&](double x) {
        for (const auto& a : back.atoms())
            if (std::abs(a.x - x) < 1e-12) return a.p;
        return 0.0;
    };
    CHECK(atom_near(-1.0) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(atom_near(0.0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(atom_near(0.6) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("translation and scaling keep closed forms consistent") {
    auto m = uniform11().translated(1.0);  // U[0,2]
    CHECK(m.mean() == doctest::Approx(1.0));
    CHECK(m.call(1.0) == doctest::Approx(0.25).epsilon(1e-13));

    auto p = pareto1().translated(0.5);
    CHECK(p.support_lo() == doctest::Approx(-0.5));
    CHECK(p.call(0.5) == doctest::Approx(0.5).epsilon(1e-13));

    auto s = pareto1().scaled(2.0);
    CHECK(s.support_lo() == doctest::Approx(-2.0));
    // scaling: C_{2X}(2k) = 2 C_X(k)
    for (double k : {-1.0, 0.0, 1.0, 3.0})
        CHECK(s.call(2.0 * k) == doctest::Approx(2.0 * pareto1().call(k)).epsilon(1e-12));
}

TEST_CASE("piecewise-linear-cdf pieces behave like mixtures of uniforms") {
    // mass 2/3 uniform on [-1,0] and mass 1/3 on [0,2]: centred
    auto pl = TargetMeasure::from_parts(
        {},
        {DensityPiece::piecewise_linear_cdf({{-1.0, 0.0}, {0.0, 2.0 / 3.0}, {2.0, 1.0}}, 1.0)});
    CHECK(pl.mean() == doctest::Approx(0.0));
    auto density = [](double t) {
        if (t >= -1.0 && t <= 0.0) return 2.0 / 3.0;
        if (t > 0.0 && t <= 2.0) return 1.0 / 6.0;
        return 0.0;
    };
    for (double x : {-1.2, -0.4, 0.0, 0.9, 1.7, 2.3}) {
        const double direct = oracle::call_by_definition({}, density, -1.0, 2.0, x);
        CHECK(std::abs(pl.call(x) - direct) < 1e-4);
    }
    CHECK(pl.tail_ge(0.5) == doctest::Approx(0.25).epsilon(1e-12));
}
