#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sep/boundary.hpp"
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

double pareto_alpha_plus(double s) {
    return (-2.0 * s * s - 5.0 * s + std::sqrt(s * s * s * s + 6.0 * s * s * s + 12.0 * s * s +
                                               8.0 * s)) /
           (2.0 * s - 1.0 + s * s);
}

double pareto_alpha_minus(double i) {
    const double i2 = i * i, i3 = i2 * i, i4 = i2 * i2;
    return (-3.0 * i - 2.0 * i2 + std::sqrt(-(i4 + 6.0 * i3 + 12.0 * i2 + 8.0 * i))) /
           (2.0 * i + 1.0 + i2);
}

}  // namespace

TEST_CASE("AY boundary for U[-1,1]: beta(s) = 2s-1 and b(x) = (x+1)/2") {
    auto bd = ay_boundary(uniform11());
    for (int i = 0; i <= 1000; ++i) {
        const double s = i / 1000.0;
        CHECK(bd.beta(s) == doctest::Approx(2.0 * s - 1.0).epsilon(0).scale(1).epsilon(1e-9));
    }
    CHECK(bd.beta(1.4) == doctest::Approx(1.4));
    for (double x = -1.0; x <= 1.0; x += 0.05)
        CHECK(bd.barycentre(x) == doctest::Approx((x + 1.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("AY boundary for the pareto law: beta(s) = s/2 - 1") {
    auto bd = ay_boundary(pareto1());
    for (double s = 0.0; s <= 10.0; s += 0.05)
        CHECK(bd.beta(s) == doctest::Approx(s / 2.0 - 1.0).epsilon(1e-8));
}

TEST_CASE("AY boundary for the two-point law: flat then diagonal") {
    auto bd = ay_boundary(two_point());
    for (double s : {0.01, 0.3, 0.7, 0.99})
        CHECK(bd.beta(s) == doctest::Approx(-1.0));
    CHECK(bd.beta(1.0) == doctest::Approx(1.0));
    CHECK(bd.beta(2.5) == doctest::Approx(2.5));
    CHECK(bd.beta(0.0) == doctest::Approx(-1.0));  // infimum of the support
}

TEST_CASE("Perkins boundary for U[-1,1]: alpha+(s) = s - 2 sqrt(s)") {
    auto bd = perkins_boundary(uniform11());
    for (int i = 1; i <= 500; ++i) {
        const double s = i / 500.0;
        CHECK(bd.alpha_plus(s) ==
              doctest::Approx(s - 2.0 * std::sqrt(s)).epsilon(0).scale(1).epsilon(1e-8));
    }
    for (int i = 1; i <= 500; ++i) {
        const double w = -i / 500.0;
        CHECK(bd.alpha_minus(w) ==
              doctest::Approx(w + 2.0 * std::sqrt(-w)).epsilon(0).scale(1).epsilon(1e-8));
    }
}

TEST_CASE("Perkins boundary for the pareto law matches the radical formulas") {
    auto bd = perkins_boundary(pareto1());
    for (double s : {0.05, 0.1, 0.2, 0.3, 0.55, 0.8, 1.0, 1.5, 2.0, 3.0}) {
        CHECK(bd.alpha_plus(s) == doctest::Approx(pareto_alpha_plus(s)).epsilon(1e-6));
    }
    for (double i : {-0.9, -0.75, -0.5, -0.3, -0.1}) {
        CHECK(bd.alpha_minus(i) ==
              doctest::Approx(pareto_alpha_minus(i)).epsilon(1e-6));
    }
}

TEST_CASE("Perkins boundary with a zero atom: alpha = -/+ 1, mass recorded") {
    auto bd = perkins_boundary(three_atom_zero());
    for (double s : {0.1, 0.5, 0.9, 1.0})
        CHECK(bd.alpha_plus(s) == doctest::Approx(-1.0));
    for (double i : {-0.1, -0.5, -0.9, -1.0})
        CHECK(bd.alpha_minus(i) == doctest::Approx(1.0));
    CHECK(bd.zero_atom_mass() == doctest::Approx(0.5));

    // alpha of mu* coincides with alpha of mu
    auto star = three_atom_zero().star();
    auto bds = perkins_boundary(star.measure);
    for (double s : {0.2, 0.6, 0.95})
        CHECK(bds.alpha_plus(s) == doctest::Approx(bd.alpha_plus(s)).epsilon(1e-12));
}

TEST_CASE("AY tangency certificate: beta is the argmin of the chord slope") {
    Rng rng(77, 0);
    for (const auto& m : {uniform11(), two_point(), three_atom_zero(), pareto1()}) {
        auto bd = ay_boundary(m);
        const double xlo = std::isfinite(m.support_lo()) ? m.support_lo() : -8.0;
        for (double s : {0.15, 0.45, 0.85}) {
            const double b = bd.beta(s);
            const double best = m.call(b) / (s - b);
            for (int i = 0; i < 200; ++i) {
                const double y = xlo - 0.5 + (s - xlo + 0.5) * rng.uniform() * 0.999;
                if (y >= s) continue;
                CHECK(best <= m.call(y) / (s - y) + 1e-10);
            }
        }
    }
}

TEST_CASE("Perkins tangency certificate: alpha+ is the argmax of the chord slope") {
    Rng rng(78, 0);
    for (const auto& m : {uniform11(), two_point(), three_atom_zero(), pareto1()}) {
        auto bd = perkins_boundary(m);
        const double xlo = std::isfinite(m.support_lo()) ? m.support_lo() : -8.0;
        for (double x : {0.2, 0.5, 0.9}) {
            const double a = bd.alpha_plus(x);
            const double best = (m.call(x) - m.put(a)) / (x - a);
            for (int i = 0; i < 200; ++i) {
                const double y = (xlo - 0.5) * rng.uniform();
                CHECK(best >= (m.call(x) - m.put(y)) / (x - y) - 1e-10);
            }
            // mirrored check for alpha-
            const double am = bd.alpha_minus(-x);
            const double bestm = (m.put(-x) - m.call(am)) / (am + x);
            const double xhi = std::isfinite(m.support_hi()) ? m.support_hi() : 16.0;
            for (int i = 0; i < 200; ++i) {
                const double y = (xhi + 0.5) * rng.uniform();
                if (y <= 0.0) continue;
                CHECK(bestm >= (m.put(-x) - m.call(y)) / (y + x) - 1e-10);
            }
        }
    }
}

TEST_CASE("first-order tangency condition at smooth points") {
    auto m = uniform11();
    auto bd = perkins_boundary(m);
    for (double x : {0.2, 0.5, 0.8}) {
        const double a = bd.alpha_plus(x);
        const double chord = (m.call(x) - m.put(a)) / (x - a);
        CHECK(chord == doctest::Approx(m.put_dplus(a)).epsilon(1e-8));
    }
}

TEST_CASE("boundary monotonicity on evaluation grids") {
    for (const auto& m : {uniform11(), two_point(), three_atom_zero(), pareto1()}) {
        auto ay = ay_boundary(m);
        auto pk = perkins_boundary(m);
        double prev_beta = -1e300, prev_ap = 1e300, prev_am_mod = -1e300;
        for (double s = 0.01; s <= 2.0; s += 0.01) {
            const double b = ay.beta(s);
            CHECK(b >= prev_beta - 1e-12);
            CHECK(b < s + 1e-12);
            prev_beta = b;
            const double ap = pk.alpha_plus(s);
            CHECK(ap <= prev_ap + 1e-12);
            CHECK(ap <= 0.0);
            prev_ap = ap;
            const double am = pk.alpha_minus(-s);
            CHECK(am >= prev_am_mod - 1e-12);  // increases with |i|
            CHECK(am >= 0.0);
            prev_am_mod = am;
        }
    }
}

TEST_CASE("inverse consistency of b/beta and a+/alpha+") {
    auto m = uniform11();
    auto ay = ay_boundary(m);
    auto pk = perkins_boundary(m);
    const double delta = 1e-7;
    for (double s : {0.1, 0.33, 0.62, 0.9}) {
        const double b = ay.beta(s);
        CHECK(m.barycentre(b - delta) <= s + 1e-6);
        CHECK(m.barycentre(b + delta) >= s - 1e-6);
        CHECK(pk.a_plus(pk.alpha_plus(s)) == doctest::Approx(s).epsilon(1e-7));
    }
    // uniform closed-form inverses
    for (double w = -0.9; w < 0.0; w += 0.1) {
        const double expect = (1.0 - std::sqrt(1.0 + w)) * (1.0 - std::sqrt(1.0 + w));
        CHECK(pk.a_plus(w) == doctest::Approx(expect).epsilon(1e-8));
        CHECK(pk.a_minus(-w) == doctest::Approx(-expect).epsilon(1e-8));
    }
}

TEST_CASE("excursion law: AY max survival") {
    auto ay = ay_boundary(uniform11());
    for (double s : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9})
        CHECK(max_survival(ay, s) == doctest::Approx(1.0 - s).epsilon(1e-8));
    CHECK(max_survival(ay, 0.0) == doctest::Approx(1.0));

    auto ay2 = ay_boundary(two_point());
    for (double s : {0.2, 0.5, 0.8})
        CHECK(max_survival(ay2, s) == doctest::Approx(1.0 / (1.0 + s)).epsilon(1e-8));
    // with an atom at the top, survival at the top equals the atom mass
    CHECK(max_survival(ay2, 1.0) == doctest::Approx(0.5).epsilon(1e-7));

    CHECK_THROWS_AS(max_survival(ay, 1.2), NonIntegrableBoundaryError);
}

TEST_CASE("excursion law: Perkins exponential functional") {
    // exp(-int_0^s dr/(2 sqrt r)) = exp(-sqrt s); the full Perkins max-law
    // 1 - sqrt(s) is a simulation quantity, not this functional
    auto pk = perkins_boundary(uniform11());
    for (double s : {0.1, 0.25, 0.5, 0.75, 0.9})
        CHECK(max_survival(pk, s) == doctest::Approx(std::exp(-std::sqrt(s))).epsilon(1e-7));
    CHECK(max_survival(pk, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("reverse barycentre spec examples") {
    CHECK(reverse_barycentre(uniform11(), 0.0) == doctest::Approx(-0.5));
    CHECK(reverse_barycentre(uniform11(), 1.0) == doctest::Approx(0.0));
    CHECK(reverse_barycentre(two_point(), 0.0) == doctest::Approx(-1.0));
}

TEST_CASE("escaping-mass barycentre values from the worked example") {
    // mu_n = (1 - n^-2) half(d1 + d-1) + n^-2 half(dn + d-n)
    const double n = 4.0;
    const double w = 1.0 - 1.0 / (n * n);
    auto m = TargetMeasure::from_parts(
        {{-n, 0.5 / (n * n)}, {-1.0, 0.5 * w}, {1.0, 0.5 * w}, {n, 0.5 / (n * n)}}, {});
    CHECK(m.potential(0.0) == doctest::Approx(1.0 + 1.0 / n - 1.0 / (n * n)).epsilon(1e-14));
    CHECK(m.barycentre(-n) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(m.barycentre(-2.0) == doctest::Approx(n / (2.0 * n * n - 1.0)).epsilon(1e-12));
    CHECK(m.barycentre(0.0) == doctest::Approx(1.0 + 1.0 / n - 1.0 / (n * n)).epsilon(1e-12));
    CHECK(m.barycentre(1.5) == doctest::Approx(n).epsilon(1e-12));
}
