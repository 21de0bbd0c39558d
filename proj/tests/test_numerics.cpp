#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sep/numerics.hpp"
#include "sep/rng.hpp"

using namespace sep;

TEST_CASE("adaptive Simpson on smooth and kinked integrands") {
    auto r = num::integrate([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-11));

    // |x| has a kink at 0; forced knot keeps full accuracy
    auto k = num::integrate_with_knots([](double x) { return std::abs(x); }, -1.0, 2.0, {0.0},
                                       1e-12);
    CHECK(k.value == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("improper integration detects integrable and divergent endpoints") {
    // 1/sqrt(x) on (0,1] integrates to 2
    auto ok = num::integrate_improper([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                      1e-9, {}, true, false);
    CHECK_FALSE(ok.divergent);
    CHECK(ok.value == doctest::Approx(2.0).epsilon(1e-6));

    // 1/x diverges logarithmically
    auto bad = num::integrate_improper([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-9, {},
                                       true, false);
    CHECK(bad.divergent);

    // 1/x^2 diverges fast
    auto worse = num::integrate_improper([](double x) { return 1.0 / (x * x); }, 0.0, 1.0, 1e-9,
                                         {}, true, false);
    CHECK(worse.divergent);
}

TEST_CASE("semi-infinite integration") {
    auto r = num::integrate_to_inf([](double x) { return std::exp(-x); }, 0.0, 1e-10);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
    auto s = num::integrate_to_inf([](double x) { return 2.0 / std::pow(x + 2.0, 3.0); }, -1.0,
                                   1e-10);
    CHECK(s.value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("monotone boundary bisection honours the sup/inf conventions") {
    // h(y) = y: sup{h <= 0} = 0
    CHECK(num::bisect_sup_leq([](double y) { return y; }, -3.0, 5.0, 1e-13) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // step function: sup{h <= 0} should land at the jump
    auto step = [](double y) { return y < 1.0 ? -1.0 : 2.0; };
    CHECK(num::bisect_sup_leq(step, 0.0, 3.0, 1e-13) == doctest::Approx(1.0).epsilon(1e-12));
    // nonincreasing k: inf{k <= 0}
    CHECK(num::bisect_inf_leq([](double y) { return -y; }, -3.0, 5.0, 1e-13) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cumulative integral matches closed forms at interior points") {
    num::CumulativeIntegral I([](double x) { return std::cos(x); }, 0.0, 2.0, {0.5, 1.0}, 1e-12);
    for (double s : {0.1, 0.5, 0.77, 1.3, 2.0})
        CHECK(I(s) == doctest::Approx(std::sin(s)).epsilon(1e-10));
}

TEST_CASE("rng streams are deterministic and independent of order") {
    Rng a(42, 7), b(42, 7), c(42, 8);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    bool differs = false;
    Rng a2(42, 7);
    for (int i = 0; i < 64; ++i) differs |= (a2.next_u64() != c.next_u64());
    CHECK(differs);
}

TEST_CASE("ziggurat normals have the right moments and tails") {
    Rng r(1234, 0);
    const int n = 2000000;
    double m = 0, m2 = 0, m3 = 0, m4 = 0;
    std::vector<double> first(10000);
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        m += z;
        m2 += z * z;
        m3 += z * z * z;
        m4 += z * z * z * z;
        if (i < 10000) first[i] = z;
    }
    m /= n;
    m2 /= n;
    m3 /= n;
    m4 /= n;
    CHECK(std::abs(m) < 3e-3);
    CHECK(m2 == doctest::Approx(1.0).epsilon(5e-3));
    CHECK(std::abs(m3) < 1e-2);
    CHECK(m4 == doctest::Approx(3.0).epsilon(2e-2));

    // KS against the normal CDF on a subsample
    auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    const double d = oracle::ks_distance(first, phi, phi);
    CHECK(d < oracle::ks_threshold(first.size(), 0.01));
}

TEST_CASE("uniform never returns the endpoints") {
    Rng r(9, 3);
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}
