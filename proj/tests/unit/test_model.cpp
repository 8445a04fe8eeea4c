#include "chemoswitch/model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace chemoswitch;

namespace {

// Direct Hill evaluation in long double, independent of the library's
// logistic form.
long double hill_ref(long double x, long double theta, long double q) {
    if (x == 0.0L) {
        return 0.0L;
    }
    const long double a = std::pow(x, q);
    return a / (std::pow(theta, q) + a);
}

SwitchingSpec spec(SwitchingCase c, double mu = 1.0, double q = 1.0) {
    return SwitchingSpec{c, mu, q, 0.5};
}

} // namespace

TEST_SUITE("model") {

TEST_CASE("switching rates at reference points") {
    auto r = switching_rates(spec(SwitchingCase::A), 3.0, 7.0);
    CHECK(r.mu01 == 1.0);
    CHECK(r.mu10 == 1.0);

    r = switching_rates(spec(SwitchingCase::B1, 1.0, 30.0), 1.0, 0.2);
    CHECK(r.mu01 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.mu10 == doctest::Approx(0.5).epsilon(1e-15));

    r = switching_rates(spec(SwitchingCase::C2, 1.0, 30.0), 0.7, 0.5);
    CHECK(r.mu01 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.mu10 == doctest::Approx(0.5).epsilon(1e-15));

    r = switching_rates(spec(SwitchingCase::B2, 1.0, 1.0), 3.0, 0.0);
    CHECK(r.mu01 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(r.mu10 == doctest::Approx(0.75).epsilon(1e-14));

    r = switching_rates(spec(SwitchingCase::NoSwitching), 2.0, 2.0);
    CHECK(r.mu01 == 0.0);
    CHECK(r.mu10 == 0.0);
}

TEST_CASE("negative arguments are domain errors") {
    CHECK_THROWS_AS(switching_rates(spec(SwitchingCase::A), -1e-3, 0.5), std::domain_error);
    CHECK_THROWS_AS(switching_rates(spec(SwitchingCase::C1), 1.0, -1.0), std::domain_error);
}

TEST_CASE("rates match direct Hill evaluation and sum to mu") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> arg(0.0, 3.0), mu_d(0.01, 10.0), q_d(0.5, 30.0);
    for (int k = 0; k < 10000; ++k) {
        const double rho = arg(gen), s = arg(gen), mu = mu_d(gen), q = q_d(gen);
        for (auto c : {SwitchingCase::B1, SwitchingCase::B2, SwitchingCase::C1, SwitchingCase::C2}) {
            const auto r = switching_rates(spec(c, mu, q), rho, s);
            REQUIRE(r.mu01 >= 0.0);
            REQUIRE(r.mu10 >= 0.0);
            REQUIRE(r.mu01 <= mu);
            REQUIRE(r.mu10 <= mu);
            REQUIRE(std::abs(r.mu01 + r.mu10 - mu) <= 4e-16 * mu);

            const bool density = c == SwitchingCase::B1 || c == SwitchingCase::B2;
            const long double h = density ? hill_ref(rho, 1.0L, q) : hill_ref(s, 0.5L, q);
            const bool up = c == SwitchingCase::B1 || c == SwitchingCase::C1;
            const long double expect01 = mu * (up ? h : 1.0L - h);
            REQUIRE(std::abs(static_cast<long double>(r.mu01) - expect01) <= 1e-12L * mu);
        }
    }
}

TEST_CASE("large q stays finite") {
    const auto r = switching_rates(spec(SwitchingCase::B1, 1.0, 30.0), 1e6, 0.0);
    CHECK(std::isfinite(r.mu01));
    CHECK(r.mu01 == doctest::Approx(1.0));
    CHECK(hill_fraction(0.0, 0.5, 30.0) == 0.0);
}

TEST_CASE("rates are monotone in their Hill argument") {
    const double q = 3.0;
    double prev_b1 = -1.0, prev_b2 = 2.0, prev_c1 = -1.0, prev_c2 = 2.0;
    for (int i = 0; i <= 300; ++i) {
        const double x = 0.01 * i;
        const double b1 = switching_rates(spec(SwitchingCase::B1, 1.0, q), x, 0.5).mu01;
        const double b2 = switching_rates(spec(SwitchingCase::B2, 1.0, q), x, 0.5).mu01;
        const double c1 = switching_rates(spec(SwitchingCase::C1, 1.0, q), 1.0, x).mu01;
        const double c2 = switching_rates(spec(SwitchingCase::C2, 1.0, q), 1.0, x).mu01;
        CHECK(b1 >= prev_b1);
        CHECK(b2 <= prev_b2);
        CHECK(c1 >= prev_c1);
        CHECK(c2 <= prev_c2);
        prev_b1 = b1;
        prev_b2 = b2;
        prev_c1 = c1;
        prev_c2 = c2;
    }
}

TEST_CASE("kinetic G") {
    CHECK(kinetic_G(spec(SwitchingCase::A), 0.5, 0.5, 1.0, 0.5) == 0.0);
    CHECK(kinetic_G(spec(SwitchingCase::B1), 1.0, 0.0, 1.0, 0.37) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(kinetic_G(spec(SwitchingCase::NoSwitching), 0.3, 0.9, 1.2, 2.0) == 0.0);
}

TEST_CASE("reaction terms") {
    ModelParams p;
    auto r = rhs_reaction(p, 0.5, 0.5, 0.5);
    CHECK(r.dn0 == 0.0);
    CHECK(r.dn1 == 0.0);
    CHECK(r.ds == 0.0);

    r = rhs_reaction(p, 1.0, 0.0, 1.0);
    CHECK(r.dn0 == -1.0);
    CHECK(r.dn1 == 1.0);
    CHECK(r.ds == 0.0);

    p.variant = ModelVariant::MinimalKS;
    r = rhs_reaction(p, 1.0, 0.0, 1.0);
    CHECK(r.dn0 == 0.0);
    CHECK(r.ds == 0.0);

    // Pointwise conservation of switching.
    p.variant = ModelVariant::TwoPhenotype;
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (auto c : {SwitchingCase::A, SwitchingCase::B1, SwitchingCase::B2, SwitchingCase::C1, SwitchingCase::C2}) {
        p.switching = spec(c, 2.0, 4.0);
        for (int k = 0; k < 200; ++k) {
            const auto t = rhs_reaction(p, u(gen), u(gen), u(gen));
            CHECK(t.dn0 + t.dn1 == 0.0);
        }
    }
}

TEST_CASE("nondimensionalisation") {
    DimensionalParams d;
    d.D_n = 2.5;
    d.D_s = 2.5;
    CHECK(nondimensionalize(d).D == 1.0);

    d = DimensionalParams{};
    d.chi_1 = 2.0;
    d.alpha_0 = 3.0;
    d.sigma = 1.0;
    d.eta = 6.0;
    d.D_s = 1.0;
    CHECK(nondimensionalize(d).chi == doctest::Approx(1.0).epsilon(1e-15));

    d = DimensionalParams{};
    d.eta = 4.0;
    const auto nd = nondimensionalize(d);
    CHECK(nd.scales.X == doctest::Approx(0.5));
    CHECK(nd.scales.T == doctest::Approx(0.25));

    d.alpha_0 = 0.0;
    CHECK_THROWS_AS(nondimensionalize(d), std::domain_error);
}

TEST_CASE("round trip through the scales") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> logu(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) {
        DimensionalParams d{std::pow(10.0, logu(gen)), std::pow(10.0, logu(gen)), std::pow(10.0, logu(gen)),
                            std::pow(10.0, logu(gen)), std::pow(10.0, logu(gen)), std::pow(10.0, logu(gen))};
        const auto back = redimensionalize(nondimensionalize(d));
        CHECK(back.D_n == doctest::Approx(d.D_n).epsilon(1e-12));
        CHECK(back.D_s == doctest::Approx(d.D_s).epsilon(1e-12));
        CHECK(back.chi_1 == doctest::Approx(d.chi_1).epsilon(1e-12));
        CHECK(back.alpha_0 == doctest::Approx(d.alpha_0).epsilon(1e-12));
        CHECK(back.eta == doctest::Approx(d.eta).epsilon(1e-12));
        CHECK(back.sigma == doctest::Approx(d.sigma).epsilon(1e-12));
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate(SwitchingSpec{SwitchingCase::B1, 0.0, 1.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(validate(SwitchingSpec{SwitchingCase::C1, 1.0, 1.0, 1.5}), std::invalid_argument);
    CHECK_NOTHROW(validate(SwitchingSpec{SwitchingCase::NoSwitching, 0.0, 0.0, 0.5}));
    ModelParams p;
    p.D = 0.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    CHECK(parse_switching_case("b2") == SwitchingCase::B2);
    CHECK_THROWS_AS(parse_switching_case("D"), std::invalid_argument);
}

}
