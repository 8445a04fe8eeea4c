#include "chemoswitch/radial.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

using namespace chemoswitch;

namespace {

ModelParams caseA(double chi, double mu = 1.0) {
    ModelParams p;
    p.chi = chi;
    p.switching = SwitchingSpec{SwitchingCase::A, mu, 1.0, 0.5};
    return p;
}

// Direct transcription of the radial operator for the attractant:
// (1/r) d/dr (r ds/dr) + n0 - s, face radius i*dr, zero flux at both ends.
std::vector<long double> s_rhs_ref(const RadialGrid& g, const std::vector<double>& y) {
    const int n = g.n_cells;
    std::vector<long double> out(static_cast<std::size_t>(n));
    auto s = [&](int i) { return static_cast<long double>(y[static_cast<std::size_t>(2 * n + i)]); };
    for (int i = 0; i < n; ++i) {
        const long double r = (i + 0.5L) * g.dr;
        const long double f_hi = i + 1 < n ? (i + 1) * g.dr * (s(i + 1) - s(i)) / g.dr : 0.0L;
        const long double f_lo = i > 0 ? i * g.dr * (s(i) - s(i - 1)) / g.dr : 0.0L;
        out[static_cast<std::size_t>(i)] = (f_hi - f_lo) / (r * g.dr) + y[static_cast<std::size_t>(i)] - s(i);
    }
    return out;
}

} // namespace

TEST_SUITE("radial") {

TEST_CASE("grid geometry") {
    const auto g = RadialGrid::from_spacing(10.0, 5e-3);
    CHECK(g.n_cells == 2000);
    CHECK(g.center(0) == doctest::Approx(2.5e-3));
    CHECK(g.center(0) > 0.0);
    double area = 0.0;
    for (int i = 0; i < g.n_cells; ++i) {
        area += g.volume(i);
    }
    CHECK(area == doctest::Approx(std::numbers::pi * 100.0).epsilon(1e-12));
    CHECK_THROWS_AS(RadialGrid::from_spacing(1.0, 0.5), std::invalid_argument);
}

TEST_CASE("uniform state has zero right-hand side") {
    const auto g = RadialGrid::from_spacing(10.0, 0.05);
    RadialOptions opt;
    opt.amplitude = 0.0;
    const auto y = radial_initial_state(g, opt, ModelVariant::TwoPhenotype);
    std::vector<double> dy(y.size());
    radial_rhs(caseA(8.0), g, y, dy);
    for (double d : dy) {
        REQUIRE(d == 0.0);
    }
}

TEST_CASE("attractant operator matches the reference") {
    const auto g = RadialGrid::from_spacing(5.0, 0.05);
    const auto y = radial_initial_state(g, {}, ModelVariant::TwoPhenotype);
    std::vector<double> dy(y.size());
    radial_rhs(caseA(8.0), g, y, dy);
    const auto ref = s_rhs_ref(g, y);
    for (int i = 0; i < g.n_cells; ++i) {
        REQUIRE(std::abs(dy[static_cast<std::size_t>(2 * g.n_cells + i)] - static_cast<double>(ref[static_cast<std::size_t>(i)])) <
                1e-12);
    }
}

TEST_CASE("weighted cell totals are conserved by the operator") {
    const auto g = RadialGrid::from_spacing(10.0, 0.1);
    const auto n = static_cast<std::size_t>(g.n_cells);
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    std::vector<double> y(3 * n);
    for (auto& v : y) {
        v = u(gen);
    }
    std::vector<double> dy(y.size());
    for (auto v : {ModelVariant::TwoPhenotype, ModelVariant::MinimalKS}) {
        auto p = caseA(8.0);
        p.variant = v;
        radial_rhs(p, g, y, dy);
        double sum = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = g.volume(static_cast<int>(i));
            sum += w * (dy[i] + dy[n + i]);
            scale += w * (std::abs(dy[i]) + std::abs(dy[n + i]));
        }
        CHECK(std::abs(sum) < 1e-13 * scale);
    }
}

TEST_CASE("initial condition") {
    const auto g = RadialGrid::from_spacing(10.0, 0.02);
    const auto y = radial_initial_state(g, {}, ModelVariant::TwoPhenotype);
    const auto n = static_cast<std::size_t>(g.n_cells);
    const double r0 = g.center(0);
    CHECK(y[0] == 0.5);
    CHECK(y[n] == 0.5);
    CHECK(y[2 * n] == doctest::Approx(0.5 + 0.01 * std::exp(-r0 * r0)).epsilon(1e-15));
    const auto m = radial_initial_state(g, {}, ModelVariant::MinimalKS);
    CHECK(m[0] == 1.0);
    CHECK(m[n] == 0.0);
}

TEST_CASE("blow-up threshold is capped by the centre cell") {
    RadialOptions opt;
    const auto fine = RadialGrid::from_spacing(10.0, 0.02);
    // pi L^2 / 2 over the centre cell volume 2 pi (dr/2) dr.
    CHECK(radial_blowup_threshold(fine, opt) == doctest::Approx(0.5 * 100.0 / (0.02 * 0.02)));
    opt.blowup_factor = 100.0;
    CHECK(radial_blowup_threshold(fine, opt) == 100.0);
}

TEST_CASE("short run conserves mass") {
    const auto g = RadialGrid::from_spacing(10.0, 0.05);
    TimeController ctl;
    ctl.t_end = 20.0;
    ctl.probe_every = 1.0;
    ctl.snapshot_every = 0.0;
    RadialOptions opt;
    opt.snapshot_times = {5.0};
    const auto run = run_radial(caseA(8.0), g, ctl, opt);
    CHECK(run.status == RunStatus::Completed);
    CHECK(run.geometry == Geometry::Radial);
    REQUIRE(run.snapshots.size() == 3);
    CHECK(run.snapshots[1].t == doctest::Approx(5.0));
    for (const auto& [t, d] : run.mass_drift) {
        CHECK(d < 1e-10);
    }
    CHECK(run.max_density.size() == 21);
}

TEST_CASE("minimal model collapses") {
    const auto g = RadialGrid::from_spacing(10.0, 0.05);
    TimeController ctl;
    ctl.t_end = 200.0;
    ctl.probe_every = 1.0;
    ctl.snapshot_every = 0.0;
    ModelParams p;
    p.variant = ModelVariant::MinimalKS;
    p.chi = 8.0;
    const auto run = run_radial(p, g, ctl, {});
    CHECK(run.aborted());
    REQUIRE(run.t_blowup.has_value());
    CHECK(*run.t_blowup < 200.0);
}

}
