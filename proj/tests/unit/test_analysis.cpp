#include "chemoswitch/analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace chemoswitch;

namespace {

std::vector<double> gaussians(std::size_t n, double dx, std::vector<std::pair<double, double>> centre_height,
                              double width) {
    std::vector<double> f(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (static_cast<double>(i) + 0.5) * dx;
        for (auto [c, h] : centre_height) {
            f[i] += h * std::exp(-(x - c) * (x - c) / (2.0 * width * width));
        }
    }
    return f;
}

RunArtifacts line_run(std::vector<double> n1, double dx) {
    RunArtifacts run;
    run.geometry = Geometry::Line;
    const std::size_t n = n1.size();
    run.side = n;
    run.cell_measure.assign(n, dx);
    for (std::size_t i = 0; i < n; ++i) {
        run.coords.push_back((static_cast<double>(i) + 0.5) * dx);
    }
    FieldSnapshot s{0.0, std::vector<double>(n, 0.5), std::move(n1), std::vector<double>(n, 0.5)};
    run.snapshots.push_back(s);
    return run;
}

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("count_peaks fixtures") {
    const std::vector<double> flat(400, 0.5);
    CHECK(count_peaks(flat, 0.1, 1.05).count == 0);

    const double dx = 0.1;
    const auto two = gaussians(400, dx, {{10.0, 1.0}, {30.0, 1.5}}, 1.0);
    const auto c = count_peaks(two, dx, 1.05);
    REQUIRE(c.count == 2);
    CHECK(c.heights[0] == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(c.heights[1] == doctest::Approx(2.5).epsilon(1e-3));
    CHECK(c.positions[0] == 99);
    CHECK(c.positions[1] == 299);
    // Full width at half prominence of a Gaussian: 2 sqrt(2 ln 2) sigma.
    CHECK(c.widths[0] == doctest::Approx(2.0 * std::sqrt(2.0 * std::numbers::ln2)).epsilon(0.05));

    // A peak that sits at the boundary counts.
    const auto edge = gaussians(200, dx, {{0.05, 2.0}}, 1.0);
    CHECK(count_peaks(edge, dx, 1.05).count == 1);

    // A bump below threshold_ratio * mean does not.
    const auto low = gaussians(400, dx, {{20.0, 0.01}}, 1.0);
    CHECK(count_peaks(low, dx, 1.05).count == 0);
}

TEST_CASE("close maxima merge") {
    std::vector<double> f(50, 1.0);
    f[20] = 5.0;
    f[22] = 4.0;
    const auto c = count_peaks(f, 1.0, 1.05, 3);
    REQUIRE(c.count == 1);
    CHECK(c.positions[0] == 20);
}

TEST_CASE("2D spot census") {
    const std::size_t N = 40;
    std::vector<double> f(N * N, 1.0);
    auto bump = [&](double ci, double cj) {
        for (std::size_t j = 0; j < N; ++j) {
            for (std::size_t i = 0; i < N; ++i) {
                const double di = static_cast<double>(i) - ci, dj = static_cast<double>(j) - cj;
                f[j * N + i] += 10.0 * std::exp(-(di * di + dj * dj) / 4.0);
            }
        }
    };
    bump(10, 10);
    bump(30, 12);
    bump(20, 30);
    CHECK(count_peaks_2d(f, N).count == 3);
    CHECK(count_peaks_2d(std::vector<double>(N * N, 2.0), N).count == 0);
}

TEST_CASE("sinusoid oscillation is detected with its period") {
    std::vector<double> t, x;
    for (int k = 0; k <= 1000; ++k) {
        t.push_back(0.1 * k);
        x.push_back(1.0 + 0.3 * std::sin(2.0 * std::numbers::pi * t.back() / 7.0) + 0.01 * t.back());
    }
    const auto osc = detect_oscillation(t, x, 0.0, 100.0);
    REQUIRE(osc.has_value());
    CHECK(osc->period == doctest::Approx(7.0).epsilon(0.5 / 7.0));
    CHECK(osc->amplitude == doctest::Approx(0.3).epsilon(0.2));
}

TEST_CASE("decaying or monotone signals are not oscillations") {
    std::vector<double> t, decay, ramp;
    for (int k = 0; k <= 1000; ++k) {
        t.push_back(0.1 * k);
        decay.push_back(std::exp(-0.05 * t.back()) * std::sin(2.0 * std::numbers::pi * t.back() / 7.0));
        ramp.push_back(std::exp(-t.back() / 30.0));
    }
    CHECK_FALSE(detect_oscillation(t, decay, 0.0, 100.0).has_value());
    CHECK_FALSE(detect_oscillation(t, ramp, 0.0, 100.0).has_value());
    CHECK_THROWS_AS(detect_oscillation(t, ramp, 0.0, 20.0), std::invalid_argument);
}

TEST_CASE("extinction") {
    const std::vector<double> w(10, 0.1);
    FieldSnapshot s{0.0, std::vector<double>(10, 1e-3), std::vector<double>(10, 1.0), std::vector<double>(10, 0.0)};
    REQUIRE(detect_extinction(s, w).has_value());
    CHECK(*detect_extinction(s, w) == Phenotype::Secreting);
    std::swap(s.n0, s.n1);
    CHECK(*detect_extinction(s, w) == Phenotype::Chemotactic);
    s.n1.assign(10, 0.5);
    CHECK_FALSE(detect_extinction(s, w).has_value());
}

TEST_CASE("mass audit flags corruption") {
    auto run = line_run(std::vector<double>(100, 0.5), 0.1);
    run.snapshots.push_back(run.snapshots[0]);
    CHECK(mass_audit(run) == 0.0);
    run.snapshots[1].n1[3] += 0.1; // total mass 10 -> 10.01
    CHECK(mass_audit(run) == doctest::Approx(1e-3).epsilon(1e-9));
}

TEST_CASE("summary of a flat run has no peaks") {
    auto run = line_run(std::vector<double>(100, 0.5), 0.1);
    const auto s = summarize(run);
    CHECK_FALSE(s.pattern_formed);
    CHECK(s.peak_count == 0);
    CHECK(s.spatial_range == 0.0);
    CHECK(s.peak_density == doctest::Approx(1.0));
}

TEST_CASE("summary of a patterned run") {
    const auto n1 = gaussians(400, 0.1, {{10.0, 3.0}, {30.0, 3.0}}, 1.0);
    const auto s = summarize(line_run(n1, 0.1));
    CHECK(s.pattern_formed);
    CHECK(s.peak_count == 2);
    CHECK(s.spatial_range == doctest::Approx(3.0).epsilon(1e-3));
}

}
