#include "chemoswitch/solver2d.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

using namespace chemoswitch;

namespace {

// Padded-array reference step in long double. Ghost layers mirror the
// adjacent interior cell; boundary fluxes are then zeroed explicitly.
struct Ref {
    int N;
    long double h;
    std::vector<long double> u, v, w;
    long double& at(std::vector<long double>& f, int i, int j) const { return f[(j + 1) * (N + 2) + (i + 1)]; }
    long double at(const std::vector<long double>& f, int i, int j) const { return f[(j + 1) * (N + 2) + (i + 1)]; }
    void mirror(std::vector<long double>& f) const {
        for (int k = 0; k < N; ++k) {
            at(f, -1, k) = at(f, 0, k);
            at(f, N, k) = at(f, N - 1, k);
            at(f, k, -1) = at(f, k, 0);
            at(f, k, N) = at(f, k, N - 1);
        }
    }
};

Ref to_ref(const StateField2D& s, int N, double h) {
    Ref r{N, h, {}, {}, {}};
    const std::size_t pad = static_cast<std::size_t>((N + 2) * (N + 2));
    r.u.assign(pad, 0.0L);
    r.v.assign(pad, 0.0L);
    r.w.assign(pad, 0.0L);
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            const auto k = static_cast<std::size_t>(j * N + i);
            r.at(r.u, i, j) = s.u[k];
            r.at(r.v, i, j) = s.v[k];
            r.at(r.w, i, j) = s.w[k];
        }
    }
    return r;
}

long double G_ref(const SwitchingSpec& sw, long double u, long double v, long double w) {
    const auto r = switching_rates(sw, static_cast<double>(u + v), static_cast<double>(w));
    return -static_cast<long double>(r.mu01) * u + static_cast<long double>(r.mu10) * v;
}

Ref ref_step(const ModelParams& p, Ref a, long double tau) {
    const int N = a.N;
    const long double h = a.h;
    a.mirror(a.u);
    a.mirror(a.v);
    a.mirror(a.w);
    Ref b = a;
    auto lap = [&](const std::vector<long double>& f, int i, int j) {
        return (a.at(f, i + 1, j) + a.at(f, i - 1, j) + a.at(f, i, j + 1) + a.at(f, i, j - 1) - 4 * a.at(f, i, j)) /
               (h * h);
    };
    // Flux from cell (i,j) towards (i+di, j+dj), zero across the boundary.
    auto flux = [&](int i, int j, int di, int dj) -> long double {
        const int ii = i + di, jj = j + dj;
        if (ii < 0 || ii >= N || jj < 0 || jj >= N) {
            return 0.0L;
        }
        const long double grad_w = (a.at(a.w, ii, jj) - a.at(a.w, i, j)) / h;
        const long double up = grad_w > 0 ? a.at(a.v, i, j) : a.at(a.v, ii, jj);
        return p.D * (a.at(a.v, ii, jj) - a.at(a.v, i, j)) / h - p.chi * up * grad_w;
    };
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            const long double u = a.at(a.u, i, j), v = a.at(a.v, i, j), w = a.at(a.w, i, j);
            const long double G = G_ref(p.switching, u, v, w);
            b.at(b.w, i, j) = w + tau * (lap(a.w, i, j) + u - w);
            b.at(b.u, i, j) = u + tau * (p.D * lap(a.u, i, j) + G);
            const long double div =
                (flux(i, j, 1, 0) + flux(i, j, -1, 0) + flux(i, j, 0, 1) + flux(i, j, 0, -1)) / h;
            b.at(b.v, i, j) = v + tau * (div - G);
        }
    }
    return b;
}

double total(const std::vector<double>& a, const std::vector<double>& b) {
    return std::accumulate(a.begin(), a.end(), 0.0) + std::accumulate(b.begin(), b.end(), 0.0);
}

ModelParams params(SwitchingCase c, double chi, double mu = 1.0, double q = 1.0) {
    ModelParams p;
    p.chi = chi;
    p.switching = SwitchingSpec{c, mu, q, 0.5};
    return p;
}

} // namespace

TEST_SUITE("solver2d") {

TEST_CASE("three steps match the padded long-double reference") {
    const Grid2D g = Grid2D::from_spacing(4.0, 0.5);
    auto ic = initial_condition_2d(g, 0.5, 0.3, {99, "mt19937_64"});
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    for (auto& v : ic.v) {
        v += jitter(gen);
    }
    for (auto c : {SwitchingCase::A, SwitchingCase::B2, SwitchingCase::C1}) {
        const auto p = params(c, 7.0, 1.3, 2.0);
        const double tau = 1e-3;
        StateField2D cur = ic;
        Ref ref = to_ref(ic, g.N, g.dx);
        for (int k = 0; k < 3; ++k) {
            cur = step_2d(p, g, cur, tau);
            ref = ref_step(p, ref, tau);
        }
        for (int j = 0; j < g.N; ++j) {
            for (int i = 0; i < g.N; ++i) {
                const auto k = g.index(i, j);
                REQUIRE(std::abs(cur.u[k] - static_cast<double>(ref.at(ref.u, i, j))) < 1e-13);
                REQUIRE(std::abs(cur.v[k] - static_cast<double>(ref.at(ref.v, i, j))) < 1e-13);
                REQUIRE(std::abs(cur.w[k] - static_cast<double>(ref.at(ref.w, i, j))) < 1e-13);
            }
        }
        CHECK(cur.k_step == 3);
        CHECK(cur.t == doctest::Approx(3e-3));
    }
}

TEST_CASE("uniform state is a fixed point") {
    const Grid2D g = Grid2D::from_spacing(10.0, 0.5);
    const auto ic = initial_condition_2d(g, 0.5, 0.0, {});
    const auto next = step_2d(params(SwitchingCase::B1, 10.0), g, ic, 1e-3);
    for (std::size_t k = 0; k < g.cells(); ++k) {
        CHECK(next.u[k] == 0.5);
        CHECK(next.v[k] == 0.5);
        CHECK(next.w[k] == 0.5);
    }
}

TEST_CASE("rotating the data rotates the step") {
    const Grid2D g = Grid2D::from_spacing(6.0, 0.5);
    const int N = g.N;
    const auto ic = initial_condition_2d(g, 0.5, 0.2, {3, "mt19937_64"});
    auto rot = ic;
    // (i, j) -> (N-1-j, i)
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            const auto dst = g.index(N - 1 - j, i);
            rot.u[dst] = ic.u[g.index(i, j)];
            rot.v[dst] = ic.v[g.index(i, j)];
            rot.w[dst] = ic.w[g.index(i, j)];
        }
    }
    const auto p = params(SwitchingCase::A, 10.0);
    const auto a = step_2d(p, g, ic, 1e-3);
    const auto b = step_2d(p, g, rot, 1e-3);
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            const auto src = g.index(i, j), dst = g.index(N - 1 - j, i);
            REQUIRE(b.u[dst] == doctest::Approx(a.u[src]).epsilon(1e-14));
            REQUIRE(b.v[dst] == doctest::Approx(a.v[src]).epsilon(1e-14));
            REQUIRE(b.w[dst] == doctest::Approx(a.w[src]).epsilon(1e-14));
        }
    }
}

TEST_CASE("mass is conserved over many steps") {
    const Grid2D g = Grid2D::from_spacing(10.0, 0.5);
    auto st = initial_condition_2d(g, 0.5, 0.01, {11, "mt19937_64"});
    const double m0 = total(st.u, st.v);
    const auto p = params(SwitchingCase::C2, 10.0, 1.0, 3.0);
    StateField2D next;
    for (int k = 0; k < 2000; ++k) {
        step_2d(p, g, st, 1e-3, next);
        std::swap(st, next);
    }
    CHECK(std::abs(total(st.u, st.v) - m0) / m0 < 1e-12);
}

TEST_CASE("cells move up the attractant gradient") {
    const Grid2D g = Grid2D::from_spacing(5.0, 0.5);
    auto st = initial_condition_2d(g, 0.5, 0.0, {});
    const auto hot = g.index(5, 5);
    st.w[hot] += 1.0;
    auto p = params(SwitchingCase::NoSwitching, 10.0);
    const auto next = step_2d(p, g, st, 1e-3);
    CHECK(next.v[hot] > st.v[hot]);
    CHECK(next.v[g.index(4, 5)] < st.v[g.index(4, 5)]);
    CHECK(next.u[hot] == st.u[hot]);
}

TEST_CASE("minimal variant moves u and keeps v at zero") {
    const Grid2D g = Grid2D::from_spacing(5.0, 0.5);
    auto st = initial_condition_2d(g, 0.5, 0.1, {1, "mt19937_64"}, ModelVariant::MinimalKS);
    CHECK(st.u[0] == 1.0);
    CHECK(st.v[0] == 0.0);
    ModelParams p;
    p.variant = ModelVariant::MinimalKS;
    p.chi = 8.0;
    const auto next = step_2d(p, g, st, 1e-3);
    CHECK(std::abs(total(next.u, next.v) - total(st.u, st.v)) < 1e-12);
    for (double v : next.v) {
        REQUIRE(v == 0.0);
    }
}

TEST_CASE("initial condition is seeded and bounded") {
    const Grid2D g = Grid2D::from_spacing(20.0, 0.5);
    const auto a = initial_condition_2d(g, 0.5, 0.01, {7, "mt19937_64"});
    const auto b = initial_condition_2d(g, 0.5, 0.01, {7, "mt19937_64"});
    const auto c = initial_condition_2d(g, 0.5, 0.01, {8, "mt19937_64"});
    CHECK(a.w == b.w);
    CHECK(a.w != c.w);
    for (double w : a.w) {
        REQUIRE(w >= 0.5);
        REQUIRE(w < 0.51);
    }
    // First draw, computed from the raw generator.
    std::mt19937_64 gen(7);
    CHECK(a.w[0] == 0.5 + 0.01 * (static_cast<double>(gen() >> 11) / 9007199254740992.0));
    CHECK_THROWS_AS(initial_condition_2d(g, 0.5, 0.01, {7, "pcg"}), std::invalid_argument);
    CHECK_THROWS_AS(initial_condition_2d(g, 1.5, 0.01, {}), std::invalid_argument);
}

TEST_CASE("run_2d records probes and conserves mass") {
    const Grid2D g = Grid2D::from_spacing(10.0, 0.5);
    const auto ic = initial_condition_2d(g, 0.5, 0.01, {});
    Run2DOptions opt;
    opt.t_end = 2.0;
    opt.probe_every = 0.5;
    opt.snapshot_times = {1.0};
    const auto run = run_2d(params(SwitchingCase::A, 10.0), g, ic, opt);
    CHECK(run.status == RunStatus::Completed);
    CHECK(run.geometry == Geometry::Square);
    CHECK(run.side == 20);
    REQUIRE(run.snapshots.size() == 3);
    CHECK(run.snapshots[1].t == doctest::Approx(1.0));
    CHECK(run.snapshots.back().t == doctest::Approx(2.0));
    CHECK(run.probe.size() == 5);
    for (const auto& [t, d] : run.mass_drift) {
        CHECK(d < 1e-12);
    }
}

TEST_CASE("stable tau bound") {
    const Grid2D g = Grid2D::from_spacing(40.0, 0.5);
    ModelParams p;
    CHECK(stable_tau_bound(p, g, 0.0) == doctest::Approx(0.9 * 0.25 / 8.0));
    CHECK(stable_tau_bound(p, g, 100.0) == doctest::Approx(0.9 * 0.5 / 200.0));
    CHECK_THROWS_AS(step_2d(p, g, initial_condition_2d(g, 0.5, 0.0, {}), 0.0), std::invalid_argument);
}

}
