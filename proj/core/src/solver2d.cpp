#include "chemoswitch/solver2d.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

namespace chemoswitch {

Grid2D Grid2D::from_spacing(double L, double dx) {
    if (!(L > 0.0) || !(dx > 0.0)) {
        throw std::invalid_argument("Grid2D: L and dx must be positive");
    }
    Grid2D g;
    g.L = L;
    g.N = static_cast<int>(std::lround(L / dx));
    if (g.N < 8) {
        throw std::invalid_argument("Grid2D: need at least 8 cells per side");
    }
    g.dx = L / g.N;
    return g;
}

StateField2D initial_condition_2d(const Grid2D& grid, double nbar, double amplitude, const Rng2DSeed& seed,
                                  ModelVariant variant) {
    const bool minimal = variant == ModelVariant::MinimalKS;
    if (!minimal && !(nbar > 0.0 && nbar < 1.0)) {
        throw std::invalid_argument("initial_condition_2d: nbar must lie in (0, 1)");
    }
    if (seed.generator_id != "mt19937_64") {
        throw std::invalid_argument("initial_condition_2d: unknown generator '" + seed.generator_id + "'");
    }
    const double base0 = minimal ? 1.0 : nbar;
    const double base1 = minimal ? 0.0 : 1.0 - nbar;
    StateField2D st;
    st.u.assign(grid.cells(), base0);
    st.v.assign(grid.cells(), base1);
    st.w.assign(grid.cells(), base0);
    if (amplitude != 0.0) {
        std::mt19937_64 gen(seed.seed);
        // 53 high bits -> [0, 1); std::uniform_real_distribution is not portable.
        constexpr double scale = 1.0 / 9007199254740992.0;
        for (auto& w : st.w) {
            w += amplitude * (static_cast<double>(gen() >> 11) * scale);
        }
    }
    return st;
}

double stable_tau_bound(const ModelParams& params, const Grid2D& grid, double max_abs_b) {
    const double diffusive = grid.dx * grid.dx / (4.0 * (params.D + 1.0));
    const double advective = max_abs_b > 0.0 ? grid.dx / (2.0 * max_abs_b)
                                             : std::numeric_limits<double>::infinity();
    return 0.9 * std::min(diffusive, advective);
}

namespace {

struct Scratch {
    std::vector<double> fx, fy;
};

// Upwinded flux divergence of `c` driven by w, written into div. Face fluxes
// are assembled as diffusive + (b- c_hi - b+ c_lo) so that reflecting the data
// negates them exactly.
double flux_divergence(const Grid2D& g, double D, double chi, const std::vector<double>& c,
                       const std::vector<double>& w, std::vector<double>& div, Scratch& sc) {
    const int N = g.N;
    const double inv = 1.0 / g.dx;
    sc.fx.assign(static_cast<std::size_t>(N) * static_cast<std::size_t>(N - 1), 0.0);
    sc.fy.assign(sc.fx.size(), 0.0);
    double max_b = 0.0;
    auto face = [&](double c_lo, double c_hi, double w_lo, double w_hi) {
        const double b = chi * (w_hi - w_lo) * inv;
        const double bp = b > 0.0 ? b : 0.0;
        const double bm = b < 0.0 ? -b : 0.0;
        max_b = std::max(max_b, std::abs(b));
        return D * (c_hi - c_lo) * inv + (bm * c_hi - bp * c_lo);
    };
    // fx[j*(N-1) + i]: face between (i, j) and (i+1, j); fy likewise in y.
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i + 1 < N; ++i) {
            const auto a = g.index(i, j);
            const auto b = g.index(i + 1, j);
            sc.fx[static_cast<std::size_t>(j) * static_cast<std::size_t>(N - 1) + static_cast<std::size_t>(i)] =
                face(c[a], c[b], w[a], w[b]);
        }
    }
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j + 1 < N; ++j) {
            const auto a = g.index(i, j);
            const auto b = g.index(i, j + 1);
            sc.fy[static_cast<std::size_t>(i) * static_cast<std::size_t>(N - 1) + static_cast<std::size_t>(j)] =
                face(c[a], c[b], w[a], w[b]);
        }
    }
    div.resize(g.cells());
    const auto row = static_cast<std::size_t>(N - 1);
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            const auto uj = static_cast<std::size_t>(j);
            const double fx_hi = i + 1 < N ? sc.fx[uj * row + ui] : 0.0;
            const double fx_lo = i > 0 ? sc.fx[uj * row + ui - 1] : 0.0;
            const double fy_hi = j + 1 < N ? sc.fy[ui * row + uj] : 0.0;
            const double fy_lo = j > 0 ? sc.fy[ui * row + uj - 1] : 0.0;
            div[g.index(i, j)] = (fx_hi - fx_lo) * inv + (fy_hi - fy_lo) * inv;
        }
    }
    return max_b;
}

// Five-point Laplacian with mirror ghost cells: a ghost equals its neighbour,
// so the boundary difference is exactly zero.
inline double laplacian(const Grid2D& g, const std::vector<double>& f, int i, int j, double inv_h2) {
    const int N = g.N;
    const double c = f[g.index(i, j)];
    const double xp = i + 1 < N ? f[g.index(i + 1, j)] - c : 0.0;
    const double xm = i > 0 ? c - f[g.index(i - 1, j)] : 0.0;
    const double yp = j + 1 < N ? f[g.index(i, j + 1)] - c : 0.0;
    const double ym = j > 0 ? c - f[g.index(i, j - 1)] : 0.0;
    return (xp - xm) * inv_h2 + (yp - ym) * inv_h2;
}

} // namespace

StepDiagnostics step_2d(const ModelParams& params, const Grid2D& grid, const StateField2D& cur, double tau,
                        StateField2D& next) {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("step_2d: tau must be positive");
    }
    const std::size_t n = grid.cells();
    if (cur.u.size() != n || cur.v.size() != n || cur.w.size() != n) {
        throw std::invalid_argument("step_2d: state does not match the grid");
    }
    thread_local Scratch scratch;
    thread_local std::vector<double> div;

    next.u.resize(n);
    next.v.resize(n);
    next.w.resize(n);
    const double inv_h2 = 1.0 / (grid.dx * grid.dx);
    const bool minimal = params.variant == ModelVariant::MinimalKS;
    StepDiagnostics diag;

    // w first.
    for (int j = 0; j < grid.N; ++j) {
        for (int i = 0; i < grid.N; ++i) {
            const auto k = grid.index(i, j);
            next.w[k] = cur.w[k] + tau * (laplacian(grid, cur.w, i, j, inv_h2) + cur.u[k] - cur.w[k]);
        }
    }

    if (minimal) {
        diag.max_abs_b = flux_divergence(grid, params.D, params.chi, cur.u, cur.w, div, scratch);
        for (std::size_t k = 0; k < n; ++k) {
            next.u[k] = cur.u[k] + tau * div[k];
            next.v[k] = 0.0;
        }
    } else {
        const auto& sw = params.switching;
        for (int j = 0; j < grid.N; ++j) {
            for (int i = 0; i < grid.N; ++i) {
                const auto k = grid.index(i, j);
                const double G = kinetic_G(sw, cur.u[k], cur.v[k], cur.u[k] + cur.v[k], cur.w[k]);
                next.u[k] = cur.u[k] + tau * (params.D * laplacian(grid, cur.u, i, j, inv_h2) + G);
                // v's update needs G too; stash it in v temporarily.
                next.v[k] = G;
            }
        }
        diag.max_abs_b = flux_divergence(grid, params.D, params.chi, cur.v, cur.w, div, scratch);
        for (std::size_t k = 0; k < n; ++k) {
            next.v[k] = cur.v[k] + tau * (div[k] - next.v[k]);
        }
    }

    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double a = next.u[k], b = next.v[k], c = next.w[k];
        if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
            diag.finite = false;
        }
        lo = std::min({lo, a, b, c});
    }
    diag.min_value = lo;
    next.t = static_cast<double>(cur.k_step + 1) * tau;
    next.k_step = cur.k_step + 1;
    return diag;
}

StateField2D step_2d(const ModelParams& params, const Grid2D& grid, const StateField2D& cur, double tau) {
    StateField2D next;
    step_2d(params, grid, cur, tau, next);
    return next;
}

RunArtifacts run_2d(const ModelParams& params, const Grid2D& grid, const StateField2D& ic,
                    const Run2DOptions& options) {
    validate(params);
    if (!(options.tau > 0.0) || !(options.t_end > 0.0)) {
        throw std::invalid_argument("run_2d: tau and t_end must be positive");
    }
    const std::size_t n = grid.cells();
    if (ic.u.size() != n || ic.v.size() != n || ic.w.size() != n) {
        throw std::invalid_argument("run_2d: initial state does not match the grid");
    }

    RunArtifacts run;
    run.geometry = Geometry::Square;
    run.variant = params.variant;
    run.side = static_cast<std::size_t>(grid.N);
    run.coords.resize(run.side);
    for (int i = 0; i < grid.N; ++i) {
        run.coords[static_cast<std::size_t>(i)] = (i + 0.5) * grid.dx;
    }
    run.cell_measure.assign(n, grid.dx * grid.dx);

    const auto steps = static_cast<std::uint64_t>(std::llround(options.t_end / options.tau));
    const auto probe_stride =
        options.probe_every > 0.0
            ? std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(options.probe_every / options.tau)))
            : 0;
    std::set<std::uint64_t> snap_steps{0, steps};
    for (double t : options.snapshot_times) {
        if (t >= 0.0 && t <= options.t_end) {
            snap_steps.insert(static_cast<std::uint64_t>(std::llround(t / options.tau)));
        }
    }

    std::vector<std::size_t> probe_cells;
    if (grid.N % 2 == 1) {
        probe_cells.push_back(grid.index(grid.N / 2, grid.N / 2));
    } else {
        const int h = grid.N / 2;
        probe_cells = {grid.index(h - 1, h - 1), grid.index(h, h - 1), grid.index(h - 1, h), grid.index(h, h)};
    }

    double mass0 = 0.0;
    auto record = [&](const StateField2D& st, bool force_snapshot) {
        const auto k = st.k_step;
        const double t = st.t;
        const bool fresh = run.snapshots.empty() || run.snapshots.back().t != t;
        if (fresh && (force_snapshot || snap_steps.count(k) != 0)) {
            FieldSnapshot snap{t, st.u, st.v, st.w};
            const double m = total_mass(run, snap);
            if (run.snapshots.empty()) {
                mass0 = m;
            }
            run.mass_drift.emplace_back(t, std::abs(m - mass0) / mass0);
            run.snapshots.push_back(std::move(snap));
        }
        const bool probe_fresh = run.probe.empty() || run.probe.back().t != t;
        if (probe_fresh && (force_snapshot || k == steps || (probe_stride != 0 && k % probe_stride == 0))) {
            ProbeSample p{t, 0.0, 0.0, 0.0};
            const double wgt = 1.0 / static_cast<double>(probe_cells.size());
            for (auto c : probe_cells) {
                p.n0 += wgt * st.u[c];
                p.n1 += wgt * st.v[c];
                p.s += wgt * st.w[c];
            }
            run.probe.push_back(p);
            double peak = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                peak = std::max(peak, st.u[c] + st.v[c]);
            }
            run.max_density.emplace_back(t, peak);
        }
    };

    StateField2D cur = ic;
    cur.k_step = 0;
    cur.t = 0.0;
    StateField2D next;
    record(cur, false);
    bool warned = false;

    for (std::uint64_t k = 0; k < steps; ++k) {
        const auto diag = step_2d(params, grid, cur, options.tau, next);
        if (!warned && options.tau > stable_tau_bound(params, grid, diag.max_abs_b)) {
            run.warnings.push_back(fmt::format(
                "tau = {} exceeds the advisory stability bound {:.6g} at t = {}", options.tau,
                stable_tau_bound(params, grid, diag.max_abs_b), cur.t));
            warned = true;
        }
        if (!diag.finite) {
            run.status = RunStatus::BlowUp;
            run.t_blowup = next.t;
            run.diagnostic = "non-finite values: blow-up";
            record(cur, true);
            break;
        }
        if (diag.min_value < -options.negative_tol) {
            run.status = RunStatus::NegativeDensity;
            run.t_blowup = next.t;
            run.diagnostic = fmt::format("negative density {:.3e} at t = {}", diag.min_value, next.t);
            record(next, true);
            std::swap(cur, next);
            break;
        }
        std::swap(cur, next);
        record(cur, false);
    }
    run.accepted_steps = cur.k_step;
    run.t_final = cur.t;
    return run;
}

} // namespace chemoswitch
