#pragma once

/**
 * @file solver2d.hpp
 * @brief Explicit finite-volume scheme on the square (0, L)^2.
 *
 * One step updates w (attractant), then u (= n0), then v (= n1), every right
 * hand side evaluated from step-k data. Diffusion uses mirror ghost cells,
 * the chemotactic flux of v is upwinded with the b+/b- split, and boundary
 * fluxes vanish. Switching rates are evaluated at rho = u + v, s = w.
 *
 * For the minimal model u carries both secretion and chemotaxis and v stays 0.
 */

#include "chemoswitch/model.hpp"
#include "chemoswitch/run_artifacts.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace chemoswitch {

struct Grid2D {
    double L = 40.0;
    int N = 80;
    double dx = 0.5;

    /// N = round(L / dx) (at least 8), dx = L / N.
    static Grid2D from_spacing(double L, double dx);
    std::size_t cells() const { return static_cast<std::size_t>(N) * static_cast<std::size_t>(N); }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(N) + static_cast<std::size_t>(i);
    }
};

/// Row-major fields, x index fastest: f[j * N + i].
struct StateField2D {
    std::vector<double> u, v, w;
    double t = 0.0;
    std::uint64_t k_step = 0;
};

struct Rng2DSeed {
    std::uint64_t seed = 12345;
    std::string generator_id = "mt19937_64";
};

/// u = nbar, v = 1 - nbar, w = nbar + amplitude * R with R i.i.d. uniform on
/// [0, 1). Only "mt19937_64" is recognised as generator_id. Draws follow the
/// storage order. Minimal model: u = 1, v = 0, w = 1 + amplitude * R.
StateField2D initial_condition_2d(const Grid2D& grid, double nbar, double amplitude, const Rng2DSeed& seed,
                                  ModelVariant variant = ModelVariant::TwoPhenotype);

struct StepDiagnostics {
    double max_abs_b = 0.0;
    double min_value = 0.0;
    bool finite = true;
};

/// Largest tau recommended for the explicit scheme given the current drift.
double stable_tau_bound(const ModelParams& params, const Grid2D& grid, double max_abs_b);

/// One explicit step. `next` is resized as needed; may not alias `cur`.
StepDiagnostics step_2d(const ModelParams& params, const Grid2D& grid, const StateField2D& cur, double tau,
                        StateField2D& next);

/// Convenience overload returning the new state.
StateField2D step_2d(const ModelParams& params, const Grid2D& grid, const StateField2D& cur, double tau);

struct Run2DOptions {
    double tau = 1e-3;
    double t_end = 500.0;
    /// Full-field snapshot times; t = 0 and t_end are always included.
    std::vector<double> snapshot_times;
    double probe_every = 0.1;
    /// Values below -negative_tol abort the run.
    double negative_tol = 1e-12;
};

/// Iterates step_2d for round(t_end / tau) steps. The probe is the mean of the
/// four cells around the domain centre (the single centre cell for odd N).
RunArtifacts run_2d(const ModelParams& params, const Grid2D& grid, const StateField2D& ic,
                    const Run2DOptions& options);

} // namespace chemoswitch
