#pragma once

/**
 * @file radial.hpp
 * @brief Radially symmetric solver on (0, L_r) in two dimensions.
 *
 * Cell-centred grid, r_i = (i - 1/2) dr, so no unknown sits at the origin.
 * Face fluxes are weighted by the face radius; the face at r = 0 has radius 0
 * and therefore carries no flux. Volume-weighted mass telescopes exactly.
 */

#include "chemoswitch/integrator.hpp"
#include "chemoswitch/model.hpp"
#include "chemoswitch/run_artifacts.hpp"

#include <span>
#include <vector>

namespace chemoswitch {

struct RadialGrid {
    double L_r = 10.0;
    int n_cells = 2000;
    double dr = 5e-3;

    static RadialGrid from_spacing(double L_r, double dr);
    double center(int i) const { return (i + 0.5) * dr; }
    /// 2 pi r_i dr.
    double volume(int i) const;
};

struct RadialOptions {
    double nbar = 0.5;
    double amplitude = 0.01;
    /// Blow-up when max(n0 + n1) exceeds this multiple of the uniform density,
    /// capped at half the largest density the innermost cell can hold.
    double blowup_factor = 1e6;
    double converge_window = 100.0;
    double converge_tol = 1e-6;
    std::vector<double> snapshot_times{1.0, 10.0, 100.0, 1000.0};
};

/// Uniform state with s = base + amplitude * exp(-r^2) at cell centres.
std::vector<double> radial_initial_state(const RadialGrid& grid, const RadialOptions& options,
                                         ModelVariant variant);

/// Packed right-hand side on y = [n0 | n1 | s].
void radial_rhs(const ModelParams& params, const RadialGrid& grid, std::span<const double> y,
                std::span<double> dydt);

/// Effective blow-up threshold for a grid (see RadialOptions::blowup_factor).
double radial_blowup_threshold(const RadialGrid& grid, const RadialOptions& options);

/// Integrates to controller.t_end or until stationary. A step-size underflow is
/// reported as RunStatus::Stiffness with t_blowup set (suspected blow-up).
RunArtifacts run_radial(const ModelParams& params, const RadialGrid& grid, const TimeController& controller,
                        const RadialOptions& options = {});

} // namespace chemoswitch
