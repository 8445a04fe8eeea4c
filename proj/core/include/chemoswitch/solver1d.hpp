#pragma once

/**
 * @file solver1d.hpp
 * @brief Method-of-lines solver on (0, L) with zero-flux boundaries.
 *
 * Cell-centred finite volumes: diffusion by central face differences, the
 * chemotactic flux upwinded with b = chi (s_{i+1} - s_i)/dx split into
 * b+ = max(0, b) and b- = max(0, -b). Boundary faces carry no flux, so the
 * discrete total cell number telescopes exactly.
 */

#include "chemoswitch/integrator.hpp"
#include "chemoswitch/model.hpp"
#include "chemoswitch/run_artifacts.hpp"

#include <span>
#include <vector>

namespace chemoswitch {

struct Grid1D {
    double L = 40.0;
    int n_cells = 400;
    double dx = 0.1;

    /// n_cells = round(L / dx) (at least 4); dx is then recomputed as L / n_cells.
    static Grid1D from_spacing(double L, double dx);
    double center(int i) const { return (i + 0.5) * dx; }
    std::vector<double> centers() const;
};

struct StateField1D {
    std::vector<double> n0, n1, s;
    double t = 0.0;
};

/// How the narrow Gaussian attractant bump is transferred to cells. The bump
/// (width ~0.01 for A_focus = 1e4) is narrower than a cell, so point samples at
/// centres adjacent to L/2 are ~1e-13; cell averages keep its integral.
enum class IcSampling { CellAverage, CellCenter };

struct InitialCondition1D {
    double nbar = 0.5;
    double amplitude = 0.01;
    double A_focus = 1e4;
    IcSampling sampling = IcSampling::CellAverage;
};

/// Bump term amplitude * exp(-A_focus (x - L/2)^2) at x, without the base level.
double attractant_bump_1d(const Grid1D& grid, const InitialCondition1D& ic, double x);

/// Uniform state plus the attractant bump. TwoPhenotype: (nbar, 1 - nbar, nbar);
/// MinimalKS: (1, 0, 1).
StateField1D initial_condition_1d(const Grid1D& grid, const InitialCondition1D& ic,
                                  ModelVariant variant = ModelVariant::TwoPhenotype);

struct Rhs1D {
    std::vector<double> dn0, dn1, ds;
};

Rhs1D spatial_rhs_1d(const ModelParams& params, const Grid1D& grid, const StateField1D& state);

/// Packed form used by the integrator: y = [n0 | n1 | s].
void spatial_rhs_1d(const ModelParams& params, const Grid1D& grid, std::span<const double> y,
                    std::span<double> dydt);

/// Discrete total cell number sum (n0 + n1) dx.
double total_cells_1d(const Grid1D& grid, const StateField1D& state);

/// Integrates to controller.t_end. Snapshots every snapshot_every (plus t = 0
/// and the final time); probe at x = L/2 every probe_every. The probe value at
/// L/2 is the linear interpolant between the two nearest cell centres.
RunArtifacts integrate_1d(const ModelParams& params, const Grid1D& grid, const StateField1D& ic,
                          const TimeController& controller);

} // namespace chemoswitch
