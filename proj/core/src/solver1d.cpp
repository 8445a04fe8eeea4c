#include "chemoswitch/solver1d.hpp"

#include "fv1d.hpp"
#include "observe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chemoswitch {

namespace {

detail::LineGeometry line_geometry(const Grid1D& grid) {
    detail::LineGeometry g;
    g.h = grid.dx;
    g.face_weight.assign(static_cast<std::size_t>(grid.n_cells) + 1, 1.0);
    g.inv_cell_weight.assign(static_cast<std::size_t>(grid.n_cells), 1.0 / grid.dx);
    return g;
}

} // namespace

Grid1D Grid1D::from_spacing(double L, double dx) {
    if (!(L > 0.0) || !(dx > 0.0)) {
        throw std::invalid_argument("Grid1D: L and dx must be positive");
    }
    Grid1D g;
    g.L = L;
    g.n_cells = static_cast<int>(std::lround(L / dx));
    if (g.n_cells < 4) {
        throw std::invalid_argument("Grid1D: need at least 4 cells");
    }
    g.dx = L / g.n_cells;
    return g;
}

std::vector<double> Grid1D::centers() const {
    std::vector<double> x(static_cast<std::size_t>(n_cells));
    for (int i = 0; i < n_cells; ++i) {
        x[static_cast<std::size_t>(i)] = center(i);
    }
    return x;
}

double attractant_bump_1d(const Grid1D& grid, const InitialCondition1D& ic, double x) {
    const double d = x - 0.5 * grid.L;
    return ic.amplitude * std::exp(-ic.A_focus * d * d);
}

StateField1D initial_condition_1d(const Grid1D& grid, const InitialCondition1D& ic,
                                  ModelVariant variant) {
    if (variant == ModelVariant::TwoPhenotype && !(ic.nbar > 0.0 && ic.nbar < 1.0)) {
        throw std::invalid_argument("initial_condition_1d: nbar must lie in (0, 1)");
    }
    if (!(ic.A_focus > 0.0)) {
        throw std::invalid_argument("initial_condition_1d: A_focus must be positive");
    }
    const auto n = static_cast<std::size_t>(grid.n_cells);
    const bool minimal = variant == ModelVariant::MinimalKS;
    const double n0_base = minimal ? 1.0 : ic.nbar;
    const double n1_base = minimal ? 0.0 : 1.0 - ic.nbar;

    StateField1D st;
    st.n0.assign(n, n0_base);
    st.n1.assign(n, n1_base);
    st.s.assign(n, n0_base);

    const double root_a = std::sqrt(ic.A_focus);
    const double half_dx = 0.5 * grid.dx;
    for (std::size_t i = 0; i < n; ++i) {
        double bump = 0.0;
        if (ic.sampling == IcSampling::CellCenter) {
            // Offset from L/2 built from integers so mirrored cells match exactly.
            const double d = static_cast<double>(2 * static_cast<long>(i) + 1 - grid.n_cells) * half_dx;
            bump = ic.amplitude * std::exp(-ic.A_focus * d * d);
        } else {
            const double left = static_cast<double>(2 * static_cast<long>(i) - grid.n_cells) * half_dx;
            const double right = static_cast<double>(2 * static_cast<long>(i) + 2 - grid.n_cells) * half_dx;
            // Mean of the Gaussian over the cell via erf.
            const double integral = 0.5 * std::sqrt(std::numbers::pi) / root_a *
                                    (std::erf(root_a * right) - std::erf(root_a * left));
            bump = ic.amplitude * integral / grid.dx;
        }
        st.s[i] += bump;
    }
    return st;
}

void spatial_rhs_1d(const ModelParams& params, const Grid1D& grid, std::span<const double> y,
                    std::span<double> dydt) {
    const auto g = line_geometry(grid);
    std::vector<double> flux;
    detail::model_rhs(params, g, y, dydt, flux);
}

Rhs1D spatial_rhs_1d(const ModelParams& params, const Grid1D& grid, const StateField1D& state) {
    const auto n = static_cast<std::size_t>(grid.n_cells);
    std::vector<double> y = detail::pack(state.n0, state.n1, state.s);
    std::vector<double> dydt(3 * n);
    spatial_rhs_1d(params, grid, y, dydt);
    Rhs1D out;
    out.dn0.assign(dydt.begin(), dydt.begin() + static_cast<std::ptrdiff_t>(n));
    out.dn1.assign(dydt.begin() + static_cast<std::ptrdiff_t>(n), dydt.begin() + static_cast<std::ptrdiff_t>(2 * n));
    out.ds.assign(dydt.begin() + static_cast<std::ptrdiff_t>(2 * n), dydt.end());
    return out;
}

double total_cells_1d(const Grid1D& grid, const StateField1D& state) {
    double sum = 0.0;
    for (std::size_t i = 0; i < state.n0.size(); ++i) {
        sum += state.n0[i] + state.n1[i];
    }
    return sum * grid.dx;
}

RunArtifacts integrate_1d(const ModelParams& params, const Grid1D& grid, const StateField1D& ic,
                          const TimeController& controller) {
    validate(params);
    controller.validate();
    const auto n = static_cast<std::size_t>(grid.n_cells);
    if (ic.n0.size() != n || ic.n1.size() != n || ic.s.size() != n) {
        throw std::invalid_argument("integrate_1d: initial state does not match the grid");
    }

    RunArtifacts run;
    run.geometry = Geometry::Line;
    run.variant = params.variant;
    run.coords = grid.centers();
    run.cell_measure.assign(n, grid.dx);
    run.side = n;

    // Probe at x = L/2: linear interpolation between neighbouring centres.
    const double xi = 0.5 * grid.L / grid.dx - 0.5;
    const auto left = static_cast<std::size_t>(std::clamp(std::floor(xi), 0.0, static_cast<double>(n - 2)));
    const double w_right = xi - static_cast<double>(left);
    detail::ProbePoint probe{{left, left + 1}, {1.0 - w_right, w_right}};

    const auto geom = line_geometry(grid);
    std::vector<double> flux;
    RhsFunction rhs = [&](double, std::span<const double> y, std::span<double> dydt) {
        detail::model_rhs(params, geom, y, dydt, flux);
    };

    std::vector<double> y = detail::pack(ic.n0, ic.n1, ic.s);
    detail::Recorder recorder(run, controller, n, probe);
    const auto schedule =
        output_schedule(ic.t, controller.t_end, {controller.snapshot_every, controller.probe_every});
    const auto result = integrate_adaptive(rhs, y, ic.t, controller, schedule,
                                           [&](double t, std::span<const double> state) {
                                               return recorder.observe(t, state);
                                           });
    recorder.finish(result, y);
    return run;
}

} // namespace chemoswitch
