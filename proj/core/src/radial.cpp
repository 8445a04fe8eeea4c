#include "chemoswitch/radial.hpp"

#include "fv1d.hpp"
#include "observe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chemoswitch {

namespace {

detail::LineGeometry radial_geometry(const RadialGrid& grid) {
    const auto n = static_cast<std::size_t>(grid.n_cells);
    detail::LineGeometry g;
    g.h = grid.dr;
    g.face_weight.resize(n + 1);
    g.inv_cell_weight.resize(n);
    for (std::size_t f = 0; f <= n; ++f) {
        g.face_weight[f] = static_cast<double>(f) * grid.dr;
    }
    for (std::size_t i = 0; i < n; ++i) {
        g.inv_cell_weight[i] = 1.0 / (grid.center(static_cast<int>(i)) * grid.dr);
    }
    return g;
}

} // namespace

RadialGrid RadialGrid::from_spacing(double L_r, double dr) {
    if (!(L_r > 0.0) || !(dr > 0.0)) {
        throw std::invalid_argument("RadialGrid: L_r and dr must be positive");
    }
    RadialGrid g;
    g.L_r = L_r;
    g.n_cells = static_cast<int>(std::lround(L_r / dr));
    if (g.n_cells < 4) {
        throw std::invalid_argument("RadialGrid: need at least 4 cells");
    }
    g.dr = L_r / g.n_cells;
    return g;
}

double RadialGrid::volume(int i) const { return 2.0 * std::numbers::pi * center(i) * dr; }

std::vector<double> radial_initial_state(const RadialGrid& grid, const RadialOptions& options,
                                         ModelVariant variant) {
    const bool minimal = variant == ModelVariant::MinimalKS;
    if (!minimal && !(options.nbar > 0.0 && options.nbar < 1.0)) {
        throw std::invalid_argument("radial initial state: nbar must lie in (0, 1)");
    }
    const auto n = static_cast<std::size_t>(grid.n_cells);
    const double base0 = minimal ? 1.0 : options.nbar;
    const double base1 = minimal ? 0.0 : 1.0 - options.nbar;
    std::vector<double> y(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid.center(static_cast<int>(i));
        y[i] = base0;
        y[n + i] = base1;
        y[2 * n + i] = base0 + options.amplitude * std::exp(-r * r);
    }
    return y;
}

void radial_rhs(const ModelParams& params, const RadialGrid& grid, std::span<const double> y,
                std::span<double> dydt) {
    const auto g = radial_geometry(grid);
    std::vector<double> flux;
    detail::model_rhs(params, g, y, dydt, flux);
}

double radial_blowup_threshold(const RadialGrid& grid, const RadialOptions& options) {
    // Both variants start from total density 1.
    const double total = std::numbers::pi * grid.L_r * grid.L_r;
    const double cap = 0.5 * total / grid.volume(0);
    return std::min(options.blowup_factor, cap);
}

RunArtifacts run_radial(const ModelParams& params, const RadialGrid& grid, const TimeController& controller,
                        const RadialOptions& options) {
    validate(params);
    controller.validate();
    const auto n = static_cast<std::size_t>(grid.n_cells);

    RunArtifacts run;
    run.geometry = Geometry::Radial;
    run.variant = params.variant;
    run.side = n;
    run.coords.resize(n);
    run.cell_measure.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        run.coords[i] = grid.center(static_cast<int>(i));
        run.cell_measure[i] = grid.volume(static_cast<int>(i));
    }

    detail::StopRules rules;
    rules.blowup_threshold = radial_blowup_threshold(grid, options);
    rules.converge_window = options.converge_window;
    rules.converge_tol = options.converge_tol;
    rules.extra_snapshot_times = options.snapshot_times;

    // Probe at the innermost cell.
    detail::ProbePoint probe{{0, 0}, {1.0, 0.0}};
    detail::Recorder recorder(run, controller, n, probe, rules);

    const auto geom = radial_geometry(grid);
    std::vector<double> flux;
    RhsFunction rhs = [&](double, std::span<const double> y, std::span<double> dydt) {
        detail::model_rhs(params, geom, y, dydt, flux);
    };

    auto schedule = output_schedule(0.0, controller.t_end, {controller.snapshot_every, controller.probe_every});
    for (double t : options.snapshot_times) {
        if (t > 0.0 && t < controller.t_end) {
            schedule.push_back(t);
        }
    }
    std::sort(schedule.begin(), schedule.end());
    schedule.erase(std::unique(schedule.begin(), schedule.end(),
                               [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, b); }),
                   schedule.end());

    std::vector<double> y = radial_initial_state(grid, options, params.variant);
    const auto result = integrate_adaptive(rhs, y, 0.0, controller, schedule,
                                           [&](double t, std::span<const double> state) {
                                               return recorder.observe(t, state);
                                           });
    recorder.finish(result, y);
    return run;
}

} // namespace chemoswitch
