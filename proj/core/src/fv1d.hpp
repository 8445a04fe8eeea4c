#pragma once

// Shared finite-volume kernel for the interval and radial solvers.

#include "chemoswitch/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace chemoswitch::detail {

/// Face weights (1 on an interval, face radius for radial cells) and inverse
/// cell weights (1/dx, or 1/(r_i dr)). Face 0 and face n are boundaries.
struct LineGeometry {
    double h = 1.0;
    std::vector<double> face_weight;
    std::vector<double> inv_cell_weight;

    std::size_t cells() const { return inv_cell_weight.size(); }
};

/// out_i = divergence of F = diff du/dx - (upwinded) chi u ds/dx, zero flux at
/// both boundaries. The flux is assembled as diffusive + advective so that
/// mirrored data gives exactly negated fluxes.
inline void transport(const LineGeometry& g, std::span<const double> u, double diff, double chi,
                      std::span<const double> s, std::span<double> out, std::vector<double>& flux) {
    const std::size_t n = g.cells();
    flux.assign(n + 1, 0.0);
    const double inv_h = 1.0 / g.h;
    for (std::size_t f = 1; f < n; ++f) {
        double F = diff * (u[f] - u[f - 1]) * inv_h;
        if (chi != 0.0) {
            const double b = chi * (s[f] - s[f - 1]) * inv_h;
            const double bp = b > 0.0 ? b : 0.0;
            const double bm = b < 0.0 ? -b : 0.0;
            F = F + (bm * u[f] - bp * u[f - 1]);
        }
        flux[f] = g.face_weight[f] * F;
    }
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = (flux[i + 1] - flux[i]) * g.inv_cell_weight[i];
    }
}

/// Right-hand side on the packed state [n0 | n1 | s].
inline void model_rhs(const ModelParams& params, const LineGeometry& g, std::span<const double> y,
                      std::span<double> dydt, std::vector<double>& flux) {
    const std::size_t n = g.cells();
    const auto n0 = y.subspan(0, n);
    const auto n1 = y.subspan(n, n);
    const auto s = y.subspan(2 * n, n);
    auto d0 = dydt.subspan(0, n);
    auto d1 = dydt.subspan(n, n);
    auto ds = dydt.subspan(2 * n, n);

    if (params.variant == ModelVariant::MinimalKS) {
        transport(g, n0, params.D, params.chi, s, d0, flux);
        std::fill(d1.begin(), d1.end(), 0.0);
    } else {
        transport(g, n0, params.D, 0.0, s, d0, flux);
        transport(g, n1, params.D, params.chi, s, d1, flux);
    }
    transport(g, s, 1.0, 0.0, s, ds, flux);

    for (std::size_t i = 0; i < n; ++i) {
        const auto r = rhs_reaction(params, n0[i], n1[i], s[i]);
        d0[i] += r.dn0;
        d1[i] += r.dn1;
        ds[i] += r.ds;
    }
}

} // namespace chemoswitch::detail
