#pragma once

/**
 * @file stability.hpp
 * @brief Linear stability of the positive uniform steady state.
 *
 * Perturbations proportional to exp(lambda t) cos(k x) with k = m pi / L grow
 * at the roots of lambda^3 + A(k^2) lambda^2 + B(k^2) lambda + C(k^2). The
 * coefficients depend on the kinetic Jacobian entries H0 = dG/dn0,
 * H1 = dG/dn1 and Hs = dG/ds at the steady state.
 */

#include "chemoswitch/model.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace chemoswitch {

struct SteadyState {
    double n0_star = 0.5;
    double n1_star = 0.5;
    double s_star = 0.5;
};

struct HValues {
    double H0 = 0.0;
    double H1 = 0.0;
    double Hs = 0.0;
};

struct CubicCoeffs {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
};

using Roots3 = std::array<std::complex<double>, 3>;

struct DispersionPoint {
    int m = 0;
    double k_sq = 0.0;
    CubicCoeffs coeffs{};
    Roots3 eigenvalues{};

    double max_real() const { return eigenvalues[0].real(); }
    double max_abs_imag() const;
};

enum class ThresholdBranch { H1Positive, H1Negative, None };

struct ChiThreshold {
    std::optional<double> value;
    ThresholdBranch branch = ThresholdBranch::None;
    /// Set when H1 - H0 - Hs < 0: the steady state is already unstable to
    /// homogeneous perturbations and no chi threshold applies.
    bool homogeneous_unstable = false;
};

struct StabilityReport {
    SteadyState steady{};
    HValues h{};
    bool homogeneous_stable = true;
    /// H1 - H0 - Hs == 0 exactly (neutral mode at k = 0 plus a second zero root).
    bool homogeneous_marginal = false;
    std::optional<double> chi_threshold;
    ThresholdBranch threshold_branch = ThresholdBranch::None;
    std::vector<std::pair<int, double>> min_lengths; ///< (m, L_min)
    std::vector<DispersionPoint> dispersion;
    std::vector<int> unstable_modes;
    bool predicts_oscillation = false;
};

const char* to_string(ThresholdBranch b);

/// Uniform steady state. NoSwitching returns (n0_mean, 1 - n0_mean, n0_mean);
/// switching cases solve n = mu10(1,n) / (mu01(1,n) + mu10(1,n)) by bisection.
/// Throws std::logic_error if the switching root is not 0.5 (the closed forms
/// below assume it).
SteadyState steady_state(const SwitchingSpec& spec, double n0_mean = 0.5);

/// Closed-form H-values with steady state 0.5; NoSwitching gives zeros.
HValues h_values_analytic(const SwitchingSpec& spec);

/// Central finite differences of G at the steady state, with rho = n0 + n1
/// following the perturbed n0, n1. h_step must lie in [1e-8, 1e-3].
HValues h_values_numeric(const SwitchingSpec& spec, double h_step = 1e-6);

/// A, B, C of the dispersion cubic for squared wavenumber k_sq; nbar is the
/// steady-state secreting fraction (0.5 whenever switching is active).
CubicCoeffs dispersion_coeffs(const ModelParams& params, const HValues& h, double k_sq,
                              double nbar = 0.5);

/// Roots of lambda^3 + A lambda^2 + B lambda + C sorted by descending real part.
/// Complex roots are returned as exact conjugate pairs.
Roots3 eigenvalues(const CubicCoeffs& c);

/// H1 - H0 - Hs >= 0.
bool homogeneous_stability(const HValues& h);
double homogeneous_margin(const HValues& h);

/// Smallest chi for which aggregation is predicted, on the branch picked by the
/// sign of H1. Returns nullopt for H1 == 0 or a homogeneously unstable state.
ChiThreshold chi_threshold(const SwitchingSpec& spec, double D);

/// Same threshold from the per-case closed forms (cross-check only).
std::optional<double> chi_threshold_closed_form(const SwitchingSpec& spec, double D);

/// Upper end of the window 0 < k^2 < k2_max where C(k^2) < 0. nullopt when the
/// window is empty.
std::optional<double> unstable_k2_upper(const SwitchingSpec& spec, double D, double chi);

/// Minimum domain length for mode m to be unstable (H1 > 0 branch).
std::optional<double> min_domain_length(const SwitchingSpec& spec, double D, double chi, int m);

/// Highest mode index scanned for a domain of length L.
int mode_scan_limit(const ModelParams& params, const HValues& h, double L);

/// Dispersion points for m = 1..mode_scan_limit.
std::vector<DispersionPoint> dispersion_scan(const ModelParams& params, double L);

/// Modes with max Re(lambda) > 0 (strict).
std::vector<int> unstable_mode_set(const ModelParams& params, const HValues& h, double L);

/// Smallest chi with some k^2 in (0, k2_max] giving Re(lambda) > 0, found by
/// bisection on chi over a continuous k^2 sweep. Independent of the branch
/// formulas; used to check them.
std::optional<double> chi_threshold_scan(const SwitchingSpec& spec, double D, double chi_max = 1e4,
                                         double k2_max = 50.0);

struct EigenMapCell {
    double chi = 0.0;
    double mu = 0.0;
    double max_real = 0.0;
    double max_abs_imag = 0.0;
};

struct EigenMapRequest {
    SwitchingSpec spec_template{};
    double D = 1.0;
    double L = 40.0;
    double chi_min = 1.0, chi_max = 20.0;
    double mu_min = 0.01, mu_max = 10.0;
    std::size_t chi_points = 20;
    std::size_t mu_points = 20;
    bool mu_log_spacing = true;
    unsigned workers = 1;
};

/// Row-major (mu index outer, chi index inner) grid of extrema over modes.
std::vector<EigenMapCell> eigenvalue_map(const EigenMapRequest& request);

StabilityReport stability_report(const ModelParams& params, double L, double n0_mean = 0.5,
                                 int min_length_modes = 5);

} // namespace chemoswitch
