#include "chemoswitch/stability.hpp"

#include "chemoswitch/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace chemoswitch {

namespace {

constexpr double kPi = std::numbers::pi;
// Steady state of every switching case; the closed forms are written for it.
constexpr double kSwitchingNbar = 0.5;
// k^2 sweep limit when no analytic window is available is kK2SweepScale / D.
constexpr double kK2SweepScale = 50.0;
constexpr int kModeMargin = 5;

std::complex<double> eval_cubic(const CubicCoeffs& c, std::complex<double> z) {
    return ((z + c.A) * z + c.B) * z + c.C;
}

std::complex<double> eval_cubic_derivative(const CubicCoeffs& c, std::complex<double> z) {
    return (3.0 * z + 2.0 * c.A) * z + c.B;
}

double real_cubic_root(const CubicCoeffs& c) {
    if (c.C == 0.0) {
        return 0.0;
    }
    auto p = [&](double x) { return ((x + c.A) * x + c.B) * x + c.C; };
    auto dp = [&](double x) { return (3.0 * x + 2.0 * c.A) * x + c.B; };

    // Cauchy bound brackets every real root: p(-R) < 0 < p(R).
    const double bound = 1.0 + std::max({std::abs(c.A), std::abs(c.B), std::abs(c.C)});
    double lo = -bound;
    double hi = bound;
    double x = 0.0;
    double fx = p(x);
    if (fx == 0.0) {
        return x;
    }
    if (fx < 0.0) {
        lo = x;
    } else {
        hi = x;
    }
    // Newton with bisection fallback; stop when the bracket stops shrinking.
    for (int iter = 0; iter < 400; ++iter) {
        const double d = dp(x);
        double next = (d != 0.0) ? x - fx / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (next == x) {
            break;
        }
        x = next;
        fx = p(x);
        if (fx == 0.0) {
            break;
        }
        if (fx < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
            break;
        }
    }
    return x;
}

std::complex<double> polish(const CubicCoeffs& c, std::complex<double> z) {
    for (int iter = 0; iter < 3; ++iter) {
        const auto f = eval_cubic(c, z);
        const auto d = eval_cubic_derivative(c, z);
        if (std::abs(d) == 0.0) {
            break;
        }
        const auto candidate = z - f / d;
        if (!(std::abs(eval_cubic(c, candidate)) < std::abs(f))) {
            break;
        }
        z = candidate;
    }
    return z;
}

ModelParams with_chi(const SwitchingSpec& spec, double D, double chi) {
    ModelParams p;
    p.D = D;
    p.chi = chi;
    p.switching = spec;
    return p;
}

double max_growth_over_k2(const ModelParams& params, const HValues& h, double k2_max) {
    // Log-spaced sweep over (0, k2_max], then golden-section refinement around
    // the best sample.
    constexpr int samples = 600;
    const double lo_exp = -8.0;
    const double hi_exp = std::log10(k2_max);
    auto growth = [&](double k2) {
        return eigenvalues(dispersion_coeffs(params, h, k2)).front().real();
    };
    double best = -std::numeric_limits<double>::infinity();
    int best_i = 0;
    std::vector<double> grid(samples);
    for (int i = 0; i < samples; ++i) {
        grid[i] = std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / (samples - 1));
        const double g = growth(grid[i]);
        if (g > best) {
            best = g;
            best_i = i;
        }
    }
    double a = grid[std::max(0, best_i - 1)];
    double b = grid[std::min(samples - 1, best_i + 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = growth(x1);
    double f2 = growth(x2);
    for (int iter = 0; iter < 60; ++iter) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = growth(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = growth(x2);
        }
    }
    return std::max({best, f1, f2});
}

} // namespace

double DispersionPoint::max_abs_imag() const {
    double out = 0.0;
    for (const auto& z : eigenvalues) {
        out = std::max(out, std::abs(z.imag()));
    }
    return out;
}

const char* to_string(ThresholdBranch b) {
    switch (b) {
    case ThresholdBranch::H1Positive: return "H1Positive";
    case ThresholdBranch::H1Negative: return "H1Negative";
    case ThresholdBranch::None: return "None";
    }
    return "None";
}

SteadyState steady_state(const SwitchingSpec& spec, double n0_mean) {
    if (spec.kind == SwitchingCase::NoSwitching) {
        if (!(n0_mean > 0.0 && n0_mean < 1.0)) {
            throw std::invalid_argument("steady_state: n0_mean must lie in (0, 1)");
        }
        return {n0_mean, 1.0 - n0_mean, n0_mean};
    }
    validate(spec);

    auto residual = [&](double n) {
        const auto r = switching_rates(spec, 1.0, n);
        return n - r.mu10 / (r.mu01 + r.mu10);
    };
    // Steep C2 switching (q > 4 nbar) has further uniform roots besides the
    // symmetric one; scan for every sign change, bisect each and keep the
    // root nearest the symmetric state.
    constexpr int kScan = 997;
    constexpr double kLo = 1e-3;
    constexpr double kHi = 1.0 - 1e-3;
    double root = -1.0;
    double x0 = kLo;
    double f0 = residual(x0);
    for (int k = 1; k <= kScan; ++k) {
        const double x1 = kLo + (kHi - kLo) * k / kScan;
        const double f1 = residual(x1);
        double candidate = -1.0;
        if (f0 == 0.0) {
            candidate = x0;
        } else if (f0 * f1 < 0.0) {
            double lo = x0, hi = x1;
            for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
                const double mid = 0.5 * (lo + hi);
                const double f = residual(mid);
                if (f == 0.0) {
                    lo = hi = mid;
                    break;
                }
                ((f > 0.0) == (f0 > 0.0) ? lo : hi) = mid;
            }
            candidate = 0.5 * (lo + hi);
        }
        if (candidate >= 0.0 && (root < 0.0 || std::abs(candidate - kSwitchingNbar) < std::abs(root - kSwitchingNbar))) {
            root = candidate;
        }
        x0 = x1;
        f0 = f1;
    }
    if (std::abs(root - kSwitchingNbar) > 1e-10) {
        throw std::logic_error("steady_state: switching steady state is not 0.5; check nbar_ref");
    }
    return {root, 1.0 - root, root};
}

HValues h_values_analytic(const SwitchingSpec& spec) {
    const double mu = spec.mu;
    const double q = spec.q;
    const double nbar = spec.nbar_ref;
    switch (spec.kind) {
    case SwitchingCase::NoSwitching: return {0.0, 0.0, 0.0};
    case SwitchingCase::A: return {-mu, mu, 0.0};
    case SwitchingCase::B1: return {-mu * (2.0 + q) / 4.0, mu * (2.0 - q) / 4.0, 0.0};
    case SwitchingCase::B2: return {mu * (q - 2.0) / 4.0, mu * (2.0 + q) / 4.0, 0.0};
    case SwitchingCase::C1: return {-mu / 2.0, mu / 2.0, -mu * q / (4.0 * nbar)};
    case SwitchingCase::C2: return {-mu / 2.0, mu / 2.0, mu * q / (4.0 * nbar)};
    }
    return {};
}

HValues h_values_numeric(const SwitchingSpec& spec, double h_step) {
    if (!(h_step >= 1e-8 && h_step <= 1e-3)) {
        throw std::invalid_argument("h_values_numeric: h_step must lie in [1e-8, 1e-3]");
    }
    const auto ss = steady_state(spec, 0.5);
    auto G = [&](double n0, double n1, double s) { return kinetic_G(spec, n0, n1, n0 + n1, s); };
    const double n0 = ss.n0_star;
    const double n1 = ss.n1_star;
    const double s = ss.s_star;
    const double two_h = 2.0 * h_step;
    return {
        (G(n0 + h_step, n1, s) - G(n0 - h_step, n1, s)) / two_h,
        (G(n0, n1 + h_step, s) - G(n0, n1 - h_step, s)) / two_h,
        (G(n0, n1, s + h_step) - G(n0, n1, s - h_step)) / two_h,
    };
}

CubicCoeffs dispersion_coeffs(const ModelParams& params, const HValues& h, double k_sq,
                              double nbar) {
    const double D = params.D;
    const double k2 = k_sq;
    const double k4 = k2 * k2;
    const double k6 = k4 * k2;
    const double diff = h.H1 - h.H0;
    const double margin = h.H1 - h.H0 - h.Hs;
    CubicCoeffs c;
    c.A = (2.0 * D + 1.0) * k2 + (diff + 1.0);
    c.B = D * (D + 2.0) * k4 + ((diff + 2.0) * D + diff) * k2 + margin;
    c.C = D * D * k6 + (D * diff + D * D) * k4 +
          (D * margin - h.H1 * params.chi * (1.0 - nbar)) * k2;
    return c;
}

Roots3 eigenvalues(const CubicCoeffs& c) {
    using cplx = std::complex<double>;
    const double r = real_cubic_root(c);

    // Deflate: lambda^3 + A lambda^2 + B lambda + C = (lambda - r)(lambda^2 + p lambda + q).
    const double p = c.A + r;
    const double q = c.B + r * p;
    const double disc = p * p - 4.0 * q;

    Roots3 roots;
    roots[0] = cplx(r, 0.0);
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double t = -0.5 * (p + std::copysign(sq, p));
        double r1 = t;
        double r2 = (t != 0.0) ? q / t : 0.0;
        roots[1] = cplx(r1, 0.0);
        roots[2] = cplx(r2, 0.0);
        roots[1] = cplx(polish(c, roots[1]).real(), 0.0);
        roots[2] = cplx(polish(c, roots[2]).real(), 0.0);
    } else {
        cplx z(-0.5 * p, 0.5 * std::sqrt(-disc));
        z = polish(c, z);
        const double im = std::abs(z.imag());
        roots[1] = cplx(z.real(), im);
        roots[2] = cplx(z.real(), -im);
    }
    std::sort(roots.begin(), roots.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) {
            return a.real() > b.real();
        }
        return a.imag() > b.imag();
    });
    return roots;
}

double homogeneous_margin(const HValues& h) { return h.H1 - h.H0 - h.Hs; }

bool homogeneous_stability(const HValues& h) { return homogeneous_margin(h) >= 0.0; }

ChiThreshold chi_threshold(const SwitchingSpec& spec, double D) {
    ChiThreshold out;
    if (spec.kind == SwitchingCase::NoSwitching) {
        return out;
    }
    const auto h = h_values_analytic(spec);
    const double margin = homogeneous_margin(h);
    if (margin < 0.0) {
        out.homogeneous_unstable = true;
        return out;
    }
    const double diff = h.H1 - h.H0;
    const double one_m_nbar = 1.0 - kSwitchingNbar;
    if (h.H1 > 0.0) {
        out.branch = ThresholdBranch::H1Positive;
        out.value = D * margin / (h.H1 * one_m_nbar);
    } else if (h.H1 < 0.0) {
        out.branch = ThresholdBranch::H1Negative;
        const double numer = (margin + diff * diff) * (D + 1.0) + (3.0 * D + 1.0) * diff + 2.0 * D;
        out.value = numer / (-h.H1 * one_m_nbar);
    }
    return out;
}

std::optional<double> chi_threshold_closed_form(const SwitchingSpec& spec, double D) {
    const double n = spec.nbar_ref;
    const double mu = spec.mu;
    const double q = spec.q;
    switch (spec.kind) {
    case SwitchingCase::NoSwitching: return std::nullopt;
    case SwitchingCase::A: return 2.0 * D / (1.0 - n);
    case SwitchingCase::B1:
        if (q < 2.0) {
            return 4.0 * D / ((2.0 - q) * (1.0 - n));
        }
        if (q > 2.0) {
            return 4.0 * (mu * mu * (D + 1.0) + 4.0 * mu * D + 2.0 * mu + 2.0 * D) /
                   (mu * (q - 2.0) * (1.0 - n));
        }
        return std::nullopt;
    case SwitchingCase::B2: return 4.0 * D / ((q + 2.0) * (1.0 - n));
    case SwitchingCase::C1: return D * (4.0 * n + q) / (2.0 * n * (1.0 - n));
    case SwitchingCase::C2:
        if (q <= 4.0 * n) {
            return D * (4.0 * n - q) / (2.0 * n * (1.0 - n));
        }
        return std::nullopt;
    }
    return std::nullopt;
}

std::optional<double> unstable_k2_upper(const SwitchingSpec& spec, double D, double chi) {
    const auto h = h_values_analytic(spec);
    const double diff = h.H1 - h.H0;
    const double radicand = (diff - D) * (diff - D) +
                            4.0 * h.H1 * chi * (1.0 - kSwitchingNbar) + 4.0 * h.Hs * D;
    if (radicand <= 0.0) {
        return std::nullopt;
    }
    const double numer = -(diff + D) + std::sqrt(radicand);
    if (!(numer > 0.0)) {
        return std::nullopt;
    }
    return numer / (2.0 * D);
}

std::optional<double> min_domain_length(const SwitchingSpec& spec, double D, double chi, int m) {
    if (m < 1) {
        throw std::invalid_argument("min_domain_length: m must be positive");
    }
    const auto k2 = unstable_k2_upper(spec, D, chi);
    if (!k2) {
        return std::nullopt;
    }
    // L > sqrt(2 D m^2 pi^2 / numer) with numer = 2 D k2_upper.
    return std::sqrt(2.0 * D * m * m * kPi * kPi / (2.0 * D * *k2));
}

int mode_scan_limit(const ModelParams& params, const HValues& h, double L) {
    if (!(L > 0.0)) {
        throw std::invalid_argument("domain length must be positive");
    }
    if (h.H1 > 0.0) {
        const auto k2 = unstable_k2_upper(params.switching, params.D, params.chi);
        const int m_max = k2 ? static_cast<int>(std::floor(L * std::sqrt(*k2) / kPi)) : 0;
        return m_max + kModeMargin;
    }
    const double k2_sweep = kK2SweepScale / params.D;
    return std::max(1, static_cast<int>(std::ceil(L * std::sqrt(k2_sweep) / kPi)));
}

std::vector<DispersionPoint> dispersion_scan(const ModelParams& params, double L) {
    const auto h = h_values_analytic(params.switching);
    // Without switching H1 = 0, so the (1 - nbar) factor drops out of C.
    const double nbar = kSwitchingNbar;
    const int m_limit = mode_scan_limit(params, h, L);
    std::vector<DispersionPoint> out;
    out.reserve(static_cast<std::size_t>(m_limit));
    for (int m = 1; m <= m_limit; ++m) {
        DispersionPoint pt;
        pt.m = m;
        const double k = m * kPi / L;
        pt.k_sq = k * k;
        pt.coeffs = dispersion_coeffs(params, h, pt.k_sq, nbar);
        pt.eigenvalues = eigenvalues(pt.coeffs);
        out.push_back(pt);
    }
    return out;
}

std::vector<int> unstable_mode_set(const ModelParams& params, const HValues& h, double L) {
    const int m_limit = mode_scan_limit(params, h, L);
    std::vector<int> out;
    for (int m = 1; m <= m_limit; ++m) {
        const double k = m * kPi / L;
        const auto roots = eigenvalues(dispersion_coeffs(params, h, k * k));
        if (roots.front().real() > 0.0) {
            out.push_back(m);
        }
    }
    return out;
}

std::optional<double> chi_threshold_scan(const SwitchingSpec& spec, double D, double chi_max,
                                         double k2_max) {
    const auto h = h_values_analytic(spec);
    if (!homogeneous_stability(h)) {
        return std::nullopt;
    }
    auto unstable = [&](double chi) {
        return max_growth_over_k2(with_chi(spec, D, chi), h, k2_max) > 0.0;
    };
    if (!unstable(chi_max)) {
        return std::nullopt;
    }
    double lo = 0.0;
    double hi = chi_max;
    if (unstable(lo)) {
        return 0.0;
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (unstable(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

std::vector<EigenMapCell> eigenvalue_map(const EigenMapRequest& req) {
    if (req.chi_points == 0 || req.mu_points == 0) {
        throw std::invalid_argument("eigenvalue_map: grid must have at least one point per axis");
    }
    if (!(req.chi_max >= req.chi_min) || !(req.mu_max >= req.mu_min) || !(req.mu_min > 0.0)) {
        throw std::invalid_argument("eigenvalue_map: invalid parameter ranges");
    }
    auto axis = [](double lo, double hi, std::size_t n, std::size_t i, bool log_spacing) {
        if (n == 1) {
            return lo;
        }
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        if (log_spacing) {
            return std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
        }
        return lo + t * (hi - lo);
    };

    std::vector<EigenMapCell> cells(req.chi_points * req.mu_points);
    parallel_for(cells.size(), req.workers, [&](std::size_t idx) {
        const std::size_t i_mu = idx / req.chi_points;
        const std::size_t i_chi = idx % req.chi_points;
        EigenMapCell cell;
        cell.chi = axis(req.chi_min, req.chi_max, req.chi_points, i_chi, false);
        cell.mu = axis(req.mu_min, req.mu_max, req.mu_points, i_mu, req.mu_log_spacing);

        ModelParams params;
        params.D = req.D;
        params.chi = cell.chi;
        params.switching = req.spec_template;
        params.switching.mu = cell.mu;
        const auto h = h_values_analytic(params.switching);
        const int m_limit = mode_scan_limit(params, h, req.L);
        cell.max_real = -std::numeric_limits<double>::infinity();
        for (int m = 1; m <= m_limit; ++m) {
            const double k = m * kPi / req.L;
            const auto roots = eigenvalues(dispersion_coeffs(params, h, k * k));
            cell.max_real = std::max(cell.max_real, roots.front().real());
            for (const auto& z : roots) {
                cell.max_abs_imag = std::max(cell.max_abs_imag, std::abs(z.imag()));
            }
        }
        cells[idx] = cell;
    });
    return cells;
}

StabilityReport stability_report(const ModelParams& params, double L, double n0_mean,
                                 int min_length_modes) {
    if (params.variant != ModelVariant::TwoPhenotype) {
        throw std::invalid_argument("stability analysis is defined for the two-phenotype model");
    }
    validate(params);
    StabilityReport rep;
    rep.steady = steady_state(params.switching, n0_mean);
    rep.h = h_values_analytic(params.switching);
    rep.homogeneous_stable = homogeneous_stability(rep.h);
    rep.homogeneous_marginal = params.switching.kind != SwitchingCase::NoSwitching &&
                               homogeneous_margin(rep.h) == 0.0;

    const auto thr = chi_threshold(params.switching, params.D);
    rep.chi_threshold = thr.value;
    rep.threshold_branch = thr.branch;

    if (rep.h.H1 > 0.0) {
        for (int m = 1; m <= min_length_modes; ++m) {
            if (auto len = min_domain_length(params.switching, params.D, params.chi, m)) {
                rep.min_lengths.emplace_back(m, *len);
            }
        }
    }

    rep.dispersion = dispersion_scan(params, L);
    for (const auto& pt : rep.dispersion) {
        if (pt.max_real() > 0.0) {
            rep.unstable_modes.push_back(pt.m);
            for (const auto& z : pt.eigenvalues) {
                if (z.real() > 0.0 && z.imag() != 0.0) {
                    rep.predicts_oscillation = true;
                }
            }
        }
    }
    return rep;
}

} // namespace chemoswitch
