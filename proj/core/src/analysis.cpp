#include "chemoswitch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace chemoswitch {

const char* to_string(Geometry g) {
    switch (g) {
    case Geometry::Line: return "line";
    case Geometry::Square: return "square";
    case Geometry::Radial: return "radial";
    }
    return "?";
}

const char* to_string(RunStatus s) {
    switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Converged: return "converged";
    case RunStatus::BlowUp: return "blow_up";
    case RunStatus::Stiffness: return "stiffness";
    case RunStatus::NegativeDensity: return "negative_density";
    }
    return "?";
}

const char* to_string(Phenotype p) {
    return p == Phenotype::Secreting ? "secreting" : "chemotactic";
}

double total_mass(const RunArtifacts& run, const FieldSnapshot& snap) {
    double sum = 0.0;
    for (std::size_t i = 0; i < snap.n0.size(); ++i) {
        sum += (snap.n0[i] + snap.n1[i]) * run.cell_measure[i];
    }
    return sum;
}

namespace {

struct Candidate {
    std::size_t pos;
    double height;
};

// Keep the tallest candidates, dropping any within `merge` of a taller one.
template <class Distance>
std::vector<Candidate> merge_close(std::vector<Candidate> c, std::size_t merge, Distance dist) {
    std::stable_sort(c.begin(), c.end(), [](const auto& a, const auto& b) { return a.height > b.height; });
    std::vector<Candidate> kept;
    for (const auto& cand : c) {
        const bool near = std::any_of(kept.begin(), kept.end(),
                                      [&](const auto& k) { return dist(k.pos, cand.pos) < merge; });
        if (!near) {
            kept.push_back(cand);
        }
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.pos < b.pos; });
    return kept;
}

double mean_of(std::span<const double> x) {
    return x.empty() ? 0.0 : std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

} // namespace

PeakCensus count_peaks(std::span<const double> p, double dx, double threshold_ratio, std::size_t merge_cells) {
    PeakCensus out;
    const std::size_t n = p.size();
    if (n < 2) {
        return out;
    }
    const double threshold = threshold_ratio * mean_of(p);
    constexpr double lowest = -std::numeric_limits<double>::infinity();

    std::vector<Candidate> cand;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && p[j + 1] == p[i]) {
            ++j;
        }
        const double left = i > 0 ? p[i - 1] : lowest;
        const double right = j + 1 < n ? p[j + 1] : lowest;
        const bool whole = i == 0 && j == n - 1;
        if (!whole && left < p[i] && right < p[i] && p[i] > threshold) {
            cand.push_back({(i + j) / 2, p[i]});
        }
        i = j + 1;
    }
    cand = merge_close(cand, merge_cells, [](std::size_t a, std::size_t b) { return a > b ? a - b : b - a; });

    for (const auto& c : cand) {
        const double h = c.height;
        // Prominence: lowest point on each side before terrain rises above h.
        double left_min = std::numeric_limits<double>::infinity();
        bool left_any = false;
        for (std::size_t k = c.pos; k-- > 0;) {
            if (p[k] > h) {
                break;
            }
            left_min = std::min(left_min, p[k]);
            left_any = true;
        }
        double right_min = std::numeric_limits<double>::infinity();
        bool right_any = false;
        for (std::size_t k = c.pos + 1; k < n; ++k) {
            if (p[k] > h) {
                break;
            }
            right_min = std::min(right_min, p[k]);
            right_any = true;
        }
        double base;
        if (left_any && right_any) {
            base = std::max(left_min, right_min);
        } else {
            base = left_any ? left_min : right_min;
        }
        const double prominence = h - base;
        if (!(prominence > 0.0)) {
            continue;
        }
        const double level = h - 0.5 * prominence;
        double xl = 0.0;
        for (std::size_t k = c.pos; k-- > 0;) {
            if (p[k] <= level) {
                xl = static_cast<double>(k) + (level - p[k]) / (p[k + 1] - p[k]);
                break;
            }
        }
        double xr = static_cast<double>(n - 1);
        for (std::size_t k = c.pos + 1; k < n; ++k) {
            if (p[k] <= level) {
                xr = static_cast<double>(k) - (level - p[k]) / (p[k - 1] - p[k]);
                break;
            }
        }
        out.positions.push_back(c.pos);
        out.heights.push_back(h);
        out.widths.push_back((xr - xl) * dx);
    }
    out.count = out.positions.size();
    return out;
}

PeakCensus count_peaks_2d(std::span<const double> field, std::size_t N, double threshold_ratio,
                          double sigma_cells, std::size_t merge_cells) {
    if (field.size() != N * N) {
        throw std::invalid_argument("count_peaks_2d: field size is not N*N");
    }
    PeakCensus out;
    if (N < 3) {
        return out;
    }
    std::vector<double> sm(field.begin(), field.end());
    if (sigma_cells > 0.0) {
        const auto R = static_cast<long>(std::ceil(3.0 * sigma_cells));
        std::vector<double> kernel(static_cast<std::size_t>(2 * R + 1));
        for (long k = -R; k <= R; ++k) {
            kernel[static_cast<std::size_t>(k + R)] =
                std::exp(-0.5 * static_cast<double>(k * k) / (sigma_cells * sigma_cells));
        }
        const double norm = std::accumulate(kernel.begin(), kernel.end(), 0.0);
        for (auto& k : kernel) {
            k /= norm;
        }
        const auto n = static_cast<long>(N);
        auto reflect = [n](long i) {
            while (i < 0 || i >= n) {
                i = i < 0 ? -i - 1 : 2 * n - i - 1;
            }
            return static_cast<std::size_t>(i);
        };
        std::vector<double> tmp(N * N);
        for (std::size_t j = 0; j < N; ++j) {
            for (std::size_t i = 0; i < N; ++i) {
                double acc = 0.0;
                for (long k = -R; k <= R; ++k) {
                    acc += kernel[static_cast<std::size_t>(k + R)] * sm[j * N + reflect(static_cast<long>(i) + k)];
                }
                tmp[j * N + i] = acc;
            }
        }
        for (std::size_t j = 0; j < N; ++j) {
            for (std::size_t i = 0; i < N; ++i) {
                double acc = 0.0;
                for (long k = -R; k <= R; ++k) {
                    acc += kernel[static_cast<std::size_t>(k + R)] * tmp[reflect(static_cast<long>(j) + k) * N + i];
                }
                sm[j * N + i] = acc;
            }
        }
    }
    const double threshold = threshold_ratio * mean_of(sm);
    std::vector<Candidate> cand;
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t i = 0; i < N; ++i) {
            const double c = sm[j * N + i];
            if (!(c > threshold)) {
                continue;
            }
            bool is_max = true;
            for (int dj = -1; dj <= 1 && is_max; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    const auto ii = static_cast<long>(i) + di;
                    const auto jj = static_cast<long>(j) + dj;
                    if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= static_cast<long>(N) ||
                        jj >= static_cast<long>(N)) {
                        continue;
                    }
                    if (sm[static_cast<std::size_t>(jj) * N + static_cast<std::size_t>(ii)] > c) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) {
                cand.push_back({j * N + i, c});
            }
        }
    }
    cand = merge_close(cand, merge_cells, [N](std::size_t a, std::size_t b) {
        const auto da = static_cast<long>(a % N) - static_cast<long>(b % N);
        const auto db = static_cast<long>(a / N) - static_cast<long>(b / N);
        return static_cast<std::size_t>(std::max(std::abs(da), std::abs(db)));
    });
    for (const auto& c : cand) {
        out.positions.push_back(c.pos);
        out.heights.push_back(c.height);
    }
    out.count = cand.size();
    return out;
}

std::optional<Oscillation> detect_oscillation(std::span<const double> t, std::span<const double> x, double t0,
                                              double t1, const OscillationOptions& options) {
    if (t.size() != x.size()) {
        throw std::invalid_argument("detect_oscillation: time and value series differ in length");
    }
    if (!(t1 - t0 >= options.min_window)) {
        throw std::invalid_argument("detect_oscillation: window shorter than the minimum");
    }
    std::vector<double> ts, xs;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= t0 - 1e-9 && t[i] <= t1 + 1e-9) {
            ts.push_back(t[i]);
            xs.push_back(x[i]);
        }
    }
    if (ts.size() < 16) {
        throw std::invalid_argument("detect_oscillation: too few samples in the window");
    }

    // Uniform resampling over the covered span.
    const std::size_t m = ts.size();
    const double a = ts.front();
    const double b = ts.back();
    const double h = (b - a) / static_cast<double>(m - 1);
    std::vector<double> y(m);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double tk = a + h * static_cast<double>(k);
        while (seg + 2 < m && ts[seg + 1] < tk) {
            ++seg;
        }
        const double span = ts[seg + 1] - ts[seg];
        const double w = span > 0.0 ? std::clamp((tk - ts[seg]) / span, 0.0, 1.0) : 0.0;
        y[k] = (1.0 - w) * xs[seg] + w * xs[seg + 1];
    }

    // Linear detrend.
    const double md = static_cast<double>(m);
    const double kbar = 0.5 * (md - 1.0);
    double ybar = mean_of(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double dk = static_cast<double>(k) - kbar;
        sxy += dk * (y[k] - ybar);
        sxx += dk * dk;
    }
    const double slope = sxy / sxx;
    double var = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        y[k] -= ybar + slope * (static_cast<double>(k) - kbar);
        var += y[k] * y[k];
    }
    var /= md;
    const double scale = std::max(1.0, std::abs(ybar));
    if (var <= 1e-24 * scale * scale) {
        return std::nullopt;
    }

    const std::size_t half = m / 2;
    std::vector<double> power(half + 1, 0.0), mag(half + 1, 0.0);
    for (std::size_t f = 1; f <= half; ++f) {
        std::complex<double> acc = 0.0;
        const double w = -2.0 * std::numbers::pi * static_cast<double>(f) / md;
        for (std::size_t k = 0; k < m; ++k) {
            acc += y[k] * std::polar(1.0, w * static_cast<double>(k));
        }
        mag[f] = std::abs(acc);
        const double weight = (m % 2 == 0 && f == half) ? 1.0 : 2.0;
        power[f] = weight * std::norm(acc) / (md * md);
    }
    const auto peak = static_cast<std::size_t>(std::max_element(power.begin() + 1, power.end()) - power.begin());
    double band = power[peak];
    if (peak > 1) {
        band += power[peak - 1];
    }
    if (peak < half) {
        band += power[peak + 1];
    }
    Oscillation osc;
    osc.variance_fraction = band / var;

    const std::size_t third = m / 3;
    double first = 0.0, last = 0.0;
    for (std::size_t k = 0; k < third; ++k) {
        first += y[k] * y[k];
        last += y[m - 1 - k] * y[m - 1 - k];
    }
    osc.envelope_decay = 1.0 - std::sqrt(last / first);

    double delta = 0.0;
    if (peak > 1 && peak < half) {
        const double l = mag[peak - 1], c = mag[peak], r = mag[peak + 1];
        const double denom = l - 2.0 * c + r;
        if (denom != 0.0) {
            delta = std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
        }
    }
    const double freq = (static_cast<double>(peak) + delta) / (md * h);
    osc.period = 1.0 / freq;
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    osc.amplitude = 0.5 * (*hi - *lo);

    const double cycles = (b - a) / osc.period;
    if (cycles >= options.min_cycles && osc.variance_fraction >= options.min_variance_fraction &&
        osc.envelope_decay < options.max_envelope_decay) {
        return osc;
    }
    return std::nullopt;
}

std::optional<Phenotype> detect_extinction(const FieldSnapshot& snap, std::span<const double> cell_measure,
                                           double threshold) {
    double w = 0.0, m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < snap.n0.size(); ++i) {
        w += cell_measure[i];
        m0 += snap.n0[i] * cell_measure[i];
        m1 += snap.n1[i] * cell_measure[i];
    }
    if (m0 / w < threshold) {
        return Phenotype::Secreting;
    }
    if (m1 / w < threshold) {
        return Phenotype::Chemotactic;
    }
    return std::nullopt;
}

double mass_audit(const RunArtifacts& run) {
    if (run.snapshots.empty()) {
        return 0.0;
    }
    const double m0 = total_mass(run, run.snapshots.front());
    double drift = 0.0;
    for (const auto& s : run.snapshots) {
        drift = std::max(drift, std::abs(total_mass(run, s) - m0) / m0);
    }
    return drift;
}

namespace {

PeakCensus census(const RunArtifacts& run, const FieldSnapshot& snap, const AnalysisOptions& o) {
    const auto& chem = run.chemotactic(snap);
    if (run.geometry == Geometry::Square) {
        return count_peaks_2d(chem, run.side, o.peak_threshold_ratio, o.smoothing_sigma);
    }
    const double dx = run.coords.size() > 1 ? run.coords[1] - run.coords[0] : 1.0;
    return count_peaks(chem, dx, o.peak_threshold_ratio);
}

} // namespace

PatternSummary summarize(const RunArtifacts& run, const AnalysisOptions& options) {
    PatternSummary s;
    s.options = options;
    s.mass_drift = mass_audit(run);
    if (run.aborted()) {
        s.blowup_time = run.t_blowup;
    }
    if (run.snapshots.empty()) {
        return s;
    }
    const auto& snap = run.snapshots.back();
    const auto& chem = run.chemotactic(snap);
    const auto [lo, hi] = std::minmax_element(chem.begin(), chem.end());
    s.spatial_range = *hi - *lo;
    s.pattern_formed = s.spatial_range > options.pattern_threshold;
    for (std::size_t i = 0; i < snap.n0.size(); ++i) {
        s.peak_density = std::max(s.peak_density, snap.n0[i] + snap.n1[i]);
    }

    // A flat profile has no aggregates, only rounding ripples.
    if (s.pattern_formed) {
        const auto c = census(run, snap, options);
        s.peak_count = c.count;
        s.peak_heights = c.heights;
        s.peak_widths = c.widths;
    }

    if (run.variant == ModelVariant::TwoPhenotype) {
        s.extinct_phenotype = detect_extinction(snap, run.cell_measure, options.extinction_threshold);
    }

    const double t1 = options.oscillation_t1 < 0.0 ? run.t_final : options.oscillation_t1;
    if (!run.probe.empty() && t1 - options.oscillation_t0 >= options.oscillation.min_window &&
        run.probe.back().t >= t1 - 1e-9) {
        std::vector<double> t, x;
        for (const auto& p : run.probe) {
            t.push_back(p.t);
            x.push_back(run.variant == ModelVariant::MinimalKS ? p.n0 : p.n1);
        }
        try {
            s.oscillation = detect_oscillation(t, x, options.oscillation_t0, t1, options.oscillation);
        } catch (const std::invalid_argument&) {
            // Probe too sparse for the window: no verdict.
        }
    }
    return s;
}

std::vector<std::pair<double, std::size_t>> peak_count_series(const RunArtifacts& run,
                                                              const AnalysisOptions& options) {
    std::vector<std::pair<double, std::size_t>> out;
    for (const auto& snap : run.snapshots) {
        out.emplace_back(snap.t, census(run, snap, options).count);
    }
    return out;
}

} // namespace chemoswitch
