#pragma once

/**
 * @file analysis.hpp
 * @brief Peak census, oscillation and extinction detection, mass audit.
 */

#include "chemoswitch/run_artifacts.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chemoswitch {

struct PeakCensus {
    std::size_t count = 0;
    std::vector<double> heights;
    std::vector<double> widths;
    std::vector<std::size_t> positions;
};

/// Local maxima (plateaus reduced to their centre, boundary maxima allowed)
/// with positive prominence and height above threshold_ratio * mean. Peaks
/// closer than `merge_cells` cells keep only the taller one. Widths are full
/// widths at half prominence in units of dx.
PeakCensus count_peaks(std::span<const double> profile, double dx, double threshold_ratio,
                       std::size_t merge_cells = 3);

/// Spot census on an N x N field (x fastest): Gaussian smoothing with the
/// given sigma in cells (reflecting edges), then 8-neighbour maxima above
/// threshold_ratio * mean, merged within merge_cells. Heights are smoothed
/// values; widths are left empty.
PeakCensus count_peaks_2d(std::span<const double> field, std::size_t N, double threshold_ratio = 1.05,
                          double sigma_cells = 1.0, std::size_t merge_cells = 3);

struct OscillationOptions {
    double min_window = 50.0;
    double min_variance_fraction = 0.2;
    double max_envelope_decay = 0.2;
    /// The dominant frequency must complete this many cycles in the window;
    /// slow drifts otherwise land in the lowest bin.
    double min_cycles = 2.0;
};

struct Oscillation {
    double period = 0.0;
    double amplitude = 0.0;
    double variance_fraction = 0.0;
    double envelope_decay = 0.0;
};

/// Examines samples with t in [t0, t1]. The series is resampled onto a uniform
/// grid, linearly detrended, and transformed; an oscillation needs the
/// dominant bin and its two neighbours to hold min_variance_fraction of the
/// variance and the RMS of the last third to be no more than max_envelope_decay
/// below that of the first third, with at least min_cycles periods in the
/// window. Throws std::invalid_argument when
/// t1 - t0 < min_window or fewer than 16 samples fall in the window.
std::optional<Oscillation> detect_oscillation(std::span<const double> t, std::span<const double> x, double t0,
                                              double t1, const OscillationOptions& options = {});

enum class Phenotype { Secreting, Chemotactic };
const char* to_string(Phenotype p);

/// Measure-weighted spatial means of n0 and n1 compared against threshold.
std::optional<Phenotype> detect_extinction(const FieldSnapshot& snap, std::span<const double> cell_measure,
                                           double threshold = 1e-2);

/// max over snapshots of |M(t) - M(0)| / M(0), M the weighted total of n0 + n1.
double mass_audit(const RunArtifacts& run);

struct AnalysisOptions {
    double pattern_threshold = 1e-3;
    double peak_threshold_ratio = 1.05;
    double smoothing_sigma = 1.0;
    double oscillation_t0 = 300.0;
    /// Negative: use the end of the run.
    double oscillation_t1 = -1.0;
    OscillationOptions oscillation;
    double extinction_threshold = 1e-2;
};

struct PatternSummary {
    std::size_t peak_count = 0; ///< 0 unless pattern_formed
    std::vector<double> peak_heights;
    std::vector<double> peak_widths;
    double spatial_range = 0.0; ///< max - min of the chemotactic density
    bool pattern_formed = false;
    std::optional<Oscillation> oscillation;
    std::optional<Phenotype> extinct_phenotype;
    std::optional<double> blowup_time;
    double mass_drift = 0.0;
    double peak_density = 0.0; ///< max over space of n0 + n1 at the last snapshot
    AnalysisOptions options;
};

/// Census of the chemotactic density at the last snapshot.
PatternSummary summarize(const RunArtifacts& run, const AnalysisOptions& options = {});

/// Peak count of the chemotactic density at each snapshot.
std::vector<std::pair<double, std::size_t>> peak_count_series(const RunArtifacts& run,
                                                              const AnalysisOptions& options = {});

} // namespace chemoswitch
