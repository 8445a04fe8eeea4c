#pragma once

/**
 * @file config.hpp
 * @brief Flat `section.key = value` experiment configuration.
 *
 * Grammar, one statement per line:
 *
 *     # comment            (also allowed after a value)
 *     section.key = value
 *     key = value          (only when `key` names a single section.key)
 *     sweep.section.key = v1, v2, ...   (axis of a Sweep; sweep.base picks
 *                                        the mode of each run)
 *
 * Keys and enum values are case-insensitive. Every key has a default; only
 * run.mode is required. Errors carry the offending line number.
 */

#include "chemoswitch/analysis.hpp"
#include "chemoswitch/integrator.hpp"
#include "chemoswitch/model.hpp"
#include "chemoswitch/solver1d.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chemoswitch {

enum class Mode { Stability, Sim1D, Sim2D, Radial, Sweep, EigenMap };
std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);

enum class Provenance { Default, User, Derived };
std::string_view to_string(Provenance p);

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& message);
    /// 0 when the error is not tied to a line.
    int line() const { return line_; }

private:
    int line_;
};

struct SweepAxis {
    std::string key; ///< canonical section.key
    std::vector<std::string> values;
};

enum class SweepCombine { Product, Zip };

struct ExperimentConfig {
    std::string run_id = "run";
    Mode mode = Mode::Sim1D;
    std::string output_dir = "out";

    ModelParams model;
    std::optional<DimensionalParams> dimensional;
    std::optional<NondimScales> scales; ///< set when `dimensional` was given

    // Interval and square grids.
    double L = 40.0;
    double dx = 0.1; ///< 0.5 by default for Sim2D
    int N = 0;       ///< cells per side; 0 means derive from dx

    // Radial grid.
    double L_r = 10.0;
    double dr = 5e-3;
    double blowup_factor = 1e6;
    double converge_window = 100.0;
    double converge_tol = 1e-6;

    TimeController time;            ///< t_end defaults to 1e4 for Radial
    double tau = 1e-3;              ///< explicit 2D step
    std::vector<double> snapshot_times; ///< 2D and radial output times

    double nbar = 0.5;
    double amplitude = 0.01;
    double A_focus = 1e4;
    IcSampling sampling = IcSampling::CellAverage;
    std::uint64_t seed = 12345;
    std::string generator = "mt19937_64";

    AnalysisOptions analysis;

    double n0_mean = 0.5; ///< steady state for NoSwitching stability reports

    Mode sweep_mode = Mode::Sim1D;
    SweepCombine sweep_combine = SweepCombine::Product;
    std::vector<SweepAxis> sweep_axes;
    int workers = 1; ///< sweep runs / eigenmap rows in flight

    double chi_min = 1.0, chi_max = 20.0;
    int chi_points = 20;
    double mu_min = 0.01, mu_max = 10.0;
    int mu_points = 20;
    bool mu_log = true;

    std::map<std::string, Provenance> provenance;

    Provenance provenance_of(const std::string& key) const;
};

/// Parses, applies mode-dependent defaults and validates.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(emit_config(c)) reproduces every value.
/// Derived keys are written as comments.
std::string emit_config(const ExperimentConfig& cfg);

/// Sets one canonical key from text, marking it User. Throws ConfigError(0, ...)
/// for unknown keys or malformed values. Does not re-validate.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// All canonical keys, in emission order.
std::vector<std::string> config_keys();

/// Throws ConfigError for out-of-range values.
void validate_config(const ExperimentConfig& cfg);

/// Expanded runs of a Sweep config: each has mode = sweep_mode, a run_id of
/// the form `<run_id>_<index>`, and its axis values applied.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& cfg);

} // namespace chemoswitch
