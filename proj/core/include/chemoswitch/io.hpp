#pragma once

/**
 * @file io.hpp
 * @brief Run directories, CSV/PGM emission, manifests and readers.
 *
 * Every writer formats doubles with 17 significant digits so that outputs are
 * lossless and byte-identical for identical runs. Files written through a
 * RunDirectory are listed in manifest.txt with their SHA-256 digests.
 */

#include "chemoswitch/analysis.hpp"
#include "chemoswitch/config.hpp"
#include "chemoswitch/run_artifacts.hpp"
#include "chemoswitch/stability.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chemoswitch {

/// Library version string.
std::string_view version();

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

class RunDirectory {
public:
    /// Creates `dir` (and parents).
    explicit RunDirectory(std::filesystem::path dir);

    const std::filesystem::path& path() const { return dir_; }
    /// Writes `bytes` to dir/name and records it for the manifest.
    void write(const std::string& name, std::string_view bytes);
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    /// manifest.txt: "<sha256>  <name>" per written file, sorted by name.
    void write_manifest();

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::string, std::string>> entries_; ///< (name, digest)
};

/// Output root: $CHEMOSWITCH_OUTPUT_ROOT when set, else `fallback`.
std::filesystem::path output_root(const std::string& fallback);

/// Interval/radial snapshots: `t,x,n0,n1,s` (`t,r,...` for radial).
std::string snapshots_csv(const RunArtifacts& run);
std::string probe_csv(const RunArtifacts& run);
std::string max_density_csv(const RunArtifacts& run);
/// One 2D snapshot: `x,y,n0,n1,s`, x fastest.
std::string field_csv(const RunArtifacts& run, const FieldSnapshot& snap);
/// Binary 8-bit PGM (P5) of an N x N field mapped linearly from [lo, hi];
/// row 0 of the image is the top (largest y).
std::string pgm(std::span<const double> field, std::size_t N, double lo, double hi);

std::string stability_report_text(const StabilityReport& report, const ModelParams& params, double L);
std::string eigenmap_csv(const std::vector<EigenMapCell>& cells);

/// Flat `key = value` block describing a PatternSummary.
std::string summary_block(const PatternSummary& s);
std::string metadata_text(const ExperimentConfig& cfg, const RunArtifacts& run, const PatternSummary& s);

/// Header and one row for the sweep-level summary CSV.
std::string sweep_summary_header(const std::vector<SweepAxis>& axes);
std::string sweep_summary_row(const ExperimentConfig& run_cfg, const std::vector<SweepAxis>& axes,
                              const RunArtifacts& run, const PatternSummary& s);

/// Writes all files for a simulation run (config, metadata, data, manifest).
void write_run(RunDirectory& dir, const ExperimentConfig& cfg, const RunArtifacts& run, const PatternSummary& s);

/// Rebuilds the artifacts of a simulation run directory from its config.txt
/// and CSV files (fields, probe, maxima). Throws std::runtime_error on
/// missing or malformed files.
std::pair<ExperimentConfig, RunArtifacts> read_run(const std::filesystem::path& dir);

} // namespace chemoswitch
