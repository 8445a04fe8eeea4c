#pragma once

/**
 * @file experiment.hpp
 * @brief Config-driven dispatch to the solvers and writers.
 */

#include "chemoswitch/analysis.hpp"
#include "chemoswitch/config.hpp"
#include "chemoswitch/run_artifacts.hpp"
#include "chemoswitch/stability.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemoswitch {

/// Numerical or setup failure inside one run, tagged with its run_id.
class RunError : public std::runtime_error {
public:
    RunError(std::string run_id, const std::string& message);
    const std::string& run_id() const { return run_id_; }

private:
    std::string run_id_;
};

struct RunRecord {
    ExperimentConfig config;
    RunStatus status = RunStatus::Completed;
    PatternSummary summary;
    std::filesystem::path directory;
};

struct ExperimentOutcome {
    std::filesystem::path directory;
    std::vector<RunRecord> runs;               ///< simulations (one, or one per sweep point)
    std::optional<StabilityReport> stability;  ///< Stability mode
    std::vector<EigenMapCell> eigenmap;        ///< EigenMap mode

    /// True when any run ended in blow-up, stiffness or negative density.
    bool aborted() const;
};

/// Runs one Sim1D/Sim2D/Radial config in memory, without writing files.
RunArtifacts simulate(const ExperimentConfig& cfg);

/// Dispatches on cfg.mode and writes everything under root / cfg.run_id.
/// Sweep runs go to root / run_id / <run_id>_<k> and execute on cfg.workers
/// threads; summary.csv is assembled after all of them finish.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& root);

} // namespace chemoswitch
