#pragma once

#include "chemoswitch/model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace chemoswitch {

enum class Geometry { Line, Square, Radial };

enum class RunStatus {
    Completed,       ///< reached t_end
    Converged,       ///< stationary profile detected before t_end
    BlowUp,          ///< non-finite values or density above the blow-up threshold
    Stiffness,       ///< adaptive step fell below dt_min
    NegativeDensity, ///< explicit scheme produced negative densities
};

const char* to_string(Geometry g);
const char* to_string(RunStatus s);

/// Full fields at one output time. 2D fields are row-major with the x index
/// fastest: value(i, j) = field[j * N + i].
struct FieldSnapshot {
    double t = 0.0;
    std::vector<double> n0, n1, s;
};

struct ProbeSample {
    double t = 0.0;
    double n0 = 0.0;
    double n1 = 0.0;
    double s = 0.0;
};

/// Raw solver output plus per-run diagnostics. File emission lives in io.hpp.
struct RunArtifacts {
    std::string run_id;
    Geometry geometry = Geometry::Line;
    ModelVariant variant = ModelVariant::TwoPhenotype;

    /// Cell-center coordinates along one axis (x for Line/Square, r for Radial).
    std::vector<double> coords;
    /// Integration weight of each cell (dx, dx*dy, or 2 pi r dr). Size matches
    /// the field size.
    std::vector<double> cell_measure;
    std::size_t side = 0; ///< cells per side for Square, else coords.size()

    std::vector<FieldSnapshot> snapshots;
    std::vector<ProbeSample> probe;
    /// (t, max over space of n0 + n1) at every probe time.
    std::vector<std::pair<double, double>> max_density;
    /// (t, relative mass drift) at every snapshot.
    std::vector<std::pair<double, double>> mass_drift;

    RunStatus status = RunStatus::Completed;
    std::optional<double> t_blowup;
    std::string diagnostic;
    std::vector<std::string> warnings;

    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    double t_final = 0.0;

    bool aborted() const {
        return status == RunStatus::BlowUp || status == RunStatus::Stiffness ||
               status == RunStatus::NegativeDensity;
    }
    /// Cells performing chemotaxis: n1, or n0 for the minimal model.
    const std::vector<double>& chemotactic(const FieldSnapshot& snap) const {
        return variant == ModelVariant::MinimalKS ? snap.n0 : snap.n1;
    }
};

/// Weighted total of n0 + n1 for a snapshot.
double total_mass(const RunArtifacts& run, const FieldSnapshot& snap);

} // namespace chemoswitch
