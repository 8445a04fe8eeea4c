#pragma once

/**
 * @file integrator.hpp
 * @brief Error-controlled explicit time stepping for method-of-lines systems.
 *
 * Bogacki-Shampine 3(2) pair with first-same-as-last reuse. The controller
 * lands exactly on every requested output time and keeps the state
 * nonnegative by rejecting steps that undershoot -abs_tol.
 */

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace chemoswitch {

struct TimeController {
    double dt_init = 1e-4;
    double dt_min = 1e-12;
    double dt_max = 1.0;
    double rel_tol = 1e-6;
    double abs_tol = 1e-9;
    double t_end = 500.0;
    double snapshot_every = 10.0;
    double probe_every = 0.1;

    /// Throws std::invalid_argument when dt_min <= dt_init <= dt_max or
    /// tolerances in (0, 1e-2] are violated.
    void validate() const;
};

using RhsFunction = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Called at every output time; return false to stop integration early.
using OutputObserver = std::function<bool(double t, std::span<const double> y)>;

enum class IntegrationStatus { Completed, Stopped, DtUnderflow, NonFinite };

struct IntegrationResult {
    IntegrationStatus status = IntegrationStatus::Completed;
    double t = 0.0;
    double last_dt = 0.0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
    std::string diagnostic;
};

/// Integrates y' = rhs(t, y) from t0 to ctl.t_end, calling `observer` at t0
/// and at each time in `output_times` (sorted, in (t0, t_end]).
IntegrationResult integrate_adaptive(const RhsFunction& rhs, std::vector<double>& y, double t0,
                                     const TimeController& ctl,
                                     std::span<const double> output_times,
                                     const OutputObserver& observer);

/// Merged, deduplicated output grid of multiples of `every` for each cadence
/// (zero cadence ignored), always ending at t_end.
std::vector<double> output_schedule(double t0, double t_end, std::initializer_list<double> cadences);

} // namespace chemoswitch
