#include "chemoswitch/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chemoswitch {

void TimeController::validate() const {
    if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max)) {
        throw std::invalid_argument("time controller requires 0 < dt_min <= dt_init <= dt_max");
    }
    if (!(rel_tol > 0.0 && rel_tol <= 1e-2) || !(abs_tol > 0.0 && abs_tol <= 1e-2)) {
        throw std::invalid_argument("time controller tolerances must lie in (0, 1e-2]");
    }
    if (!(t_end > 0.0)) {
        throw std::invalid_argument("t_end must be positive");
    }
    if (snapshot_every < 0.0 || probe_every < 0.0) {
        throw std::invalid_argument("output cadences must be nonnegative");
    }
}

std::vector<double> output_schedule(double t0, double t_end, std::initializer_list<double> cadences) {
    std::vector<double> times;
    for (double every : cadences) {
        if (!(every > 0.0)) {
            continue;
        }
        const auto first = static_cast<long long>(std::floor(t0 / every)) + 1;
        for (long long k = first;; ++k) {
            const double t = static_cast<double>(k) * every;
            if (t > t_end * (1.0 + 1e-12)) {
                break;
            }
            if (t > t0) {
                times.push_back(std::min(t, t_end));
            }
        }
    }
    times.push_back(t_end);
    std::sort(times.begin(), times.end());
    std::vector<double> merged;
    for (double t : times) {
        if (merged.empty() || t - merged.back() > 1e-9 * std::max(1.0, std::abs(t))) {
            merged.push_back(t);
        }
    }
    return merged;
}

IntegrationResult integrate_adaptive(const RhsFunction& rhs, std::vector<double>& y, double t0,
                                     const TimeController& ctl,
                                     std::span<const double> output_times,
                                     const OutputObserver& observer) {
    ctl.validate();
    const std::size_t n = y.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n), y_new(n);

    IntegrationResult res;
    res.t = t0;
    double t = t0;
    double dt = ctl.dt_init;

    if (observer && !observer(t, y)) {
        res.status = IntegrationStatus::Stopped;
        return res;
    }

    rhs(t, y, k1);
    ++res.rhs_evaluations;

    std::size_t next_out = 0;
    while (next_out < output_times.size() && output_times[next_out] <= t) {
        ++next_out;
    }

    constexpr double safety = 0.9;
    constexpr double grow_max = 5.0;
    constexpr double shrink_min = 0.2;

    while (t < ctl.t_end) {
        const double target = next_out < output_times.size() ? output_times[next_out] : ctl.t_end;
        bool lands_on_output = false;
        double h = std::min(dt, ctl.dt_max);
        if (t + h >= target - 1e-12 * std::max(1.0, std::abs(target))) {
            h = target - t;
            lands_on_output = true;
        }

        for (std::size_t i = 0; i < n; ++i) {
            stage[i] = y[i] + 0.5 * h * k1[i];
        }
        rhs(t + 0.5 * h, stage, k2);
        for (std::size_t i = 0; i < n; ++i) {
            stage[i] = y[i] + 0.75 * h * k2[i];
        }
        rhs(t + 0.75 * h, stage, k3);
        for (std::size_t i = 0; i < n; ++i) {
            y_new[i] = y[i] + h * (2.0 / 9.0 * k1[i] + 1.0 / 3.0 * k2[i] + 4.0 / 9.0 * k3[i]);
        }
        rhs(t + h, y_new, k4);
        res.rhs_evaluations += 3;

        double err = 0.0;
        bool finite = true;
        bool undershoot = false;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = h * (-5.0 / 72.0 * k1[i] + 1.0 / 12.0 * k2[i] + 1.0 / 9.0 * k3[i] -
                                  1.0 / 8.0 * k4[i]);
            if (!std::isfinite(y_new[i]) || !std::isfinite(e)) {
                finite = false;
                break;
            }
            const double scale = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err = std::max(err, std::abs(e) / scale);
            if (y_new[i] < -ctl.abs_tol) {
                undershoot = true;
            }
        }

        if (!finite || undershoot || err > 1.0) {
            ++res.rejected;
            if (!finite) {
                dt = 0.25 * h;
            } else if (err > 1.0) {
                dt = h * std::max(shrink_min, safety * std::pow(err, -1.0 / 3.0));
            } else {
                dt = 0.5 * h;
            }
            if (dt < ctl.dt_min) {
                res.status = finite ? IntegrationStatus::DtUnderflow : IntegrationStatus::NonFinite;
                res.diagnostic = finite ? "time step fell below dt_min: stiffness/blow-up suspected"
                                        : "non-finite values: blow-up suspected";
                res.t = t;
                res.last_dt = dt;
                return res;
            }
            continue;
        }

        // Accept. Undershoots within abs_tol are kept as is; clipping them
        // would inject mass.
        y.swap(y_new);
        k1.swap(k4);
        t = lands_on_output ? target : t + h;
        ++res.accepted;
        res.last_dt = h;

        const double factor = err > 0.0 ? safety * std::pow(err, -1.0 / 3.0) : grow_max;
        const double proposed = h * std::clamp(factor, shrink_min, grow_max);
        // An output-clamped step says nothing about the admissible size.
        dt = lands_on_output ? std::max(dt, proposed) : proposed;

        if (lands_on_output) {
            if (next_out < output_times.size()) {
                ++next_out;
            }
            if (observer && !observer(t, y)) {
                res.status = IntegrationStatus::Stopped;
                res.t = t;
                return res;
            }
        }
    }
    res.t = t;
    return res;
}

} // namespace chemoswitch
