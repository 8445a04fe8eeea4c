#pragma once

// Output recording shared by the adaptive (interval, radial) solvers.

#include "chemoswitch/integrator.hpp"
#include "chemoswitch/run_artifacts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chemoswitch::detail {

inline std::vector<double> pack(const std::vector<double>& a, const std::vector<double>& b,
                                const std::vector<double>& c) {
    std::vector<double> y;
    y.reserve(a.size() + b.size() + c.size());
    y.insert(y.end(), a.begin(), a.end());
    y.insert(y.end(), b.begin(), b.end());
    y.insert(y.end(), c.begin(), c.end());
    return y;
}

inline bool on_cadence(double t, double every) {
    if (!(every > 0.0)) {
        return false;
    }
    const double k = t / every;
    return std::abs(k - std::round(k)) < 1e-9 * std::max(1.0, std::abs(k));
}

struct ProbePoint {
    std::array<std::size_t, 2> cells{};
    std::array<double, 2> weights{};
};

struct StopRules {
    std::optional<double> blowup_threshold;
    /// Stationarity test: max |y(t) - y(t - window)| / max(1, |y|_inf) < tol.
    std::optional<double> converge_window;
    double converge_tol = 1e-6;
    std::vector<double> extra_snapshot_times;
};

class Recorder {
public:
    Recorder(RunArtifacts& run, const TimeController& ctl, std::size_t cells, ProbePoint probe,
             StopRules rules = {})
        : run_(run), ctl_(ctl), n_(cells), probe_(probe), rules_(std::move(rules)) {}

    bool observe(double t, std::span<const double> y) {
        const bool first = !started_;
        started_ = true;
        const bool last = std::abs(t - ctl_.t_end) <= 1e-12 * std::max(1.0, ctl_.t_end);
        last_t_ = t;

        const auto n0 = y.subspan(0, n_);
        const auto n1 = y.subspan(n_, n_);
        const auto s = y.subspan(2 * n_, n_);

        double peak = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            peak = std::max(peak, n0[i] + n1[i]);
        }

        if (first || last || on_cadence(t, ctl_.probe_every)) {
            ProbeSample p;
            p.t = t;
            for (int k = 0; k < 2; ++k) {
                const auto c = probe_.cells[static_cast<std::size_t>(k)];
                const double w = probe_.weights[static_cast<std::size_t>(k)];
                p.n0 += w * n0[c];
                p.n1 += w * n1[c];
                p.s += w * s[c];
            }
            run_.probe.push_back(p);
            run_.max_density.emplace_back(t, peak);
        }

        const bool extra = std::any_of(rules_.extra_snapshot_times.begin(),
                                       rules_.extra_snapshot_times.end(), [&](double te) {
                                           return std::abs(te - t) <= 1e-9 * std::max(1.0, te);
                                       });
        if (first || last || extra || on_cadence(t, ctl_.snapshot_every)) {
            snapshot(t, y);
        }

        if (rules_.blowup_threshold && peak > *rules_.blowup_threshold) {
            run_.status = RunStatus::BlowUp;
            run_.t_blowup = t;
            run_.diagnostic = "density exceeded the blow-up threshold";
            snapshot(t, y);
            return false;
        }

        if (rules_.converge_window && converged(t, y)) {
            run_.status = RunStatus::Converged;
            run_.diagnostic = "stationary profile reached";
            snapshot(t, y);
            return false;
        }
        return true;
    }

    void finish(const IntegrationResult& res, std::span<const double> y) {
        run_.accepted_steps = res.accepted;
        run_.rejected_steps = res.rejected;
        run_.t_final = res.t;
        switch (res.status) {
        case IntegrationStatus::Completed:
        case IntegrationStatus::Stopped:
            break;
        case IntegrationStatus::DtUnderflow:
            run_.status = RunStatus::Stiffness;
            run_.t_blowup = res.t;
            run_.diagnostic = res.diagnostic;
            snapshot(res.t, y);
            break;
        case IntegrationStatus::NonFinite:
            run_.status = RunStatus::BlowUp;
            run_.t_blowup = res.t;
            run_.diagnostic = res.diagnostic;
            break;
        }
    }

private:
    void snapshot(double t, std::span<const double> y) {
        if (!run_.snapshots.empty() && run_.snapshots.back().t == t) {
            return;
        }
        FieldSnapshot snap;
        snap.t = t;
        snap.n0.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_));
        snap.n1.assign(y.begin() + static_cast<std::ptrdiff_t>(n_),
                       y.begin() + static_cast<std::ptrdiff_t>(2 * n_));
        snap.s.assign(y.begin() + static_cast<std::ptrdiff_t>(2 * n_), y.end());
        const double mass = total_mass(run_, snap);
        if (run_.snapshots.empty()) {
            initial_mass_ = mass;
        }
        run_.mass_drift.emplace_back(t, std::abs(mass - initial_mass_) / initial_mass_);
        run_.snapshots.push_back(std::move(snap));
    }

    bool converged(double t, std::span<const double> y) {
        const double window = *rules_.converge_window;
        const double spacing = window / 10.0;
        if (checkpoints_.empty() || t - checkpoints_.back().first >= spacing - 1e-9) {
            checkpoints_.emplace_back(t, std::vector<double>(y.begin(), y.end()));
        } else {
            return false;
        }
        // Oldest checkpoint at least one window back.
        while (checkpoints_.size() > 1 && t - checkpoints_[1].first >= window - 1e-9) {
            checkpoints_.pop_front();
        }
        const auto& [t_old, y_old] = checkpoints_.front();
        if (t - t_old < window - 1e-9) {
            return false;
        }
        double change = 0.0;
        double scale = 1.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            change = std::max(change, std::abs(y[i] - y_old[i]));
            scale = std::max(scale, std::abs(y[i]));
        }
        return change / scale < rules_.converge_tol;
    }

    RunArtifacts& run_;
    const TimeController& ctl_;
    std::size_t n_;
    ProbePoint probe_;
    StopRules rules_;
    bool started_ = false;
    double last_t_ = 0.0;
    double initial_mass_ = 1.0;
    std::deque<std::pair<double, std::vector<double>>> checkpoints_;
};

} // namespace chemoswitch::detail
