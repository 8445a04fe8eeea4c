#include "chemoswitch/experiment.hpp"

#include "chemoswitch/io.hpp"
#include "chemoswitch/parallel.hpp"
#include "chemoswitch/radial.hpp"
#include "chemoswitch/solver1d.hpp"
#include "chemoswitch/solver2d.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace chemoswitch {

RunError::RunError(std::string run_id, const std::string& message)
    : std::runtime_error(fmt::format("run {}: {}", run_id, message)), run_id_(std::move(run_id)) {}

bool ExperimentOutcome::aborted() const {
    return std::any_of(runs.begin(), runs.end(), [](const RunRecord& r) {
        return r.status == RunStatus::BlowUp || r.status == RunStatus::Stiffness ||
               r.status == RunStatus::NegativeDensity;
    });
}

RunArtifacts simulate(const ExperimentConfig& cfg) {
    RunArtifacts run;
    try {
        switch (cfg.mode) {
        case Mode::Sim1D: {
            const auto grid = Grid1D::from_spacing(cfg.L, cfg.dx);
            InitialCondition1D ic{cfg.nbar, cfg.amplitude, cfg.A_focus, cfg.sampling};
            run = integrate_1d(cfg.model, grid, initial_condition_1d(grid, ic, cfg.model.variant), cfg.time);
            break;
        }
        case Mode::Sim2D: {
            const auto grid = Grid2D::from_spacing(cfg.L, cfg.dx);
            const auto ic = initial_condition_2d(grid, cfg.nbar, cfg.amplitude, {cfg.seed, cfg.generator},
                                                 cfg.model.variant);
            Run2DOptions opt;
            opt.tau = cfg.tau;
            opt.t_end = cfg.time.t_end;
            opt.probe_every = cfg.time.probe_every;
            opt.snapshot_times = cfg.snapshot_times;
            if (opt.snapshot_times.empty() && cfg.time.snapshot_every > 0.0) {
                for (double t = cfg.time.snapshot_every; t < cfg.time.t_end; t += cfg.time.snapshot_every) {
                    opt.snapshot_times.push_back(t);
                }
            }
            run = run_2d(cfg.model, grid, ic, opt);
            break;
        }
        case Mode::Radial: {
            const auto grid = RadialGrid::from_spacing(cfg.L_r, cfg.dr);
            RadialOptions opt;
            opt.nbar = cfg.nbar;
            opt.amplitude = cfg.amplitude;
            opt.blowup_factor = cfg.blowup_factor;
            opt.converge_window = cfg.converge_window;
            opt.converge_tol = cfg.converge_tol;
            opt.snapshot_times = cfg.snapshot_times;
            run = run_radial(cfg.model, grid, cfg.time, opt);
            break;
        }
        default:
            throw std::invalid_argument(fmt::format("mode {} is not a simulation", to_string(cfg.mode)));
        }
    } catch (const RunError&) {
        throw;
    } catch (const std::exception& e) {
        throw RunError(cfg.run_id, e.what());
    }
    run.run_id = cfg.run_id;
    return run;
}

namespace {

RunRecord simulate_and_write(const ExperimentConfig& cfg, const std::filesystem::path& dir_path) {
    const auto run = simulate(cfg);
    RunRecord rec;
    rec.config = cfg;
    rec.status = run.status;
    rec.summary = summarize(run, cfg.analysis);
    rec.directory = dir_path;
    RunDirectory dir(dir_path);
    write_run(dir, cfg, run, rec.summary);
    return rec;
}

} // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& root) {
    ExperimentOutcome out;
    out.directory = root / cfg.run_id;

    switch (cfg.mode) {
    case Mode::Sim1D:
    case Mode::Sim2D:
    case Mode::Radial:
        out.runs.push_back(simulate_and_write(cfg, out.directory));
        break;

    case Mode::Stability: {
        StabilityReport rep;
        try {
            rep = stability_report(cfg.model, cfg.L, cfg.n0_mean);
        } catch (const std::exception& e) {
            throw RunError(cfg.run_id, e.what());
        }
        RunDirectory dir(out.directory);
        dir.write("config.txt", emit_config(cfg));
        dir.write(cfg.run_id + "_stability.txt", stability_report_text(rep, cfg.model, cfg.L));
        dir.write_manifest();
        out.stability = std::move(rep);
        break;
    }

    case Mode::EigenMap: {
        EigenMapRequest req;
        req.spec_template = cfg.model.switching;
        req.D = cfg.model.D;
        req.L = cfg.L;
        req.chi_min = cfg.chi_min;
        req.chi_max = cfg.chi_max;
        req.chi_points = static_cast<std::size_t>(cfg.chi_points);
        req.mu_min = cfg.mu_min;
        req.mu_max = cfg.mu_max;
        req.mu_points = static_cast<std::size_t>(cfg.mu_points);
        req.mu_log_spacing = cfg.mu_log;
        req.workers = static_cast<unsigned>(cfg.workers);
        try {
            out.eigenmap = eigenvalue_map(req);
        } catch (const std::exception& e) {
            throw RunError(cfg.run_id, e.what());
        }
        RunDirectory dir(out.directory);
        dir.write("config.txt", emit_config(cfg));
        dir.write(cfg.run_id + "_eigenmap.csv", eigenmap_csv(out.eigenmap));
        dir.write_manifest();
        break;
    }

    case Mode::Sweep: {
        const auto runs = expand_sweep(cfg);
        out.runs.resize(runs.size());
        parallel_for(runs.size(), static_cast<unsigned>(cfg.workers), [&](std::size_t i) {
            out.runs[i] = simulate_and_write(runs[i], out.directory / runs[i].run_id);
        });
        std::string summary = sweep_summary_header(cfg.sweep_axes);
        for (std::size_t i = 0; i < runs.size(); ++i) {
            // Artifacts are not kept in memory; the row only needs status and summary.
            RunArtifacts stub;
            stub.status = out.runs[i].status;
            summary += sweep_summary_row(runs[i], cfg.sweep_axes, stub, out.runs[i].summary);
        }
        RunDirectory dir(out.directory);
        dir.write("config.txt", emit_config(cfg));
        dir.write("summary.csv", summary);
        dir.write_manifest();
        break;
    }
    }
    return out;
}

} // namespace chemoswitch
