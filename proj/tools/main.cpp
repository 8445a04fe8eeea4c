// Command-line driver: simulate, stability, sweep, eigenmap, analyze.
//
// Exit codes: 0 success, 1 I/O or unexpected failure, 2 configuration error,
// 3 numerical abort (blow-up, stiffness, negative density).

#include "chemoswitch/analysis.hpp"
#include "chemoswitch/config.hpp"
#include "chemoswitch/experiment.hpp"
#include "chemoswitch/io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace cs = chemoswitch;

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Options {
    std::string path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string output_root;
};

cs::ExperimentConfig load(const Options& o, std::initializer_list<cs::Mode> accepted, const char* command) {
    auto cfg = cs::load_config(o.path);
    if (o.seed) {
        cs::set_config_value(cfg, "ic.seed", std::to_string(*o.seed));
    }
    if (o.workers) {
        cs::set_config_value(cfg, "run.workers", std::to_string(*o.workers));
    }
    cs::validate_config(cfg);
    bool ok = false;
    for (auto m : accepted) {
        ok = ok || cfg.mode == m;
    }
    if (!ok) {
        throw cs::ConfigError(0, fmt::format("'{}' cannot run a config with run.mode = {}", command,
                                             cs::to_string(cfg.mode)));
    }
    return cfg;
}

std::filesystem::path root_for(const Options& o, const cs::ExperimentConfig& cfg) {
    return o.output_root.empty() ? cs::output_root(cfg.output_dir) : std::filesystem::path(o.output_root);
}

void print_run(const cs::RunRecord& r) {
    const auto& s = r.summary;
    fmt::print("{}: status={} pattern_formed={} peaks={} range={:.4g} peak_density={:.4g} mass_drift={:.2e}", r.config.run_id,
               cs::to_string(r.status), s.pattern_formed, s.peak_count, s.spatial_range, s.peak_density,
               s.mass_drift);
    if (s.oscillation) {
        fmt::print(" period={:.4g}", s.oscillation->period);
    }
    if (s.extinct_phenotype) {
        fmt::print(" extinct={}", cs::to_string(*s.extinct_phenotype));
    }
    if (s.blowup_time) {
        fmt::print(" t_blowup={:.6g}", *s.blowup_time);
    }
    fmt::print("\n");
}

int finish(const cs::ExperimentOutcome& out) {
    for (const auto& r : out.runs) {
        print_run(r);
    }
    fmt::print("output: {}\n", out.directory.string());
    return out.aborted() ? exit_numerical : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-phenotype chemotaxis model: stability analysis and simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cs::version()));

    Options opt;
    auto add_common = [&](CLI::App* sub, const char* what) {
        sub->add_option("config", opt.path, what)->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "override ic.seed");
        sub->add_option("--output-root", opt.output_root,
                        "output root (default: $CHEMOSWITCH_OUTPUT_ROOT, else run.output_dir)");
    };

    auto* simulate = app.add_subcommand("simulate", "run a Sim1D, Sim2D or Radial config");
    add_common(simulate, "config file");
    auto* stability = app.add_subcommand("stability", "write the linear stability report of a config");
    add_common(stability, "config file");
    auto* sweep = app.add_subcommand("sweep", "run every point of a Sweep config");
    add_common(sweep, "config file");
    sweep->add_option("--workers", opt.workers, "concurrent runs (overrides run.workers)");
    auto* eigenmap = app.add_subcommand("eigenmap", "scan growth rates over a (chi, mu) grid");
    add_common(eigenmap, "config file");
    eigenmap->add_option("--workers", opt.workers, "threads (overrides run.workers)");

    std::string run_dir;
    auto* analyze = app.add_subcommand("analyze", "recompute the pattern summary of a run directory");
    analyze->add_option("run_dir", run_dir, "directory written by simulate")->required()->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (simulate->parsed()) {
            const auto cfg = load(opt, {cs::Mode::Sim1D, cs::Mode::Sim2D, cs::Mode::Radial}, "simulate");
            return finish(cs::run_experiment(cfg, root_for(opt, cfg)));
        }
        if (sweep->parsed()) {
            const auto cfg = load(opt, {cs::Mode::Sweep}, "sweep");
            return finish(cs::run_experiment(cfg, root_for(opt, cfg)));
        }
        if (stability->parsed()) {
            const auto cfg = load(opt, {cs::Mode::Stability}, "stability");
            const auto out = cs::run_experiment(cfg, root_for(opt, cfg));
            const auto& r = *out.stability;
            fmt::print("H = ({:.6g}, {:.6g}, {:.6g}) homogeneous_stable={} chi_threshold={} branch={}\n", r.h.H0,
                       r.h.H1, r.h.Hs, r.homogeneous_stable,
                       r.chi_threshold ? fmt::format("{:.10g}", *r.chi_threshold) : "none",
                       cs::to_string(r.threshold_branch));
            fmt::print("unstable modes: {} predicts_oscillation={}\n", r.unstable_modes.size(), r.predicts_oscillation);
            fmt::print("output: {}\n", out.directory.string());
            return 0;
        }
        if (eigenmap->parsed()) {
            const auto cfg = load(opt, {cs::Mode::EigenMap}, "eigenmap");
            const auto out = cs::run_experiment(cfg, root_for(opt, cfg));
            std::size_t unstable = 0, oscillatory = 0;
            for (const auto& c : out.eigenmap) {
                unstable += c.max_real > 0.0;
                oscillatory += c.max_real > 0.0 && c.max_abs_imag > 0.0;
            }
            fmt::print("{} grid points: {} unstable, {} unstable with complex growth\n", out.eigenmap.size(), unstable,
                       oscillatory);
            fmt::print("output: {}\n", out.directory.string());
            return 0;
        }
        if (analyze->parsed()) {
            const auto [cfg, run] = cs::read_run(run_dir);
            const auto summary = cs::summarize(run, cfg.analysis);
            fmt::print("status = {}\n{}", cs::to_string(run.status), cs::summary_block(summary));
            return run.aborted() ? exit_numerical : 0;
        }
    } catch (const cs::ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return exit_config;
    } catch (const cs::RunError& e) {
        fmt::print(stderr, "numerical error: {}\n", e.what());
        return exit_numerical;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 1;
}
