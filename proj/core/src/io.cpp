#include "chemoswitch/io.hpp"

#include "chemoswitch/radial.hpp"
#include "chemoswitch/solver1d.hpp"
#include "chemoswitch/solver2d.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace chemoswitch {

namespace fs = std::filesystem;

namespace {

std::string g17(double v) { return fmt::format("{:.17g}", v); }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot open '{}'", p.string()));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Rows of a numeric CSV with a header line.
std::vector<std::vector<double>> read_csv(const fs::path& p, std::size_t columns) {
    std::istringstream in(read_file(p));
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(fmt::format("'{}' is empty", p.string()));
    }
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw std::runtime_error(fmt::format("{}:{}: bad number '{}'", p.string(), lineno, cell));
            }
        }
        if (row.size() != columns) {
            throw std::runtime_error(fmt::format("{}:{}: expected {} columns", p.string(), lineno, columns));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string optional_text(const std::optional<double>& v) { return v ? g17(*v) : "none"; }

} // namespace

std::string_view version() {
#ifdef CHEMOSWITCH_VERSION
    return CHEMOSWITCH_VERSION;
#else
    return "unknown";
#endif
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        hex += fmt::format("{:02x}", digest[i]);
    }
    return hex;
}

RunDirectory::RunDirectory(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

void RunDirectory::write(const std::string& name, std::string_view bytes) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot write '{}'", (dir_ / name).string()));
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw std::runtime_error(fmt::format("write failed for '{}'", (dir_ / name).string()));
    }
    const auto digest = sha256_hex(bytes);
    const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == name; });
    if (it != entries_.end()) {
        it->second = digest;
    } else {
        entries_.emplace_back(name, digest);
    }
}

void RunDirectory::write_manifest() {
    auto sorted = entries_;
    std::sort(sorted.begin(), sorted.end());
    std::string text;
    for (const auto& [name, digest] : sorted) {
        text += fmt::format("{}  {}\n", digest, name);
    }
    std::ofstream out(dir_ / "manifest.txt", std::ios::binary | std::ios::trunc);
    out << text;
}

fs::path output_root(const std::string& fallback) {
    if (const char* env = std::getenv("CHEMOSWITCH_OUTPUT_ROOT"); env != nullptr && *env != '\0') {
        return fs::path(env);
    }
    return fs::path(fallback);
}

std::string snapshots_csv(const RunArtifacts& run) {
    std::string out = run.geometry == Geometry::Radial ? "t,r,n0,n1,s\n" : "t,x,n0,n1,s\n";
    for (const auto& snap : run.snapshots) {
        for (std::size_t i = 0; i < snap.n0.size(); ++i) {
            out += fmt::format("{},{},{},{},{}\n", g17(snap.t), g17(run.coords[i]), g17(snap.n0[i]),
                               g17(snap.n1[i]), g17(snap.s[i]));
        }
    }
    return out;
}

std::string probe_csv(const RunArtifacts& run) {
    std::string out = "t,n0,n1,s\n";
    for (const auto& p : run.probe) {
        out += fmt::format("{},{},{},{}\n", g17(p.t), g17(p.n0), g17(p.n1), g17(p.s));
    }
    return out;
}

std::string max_density_csv(const RunArtifacts& run) {
    std::string out = "t,max_density\n";
    for (const auto& [t, m] : run.max_density) {
        out += fmt::format("{},{}\n", g17(t), g17(m));
    }
    return out;
}

std::string field_csv(const RunArtifacts& run, const FieldSnapshot& snap) {
    std::string out = "x,y,n0,n1,s\n";
    const std::size_t N = run.side;
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t i = 0; i < N; ++i) {
            const std::size_t k = j * N + i;
            out += fmt::format("{},{},{},{},{}\n", g17(run.coords[i]), g17(run.coords[j]), g17(snap.n0[k]),
                               g17(snap.n1[k]), g17(snap.s[k]));
        }
    }
    return out;
}

std::string pgm(std::span<const double> field, std::size_t N, double lo, double hi) {
    std::string out = fmt::format("P5\n{} {}\n255\n", N, N);
    const double span = hi - lo;
    for (std::size_t row = 0; row < N; ++row) {
        const std::size_t j = N - 1 - row;
        for (std::size_t i = 0; i < N; ++i) {
            const double v = span > 0.0 ? (field[j * N + i] - lo) / span : 0.0;
            const auto level = static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
            out.push_back(static_cast<char>(static_cast<unsigned char>(level)));
        }
    }
    return out;
}

std::string stability_report_text(const StabilityReport& r, const ModelParams& params, double L) {
    std::string out;
    out += fmt::format("case = {}\n", to_string(params.switching.kind));
    out += fmt::format("D = {}\nchi = {}\nmu = {}\nq = {}\nL = {}\n", g17(params.D), g17(params.chi),
                       g17(params.switching.mu), g17(params.switching.q), g17(L));
    out += fmt::format("n0_star = {}\nn1_star = {}\ns_star = {}\n", g17(r.steady.n0_star), g17(r.steady.n1_star),
                       g17(r.steady.s_star));
    out += fmt::format("H0 = {}\nH1 = {}\nHs = {}\n", g17(r.h.H0), g17(r.h.H1), g17(r.h.Hs));
    out += fmt::format("homogeneous_stable = {}\nhomogeneous_marginal = {}\n", r.homogeneous_stable,
                       r.homogeneous_marginal);
    out += fmt::format("chi_threshold = {}\nthreshold_branch = {}\n", optional_text(r.chi_threshold),
                       to_string(r.threshold_branch));
    for (const auto& [m, len] : r.min_lengths) {
        out += fmt::format("L_min.{} = {}\n", m, g17(len));
    }
    std::string modes;
    for (std::size_t i = 0; i < r.unstable_modes.size(); ++i) {
        modes += (i ? " " : "") + std::to_string(r.unstable_modes[i]);
    }
    out += fmt::format("unstable_modes = {}\n", modes.empty() ? "none" : modes);
    out += fmt::format("predicts_oscillation = {}\n\n", r.predicts_oscillation);
    out += "m,k_sq,A,B,C,re1,im1,re2,im2,re3,im3\n";
    for (const auto& p : r.dispersion) {
        out += fmt::format("{},{},{},{},{}", p.m, g17(p.k_sq), g17(p.coeffs.A), g17(p.coeffs.B), g17(p.coeffs.C));
        for (const auto& z : p.eigenvalues) {
            out += fmt::format(",{},{}", g17(z.real()), g17(z.imag()));
        }
        out += "\n";
    }
    return out;
}

std::string eigenmap_csv(const std::vector<EigenMapCell>& cells) {
    std::string out = "chi,mu,max_re,max_abs_im\n";
    for (const auto& c : cells) {
        out += fmt::format("{},{},{},{}\n", g17(c.chi), g17(c.mu), g17(c.max_real), g17(c.max_abs_imag));
    }
    return out;
}

std::string summary_block(const PatternSummary& s) {
    auto join = [](const std::vector<double>& v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out += (i ? " " : "") + g17(v[i]);
        }
        return out.empty() ? std::string("none") : out;
    };
    std::string out = "[pattern_summary]\n";
    out += fmt::format("peak_count = {}\n", s.peak_count);
    out += fmt::format("peak_heights = {}\n", join(s.peak_heights));
    out += fmt::format("peak_widths = {}\n", join(s.peak_widths));
    out += fmt::format("spatial_range = {}\n", g17(s.spatial_range));
    out += fmt::format("pattern_formed = {}\n", s.pattern_formed);
    out += fmt::format("peak_density = {}\n", g17(s.peak_density));
    if (s.oscillation) {
        out += fmt::format("oscillation = true\noscillation_period = {}\noscillation_amplitude = {}\n",
                           g17(s.oscillation->period), g17(s.oscillation->amplitude));
    } else {
        out += "oscillation = false\n";
    }
    out += fmt::format("extinct_phenotype = {}\n", s.extinct_phenotype ? to_string(*s.extinct_phenotype) : "none");
    out += fmt::format("blowup_time = {}\n", optional_text(s.blowup_time));
    out += fmt::format("mass_drift = {}\n", g17(s.mass_drift));
    const auto& o = s.options;
    out += fmt::format("convention.pattern_threshold = {}\n", g17(o.pattern_threshold));
    out += fmt::format("convention.peak_threshold_ratio = {}\n", g17(o.peak_threshold_ratio));
    out += fmt::format("convention.smoothing_sigma = {}\n", g17(o.smoothing_sigma));
    out += fmt::format("convention.oscillation_window = {} {}\n", g17(o.oscillation_t0), g17(o.oscillation_t1));
    out += fmt::format("convention.min_variance_fraction = {}\n", g17(o.oscillation.min_variance_fraction));
    out += fmt::format("convention.max_envelope_decay = {}\n", g17(o.oscillation.max_envelope_decay));
    out += fmt::format("convention.min_cycles = {}\n", g17(o.oscillation.min_cycles));
    out += fmt::format("convention.extinction_threshold = {}\n", g17(o.extinction_threshold));
    return out;
}

std::string metadata_text(const ExperimentConfig& cfg, const RunArtifacts& run, const PatternSummary& s) {
    std::string out = "[run]\n";
    out += fmt::format("code_version = {}\n", version());
    out += fmt::format("run_id = {}\n", cfg.run_id);
    out += fmt::format("geometry = {}\n", to_string(run.geometry));
    out += fmt::format("seed = {}\n", cfg.seed);
    out += fmt::format("status = {}\n", to_string(run.status));
    out += fmt::format("t_final = {}\n", g17(run.t_final));
    out += fmt::format("t_blowup = {}\n", optional_text(run.t_blowup));
    out += fmt::format("diagnostic = {}\n", run.diagnostic.empty() ? "none" : run.diagnostic);
    out += fmt::format("accepted_steps = {}\nrejected_steps = {}\n", run.accepted_steps, run.rejected_steps);
    for (const auto& w : run.warnings) {
        out += fmt::format("warning = {}\n", w);
    }
    out += "\n[config]\n";
    out += emit_config(cfg);
    out += "\n";
    out += summary_block(s);
    return out;
}

std::string sweep_summary_header(const std::vector<SweepAxis>& axes) {
    std::string out = "run_id";
    for (const auto& a : axes) {
        out += "," + a.key;
    }
    out += ",status,pattern_formed,peak_count,spatial_range,peak_density,oscillation_period,extinct_phenotype,"
           "blowup_time,mass_drift\n";
    return out;
}

std::string sweep_summary_row(const ExperimentConfig& run_cfg, const std::vector<SweepAxis>& axes,
                              const RunArtifacts& run, const PatternSummary& s) {
    std::string out = run_cfg.run_id;
    const auto emitted = emit_config(run_cfg);
    for (const auto& a : axes) {
        // Value as emitted for this run.
        const auto key = a.key + " = ";
        const auto pos = emitted.find(key);
        std::string v;
        if (pos != std::string::npos) {
            const auto end = emitted.find('\n', pos);
            v = emitted.substr(pos + key.size(), end - pos - key.size());
        }
        out += "," + v;
    }
    out += fmt::format(",{},{},{},{},{},{},{},{},{}\n", to_string(run.status), s.pattern_formed, s.peak_count,
                       g17(s.spatial_range), g17(s.peak_density),
                       s.oscillation ? g17(s.oscillation->period) : "none",
                       s.extinct_phenotype ? to_string(*s.extinct_phenotype) : "none", optional_text(s.blowup_time),
                       g17(s.mass_drift));
    return out;
}

void write_run(RunDirectory& dir, const ExperimentConfig& cfg, const RunArtifacts& run, const PatternSummary& s) {
    const auto& id = cfg.run_id;
    dir.write("config.txt", emit_config(cfg));
    if (run.geometry == Geometry::Square) {
        std::string index = "index,t,file\n";
        std::string scale = "file,min,max\n";
        for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
            const auto& snap = run.snapshots[k];
            const auto base = fmt::format("{}_field_{:04}", id, k);
            dir.write(base + ".csv", field_csv(run, snap));
            index += fmt::format("{},{},{}\n", k, g17(snap.t), base + ".csv");
            const std::pair<const char*, const std::vector<double>*> fields[] = {
                {"n0", &snap.n0}, {"n1", &snap.n1}, {"s", &snap.s}};
            for (const auto& [name, f] : fields) {
                const auto [lo, hi] = std::minmax_element(f->begin(), f->end());
                const auto file = fmt::format("{}_{}.pgm", base, name);
                dir.write(file, pgm(*f, run.side, *lo, *hi));
                scale += fmt::format("{},{},{}\n", file, g17(*lo), g17(*hi));
            }
        }
        dir.write(id + "_fields.csv", index);
        dir.write(id + "_pgm_scale.csv", scale);
    } else {
        dir.write(id + "_snapshots.csv", snapshots_csv(run));
    }
    dir.write(id + "_probe.csv", probe_csv(run));
    dir.write(id + "_max_density.csv", max_density_csv(run));
    dir.write("metadata.txt", metadata_text(cfg, run, s));
    dir.write_manifest();
}

std::pair<ExperimentConfig, RunArtifacts> read_run(const fs::path& dir) {
    ExperimentConfig cfg = parse_config(read_file(dir / "config.txt"));
    const auto& id = cfg.run_id;
    RunArtifacts run;
    run.run_id = id;
    run.variant = cfg.model.variant;

    if (cfg.mode == Mode::Sim2D) {
        const auto grid = Grid2D::from_spacing(cfg.L, cfg.dx);
        run.geometry = Geometry::Square;
        run.side = static_cast<std::size_t>(grid.N);
        run.cell_measure.assign(grid.cells(), grid.dx * grid.dx);
        for (int i = 0; i < grid.N; ++i) {
            run.coords.push_back((i + 0.5) * grid.dx);
        }
        std::istringstream index(read_file(dir / (id + "_fields.csv")));
        std::string line;
        std::getline(index, line);
        while (std::getline(index, line)) {
            if (line.empty()) {
                continue;
            }
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            FieldSnapshot snap;
            snap.t = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
            for (const auto& row : read_csv(dir / line.substr(c2 + 1), 5)) {
                snap.n0.push_back(row[2]);
                snap.n1.push_back(row[3]);
                snap.s.push_back(row[4]);
            }
            if (snap.n0.size() != grid.cells()) {
                throw std::runtime_error("field file does not match the grid");
            }
            run.snapshots.push_back(std::move(snap));
        }
    } else if (cfg.mode == Mode::Sim1D || cfg.mode == Mode::Radial) {
        std::size_t n = 0;
        if (cfg.mode == Mode::Radial) {
            const auto grid = RadialGrid::from_spacing(cfg.L_r, cfg.dr);
            run.geometry = Geometry::Radial;
            n = static_cast<std::size_t>(grid.n_cells);
            for (int i = 0; i < grid.n_cells; ++i) {
                run.cell_measure.push_back(grid.volume(i));
            }
        } else {
            const auto grid = Grid1D::from_spacing(cfg.L, cfg.dx);
            run.geometry = Geometry::Line;
            n = static_cast<std::size_t>(grid.n_cells);
            run.cell_measure.assign(n, grid.dx);
        }
        run.side = n;
        const auto rows = read_csv(dir / (id + "_snapshots.csv"), 5);
        if (rows.size() % n != 0) {
            throw std::runtime_error("snapshot file does not match the grid");
        }
        for (std::size_t r = 0; r < rows.size(); r += n) {
            FieldSnapshot snap;
            snap.t = rows[r][0];
            for (std::size_t i = 0; i < n; ++i) {
                if (r == 0) {
                    run.coords.push_back(rows[i][1]);
                }
                snap.n0.push_back(rows[r + i][2]);
                snap.n1.push_back(rows[r + i][3]);
                snap.s.push_back(rows[r + i][4]);
            }
            run.snapshots.push_back(std::move(snap));
        }
    } else {
        throw std::runtime_error(fmt::format("'{}' is not a simulation run directory", dir.string()));
    }

    for (const auto& row : read_csv(dir / (id + "_probe.csv"), 4)) {
        run.probe.push_back({row[0], row[1], row[2], row[3]});
    }
    for (const auto& row : read_csv(dir / (id + "_max_density.csv"), 2)) {
        run.max_density.emplace_back(row[0], row[1]);
    }

    // Status lines from the metadata header.
    if (fs::exists(dir / "metadata.txt")) {
        std::istringstream meta(read_file(dir / "metadata.txt"));
        std::string line;
        std::map<std::string, std::string> kv;
        while (std::getline(meta, line) && line != "[config]") {
            const auto eq = line.find(" = ");
            if (eq != std::string::npos) {
                kv[line.substr(0, eq)] = line.substr(eq + 3);
            }
        }
        for (RunStatus s : {RunStatus::Completed, RunStatus::Converged, RunStatus::BlowUp, RunStatus::Stiffness,
                            RunStatus::NegativeDensity}) {
            if (kv["status"] == to_string(s)) {
                run.status = s;
            }
        }
        if (kv.count("t_blowup") && kv["t_blowup"] != "none") {
            run.t_blowup = std::stod(kv["t_blowup"]);
        }
        if (kv.count("diagnostic") && kv["diagnostic"] != "none") {
            run.diagnostic = kv["diagnostic"];
        }
    }
    run.t_final = run.snapshots.empty() ? 0.0 : run.snapshots.back().t;
    if (!run.probe.empty()) {
        run.t_final = std::max(run.t_final, run.probe.back().t);
    }
    return {std::move(cfg), std::move(run)};
}

} // namespace chemoswitch
