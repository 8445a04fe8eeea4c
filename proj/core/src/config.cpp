#include "chemoswitch/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace chemoswitch {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    while (true) {
        const auto comma = s.find(',');
        const auto item = trim(s.substr(0, comma));
        if (!item.empty()) {
            out.emplace_back(item);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        s.remove_prefix(comma + 1);
    }
    return out;
}

struct BadValue : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double to_double(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw BadValue(fmt::format("expected a number, got '{}'", s));
    }
    return v;
}

long long to_integer(std::string_view s) {
    s = trim(s);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw BadValue(fmt::format("expected an integer, got '{}'", s));
    }
    return v;
}

std::uint64_t to_unsigned(std::string_view s) {
    s = trim(s);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw BadValue(fmt::format("expected an unsigned integer, got '{}'", s));
    }
    return v;
}

bool to_bool(std::string_view s) {
    const auto v = lower(trim(s));
    if (v == "true" || v == "yes" || v == "1" || v == "on") {
        return true;
    }
    if (v == "false" || v == "no" || v == "0" || v == "off") {
        return false;
    }
    throw BadValue(fmt::format("expected a boolean, got '{}'", s));
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? ", " : "") + fmt_double(v[i]);
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct KeySpec {
    std::string key;
    Setter set;
    Getter get;
};

KeySpec num(std::string key, double ExperimentConfig::*field) {
    return {std::move(key), [field](ExperimentConfig& c, std::string_view v) { c.*field = to_double(v); },
            [field](const ExperimentConfig& c) { return fmt_double(c.*field); }};
}

template <class Access>
KeySpec num_at(std::string key, Access access) {
    return {std::move(key), [access](ExperimentConfig& c, std::string_view v) { access(c) = to_double(v); },
            [access](const ExperimentConfig& c) {
                return fmt_double(access(const_cast<ExperimentConfig&>(c)));
            }};
}

KeySpec integer(std::string key, int ExperimentConfig::*field) {
    return {std::move(key),
            [field](ExperimentConfig& c, std::string_view v) {
                const auto x = to_integer(v);
                if (x < -1000000000LL || x > 1000000000LL) {
                    throw BadValue("integer out of range");
                }
                c.*field = static_cast<int>(x);
            },
            [field](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

KeySpec text(std::string key, std::string ExperimentConfig::*field) {
    return {std::move(key), [field](ExperimentConfig& c, std::string_view v) { c.*field = std::string(trim(v)); },
            [field](const ExperimentConfig& c) { return c.*field; }};
}

template <class T>
KeySpec dim(std::string key, T DimensionalParams::*field) {
    return {std::move(key),
            [field](ExperimentConfig& c, std::string_view v) {
                if (!c.dimensional) {
                    c.dimensional = DimensionalParams{};
                }
                (*c.dimensional).*field = to_double(v);
            },
            [field](const ExperimentConfig& c) {
                return c.dimensional ? fmt_double((*c.dimensional).*field) : std::string();
            }};
}

const std::vector<KeySpec>& registry() {
    static const std::vector<KeySpec> keys = [] {
        std::vector<KeySpec> k;
        k.push_back(text("run.id", &ExperimentConfig::run_id));
        k.push_back({"run.mode", [](ExperimentConfig& c, std::string_view v) { c.mode = parse_mode(v); },
                     [](const ExperimentConfig& c) { return std::string(to_string(c.mode)); }});
        k.push_back(text("run.output_dir", &ExperimentConfig::output_dir));
        k.push_back(integer("run.workers", &ExperimentConfig::workers));

        k.push_back({"model.variant",
                     [](ExperimentConfig& c, std::string_view v) { c.model.variant = parse_model_variant(trim(v)); },
                     [](const ExperimentConfig& c) { return std::string(to_string(c.model.variant)); }});
        k.push_back({"model.case",
                     [](ExperimentConfig& c, std::string_view v) {
                         c.model.switching.kind = parse_switching_case(trim(v));
                     },
                     [](const ExperimentConfig& c) { return std::string(to_string(c.model.switching.kind)); }});
        k.push_back(num_at("model.D", [](ExperimentConfig& c) -> double& { return c.model.D; }));
        k.push_back(num_at("model.chi", [](ExperimentConfig& c) -> double& { return c.model.chi; }));
        k.push_back(num_at("model.mu", [](ExperimentConfig& c) -> double& { return c.model.switching.mu; }));
        k.push_back(num_at("model.q", [](ExperimentConfig& c) -> double& { return c.model.switching.q; }));
        k.push_back(
            num_at("model.nbar_ref", [](ExperimentConfig& c) -> double& { return c.model.switching.nbar_ref; }));

        k.push_back(dim("dimensional.D_n", &DimensionalParams::D_n));
        k.push_back(dim("dimensional.D_s", &DimensionalParams::D_s));
        k.push_back(dim("dimensional.chi_1", &DimensionalParams::chi_1));
        k.push_back(dim("dimensional.alpha_0", &DimensionalParams::alpha_0));
        k.push_back(dim("dimensional.eta", &DimensionalParams::eta));
        k.push_back(dim("dimensional.sigma", &DimensionalParams::sigma));

        k.push_back(num("grid.L", &ExperimentConfig::L));
        k.push_back(num("grid.dx", &ExperimentConfig::dx));
        k.push_back(integer("grid.N", &ExperimentConfig::N));

        k.push_back(num("radial.L_r", &ExperimentConfig::L_r));
        k.push_back(num("radial.dr", &ExperimentConfig::dr));
        k.push_back(num("radial.blowup_factor", &ExperimentConfig::blowup_factor));
        k.push_back(num("radial.converge_window", &ExperimentConfig::converge_window));
        k.push_back(num("radial.converge_tol", &ExperimentConfig::converge_tol));

        k.push_back(num_at("time.t_end", [](ExperimentConfig& c) -> double& { return c.time.t_end; }));
        k.push_back(num_at("time.dt_init", [](ExperimentConfig& c) -> double& { return c.time.dt_init; }));
        k.push_back(num_at("time.dt_min", [](ExperimentConfig& c) -> double& { return c.time.dt_min; }));
        k.push_back(num_at("time.dt_max", [](ExperimentConfig& c) -> double& { return c.time.dt_max; }));
        k.push_back(num_at("time.rel_tol", [](ExperimentConfig& c) -> double& { return c.time.rel_tol; }));
        k.push_back(num_at("time.abs_tol", [](ExperimentConfig& c) -> double& { return c.time.abs_tol; }));
        k.push_back(
            num_at("time.snapshot_every", [](ExperimentConfig& c) -> double& { return c.time.snapshot_every; }));
        k.push_back(num_at("time.probe_every", [](ExperimentConfig& c) -> double& { return c.time.probe_every; }));
        k.push_back(num("time.tau", &ExperimentConfig::tau));
        k.push_back({"time.snapshot_times",
                     [](ExperimentConfig& c, std::string_view v) {
                         c.snapshot_times.clear();
                         for (const auto& item : split_list(v)) {
                             c.snapshot_times.push_back(to_double(item));
                         }
                     },
                     [](const ExperimentConfig& c) { return fmt_list(c.snapshot_times); }});

        k.push_back(num("ic.nbar", &ExperimentConfig::nbar));
        k.push_back(num("ic.amplitude", &ExperimentConfig::amplitude));
        k.push_back(num("ic.A_focus", &ExperimentConfig::A_focus));
        k.push_back({"ic.sampling",
                     [](ExperimentConfig& c, std::string_view v) {
                         const auto s = lower(trim(v));
                         if (s == "cell_average") {
                             c.sampling = IcSampling::CellAverage;
                         } else if (s == "cell_center") {
                             c.sampling = IcSampling::CellCenter;
                         } else {
                             throw BadValue(fmt::format("expected cell_average or cell_center, got '{}'", v));
                         }
                     },
                     [](const ExperimentConfig& c) {
                         return std::string(c.sampling == IcSampling::CellAverage ? "cell_average"
                                                                                  : "cell_center");
                     }});
        k.push_back({"ic.seed", [](ExperimentConfig& c, std::string_view v) { c.seed = to_unsigned(v); },
                     [](const ExperimentConfig& c) { return std::to_string(c.seed); }});
        k.push_back(text("ic.generator", &ExperimentConfig::generator));

        auto an = [&k](std::string key, double AnalysisOptions::*field) {
            k.push_back({std::move(key),
                         [field](ExperimentConfig& c, std::string_view v) { c.analysis.*field = to_double(v); },
                         [field](const ExperimentConfig& c) { return fmt_double(c.analysis.*field); }});
        };
        an("analysis.pattern_threshold", &AnalysisOptions::pattern_threshold);
        an("analysis.peak_threshold_ratio", &AnalysisOptions::peak_threshold_ratio);
        an("analysis.smoothing_sigma", &AnalysisOptions::smoothing_sigma);
        an("analysis.oscillation_t0", &AnalysisOptions::oscillation_t0);
        an("analysis.oscillation_t1", &AnalysisOptions::oscillation_t1);
        an("analysis.extinction_threshold", &AnalysisOptions::extinction_threshold);
        k.push_back(num_at("analysis.min_variance_fraction", [](ExperimentConfig& c) -> double& {
            return c.analysis.oscillation.min_variance_fraction;
        }));
        k.push_back(num_at("analysis.max_envelope_decay", [](ExperimentConfig& c) -> double& {
            return c.analysis.oscillation.max_envelope_decay;
        }));

        k.push_back(num_at("analysis.min_cycles", [](ExperimentConfig& c) -> double& {
            return c.analysis.oscillation.min_cycles;
        }));

        k.push_back(num("stability.n0_mean", &ExperimentConfig::n0_mean));

        k.push_back({"sweep.base", [](ExperimentConfig& c, std::string_view v) { c.sweep_mode = parse_mode(v); },
                     [](const ExperimentConfig& c) { return std::string(to_string(c.sweep_mode)); }});
        k.push_back({"sweep.combine",
                     [](ExperimentConfig& c, std::string_view v) {
                         const auto s = lower(trim(v));
                         if (s == "product") {
                             c.sweep_combine = SweepCombine::Product;
                         } else if (s == "zip") {
                             c.sweep_combine = SweepCombine::Zip;
                         } else {
                             throw BadValue(fmt::format("expected product or zip, got '{}'", v));
                         }
                     },
                     [](const ExperimentConfig& c) {
                         return std::string(c.sweep_combine == SweepCombine::Product ? "product" : "zip");
                     }});

        k.push_back(num("eigenmap.chi_min", &ExperimentConfig::chi_min));
        k.push_back(num("eigenmap.chi_max", &ExperimentConfig::chi_max));
        k.push_back(integer("eigenmap.chi_points", &ExperimentConfig::chi_points));
        k.push_back(num("eigenmap.mu_min", &ExperimentConfig::mu_min));
        k.push_back(num("eigenmap.mu_max", &ExperimentConfig::mu_max));
        k.push_back(integer("eigenmap.mu_points", &ExperimentConfig::mu_points));
        k.push_back({"eigenmap.mu_log", [](ExperimentConfig& c, std::string_view v) { c.mu_log = to_bool(v); },
                     [](const ExperimentConfig& c) { return std::string(c.mu_log ? "true" : "false"); }});
        return k;
    }();
    return keys;
}

const KeySpec* find_key(std::string_view canonical_lower) {
    for (const auto& k : registry()) {
        if (lower(k.key) == canonical_lower) {
            return &k;
        }
    }
    return nullptr;
}

// Resolves a possibly unqualified key. Returns nullptr with `why` set on failure.
const KeySpec* resolve(std::string_view raw, std::string& why) {
    const auto key = lower(raw);
    if (key.find('.') != std::string::npos) {
        if (const auto* k = find_key(key)) {
            return k;
        }
        why = fmt::format("unknown key '{}'", raw);
        return nullptr;
    }
    const KeySpec* hit = nullptr;
    std::vector<std::string> matches;
    for (const auto& k : registry()) {
        const auto lk = lower(k.key);
        if (lk.substr(lk.find('.') + 1) == key) {
            hit = &k;
            matches.push_back(k.key);
        }
    }
    if (matches.size() == 1) {
        return hit;
    }
    if (matches.empty()) {
        why = fmt::format("unknown key '{}'", raw);
    } else {
        why = fmt::format("key '{}' is ambiguous ({}); qualify it with its section", raw,
                          fmt::join(matches, ", "));
    }
    return nullptr;
}

void require(bool ok, const std::string& key, const std::string& message) {
    if (!ok) {
        throw ConfigError(0, key + ": " + message);
    }
}

Mode effective_mode(const ExperimentConfig& c) { return c.mode == Mode::Sweep ? c.sweep_mode : c.mode; }

void apply_mode_defaults(ExperimentConfig& c) {
    const Mode m = effective_mode(c);
    auto is_default = [&](const char* key) { return c.provenance_of(key) == Provenance::Default; };
    if (m == Mode::Sim2D) {
        if (is_default("grid.dx")) {
            c.dx = 0.5;
        }
        if (is_default("time.snapshot_every")) {
            c.time.snapshot_every = 50.0;
        }
    }
    if (m == Mode::Radial) {
        if (is_default("time.t_end")) {
            c.time.t_end = 1e4;
        }
        if (is_default("time.snapshot_every")) {
            c.time.snapshot_every = 0.0;
        }
        if (is_default("time.probe_every")) {
            c.time.probe_every = 1.0;
        }
        if (is_default("time.snapshot_times")) {
            c.snapshot_times = {1.0, 10.0, 100.0, 1000.0};
        }
    }
    if (c.N > 0) {
        c.dx = c.L / c.N;
        c.provenance["grid.dx"] = Provenance::Derived;
    }
    if (c.dimensional) {
        const auto nd = nondimensionalize(*c.dimensional);
        c.model.D = nd.D;
        c.model.chi = nd.chi;
        c.scales = nd.scales;
        c.provenance["model.D"] = Provenance::Derived;
        c.provenance["model.chi"] = Provenance::Derived;
    }
}

} // namespace

std::string_view to_string(Mode m) {
    switch (m) {
    case Mode::Stability: return "Stability";
    case Mode::Sim1D: return "Sim1D";
    case Mode::Sim2D: return "Sim2D";
    case Mode::Radial: return "Radial";
    case Mode::Sweep: return "Sweep";
    case Mode::EigenMap: return "EigenMap";
    }
    return "?";
}

Mode parse_mode(std::string_view s) {
    const auto v = lower(trim(s));
    for (Mode m : {Mode::Stability, Mode::Sim1D, Mode::Sim2D, Mode::Radial, Mode::Sweep, Mode::EigenMap}) {
        if (lower(to_string(m)) == v) {
            return m;
        }
    }
    throw BadValue(fmt::format("unknown mode '{}'", s));
}

std::string_view to_string(Provenance p) {
    switch (p) {
    case Provenance::Default: return "default";
    case Provenance::User: return "user";
    case Provenance::Derived: return "derived";
    }
    return "?";
}

ConfigError::ConfigError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, message) : message), line_(line) {}

Provenance ExperimentConfig::provenance_of(const std::string& key) const {
    const auto it = provenance.find(key);
    return it == provenance.end() ? Provenance::Default : it->second;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& k : registry()) {
        out.push_back(k.key);
    }
    return out;
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    std::string why;
    const auto* k = resolve(key, why);
    if (!k) {
        throw ConfigError(0, why);
    }
    try {
        k->set(cfg, value);
    } catch (const std::exception& e) {
        throw ConfigError(0, fmt::format("{}: {}", k->key, e.what()));
    }
    cfg.provenance[k->key] = Provenance::User;
}

void validate_config(const ExperimentConfig& c) {
    require(!c.run_id.empty() && c.run_id.find_first_of("/\\") == std::string::npos, "run.id",
            "must be a non-empty name without path separators");
    require(c.workers >= 1, "run.workers", "must be at least 1");
    require(c.model.D > 0.0, "model.D", "must be positive");
    require(c.model.chi >= 0.0, "model.chi", "must be nonnegative");
    if (c.model.variant == ModelVariant::TwoPhenotype && c.model.switching.kind != SwitchingCase::NoSwitching) {
        require(c.model.switching.mu > 0.0, "model.mu", "must be positive");
        require(c.model.switching.q > 0.0, "model.q", "must be positive");
    }
    require(c.model.switching.nbar_ref > 0.0 && c.model.switching.nbar_ref < 1.0, "model.nbar_ref",
            "must lie in (0, 1)");

    const Mode m = effective_mode(c);
    require(c.L > 0.0, "grid.L", "must be positive");
    require(c.dx > 0.0, "grid.dx", "must be positive");
    require(c.N >= 0, "grid.N", "must be nonnegative");
    if (m == Mode::Sim1D) {
        require(std::lround(c.L / c.dx) >= 4, "grid.dx", "gives fewer than 4 cells");
    }
    if (m == Mode::Sim2D) {
        require(std::lround(c.L / c.dx) >= 8, "grid.dx", "gives fewer than 8 cells per side");
        require(c.tau > 0.0, "time.tau", "must be positive");
    }
    require(c.L_r > 0.0, "radial.L_r", "must be positive");
    require(c.dr > 0.0, "radial.dr", "must be positive");
    if (m == Mode::Radial) {
        require(std::lround(c.L_r / c.dr) >= 4, "radial.dr", "gives fewer than 4 cells");
    }
    require(c.blowup_factor > 1.0, "radial.blowup_factor", "must exceed 1");
    require(c.converge_window > 0.0, "radial.converge_window", "must be positive");
    require(c.converge_tol > 0.0, "radial.converge_tol", "must be positive");

    try {
        c.time.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, std::string("time: ") + e.what());
    }
    for (double t : c.snapshot_times) {
        require(t >= 0.0, "time.snapshot_times", "must be nonnegative");
    }

    require(c.nbar > 0.0 && c.nbar < 1.0, "ic.nbar", "must lie in (0, 1)");
    require(c.amplitude >= 0.0, "ic.amplitude", "must be nonnegative");
    require(c.A_focus > 0.0, "ic.A_focus", "must be positive");
    require(c.generator == "mt19937_64", "ic.generator", "only mt19937_64 is supported");
    require(c.n0_mean > 0.0 && c.n0_mean < 1.0, "stability.n0_mean", "must lie in (0, 1)");

    require(c.analysis.pattern_threshold >= 0.0, "analysis.pattern_threshold", "must be nonnegative");
    require(c.analysis.peak_threshold_ratio >= 0.0, "analysis.peak_threshold_ratio", "must be nonnegative");
    require(c.analysis.smoothing_sigma >= 0.0, "analysis.smoothing_sigma", "must be nonnegative");
    require(c.analysis.extinction_threshold >= 0.0, "analysis.extinction_threshold", "must be nonnegative");
    require(c.analysis.oscillation.min_variance_fraction >= 0.0 &&
                c.analysis.oscillation.min_variance_fraction <= 1.0,
            "analysis.min_variance_fraction", "must lie in [0, 1]");
    require(c.analysis.oscillation.min_cycles > 0.0, "analysis.min_cycles", "must be positive");
    require(c.analysis.oscillation.max_envelope_decay >= 0.0, "analysis.max_envelope_decay",
            "must be nonnegative");

    if (c.mode == Mode::Sweep) {
        require(c.sweep_mode == Mode::Sim1D || c.sweep_mode == Mode::Sim2D || c.sweep_mode == Mode::Radial,
                "sweep.base", "must be Sim1D, Sim2D or Radial");
        require(!c.sweep_axes.empty(), "sweep", "a Sweep needs at least one sweep.<key> axis");
        if (c.sweep_combine == SweepCombine::Zip) {
            for (const auto& a : c.sweep_axes) {
                require(a.values.size() == c.sweep_axes.front().values.size(), "sweep." + a.key,
                        "zip axes must have equal lengths");
            }
        }
    }
    if (c.mode == Mode::EigenMap) {
        require(c.chi_points >= 1 && c.mu_points >= 1, "eigenmap", "point counts must be at least 1");
        require(c.chi_min > 0.0 && c.chi_min <= c.chi_max, "eigenmap.chi_min", "need 0 < chi_min <= chi_max");
        require(c.mu_min > 0.0 && c.mu_min <= c.mu_max, "eigenmap.mu_min", "need 0 < mu_min <= mu_max");
    }
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    std::map<std::string, int> line_of;
    bool have_mode = false;

    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(lineno, fmt::format("expected 'key = value', got '{}'", line));
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError(lineno, "empty key or value");
        }

        const auto lk = lower(key);
        if (lk.rfind("sweep.", 0) == 0 && lk != "sweep.base" && lk != "sweep.combine") {
            std::string why;
            const auto* target = resolve(key.substr(6), why);
            if (!target) {
                throw ConfigError(lineno, why);
            }
            SweepAxis axis{target->key, split_list(value)};
            if (axis.values.empty()) {
                throw ConfigError(lineno, "sweep axis has no values");
            }
            // Check every value parses now, so errors point at this line.
            for (const auto& v : axis.values) {
                ExperimentConfig probe;
                try {
                    target->set(probe, v);
                } catch (const std::exception& e) {
                    throw ConfigError(lineno, fmt::format("sweep.{}: {}", target->key, e.what()));
                }
            }
            for (const auto& a : cfg.sweep_axes) {
                if (a.key == axis.key) {
                    throw ConfigError(lineno, fmt::format("duplicate sweep axis '{}'", axis.key));
                }
            }
            line_of["sweep." + axis.key] = lineno;
            cfg.sweep_axes.push_back(std::move(axis));
            continue;
        }

        std::string why;
        const auto* k = resolve(key, why);
        if (!k) {
            throw ConfigError(lineno, why);
        }
        if (line_of.count(k->key) != 0) {
            throw ConfigError(lineno, fmt::format("'{}' already set on line {}", k->key, line_of[k->key]));
        }
        try {
            k->set(cfg, value);
        } catch (const std::exception& e) {
            throw ConfigError(lineno, fmt::format("{}: {}", k->key, e.what()));
        }
        cfg.provenance[k->key] = Provenance::User;
        line_of[k->key] = lineno;
        have_mode = have_mode || k->key == "run.mode";
    }

    if (!have_mode) {
        throw ConfigError(0, "missing required key run.mode");
    }
    if (cfg.dimensional) {
        for (const char* k : {"model.D", "model.chi"}) {
            if (line_of.count(k) != 0) {
                throw ConfigError(line_of[k], fmt::format("{} conflicts with the dimensional block", k));
            }
        }
    }

    try {
        apply_mode_defaults(cfg);
        validate_config(cfg);
    } catch (const ConfigError& e) {
        // Attach the line of the offending key when there is one.
        const std::string msg = e.what();
        const auto colon = msg.find(':');
        const auto key = msg.substr(0, colon);
        const auto it = line_of.find(key);
        throw ConfigError(it == line_of.end() ? 0 : it->second, msg);
    } catch (const std::exception& e) {
        const auto it = line_of.find("dimensional.D_n");
        throw ConfigError(it == line_of.end() ? 0 : it->second, std::string("dimensional: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(0, fmt::format("cannot open config '{}'", path));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& cfg) {
    std::string out;
    std::string section;
    for (const auto& k : registry()) {
        const auto sec = k.key.substr(0, k.key.find('.'));
        if (sec == "dimensional" && !cfg.dimensional) {
            continue;
        }
        if (sec != section) {
            if (!section.empty()) {
                out += "\n";
            }
            section = sec;
        }
        const auto prov = cfg.provenance_of(k.key);
        const auto value = k.get(cfg);
        if (prov == Provenance::Derived) {
            out += fmt::format("# {} = {}  (derived)\n", k.key, value);
        } else if (k.key == "time.snapshot_times" && value.empty()) {
            out += "# time.snapshot_times =  (none)\n";
        } else {
            out += fmt::format("{} = {}\n", k.key, value);
        }
    }
    if (!cfg.sweep_axes.empty()) {
        out += "\n";
        for (const auto& a : cfg.sweep_axes) {
            out += fmt::format("sweep.{} = {}\n", a.key, fmt::join(a.values, ", "));
        }
    }
    return out;
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& cfg) {
    if (cfg.mode != Mode::Sweep) {
        return {cfg};
    }
    std::vector<std::vector<std::size_t>> combos;
    if (cfg.sweep_combine == SweepCombine::Zip) {
        for (std::size_t i = 0; i < cfg.sweep_axes.front().values.size(); ++i) {
            combos.emplace_back(cfg.sweep_axes.size(), i);
        }
    } else {
        std::vector<std::size_t> idx(cfg.sweep_axes.size(), 0);
        while (true) {
            combos.push_back(idx);
            std::size_t a = idx.size();
            while (a-- > 0) {
                if (++idx[a] < cfg.sweep_axes[a].values.size()) {
                    break;
                }
                idx[a] = 0;
            }
            if (a == static_cast<std::size_t>(-1)) {
                break;
            }
        }
    }

    std::vector<ExperimentConfig> runs;
    for (std::size_t r = 0; r < combos.size(); ++r) {
        ExperimentConfig c = cfg;
        c.mode = cfg.sweep_mode;
        c.sweep_axes.clear();
        c.run_id = fmt::format("{}_{:03}", cfg.run_id, r);
        for (std::size_t a = 0; a < cfg.sweep_axes.size(); ++a) {
            const auto& axis = cfg.sweep_axes[a];
            set_config_value(c, axis.key, axis.values[combos[r][a]]);
        }
        if (c.dimensional) {
            const auto nd = nondimensionalize(*c.dimensional);
            c.model.D = nd.D;
            c.model.chi = nd.chi;
            c.scales = nd.scales;
        }
        if (c.N > 0) {
            c.dx = c.L / c.N;
        }
        try {
            validate_config(c);
        } catch (const ConfigError& e) {
            throw ConfigError(0, fmt::format("sweep run {}: {}", c.run_id, e.what()));
        }
        runs.push_back(std::move(c));
    }
    return runs;
}

} // namespace chemoswitch
