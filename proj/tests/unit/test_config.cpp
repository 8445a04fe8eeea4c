#include "chemoswitch/config.hpp"

#include <doctest.h>

#include <filesystem>
#include <string>

using namespace chemoswitch;

namespace {

int error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("minimal config takes defaults") {
    const auto c = parse_config("run.mode = sim1d\n");
    CHECK(c.mode == Mode::Sim1D);
    CHECK(c.L == 40.0);
    CHECK(c.dx == 0.1);
    CHECK(c.model.D == 1.0);
    CHECK(c.provenance_of("grid.L") == Provenance::Default);
    CHECK(c.provenance_of("run.mode") == Provenance::User);
}

TEST_CASE("mode-dependent defaults") {
    const auto sq = parse_config("run.mode = sim2d\n");
    CHECK(sq.dx == 0.5);
    const auto rad = parse_config("mode = radial\n");
    CHECK(rad.time.t_end == 1e4);
    CHECK(rad.snapshot_times == std::vector<double>{1.0, 10.0, 100.0, 1000.0});
    const auto n = parse_config("run.mode = sim2d\ngrid.N = 80\n");
    CHECK(n.dx == 0.5);
    CHECK(n.provenance_of("grid.dx") == Provenance::Derived);
}

TEST_CASE("keys are case-insensitive and may be unqualified") {
    const auto c = parse_config("RUN.MODE = Sim1D\nchi = 12.5  # trailing comment\nCase = b2\nq = 3\n");
    CHECK(c.model.chi == 12.5);
    CHECK(c.model.switching.kind == SwitchingCase::B2);
    CHECK(c.model.switching.q == 3.0);
}

TEST_CASE("round trip is lossless") {
    const std::string text = "run.id = rt\nrun.mode = sim1d\nmodel.chi = 0.1\nmodel.mu = 3.3333333333333335\n"
                             "model.case = C2\nmodel.q = 30\ngrid.L = 17.3\ntime.t_end = 123.456\n"
                             "ic.seed = 18446744073709551615\nanalysis.min_cycles = 2.5\n";
    const auto a = parse_config(text);
    const auto b = parse_config(emit_config(a));
    CHECK(emit_config(b) == emit_config(a));
    CHECK(b.model.chi == a.model.chi);
    CHECK(b.model.switching.mu == a.model.switching.mu);
    CHECK(b.seed == 18446744073709551615ull);
    CHECK(b.L == 17.3);
}

TEST_CASE("dimensional block derives D and chi") {
    const auto c = parse_config("run.mode = stability\ndimensional.D_n = 2\ndimensional.D_s = 4\n"
                                "dimensional.chi_1 = 8\ndimensional.alpha_0 = 1\ndimensional.eta = 1\n"
                                "dimensional.sigma = 1\n");
    CHECK(c.model.D == doctest::Approx(0.5));
    CHECK(c.provenance_of("model.chi") == Provenance::Derived);
    REQUIRE(c.scales.has_value());
    const auto again = parse_config(emit_config(c));
    CHECK(again.model.chi == c.model.chi);
    CHECK(error_line("run.mode = stability\nmodel.chi = 3\ndimensional.D_n = 2\n") == 2);
}

TEST_CASE("errors carry line numbers") {
    CHECK(error_line("run.mode = sim1d\n\nbogus.key = 1\n") == 3);
    CHECK(error_line("run.mode = sim1d\nmodel.chi = abc\n") == 2);
    CHECK(error_line("run.mode = sim1d\nno equals sign\n") == 2);
    CHECK(error_line("run.mode = sim1d\nmodel.chi = 1\nchi = 2\n") == 3);
    CHECK(error_line("run.mode = sim1d\nmodel.mu = -1\n") == 2);
    CHECK(error_line("run.mode = warp\n") == 1);
    CHECK(error_line("model.chi = 1\n") == 0);
}

TEST_CASE("sweep expansion") {
    const auto c = parse_config("run.id = sw\nrun.mode = sweep\nsweep.base = sim1d\nmodel.case = B1\n"
                                "sweep.model.chi = 3, 5, 10\nsweep.model.q = 1, 30\n");
    REQUIRE(c.sweep_axes.size() == 2);
    const auto runs = expand_sweep(c);
    REQUIRE(runs.size() == 6);
    CHECK(runs[0].run_id == "sw_000");
    CHECK(runs[0].mode == Mode::Sim1D);
    CHECK(runs[0].model.chi == 3.0);
    CHECK(runs[1].model.switching.q == 30.0);
    CHECK(runs[5].model.chi == 10.0);
    CHECK(runs[5].model.switching.kind == SwitchingCase::B1);

    const auto z = parse_config("run.mode = sweep\nsweep.base = sim1d\nsweep.combine = zip\n"
                                "sweep.chi = 1, 2\nsweep.mu = 0.5, 4\n");
    const auto zr = expand_sweep(z);
    REQUIRE(zr.size() == 2);
    CHECK(zr[1].model.chi == 2.0);
    CHECK(zr[1].model.switching.mu == 4.0);

    CHECK(error_line("run.mode = sweep\nsweep.chi = 1, x\n") == 2);
    CHECK(error_line("run.mode = sweep\nsweep.chi = 1\nsweep.model.chi = 2\n") == 3);
}

TEST_CASE("set_config_value") {
    ExperimentConfig c;
    set_config_value(c, "model.chi", "7");
    CHECK(c.model.chi == 7.0);
    CHECK(c.provenance_of("model.chi") == Provenance::User);
    CHECK_THROWS_AS(set_config_value(c, "nope.key", "1"), ConfigError);
    CHECK_FALSE(config_keys().empty());
}

TEST_CASE("shipped configs parse and round-trip") {
    int seen = 0;
    for (const auto& e : std::filesystem::directory_iterator(CHEMOSWITCH_CONFIG_DIR)) {
        if (e.path().extension() != ".cfg") {
            continue;
        }
        CAPTURE(e.path().string());
        const auto c = load_config(e.path().string());
        CHECK(emit_config(parse_config(emit_config(c))) == emit_config(c));
        if (c.mode == Mode::Sweep) {
            CHECK(expand_sweep(c).size() >= 2);
        }
        ++seen;
    }
    CHECK(seen >= 5);
}

}
