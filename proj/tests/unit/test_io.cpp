#include "chemoswitch/experiment.hpp"
#include "chemoswitch/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

using namespace chemoswitch;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) {
            out[fs::relative(e.path(), dir).string()] = slurp(e.path());
        }
    }
    return out;
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("chemoswitch_io_" + name);
    fs::remove_all(p);
    return p;
}

const char* kShort1D = "run.id = io1d\nrun.mode = sim1d\nmodel.case = A\nmodel.chi = 10\n"
                       "grid.L = 10\ntime.t_end = 5\ntime.snapshot_every = 1\n";

} // namespace

TEST_SUITE("io") {

TEST_CASE("sha256 known answers") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("manifest lists every file with its digest") {
    const auto root = scratch("manifest");
    {
        RunDirectory d(root / "r");
        d.write("b.txt", "bee");
        d.write("a.txt", "ay");
        d.write_manifest();
    }
    const auto m = slurp(root / "r" / "manifest.txt");
    CHECK(m == sha256_hex("ay") + "  a.txt\n" + sha256_hex("bee") + "  b.txt\n");
    fs::remove_all(root);
}

TEST_CASE("identical runs write byte-identical trees") {
    const auto cfg = parse_config(kShort1D);
    const auto a = scratch("det_a"), b = scratch("det_b");
    run_experiment(cfg, a);
    run_experiment(cfg, b);
    const auto ta = tree(a), tb = tree(b);
    CHECK(ta.size() >= 4);
    CHECK(ta == tb);

    // Every listed digest matches the file on disk.
    std::istringstream manifest(ta.at("io1d/manifest.txt"));
    std::string digest, name;
    int listed = 0;
    while (manifest >> digest >> name) {
        CHECK(sha256_hex(ta.at("io1d/" + name)) == digest);
        ++listed;
    }
    CHECK(listed + 1 == static_cast<int>(ta.size()));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("a 2D run is reproducible from its seed") {
    const auto cfg = parse_config("run.id = io2d\nrun.mode = sim2d\ngrid.L = 8\ntime.t_end = 0.5\n"
                                  "ic.seed = 77\n");
    const auto a = simulate(cfg);
    const auto b = simulate(cfg);
    CHECK(a.snapshots.back().n1 == b.snapshots.back().n1);
    auto other = cfg;
    other.seed = 78;
    CHECK(simulate(other).snapshots.back().n1 != a.snapshots.back().n1);
}

TEST_CASE("run directories read back") {
    const auto cfg = parse_config(kShort1D);
    const auto root = scratch("readback");
    run_experiment(cfg, root);
    const auto [cfg2, run] = read_run(root / "io1d");
    CHECK(emit_config(cfg2) == emit_config(cfg));
    const auto direct = simulate(cfg);
    REQUIRE(run.snapshots.size() == direct.snapshots.size());
    CHECK(run.snapshots.back().n1 == direct.snapshots.back().n1);
    CHECK(run.probe.size() == direct.probe.size());
    CHECK_THROWS(read_run(root / "missing"));
    fs::remove_all(root);
}

TEST_CASE("doubles are written losslessly") {
    RunArtifacts run;
    run.coords = {0.1};
    run.cell_measure = {0.1};
    run.side = 1;
    run.snapshots.push_back({0.0, {1.0 / 3.0}, {0.1}, {2.0 / 3.0}});
    const auto csv = snapshots_csv(run);
    CHECK(csv.find("0.33333333333333331") != std::string::npos);
    CHECK(csv.find("0.10000000000000001") != std::string::npos);
}

TEST_CASE("pgm header and scaling") {
    const std::vector<double> f{0.0, 1.0, 0.5, 2.0};
    const auto img = pgm(f, 2, 0.0, 1.0);
    REQUIRE(img.rfind("P5\n2 2\n255\n", 0) == 0);
    const auto px = img.substr(img.size() - 4);
    // Top row holds the largest y, i.e. field row 1.
    CHECK(static_cast<unsigned char>(px[0]) == 128);
    CHECK(static_cast<unsigned char>(px[1]) == 255);
    CHECK(static_cast<unsigned char>(px[2]) == 0);
    CHECK(static_cast<unsigned char>(px[3]) == 255);
}

}
