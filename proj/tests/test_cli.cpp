// End-to-end tests driving the hwsig binary as a subprocess.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(HW_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Workspace {
    fs::path dir;
    Workspace() {
        dir = fs::temp_directory_path() / ("hwsig_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string p(const std::string& rel) const { return (dir / rel).string(); }
};

// One shared end-to-end workspace keeps the suite fast: generate the dataset
// and bundles once, then exercise every verb against them.
Workspace& ws() {
    static Workspace w;
    return w;
}

bool g_pipeline_built = false;

void build_pipeline() {
    if (g_pipeline_built) return;
    REQUIRE(run("synth --out " + ws().p("data") +
                " --seed 5 --train-ids 4 --test-ids 3 --pattern-size 12 --canvas 32"
                " --seconds 8 --train-pairs 20 --test-pairs 20 --transform translate"
                " --max-translate 4 --sweep-cycles 2") == 0);
    REQUIRE(run("build-l2 --videos " + ws().p("data/videos.json") + " --out " + ws().p("l2") +
                " --seed 1 --lowlevel gabor --patch-height 16 --patch-width 16 --variants 3"
                " --max-patches 6 --resize-height 32 --ratios 0.6,1.0") == 0);
    REQUIRE(run("build-l3 --videos " + ws().p("data/videos.json") + " --l2 " + ws().p("l2") +
                " --out " + ws().p("l3") + " --window 4 --pooling mean") == 0);
    g_pipeline_built = true;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("synth") == 2);                       // missing required flags
    CHECK(run("signature --items x.csv") == 2);     // missing --l2/--out
    CHECK(run("sweep-pooling --out /tmp/x.csv") == 2);  // seed is mandatory
}

TEST_CASE("synth writes a complete dataset") {
    build_pipeline();
    CHECK(fs::exists(ws().p("data/videos.json")));
    CHECK(fs::exists(ws().p("data/items.csv")));
    CHECK(fs::exists(ws().p("data/train_pairs.csv")));
    CHECK(fs::exists(ws().p("data/test_pairs.csv")));
    CHECK(fs::exists(ws().p("data/manifest.json")));
    CHECK(fs::exists(ws().p("data/videos/id0_v/f0.pgm")));
    // 4 train videos, 8 frames each.
    int frames = 0;
    for (const auto& e : fs::recursive_directory_iterator(ws().p("data/videos")))
        if (e.path().extension() == ".pgm") ++frames;
    CHECK(frames == 32);
}

TEST_CASE("missing input files exit with code 3") {
    build_pipeline();
    CHECK(run("build-l2 --videos " + ws().p("nope.json") + " --out " + ws().p("x") +
              " --seed 1") == 3);
    CHECK(run("signature --l2 " + ws().p("l2") + " --items " + ws().p("nope.csv") + " --out " +
              ws().p("x.csv")) == 3);
    CHECK(run("verify --signatures " + ws().p("nope.csv") + " --train-pairs " +
              ws().p("data/train_pairs.csv") + " --test-pairs " + ws().p("data/test_pairs.csv") +
              " --out " + ws().p("x.json")) == 3);
}

TEST_CASE("signature output is byte-identical across runs") {
    build_pipeline();
    REQUIRE(run("signature --l2 " + ws().p("l2") + " --items " + ws().p("data/items.csv") +
                " --out " + ws().p("sig_a.csv")) == 0);
    REQUIRE(run("signature --l2 " + ws().p("l2") + " --items " + ws().p("data/items.csv") +
                " --out " + ws().p("sig_b.csv")) == 0);
    CHECK(slurp(ws().p("sig_a.csv")) == slurp(ws().p("sig_b.csv")));

    // Layered signatures differ from layer-2-only ones but are also stable.
    REQUIRE(run("signature --l2 " + ws().p("l2") + " --l3 " + ws().p("l3") + " --items " +
                ws().p("data/items.csv") + " --out " + ws().p("sig_l3.csv")) == 0);
    CHECK(slurp(ws().p("sig_l3.csv")) != slurp(ws().p("sig_a.csv")));
}

TEST_CASE("verify produces a JSON report with sane accuracy") {
    build_pipeline();
    REQUIRE(run("verify --l2 " + ws().p("l2") + " --items " + ws().p("data/items.csv") +
                " --train-pairs " + ws().p("data/train_pairs.csv") + " --test-pairs " +
                ws().p("data/test_pairs.csv") + " --out " + ws().p("verify.json")) == 0);
    const std::string report = slurp(ws().p("verify.json"));
    CHECK(report.find("\"testAccuracy\"") != std::string::npos);
    CHECK(report.find("\"threshold\"") != std::string::npos);
}

TEST_CASE("tampered bundle version exits with code 4") {
    build_pipeline();
    const fs::path broken = ws().dir / "l2_broken";
    fs::copy(ws().dir / "l2", broken, fs::copy_options::recursive);
    std::string manifest = slurp(broken / "manifest.json");
    const std::string needle = "hwsig-bundle-1";
    manifest.replace(manifest.find(needle), needle.size(), "hwsig-bundle-9");
    std::ofstream(broken / "manifest.json", std::ios::trunc) << manifest;
    CHECK(run("signature --l2 " + broken.string() + " --items " + ws().p("data/items.csv") +
              " --out " + ws().p("x.csv")) == 4);
}

TEST_CASE("gate writes one AUC row per p") {
    build_pipeline();
    // Split the item list into two halves as stand-in populations.
    std::ifstream in(ws().p("data/items.csv"));
    std::ostringstream pos, neg;
    std::string line;
    for (int i = 0; std::getline(in, line); ++i) (i % 2 ? pos : neg) << line << '\n';
    // Item paths are resolved relative to the list file, so keep the split
    // lists next to the original one.
    std::ofstream(ws().p("data/pos.csv")) << pos.str();
    std::ofstream(ws().p("data/neg.csv")) << neg.str();
    REQUIRE(run("gate --l2 " + ws().p("l2") + " --pos-items " + ws().p("data/pos.csv") +
                " --neg-items " + ws().p("data/neg.csv") + " --p-grid 1,2,5 --out " +
                ws().p("gate.csv")) == 0);
    const std::string csv = slurp(ws().p("gate.csv"));
    CHECK(csv.rfind("p,auc\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("fuse combines two signature pipelines") {
    build_pipeline();
    REQUIRE(fs::exists(ws().p("sig_a.csv")));
    REQUIRE(fs::exists(ws().p("sig_l3.csv")));
    REQUIRE(run("fuse --signatures " + ws().p("sig_a.csv") + " " + ws().p("sig_l3.csv") +
                " --train-pairs " + ws().p("data/train_pairs.csv") + " --test-pairs " +
                ws().p("data/test_pairs.csv") + " --out " + ws().p("fuse.json")) == 0);
    const std::string report = slurp(ws().p("fuse.json"));
    CHECK(report.find("\"weights\"") != std::string::npos);
    CHECK(report.find("\"testAccuracy\"") != std::string::npos);
}

TEST_CASE("classify trains an SVM on signature files") {
    build_pipeline();
    // Labels: identity of the item's pattern is encoded in the manifest, but
    // a simple separable labeling on the signature file suffices here.
    std::ifstream sigs(ws().p("sig_a.csv"));
    std::ostringstream labels;
    std::string line;
    for (int i = 0; std::getline(sigs, line); ++i)
        labels << line.substr(0, line.find(',')) << ',' << (i % 2 ? "+1" : "-1") << '\n';
    std::ofstream(ws().p("labels.csv")) << labels.str();
    REQUIRE(run("classify --train-signatures " + ws().p("sig_a.csv") + " --train-labels " +
                ws().p("labels.csv") + " --seed 3 --epochs 20 --out " +
                ws().p("classify.json")) == 0);
    const std::string report = slurp(ws().p("classify.json"));
    CHECK(report.find("\"trainAccuracy\"") != std::string::npos);
    CHECK(report.find("\"finalObjective\"") != std::string::npos);
}

TEST_CASE("sweep-pooling and scramble-control emit one row per condition") {
    // Desk-scale override keeps this test quick: tiny windows via a short
    // sweep run is still the full experiment path, so run it once with the
    // default config but the smallest windows only.
    REQUIRE(run("sweep-pooling --seed 1 --windows 0,2 --out " + ws().p("sweep.csv")) == 0);
    const std::string csv = slurp(ws().p("sweep.csv"));
    CHECK(csv.rfind("windowSeconds,accuracy\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
