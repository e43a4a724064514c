// End-to-end checks of the command-line tool: exit codes, reproducibility,
// and the no-partial-outputs rule. The binary path comes from the build.

#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef SGRF_CLI_PATH
#define SGRF_CLI_PATH "sgrf"
#endif

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(SGRF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() / ("sgrf_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }
    fs::path operator/(const std::string& name) const { return dir / name; }
};

const char* kGenConfig = R"({
  "seed": 3,
  "class_counts": [30, 8],
  "class_labels": ["neg", "pos"],
  "blocks": [
    {"name": "m1", "kind": "continuous", "separation": 3.0},
    {"name": "m2", "kind": "continuous", "separation": 3.0},
    {"name": "b1", "kind": "binary", "flip": 0.2}
  ]
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage and input failures exit with code 2 and write nothing") {
    Sandbox box;
    CHECK(run("") == 2);  // missing subcommand
    CHECK(run("pipeline --out " + (box / "x").string()) == 2);  // no data
    CHECK(run("pipeline --data " + (box / "nope.csv").string() + " --schema " +
              (box / "nope.json").string() + " --out " + (box / "out").string()) == 2);
    CHECK(!fs::exists(box / "out"));  // nothing was written

    std::ofstream(box / "gen.json") << kGenConfig;
    CHECK(run("synth --config " + (box / "gen.json").string() + " --out " +
              (box / "synth").string()) == 0);
    // schema present but data missing still exits 2 before any output
    CHECK(run("pipeline --data " + (box / "missing.csv").string() + " --schema " +
              (box / "synth/schema.json").string() + " --out " + (box / "out2").string()) == 2);
    CHECK(!fs::exists(box / "out2"));
}

TEST_CASE("synth is byte-reproducible for a fixed seed") {
    Sandbox box;
    std::ofstream(box / "gen.json") << kGenConfig;
    REQUIRE(run("synth --config " + (box / "gen.json").string() + " --out " +
                (box / "a").string() + " --seed 11") == 0);
    REQUIRE(run("synth --config " + (box / "gen.json").string() + " --out " +
                (box / "b").string() + " --seed 11") == 0);
    REQUIRE(run("synth --config " + (box / "gen.json").string() + " --out " +
                (box / "c").string() + " --seed 12") == 0);
    CHECK(slurp(box / "a/data.csv") == slurp(box / "b/data.csv"));
    CHECK(slurp(box / "a/schema.json") == slurp(box / "b/schema.json"));
    CHECK(slurp(box / "a/data.csv") != slurp(box / "c/data.csv"));
    CHECK(fs::exists(box / "a/manifest.json"));
}

TEST_CASE("train then predict on the training file recovers the labels") {
    Sandbox box;
    std::ofstream(box / "gen.json") << kGenConfig;
    REQUIRE(run("synth --config " + (box / "gen.json").string() + " --out " +
                (box / "data").string()) == 0);
    REQUIRE(run("train --data " + (box / "data/data.csv").string() + " --schema " +
                (box / "data/schema.json").string() + " --out " + (box / "model").string() +
                " --seed 5") == 0);
    REQUIRE(run("predict --model " + (box / "model/model.json").string() + " --data " +
                (box / "data/data.csv").string() + " --schema " +
                (box / "data/schema.json").string() + " --out " + (box / "preds").string()) == 0);

    // compare predicted labels against the generated truth
    std::istringstream truth(slurp(box / "data/data.csv"));
    std::istringstream preds(slurp(box / "preds/predictions.csv"));
    std::string truth_line, pred_line;
    std::getline(truth, truth_line);  // headers
    std::getline(preds, pred_line);
    int total = 0, correct = 0;
    while (std::getline(truth, truth_line) && std::getline(preds, pred_line)) {
        std::string want = truth_line.substr(truth_line.rfind(',') + 1);
        std::size_t first = pred_line.find(',');
        std::size_t second = pred_line.find(',', first + 1);
        std::string got = pred_line.substr(first + 1, second - first - 1);
        total++;
        correct += want == got ? 1 : 0;
    }
    CHECK(total == 38);
    CHECK(static_cast<double>(correct) / total >= 0.95);
}

TEST_CASE("the shipped cohort config generates the expected shape") {
    Sandbox box;
    std::string config = std::string(SGRF_CONFIG_DIR) + "/spitz54.json";
    REQUIRE(run("synth --config " + config + " --out " + (box / "out").string()) == 0);
    std::istringstream data(slurp(box / "out/data.csv"));
    std::string header;
    std::getline(data, header);
    CHECK(std::count(header.begin(), header.end(), ',') == 29);  // 29 features + label
    int rows = 0;
    for (std::string line; std::getline(data, line);) rows += line.empty() ? 0 : 1;
    CHECK(rows == 54);
}

TEST_CASE("an empty cohort is rejected as invalid input") {
    Sandbox box;
    std::ofstream(box / "gen.json") << R"({"class_counts": [0, 0], "blocks": [
        {"name": "x", "kind": "continuous"}]})";
    CHECK(run("synth --config " + (box / "gen.json").string() + " --out " +
              (box / "out").string()) == 2);
    CHECK(!fs::exists(box / "out"));
}

TEST_CASE("version flag reports and exits cleanly") {
    CHECK(run("--version") == 0);
}

}  // TEST_SUITE
