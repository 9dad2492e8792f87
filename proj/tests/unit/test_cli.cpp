#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "pvk/common.hpp"
#include "pvk_app/config.hpp"
#include "pvk_app/emit.hpp"
#include "pvk_app/scenarios.hpp"
#include "pvk_app/verify.hpp"

using namespace pvk;
using namespace pvk::app;
namespace fs = std::filesystem;

namespace {

const char* kMinimalWave = R"(scenario: uniform_wave
seed: 3
torus:
  kernel: [[1, 0, 1.0], [0, 1, 1.0]]
  density: [[1, 0, 0.5]]
ensemble:
  n_particles: [4, 8]
  samples: 200
  times: [-0.1, 0.0, 0.1]
)";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pvk_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PVK_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("unknown and malformed keys name the offending key") {
    try {
        parse_config_text("scenario: uniform_wave\nensemble:\n  dt_maxx: 0.1\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("ensemble.dt_maxx") != std::string::npos);
    }
    try {
        parse_config_text("scenario: uniform_wave\nensemble:\n  samples: abc\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("ensemble.samples") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text("seed: 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("scenario: nope\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("scenario: uniform_wave\nensemble:\n  times: [0.1, 0.0]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("scenario: [unclosed\n"), ConfigError);
}

TEST_CASE("config JSON is canonical and the hash ignores the output directory") {
    auto a = parse_config_text(kMinimalWave);
    auto b = a;
    b.output = "elsewhere";
    CHECK(a.hash() == b.hash());
    b.seed = 4;
    CHECK(a.hash() != b.hash());
    const auto j = a.to_json();
    CHECK(j.at("ensemble").at("samples") == 200);
    CHECK(j.at("hierarchy").at("m_max") == 4);
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("shipped configs parse") {
    for (const auto& name : scenario_names()) {
        const fs::path p = fs::path(PVK_TEST_CONFIG_DIR) / (name + ".yaml");
        REQUIRE(fs::exists(p));
        CHECK(load_config(p.string()).scenario == name);
    }
}

TEST_CASE("CSV tables keep their column order and round-trip numbers") {
    CsvTable t({"N", "t", "re", "im"});
    t.row({8, 0.1, 1.0 / 3.0, -2.5e-17});
    t.row({32, 0.2, 0.0, 1e300});
    const std::string s = t.str();
    CHECK(s.rfind("N,t,re,im\n", 0) == 0);
    CHECK(t.rows() == 2);
    CHECK(std::stod(csv_number(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(csv_number(8.0) == "8");
    CHECK_THROWS(t.row({1.0}));
    nlohmann::json j = {{"b", 1}, {"a", {1.5, 2}}};
    CHECK(nlohmann::json::parse(json_text(j)) == j);
    CHECK(json_text(j).back() == '\n');
}

TEST_CASE("minimal uniform_wave run") {
    const auto cfg = parse_config_text(kMinimalWave);
    const auto run = run_scenario(cfg);
    CHECK(run.passed());
    std::vector<std::string> names;
    for (const auto& s : run.stages) names.push_back(s.name);
    CHECK(names == std::vector<std::string>{"kernel", "ensemble", "cumulants", "compare"});

    const auto dir = scratch("wave");
    const auto hashes = write_artifacts(dir.string(), run.artifacts);
    for (const auto& a : run.artifacts) {
        CHECK(read_file((dir / a.name).string()) == a.content);
        CHECK(hashes.at(a.name) == fnv1a_hex(a.content));
    }
    // re-emitting the same artifacts is idempotent
    CHECK(write_artifacts(dir.string(), run.artifacts) == hashes);

    const auto again = run_scenario(cfg);
    REQUIRE(again.artifacts.size() == run.artifacts.size());
    for (std::size_t i = 0; i < run.artifacts.size(); ++i)
        CHECK(again.artifacts[i].content == run.artifacts[i].content);

    const auto m = manifest_json(cfg, run, "pvk run test", hashes, 1.0);
    CHECK(m.at("config_hash") == cfg.hash());
    CHECK(m.at("passed") == true);
    CHECK(m.at("stages").size() == 4);
    CHECK(stage_table(m).find("ensemble") != std::string::npos);
    const auto roundtrip = nlohmann::json::parse(json_text(m));
    CHECK(roundtrip == m);
    fs::remove_all(dir);
}

TEST_CASE("command-line exit codes") {
    const auto dir = scratch("exit");
    {
        std::ofstream(dir / "bad.yaml") << "scenario: uniform_wave\nensemble:\n  dt_maxx: 0.1\n";
        std::ofstream(dir / "good.yaml") << kMinimalWave;
    }
    CHECK(run_cli("run " + (dir / "bad.yaml").string() + " --out " + (dir / "o1").string()) == 2);
    CHECK(run_cli("run " + (dir / "missing.yaml").string()) == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("run " + (dir / "good.yaml").string() + " --out " + (dir / "o2").string()) == 0);
    CHECK(fs::exists(dir / "o2" / "manifest.json"));
    CHECK(run_cli("report " + (dir / "o2").string()) == 0);
    CHECK(run_cli("--threads 2 run " + (dir / "good.yaml").string() + " --out " + (dir / "o3").string()) == 0);
    CHECK(read_file((dir / "o2" / "moments_N8.json").string()) == read_file((dir / "o3" / "moments_N8.json").string()));
    fs::remove_all(dir);
}

TEST_CASE("verify report format") {
    const auto rep = run_suite(Suite::Fast, {4, 9}, {});
    REQUIRE(rep.results.size() == 2);
    CHECK(rep.passed());
    const std::string table = rep.table();
    CHECK(table.rfind("PASS  [4]", 0) == 0);
    CHECK(table.find("\nPASS  [9]") != std::string::npos);
    const auto j = rep.to_json();
    CHECK(j.at("suite") == "fast");
    CHECK(j.at("criteria").size() == 2);
    CHECK(j.at("criteria")[0].at("checks").size() > 0);
    CHECK(parse_suite("full") == Suite::Full);
    CHECK_THROWS_AS(run_criterion(10, Suite::Fast, {}), ConfigError);
}

}
