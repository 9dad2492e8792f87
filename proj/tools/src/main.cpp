#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "pvk/common.hpp"
#include "pvk_app/config.hpp"
#include "pvk_app/emit.hpp"
#include "pvk_app/scenarios.hpp"
#include "pvk_app/verify.hpp"

namespace {

using namespace pvk;
using namespace pvk::app;

int run_config(const std::string& path, const std::string& out_override, bool coeffs_only) {
    auto config = load_config(path);
    if (!out_override.empty()) config.output = out_override;
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = run_scenario(config, coeffs_only);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto hashes = write_artifacts(config.output, result.artifacts);
    const auto manifest = manifest_json(config, result, coeffs_only ? "coeffs" : "run", hashes, wall);
    write_artifacts(config.output, {{"manifest.json", json_text(manifest)}});
    std::cout << "scenario " << config.scenario << " (config " << config.hash() << ", seed " << config.seed << ")\n"
              << stage_table(manifest) << "artifacts written to " << config.output << "\n";
    if (const auto* f = result.first_failure()) {
        std::cerr << "pvk: stage '" << f->name << "' failed its checks: " << f->summary.dump() << "\n";
        return 3;
    }
    return 0;
}

int verify(const std::string& suite, const std::vector<int>& only, const std::string& out) {
    const auto rep = run_suite(parse_suite(suite), only, [](const std::string& s) { std::cout << s << std::endl; });
    if (!out.empty()) write_artifacts(out, {{"verify.json", json_text(rep.to_json())}});
    std::cout << (rep.passed() ? "verify: all criteria passed" : "verify: FAILED") << std::endl;
    return rep.passed() ? 0 : 1;
}

int report(const std::string& dir) {
    const auto path = std::filesystem::path(dir) / "manifest.json";
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(read_file(path.string()));
    } catch (const std::exception& e) {
        throw ConfigError("report: " + std::string(e.what()));
    }
    std::cout << "scenario " << m.at("scenario").get<std::string>() << " (" << m.at("command").get<std::string>()
              << ", config " << m.at("config_hash").get<std::string>() << ", seed " << m.at("seed") << ", "
              << m.at("threads") << " threads, " << m.at("wall_seconds").get<double>() << " s)\n"
              << stage_table(m);
    for (const auto& st : m.at("stages"))
        if (!st.at("summary").empty()) std::cout << "  " << st.at("name").get<std::string>() << ": " << st.at("summary").dump() << "\n";
    std::cout << "artifacts:\n";
    for (const auto& [name, hash] : m.at("artifacts").items()) {
        const auto file = std::filesystem::path(dir) / name;
        std::string status = "missing";
        if (std::filesystem::exists(file)) status = fnv1a_hex(read_file(file.string())) == hash ? "ok" : "modified";
        std::cout << "  " << name << "  " << hash.get<std::string>() << "  " << status << "\n";
    }
    return m.at("passed").get<bool>() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pvk: point-vortex kinetic theory driver"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (overrides PVK_THREADS)");

    std::string config_path, out_dir;
    auto* run = app.add_subcommand("run", "run a scenario from a YAML config");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides the config)");

    std::string coeff_path, coeff_out;
    auto* coeffs = app.add_subcommand("coeffs", "compute the effective coefficients only");
    coeffs->add_option("config", coeff_path, "config file")->required();
    coeffs->add_option("--out", coeff_out, "output directory (overrides the config)");

    std::string suite = "fast", verify_out;
    std::vector<int> only;
    auto* ver = app.add_subcommand("verify", "run the acceptance suite");
    ver->add_option("suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    ver->add_option("--only", only, "criterion ids")->delimiter(',');
    ver->add_option("--out", verify_out, "directory for verify.json");

    std::string report_dir;
    auto* rep = app.add_subcommand("report", "summarize a run directory");
    rep->add_option("dir", report_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (threads > 0) setenv("PVK_THREADS", std::to_string(threads).c_str(), 1);

    try {
        if (*run) return run_config(config_path, out_dir, false);
        if (*coeffs) return run_config(coeff_path, coeff_out, true);
        if (*ver) return verify(suite, only, verify_out);
        if (*rep) return report(report_dir);
    } catch (const ConfigError& e) {
        std::cerr << "pvk: config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "pvk: numeric error in stage '" << e.stage() << "': " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "pvk: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
