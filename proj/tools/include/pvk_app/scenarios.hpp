#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pvk_app/config.hpp"
#include "pvk_app/emit.hpp"

namespace pvk::app {

struct StageResult {
    std::string name;
    double seconds = 0.0;
    bool passed = true;
    nlohmann::json summary = nlohmann::json::object();
};

struct RunResult {
    std::vector<StageResult> stages;
    std::vector<Artifact> artifacts;
    bool passed() const;
    const StageResult* first_failure() const;
};

// Runs the configured scenario; coefficient stages only when coeffs_only is set.
// Numeric failures are rethrown as NumericError tagged with the stage name.
RunResult run_scenario(const RunConfig& config, bool coeffs_only = false);

nlohmann::json manifest_json(const RunConfig& config, const RunResult& run, const std::string& command,
                             const std::map<std::string, std::string>& hashes, double wall_seconds);
std::string stage_table(const nlohmann::json& manifest);

}  // namespace pvk::app
