#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace pvk::app {

enum class Suite { Fast, Full };

Suite parse_suite(const std::string& name);
std::string suite_name(Suite s);

struct Check {
    std::string name;
    double measured = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    std::string relation;  // "<=", ">=", "|x-target|<="
    bool passed = false;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    std::vector<std::string> notes;
    double seconds = 0.0;
    bool skipped = false;
    bool passed() const;
    std::string line() const;
    nlohmann::json to_json() const;
};

using Log = std::function<void(const std::string&)>;

// Criteria run by a suite; the fast suite drops the long ensembles and reduces sample counts.
std::vector<int> suite_criteria(Suite s);
CriterionResult run_criterion(int id, Suite s, const Log& log = {});

struct VerifyReport {
    Suite suite = Suite::Fast;
    std::vector<CriterionResult> results;
    bool passed() const;
    nlohmann::json to_json() const;
    std::string table() const;
};

VerifyReport run_suite(Suite s, const std::vector<int>& only = {}, const Log& log = {});

}  // namespace pvk::app
