#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace pvk::app {

struct Artifact {
    std::string name;  // file name inside the output directory
    std::string content;
};

// Fixed-column CSV with shortest round-trip number formatting.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);
    CsvTable& row(const std::vector<double>& values);
    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

std::string csv_number(double x);
// Stable JSON text: sorted keys, one-space indent, trailing newline.
std::string json_text(const nlohmann::json& j);

// Writes each artifact and returns name -> content hash.
std::map<std::string, std::string> write_artifacts(const std::string& dir, const std::vector<Artifact>& artifacts);
std::string read_file(const std::string& path);

}  // namespace pvk::app
