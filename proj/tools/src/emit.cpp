#include "pvk_app/emit.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pvk/common.hpp"
#include "pvk_app/config.hpp"

namespace pvk::app {

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

CsvTable& CsvTable::row(const std::vector<double>& values) {
    if (values.size() != columns_.size()) throw std::logic_error("csv row width mismatch");
    rows_.push_back(values);
    return *this;
}

std::string csv_number(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string CsvTable::str() const {
    std::string s;
    for (std::size_t i = 0; i < columns_.size(); ++i) s += (i ? "," : "") + columns_[i];
    s += "\n";
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + csv_number(r[i]);
        s += "\n";
    }
    return s;
}

std::string json_text(const nlohmann::json& j) { return j.dump(1) + "\n"; }

std::map<std::string, std::string> write_artifacts(const std::string& dir, const std::vector<Artifact>& artifacts) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
    std::map<std::string, std::string> hashes;
    for (const auto& a : artifacts) {
        const auto path = fs::path(dir) / a.name;
        std::ofstream out(path, std::ios::binary);
        out << a.content;
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        hashes[a.name] = fnv1a_hex(a.content);
    }
    return hashes;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace pvk::app
