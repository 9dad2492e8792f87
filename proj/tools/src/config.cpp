#include "pvk_app/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "pvk/common.hpp"

namespace pvk::app {

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"uniform_wave",  "uniform_hierarchy", "cumulant_scaling",
                                                "gaussian_case", "nongaussian_fp",    "coeffs_only"};
    return names;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

nlohmann::json radial_json(const RadialSpec& r) {
    return {{"family", r.family}, {"amplitude", r.amplitude}, {"width", r.width}, {"coeffs", r.coeffs}};
}

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw ConfigError("key '" + path + "': " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_map(const YAML::Node& n, const std::string& path, const std::set<std::string>& allowed) {
    if (!n.IsMap()) bad(path.empty() ? "<root>" : path, "expected a mapping");
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) throw ConfigError("unknown key '" + join(path, key) + "'");
    }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& path, const char* type) {
    if (!n.IsScalar()) bad(path, std::string("expected ") + type);
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        bad(path, std::string("expected ") + type + ", got '" + n.Scalar() + "'");
    }
}

void read(const YAML::Node& n, const std::string& path, double& out) { out = scalar<double>(n, path, "a number"); }
void read(const YAML::Node& n, const std::string& path, int& out) { out = scalar<int>(n, path, "an integer"); }
void read(const YAML::Node& n, const std::string& path, long& out) { out = scalar<long>(n, path, "an integer"); }
void read(const YAML::Node& n, const std::string& path, std::uint64_t& out) {
    out = scalar<std::uint64_t>(n, path, "a non-negative integer");
}
void read(const YAML::Node& n, const std::string& path, std::string& out) {
    out = scalar<std::string>(n, path, "a string");
}

template <class T, std::size_t N>
void read(const YAML::Node& n, const std::string& path, std::array<T, N>& out);

template <class T>
void read(const YAML::Node& n, const std::string& path, std::vector<T>& out) {
    if (!n.IsSequence()) bad(path, "expected a list");
    out.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
        T v{};
        read(n[i], path + "[" + std::to_string(i) + "]", v);
        out.push_back(v);
    }
}

template <class T, std::size_t N>
void read(const YAML::Node& n, const std::string& path, std::array<T, N>& out) {
    if (!n.IsSequence() || n.size() != N) bad(path, "expected a list of " + std::to_string(N) + " numbers");
    for (std::size_t i = 0; i < N; ++i) read(n[i], path + "[" + std::to_string(i) + "]", out[i]);
}

template <class T>
void opt(const YAML::Node& map, const std::string& path, const char* key, T& out) {
    if (const auto n = map[key]) read(n, join(path, key), out);
}

void read_radial(const YAML::Node& n, const std::string& path, RadialSpec& r) {
    require_map(n, path, {"family", "amplitude", "width", "coeffs"});
    opt(n, path, "family", r.family);
    opt(n, path, "amplitude", r.amplitude);
    opt(n, path, "width", r.width);
    opt(n, path, "coeffs", r.coeffs);
    if (r.family != "gaussian" && r.family != "bump" && r.family != "even_polynomial")
        bad(join(path, "family"), "expected gaussian, bump or even_polynomial");
    if (r.family == "even_polynomial" && r.coeffs.empty()) bad(join(path, "coeffs"), "needs at least one coefficient");
    if (r.family != "even_polynomial" && !(r.width > 0.0)) bad(join(path, "width"), "must be positive");
}

void positive(bool ok, const std::string& path) {
    if (!ok) bad(path, "must be positive");
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["output"] = output;
    j["torus"] = {{"kernel", torus.kernel}, {"density", torus.density}, {"observable", torus.observable}};
    const auto& e = ensemble;
    j["ensemble"] = {{"n_particles", e.n_particles},
                     {"samples", e.samples},
                     {"dt", e.dt},
                     {"times", e.times},
                     {"modes", e.modes},
                     {"tau", e.tau},
                     {"background", e.background},
                     {"tagged_cutoff", e.tagged_cutoff},
                     {"expected_slope", e.expected_slope},
                     {"slope_tolerance", e.slope_tolerance}};
    const auto& h = hierarchy;
    j["hierarchy"] = {{"lambda", h.lambda}, {"m_max", h.m_max}, {"tau", h.tau},
                      {"krylov_dim", h.krylov_dim}, {"tol", h.tol}, {"spectral_T", h.spectral_T}};
    const auto& p = plane;
    j["plane"] = {{"kernel", radial_json(p.kernel)},
                  {"potential", radial_json(p.potential)},
                  {"beta", p.beta},
                  {"R", p.R},
                  {"r_max", p.r_max},
                  {"panels", p.panels},
                  {"order", p.order},
                  {"k_max", p.k_max},
                  {"classify_tol", p.classify_tol},
                  {"r_out", p.r_out},
                  {"eps_schedule", p.eps_schedule},
                  {"main_term_t", p.main_term_t},
                  {"cesaro_T", p.cesaro_T},
                  {"main_term_tolerance", p.main_term_tolerance},
                  {"fp_cells", p.fp_cells},
                  {"fp_steps", p.fp_steps},
                  {"fp_tau_end", p.fp_tau_end}};
    return j;
}

std::string RunConfig::hash() const {
    auto j = to_json();
    j.erase("output");
    return fnv1a_hex(j.dump());
}

RunConfig parse_config_text(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed YAML: ") + e.what());
    }
    RunConfig c;
    require_map(root, "", {"scenario", "seed", "output", "torus", "ensemble", "hierarchy", "plane"});
    if (!root["scenario"]) throw ConfigError("key 'scenario': required");
    opt(root, "", "scenario", c.scenario);
    const auto& names = scenario_names();
    if (std::find(names.begin(), names.end(), c.scenario) == names.end())
        bad("scenario", "unknown scenario '" + c.scenario + "'");
    opt(root, "", "seed", c.seed);
    opt(root, "", "output", c.output);

    if (const auto t = root["torus"]) {
        require_map(t, "torus", {"kernel", "density", "observable"});
        opt(t, "torus", "kernel", c.torus.kernel);
        opt(t, "torus", "density", c.torus.density);
        opt(t, "torus", "observable", c.torus.observable);
    }
    if (const auto e = root["ensemble"]) {
        const std::string p = "ensemble";
        require_map(e, p, {"n_particles", "samples", "dt", "times", "modes", "tau", "background", "tagged_cutoff",
                           "expected_slope", "slope_tolerance"});
        auto& s = c.ensemble;
        opt(e, p, "n_particles", s.n_particles);
        opt(e, p, "samples", s.samples);
        opt(e, p, "dt", s.dt);
        opt(e, p, "times", s.times);
        opt(e, p, "modes", s.modes);
        opt(e, p, "tau", s.tau);
        opt(e, p, "background", s.background);
        opt(e, p, "tagged_cutoff", s.tagged_cutoff);
        opt(e, p, "expected_slope", s.expected_slope);
        opt(e, p, "slope_tolerance", s.slope_tolerance);
    }
    if (const auto h = root["hierarchy"]) {
        const std::string p = "hierarchy";
        require_map(h, p, {"lambda", "m_max", "tau", "krylov_dim", "tol", "spectral_T"});
        auto& s = c.hierarchy;
        opt(h, p, "lambda", s.lambda);
        opt(h, p, "m_max", s.m_max);
        opt(h, p, "tau", s.tau);
        opt(h, p, "krylov_dim", s.krylov_dim);
        opt(h, p, "tol", s.tol);
        opt(h, p, "spectral_T", s.spectral_T);
    }
    if (const auto n = root["plane"]) {
        const std::string p = "plane";
        require_map(n, p, {"kernel", "potential", "beta", "R", "r_max", "panels", "order", "k_max", "classify_tol",
                           "r_out", "eps_schedule", "main_term_t", "cesaro_T", "main_term_tolerance", "fp_cells",
                           "fp_steps", "fp_tau_end"});
        auto& s = c.plane;
        if (const auto k = n["kernel"]) read_radial(k, "plane.kernel", s.kernel);
        if (const auto v = n["potential"]) read_radial(v, "plane.potential", s.potential);
        opt(n, p, "beta", s.beta);
        opt(n, p, "R", s.R);
        opt(n, p, "r_max", s.r_max);
        opt(n, p, "panels", s.panels);
        opt(n, p, "order", s.order);
        opt(n, p, "k_max", s.k_max);
        opt(n, p, "classify_tol", s.classify_tol);
        opt(n, p, "r_out", s.r_out);
        opt(n, p, "eps_schedule", s.eps_schedule);
        opt(n, p, "main_term_t", s.main_term_t);
        opt(n, p, "cesaro_T", s.cesaro_T);
        opt(n, p, "main_term_tolerance", s.main_term_tolerance);
        opt(n, p, "fp_cells", s.fp_cells);
        opt(n, p, "fp_steps", s.fp_steps);
        opt(n, p, "fp_tau_end", s.fp_tau_end);
    }

    const auto& e = c.ensemble;
    if (e.n_particles.empty()) bad("ensemble.n_particles", "must not be empty");
    for (int n : e.n_particles) positive(n > 0, "ensemble.n_particles");
    positive(e.samples > 0, "ensemble.samples");
    if (e.dt < 0.0) bad("ensemble.dt", "must be non-negative");
    if (e.times.empty()) bad("ensemble.times", "must not be empty");
    for (std::size_t i = 1; i < e.times.size(); ++i)
        if (!(e.times[i] > e.times[i - 1])) bad("ensemble.times", "must be strictly increasing");
    positive(e.tau > 0.0, "ensemble.tau");
    if (e.tagged_cutoff < 0) bad("ensemble.tagged_cutoff", "must be non-negative");
    const auto& h = c.hierarchy;
    positive(h.lambda > 0, "hierarchy.lambda");
    positive(h.m_max > 0, "hierarchy.m_max");
    positive(h.krylov_dim > 1, "hierarchy.krylov_dim");
    positive(h.tol > 0.0, "hierarchy.tol");
    const auto& p = c.plane;
    if (p.beta < 0.0) bad("plane.beta", "must be non-negative");
    positive(p.r_max > 0.0, "plane.r_max");
    positive(p.panels > 0, "plane.panels");
    if (p.order < 2 || p.order > 32) bad("plane.order", "must lie in 2..32");
    positive(p.k_max > 0, "plane.k_max");
    positive(p.fp_cells > 1, "plane.fp_cells");
    positive(p.fp_steps > 0, "plane.fp_steps");
    positive(p.fp_tau_end > 0.0, "plane.fp_tau_end");
    positive(p.cesaro_T > 0.0, "plane.cesaro_T");
    for (double r : p.r_out)
        if (r < 0.0) bad("plane.r_out", "radii must be non-negative");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace pvk::app
