#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace pvk::app {

using CosineTerms = std::vector<std::array<double, 3>>;  // [k1, k2, a] for a cos(k.x)

struct TorusSection {
    CosineTerms kernel{{1, 0, 1.0}, {0, 1, 1.0}};
    CosineTerms density{{1, 0, 0.5}};
    CosineTerms observable{{1, 0, 1.0}};  // spectral diagnostics only
};

struct EnsembleSection {
    std::vector<int> n_particles{8, 32};
    long samples = 2000;
    double dt = 0.0;  // 0 selects dt_max
    std::vector<double> times{-0.1, -0.05, 0.0, 0.05, 0.1};
    std::vector<std::array<int, 2>> modes{{1, 0}};
    double tau = 0.3;  // cumulant_scaling evaluates at t = tau sqrt(N)
    std::vector<std::array<int, 2>> background{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    int tagged_cutoff = 1;
    double expected_slope = -0.5;
    double slope_tolerance = 0.15;
};

struct HierarchySection {
    int lambda = 1;
    int m_max = 4;
    std::vector<double> tau{0.0, 0.5, 1.0, 1.5, 2.0};
    int krylov_dim = 30;
    double tol = 1e-12;
    std::vector<double> spectral_T{50, 100, 200, 400};
};

struct RadialSpec {
    std::string family = "gaussian";  // gaussian, bump, even_polynomial
    double amplitude = 1.0;
    double width = 1.0;
    std::vector<double> coeffs;
};

struct PlaneSection {
    RadialSpec kernel;
    RadialSpec potential{"even_polynomial", 1.0, 1.0, {0.0, 0.5, 0.25}};
    double beta = 0.1;
    double R = 40.0;  // gaussian_case builds V from R
    double r_max = 6.5;
    int panels = 20;
    int order = 8;
    int k_max = 16;
    double classify_tol = 1e-8;
    std::vector<double> r_out{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0};
    std::vector<double> eps_schedule{1e-2, 5e-3, 2.5e-3};
    std::vector<double> main_term_t{0.0, 10.0};
    double cesaro_T = 200.0;
    double main_term_tolerance = 0.02;
    int fp_cells = 400;
    int fp_steps = 1000;
    double fp_tau_end = 500.0;
};

struct RunConfig {
    std::string scenario;
    std::uint64_t seed = 1;
    std::string output = "pvk_run";
    TorusSection torus;
    EnsembleSection ensemble;
    HierarchySection hierarchy;
    PlaneSection plane;

    nlohmann::json to_json() const;  // every field, defaults included
    std::string hash() const;        // of the canonical dump, output directory excluded
};

const std::vector<std::string>& scenario_names();

// Throws ConfigError naming the offending key.
RunConfig parse_config_text(const std::string& yaml_text);
RunConfig load_config(const std::string& path);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace pvk::app
