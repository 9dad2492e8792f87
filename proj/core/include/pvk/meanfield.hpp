#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "pvk/kernels.hpp"
#include "pvk/radial.hpp"

namespace pvk {

struct EquilibriumProfile {
    double beta = 0.0;
    RadialGrid grid;
    std::vector<double> mu;
    double z = 0.0;
    std::vector<double> omega;
    double fixed_point_residual = 0.0;
    int iterations = 0;
    std::vector<double> residual_history;

    RadialFunction v;
    RadialFunction w;
    int k_max = 0;
    std::shared_ptr<const AngularModes> modes;
    std::shared_ptr<const std::vector<Eigen::MatrixXd>> w_tables;  // w_k(r_i, r_j), k = 0..k_max

    // Diagonal convolution weight 2 pi mu(s) s w(s) on the grid.
    Eigen::VectorXd conv_weight() const;
    // (W * mu)(r) and its radial derivative, by quadrature.
    double mean_potential(double r) const;
    double mean_potential_d1(double r) const;
    // Omega(r) = -(V + W*mu)'(r) / r; the origin uses a 4-point stencil in r^2.
    double omega_at(double r) const;
    double omega_d1(double r) const;
    double omega_d2_origin() const;
    double mu_at(double r) const;
    double mass() const;
};

struct SolveOptions {
    double tol = 1e-12;
    int max_iterations = 2000;
    int k_max = 16;
    int n_angles = 256;
};

EquilibriumProfile solve_mu_beta(const ExternalPotential& v, const RadialFunction& w, double beta,
                                 const RadialGrid& grid, const SolveOptions& opts = {});

// Omega on the profile's grid nodes.
std::vector<double> angular_velocity(const EquilibriumProfile& profile);

struct NonDegenerate {
    double R;
};
struct GaussianClass {
    double R;
};
struct OtherClass {};

struct EquilibriumClass {
    std::variant<NonDegenerate, GaussianClass, OtherClass> tag;
    double gaussian_sup_deviation = 0.0;  // sup |Omega + R_fit|
    double fitted_R = 0.0;
    double min_slope_ratio = 0.0;         // min |Omega'(r)| / (r ^ 1)
    double omega_d2_origin = 0.0;
    std::string describe() const;
    bool is_gaussian() const { return std::holds_alternative<GaussianClass>(tag); }
    bool is_nondegenerate() const { return std::holds_alternative<NonDegenerate>(tag); }
};

EquilibriumClass classify_equilibrium(const EquilibriumProfile& profile, double tol = 1e-8,
                                      double r_cap = 1e6);

// Two-point radial x relative-angle table: value(x, y) = sum_k t_k(|x|,|y|) e^{ik(theta_x - theta_y)}.
struct TwoPointTable {
    std::vector<Eigen::MatrixXd> modes;  // k = 0..k_max on grid x grid
    double evaluate(double ri, double rj, double dtheta, std::size_t i, std::size_t j) const;
};

TwoPointTable mu_convolution_power(const EquilibriumProfile& profile, int n);

struct RenormalizedPotential {
    TwoPointTable table;
    int truncation_order = 0;
    double tail_bound = 0.0;
    double w_sup = 0.0;
    double beta = 0.0;

    // W_beta_k(r, s_j) at arbitrary r against the grid nodes, via W_beta = W - beta W * W_beta.
    Eigen::MatrixXd rows_at(const EquilibriumProfile& profile, double r) const;  // (k_max+1) x n
};

RenormalizedPotential renormalized_potential(const EquilibriumProfile& profile, double tol = 1e-12);

// sup over grid pairs and modes of |W_beta + beta W_beta * W - W| (real-space bound summing modes)
double renormalized_identity_residual(const EquilibriumProfile& profile, const RenormalizedPotential& wb);

// Gaussian case: V = R r^2/2 - W*G with G the Gaussian of variance 1/(beta R).
RadialFunction gaussian_case_potential(const RadialFunction& w, double beta, double R, const RadialGrid& grid,
                                       int n_angles = 256);

std::string profile_csv(const EquilibriumProfile& profile);

}  // namespace pvk
