#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pvk/kernels.hpp"
#include "pvk/meanfield.hpp"
#include "pvk/nbody.hpp"

namespace pvk {

using DiffusionMatrix = Eigen::Matrix2d;

// ---------------------------------------------------------------- uniform torus

DiffusionMatrix diffusion_matrix_torus(const TorusKernel& w);
DiffusionMatrix next_order_B(const TorusKernel& w);

struct WaveSeries {
    std::vector<double> tau;
    std::vector<std::map<Mode, cplx>> f;     // f_hat(tau, k)
    std::vector<std::map<Mode, cplx>> dfdt;  // d/dtau f_hat
    double energy(std::size_t i, const DiffusionMatrix& a) const;
};

WaveSeries wave_evolve(const TorusDensity& f0, const DiffusionMatrix& a, const std::vector<double>& tau);

// ---------------------------------------------------------------- Gaussian equilibrium

// Function on the plane as angular modes h_k(r) on the profile's radial grid, k = -K..K.
struct PlaneField {
    int k_max = 0;
    Eigen::MatrixXcd modes;  // (2K+1) x n, row k + K
    cplx mode(int k, std::size_t i) const { return modes(k + k_max, i); }
    double weighted_norm(const EquilibriumProfile& p) const;  // (int |h|^2 mu dx)^(1/2)
    cplx weighted_inner(const PlaneField& other, const EquilibriumProfile& p) const;
    cplx at(const EquilibriumProfile& p, std::size_t i, double theta) const;
};

// Single-particle operator T_beta: (T h)_k = -beta R k 2 pi int w_k(r, s) h_k(s) mu(s) s ds.
class GaussianOperator {
public:
    GaussianOperator(const EquilibriumProfile& profile, double R);

    double R() const { return R_; }
    int k_max() const { return k_max_; }
    const EquilibriumProfile& profile() const { return *p_; }
    PlaneField apply(const PlaneField& h) const;
    // (T h)(r, theta) off-grid
    cplx apply_at(const PlaneField& h, double r, double theta) const;
    // eigenpairs of the D-symmetrized block for mode k >= 0
    const Eigen::VectorXd& eigenvalues(int k) const { return evals_[k]; }
    const Eigen::MatrixXd& eigenvectors(int k) const { return evecs_[k]; }

private:
    const EquilibriumProfile* p_;
    double R_;
    int k_max_;
    Eigen::VectorXd d_, sqrt_d_;
    std::vector<Eigen::VectorXd> evals_;
    std::vector<Eigen::MatrixXd> evecs_;  // of -beta R k D^{1/2} W_k D^{1/2}
};

PlaneField apply_T_beta(const GaussianOperator& op, const PlaneField& h);

// A(x) = alpha(|x|) xhat^perp (x) xhat^perp, normal component zero.
struct RadialMatrixField {
    std::vector<double> r;
    std::vector<double> tangential;
    std::vector<double> normal;
    std::string convention;  // angular average normalization
    Eigen::Matrix2d at(const Vec2& x, const EquilibriumProfile& p) const;
};

RadialMatrixField diffusion_field_gaussian(const PlaneKernel& w, const EquilibriumProfile& p,
                                           const EquilibriumClass& cls, const std::vector<double>& r_out);
double diffusion_field_alpha(const EquilibriumProfile& p, double rho);
// Direct quadrature of 2 pi int (avg_e K(x - r e))^{(x)2} mu r dr with the 2-D kernel at arbitrary x.
Eigen::Matrix2d diffusion_field_direct(const PlaneKernel& w, const EquilibriumProfile& p, const Vec2& x,
                                       int n_angles = 256);

// Tagged density f(r, theta) = f0(r) + f1(r) cos(theta) with analytic derivatives.
struct AngularDensity {
    RadialFunction f0, f1;
};

struct MainTermResult {
    std::vector<double> t;
    std::vector<double> norm;          // weighted norm of the main term at each t
    std::vector<double> field_norm;    // weighted norm of the propagated two-particle field
    double cesaro_T = 0.0;
    double cesaro_norm = 0.0;
    double target_norm = 0.0;          // || (1/mu) div(A grad f0) ||
    double cesaro_rel_error = 0.0;     // || cesaro - target || / || target ||
    // radial profiles of the three angular components of the main term (const, cos, sin)
    std::vector<std::array<double, 3>> cesaro_components, target_components;
    std::vector<std::array<double, 3>> t0_components;
};

// Frame matrix (xhat, xhat^perp) of  int K_b(x - y) [e^{-itT} K_a(x - .)](y) mu(y) dy  at |x| = rho;
// the spectral factor e^{-i t lambda} is replaced by (1 - e^{-i T lambda})/(i T lambda) when cesaro is set.
Eigen::Matrix2d propagated_coupling(const GaussianOperator& op, double rho, double t, bool cesaro);

MainTermResult gaussian_main_term(const AngularDensity& f0, const GaussianOperator& op,
                                  const std::vector<double>& t_grid, double cesaro_T);

// ---------------------------------------------------------------- non-Gaussian equilibrium

// Functions of (x1, x2) invariant under joint rotation: F = sum_k F_k(r1, r2) e^{ik(theta2 - theta1)}.
struct TwoParticleField {
    std::vector<double> r1;
    std::vector<double> r2;  // product-integration nodes
    int k_max = 0;
    std::vector<Eigen::MatrixXcd> modes;  // index k + K, each r1.size() x r2.size()
};

struct ResolventStats {
    int max_terms = 0;
    double max_ratio = 0.0;
    double identity_residual = 0.0;
};

// Discretization of (iL^2 + beta iT + eps)^{-1} on the joint-rotation sector.
class PairResolvent {
public:
    PairResolvent(const EquilibriumProfile& p, int k_max, int sub = 64);

    const std::vector<double>& nodes() const { return s_; }
    const EquilibriumProfile& profile() const { return *p_; }
    int k_max() const { return k_max_; }
    double omega(std::size_t j) const { return om_[j]; }
    double mu(std::size_t j) const { return mu_[j]; }
    const Eigen::MatrixXd& w_table(int k) const { return wtab_[k]; }

    // Weights c_j with int N(s)/(ik(Omega(s) - Omega(r1)) + eps) ds ~ sum_j c_j N(s_j), N interpolated per panel.
    Eigen::VectorXcd product_weights(int k, double omega1, double eps) const;
    // v with v + gamma M v = src for one (r1, k); M = iT R0 on the node grid.
    Eigen::VectorXcd solve(int k, double omega1, double eps, double gamma, const Eigen::VectorXcd& src,
                           ResolventStats& stats) const;

private:
    const EquilibriumProfile* p_;
    int k_max_;
    int sub_;
    std::vector<double> s_, om_, mu_, om_fine_;
    std::vector<Eigen::MatrixXd> wtab_;
    Eigen::MatrixXd lagrange_;  // (sub+1) x order, panel-local
};

TwoParticleField resolvent_L2(const PairResolvent& res, double eps, double gamma, const TwoParticleField& src,
                              ResolventStats& stats);

struct CoefficientField {
    std::vector<double> r;
    std::vector<double> a;                     // extrapolated
    std::vector<std::vector<double>> a_eps;    // per schedule entry
    std::vector<double> eps;
    std::vector<double> gaps;                  // sup_r |a^(eps_i) - a^(eps_{i+1})|
    double stability_gap = 0.0;                // last gap
    bool flagged = false;
    ResolventStats stats;
    double interpolate(double r) const;
};

struct ABetaOptions {
    std::vector<double> eps_schedule{1e-2, 5e-3, 2.5e-3};
    int k_ang = 16;
    double gap_tolerance = 1e-2;  // relative to sup a
};

CoefficientField compute_a_beta(const EquilibriumProfile& p, const EquilibriumClass& cls,
                                const RenormalizedPotential& wb, const std::vector<double>& r_out,
                                const ABetaOptions& opts = {});

// ---------------------------------------------------------------- Fokker-Planck

struct FPSeries {
    std::vector<double> r;       // cell centres
    std::vector<double> volume;  // 2 pi int r dr per cell
    std::vector<double> mu;      // equilibrium at cell centres
    std::vector<double> tau;
    std::vector<std::vector<double>> f;
    double mass(std::size_t i) const;
    double h_norm(std::size_t i) const;  // || f / mu ||_{L^2_beta}
};

FPSeries fp_evolve(const std::function<double(double)>& f0, const std::function<double(double)>& a,
                   const EquilibriumProfile& p, const std::vector<double>& tau, int cells = 400);

}  // namespace pvk
