#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pvk/kernels.hpp"
#include "pvk/nbody.hpp"

namespace pvk {

// Truncated Fock basis: level m holds (tagged mode in the Lambda-ball, multiset of m-1 nonzero modes).
class FockBasis {
public:
    FockBasis(int lambda, int m_max);

    int lambda() const { return lambda_; }
    int m_max() const { return m_max_; }
    std::size_t size() const { return keys_.size(); }
    std::size_t level_size(int m) const { return offset_[m] - offset_[m - 1]; }
    std::size_t level_offset(int m) const { return offset_[m - 1]; }
    std::vector<std::size_t> level_dimensions() const;

    const std::vector<Mode>& modes() const { return modes_; }
    int mode_index(Mode k) const;  // -1 outside the ball
    // key: tagged mode index followed by sorted background mode indices
    const std::vector<int>& key(std::size_t i) const { return keys_[i]; }
    int level_of(std::size_t i) const { return static_cast<int>(keys_[i].size()); }
    long find(std::vector<int> key) const;  // sorts the background part; -1 if absent
    // inner-product weight 1 / prod n_j! of the background multiset
    double weight(std::size_t i) const { return weight_[i]; }
    Mode total_momentum(std::size_t i) const;

private:
    int lambda_, m_max_;
    std::vector<Mode> modes_;
    std::vector<std::vector<int>> keys_;
    std::map<std::vector<int>, std::size_t> index_;
    std::vector<std::size_t> offset_;
    std::vector<double> weight_;
};

struct FockVector {
    const FockBasis* basis = nullptr;
    Eigen::VectorXcd c;
    double norm() const;
    cplx inner(const FockVector& other) const;  // weighted, conjugate-linear in *this
};

FockBasis enumerate_basis(int lambda, int m_max);

class HierarchyOperator {
public:
    HierarchyOperator(const TorusKernel& w, const FockBasis& basis);

    const FockBasis& basis() const { return *basis_; }
    // S = S^+ + S^- in storage coordinates
    const Eigen::SparseMatrix<cplx>& matrix() const { return s_; }
    // W^{1/2} S W^{-1/2}, Hermitian in the plain inner product
    const Eigen::SparseMatrix<cplx>& symmetrized() const { return sym_; }
    FockVector apply(const FockVector& v) const;
    // max over pairs of |<S h, g> - <h, S g>| for random unit vectors
    double adjoint_residual(int pairs, std::uint64_t seed) const;

private:
    const FockBasis* basis_;
    Eigen::SparseMatrix<cplx> s_, sym_;
    Eigen::VectorXd sqrt_w_;
};

HierarchyOperator build_operator(const TorusKernel& w, const FockBasis& basis);
FockVector initial_state(const TorusDensity& f0, const FockBasis& basis);

struct PropagatorStats {
    int substeps = 0;
    double max_error_estimate = 0.0;
};

// g(tau) = exp(i tau S) g0 by Lanczos with step-size control.
std::vector<FockVector> evolve(const HierarchyOperator& op, const FockVector& g0, const std::vector<double>& tau,
                               int krylov_dim = 30, double tol = 1e-12, PropagatorStats* stats = nullptr);

// Exact Hermitian eigendecomposition, block-diagonal over total-momentum sectors.
class SpectralDecomposition {
public:
    explicit SpectralDecomposition(const HierarchyOperator& op);
    std::size_t size() const { return lambda_.size(); }
    const Eigen::VectorXd& eigenvalues() const { return lambda_; }
    // coefficients of W^{1/2} v in the eigenbasis
    Eigen::VectorXcd project(const FockVector& v) const;
    FockVector reconstruct(const Eigen::VectorXcd& a) const;
    std::vector<FockVector> evolve(const FockVector& g0, const std::vector<double>& tau) const;
    // largest |Im lambda| of the storage-coordinate matrix, sector by sector
    double max_imag_eigenvalue(const HierarchyOperator& op) const;

private:
    const FockBasis* basis_;
    Eigen::VectorXd lambda_, sqrt_w_;
    std::vector<std::vector<std::size_t>> sectors_;
    std::vector<Eigen::MatrixXcd> vectors_;
    std::vector<std::size_t> first_;  // eigenvalue offset of each sector
};

// Level-1 component as modes, and samples of the real-space function on an n x n grid.
std::map<Mode, cplx> tagged_observable(const FockVector& g);
std::vector<double> tagged_samples(const FockVector& g, int n);

struct SpectralReport {
    std::vector<double> eigenvalues;        // cluster representatives
    std::vector<double> weights;            // |<h, P_lambda g0>|^2 per cluster
    double weight_sum = 0.0;
    double hermiticity_defect = 0.0;       // max |S~ - S~^H|
    double max_imag_eigenvalue = 0.0;      // general eigen-solver on the unsymmetrized sectors
    std::vector<double> T;
    std::vector<double> cesaro;             // (1/T) int_0^T |<h, g(tau)>|^2 by quadrature
    std::vector<double> cesaro_exact;       // closed-form time average
    std::vector<double> envelope;           // max over T' in [T, 2T] of |cesaro(T') - weight_sum|
    double decay_exponent = 0.0;            // fitted p in envelope ~ C T^-p
    std::string to_json() const;
};

SpectralReport spectral_diagnostics(const HierarchyOperator& op, const FockVector& g0, const FockVector& h,
                                    const std::vector<double>& T_list);

}  // namespace pvk
