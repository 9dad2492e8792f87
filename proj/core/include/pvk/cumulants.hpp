#pragma once

#include <map>
#include <string>
#include <vector>

#include "pvk/kernels.hpp"
#include "pvk/nbody.hpp"

namespace pvk {

// Mode tuple (k1, k2, ..., km): tagged mode first, background slots sorted.
using ModeKey = std::vector<Mode>;

ModeKey canonical_key(ModeKey key);

// Coefficient tensor of level m with standard errors.
struct ModeTensor {
    int level = 1;
    std::map<ModeKey, Estimate> entries;
    const Estimate* find(const ModeKey& key) const;
};

struct MarginalSet {
    int n_particles = 0;
    double t = 0.0;
    std::vector<ModeTensor> levels;  // levels[m-1] holds f^m
};

struct CorrelationEstimate {
    int level = 1;
    int n_particles = 0;
    double t = 0.0;
    std::map<ModeKey, Estimate> g;  // background slots nonzero
    // value at any key; zero whenever a background slot is the zero mode
    Estimate at(const ModeKey& key) const;
    double norm() const;            // l2 over stored entries
    double debiased_norm(double* se = nullptr) const;
};

MarginalSet marginals_from_moments(const MomentEstimates& m, std::size_t time_index, int m_max = 3);

// g^m = sum over background subsets of (-1)^(m-n) f^n; levels 1..m_max.
std::vector<CorrelationEstimate> invert_cluster(const MarginalSet& f, int m_max = 3);
// f^m = sum over background subsets sigma of g^{|sigma|+1}; produces f at every key of the template.
MarginalSet expand_cluster(const std::vector<CorrelationEstimate>& g, const MarginalSet& keys);

struct ScalingReport {
    std::vector<int> n;
    std::vector<double> norm, se;
    double slope = 0.0;
    double slope_se = 0.0;
    double intercept = 0.0;
    std::string to_csv() const;
};

// Weighted least-squares slope of log norm against log N; needs at least three distinct N.
ScalingReport scaling_report(const std::vector<int>& n, const std::vector<double>& norm,
                             const std::vector<double>& se);
ScalingReport scaling_report(const std::vector<CorrelationEstimate>& g);

struct ShortTimeDerivatives {
    std::map<Mode, cplx> d2, d3;
};

ShortTimeDerivatives exact_short_time_derivatives(const TorusDensity& f0, const TorusKernel& w, int n_particles,
                                                  int cutoff);

// Fourier coefficients of real samples on an n x n grid of the torus.
std::map<Mode, cplx> grid_modes(const std::vector<double>& values, int n);
// (mean of |g|^2 over the grid)^(1/2)
double grid_norm(const std::vector<double>& values);
double mode_norm(const std::map<Mode, cplx>& modes);

}  // namespace pvk
