#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pvk/kernels.hpp"

namespace pvk {

// Band-limited density on the torus: f = sum_k c_k e^{ik.x}, c_0 = 1.
class TorusDensity {
public:
    TorusDensity();
    // f = 1 + sum a cos(k.x) from [k1, k2, a] triples
    static TorusDensity from_cosines(const std::vector<std::array<double, 3>>& terms);

    double operator()(const Vec2& x) const;
    cplx coefficient(Mode k) const;
    const std::map<Mode, cplx>& coefficients() const { return c_; }
    double upper_bound() const;
    int max_sup_norm() const;

private:
    std::map<Mode, cplx> c_;
};

// Density on the plane for rejection sampling inside a disk.
struct PlaneDensity {
    std::function<double(const Vec2&)> f;
    double bound = 0.0;
    double radius = 0.0;
};

struct ParticleState {
    std::vector<Vec2> x;
    double t = 0.0;
};

enum class InitialKind { UniformBackground, GibbsBackground };

struct SamplerStats {
    std::size_t burn_in = 0;
    double proposal_scale = 0.0;
    double acceptance = 1.0;
    std::size_t rejections_tagged = 0;
    std::string warning;
};

ParticleState sample_initial_torus(InitialKind kind, const TorusDensity& f0, const TorusKernel& w, double beta,
                                   int n, std::uint64_t seed, SamplerStats* stats = nullptr);
ParticleState sample_initial_plane(InitialKind kind, const PlaneDensity& f0, const ExternalPotential& v,
                                   const PlaneKernel& w, double beta, int n, std::uint64_t seed,
                                   SamplerStats* stats = nullptr);

double dt_max(const TorusKernel& w);
double dt_max(const PlaneKernel& w, const ExternalPotential& v, double r_max);

// Velocities (1/N) sum_j K(x_i - x_j) by mode summation, exact for band-limited K.
void torus_velocity(const TorusKernel& w, const std::vector<Vec2>& x, std::vector<Vec2>& v);
// Same by direct O(N^2) summation.
void torus_velocity_direct(const TorusKernel& w, const std::vector<Vec2>& x, std::vector<Vec2>& v);
void plane_velocity(const PlaneKernel& w, const ExternalPotential& v, const std::vector<Vec2>& x,
                    std::vector<Vec2>& out);

// Classical RK4 from state.t to t_end with steps of size at most |dt| (sign taken from t_end - t).
void integrate_torus(ParticleState& state, const TorusKernel& w, double dt, double t_end);
void integrate_plane(ParticleState& state, const PlaneKernel& w, const ExternalPotential& v, double dt,
                     double t_end);
std::vector<ParticleState> integrate_torus_trajectory(ParticleState state, const TorusKernel& w, double dt,
                                                      const std::vector<double>& t_grid);

double hamiltonian_torus(const ParticleState& s, const TorusKernel& w);
double hamiltonian_torus_direct(const ParticleState& s, const TorusKernel& w);
double hamiltonian_plane(const ParticleState& s, const ExternalPotential& v, const PlaneKernel& w);

struct PairMode {
    Mode k, l;
    auto operator<=>(const PairMode&) const = default;
};
struct TripleMode {
    Mode k, l, m;
    auto operator<=>(const TripleMode&) const = default;
};

struct EnsembleConfig {
    int n_particles = 2;
    long n_samples = 1;
    std::uint64_t seed = 1;
    double dt = 0.0;  // 0 selects dt_max
    std::vector<double> t_grid{0.0};
    std::vector<Mode> single_modes;
    std::vector<PairMode> pair_modes;
    std::vector<TripleMode> triple_modes;
    int pair_index = 0;  // 0 averages over background particles, j >= 2 uses particle j only
    InitialKind kind = InitialKind::UniformBackground;
    double beta = 0.0;
};

struct Estimate {
    cplx mean;
    double se_re = 0.0;
    double se_im = 0.0;
};

struct MomentEstimates {
    int n_particles = 0;
    long n_samples = 0;
    std::uint64_t seed = 0;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<Mode> single_modes;
    std::vector<PairMode> pair_modes;
    std::vector<TripleMode> triple_modes;
    // [time][mode]
    std::vector<std::vector<Estimate>> single, pair, triple;
    double max_energy_drift = 0.0;

    std::string to_json() const;
    static MomentEstimates from_json(const std::string& text);
};

// Streams per-sample observables to a callback in sample order: values[time][mode] for single moments.
using SampleHook = std::function<void(long sample, const std::vector<std::vector<cplx>>& single)>;

MomentEstimates run_ensemble(const EnsembleConfig& cfg, const TorusKernel& w, const TorusDensity& f0,
                             const SampleHook& hook = {});

}  // namespace pvk
