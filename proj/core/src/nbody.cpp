#include "pvk/nbody.hpp"

#include <cmath>
#include <cstdlib>
#include <algorithm>
#include <map>

#include <json.hpp>
#ifdef PVK_HAVE_OPENMP
#include <omp.h>
#endif

namespace pvk {

int worker_threads() {
    if (const char* env = std::getenv("PVK_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
#ifdef PVK_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// ---------------------------------------------------------------- densities

TorusDensity::TorusDensity() { c_[Mode{0, 0}] = 1.0; }

TorusDensity TorusDensity::from_cosines(const std::vector<std::array<double, 3>>& terms) {
    TorusDensity d;
    for (const auto& t : terms) {
        Mode k{static_cast<int>(std::lround(t[0])), static_cast<int>(std::lround(t[1]))};
        if (k.is_zero()) throw ConfigError("tagged density: the (0,0) coefficient is fixed to 1");
        d.c_[k] += 0.5 * t[2];
        d.c_[-k] += 0.5 * t[2];
    }
    return d;
}

double TorusDensity::operator()(const Vec2& x) const {
    double s = 0.0;
    for (const auto& [k, c] : c_) s += (c * std::polar(1.0, k.dot(x))).real();
    return s;
}

cplx TorusDensity::coefficient(Mode k) const {
    auto it = c_.find(k);
    return it == c_.end() ? cplx(0.0) : it->second;
}

double TorusDensity::upper_bound() const {
    double b = 0.0;
    for (const auto& [k, c] : c_) b += std::abs(c);
    return b;
}

int TorusDensity::max_sup_norm() const {
    int m = 0;
    for (const auto& [k, c] : c_) m = std::max(m, k.sup_norm());
    return m;
}

// ---------------------------------------------------------------- sampling

namespace {

double wrap(double a) {
    a = std::fmod(a, kTwoPi);
    return a < 0.0 ? a + kTwoPi : a;
}

template <class Density, class Propose>
Vec2 rejection(const Density& f, double bound, Propose propose, std::mt19937_64& rng, std::size_t& rejected) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        const Vec2 x = propose();
        const double fx = f(x);
        if (fx > bound * (1.0 + 1e-12)) throw NumericError("sample_initial", "rejection bound violated");
        if (u(rng) * bound < fx) return x;
        ++rejected;
    }
}

// Single-particle random-walk Metropolis on the background with step-size tuning.
template <class DeltaE, class Move>
void metropolis(std::vector<Vec2>& x, DeltaE delta_e, Move move, std::mt19937_64& rng, SamplerStats& st,
                double initial_scale) {
    const std::size_t nb = x.size() - 1;
    if (nb == 0) return;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(1, nb);
    double scale = initial_scale;
    const std::size_t burn = 100 * (nb + 1), measure = 20 * (nb + 1);
    std::size_t acc_batch = 0, acc_measure = 0;
    for (std::size_t it = 0; it < burn + measure; ++it) {
        const std::size_t i = pick(rng);
        const Vec2 prop = move(x[i], Vec2{scale * g(rng), scale * g(rng)});
        const double de = delta_e(i, prop);
        const bool accept = de <= 0.0 || u(rng) < std::exp(-de);
        if (accept) x[i] = prop;
        if (it < burn) {
            acc_batch += accept;
            if ((it + 1) % 100 == 0) {
                scale *= acc_batch > 40 ? 1.1 : 1.0 / 1.1;
                acc_batch = 0;
            }
        } else {
            acc_measure += accept;
        }
    }
    st.burn_in = burn;
    st.proposal_scale = scale;
    st.acceptance = double(acc_measure) / double(measure);
    if (st.acceptance < 0.1 || st.acceptance > 0.9)
        st.warning = "Metropolis acceptance " + std::to_string(st.acceptance) + " outside [0.1, 0.9]";
}

}  // namespace

ParticleState sample_initial_torus(InitialKind kind, const TorusDensity& f0, const TorusKernel& w, double beta,
                                   int n, std::uint64_t seed, SamplerStats* stats) {
    if (n < 1) throw ConfigError("need at least one particle");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    SamplerStats st;
    ParticleState s;
    s.x.resize(n);
    s.x[0] = rejection(f0, f0.upper_bound(), [&] { return Vec2{u(rng), u(rng)}; }, rng, st.rejections_tagged);
    for (int j = 1; j < n; ++j) s.x[j] = {u(rng), u(rng)};
    if (kind == InitialKind::GibbsBackground && beta != 0.0 && !w.empty()) {
        auto de = [&](std::size_t i, const Vec2& p) {
            double d = 0.0;
            for (std::size_t j = 1; j < s.x.size(); ++j) {
                if (j == i) continue;
                d += w.potential({p[0] - s.x[j][0], p[1] - s.x[j][1]}) -
                     w.potential({s.x[i][0] - s.x[j][0], s.x[i][1] - s.x[j][1]});
            }
            return beta * d / n;
        };
        auto mv = [](const Vec2& a, const Vec2& d) { return Vec2{wrap(a[0] + d[0]), wrap(a[1] + d[1])}; };
        metropolis(s.x, de, mv, rng, st, 1.0);
    }
    if (stats) *stats = st;
    return s;
}

ParticleState sample_initial_plane(InitialKind kind, const PlaneDensity& f0, const ExternalPotential& v,
                                   const PlaneKernel& w, double beta, int n, std::uint64_t seed,
                                   SamplerStats* stats) {
    if (n < 1) throw ConfigError("need at least one particle");
    if (kind != InitialKind::GibbsBackground) throw ConfigError("plane backgrounds are Gibbs distributed");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SamplerStats st;
    ParticleState s;
    s.x.resize(n);
    auto in_disk = [&] {
        const double r = f0.radius * std::sqrt(u(rng)), a = kTwoPi * u(rng);
        return Vec2{r * std::cos(a), r * std::sin(a)};
    };
    s.x[0] = rejection(f0.f, f0.bound, in_disk, rng, st.rejections_tagged);
    std::normal_distribution<double> g(0.0, 1.0);
    const double spread = 1.0 / std::sqrt(std::max(beta, 1e-3));
    for (int j = 1; j < n; ++j) s.x[j] = {spread * g(rng), spread * g(rng)};
    auto de = [&](std::size_t i, const Vec2& p) {
        double d = v.potential(p) - v.potential(s.x[i]);
        double dw = 0.0;
        for (std::size_t j = 1; j < s.x.size(); ++j) {
            if (j == i) continue;
            dw += w.potential({p[0] - s.x[j][0], p[1] - s.x[j][1]}) -
                  w.potential({s.x[i][0] - s.x[j][0], s.x[i][1] - s.x[j][1]});
        }
        return beta * (d + dw / n);
    };
    auto mv = [](const Vec2& a, const Vec2& d) { return Vec2{a[0] + d[0], a[1] + d[1]}; };
    metropolis(s.x, de, mv, rng, st, spread);
    if (stats) *stats = st;
    return s;
}

// ---------------------------------------------------------------- dynamics

double dt_max(const TorusKernel& w) { return 0.05 / std::max(1.0, w.grad_sup()); }

double dt_max(const PlaneKernel& w, const ExternalPotential& v, double r_max) {
    return 0.05 / std::max(1.0, w.grad_sup() + v.grad_sup(r_max));
}

namespace {

struct HalfMode {
    int p1, p2;
    cplx kx, ky;
};

std::vector<HalfMode> half_modes(const TorusKernel& w) {
    std::vector<HalfMode> out;
    for (const auto& f : w.force_modes())
        if (f.k > -f.k) out.push_back({f.k.k1, f.k.k2, f.k_hat[0], f.k_hat[1]});
    return out;
}

// e^{i m x} for m = -P..P per particle, stored [(m + P) * n + i].
void power_table(const std::vector<Vec2>& x, int P, int axis, std::vector<cplx>& out) {
    const std::size_t n = x.size();
    out.assign((2 * P + 1) * n, cplx(1.0));
    for (std::size_t i = 0; i < n; ++i) {
        const cplx e(std::cos(x[i][axis]), std::sin(x[i][axis]));
        cplx p = 1.0;
        for (int m = 1; m <= P; ++m) {
            p *= e;
            out[(P + m) * n + i] = p;
            out[(P - m) * n + i] = std::conj(p);
        }
    }
}

}  // namespace

void torus_velocity(const TorusKernel& w, const std::vector<Vec2>& x, std::vector<Vec2>& v) {
    const std::size_t n = x.size();
    v.assign(n, Vec2{0.0, 0.0});
    if (w.empty() || n == 0) return;
    const int P = w.max_sup_norm();
    thread_local std::vector<cplx> e1, e2, ep;
    power_table(x, P, 0, e1);
    power_table(x, P, 1, e2);
    ep.resize(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (const HalfMode& h : half_modes(w)) {
        const cplx* a = &e1[(P + h.p1) * n];
        const cplx* b = &e2[(P + h.p2) * n];
        cplx rho = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ep[i] = a[i] * b[i];
            rho += ep[i];
        }
        const cplx cr = std::conj(rho) * inv_n;
        const cplx cx = 2.0 * h.kx * cr, cy = 2.0 * h.ky * cr;
        for (std::size_t i = 0; i < n; ++i) {
            v[i][0] += (cx * ep[i]).real();
            v[i][1] += (cy * ep[i]).real();
        }
    }
}

void torus_velocity_direct(const TorusKernel& w, const std::vector<Vec2>& x, std::vector<Vec2>& v) {
    const std::size_t n = x.size();
    v.assign(n, Vec2{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const Vec2 k = w.force({x[i][0] - x[j][0], x[i][1] - x[j][1]});
            v[i][0] += k[0] / n;
            v[i][1] += k[1] / n;
        }
}

void plane_velocity(const PlaneKernel& w, const ExternalPotential& vp, const std::vector<Vec2>& x,
                    std::vector<Vec2>& out) {
    const std::size_t n = x.size();
    out.assign(n, Vec2{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 f = vp.force(x[i]);
        out[i][0] += f[0];
        out[i][1] += f[1];
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec2 k = w.force({x[i][0] - x[j][0], x[i][1] - x[j][1]});
            out[i][0] += k[0] / n;
            out[i][1] += k[1] / n;
            out[j][0] -= k[0] / n;
            out[j][1] -= k[1] / n;
        }
    }
}

namespace {

template <class Velocity>
void rk4(ParticleState& s, double dt, double t_end, bool periodic, Velocity vel) {
    const double span = t_end - s.t;
    if (span == 0.0) return;
    const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(span) / std::abs(dt) - 1e-9)));
    const double h = span / steps;
    const std::size_t n = s.x.size();
    std::vector<Vec2> k1, k2, k3, k4, y(n);
    for (long st = 0; st < steps; ++st) {
        vel(s.x, k1);
        for (std::size_t i = 0; i < n; ++i) y[i] = {s.x[i][0] + 0.5 * h * k1[i][0], s.x[i][1] + 0.5 * h * k1[i][1]};
        vel(y, k2);
        for (std::size_t i = 0; i < n; ++i) y[i] = {s.x[i][0] + 0.5 * h * k2[i][0], s.x[i][1] + 0.5 * h * k2[i][1]};
        vel(y, k3);
        for (std::size_t i = 0; i < n; ++i) y[i] = {s.x[i][0] + h * k3[i][0], s.x[i][1] + h * k3[i][1]};
        vel(y, k4);
        for (std::size_t i = 0; i < n; ++i)
            for (int a = 0; a < 2; ++a) {
                double z = s.x[i][a] + h / 6.0 * (k1[i][a] + 2.0 * k2[i][a] + 2.0 * k3[i][a] + k4[i][a]);
                if (!std::isfinite(z)) throw NumericError("integrate", "non-finite position");
                s.x[i][a] = periodic ? wrap(z) : z;
            }
    }
    s.t = t_end;
}

}  // namespace

void integrate_torus(ParticleState& s, const TorusKernel& w, double dt, double t_end) {
    rk4(s, dt, t_end, true, [&](const std::vector<Vec2>& x, std::vector<Vec2>& v) { torus_velocity(w, x, v); });
}

void integrate_plane(ParticleState& s, const PlaneKernel& w, const ExternalPotential& v, double dt,
                     double t_end) {
    rk4(s, dt, t_end, false,
        [&](const std::vector<Vec2>& x, std::vector<Vec2>& out) { plane_velocity(w, v, x, out); });
}

std::vector<ParticleState> integrate_torus_trajectory(ParticleState s, const TorusKernel& w, double dt,
                                                      const std::vector<double>& t_grid) {
    std::vector<ParticleState> out;
    for (double t : t_grid) {
        integrate_torus(s, w, dt, t);
        out.push_back(s);
    }
    return out;
}

double hamiltonian_torus(const ParticleState& s, const TorusKernel& w) {
    const double n = static_cast<double>(s.x.size());
    double h = 0.0;
    for (const auto& [k, wk] : w.mode_table()) {
        cplx rho = 0.0;
        for (const Vec2& x : s.x) rho += std::polar(1.0, k.dot(x));
        h += wk.real() * std::norm(rho);
    }
    return h / (2.0 * n);
}

double hamiltonian_torus_direct(const ParticleState& s, const TorusKernel& w) {
    const std::size_t n = s.x.size();
    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h += w.potential({s.x[i][0] - s.x[j][0], s.x[i][1] - s.x[j][1]});
    return h / (2.0 * n);
}

double hamiltonian_plane(const ParticleState& s, const ExternalPotential& v, const PlaneKernel& w) {
    const std::size_t n = s.x.size();
    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        h += v.potential(s.x[i]);
        for (std::size_t j = 0; j < n; ++j)
            h += w.potential({s.x[i][0] - s.x[j][0], s.x[i][1] - s.x[j][1]}) / (2.0 * n);
    }
    return h;
}

// ---------------------------------------------------------------- ensembles

namespace {

// Sums over the selected background particles of e^{-i l.x_j} for each requested l.
std::map<Mode, cplx> background_sums(const std::vector<Vec2>& x, const std::vector<Mode>& modes, int only) {
    std::map<Mode, cplx> out;
    for (Mode l : modes) out[l] = 0.0;
    const std::size_t lo = only > 0 ? only - 1 : 1, hi = only > 0 ? only : x.size();
    for (std::size_t j = lo; j < hi; ++j)
        for (auto& [l, s] : out) s += std::polar(1.0, -l.dot(x[j]));
    return out;
}

struct Welford {
    long n = 0;
    cplx mean = 0.0;
    double m2re = 0.0, m2im = 0.0;
    void add(cplx v) {
        ++n;
        const cplx d = v - mean;
        mean += d / static_cast<double>(n);
        const cplx d2 = v - mean;
        m2re += d.real() * d2.real();
        m2im += d.imag() * d2.imag();
    }
    Estimate get() const {
        Estimate e{mean, 0.0, 0.0};
        if (n > 1) {
            e.se_re = std::sqrt(m2re / (n - 1) / n);
            e.se_im = std::sqrt(m2im / (n - 1) / n);
        }
        return e;
    }
};

}  // namespace

MomentEstimates run_ensemble(const EnsembleConfig& cfg, const TorusKernel& w, const TorusDensity& f0,
                             const SampleHook& hook) {
    if (cfg.n_particles < 1 || cfg.n_samples < 1) throw ConfigError("ensemble needs N >= 1 and S >= 1");
    for (std::size_t i = 1; i < cfg.t_grid.size(); ++i)
        if (!(cfg.t_grid[i] > cfg.t_grid[i - 1])) throw ConfigError("t_grid must be increasing");
    if (cfg.pair_index == 1 || cfg.pair_index > cfg.n_particles) throw ConfigError("pair_index out of range");
    if (!cfg.triple_modes.empty() && cfg.n_particles < 3) throw ConfigError("triple moments need N >= 3");
    const double dtm = dt_max(w);
    const double dt = cfg.dt > 0.0 ? cfg.dt : dtm;
    if (dt > dtm * (1.0 + 1e-12)) throw ConfigError("dt exceeds dt_max = " + std::to_string(dtm));

    MomentEstimates out;
    out.n_particles = cfg.n_particles;
    out.n_samples = cfg.n_samples;
    out.seed = cfg.seed;
    out.dt = dt;
    out.times = cfg.t_grid;
    out.single_modes = cfg.single_modes;
    out.pair_modes = cfg.pair_modes;
    out.triple_modes = cfg.triple_modes;

    std::vector<Mode> bg;
    for (const auto& p : cfg.pair_modes) bg.push_back(p.l);
    for (const auto& t : cfg.triple_modes) { bg.push_back(t.l); bg.push_back(t.m); bg.push_back(t.l + t.m); }
    std::sort(bg.begin(), bg.end());
    bg.erase(std::unique(bg.begin(), bg.end()), bg.end());

    const std::size_t nt = cfg.t_grid.size();
    const std::size_t n1 = cfg.single_modes.size(), n2 = cfg.pair_modes.size(), n3 = cfg.triple_modes.size();
    const std::size_t per_time = n1 + n2 + n3;
    const double nbg = cfg.pair_index > 0 ? 1.0 : static_cast<double>(cfg.n_particles - 1);
    const double nbg2 = static_cast<double>(cfg.n_particles - 1) * (cfg.n_particles - 2);

    std::vector<Welford> acc(nt * per_time);
    const long chunk = 64L * std::max(1, worker_threads());
    std::vector<cplx> buf;
    std::vector<double> drift;
    auto zero_it = std::lower_bound(cfg.t_grid.begin(), cfg.t_grid.end(), 0.0);
    const std::size_t first_fwd = zero_it - cfg.t_grid.begin();

    for (long c0 = 0; c0 < cfg.n_samples; c0 += chunk) {
        const long c1 = std::min(cfg.n_samples, c0 + chunk);
        buf.assign((c1 - c0) * nt * per_time, cplx(0.0));
        drift.assign(c1 - c0, 0.0);
        std::string failure;
#ifdef PVK_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
#endif
        for (long s = c0; s < c1; ++s) {
            try {
                const std::uint64_t seed = splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(s)));
                const ParticleState init =
                    sample_initial_torus(cfg.kind, f0, w, cfg.beta, cfg.n_particles, seed);
                const double h0 = hamiltonian_torus(init, w);
                cplx* row = &buf[(s - c0) * nt * per_time];
                double dmax = 0.0;
                auto record = [&](const ParticleState& st, std::size_t ti) {
                    cplx* r = row + ti * per_time;
                    const Vec2& x1 = st.x[0];
                    for (std::size_t m = 0; m < n1; ++m) r[m] = std::polar(1.0, -cfg.single_modes[m].dot(x1));
                    if (n2 + n3 > 0) {
                        const auto S = background_sums(st.x, bg, cfg.pair_index);
                        for (std::size_t m = 0; m < n2; ++m) {
                            const auto& p = cfg.pair_modes[m];
                            r[n1 + m] = std::polar(1.0, -p.k.dot(x1)) * S.at(p.l) / nbg;
                        }
                        for (std::size_t m = 0; m < n3; ++m) {
                            const auto& t = cfg.triple_modes[m];
                            r[n1 + n2 + m] = std::polar(1.0, -t.k.dot(x1)) *
                                             (S.at(t.l) * S.at(t.m) - S.at(t.l + t.m)) / nbg2;
                        }
                    }
                    dmax = std::max(dmax, std::abs(hamiltonian_torus(st, w) - h0));
                };
                ParticleState st = init;
                for (std::size_t ti = first_fwd; ti < nt; ++ti) {
                    integrate_torus(st, w, dt, cfg.t_grid[ti]);
                    record(st, ti);
                }
                st = init;
                for (std::size_t ti = first_fwd; ti-- > 0;) {
                    integrate_torus(st, w, dt, cfg.t_grid[ti]);
                    record(st, ti);
                }
                drift[s - c0] = dmax;
            } catch (const std::exception& e) {
#ifdef PVK_HAVE_OPENMP
#pragma omp critical
#endif
                failure = "sample " + std::to_string(s) + ": " + e.what();
            }
        }
        if (!failure.empty()) throw NumericError("run_ensemble", failure);
        std::vector<std::vector<cplx>> single(nt, std::vector<cplx>(n1));
        for (long s = c0; s < c1; ++s) {
            const cplx* row = &buf[(s - c0) * nt * per_time];
            for (std::size_t i = 0; i < nt * per_time; ++i) acc[i].add(row[i]);
            out.max_energy_drift = std::max(out.max_energy_drift, drift[s - c0]);
            if (hook) {
                for (std::size_t ti = 0; ti < nt; ++ti)
                    for (std::size_t m = 0; m < n1; ++m) single[ti][m] = row[ti * per_time + m];
                hook(s, single);
            }
        }
    }
    out.single.assign(nt, {});
    out.pair.assign(nt, {});
    out.triple.assign(nt, {});
    for (std::size_t ti = 0; ti < nt; ++ti)
        for (std::size_t m = 0; m < per_time; ++m) {
            const Estimate e = acc[ti * per_time + m].get();
            if (m < n1) out.single[ti].push_back(e);
            else if (m < n1 + n2) out.pair[ti].push_back(e);
            else out.triple[ti].push_back(e);
        }
    return out;
}

// ---------------------------------------------------------------- json

namespace {

nlohmann::json mode_json(Mode k) { return nlohmann::json::array({k.k1, k.k2}); }
Mode json_mode(const nlohmann::json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

}  // namespace

std::string MomentEstimates::to_json() const {
    using nlohmann::json;
    json j;
    j["meta"] = {{"n_particles", n_particles}, {"n_samples", n_samples}, {"seed", seed},
                 {"dt", dt},                   {"max_energy_drift", max_energy_drift}};
    j["times"] = times;
    json moments = json::array();
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        json row = json::array();
        auto put = [&](json k, const Estimate& e) {
            row.push_back({{"k", std::move(k)},
                           {"re", e.mean.real()},
                           {"im", e.mean.imag()},
                           {"se_re", e.se_re},
                           {"se_im", e.se_im}});
        };
        for (std::size_t m = 0; m < single_modes.size(); ++m) put(json::array({mode_json(single_modes[m])}), single[ti][m]);
        for (std::size_t m = 0; m < pair_modes.size(); ++m)
            put(json::array({mode_json(pair_modes[m].k), mode_json(pair_modes[m].l)}), pair[ti][m]);
        for (std::size_t m = 0; m < triple_modes.size(); ++m)
            put(json::array({mode_json(triple_modes[m].k), mode_json(triple_modes[m].l), mode_json(triple_modes[m].m)}),
                triple[ti][m]);
        moments.push_back(std::move(row));
    }
    j["moments"] = std::move(moments);
    return j.dump(1);
}

MomentEstimates MomentEstimates::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    MomentEstimates m;
    const auto& meta = j.at("meta");
    m.n_particles = meta.at("n_particles").get<int>();
    m.n_samples = meta.at("n_samples").get<long>();
    m.seed = meta.at("seed").get<std::uint64_t>();
    m.dt = meta.at("dt").get<double>();
    m.max_energy_drift = meta.at("max_energy_drift").get<double>();
    m.times = j.at("times").get<std::vector<double>>();
    const auto& mom = j.at("moments");
    m.single.assign(m.times.size(), {});
    m.pair.assign(m.times.size(), {});
    m.triple.assign(m.times.size(), {});
    for (std::size_t ti = 0; ti < m.times.size(); ++ti)
        for (const auto& e : mom.at(ti)) {
            const auto& k = e.at("k");
            Estimate est{cplx(e.at("re").get<double>(), e.at("im").get<double>()), e.at("se_re").get<double>(),
                         e.at("se_im").get<double>()};
            if (k.size() == 1) {
                m.single[ti].push_back(est);
                if (ti == 0) m.single_modes.push_back(json_mode(k[0]));
            } else if (k.size() == 2) {
                m.pair[ti].push_back(est);
                if (ti == 0) m.pair_modes.push_back({json_mode(k[0]), json_mode(k[1])});
            } else {
                m.triple[ti].push_back(est);
                if (ti == 0) m.triple_modes.push_back({json_mode(k[0]), json_mode(k[1]), json_mode(k[2])});
            }
        }
    return m;
}

}  // namespace pvk
