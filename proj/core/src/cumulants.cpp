#include "pvk/cumulants.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "pvk/effective.hpp"

namespace pvk {

ModeKey canonical_key(ModeKey key) {
    if (key.size() > 2) std::sort(key.begin() + 1, key.end());
    return key;
}

const Estimate* ModeTensor::find(const ModeKey& key) const {
    auto it = entries.find(canonical_key(key));
    return it == entries.end() ? nullptr : &it->second;
}

Estimate CorrelationEstimate::at(const ModeKey& key) const {
    for (std::size_t i = 1; i < key.size(); ++i)
        if (key[i].is_zero()) return {};
    auto it = g.find(canonical_key(key));
    return it == g.end() ? Estimate{} : it->second;
}

double CorrelationEstimate::norm() const {
    double s = 0.0;
    for (const auto& [k, e] : g) s += std::norm(e.mean);
    return std::sqrt(s);
}

double CorrelationEstimate::debiased_norm(double* se) const {
    double s = 0.0, bias = 0.0, var = 0.0;
    for (const auto& [k, e] : g) {
        const double v = e.se_re * e.se_re + e.se_im * e.se_im;
        s += std::norm(e.mean);
        bias += v;
        var += 4.0 * std::norm(e.mean) * v + 2.0 * v * v;
    }
    const double n2 = std::max(s - bias, 0.0);
    const double n = std::sqrt(n2);
    if (se) *se = n > 0.0 ? std::sqrt(var) / (2.0 * n) : std::sqrt(std::sqrt(var));
    return n;
}

MarginalSet marginals_from_moments(const MomentEstimates& m, std::size_t ti, int m_max) {
    if (m_max < 1 || m_max > 3) throw ConfigError("marginal level must be 1, 2 or 3");
    if (ti >= m.times.size()) throw ConfigError("time index out of range");
    MarginalSet f;
    f.n_particles = m.n_particles;
    f.t = m.times[ti];
    f.levels.resize(m_max);
    for (int l = 0; l < m_max; ++l) f.levels[l].level = l + 1;
    f.levels[0].entries[{Mode{0, 0}}] = Estimate{1.0, 0.0, 0.0};
    for (std::size_t i = 0; i < m.single_modes.size(); ++i)
        f.levels[0].entries[{m.single_modes[i]}] = m.single[ti][i];
    if (m_max >= 2)
        for (std::size_t i = 0; i < m.pair_modes.size(); ++i)
            f.levels[1].entries[canonical_key({m.pair_modes[i].k, m.pair_modes[i].l})] = m.pair[ti][i];
    if (m_max >= 3)
        for (std::size_t i = 0; i < m.triple_modes.size(); ++i) {
            const auto& t = m.triple_modes[i];
            f.levels[2].entries[canonical_key({t.k, t.l, t.m})] = m.triple[ti][i];
        }
    return f;
}

namespace {

void accumulate(Estimate& acc, const Estimate& e, double sign) {
    acc.mean += sign * e.mean;
    acc.se_re = std::hypot(acc.se_re, e.se_re);
    acc.se_im = std::hypot(acc.se_im, e.se_im);
}

}  // namespace

std::vector<CorrelationEstimate> invert_cluster(const MarginalSet& f, int m_max) {
    if (m_max < 1 || m_max > static_cast<int>(f.levels.size()))
        throw ConfigError("cluster inversion needs marginals up to the requested level");
    std::vector<CorrelationEstimate> out;
    for (int m = 1; m <= m_max; ++m) {
        CorrelationEstimate g;
        g.level = m;
        g.n_particles = f.n_particles;
        g.t = f.t;
        for (const auto& [key, est] : f.levels[m - 1].entries) {
            bool zero_slot = false;
            for (std::size_t i = 1; i < key.size(); ++i) zero_slot |= key[i].is_zero();
            if (zero_slot) continue;
            // subsets that drop a nonzero background mode carry a vanishing uniform-background factor
            g.g[key] = est;
        }
        out.push_back(std::move(g));
    }
    return out;
}

MarginalSet expand_cluster(const std::vector<CorrelationEstimate>& g, const MarginalSet& keys) {
    MarginalSet f = keys;
    for (auto& lvl : f.levels) {
        for (auto& [key, est] : lvl.entries) {
            const int nb = static_cast<int>(key.size()) - 1;
            Estimate acc;
            for (int mask = 0; mask < (1 << nb); ++mask) {
                ModeKey sub{key[0]};
                bool ok = true;
                for (int j = 0; j < nb; ++j) {
                    if (mask & (1 << j)) sub.push_back(key[j + 1]);
                    else if (!key[j + 1].is_zero()) ok = false;
                }
                if (!ok) continue;
                const std::size_t n = sub.size();
                if (n > g.size()) continue;
                accumulate(acc, g[n - 1].at(sub), 1.0);
            }
            est = acc;
        }
    }
    return f;
}

std::string ScalingReport::to_csv() const {
    std::ostringstream os;
    os << "N,norm,se\n";
    char buf[96];
    for (std::size_t i = 0; i < n.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", n[i], norm[i], se[i]);
        os << buf;
    }
    return os.str();
}

ScalingReport scaling_report(const std::vector<int>& n, const std::vector<double>& norm,
                             const std::vector<double>& se) {
    if (n.size() != norm.size() || n.size() != se.size()) throw ConfigError("scaling report: size mismatch");
    if (std::set<int>(n.begin(), n.end()).size() < 3) throw ConfigError("scaling report needs >= 3 distinct N");
    ScalingReport r{n, norm, se};
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(norm[i] > 0.0)) throw NumericError("scaling_report", "non-positive norm at N = " + std::to_string(n[i]));
        const double sig = se[i] > 0.0 ? se[i] / norm[i] : 1e-12;
        const double w = 1.0 / (sig * sig), x = std::log(double(n[i])), y = std::log(norm[i]);
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    const double det = sw * sxx - sx * sx;
    if (!(det > 0.0)) throw NumericError("scaling_report", "degenerate fit");
    r.slope = (sw * sxy - sx * sy) / det;
    r.intercept = (sxx * sy - sx * sxy) / det;
    r.slope_se = std::sqrt(sw / det);
    return r;
}

ScalingReport scaling_report(const std::vector<CorrelationEstimate>& g) {
    std::vector<int> n;
    std::vector<double> norm, se;
    for (const auto& c : g) {
        double s = 0.0;
        norm.push_back(c.debiased_norm(&s));
        se.push_back(s);
        n.push_back(c.n_particles);
    }
    return scaling_report(n, norm, se);
}

ShortTimeDerivatives exact_short_time_derivatives(const TorusDensity& f0, const TorusKernel& w, int n_particles,
                                                  int cutoff) {
    if (n_particles < 1) throw ConfigError("N must be positive");
    const DiffusionMatrix a = diffusion_matrix_torus(w);
    const double n = n_particles;
    ShortTimeDerivatives d;
    for (int k1 = -cutoff; k1 <= cutoff; ++k1)
        for (int k2 = -cutoff; k2 <= cutoff; ++k2) {
            const Mode k{k1, k2};
            const double kak = a(0, 0) * k1 * k1 + (a(0, 1) + a(1, 0)) * k1 * k2 + a(1, 1) * k2 * k2;
            d.d2[k] = -(n - 1.0) / (n * n) * kak * f0.coefficient(k);
            d.d3[k] = 0.0;
        }
    return d;
}

std::map<Mode, cplx> grid_modes(const std::vector<double>& values, int n) {
    if (static_cast<int>(values.size()) != n * n) throw ConfigError("grid size mismatch");
    std::vector<cplx> e(n);
    for (int j = 0; j < n; ++j) e[j] = std::polar(1.0, -kTwoPi * j / n);
    // separable DFT: first along x2, then along x1
    std::vector<cplx> tmp(n * n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            cplx s = 0.0;
            for (int j = 0; j < n; ++j) s += values[i * n + j] * e[(k * j) % n];
            tmp[i * n + k] = s;
        }
    std::map<Mode, cplx> out;
    const int h = n / 2;
    for (int k1 = 0; k1 < n; ++k1)
        for (int k2 = 0; k2 < n; ++k2) {
            cplx s = 0.0;
            for (int i = 0; i < n; ++i) s += tmp[i * n + k2] * e[(k1 * i) % n];
            const int m1 = k1 > h ? k1 - n : k1, m2 = k2 > h ? k2 - n : k2;
            out[Mode{m1, m2}] = s / double(n * n);
        }
    return out;
}

double grid_norm(const std::vector<double>& values) {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s / values.size());
}

double mode_norm(const std::map<Mode, cplx>& modes) {
    double s = 0.0;
    for (const auto& [k, c] : modes) s += std::norm(c);
    return std::sqrt(s);
}

}  // namespace pvk
