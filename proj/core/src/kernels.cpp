#include "pvk/kernels.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace pvk {

std::string to_string(Mode k) {
    std::ostringstream os;
    os << '(' << k.k1 << ',' << k.k2 << ')';
    return os.str();
}

TorusKernel TorusKernel::from_modes(const std::map<Mode, cplx>& table) {
    TorusKernel t;
    for (const auto& [k, w] : table) {
        if (k.is_zero()) throw ConfigError("torus kernel: mode (0,0) not allowed (K must have zero mean)");
        if (std::abs(w.imag()) > 1e-14 * std::max(1.0, std::abs(w)))
            throw ConfigError("torus kernel: complex amplitude at " + to_string(k) + " (W must be real and even)");
        auto it = table.find(-k);
        if (it == table.end() || std::abs(it->second - w) > 1e-14 * std::max(1.0, std::abs(w)))
            throw ConfigError("torus kernel: odd part at " + to_string(k) + " (W_hat(-k) != W_hat(k))");
        if (w == 0.0) continue;
        t.w_hat_[k] = cplx(w.real(), 0.0);
    }
    for (const auto& [k, w] : t.w_hat_) {
        // K_hat = -i (-k2, k1) W_hat
        const cplx mi(0.0, -1.0);
        t.force_.push_back({k, w, {mi * static_cast<double>(-k.k2) * w, mi * static_cast<double>(k.k1) * w}});
    }
    return t;
}

TorusKernel TorusKernel::from_cosines(const std::vector<std::array<double, 3>>& terms) {
    std::map<Mode, cplx> table;
    for (const auto& t : terms) {
        const double i1 = std::round(t[0]), i2 = std::round(t[1]);
        if (i1 != t[0] || i2 != t[1]) throw ConfigError("torus kernel: non-integer mode");
        Mode k{static_cast<int>(i1), static_cast<int>(i2)};
        if (k.is_zero()) throw ConfigError("torus kernel: mode (0,0) not allowed (K must have zero mean)");
        table[k] += 0.5 * t[2];
        table[-k] += 0.5 * t[2];
    }
    return from_modes(table);
}

std::vector<std::array<double, 3>> TorusKernel::cosine_terms() const {
    std::vector<std::array<double, 3>> out;
    for (const auto& [k, w] : w_hat_)
        if (k > -k) out.push_back({double(k.k1), double(k.k2), 2.0 * w.real()});
    return out;
}

int TorusKernel::max_sup_norm() const {
    int m = 0;
    for (const auto& [k, w] : w_hat_) m = std::max(m, k.sup_norm());
    return m;
}

double TorusKernel::potential(const Vec2& x) const {
    double s = 0.0;
    for (const auto& [k, w] : w_hat_) s += w.real() * std::cos(k.dot(x));
    return s;
}

Vec2 TorusKernel::force(const Vec2& x) const {
    Vec2 v{0.0, 0.0};
    for (const auto& f : force_) {
        const cplx e = std::polar(1.0, f.k.dot(x));
        v[0] += (f.k_hat[0] * e).real();
        v[1] += (f.k_hat[1] * e).real();
    }
    return v;
}

double TorusKernel::grad_sup() const {
    double best = 0.0;
    const int n = 64;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Vec2 x{kTwoPi * i / n, kTwoPi * j / n};
            Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
            for (const auto& f : force_) {
                const cplx e = std::polar(1.0, f.k.dot(x));
                const double kk[2] = {double(f.k.k1), double(f.k.k2)};
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) g(a, b) += (cplx(0.0, kk[b]) * f.k_hat[a] * e).real();
            }
            best = std::max(best, g.jacobiSvd().singularValues()[0]);
        }
    return best;
}

double radial_field_grad_sup(const RadialFunction& f, double r_max) {
    // field -phi(r) x^perp with phi = f'/r; gradient has eigen-scale |phi| + r|phi'|
    double best = std::abs(f.d2(0.0));
    for (double r = 1e-3; r <= r_max; r += 1e-2) {
        const double phi = f.d1(r) / r;
        const double dphi = (f.d2(r) - phi) / r;
        best = std::max(best, std::abs(phi) + r * std::abs(dphi));
    }
    return best;
}

PlaneKernel::PlaneKernel(RadialFunction w) : w_(std::move(w)) {
    if (std::abs(w_.d1(0.0)) > 1e-12) throw ConfigError("plane kernel: W'(0) != 0 (profile not smooth at origin)");
    cutoff_ = w_.decay_radius(1e-14);
}

double PlaneKernel::potential(const Vec2& x) const { return w_(std::hypot(x[0], x[1])); }

Vec2 PlaneKernel::force(const Vec2& x) const {
    const double r = std::hypot(x[0], x[1]);
    const double phi = r > 1e-8 ? w_.d1(r) / r : w_.d2(0.0);
    return {phi * x[1], -phi * x[0]};
}

double PlaneKernel::grad_sup() const { return radial_field_grad_sup(w_, cutoff_); }

ExternalPotential::ExternalPotential(RadialFunction v) : v_(std::move(v)) {
    if (std::abs(v_.d1(0.0)) > 1e-12) throw ConfigError("external potential: V'(0) != 0");
}

double ExternalPotential::potential(const Vec2& x) const { return v_(std::hypot(x[0], x[1])); }

Vec2 ExternalPotential::force(const Vec2& x) const {
    const double r = std::hypot(x[0], x[1]);
    const double phi = r > 1e-8 ? v_.d1(r) / r : v_.d2(0.0);
    return {phi * x[1], -phi * x[0]};
}

double ExternalPotential::grad_sup(double r_max) const { return radial_field_grad_sup(v_, r_max); }

Vec2 eval_force(const TorusKernel& kernel, const Vec2& x) { return kernel.force(x); }
Vec2 eval_force(const PlaneKernel& kernel, const Vec2& x) { return kernel.force(x); }
std::vector<ForceMode> fourier_modes(const TorusKernel& kernel) { return kernel.force_modes(); }

}  // namespace pvk
