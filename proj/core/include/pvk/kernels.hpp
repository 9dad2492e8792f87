#pragma once

#include <map>
#include <vector>

#include "pvk/common.hpp"
#include "pvk/radial.hpp"

namespace pvk {

struct ForceMode {
    Mode k;
    cplx w_hat;
    std::array<cplx, 2> k_hat;  // Fourier coefficient of K = -grad^perp W
};

// Band-limited even potential W on the normalized torus [0, 2pi)^2.
class TorusKernel {
public:
    TorusKernel() = default;

    // Validated construction from Fourier coefficients W_hat(k), both k and -k listed.
    static TorusKernel from_modes(const std::map<Mode, cplx>& table);
    // W = sum a cos(k.x) from [k1, k2, a] triples.
    static TorusKernel from_cosines(const std::vector<std::array<double, 3>>& terms);

    const std::map<Mode, cplx>& mode_table() const { return w_hat_; }
    const std::vector<ForceMode>& force_modes() const { return force_; }
    std::vector<std::array<double, 3>> cosine_terms() const;
    bool empty() const { return w_hat_.empty(); }
    int max_sup_norm() const;

    double potential(const Vec2& x) const;
    Vec2 force(const Vec2& x) const;
    // sup over the torus of the spectral norm of grad K, sampled on a 64^2 grid
    double grad_sup() const;

private:
    std::map<Mode, cplx> w_hat_;
    std::vector<ForceMode> force_;
};

// Radial interaction on the plane, K(x) = -(W'(r)/r) x^perp.
class PlaneKernel {
public:
    explicit PlaneKernel(RadialFunction w);

    const RadialFunction& profile() const { return w_; }
    double cutoff_radius() const { return cutoff_; }
    double potential(const Vec2& x) const;
    Vec2 force(const Vec2& x) const;
    double grad_sup() const;

private:
    RadialFunction w_;
    double cutoff_;
};

// Radial confining potential V with F = -grad^perp V.
class ExternalPotential {
public:
    ExternalPotential() = default;
    explicit ExternalPotential(RadialFunction v);

    const RadialFunction& profile() const { return v_; }
    double potential(const Vec2& x) const;
    Vec2 force(const Vec2& x) const;
    double grad_sup(double r_max) const;

private:
    RadialFunction v_;
};

Vec2 eval_force(const TorusKernel& kernel, const Vec2& x);
Vec2 eval_force(const PlaneKernel& kernel, const Vec2& x);
std::vector<ForceMode> fourier_modes(const TorusKernel& kernel);

// Spectral norm of the tangential field gradient for a radial profile, sup over r in [0, r_max].
double radial_field_grad_sup(const RadialFunction& f, double r_max);

}  // namespace pvk
