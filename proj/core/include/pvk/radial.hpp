#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pvk/common.hpp"

namespace pvk {

// Smooth radial profile r -> f(r) with first and second derivatives.
class RadialFunction {
public:
    using Fn = std::function<double(double)>;

    RadialFunction();
    RadialFunction(std::string name, Fn f, Fn df, Fn d2f);

    static RadialFunction zero();
    // a * exp(-r^2 / (2 s^2))
    static RadialFunction gaussian(double amplitude, double width);
    // a * exp(1 - 1/(1 - (r/R)^2)) inside r < R, zero outside
    static RadialFunction bump(double amplitude, double radius);
    // sum_n c[n] r^(2n)
    static RadialFunction even_polynomial(std::vector<double> coeffs);
    // cubic spline through samples on a uniform grid starting at r = 0
    static RadialFunction tabulated(double h, std::vector<double> values);

    double operator()(double r) const { return f_(r); }
    double d1(double r) const { return df_(r); }
    double d2(double r) const { return d2f_(r); }
    const std::string& name() const { return name_; }

    // Smallest tested radius beyond which |f| < threshold.
    double decay_radius(double threshold, double r_max = 200.0) const;

private:
    std::string name_;
    Fn f_, df_, d2f_;
};

// Composite Gauss-Legendre quadrature on [0, r_max].
struct RadialGrid {
    std::vector<double> r;
    std::vector<double> w;
    double r_max = 0.0;
    int panels = 0;
    int order = 0;

    static RadialGrid gauss_legendre(double r_max, int panels, int order = 8);
    std::size_t size() const { return r.size(); }
    RadialGrid refined() const { return gauss_legendre(r_max, 2 * panels, order); }
};

// Relative-angle Fourier modes of a radial two-point function:
// W(|x - y|) = sum_k w_k(|x|, |y|) e^{ik(theta_x - theta_y)}, w_{-k} = w_k real.
class AngularModes {
public:
    AngularModes(RadialFunction w, int k_max, int n_angles = 256);

    int k_max() const { return k_max_; }
    // w_k(r, s) for k = 0..k_max
    Eigen::VectorXd values(double r, double s) const;
    // d/dr w_k(r, s)
    Eigen::VectorXd radial_derivatives(double r, double s) const;
    double value0(double r, double s) const;
    double radial_derivative0(double r, double s) const;
    // tables[k](i, j) = w_k(a_i, b_j)
    std::vector<Eigen::MatrixXd> tables(const std::vector<double>& a, const std::vector<double>& b) const;

    const RadialFunction& profile() const { return w_; }

private:
    RadialFunction w_;
    int k_max_;
    int n_;
    std::vector<double> cos_psi_;
    Eigen::MatrixXd cos_k_psi_;  // (k_max+1) x n
};

}  // namespace pvk
