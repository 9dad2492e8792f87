#include "pvk/radial.hpp"

#include <cmath>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>

namespace pvk {

RadialFunction::RadialFunction() : RadialFunction(zero()) {}

RadialFunction::RadialFunction(std::string name, Fn f, Fn df, Fn d2f)
    : name_(std::move(name)), f_(std::move(f)), df_(std::move(df)), d2f_(std::move(d2f)) {}

RadialFunction RadialFunction::zero() {
    auto z = [](double) { return 0.0; };
    return {"zero", z, z, z};
}

RadialFunction RadialFunction::gaussian(double a, double s) {
    if (!(s > 0.0)) throw ConfigError("gaussian width must be positive");
    const double c = 1.0 / (s * s);
    return {"gaussian",
            [=](double r) { return a * std::exp(-0.5 * c * r * r); },
            [=](double r) { return -a * c * r * std::exp(-0.5 * c * r * r); },
            [=](double r) { return a * c * (c * r * r - 1.0) * std::exp(-0.5 * c * r * r); }};
}

RadialFunction RadialFunction::bump(double a, double radius) {
    if (!(radius > 0.0)) throw ConfigError("bump radius must be positive");
    const double R2 = radius * radius;
    auto val = [=](double r) {
        const double u = r * r / R2;
        if (u >= 1.0) return 0.0;
        return a * std::exp(1.0 - 1.0 / (1.0 - u));
    };
    auto d1 = [=](double r) {
        const double u = r * r / R2;
        if (u >= 1.0) return 0.0;
        const double g = 1.0 / (1.0 - u);
        return -a * std::exp(1.0 - g) * g * g * 2.0 * r / R2;
    };
    auto d2 = [=](double r) {
        const double u = r * r / R2;
        if (u >= 1.0) return 0.0;
        const double g = 1.0 / (1.0 - u);
        const double w = a * std::exp(1.0 - g);
        const double wp = -w * g * g * 2.0 * r / R2;
        return -(2.0 / R2) * (w * g * g + r * wp * g * g + 4.0 * r * r * w * g * g * g / R2);
    };
    return {"bump", val, d1, d2};
}

RadialFunction RadialFunction::even_polynomial(std::vector<double> c) {
    auto val = [c](double r) {
        double s = 0.0, p = 1.0;
        for (double cn : c) { s += cn * p; p *= r * r; }
        return s;
    };
    auto d1 = [c](double r) {
        double s = 0.0;
        for (std::size_t n = 1; n < c.size(); ++n) s += c[n] * 2.0 * n * std::pow(r, 2.0 * n - 1.0);
        return s;
    };
    auto d2 = [c](double r) {
        double s = 0.0;
        for (std::size_t n = 1; n < c.size(); ++n)
            s += c[n] * 2.0 * n * (2.0 * n - 1.0) * std::pow(r, 2.0 * n - 2.0);
        return s;
    };
    return {"polynomial", val, d1, d2};
}

RadialFunction RadialFunction::tabulated(double h, std::vector<double> values) {
    if (values.size() < 4) throw ConfigError("tabulated profile needs at least 4 samples");
    const double r_end = h * static_cast<double>(values.size() - 1);
    const double tail = values.back();
    auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        values.data(), values.size(), 0.0, h, 0.0, 0.0);
    return {"tabulated",
            [=](double r) { return r >= r_end ? tail : (*spline)(r); },
            [=](double r) { return r >= r_end ? 0.0 : spline->prime(r); },
            [=](double r) { return r >= r_end ? 0.0 : spline->double_prime(r); }};
}

double RadialFunction::decay_radius(double threshold, double r_max) const {
    double last = 0.0;
    for (double r = 0.0; r <= r_max; r += 0.01)
        if (std::abs(f_(r)) >= threshold) last = r;
    return last + 0.01;
}

namespace {

template <int Order>
void gl_panel_rule(std::vector<double>& x, std::vector<double>& w) {
    using Rule = boost::math::quadrature::gauss<double, Order>;
    const auto& a = Rule::abscissa();
    const auto& b = Rule::weights();
    x.clear();
    w.clear();
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] == 0.0) continue;
        x.push_back(-a[i]);
        w.push_back(b[i]);
    }
    if (a[0] == 0.0) { x.push_back(0.0); w.push_back(b[0]); }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        x.push_back(a[i]);
        w.push_back(b[i]);
    }
}

}  // namespace

RadialGrid RadialGrid::gauss_legendre(double r_max, int panels, int order) {
    if (panels < 1 || !(r_max > 0.0)) throw ConfigError("radial grid needs r_max > 0 and panels >= 1");
    std::vector<double> xs, ws;
    switch (order) {
        case 4: gl_panel_rule<4>(xs, ws); break;
        case 8: gl_panel_rule<8>(xs, ws); break;
        case 16: gl_panel_rule<16>(xs, ws); break;
        default: throw ConfigError("radial quadrature order must be 4, 8 or 16");
    }
    RadialGrid g;
    g.r_max = r_max;
    g.panels = panels;
    g.order = order;
    const double h = r_max / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            g.r.push_back(mid + 0.5 * h * xs[i]);
            g.w.push_back(0.5 * h * ws[i]);
        }
    }
    return g;
}

AngularModes::AngularModes(RadialFunction w, int k_max, int n_angles)
    : w_(std::move(w)), k_max_(k_max), n_(n_angles), cos_psi_(n_angles), cos_k_psi_(k_max + 1, n_angles) {
    for (int l = 0; l < n_; ++l) {
        const double psi = kTwoPi * l / n_;
        cos_psi_[l] = std::cos(psi);
        for (int k = 0; k <= k_max_; ++k) cos_k_psi_(k, l) = std::cos(k * psi) / n_;
    }
}

Eigen::VectorXd AngularModes::values(double r, double s) const {
    Eigen::VectorXd samples(n_);
    const double a = r * r + s * s, b = 2.0 * r * s;
    for (int l = 0; l < n_; ++l) samples[l] = w_(std::sqrt(std::max(0.0, a - b * cos_psi_[l])));
    return cos_k_psi_ * samples;
}

Eigen::VectorXd AngularModes::radial_derivatives(double r, double s) const {
    Eigen::VectorXd samples(n_);
    const double a = r * r + s * s, b = 2.0 * r * s;
    const double phi0 = w_.d2(0.0);
    for (int l = 0; l < n_; ++l) {
        const double rho = std::sqrt(std::max(0.0, a - b * cos_psi_[l]));
        const double phi = rho > 1e-12 ? w_.d1(rho) / rho : phi0;
        samples[l] = phi * (r - s * cos_psi_[l]);
    }
    return cos_k_psi_ * samples;
}

double AngularModes::value0(double r, double s) const {
    const double a = r * r + s * s, b = 2.0 * r * s;
    double acc = 0.0;
    for (int l = 0; l < n_; ++l) acc += w_(std::sqrt(std::max(0.0, a - b * cos_psi_[l])));
    return acc / n_;
}

double AngularModes::radial_derivative0(double r, double s) const {
    const double a = r * r + s * s, b = 2.0 * r * s;
    const double phi0 = w_.d2(0.0);
    double acc = 0.0;
    for (int l = 0; l < n_; ++l) {
        const double rho = std::sqrt(std::max(0.0, a - b * cos_psi_[l]));
        acc += (rho > 1e-12 ? w_.d1(rho) / rho : phi0) * (r - s * cos_psi_[l]);
    }
    return acc / n_;
}

std::vector<Eigen::MatrixXd> AngularModes::tables(const std::vector<double>& a,
                                                  const std::vector<double>& b) const {
    std::vector<Eigen::MatrixXd> out(k_max_ + 1, Eigen::MatrixXd(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            const Eigen::VectorXd v = values(a[i], b[j]);
            for (int k = 0; k <= k_max_; ++k) out[k](i, j) = v[k];
        }
    return out;
}

}  // namespace pvk
