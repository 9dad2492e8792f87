#include "pvk/meanfield.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace pvk {

Eigen::VectorXd EquilibriumProfile::conv_weight() const {
    Eigen::VectorXd d(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) d[j] = kTwoPi * mu[j] * grid.r[j] * grid.w[j];
    return d;
}

double EquilibriumProfile::mean_potential(double r) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j)
        acc += modes->value0(r, grid.r[j]) * mu[j] * grid.r[j] * grid.w[j];
    return kTwoPi * acc;
}

double EquilibriumProfile::mean_potential_d1(double r) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j)
        acc += modes->radial_derivative0(r, grid.r[j]) * mu[j] * grid.r[j] * grid.w[j];
    return kTwoPi * acc;
}

namespace {

constexpr double kStencilH = 0.02;

double omega_direct(const EquilibriumProfile& p, double r) {
    return -(p.v.d1(r) + p.mean_potential_d1(r)) / r;
}

// Cubic in u = r^2 through r = h, 2h, 3h, 4h; returns coefficients c0..c3.
std::array<double, 4> origin_fit(const EquilibriumProfile& p) {
    Eigen::Matrix4d A;
    Eigen::Vector4d b;
    for (int i = 0; i < 4; ++i) {
        const double r = (i + 1) * kStencilH, u = r * r;
        A.row(i) << 1.0, u, u * u, u * u * u;
        b[i] = omega_direct(p, r);
    }
    Eigen::Vector4d c = A.fullPivLu().solve(b);
    return {c[0], c[1], c[2], c[3]};
}

}  // namespace

double EquilibriumProfile::omega_at(double r) const {
    if (r >= kStencilH) return omega_direct(*this, r);
    const auto c = origin_fit(*this);
    const double u = r * r;
    return c[0] + u * (c[1] + u * (c[2] + u * c[3]));
}

double EquilibriumProfile::omega_d1(double r) const {
    if (r < kStencilH) {
        const auto c = origin_fit(*this);
        const double u = r * r;
        return 2.0 * r * (c[1] + u * (2.0 * c[2] + 3.0 * u * c[3]));
    }
    const double h = 1e-4 * std::max(1.0, r);
    return (omega_at(r + h) - omega_at(r - h)) / (2.0 * h);
}

double EquilibriumProfile::omega_d2_origin() const { return 2.0 * origin_fit(*this)[1]; }

double EquilibriumProfile::mu_at(double r) const {
    return std::exp(-beta * (v(r) + mean_potential(r))) / z;
}

double EquilibriumProfile::mass() const {
    double m = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) m += mu[j] * grid.r[j] * grid.w[j];
    return kTwoPi * m;
}

EquilibriumProfile solve_mu_beta(const ExternalPotential& vpot, const RadialFunction& w, double beta,
                                 const RadialGrid& grid, const SolveOptions& opts) {
    EquilibriumProfile p;
    p.beta = beta;
    p.grid = grid;
    p.v = vpot.profile();
    p.w = w;
    p.k_max = opts.k_max;
    p.modes = std::make_shared<AngularModes>(w, opts.k_max, opts.n_angles);
    p.w_tables = std::make_shared<std::vector<Eigen::MatrixXd>>(p.modes->tables(grid.r, grid.r));

    const std::size_t n = grid.size();
    double w_sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) w_sup = std::max(w_sup, std::abs(w(grid.r[i])));
    w_sup = std::max(w_sup, std::abs(w(0.0)));
    const bool hot = beta * w_sup > 0.5;
    if (hot)
        std::cerr << "warning: beta*|W|_inf = " << beta * w_sup
                  << " exceeds the contraction regime; iterating with damping\n";

    Eigen::VectorXd vv(n), sw(n);
    for (std::size_t i = 0; i < n; ++i) {
        vv[i] = vpot.profile()(grid.r[i]);
        sw[i] = kTwoPi * grid.r[i] * grid.w[i];
    }
    const Eigen::MatrixXd& W0 = (*p.w_tables)[0];

    auto gibbs = [&](const Eigen::VectorXd& mu, double& z) {
        Eigen::VectorXd e = -beta * (vv + W0 * mu.cwiseProduct(sw));
        const double shift = e.maxCoeff();
        Eigen::VectorXd out = (e.array() - shift).exp();
        const double zs = out.dot(sw);
        z = zs * std::exp(shift);
        return Eigen::VectorXd(out / zs);
    };

    double z = 0.0;
    Eigen::VectorXd mu = gibbs(Eigen::VectorXd::Zero(n), z);
    double theta = hot ? 0.5 : 1.0;
    double last = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        Eigen::VectorXd next = gibbs(mu, z);
        const double res = (next - mu).lpNorm<Eigen::Infinity>();
        p.residual_history.push_back(res);
        if (!std::isfinite(res)) throw NumericError("meanfield", "non-finite iterate");
        if (res < opts.tol) {
            mu = next;
            p.fixed_point_residual = res;
            break;
        }
        if (res > last) {
            theta = 0.5;
            if (hot && res > 1e3 * p.residual_history.front())
                throw NumericError("meanfield", "Picard iteration diverging, residual " + std::to_string(res));
        }
        last = res;
        mu += theta * (next - mu);
    }
    if (it == opts.max_iterations)
        throw NumericError("meanfield", "no convergence within " + std::to_string(opts.max_iterations) +
                                            " iterations, last residual " + std::to_string(last));
    p.iterations = it + 1;
    if (mu[n - 1] > 1e-12)
        throw ConfigError("radial grid too short: mu(r_max) = " + std::to_string(mu[n - 1]));
    // final residual of the returned iterate
    {
        double zz;
        p.fixed_point_residual = (gibbs(mu, zz) - mu).lpNorm<Eigen::Infinity>();
        z = zz;
    }
    p.mu.assign(mu.data(), mu.data() + n);
    p.z = z;
    p.omega = angular_velocity(p);
    return p;
}

std::vector<double> angular_velocity(const EquilibriumProfile& profile) {
    std::vector<double> out(profile.grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(profile.mu[i] > 0.0)) throw NumericError("angular_velocity", "mu vanishes inside the grid");
        out[i] = profile.omega_at(profile.grid.r[i]);
    }
    return out;
}

std::string EquilibriumClass::describe() const {
    std::ostringstream os;
    if (auto g = std::get_if<GaussianClass>(&tag)) os << "Gaussian{R=" << g->R << "}";
    else if (auto d = std::get_if<NonDegenerate>(&tag)) os << "NonDegenerate{R=" << d->R << "}";
    else os << "Other";
    return os.str();
}

EquilibriumClass classify_equilibrium(const EquilibriumProfile& p, double tol, double r_cap) {
    EquilibriumClass c;
    const std::vector<double>& om = p.omega;
    double lo = p.omega_at(0.0), hi = lo;
    for (double o : om) { lo = std::min(lo, o); hi = std::max(hi, o); }
    c.fitted_R = -(lo + hi) / 2.0;
    c.gaussian_sup_deviation = (hi - lo) / 2.0;
    c.omega_d2_origin = p.omega_d2_origin();
    if (c.gaussian_sup_deviation < tol) {
        c.tag = GaussianClass{c.fitted_R};
        return c;
    }
    double min_ratio = std::numeric_limits<double>::infinity();
    int sign = 0;
    bool monotone = true;
    for (std::size_t i = 0; i < om.size(); ++i) {
        const double r = p.grid.r[i];
        const double d = p.omega_d1(r);
        const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
        if (s == 0 || (sign != 0 && s != sign)) monotone = false;
        if (sign == 0) sign = s;
        min_ratio = std::min(min_ratio, std::abs(d) / std::min(r, 1.0));
    }
    c.min_slope_ratio = min_ratio;
    const double R = std::max(1.0 / min_ratio, 1.0 / std::abs(c.omega_d2_origin));
    if (monotone && std::isfinite(R) && R <= r_cap) c.tag = NonDegenerate{R};
    else c.tag = OtherClass{};
    return c;
}

double TwoPointTable::evaluate(double, double, double dtheta, std::size_t i, std::size_t j) const {
    double s = modes[0](i, j);
    for (std::size_t k = 1; k < modes.size(); ++k) s += 2.0 * modes[k](i, j) * std::cos(k * dtheta);
    return s;
}

TwoPointTable mu_convolution_power(const EquilibriumProfile& p, int n) {
    if (n < 1) throw ConfigError("convolution power needs n >= 1");
    const Eigen::VectorXd d = p.conv_weight();
    TwoPointTable t{*p.w_tables};
    for (int m = 1; m < n; ++m)
        for (std::size_t k = 0; k < t.modes.size(); ++k)
            t.modes[k] = (*p.w_tables)[k] * d.asDiagonal() * t.modes[k];
    return t;
}

RenormalizedPotential renormalized_potential(const EquilibriumProfile& p, double tol) {
    RenormalizedPotential out;
    out.beta = p.beta;
    double w_sup = std::abs(p.w(0.0));
    for (double r : p.grid.r) w_sup = std::max(w_sup, std::abs(p.w(r)));
    out.w_sup = w_sup;
    const double q = p.beta * w_sup;
    if (q >= 1.0) throw NumericError("renormalized_potential", "beta*|W|_inf >= 1, series divergent");
    const Eigen::VectorXd d = p.conv_weight();
    const auto& W = *p.w_tables;
    out.table.modes = W;
    std::vector<Eigen::MatrixXd> term = W;
    int n = 0;
    double bound = q * w_sup / (1.0 - q);
    while (bound >= tol && p.beta > 0.0) {
        ++n;
        for (std::size_t k = 0; k < W.size(); ++k) {
            term[k] = (-p.beta) * (term[k] * d.asDiagonal() * W[k]);
            out.table.modes[k] += term[k];
        }
        bound = std::pow(q, n + 1) * w_sup / (1.0 - q);
        if (n > 10000) break;
    }
    out.truncation_order = n;
    out.tail_bound = p.beta > 0.0 ? bound : 0.0;
    return out;
}

Eigen::MatrixXd RenormalizedPotential::rows_at(const EquilibriumProfile& p, double r) const {
    const std::size_t n = p.grid.size();
    const int K = static_cast<int>(table.modes.size()) - 1;
    Eigen::MatrixXd wr(K + 1, n);
    for (std::size_t j = 0; j < n; ++j) wr.col(j) = p.modes->values(r, p.grid.r[j]).head(K + 1);
    const Eigen::VectorXd d = p.conv_weight();
    Eigen::MatrixXd out(K + 1, n);
    for (int k = 0; k <= K; ++k) {
        Eigen::RowVectorXd row = wr.row(k);
        out.row(k) = row - beta * (row.cwiseProduct(d.transpose())) * table.modes[k];
    }
    return out;
}

double renormalized_identity_residual(const EquilibriumProfile& p, const RenormalizedPotential& wb) {
    const Eigen::VectorXd d = p.conv_weight();
    double total = 0.0;
    for (std::size_t k = 0; k < wb.table.modes.size(); ++k) {
        const Eigen::MatrixXd& Wb = wb.table.modes[k];
        const Eigen::MatrixXd& W = (*p.w_tables)[k];
        const Eigen::MatrixXd res = Wb + p.beta * (Wb * d.asDiagonal() * W) - W;
        total += (k == 0 ? 1.0 : 2.0) * res.lpNorm<Eigen::Infinity>();
    }
    return total;
}

RadialFunction gaussian_case_potential(const RadialFunction& w, double beta, double R, const RadialGrid& grid,
                                       int n_angles) {
    auto modes = std::make_shared<AngularModes>(w, 0, n_angles);
    const double a = beta * R;
    auto g = std::make_shared<std::vector<double>>(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
        (*g)[j] = kTwoPi * (a / kTwoPi) * std::exp(-0.5 * a * grid.r[j] * grid.r[j]) * grid.r[j] * grid.w[j];
    auto nodes = std::make_shared<std::vector<double>>(grid.r);
    auto conv = [=](double r) {
        double s = 0.0;
        for (std::size_t j = 0; j < nodes->size(); ++j) s += modes->value0(r, (*nodes)[j]) * (*g)[j];
        return s;
    };
    auto conv_d = [=](double r) {
        double s = 0.0;
        for (std::size_t j = 0; j < nodes->size(); ++j) s += modes->radial_derivative0(r, (*nodes)[j]) * (*g)[j];
        return s;
    };
    auto v = [=](double r) { return 0.5 * R * r * r - conv(r); };
    auto dv = [=](double r) { return R * r - conv_d(r); };
    auto d2v = [=](double r) {
        const double h = 1e-4;
        if (r < h) return R - 2.0 * conv_d(h) / (2.0 * h);
        return R - (conv_d(r + h) - conv_d(r - h)) / (2.0 * h);
    };
    return {"gaussian_case", v, dv, d2v};
}

std::string profile_csv(const EquilibriumProfile& p) {
    std::ostringstream os;
    os << "r,mu,omega\n";
    char buf[128];
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.grid.r[i], p.mu[i], p.omega[i]);
        os << buf;
    }
    return os.str();
}

}  // namespace pvk
