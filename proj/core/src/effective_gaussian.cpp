#include <cmath>

#include <Eigen/Eigenvalues>

#include "pvk/effective.hpp"

namespace pvk {

double PlaneField::weighted_norm(const EquilibriumProfile& p) const {
    return std::sqrt(std::max(0.0, weighted_inner(*this, p).real()));
}

cplx PlaneField::weighted_inner(const PlaneField& other, const EquilibriumProfile& p) const {
    const Eigen::VectorXd d = p.conv_weight();
    cplx s = 0.0;
    const int K = std::min(k_max, other.k_max);
    for (int k = -K; k <= K; ++k)
        for (std::size_t i = 0; i < p.grid.size(); ++i) s += std::conj(mode(k, i)) * other.mode(k, i) * d[i];
    return s;
}

cplx PlaneField::at(const EquilibriumProfile&, std::size_t i, double theta) const {
    cplx s = 0.0;
    for (int k = -k_max; k <= k_max; ++k) s += mode(k, i) * std::polar(1.0, k * theta);
    return s;
}

GaussianOperator::GaussianOperator(const EquilibriumProfile& profile, double R)
    : p_(&profile), R_(R), k_max_(profile.k_max) {
    d_ = profile.conv_weight();
    sqrt_d_ = d_.cwiseSqrt();
    const auto& W = *profile.w_tables;
    for (int k = 0; k <= k_max_; ++k) {
        const Eigen::MatrixXd s =
            (-profile.beta * R_ * k) * (sqrt_d_.asDiagonal() * W[k] * sqrt_d_.asDiagonal());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (s + s.transpose()));
        evals_.push_back(es.eigenvalues());
        evecs_.push_back(es.eigenvectors());
    }
}

PlaneField GaussianOperator::apply(const PlaneField& h) const {
    PlaneField out{h.k_max, Eigen::MatrixXcd::Zero(h.modes.rows(), h.modes.cols())};
    const auto& W = *p_->w_tables;
    const int K = std::min(h.k_max, k_max_);
    for (int k = -K; k <= K; ++k) {
        if (k == 0) continue;
        const Eigen::VectorXcd hk = h.modes.row(k + h.k_max).transpose();
        const Eigen::VectorXcd v = W[std::abs(k)] * (d_.cast<cplx>().asDiagonal() * hk);
        out.modes.row(k + h.k_max) = (-p_->beta * R_ * k) * v.transpose();
    }
    return out;
}

cplx GaussianOperator::apply_at(const PlaneField& h, double r, double theta) const {
    const std::size_t n = p_->grid.size();
    const int K = std::min(h.k_max, k_max_);
    Eigen::MatrixXd wr(k_max_ + 1, n);
    for (std::size_t j = 0; j < n; ++j) wr.col(j) = p_->modes->values(r, p_->grid.r[j]);
    cplx s = 0.0;
    for (int k = -K; k <= K; ++k) {
        if (k == 0) continue;
        cplx acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += wr(std::abs(k), j) * d_[j] * h.mode(k, j);
        s += (-p_->beta * R_ * k) * acc * std::polar(1.0, k * theta);
    }
    return s;
}

PlaneField apply_T_beta(const GaussianOperator& op, const PlaneField& h) { return op.apply(h); }

Eigen::Matrix2d RadialMatrixField::at(const Vec2& x, const EquilibriumProfile&) const {
    const double rr = std::hypot(x[0], x[1]);
    if (rr == 0.0 || r.empty()) return Eigen::Matrix2d::Zero();
    // linear interpolation in r
    std::size_t i = std::upper_bound(r.begin(), r.end(), rr) - r.begin();
    double a, b;
    if (i == 0) {
        a = tangential.front() * rr / r.front();
        b = normal.front() * rr / r.front();
    } else if (i >= r.size()) {
        a = tangential.back();
        b = normal.back();
    } else {
        const double u = (rr - r[i - 1]) / (r[i] - r[i - 1]);
        a = (1 - u) * tangential[i - 1] + u * tangential[i];
        b = (1 - u) * normal[i - 1] + u * normal[i];
    }
    const Eigen::Vector2d e(x[0] / rr, x[1] / rr), ep(-x[1] / rr, x[0] / rr);
    return a * ep * ep.transpose() + b * e * e.transpose();
}

double diffusion_field_alpha(const EquilibriumProfile& p, double rho) {
    double s = 0.0;
    for (std::size_t j = 0; j < p.grid.size(); ++j) {
        const double dw = p.modes->radial_derivative0(rho, p.grid.r[j]);
        s += dw * dw * p.mu[j] * p.grid.r[j] * p.grid.w[j];
    }
    return kTwoPi * s;
}

RadialMatrixField diffusion_field_gaussian(const PlaneKernel&, const EquilibriumProfile& p,
                                           const EquilibriumClass& cls, const std::vector<double>& r_out) {
    if (!cls.is_gaussian())
        throw NumericError("diffusion_field_gaussian", "profile is not Gaussian: " + cls.describe());
    RadialMatrixField f;
    f.r = r_out;
    f.convention = "angular average (normalized circle measure)";
    for (double r : r_out) {
        f.tangential.push_back(r == 0.0 ? 0.0 : diffusion_field_alpha(p, r));
        f.normal.push_back(0.0);
    }
    return f;
}

Eigen::Matrix2d diffusion_field_direct(const PlaneKernel& w, const EquilibriumProfile& p, const Vec2& x,
                                       int n_angles) {
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    for (std::size_t j = 0; j < p.grid.size(); ++j) {
        const double r = p.grid.r[j];
        Eigen::Vector2d avg = Eigen::Vector2d::Zero();
        for (int l = 0; l < n_angles; ++l) {
            const double th = kTwoPi * l / n_angles;
            const Vec2 k = w.force({x[0] - r * std::cos(th), x[1] - r * std::sin(th)});
            avg += Eigen::Vector2d(k[0], k[1]);
        }
        avg /= n_angles;
        a += kTwoPi * p.mu[j] * r * p.grid.w[j] * avg * avg.transpose();
    }
    return a;
}

namespace {

// Projections P^b_k = Q_k^T D^{1/2} c^b_k at x = (rho, 0), b = radial, tangential, k = 0..K.
struct FrameProjection {
    std::vector<Eigen::VectorXcd> radial, tangential;
};

FrameProjection project_frame(const GaussianOperator& op, const EquilibriumProfile& p, double rho) {
    const std::size_t n = p.grid.size();
    const int K = op.k_max();
    Eigen::MatrixXd w(K + 1, n), dw(K + 1, n);
    for (std::size_t j = 0; j < n; ++j) {
        w.col(j) = p.modes->values(rho, p.grid.r[j]);
        dw.col(j) = p.modes->radial_derivatives(rho, p.grid.r[j]);
    }
    const Eigen::VectorXd sd = p.conv_weight().cwiseSqrt();
    FrameProjection fp;
    for (int k = 0; k <= K; ++k) {
        const Eigen::VectorXcd cr = (cplx(0.0, -k / rho) * w.row(k).transpose()).cwiseProduct(sd.cast<cplx>());
        const Eigen::VectorXd ct = (-dw.row(k).transpose()).cwiseProduct(sd);
        const Eigen::MatrixXd& q = op.eigenvectors(k);
        fp.radial.push_back(q.transpose().cast<cplx>() * cr);
        fp.tangential.push_back((q.transpose() * ct).cast<cplx>());
    }
    return fp;
}

cplx spectral_factor(double lambda, double t, bool cesaro) {
    if (!cesaro) return std::polar(1.0, -t * lambda);
    const double x = t * lambda;
    if (std::abs(x) < 1e-8) return cplx(1.0, -0.5 * x);
    return (1.0 - std::polar(1.0, -x)) / cplx(0.0, x);
}

Eigen::Matrix2d coupling_from(const GaussianOperator& op, const FrameProjection& fp, double t, bool cesaro) {
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    for (int k = 0; k <= op.k_max(); ++k) {
        const Eigen::VectorXd& lam = op.eigenvalues(k);
        const Eigen::VectorXcd* v[2] = {&fp.radial[k], &fp.tangential[k]};
        Eigen::VectorXcd phase(lam.size());
        for (int m = 0; m < lam.size(); ++m) phase[m] = spectral_factor(lam[m], t, cesaro);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const cplx s = (v[i]->conjugate().cwiseProduct(phase).cwiseProduct(*v[j])).sum();
                a(i, j) += (k == 0 ? 1.0 : 2.0) * s.real();
            }
    }
    return a;
}

// Squared L^2(mu) norm in x_* of sum_b g_b e^{-itT} K_b(x - .) at x = (rho, 0).
double field_norm2(const GaussianOperator& op, const FrameProjection& fp, double gr, double gt, double t) {
    double s = 0.0;
    for (int k = 0; k <= op.k_max(); ++k) {
        const Eigen::VectorXd& lam = op.eigenvalues(k);
        double acc = 0.0;
        for (int m = 0; m < lam.size(); ++m)
            acc += std::norm(std::polar(1.0, -t * lam[m]) * (gr * fp.radial[k][m] + gt * fp.tangential[k][m]));
        s += (k == 0 ? 1.0 : 2.0) * acc;
    }
    return s;
}

// Components (const, cos, sin) of div(A grad f) for f = f0 + f1 cos(theta) with frame matrices
// sampled at r - h, r, r + h.
std::array<double, 3> divergence_components(const AngularDensity& f, double r, double h,
                                            const Eigen::Matrix2d& am, const Eigen::Matrix2d& a0,
                                            const Eigen::Matrix2d& ap) {
    auto rr = [&](const Eigen::Matrix2d& a, double x, bool use_f1) {
        return x * a(0, 0) * (use_f1 ? f.f1.d1(x) : f.f0.d1(x));
    };
    const double c0 = (rr(ap, r + h, false) - rr(am, r - h, false)) / (2 * h) / r;
    const double cc = (rr(ap, r + h, true) - rr(am, r - h, true)) / (2 * h) / r - a0(1, 1) * f.f1(r) / (r * r);
    const double cs = -((ap(0, 1) * f.f1(r + h) - am(0, 1) * f.f1(r - h)) / (2 * h)) / r - a0(1, 0) * f.f1.d1(r) / r;
    return {c0, cc, cs};
}

double component_norm(const EquilibriumProfile& p, const std::vector<std::array<double, 3>>& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        const auto& m = c[i];
        s += p.mu[i] * p.grid.r[i] * p.grid.w[i] * (m[0] * m[0] + 0.5 * (m[1] * m[1] + m[2] * m[2]));
    }
    return std::sqrt(kTwoPi * s);
}

}  // namespace

Eigen::Matrix2d propagated_coupling(const GaussianOperator& op, double rho, double t, bool cesaro) {
    const auto& p = op.profile();
    return coupling_from(op, project_frame(op, p, rho), t, cesaro);
}

MainTermResult gaussian_main_term(const AngularDensity& f, const GaussianOperator& op,
                                  const std::vector<double>& t_grid, double cesaro_T) {
    const auto& p = op.profile();
    const std::size_t n = p.grid.size();
    const double h = 1e-4;
    MainTermResult res;
    res.t = t_grid;
    res.cesaro_T = cesaro_T;
    std::vector<std::vector<std::array<double, 3>>> comps(t_grid.size(), std::vector<std::array<double, 3>>(n));
    std::vector<double> fnorm2(t_grid.size(), 0.0);
    res.cesaro_components.resize(n);
    res.target_components.resize(n);
    res.t0_components.resize(n);
    const int n_theta = 16;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = p.grid.r[i];
        const double hh = std::min(h, 0.5 * r);
        const FrameProjection fm = project_frame(op, p, r - hh), f0 = project_frame(op, p, r),
                              fp = project_frame(op, p, r + hh);
        auto eval = [&](double t, bool ces) {
            const auto c = divergence_components(f, r, hh, coupling_from(op, fm, t, ces),
                                                 coupling_from(op, f0, t, ces), coupling_from(op, fp, t, ces));
            return std::array<double, 3>{c[0] / p.mu[i], c[1] / p.mu[i], c[2] / p.mu[i]};
        };
        for (std::size_t it = 0; it < t_grid.size(); ++it) {
            comps[it][i] = eval(t_grid[it], false);
            double s = 0.0;
            for (int l = 0; l < n_theta; ++l) {
                const double th = kTwoPi * l / n_theta;
                const double gr = f.f0.d1(r) + f.f1.d1(r) * std::cos(th);
                const double gt = -f.f1(r) * std::sin(th) / r;
                s += field_norm2(op, f0, gr, gt, t_grid[it]);
            }
            fnorm2[it] += s / n_theta * kTwoPi * p.grid.r[i] * p.grid.w[i] / p.mu[i];
        }
        res.t0_components[i] = eval(0.0, false);
        res.cesaro_components[i] = eval(cesaro_T, true);
        const double alpha = diffusion_field_alpha(p, r);
        res.target_components[i] = {0.0, -alpha * f.f1(r) / (r * r) / p.mu[i], 0.0};
    }
    for (std::size_t it = 0; it < t_grid.size(); ++it) {
        res.norm.push_back(component_norm(p, comps[it]));
        res.field_norm.push_back(std::sqrt(fnorm2[it]));
    }
    res.cesaro_norm = component_norm(p, res.cesaro_components);
    res.target_norm = component_norm(p, res.target_components);
    std::vector<std::array<double, 3>> diff(n);
    for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) diff[i][c] = res.cesaro_components[i][c] - res.target_components[i][c];
    res.cesaro_rel_error = component_norm(p, diff) / res.target_norm;
    return res;
}

}  // namespace pvk
