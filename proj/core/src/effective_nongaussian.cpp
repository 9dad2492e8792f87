#include <cmath>

#include "pvk/effective.hpp"

namespace pvk {

namespace {

// int_0^1 dt / (a0 + d t) and int_0^1 t dt / (a0 + d t)
std::pair<cplx, cplx> linear_moments(cplx a0, cplx a1) {
    const cplx d = a1 - a0;
    const cplx x = d / a0;
    if (std::abs(x) < 0.1) {
        cplx i0 = 0.0, i1 = 0.0, p = 1.0;
        for (int n = 0; n < 40; ++n) {
            i0 += p / double(n + 1);
            i1 += p / double(n + 2);
            p *= -x;
        }
        return {i0 / a0, i1 / a0};
    }
    const cplx i0 = std::log(a1 / a0) / d;
    return {i0, (1.0 - a0 * i0) / d};
}

}  // namespace

PairResolvent::PairResolvent(const EquilibriumProfile& p, int k_max, int sub) : p_(&p), k_max_(k_max), sub_(sub) {
    if (k_max > p.k_max) throw ConfigError("angular cutoff exceeds the profile's mode table");
    s_ = p.grid.r;
    om_ = p.omega;
    mu_ = p.mu;
    wtab_.assign(p.w_tables->begin(), p.w_tables->begin() + k_max + 1);
    // Lagrange basis of each panel's nodes sampled on a uniform sub-grid
    const int m = p.grid.order;
    const double h = p.grid.r_max / p.grid.panels;
    lagrange_.resize(sub + 1, m);
    for (int q = 0; q <= sub; ++q) {
        const double x = h * q / sub;
        for (int j = 0; j < m; ++j) {
            double l = 1.0;
            for (int i = 0; i < m; ++i)
                if (i != j) l *= (x - s_[i]) / (s_[j] - s_[i]);
            lagrange_(q, j) = l;
        }
    }
    om_fine_.resize(p.grid.panels * sub + 1);
    for (int i = 0; i <= p.grid.panels * sub; ++i) om_fine_[i] = p.omega_at(h * i / sub);
}


Eigen::VectorXcd PairResolvent::product_weights(int k, double omega1, double eps) const {
    const auto& g = p_->grid;
    const int m = g.order;
    const double h = g.r_max / g.panels / sub_;
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(s_.size());
    for (int pn = 0; pn < g.panels; ++pn) {
        for (int q = 0; q < sub_; ++q) {
            const int f = pn * sub_ + q;
            const cplx a0(eps, k * (om_fine_[f] - omega1)), a1(eps, k * (om_fine_[f + 1] - omega1));
            const auto [i0, i1] = linear_moments(a0, a1);
            for (int j = 0; j < m; ++j)
                c[pn * m + j] += h * (lagrange_(q, j) * (i0 - i1) + lagrange_(q + 1, j) * i1);
        }
    }
    return c;
}

Eigen::VectorXcd PairResolvent::solve(int k, double omega1, double eps, double gamma, const Eigen::VectorXcd& src,
                                      ResolventStats& stats) const {
    const std::size_t n = s_.size();
    const Eigen::VectorXcd c = product_weights(k, omega1, eps);
    Eigen::VectorXcd right(n), left(n);
    for (std::size_t j = 0; j < n; ++j) {
        right[j] = kTwoPi * mu_[j] * s_[j] * c[j];
        left[j] = cplx(0.0, k * om_[j]);
    }
    const Eigen::MatrixXcd m = left.asDiagonal() * wtab_[k].cast<cplx>() * right.asDiagonal();
    Eigen::VectorXcd v = src, term = src;
    const double scale = std::max(src.cwiseAbs().maxCoeff(), 1e-300);
    double prev = scale;
    int terms = 0;
    while (gamma != 0.0) {
        term = (-gamma) * (m * term);
        const double nt = term.cwiseAbs().maxCoeff();
        ++terms;
        if (terms > 2) stats.max_ratio = std::max(stats.max_ratio, nt / prev);
        if (terms > 3 && nt / prev >= 1.0)
            throw NumericError("resolvent", "Neumann series diverging (ratio " + std::to_string(nt / prev) +
                                                "); reduce beta");
        v += term;
        prev = nt;
        if (nt < 1e-15 * scale) break;
        if (terms > 500) throw NumericError("resolvent", "Neumann series did not converge in 500 terms");
    }
    stats.max_terms = std::max(stats.max_terms, terms);
    const Eigen::VectorXcd res = v + gamma * (m * v) - src;
    stats.identity_residual = std::max(stats.identity_residual, res.cwiseAbs().maxCoeff() / scale);
    return v;
}

TwoParticleField resolvent_L2(const PairResolvent& res, double eps, double gamma, const TwoParticleField& src,
                              ResolventStats& stats) {
    if (eps <= 0.0) throw ConfigError("resolvent needs eps > 0");
    const auto& p = res.profile();
    TwoParticleField out = src;
    const auto& s = res.nodes();
    for (int k = -src.k_max; k <= src.k_max; ++k) {
        const auto& in = src.modes[k + src.k_max];
        auto& o = out.modes[k + src.k_max];
        for (std::size_t i = 0; i < src.r1.size(); ++i) {
            const double om1 = p.omega_at(src.r1[i]);
            if (k == 0) {
                o.row(i) = in.row(i) / eps;
                continue;
            }
            const int ka = std::abs(k);
            Eigen::VectorXcd rhs = in.row(i).transpose();
            if (k < 0) rhs = rhs.conjugate().eval();
            Eigen::VectorXcd v = res.solve(ka, om1, eps, gamma, rhs, stats);
            for (std::size_t j = 0; j < s.size(); ++j) v[j] /= cplx(eps, ka * (res.omega(j) - om1));
            if (k < 0) v = v.conjugate().eval();
            o.row(i) = v.transpose();
        }
    }
    return out;
}

double CoefficientField::interpolate(double x) const {
    if (r.empty()) return 0.0;
    if (x <= r.front()) return a.front();
    if (x >= r.back()) return a.back();
    const std::size_t i = std::upper_bound(r.begin(), r.end(), x) - r.begin();
    const double u = (x - r[i - 1]) / (r[i] - r[i - 1]);
    return (1 - u) * a[i - 1] + u * a[i];
}

namespace {

// W_beta_k(x, s_j) via W_beta = W - beta W*W + beta^2 W*W_beta*W, with the grid table in the middle.
std::vector<Eigen::RowVectorXd> renormalized_rows(const EquilibriumProfile& p, const RenormalizedPotential& wb,
                                                  const PairResolvent& res, double x, int kmax,
                                                  const std::vector<Eigen::MatrixXd>& middle) {
    const std::size_t n = p.grid.size();
    const auto& s = res.nodes();
    const Eigen::VectorXd d = p.conv_weight();
    Eigen::MatrixXd wz(kmax + 1, n), ws(kmax + 1, s.size());
    for (std::size_t j = 0; j < n; ++j) wz.col(j) = p.modes->values(x, p.grid.r[j]).head(kmax + 1);
    for (std::size_t j = 0; j < s.size(); ++j) ws.col(j) = p.modes->values(x, s[j]).head(kmax + 1);
    std::vector<Eigen::RowVectorXd> out;
    for (int k = 0; k <= kmax; ++k) {
        Eigen::RowVectorXd row = ws.row(k);
        if (wb.beta != 0.0) row -= wb.beta * wz.row(k).cwiseProduct(d.transpose()) * middle[k];
        out.push_back(row);
    }
    return out;
}

}  // namespace

CoefficientField compute_a_beta(const EquilibriumProfile& p, const EquilibriumClass& cls,
                                const RenormalizedPotential& wb, const std::vector<double>& r_out,
                                const ABetaOptions& opts) {
    if (!cls.is_nondegenerate())
        throw NumericError("compute_a_beta", "profile is not non-degenerate: " + cls.describe());
    if (opts.eps_schedule.size() < 2) throw ConfigError("eps_schedule needs at least two entries");
    for (std::size_t i = 1; i < opts.eps_schedule.size(); ++i)
        if (!(opts.eps_schedule[i] < opts.eps_schedule[i - 1])) throw ConfigError("eps_schedule must decrease");
    for (double r : r_out)
        if (r <= 0.0) throw ConfigError("a_beta output radii must be positive");

    const int K = std::min(opts.k_ang, p.k_max);
    PairResolvent res(p, K);
    const auto& s = res.nodes();
    const std::size_t ns = s.size();
    const Eigen::VectorXd d = p.conv_weight();

    // middle[k] = W_k(Z, s) - beta Wb_k(Z, Z) D W_k(Z, s)
    std::vector<Eigen::MatrixXd> middle;
    {
        const auto wzs = p.modes->tables(p.grid.r, s);
        for (int k = 0; k <= K; ++k)
            middle.push_back(wzs[k] - p.beta * wb.table.modes[k] * d.asDiagonal() * wzs[k]);
    }

    CoefficientField out;
    out.r = r_out;
    out.eps = opts.eps_schedule;
    out.a_eps.assign(opts.eps_schedule.size(), std::vector<double>(r_out.size(), 0.0));

    std::vector<std::vector<Eigen::VectorXcd>> h0(r_out.size()), hb(r_out.size());
    for (std::size_t i = 0; i < r_out.size(); ++i) {
        const double r1 = r_out[i];
        const auto rows = renormalized_rows(p, wb, res, r1, K, middle);
        Eigen::MatrixXd w0(K + 1, ns);
        for (std::size_t j = 0; j < ns; ++j) w0.col(j) = p.modes->values(r1, s[j]).head(K + 1);
        for (int k = 0; k <= K; ++k) {
            h0[i].push_back(cplx(0.0, -k / r1) * w0.row(k).transpose().cast<cplx>());
            hb[i].push_back(cplx(0.0, -k / r1) * rows[k].transpose().cast<cplx>());
        }
    }

    for (std::size_t e = 0; e < opts.eps_schedule.size(); ++e) {
        const double eps = opts.eps_schedule[e];
        for (std::size_t i = 0; i < r_out.size(); ++i) {
            const double om1 = p.omega_at(r_out[i]);
            double acc = 0.0;
            for (int k = 1; k <= K; ++k) {
                const Eigen::VectorXcd v = res.solve(k, om1, eps, p.beta, hb[i][k], out.stats);
                const Eigen::VectorXcd c = res.product_weights(k, om1, eps);
                cplx sum = 0.0;
                for (std::size_t j = 0; j < ns; ++j)
                    sum += c[j] * std::conj(h0[i][k][j]) * v[j] * res.mu(j) * s[j];
                acc += 2.0 * (kTwoPi * sum).real();
            }
            out.a_eps[e][i] = kTwoPi * acc;
        }
    }
    const std::size_t last = opts.eps_schedule.size() - 1;
    const double e1 = opts.eps_schedule[last - 1], e2 = opts.eps_schedule[last];
    double sup = 0.0;
    for (std::size_t i = 0; i < r_out.size(); ++i) {
        const double a1 = out.a_eps[last - 1][i], a2 = out.a_eps[last][i];
        out.a.push_back(a2 + (a2 - a1) * e2 / (e1 - e2));
        sup = std::max(sup, std::abs(out.a.back()));
    }
    for (std::size_t e = 0; e + 1 < opts.eps_schedule.size(); ++e) {
        double g = 0.0;
        for (std::size_t i = 0; i < r_out.size(); ++i)
            g = std::max(g, std::abs(out.a_eps[e][i] - out.a_eps[e + 1][i]));
        out.gaps.push_back(g);
    }
    out.stability_gap = out.gaps.back();
    out.flagged = out.stability_gap > opts.gap_tolerance * std::max(sup, 1e-300);
    return out;
}

}  // namespace pvk
