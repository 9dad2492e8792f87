#include "pvk/hierarchy.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace pvk {

FockBasis::FockBasis(int lambda, int m_max) : lambda_(lambda), m_max_(m_max) {
    if (lambda < 1 || m_max < 1) throw ConfigError("Fock basis needs Lambda >= 1 and M >= 1");
    for (int k1 = -lambda; k1 <= lambda; ++k1)
        for (int k2 = -lambda; k2 <= lambda; ++k2) modes_.push_back({k1, k2});
    const int nt = static_cast<int>(modes_.size());
    const int zero = mode_index({0, 0});
    std::vector<int> bg;
    for (int i = 0; i < nt; ++i)
        if (i != zero) bg.push_back(i);
    // dimension guard before enumeration
    double dim = 0.0, multisets = 1.0;
    const double nb = bg.size();
    for (int m = 1; m <= m_max; ++m) {
        dim += nt * multisets;
        multisets = multisets * (nb + m - 1) / m;
    }
    if (dim > 1e7) throw ConfigError("Fock basis too large: " + std::to_string(static_cast<long long>(dim)));

    offset_.push_back(0);
    std::vector<std::vector<int>> sets{{}};
    for (int m = 1; m <= m_max; ++m) {
        for (int t = 0; t < nt; ++t)
            for (const auto& s : sets) {
                std::vector<int> key{t};
                key.insert(key.end(), s.begin(), s.end());
                index_[key] = keys_.size();
                double w = 1.0;
                for (std::size_t i = 0, run = 1; i < s.size(); ++i) {
                    run = (i > 0 && s[i] == s[i - 1]) ? run + 1 : 1;
                    w /= run;
                }
                weight_.push_back(w);
                keys_.push_back(std::move(key));
            }
        offset_.push_back(keys_.size());
        std::vector<std::vector<int>> next;
        for (const auto& s : sets)
            for (int b : bg)
                if (s.empty() || b >= s.back()) {
                    auto t = s;
                    t.push_back(b);
                    next.push_back(std::move(t));
                }
        sets = std::move(next);
    }
}

std::vector<std::size_t> FockBasis::level_dimensions() const {
    std::vector<std::size_t> d;
    for (int m = 1; m <= m_max_; ++m) d.push_back(level_size(m));
    return d;
}

int FockBasis::mode_index(Mode k) const {
    if (k.sup_norm() > lambda_) return -1;
    return (k.k1 + lambda_) * (2 * lambda_ + 1) + (k.k2 + lambda_);
}

long FockBasis::find(std::vector<int> key) const {
    if (key.size() > 2) std::sort(key.begin() + 1, key.end());
    auto it = index_.find(key);
    return it == index_.end() ? -1 : static_cast<long>(it->second);
}

Mode FockBasis::total_momentum(std::size_t i) const {
    Mode s{0, 0};
    for (int j : keys_[i]) s = s + modes_[j];
    return s;
}

FockBasis enumerate_basis(int lambda, int m_max) { return FockBasis(lambda, m_max); }

double FockVector::norm() const { return std::sqrt(std::max(0.0, inner(*this).real())); }

cplx FockVector::inner(const FockVector& o) const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < basis->size(); ++i) s += basis->weight(i) * std::conj(c[i]) * o.c[i];
    return s;
}

namespace {

cplx dot(const std::array<cplx, 2>& a, Mode k) { return a[0] * double(k.k1) + a[1] * double(k.k2); }

}  // namespace

HierarchyOperator::HierarchyOperator(const TorusKernel& w, const FockBasis& b) : basis_(&b) {
    std::map<Mode, std::array<cplx, 2>> kh;
    for (const auto& f : w.force_modes()) kh[f.k] = f.k_hat;
    const auto& modes = b.modes();
    const int zero = b.mode_index({0, 0});
    std::vector<Eigen::Triplet<cplx>> trip;
    for (std::size_t row = 0; row < b.size(); ++row) {
        const auto& key = b.key(row);
        const int m = static_cast<int>(key.size());
        // S^{m,+}: absorb one background slot from level m + 1
        if (m < b.m_max())
            for (const auto& [p, kp] : kh) {
                const int ip = b.mode_index(p);
                if (ip < 0) continue;
                for (int i = 0; i < m; ++i) {
                    const Mode ki = modes[key[i]];
                    const int iq = b.mode_index(ki - p);
                    if (iq < 0 || (i > 0 && iq == zero)) continue;
                    std::vector<int> src = key;
                    src[i] = iq;
                    src.push_back(ip);
                    const long col = b.find(src);
                    if (col < 0) continue;
                    trip.emplace_back(row, col, -dot(kp, ki));
                }
            }
        // S^{m,-}: emit one background slot from level m - 1
        if (m >= 2)
            for (int i = 0; i < m; ++i)
                for (int j = 1; j < m; ++j) {
                    if (j == i) continue;
                    const Mode ki = modes[key[i]], kj = modes[key[j]];
                    auto it = kh.find(-kj);
                    if (it == kh.end()) continue;
                    const int is = b.mode_index(ki + kj);
                    if (is < 0 || (i > 0 && is == zero)) continue;
                    std::vector<int> src;
                    for (int s = 0; s < m; ++s) {
                        if (s == j) continue;
                        src.push_back(s == i ? is : key[s]);
                    }
                    const long col = b.find(src);
                    if (col < 0) continue;
                    trip.emplace_back(row, col, -dot(it->second, ki));
                }
    }
    s_.resize(b.size(), b.size());
    s_.setFromTriplets(trip.begin(), trip.end());
    sqrt_w_.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) sqrt_w_[i] = std::sqrt(b.weight(i));
    for (auto& t : trip) t = Eigen::Triplet<cplx>(t.row(), t.col(), t.value() * sqrt_w_[t.row()] / sqrt_w_[t.col()]);
    sym_.resize(b.size(), b.size());
    sym_.setFromTriplets(trip.begin(), trip.end());
}

FockVector HierarchyOperator::apply(const FockVector& v) const { return {basis_, s_ * v.c}; }

double HierarchyOperator::adjoint_residual(int pairs, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    auto rnd = [&] {
        FockVector v{basis_, Eigen::VectorXcd(basis_->size())};
        for (std::size_t i = 0; i < basis_->size(); ++i) v.c[i] = cplx(nd(rng), nd(rng));
        v.c /= v.norm();
        return v;
    };
    double worst = 0.0;
    for (int p = 0; p < pairs; ++p) {
        const FockVector h = rnd(), g = rnd();
        worst = std::max(worst, std::abs(apply(h).inner(g) - h.inner(apply(g))));
    }
    return worst;
}

HierarchyOperator build_operator(const TorusKernel& w, const FockBasis& basis) { return {w, basis}; }

FockVector initial_state(const TorusDensity& f0, const FockBasis& b) {
    FockVector v{&b, Eigen::VectorXcd::Zero(b.size())};
    for (const auto& [k, c] : f0.coefficients()) {
        const int i = b.mode_index(k);
        if (i < 0) throw ConfigError("initial density mode " + to_string(k) + " lies outside the mode cutoff");
        v.c[b.find({i})] = c;
    }
    return v;
}

namespace {

// exp(i delta H) v by one Lanczos projection; returns the a-posteriori error estimate.
double lanczos_step(const Eigen::SparseMatrix<cplx>& h, const Eigen::VectorXcd& v, double delta, int m,
                    Eigen::VectorXcd& out) {
    const double b0 = v.norm();
    if (b0 == 0.0) {
        out = v;
        return 0.0;
    }
    const std::size_t n = v.size();
    m = std::min<int>(m, n);
    Eigen::MatrixXcd q(n, m + 1);
    std::vector<double> alpha, beta;
    q.col(0) = v / b0;
    int dim = m;
    double beta_last = 0.0;
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXcd w = h * q.col(j);
        const double a = q.col(j).dot(w).real();
        w -= a * q.col(j);
        if (j > 0) w -= beta.back() * q.col(j - 1);
        // full reorthogonalization
        for (int i = 0; i <= j; ++i) w -= q.col(i).dot(w) * q.col(i);
        alpha.push_back(a);
        const double bn = w.norm();
        if (bn < 1e-13 * b0 || j == m - 1) {
            dim = j + 1;
            beta_last = (j == m - 1) ? bn : 0.0;
            if (j == m - 1) q.col(j + 1) = bn > 0 ? Eigen::VectorXcd(w / bn) : Eigen::VectorXcd(w);
            break;
        }
        beta.push_back(bn);
        q.col(j + 1) = w / bn;
    }
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
        t(j, j) = alpha[j];
        if (j + 1 < dim) t(j, j + 1) = t(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::MatrixXd& u = es.eigenvectors();
    Eigen::VectorXcd y(dim);
    for (int j = 0; j < dim; ++j) {
        cplx s = 0.0;
        for (int l = 0; l < dim; ++l) s += u(j, l) * std::polar(1.0, delta * es.eigenvalues()[l]) * u(0, l);
        y[j] = s;
    }
    out = b0 * (q.leftCols(dim) * y);
    return b0 * beta_last * std::abs(y[dim - 1]);
}

}  // namespace

std::vector<FockVector> evolve(const HierarchyOperator& op, const FockVector& g0, const std::vector<double>& tau,
                               int krylov_dim, double tol, PropagatorStats* stats) {
    const auto& b = op.basis();
    Eigen::VectorXd sw(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) sw[i] = std::sqrt(b.weight(i));
    Eigen::VectorXcd y = sw.cast<cplx>().cwiseProduct(g0.c);
    const double scale = std::max(y.norm(), 1e-300);
    std::vector<FockVector> out;
    double t = 0.0, delta = 1.0;
    PropagatorStats st;
    for (double target : tau) {
        if (target < t) throw ConfigError("tau grid must be non-decreasing and start at or after 0");
        while (t < target) {
            const double d = std::min(delta, target - t);
            Eigen::VectorXcd next;
            const double err = lanczos_step(op.symmetrized(), y, d, krylov_dim, next);
            if (err > tol * scale * d) {
                delta = 0.5 * d;
                if (delta < 1e-10) throw NumericError("evolve", "Krylov step size underflow");
                continue;
            }
            st.max_error_estimate = std::max(st.max_error_estimate, err);
            ++st.substeps;
            y = next;
            t += d;
            if (d == delta) delta *= 1.5;
        }
        out.push_back({&b, y.cwiseQuotient(sw.cast<cplx>())});
    }
    if (stats) *stats = st;
    return out;
}

SpectralDecomposition::SpectralDecomposition(const HierarchyOperator& op) : basis_(&op.basis()) {
    const auto& b = op.basis();
    std::map<Mode, std::vector<std::size_t>> sec;
    for (std::size_t i = 0; i < b.size(); ++i) sec[b.total_momentum(i)].push_back(i);
    const Eigen::MatrixXcd dense = Eigen::MatrixXcd(op.symmetrized());
    lambda_.resize(b.size());
    sqrt_w_.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) sqrt_w_[i] = std::sqrt(b.weight(i));
    std::size_t off = 0;
    for (auto& [mom, idx] : sec) {
        const std::size_t n = idx.size();
        Eigen::MatrixXcd blk(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) blk(i, j) = dense(idx[i], idx[j]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(blk);
        lambda_.segment(off, n) = es.eigenvalues();
        vectors_.push_back(es.eigenvectors());
        sectors_.push_back(idx);
        first_.push_back(off);
        off += n;
    }
}

double SpectralDecomposition::max_imag_eigenvalue(const HierarchyOperator& op) const {
    const Eigen::MatrixXcd dense = Eigen::MatrixXcd(op.matrix());
    double m = 0.0;
    for (const auto& idx : sectors_) {
        const std::size_t n = idx.size();
        Eigen::MatrixXcd blk(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) blk(i, j) = dense(idx[i], idx[j]);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(blk, false);
        m = std::max(m, es.eigenvalues().imag().cwiseAbs().maxCoeff());
    }
    return m;
}

Eigen::VectorXcd SpectralDecomposition::project(const FockVector& v) const {
    Eigen::VectorXcd a(lambda_.size());
    for (std::size_t s = 0; s < sectors_.size(); ++s) {
        const auto& idx = sectors_[s];
        Eigen::VectorXcd x(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) x[i] = sqrt_w_[idx[i]] * v.c[idx[i]];
        a.segment(first_[s], idx.size()) = vectors_[s].adjoint() * x;
    }
    return a;
}

FockVector SpectralDecomposition::reconstruct(const Eigen::VectorXcd& a) const {
    FockVector v{basis_, Eigen::VectorXcd::Zero(basis_->size())};
    for (std::size_t s = 0; s < sectors_.size(); ++s) {
        const auto& idx = sectors_[s];
        const Eigen::VectorXcd x = vectors_[s] * a.segment(first_[s], idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) v.c[idx[i]] = x[i] / sqrt_w_[idx[i]];
    }
    return v;
}

std::vector<FockVector> SpectralDecomposition::evolve(const FockVector& g0, const std::vector<double>& tau) const {
    const Eigen::VectorXcd a = project(g0);
    std::vector<FockVector> out;
    for (double t : tau) {
        Eigen::VectorXcd at(a.size());
        for (int i = 0; i < a.size(); ++i) at[i] = a[i] * std::polar(1.0, t * lambda_[i]);
        out.push_back(reconstruct(at));
    }
    return out;
}

std::map<Mode, cplx> tagged_observable(const FockVector& g) {
    std::map<Mode, cplx> out;
    const auto& b = *g.basis;
    for (std::size_t i = 0; i < b.level_size(1); ++i) out[b.modes()[b.key(i)[0]]] = g.c[i];
    return out;
}

std::vector<double> tagged_samples(const FockVector& g, int n) {
    const auto modes = tagged_observable(g);
    std::vector<double> out(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x1 = kTwoPi * i / n, x2 = kTwoPi * j / n;
            cplx s = 0.0;
            for (const auto& [k, c] : modes) s += c * std::polar(1.0, k.k1 * x1 + k.k2 * x2);
            out[i * n + j] = s.real();
        }
    return out;
}

std::string SpectralReport::to_json() const {
    nlohmann::json j;
    j["eigenvalues"] = eigenvalues;
    j["weights"] = weights;
    j["weight_sum"] = weight_sum;
    j["hermiticity_defect"] = hermiticity_defect;
    j["max_imag_eigenvalue"] = max_imag_eigenvalue;
    j["T"] = T;
    j["cesaro"] = cesaro;
    j["cesaro_exact"] = cesaro_exact;
    j["envelope"] = envelope;
    j["decay_exponent"] = decay_exponent;
    return j.dump(1);
}

namespace {

cplx phi(double x) { return std::abs(x) < 1e-12 ? cplx(1.0) : (std::polar(1.0, x) - 1.0) / cplx(0.0, x); }

}  // namespace

SpectralReport spectral_diagnostics(const HierarchyOperator& op, const FockVector& g0, const FockVector& h,
                                    const std::vector<double>& T_list) {
    if (op.basis().size() > 20000) throw ConfigError("basis too large for the spectral diagnostics");
    SpectralDecomposition sd(op);
    const Eigen::VectorXcd a = sd.project(g0), b = sd.project(h);
    const Eigen::VectorXd& lam = sd.eigenvalues();
    std::vector<std::size_t> order(lam.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return lam[x] < lam[y]; });
    SpectralReport rep;
    std::vector<cplx> cw;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::size_t j = order[i];
        const cplx c = std::conj(b[j]) * a[j];
        if (!rep.eigenvalues.empty() && lam[j] - rep.eigenvalues.back() < 1e-9) cw.back() += c;
        else {
            rep.eigenvalues.push_back(lam[j]);
            cw.push_back(c);
        }
    }
    // drop clusters without weight
    std::vector<double> ev;
    std::vector<cplx> cc;
    for (std::size_t i = 0; i < cw.size(); ++i)
        if (std::abs(cw[i]) > 1e-15) {
            ev.push_back(rep.eigenvalues[i]);
            cc.push_back(cw[i]);
        }
    rep.eigenvalues = ev;
    for (const auto& c : cc) {
        rep.weights.push_back(std::norm(c));
        rep.weight_sum += std::norm(c);
    }
    {
        const Eigen::SparseMatrix<cplx> d = Eigen::SparseMatrix<cplx>(op.symmetrized().adjoint()) - op.symmetrized();
        double m = 0.0;
        for (int k = 0; k < d.outerSize(); ++k)
            for (Eigen::SparseMatrix<cplx>::InnerIterator it(d, k); it; ++it) m = std::max(m, std::abs(it.value()));
        rep.hermiticity_defect = m;
        rep.max_imag_eigenvalue = sd.max_imag_eigenvalue(op);
    }
    auto signal = [&](double t) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < ev.size(); ++i) s += cc[i] * std::polar(1.0, t * ev[i]);
        return std::norm(s);
    };
    auto exact = [&](double T) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < ev.size(); ++i)
            for (std::size_t j = 0; j < ev.size(); ++j) s += cc[i] * std::conj(cc[j]) * phi(T * (ev[i] - ev[j]));
        return s.real();
    };
    // cumulative Gauss-Legendre panels
    double lmax = 0.0;
    for (double l : ev) lmax = std::max(lmax, std::abs(l));
    const double hp = std::min(0.25, 1.0 / (2.0 * lmax + 1e-12));
    static const RadialGrid unit = RadialGrid::gauss_legendre(1.0, 1, 8);
    auto panel = [&](double a0, double a1) {
        double s = 0.0;
        for (std::size_t q = 0; q < unit.size(); ++q) s += unit.w[q] * signal(a0 + (a1 - a0) * unit.r[q]);
        return (a1 - a0) * s;
    };
    double tmax = 0.0;
    for (double T : T_list) tmax = std::max(tmax, 2.0 * T);
    const long np = static_cast<long>(std::ceil(tmax / hp));
    std::vector<double> ends{0.0}, cum{0.0};
    for (long i = 0; i < np; ++i) {
        const double a0 = i * hp, a1 = (i + 1) * hp;
        cum.push_back(cum.back() + panel(a0, a1));
        ends.push_back(a1);
    }
    auto cesaro_at = [&](double T) {
        const long i = std::min<long>(static_cast<long>(T / hp), np);
        return (cum[i] + panel(ends[i], T)) / T;
    };
    rep.T = T_list;
    std::vector<double> lx, ly;
    for (double T : T_list) {
        rep.cesaro.push_back(cesaro_at(T));
        rep.cesaro_exact.push_back(exact(T));
        double env = std::abs(cesaro_at(2.0 * T) - rep.weight_sum);
        for (std::size_t i = 0; i < ends.size(); ++i)
            if (ends[i] >= T && ends[i] <= 2.0 * T) env = std::max(env, std::abs(cum[i] / ends[i] - rep.weight_sum));
        env = std::max(env, std::abs(rep.cesaro.back() - rep.weight_sum));
        rep.envelope.push_back(env);
        lx.push_back(std::log(T));
        ly.push_back(std::log(std::max(env, 1e-300)));
    }
    if (lx.size() >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= lx.size();
        my /= lx.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        rep.decay_exponent = -sxy / sxx;
    }
    return rep;
}

}  // namespace pvk
