#include <doctest.h>

#include "pvk/effective.hpp"
#include "support.hpp"

using namespace pvk;

namespace {

Eigen::Matrix2d outer(const Vec2& a, const Vec2& b) {
    Eigen::Matrix2d m;
    m << a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1];
    return m;
}

// grad K on an n x n grid by central differences: g[a][b] = d_a K_b
struct GridField {
    int n;
    std::vector<Vec2> k;
    std::vector<std::array<Vec2, 2>> grad;
};

GridField sample_field(const TorusKernel& w, int n) {
    GridField f{n, {}, {}};
    const double h = kTwoPi / n, e = 1e-5;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Vec2 x{h * i, h * j};
            f.k.push_back(w.force(x));
            std::array<Vec2, 2> g;
            for (int a = 0; a < 2; ++a) {
                Vec2 p = x, m = x;
                p[a] += e;
                m[a] -= e;
                const Vec2 kp = w.force(p), km = w.force(m);
                g[a] = {(kp[0] - km[0]) / (2 * e), (kp[1] - km[1]) / (2 * e)};
            }
            f.grad.push_back(g);
        }
    return f;
}

// next-order matrix in real space: products of grid fields against the self-convolutions K_a * K_b
Eigen::Matrix2d real_space_B(const TorusKernel& w, int n) {
    const auto f = sample_field(w, n);
    const int m = n * n;
    // conv[a][b](x) = avg_y K_a(y) K_b(x - y)
    std::array<std::array<std::vector<double>, 2>, 2> conv;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            conv[a][b].assign(m, 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (int p = 0; p < n; ++p)
                        for (int q = 0; q < n; ++q)
                            s += f.k[p * n + q][a] * f.k[((i - p + n) % n) * n + (j - q + n) % n][b];
                    conv[a][b][i * n + j] = s / m;
                }
        }
    Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
    for (int x = 0; x < m; ++x) A += outer(f.k[x], f.k[x]) / m;
    Eigen::Matrix2d t1 = Eigen::Matrix2d::Zero(), t2 = t1, t3 = t1, t4 = t1;
    for (int x = 0; x < m; ++x) {
        const auto& g = f.grad[x];
        const double tr = g[0][0] * g[0][0] + g[0][1] * g[1][0] + g[1][0] * g[0][1] + g[1][1] * g[1][1];
        for (int al = 0; al < 2; ++al)
            for (int be = 0; be < 2; ++be) {
                t1(al, be) += tr * conv[al][be][x] / m;
                for (int d = 0; d < 2; ++d)
                    for (int e = 0; e < 2; ++e) {
                        t2(al, be) += g[d][al] * g[e][be] * A(d, e) / m;
                        t3(al, be) += g[d][al] * g[e][be] * conv[d][e][x] / m;
                        t4(al, be) += g[d][al] * g[e][d] * conv[e][be][x] / m;
                    }
            }
    }
    return t1 - 2.0 * t2 - 2.0 * t3 - 2.0 * t4;
}

struct GaussianSetup {
    double beta = 0.1, R = 40.0;
    RadialFunction w = RadialFunction::gaussian(5.0, 1.0);
    RadialGrid grid = RadialGrid::gauss_legendre(std::sqrt(60.0 / (beta * R)), 20, 8);
    EquilibriumProfile p;
    EquilibriumClass cls;
    GaussianSetup() {
        p = solve_mu_beta(ExternalPotential(gaussian_case_potential(w, beta, R, grid)), w, beta, grid);
        cls = classify_equilibrium(p);
    }
};

const GaussianSetup& gaussian() {
    static const GaussianSetup s;
    return s;
}

struct QuarticSetup {
    ExternalPotential v{RadialFunction::even_polynomial({0.0, 0.5, 0.25})};
    RadialFunction w = RadialFunction::gaussian(1.0, 1.0);
    double beta = 0.1;
    RadialGrid grid = RadialGrid::gauss_legendre(6.5, 20, 8);
    EquilibriumProfile p;
    EquilibriumClass cls;
    RenormalizedPotential wb;
    QuarticSetup() {
        p = solve_mu_beta(v, w, beta, grid);
        cls = classify_equilibrium(p);
        wb = renormalized_potential(p);
    }
};

const QuarticSetup& quartic() {
    static const QuarticSetup s;
    return s;
}

PlaneField random_plane_field(const EquilibriumProfile& p, int k_max, bool radial, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    PlaneField h{k_max, Eigen::MatrixXcd::Zero(2 * k_max + 1, p.grid.size())};
    for (int k = -k_max; k <= k_max; ++k) {
        if (radial && k != 0) continue;
        for (std::size_t i = 0; i < p.grid.size(); ++i)
            h.modes(k + k_max, i) = cplx(nd(rng), nd(rng)) * std::exp(-0.1 * p.grid.r[i] * p.grid.r[i]);
    }
    return h;
}

}  // namespace

TEST_SUITE("effective") {

TEST_CASE("torus diffusion matrix") {
    const auto a = diffusion_matrix_torus(TorusKernel::from_cosines({{1, 0, 1.0}, {0, 1, 1.0}}));
    CHECK((a - 0.5 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(diffusion_matrix_torus(TorusKernel()).isZero(0.0));
    // W = c cos(k.x): A = (c^2 / 2) k^perp k^perp^T
    const double c = 0.8;
    const auto s = diffusion_matrix_torus(TorusKernel::from_cosines({{2, 1, c}}));
    Eigen::Matrix2d want;
    want << 1, -2, -2, 4;
    CHECK((s - 0.5 * c * c * want).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("torus diffusion matrix is the mean of K (x) K") {
    const auto w = TorusKernel::from_cosines({{1, 0, 1.0}, {0, 1, 0.6}, {1, 1, 0.4}, {2, -1, 0.3}});
    const int n = 64;
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Vec2 k = w.force({kTwoPi * i / n, kTwoPi * j / n});
            m += outer(k, k);
        }
    m /= n * n;
    CHECK((diffusion_matrix_torus(w) - m).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("next-order matrix") {
    CHECK(next_order_B(TorusKernel()).isZero(0.0));
    const auto cc = TorusKernel::from_cosines({{1, 0, 1.0}, {0, 1, 1.0}});
    CHECK(std::abs(next_order_B(cc)(0, 1)) < 1e-15);
    CHECK(std::abs(next_order_B(cc)(1, 0)) < 1e-15);
    for (const auto& w : {cc, TorusKernel::from_cosines({{1, 0, 1.0}, {0, 1, 0.6}, {1, 1, 0.4}})}) {
        const Eigen::Matrix2d b = next_order_B(w), r = real_space_B(w, 16);
        CHECK((b - r).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("wave law") {
    const auto f0 = TorusDensity::from_cosines({{1, 0, 0.5}, {1, 1, 0.3}});
    const DiffusionMatrix a = 0.5 * Eigen::Matrix2d::Identity();
    const std::vector<double> tau{0.0, 0.5, 1.0, 3.0};
    const auto s = wave_evolve(f0, a, tau);
    for (std::size_t i = 0; i < tau.size(); ++i) {
        CHECK(s.f[i].at({1, 0}).real() == doctest::Approx(0.25 * std::cos(std::sqrt(0.5) * tau[i])));
        CHECK(s.f[i].at({-1, -1}).real() == doctest::Approx(0.15 * std::cos(tau[i])));
        CHECK(s.f[i].at({0, 0}) == cplx(1.0));
        CHECK(s.energy(i, a) == doctest::Approx(s.energy(0, a)).epsilon(1e-14));
    }
    const auto frozen = wave_evolve(f0, DiffusionMatrix::Zero(), tau);
    for (const auto& f : frozen.f) CHECK(f.at({1, 0}) == f0.coefficient({1, 0}));
    CHECK_THROWS_AS(wave_evolve(f0, -a, tau), NumericError);
}

TEST_CASE("Gaussian single-particle operator") {
    const auto& g = gaussian();
    REQUIRE(g.cls.is_gaussian());
    const GaussianOperator op(g.p, g.R);
    const auto radial = random_plane_field(g.p, op.k_max(), true, 1);
    CHECK(op.apply(radial).weighted_norm(g.p) < 1e-10 * radial.weighted_norm(g.p));
    const auto h1 = random_plane_field(g.p, op.k_max(), false, 2), h2 = random_plane_field(g.p, op.k_max(), false, 3);
    const auto t1 = apply_T_beta(op, h1), t2 = apply_T_beta(op, h2);
    const double scale = t1.weighted_norm(g.p) * h2.weighted_norm(g.p);
    CHECK(std::abs(t1.weighted_inner(h2, g.p) - h1.weighted_inner(t2, g.p)) < 1e-10 * scale);
}

TEST_CASE("Gaussian operator on h = x1") {
    // T h = i beta R d_theta (W * (h mu)); for Gaussian W and mu this is closed form
    const auto& g = gaussian();
    const GaussianOperator op(g.p, g.R);
    const double s2 = 1.0 / (g.beta * g.R);
    PlaneField h{op.k_max(), Eigen::MatrixXcd::Zero(2 * op.k_max() + 1, g.p.grid.size())};
    for (std::size_t i = 0; i < g.p.grid.size(); ++i) {
        h.modes(op.k_max() + 1, i) = 0.5 * g.p.grid.r[i];
        h.modes(op.k_max() - 1, i) = 0.5 * g.p.grid.r[i];
    }
    for (double r : {0.3, 0.8, 1.5})
        for (double th : {0.0, 0.9, 2.0}) {
            const double x2 = r * std::sin(th);
            const double u = 5.0 * s2 * std::exp(-r * r / (2 * (1 + s2))) / ((1 + s2) * (1 + s2));
            const cplx want(0.0, -g.beta * g.R * x2 * u);
            CHECK(std::abs(op.apply_at(h, r, th) - want) < 1e-8);
        }
}

TEST_CASE("Gaussian diffusion field") {
    const auto& g = gaussian();
    const PlaneKernel kernel(g.w);
    const auto field = diffusion_field_gaussian(kernel, g.p, g.cls, {0.0, 0.5, 1.0});
    CHECK(field.tangential[0] == 0.0);
    CHECK(field.normal[1] == 0.0);
    CHECK(diffusion_field_direct(kernel, g.p, {0.0, 0.0}).cwiseAbs().maxCoeff() < 1e-12);
    for (double rho : {0.5, 1.0}) {
        const Eigen::Matrix2d d = diffusion_field_direct(kernel, g.p, {rho, 0.0});
        CHECK(std::abs(d(0, 0)) < 1e-12 * d(1, 1));
        CHECK(d(1, 1) == doctest::Approx(diffusion_field_alpha(g.p, rho)).epsilon(1e-10));
    }
    const Eigen::Matrix2d a1 = field.at({0.0, 1.0}, g.p);
    CHECK(a1(0, 0) == doctest::Approx(field.tangential[2]));
    CHECK(std::abs(a1(1, 1)) < 1e-15);
    CHECK_THROWS_AS(diffusion_field_gaussian(kernel, quartic().p, quartic().cls, {1.0}), NumericError);

    // equivariance under rotations
    const Vec2 x{0.7, 0.3};
    const double phi = 1.1;
    Eigen::Matrix2d rot;
    rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    const Eigen::Matrix2d ax = diffusion_field_direct(kernel, g.p, x);
    const Eigen::Matrix2d arx = diffusion_field_direct(kernel, g.p, {rot(0, 0) * x[0] + rot(0, 1) * x[1],
                                                                     rot(1, 0) * x[0] + rot(1, 1) * x[1]});
    CHECK((arx - rot * ax * rot.transpose()).cwiseAbs().maxCoeff() < 1e-8 * ax.cwiseAbs().maxCoeff());
}

TEST_CASE("Gaussian diffusion field against Monte Carlo") {
    // A((1,0)) = E_{y ~ mu} [ (avg_e K(x - |y| e))^{(x)2} ]
    const auto& g = gaussian();
    const PlaneKernel kernel(g.w);
    const double sd = 1.0 / std::sqrt(g.beta * g.R);
    std::mt19937_64 rng(77);
    std::normal_distribution<double> nd(0.0, sd);
    const long samples = 2000000;
    const int n_angles = 32;
    double sum = 0.0, sum2 = 0.0;
    for (long s = 0; s < samples; ++s) {
        const double r = std::hypot(nd(rng), nd(rng));
        double avg = 0.0;
        for (int l = 0; l < n_angles; ++l) {
            const double th = kTwoPi * (l + 0.5) / n_angles;
            avg += kernel.force({1.0 - r * std::cos(th), -r * std::sin(th)})[1];
        }
        avg /= n_angles;
        sum += avg * avg;
        sum2 += avg * avg * avg * avg;
    }
    const double mean = sum / samples;
    const double se = std::sqrt((sum2 / samples - mean * mean) / (samples - 1));
    CHECK(std::abs(mean - diffusion_field_alpha(g.p, 1.0)) < 3 * se);
}

TEST_CASE("propagated coupling at t = 0 against direct quadrature") {
    const auto& g = gaussian();
    const GaussianOperator op(g.p, g.R);
    const PlaneKernel kernel(g.w);
    const double rho = 0.8;
    Eigen::Matrix2d direct = Eigen::Matrix2d::Zero();
    const int n_angles = 256;
    for (std::size_t j = 0; j < g.p.grid.size(); ++j) {
        const double r = g.p.grid.r[j];
        for (int l = 0; l < n_angles; ++l) {
            const double th = kTwoPi * l / n_angles;
            const Vec2 k = kernel.force({rho - r * std::cos(th), -r * std::sin(th)});
            direct += outer(k, k) * (kTwoPi / n_angles) * g.p.mu[j] * r * g.p.grid.w[j];
        }
    }
    const Eigen::Matrix2d m = propagated_coupling(op, rho, 0.0, false);
    CHECK((m - direct).cwiseAbs().maxCoeff() < 1e-8 * direct.cwiseAbs().maxCoeff());
    // the Cesaro factor at T -> 0 reduces to the plain coupling
    CHECK((propagated_coupling(op, rho, 1e-12, true) - direct).cwiseAbs().maxCoeff() <
          1e-8 * direct.cwiseAbs().maxCoeff());
}

TEST_CASE("Gaussian main term") {
    const auto& g = gaussian();
    const GaussianOperator op(g.p, g.R);
    const double c = g.beta * g.R / 2.0;
    AngularDensity f{RadialFunction::gaussian(1.0, 1.0 / std::sqrt(g.beta * g.R)),
                     RadialFunction(
                         "r exp(-c r^2)", [c](double r) { return r * std::exp(-c * r * r); },
                         [c](double r) { return (1 - 2 * c * r * r) * std::exp(-c * r * r); },
                         [c](double r) { return (-6 * c * r + 4 * c * c * r * r * r) * std::exp(-c * r * r); })};
    const auto mt = gaussian_main_term(f, op, {0.0, 5.0, 20.0}, 200.0);
    for (double fn : mt.field_norm) CHECK(fn <= mt.field_norm[0] * (1.0 + 1e-10));
    for (double n : mt.norm) CHECK(std::isfinite(n));
    CHECK(mt.cesaro_rel_error < 0.02);

    // t = 0: (1/mu) div(M grad f) with M(x) the unaveraged coupling, by Cartesian differences
    auto coupling = [&](const Vec2& x) {
        const double r = std::hypot(x[0], x[1]), th = std::atan2(x[1], x[0]);
        Eigen::Matrix2d rot;
        rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        return Eigen::Matrix2d(rot * propagated_coupling(op, r, 0.0, false) * rot.transpose());
    };
    auto grad_f = [&](const Vec2& x) {
        const double r = std::hypot(x[0], x[1]), ct = x[0] / r, st = x[1] / r;
        const double fr = f.f0.d1(r) + f.f1.d1(r) * ct;
        const double ft = -f.f1(r) * st / r;  // (1/r) d_theta f
        return Eigen::Vector2d(fr * ct - ft * st, fr * st + ft * ct);
    };
    const double h = 1e-4;
    for (std::size_t i : {40, 70, 100}) {
        const double r = g.p.grid.r[i];
        for (double th : {0.0, kPi / 2, kPi}) {
            const Vec2 x{r * std::cos(th), r * std::sin(th)};
            double div = 0.0;
            for (int a = 0; a < 2; ++a) {
                Vec2 xp = x, xm = x;
                xp[a] += h;
                xm[a] -= h;
                div += ((coupling(xp) * grad_f(xp))[a] - (coupling(xm) * grad_f(xm))[a]) / (2 * h);
            }
            const auto& c = mt.t0_components[i];
            const double got = c[0] + c[1] * std::cos(th) + c[2] * std::sin(th);
            CHECK(got == doctest::Approx(div / g.p.mu[i]).epsilon(1e-5));
        }
    }
}

TEST_CASE("resolvent without coupling is diagonal") {
    const auto& q = quartic();
    const PairResolvent res(q.p, 4);
    TwoParticleField src;
    src.r1 = {0.5, 1.2};
    src.r2 = res.nodes();
    src.k_max = 2;
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    for (int k = -2; k <= 2; ++k) {
        Eigen::MatrixXcd m(2, src.r2.size());
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) m(i, j) = cplx(nd(rng), nd(rng));
        src.modes.push_back(m);
    }
    ResolventStats st;
    const double eps = 0.05;
    const auto out = resolvent_L2(res, eps, 0.0, src, st);
    for (int k = -2; k <= 2; ++k)
        for (std::size_t i = 0; i < 2; ++i) {
            const double om1 = q.p.omega_at(src.r1[i]);
            for (std::size_t j = 0; j < src.r2.size(); j += 13) {
                const cplx want = src.modes[k + 2](i, j) / cplx(eps, k * (res.omega(j) - om1));
                CHECK(std::abs(out.modes[k + 2](i, j) - want) < 1e-14 * std::abs(want));
            }
        }
    CHECK_THROWS_AS(resolvent_L2(res, 0.0, 0.0, src, st), ConfigError);
}

TEST_CASE("product-integration weights") {
    // smooth integrand at large eps against Simpson quadrature; Omega is linear per sub-cell
    const auto& q = quartic();
    const double om1 = q.p.omega_at(1.0), eps = 0.5;
    const int n = 4000;
    const double h = q.p.grid.r_max / n;
    cplx simpson = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double s = i * h;
        const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        simpson += wgt * std::exp(-s) / cplx(eps, q.p.omega_at(s) - om1);
    }
    simpson *= h / 3.0;
    std::vector<double> err;
    for (int sub : {32, 64, 128}) {
        const PairResolvent res(q.p, 2, sub);
        const auto c = res.product_weights(1, om1, eps);
        cplx sum = 0.0;
        for (std::size_t j = 0; j < res.nodes().size(); ++j) sum += c[j] * std::exp(-res.nodes()[j]);
        err.push_back(std::abs(sum - simpson));
    }
    CHECK(err[1] < 1e-5);
    CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.1));
    CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("coupled resolvent satisfies its defining identity") {
    const auto& q = quartic();
    const PairResolvent res(q.p, 3);
    const std::size_t n = res.nodes().size();
    Eigen::VectorXcd src(n);
    for (std::size_t j = 0; j < n; ++j) src[j] = std::exp(-res.nodes()[j]) * cplx(1.0, 0.3);
    const int k = 2;
    const double om1 = q.p.omega_at(0.9), eps = 0.01;
    ResolventStats st;
    const auto v = res.solve(k, om1, eps, q.beta, src, st);
    // rebuild M = diag(ik Omega) W_k diag(2 pi mu s c) independently of the solver
    const auto c = res.product_weights(k, om1, eps);
    Eigen::VectorXcd mv = Eigen::VectorXcd::Zero(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += res.w_table(k)(i, j) * kTwoPi * res.mu(j) * res.nodes()[j] * c[j] * v[j];
        mv[i] = cplx(0.0, k * res.omega(i)) * s;
    }
    CHECK((v + q.beta * mv - src).cwiseAbs().maxCoeff() < 1e-8 * src.cwiseAbs().maxCoeff());
    CHECK(st.identity_residual < 1e-8);
    CHECK(st.max_terms > 0);
}

TEST_CASE("non-Gaussian coefficient") {
    const auto& q = quartic();
    REQUIRE(q.cls.is_nondegenerate());
    const std::vector<double> r_out{0.5, 1.0, 2.0};
    const auto cf = compute_a_beta(q.p, q.cls, q.wb, r_out);
    for (double a : cf.a) CHECK(a >= -1e-8);
    REQUIRE(cf.gaps.size() == 2);
    CHECK(cf.gaps[1] < cf.gaps[0]);
    CHECK(cf.stats.identity_residual < 1e-8);
    CHECK(cf.interpolate(0.1) == cf.a.front());
    CHECK(cf.interpolate(0.75) == doctest::Approx(0.5 * (cf.a[0] + cf.a[1])));

    const auto free = solve_mu_beta(q.v, RadialFunction::zero(), q.beta, q.grid);
    const auto fcls = classify_equilibrium(free);
    const auto zero = compute_a_beta(free, fcls, renormalized_potential(free), r_out);
    for (double a : zero.a) CHECK(a == 0.0);

    CHECK_THROWS_AS(compute_a_beta(gaussian().p, gaussian().cls, renormalized_potential(gaussian().p), r_out),
                    NumericError);
    ABetaOptions bad;
    bad.eps_schedule = {1e-2, 2e-2};
    CHECK_THROWS_AS(compute_a_beta(q.p, q.cls, q.wb, r_out, bad), ConfigError);
}

TEST_CASE("Fokker-Planck evolution") {
    const auto& q = quartic();
    auto a = [](double r) { return 0.1 * r * r; };
    const std::vector<double> tau{0.0, 1.0, 5.0, 20.0, 100.0};
    SUBCASE("equilibrium is stationary") {
        const auto s = fp_evolve([&](double r) { return q.p.mu_at(r); }, a, q.p, tau);
        double peak = 0.0;
        for (double m : s.f[0]) peak = std::max(peak, m);
        for (std::size_t i = 1; i < tau.size(); ++i)
            for (std::size_t j = 0; j < s.r.size(); ++j) CHECK(std::abs(s.f[i][j] - s.f[0][j]) < 1e-12 * peak);
    }
    SUBCASE("mass and H-norm") {
        const auto s = fp_evolve([&](double r) { return q.p.mu_at(r) * (1.0 + 0.5 * std::cos(2 * r)); }, a, q.p, tau);
        for (std::size_t i = 1; i < tau.size(); ++i) {
            CHECK(s.mass(i) == doctest::Approx(s.mass(0)).epsilon(1e-12));
            CHECK(s.h_norm(i) <= s.h_norm(i - 1) * (1.0 + 1e-14));
        }
        CHECK(s.h_norm(tau.size() - 1) < s.h_norm(0));
    }
    CHECK_THROWS_AS(fp_evolve([](double) { return 1.0; }, [](double) { return -1.0; }, q.p, tau), NumericError);
    CHECK_THROWS_AS(fp_evolve([](double) { return 1.0; }, a, q.p, {1.0, 0.0}), ConfigError);
}

}
