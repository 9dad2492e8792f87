#include <doctest.h>

#include "pvk/cumulants.hpp"
#include "support.hpp"

using namespace pvk;

namespace {

const TorusKernel& kernel() {
    static const auto w = TorusKernel::from_cosines({{1, 0, 1.0}, {0, 1, 1.0}});
    return w;
}

// d^2/dt^2 E[e^{-ik.x1}] at t = 0 for N = 2, x2 uniform, by exact grid quadrature:
// xdot1 = K(r)/2, xddot1 = grad K(r) K(r) / 2 with r = x1 - x2.
cplx two_body_second_derivative(const TorusKernel& w, const TorusDensity& f0, Mode k) {
    const int n = 20;
    const double h = kTwoPi / n, eps = 1e-5;
    cplx s = 0.0;
    for (int a = 0; a < n * n; ++a) {
        const Vec2 x1{h * (a / n), h * (a % n)};
        const cplx e = std::polar(f0(x1), -k.dot(x1));
        for (int b = 0; b < n * n; ++b) {
            const Vec2 r{x1[0] - h * (b / n), x1[1] - h * (b % n)};
            const Vec2 kr = w.force(r);
            const Vec2 p1 = w.force({r[0] + eps, r[1]}), m1 = w.force({r[0] - eps, r[1]});
            const Vec2 p2 = w.force({r[0], r[1] + eps}), m2 = w.force({r[0], r[1] - eps});
            Vec2 acc;
            for (int c = 0; c < 2; ++c)
                acc[c] = 0.5 * ((p1[c] - m1[c]) / (2 * eps) * kr[0] + (p2[c] - m2[c]) / (2 * eps) * kr[1]);
            const double kv = 0.5 * (k.k1 * kr[0] + k.k2 * kr[1]);
            const double ka = k.k1 * acc[0] + k.k2 * acc[1];
            s += e * cplx(-kv * kv, -ka);
        }
    }
    return s / double(n * n * n * n);
}

}  // namespace

TEST_SUITE("cumulants") {

TEST_CASE("marginals from a sampled ensemble at t = 0") {
    EnsembleConfig cfg;
    cfg.n_particles = 6;
    cfg.n_samples = 6000;
    cfg.seed = 21;
    cfg.single_modes = {{1, 0}};
    cfg.pair_modes = {{{1, 0}, {0, 0}}, {{1, 0}, {1, 0}}, {{0, 0}, {0, 1}}};
    const auto f0 = TorusDensity::from_cosines({{1, 0, 0.5}});
    const auto f = marginals_from_moments(run_ensemble(cfg, kernel(), f0), 0, 2);
    CHECK(f.levels[0].find({{0, 0}})->mean == cplx(1.0));
    const auto* p0 = f.levels[1].find({{1, 0}, {0, 0}});
    CHECK(std::abs(p0->mean - 0.25) < 4 * p0->se_re);
    for (const ModeKey key : {ModeKey{{1, 0}, {1, 0}}, ModeKey{{0, 0}, {0, 1}}}) {
        const auto* e = f.levels[1].find(key);
        CHECK(std::abs(e->mean.real()) < 4 * e->se_re);
        CHECK(std::abs(e->mean.imag()) < 4 * e->se_im);
    }
}

TEST_CASE("pair estimates do not depend on the background particle") {
    EnsembleConfig cfg;
    cfg.n_particles = 8;
    cfg.n_samples = 3000;
    cfg.seed = 22;
    cfg.t_grid = {0.0, 1.0};
    cfg.pair_modes = {{{1, 0}, {-1, 0}}};
    const auto f0 = TorusDensity::from_cosines({{1, 0, 0.5}});
    cfg.pair_index = 2;
    const auto a = run_ensemble(cfg, kernel(), f0).pair[1][0];
    cfg.pair_index = 3;
    cfg.seed = 23;
    const auto b = run_ensemble(cfg, kernel(), f0).pair[1][0];
    CHECK(std::abs(a.mean.real() - b.mean.real()) < 4 * std::hypot(a.se_re, b.se_re));
}

TEST_CASE("cluster inversion") {
    MarginalSet f;
    f.n_particles = 10;
    f.levels.resize(3);
    for (int l = 0; l < 3; ++l) f.levels[l].level = l + 1;
    const std::vector<Mode> ks{{1, 0}, {0, 1}, {1, 1}};
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    auto planted = [&] { return Estimate{cplx(nd(rng), nd(rng)), 0.01, 0.02}; };

    SUBCASE("product marginals have no pair correlation") {
        f.levels[0].entries[{Mode{0, 0}}] = {1.0, 0.0, 0.0};
        for (Mode k : ks) {
            const Estimate e = planted();
            f.levels[0].entries[{k}] = e;
            f.levels[1].entries[{k, Mode{0, 0}}] = e;
            for (Mode l : ks) f.levels[1].entries[{k, l}] = {};
        }
        const auto g = invert_cluster(f, 2);
        for (const auto& [key, e] : g[1].g) CHECK(std::abs(e.mean) == 0.0);
        CHECK(g[0].at({{1, 0}}).mean == f.levels[0].find({{1, 0}})->mean);
    }
    SUBCASE("planted correlations roundtrip") {
        std::vector<CorrelationEstimate> g(3);
        for (int l = 0; l < 3; ++l) g[l].level = l + 1;
        g[0].g[{Mode{0, 0}}] = {1.0, 0.0, 0.0};
        for (Mode k : ks) {
            g[0].g[{k}] = planted();
            for (Mode l : ks) {
                g[1].g[canonical_key({k, l})] = planted();
                for (Mode m : ks) g[2].g[canonical_key({k, l, m})] = planted();
            }
        }
        MarginalSet keys = f;
        for (const auto& [key, e] : g[0].g) keys.levels[0].entries[key] = {};
        for (Mode k : ks) {
            keys.levels[1].entries[{k, Mode{0, 0}}] = {};
            for (Mode l : ks) {
                keys.levels[1].entries[canonical_key({k, l})] = {};
                keys.levels[2].entries[canonical_key({k, Mode{0, 0}, l})] = {};
                for (Mode m : ks) keys.levels[2].entries[canonical_key({k, l, m})] = {};
            }
        }
        const auto expanded = expand_cluster(g, keys);
        // a zero background slot reduces to the lower marginal
        CHECK(std::abs(expanded.levels[1].find({{1, 1}, {0, 0}})->mean - g[0].g.at({{1, 1}}).mean) < 1e-15);
        CHECK(std::abs(expanded.levels[2].find({{0, 1}, {0, 0}, {1, 0}})->mean -
                       g[1].g.at({{0, 1}, {1, 0}}).mean) < 1e-15);
        const auto back = invert_cluster(expanded, 3);
        double err = 0.0;
        for (int l = 0; l < 3; ++l)
            for (const auto& [key, e] : g[l].g) err = std::max(err, std::abs(back[l].at(key).mean - e.mean));
        CHECK(err < 1e-12);
        // entries carrying a zero background slot are never stored and read as zero
        CHECK(back[1].at({{1, 0}, {0, 0}}).mean == cplx(0.0));
        for (const auto& [key, e] : back[2].g)
            for (std::size_t i = 1; i < key.size(); ++i) CHECK_FALSE(key[i].is_zero());
    }
    SUBCASE("levels beyond the marginals are rejected") {
        f.levels[0].entries[{Mode{0, 0}}] = {1.0, 0.0, 0.0};
        CHECK_NOTHROW(invert_cluster(f, 3));
        CHECK_THROWS_AS(invert_cluster(f, 4), ConfigError);
        CHECK_THROWS_AS(invert_cluster(f, 0), ConfigError);
    }
}

TEST_CASE("scaling fit") {
    const std::vector<int> n{128, 256, 512, 1024};
    std::vector<double> norm, se;
    for (int m : n) {
        norm.push_back(0.7 / std::sqrt(double(m)));
        se.push_back(0.05 * norm.back());
    }
    const auto r = scaling_report(n, norm, se);
    CHECK(r.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(r.intercept == doctest::Approx(std::log(0.7)).epsilon(1e-12));
    CHECK(r.slope_se > 0.0);
    CHECK(r.to_csv().rfind("N,norm,se\n", 0) == 0);
    CHECK_THROWS_AS(scaling_report({128, 256}, {1.0, 0.5}, {0.1, 0.1}), ConfigError);
    CHECK_THROWS_AS(scaling_report({128, 256, 512}, {1.0, 0.0, 0.5}, {0.1, 0.1, 0.1}), NumericError);
}

TEST_CASE("debiased norm removes the noise floor") {
    CorrelationEstimate g;
    g.g[{Mode{1, 0}, Mode{0, 1}}] = {cplx(0.3, 0.4), 0.1, 0.0};
    CHECK(g.norm() == doctest::Approx(0.5));
    CHECK(g.debiased_norm() == doctest::Approx(std::sqrt(0.25 - 0.01)));
}

TEST_CASE("exact short-time derivatives") {
    const auto f0 = TorusDensity::from_cosines({{1, 0, 0.5}});
    const auto one = exact_short_time_derivatives(f0, kernel(), 1, 2);
    for (const auto& [k, v] : one.d2) CHECK(v == cplx(0.0));
    const auto ten = exact_short_time_derivatives(f0, kernel(), 10, 2);
    CHECK(ten.d2.at({1, 0}).real() == doctest::Approx(-0.01125).epsilon(1e-14));
    CHECK(ten.d2.at({-1, 0}).real() == doctest::Approx(-0.01125).epsilon(1e-14));
    CHECK(ten.d2.at({0, 0}) == cplx(0.0));
    for (const auto& [k, v] : ten.d3) CHECK(v == cplx(0.0));
}

TEST_CASE("two-body second derivative against quadrature") {
    const auto w = TorusKernel::from_cosines({{1, 0, 1.0}, {0, 1, 0.6}, {1, 1, 0.4}});
    const auto f0 = TorusDensity::from_cosines({{1, 0, 0.5}, {1, 1, 0.3}, {0, 1, -0.2}});
    const auto d = exact_short_time_derivatives(f0, w, 2, 1);
    for (Mode k : {Mode{1, 0}, Mode{0, 1}, Mode{1, 1}, Mode{1, -1}}) {
        const cplx q = two_body_second_derivative(w, f0, k);
        CHECK(std::abs(q - d.d2.at(k)) < 1e-8);
    }
}

TEST_CASE("grid transform obeys Parseval") {
    const int n = 16;
    std::vector<double> v(n * n);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    for (double& x : v) x = nd(rng);
    const auto modes = grid_modes(v, n);
    CHECK(mode_norm(modes) == doctest::Approx(grid_norm(v)).epsilon(1e-12));
    // a single cosine lands on +-k with weight 1/2
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v[i * n + j] = std::cos(kTwoPi * (2 * i + j) / n);
    const auto c = grid_modes(v, n);
    CHECK(c.at({2, 1}).real() == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(c.at({-2, -1}).real() == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(std::abs(c.at({1, 2})) < 1e-14);
    CHECK_THROWS_AS(grid_modes(v, n + 1), ConfigError);
}

}
