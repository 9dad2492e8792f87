#include <doctest.h>

#include <Eigen/Dense>

#include "pvk/kernels.hpp"
#include "support.hpp"

using namespace pvk;
using pvk::test::dist;
using pvk::test::random_point;

TEST_SUITE("kernels") {

TEST_CASE("two-mode torus kernel at (pi/2, 0)") {
    const auto w = TorusKernel::from_cosines({{1, 0, 1.0}, {0, 1, 1.0}});
    const Vec2 k = eval_force(w, {kPi / 2, 0.0});
    CHECK(std::abs(k[0]) < 1e-15);
    CHECK(k[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w.mode_table().size() == 4);
    CHECK(w.mode_table().at({1, 0}).real() == doctest::Approx(0.5));
}

TEST_CASE("empty table gives the zero field") {
    const auto w = TorusKernel::from_modes({});
    CHECK(w.empty());
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
        const Vec2 k = eval_force(w, random_point(rng, 0.0, kTwoPi));
        CHECK(k[0] == 0.0);
        CHECK(k[1] == 0.0);
    }
}

TEST_CASE("torus force coefficients are divergence free") {
    const auto w = TorusKernel::from_cosines({{1, 0, 0.7}, {2, -1, 0.3}, {1, 3, -0.2}, {0, 2, 1.1}});
    for (const auto& m : fourier_modes(w)) {
        const cplx div = double(m.k.k1) * m.k_hat[0] + double(m.k.k2) * m.k_hat[1];
        CHECK(std::abs(div) < 1e-15);
    }
}

TEST_CASE("torus force is minus the perpendicular gradient") {
    const auto w = TorusKernel::from_cosines({{1, 0, 0.7}, {2, -1, 0.3}, {1, 3, -0.2}});
    std::mt19937_64 rng(2);
    const double h = 1e-5;
    for (int i = 0; i < 50; ++i) {
        const Vec2 x = random_point(rng, 0.0, kTwoPi);
        const double d1 = (w.potential({x[0] + h, x[1]}) - w.potential({x[0] - h, x[1]})) / (2 * h);
        const double d2 = (w.potential({x[0], x[1] + h}) - w.potential({x[0], x[1] - h})) / (2 * h);
        const Vec2 k = w.force(x);
        CHECK(k[0] == doctest::Approx(d2).epsilon(1e-8).scale(1.0));
        CHECK(k[1] == doctest::Approx(-d1).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("torus force is odd") {
    const auto w = TorusKernel::from_cosines({{1, 0, 0.7}, {2, -1, 0.3}, {1, 3, -0.2}});
    std::mt19937_64 rng(3);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Vec2 x = random_point(rng, 0.0, kTwoPi);
        const Vec2 a = w.force(x), b = w.force({-x[0], -x[1]});
        worst = std::max(worst, std::hypot(a[0] + b[0], a[1] + b[1]));
    }
    CHECK(worst < 1e-14);
}

TEST_CASE("mode table roundtrip reproduces the field") {
    const auto w = TorusKernel::from_cosines({{1, 0, 0.7}, {2, -1, 0.3}, {1, 3, -0.2}});
    const auto again = TorusKernel::from_modes(w.mode_table());
    const auto modes = fourier_modes(w);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        const Vec2 x = random_point(rng, 0.0, kTwoPi);
        Vec2 sum{0.0, 0.0};
        for (const auto& m : modes) {
            const cplx e = std::polar(1.0, m.k.dot(x));
            sum[0] += (m.k_hat[0] * e).real();
            sum[1] += (m.k_hat[1] * e).real();
        }
        CHECK(dist(sum, w.force(x)) < 1e-14);
        CHECK(dist(again.force(x), w.force(x)) == 0.0);
    }
    CHECK(w.cosine_terms().size() == 3);
}

TEST_CASE("invalid torus tables are rejected") {
    CHECK_THROWS_AS(TorusKernel::from_modes({{{0, 0}, 1.0}}), ConfigError);
    CHECK_THROWS_AS(TorusKernel::from_modes({{{1, 0}, 1.0}}), ConfigError);
    CHECK_THROWS_AS(TorusKernel::from_modes({{{1, 0}, 1.0}, {{-1, 0}, 0.5}}), ConfigError);
    CHECK_THROWS_AS(TorusKernel::from_modes({{{1, 0}, cplx(1.0, 0.5)}, {{-1, 0}, cplx(1.0, 0.5)}}), ConfigError);
    CHECK_THROWS_AS(TorusKernel::from_cosines({{0.5, 0, 1.0}}), ConfigError);
}

TEST_CASE("torus gradient bound") {
    // grad K = [[0, -cos x2], [cos x1, 0]]
    const auto w = TorusKernel::from_cosines({{1, 0, 1.0}, {0, 1, 1.0}});
    CHECK(w.grad_sup() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Gaussian plane kernel") {
    const PlaneKernel w(RadialFunction::gaussian(1.0, 1.0));
    const Vec2 k = eval_force(w, {1.0, 0.0});
    CHECK(std::abs(k[0]) < 1e-16);
    CHECK(k[1] == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    const Vec2 k0 = eval_force(w, {0.0, 0.0});
    CHECK(k0[0] == 0.0);
    CHECK(k0[1] == 0.0);

    std::mt19937_64 rng(5);
    const double h = 1e-5;
    for (int i = 0; i < 1000; ++i) {
        const Vec2 x = random_point(rng, -4.0, 4.0);
        const Vec2 a = w.force(x), b = w.force({-x[0], -x[1]});
        CHECK(std::abs(x[0] * a[0] + x[1] * a[1]) < 1e-15);
        CHECK(std::hypot(a[0] + b[0], a[1] + b[1]) < 1e-15);
        if (i < 50) {
            const double d1 = (w.potential({x[0] + h, x[1]}) - w.potential({x[0] - h, x[1]})) / (2 * h);
            const double d2 = (w.potential({x[0], x[1] + h}) - w.potential({x[0], x[1] - h})) / (2 * h);
            CHECK(a[0] == doctest::Approx(d2).epsilon(1e-8).scale(1.0));
            CHECK(a[1] == doctest::Approx(-d1).epsilon(1e-8).scale(1.0));
        }
    }
    // grad_sup is the bound sup (|phi| + r |phi'|) = 2 exp(-1/2); it dominates the true spectral norm
    CHECK(w.grad_sup() == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-4));
    double sup = 0.0;
    for (double r = 0.0; r < 4.0; r += 0.01) {
        Eigen::Matrix2d g;
        for (int a = 0; a < 2; ++a) {
            Vec2 p{r, 0.0}, m{r, 0.0};
            p[a] += h;
            m[a] -= h;
            const Vec2 kp = w.force(p), km = w.force(m);
            g(0, a) = (kp[0] - km[0]) / (2 * h);
            g(1, a) = (kp[1] - km[1]) / (2 * h);
        }
        sup = std::max(sup, g.jacobiSvd().singularValues()[0]);
    }
    CHECK(sup <= w.grad_sup());
    CHECK(sup >= 0.5 * w.grad_sup());
}

TEST_CASE("plane profiles with a cusp are rejected") {
    const RadialFunction cone(
        "r", [](double r) { return r; }, [](double) { return 1.0; }, [](double) { return 0.0; });
    CHECK_THROWS_AS(PlaneKernel{cone}, ConfigError);
    CHECK_THROWS_AS(ExternalPotential{cone}, ConfigError);
}

TEST_CASE("external potential rotates rigidly for V = r^2/2") {
    const ExternalPotential v(RadialFunction::even_polynomial({0.0, 0.5}));
    const Vec2 f = v.force({0.3, -1.2});
    CHECK(f[0] == doctest::Approx(-1.2));
    CHECK(f[1] == doctest::Approx(-0.3));
}

}
