#include <doctest.h>

#include "pvk/meanfield.hpp"

using namespace pvk;

namespace {

// (W * mu)(r) by brute-force polar quadrature of the 2-D integral
double brute_convolution(const EquilibriumProfile& p, const RadialFunction& w, double r) {
    const int n_angle = 512;
    double s = 0.0;
    for (std::size_t j = 0; j < p.grid.size(); ++j) {
        const double rho = p.grid.r[j];
        double ang = 0.0;
        for (int a = 0; a < n_angle; ++a) {
            const double th = kTwoPi * a / n_angle;
            ang += w(std::hypot(r - rho * std::cos(th), rho * std::sin(th)));
        }
        s += ang * (kTwoPi / n_angle) * p.mu[j] * rho * p.grid.w[j];
    }
    return s;
}

struct Quartic {
    ExternalPotential v{RadialFunction::even_polynomial({0.0, 0.5, 0.25})};
    RadialFunction w = RadialFunction::gaussian(1.0, 1.0);
    RadialGrid grid = RadialGrid::gauss_legendre(6.5, 20, 8);
};

}  // namespace

TEST_SUITE("meanfield") {

TEST_CASE("free harmonic equilibrium") {
    const auto grid = RadialGrid::gauss_legendre(10.0, 20, 8);
    const auto p = solve_mu_beta(ExternalPotential(RadialFunction::even_polynomial({0.0, 0.5})),
                                 RadialFunction::zero(), 1.0, grid);
    CHECK(p.z == doctest::Approx(kTwoPi * (1.0 - std::exp(-50.0))).epsilon(1e-12));
    for (std::size_t i = 0; i < grid.size(); i += 7) {
        const double r = grid.r[i];
        CHECK(p.mu[i] == doctest::Approx(std::exp(-0.5 * r * r) / kTwoPi).epsilon(1e-12));
        CHECK(p.omega[i] == doctest::Approx(-1.0).epsilon(1e-10));
    }
    CHECK(p.mass() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(classify_equilibrium(p).is_gaussian());
}

TEST_CASE("quartic confinement without interaction is non-degenerate") {
    const Quartic q;
    const auto p = solve_mu_beta(q.v, RadialFunction::zero(), 0.1, q.grid);
    for (std::size_t i = 0; i < q.grid.size(); i += 5) {
        const double r = q.grid.r[i];
        CHECK(p.omega[i] == doctest::Approx(-(1.0 + r * r)).epsilon(1e-10));
    }
    // Omega(0) = -V''(0)
    CHECK(p.omega_at(0.0) == doctest::Approx(-1.0).epsilon(1e-8));
    const auto cls = classify_equilibrium(p);
    CHECK(cls.is_nondegenerate());
    CHECK(cls.omega_d2_origin == doctest::Approx(-2.0).epsilon(1e-5));
}

TEST_CASE("Gaussian construction reproduces the Gaussian") {
    const double beta = 0.1, R = 40.0, a = beta * R;
    const auto w = RadialFunction::gaussian(5.0, 1.0);
    const auto grid = RadialGrid::gauss_legendre(std::sqrt(60.0 / a), 20, 8);
    const auto v = gaussian_case_potential(w, beta, R, grid);
    const auto p = solve_mu_beta(ExternalPotential(v), w, beta, grid);
    double dev = 0.0, peak = a / kTwoPi;
    for (std::size_t i = 0; i < grid.size(); ++i)
        dev = std::max(dev, std::abs(p.mu[i] - peak * std::exp(-0.5 * a * grid.r[i] * grid.r[i])));
    CHECK(dev / peak < 1e-8);
    // W * G = 5 exp(-r^2 / (2 (1 + s^2))) / (1 + s^2), s^2 = 1/(beta R)
    const double s2 = 1.0 / a;
    for (double r : {0.0, 0.4, 1.1, 2.5}) {
        const double exact = 5.0 * std::exp(-r * r / (2 * (1 + s2))) / (1 + s2);
        CHECK(p.mean_potential(r) == doctest::Approx(exact).epsilon(1e-8));
    }
    const auto cls = classify_equilibrium(p);
    CHECK(cls.is_gaussian());
    CHECK(cls.fitted_R == doctest::Approx(R).epsilon(1e-6));
}

TEST_CASE("interacting equilibrium satisfies the fixed-point equation") {
    const Quartic q;
    const double beta = 0.4;
    const auto p = solve_mu_beta(q.v, q.w, beta, q.grid);
    CHECK(p.fixed_point_residual < 1e-10);
    CHECK(p.mass() == doctest::Approx(1.0).epsilon(1e-12));
    for (double r : {0.0, 0.7, 1.6, 2.9}) {
        const double conv = brute_convolution(p, q.w, r);
        CHECK(p.mean_potential(r) == doctest::Approx(conv).epsilon(1e-10));
        const double gibbs = std::exp(-beta * (q.v.profile()(r) + conv)) / p.z;
        CHECK(p.mu_at(r) == doctest::Approx(gibbs).epsilon(1e-8));
    }
    for (std::size_t i = 1; i < p.residual_history.size(); ++i)
        CHECK(p.residual_history[i] <= p.residual_history[i - 1]);
}

TEST_CASE("refined grid agrees") {
    const Quartic q;
    const auto p = solve_mu_beta(q.v, q.w, 0.4, q.grid);
    const auto pf = solve_mu_beta(q.v, q.w, 0.4, q.grid.refined());
    for (double r : {0.0, 0.35, 1.0, 1.9, 3.2})
        CHECK(std::abs(p.mu_at(r) - pf.mu_at(r)) < 1e-6);
}

TEST_CASE("grid too short for the equilibrium") {
    const auto grid = RadialGrid::gauss_legendre(3.0, 10, 8);
    CHECK_THROWS_AS(solve_mu_beta(ExternalPotential(RadialFunction::even_polynomial({0.0, 0.5})),
                                  RadialFunction::zero(), 1.0, grid),
                    ConfigError);
}

TEST_CASE("convolution powers") {
    const Quartic q;
    const auto p = solve_mu_beta(q.v, q.w, 0.2, q.grid);
    const auto one = mu_convolution_power(p, 1);
    for (std::size_t k = 0; k < one.modes.size(); ++k)
        CHECK((one.modes[k] - (*p.w_tables)[k]).cwiseAbs().maxCoeff() == 0.0);
    const auto two = mu_convolution_power(p, 2);
    for (const auto& m : two.modes) CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-13);
    // (W * W)(x, x) = int W(|x - y|)^2 mu(y) dy
    const std::size_t i = 40;
    const double r = p.grid.r[i];
    double brute = 0.0;
    const int n_angle = 512;
    for (std::size_t j = 0; j < p.grid.size(); ++j) {
        const double rho = p.grid.r[j];
        double ang = 0.0;
        for (int a = 0; a < n_angle; ++a) {
            const double th = kTwoPi * a / n_angle;
            const double d = std::hypot(r - rho * std::cos(th), rho * std::sin(th));
            ang += q.w(d) * q.w(d);
        }
        brute += ang * (kTwoPi / n_angle) * p.mu[j] * rho * p.grid.w[j];
    }
    CHECK(two.evaluate(r, r, 0.0, i, i) == doctest::Approx(brute).epsilon(1e-8));
    CHECK_THROWS_AS(mu_convolution_power(p, 0), ConfigError);
}

TEST_CASE("renormalized potential") {
    const Quartic q;
    SUBCASE("beta = 0 leaves W unchanged") {
        auto p = solve_mu_beta(q.v, q.w, 0.2, q.grid);
        p.beta = 0.0;
        const auto wb = renormalized_potential(p);
        CHECK(wb.truncation_order == 0);
        for (std::size_t k = 0; k < wb.table.modes.size(); ++k)
            CHECK((wb.table.modes[k] - (*p.w_tables)[k]).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("series truncation and identity") {
        const auto p = solve_mu_beta(q.v, q.w, 0.4, q.grid);
        const auto wb = renormalized_potential(p, 1e-12);
        CHECK(wb.tail_bound < 1e-12);
        CHECK(wb.truncation_order > 0);
        CHECK(renormalized_identity_residual(p, wb) < 1e-8);
        // off-grid rows agree with the table at a node
        const auto rows = wb.rows_at(p, p.grid.r[17]);
        for (std::size_t k = 0; k < wb.table.modes.size(); ++k)
            CHECK((rows.row(k) - wb.table.modes[k].row(17)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

}
