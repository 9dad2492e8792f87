#include "pvk_app/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "pvk/cumulants.hpp"
#include "pvk/effective.hpp"
#include "pvk/hierarchy.hpp"
#include "pvk/meanfield.hpp"
#include "pvk/nbody.hpp"

namespace pvk::app {

Suite parse_suite(const std::string& name) {
    if (name == "fast") return Suite::Fast;
    if (name == "full") return Suite::Full;
    throw ConfigError("suite: expected 'fast' or 'full', got '" + name + "'");
}

std::string suite_name(Suite s) { return s == Suite::Fast ? "fast" : "full"; }

bool CriterionResult::passed() const {
    if (skipped) return true;
    for (const auto& c : checks)
        if (!c.passed) return false;
    return !checks.empty();
}

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

}  // namespace

std::string CriterionResult::line() const {
    std::ostringstream os;
    os << (skipped ? "SKIP" : passed() ? "PASS" : "FAIL") << "  [" << id << "] " << title;
    if (skipped) {
        for (const auto& n : notes) os << " (" << n << ")";
        return os.str();
    }
    os << " (" << fmt(seconds) << " s):";
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto& c = checks[i];
        os << (i ? ";" : "") << " " << c.name << " = " << fmt(c.measured);
        if (c.relation == "<=" || c.relation == ">=")
            os << " " << c.relation << " " << fmt(c.tolerance);
        else
            os << " vs " << fmt(c.target) << " +- " << fmt(c.tolerance);
        if (!c.passed) os << " [x]";
    }
    return os.str();
}

nlohmann::json CriterionResult::to_json() const {
    nlohmann::json j;
    j["id"] = id;
    j["title"] = title;
    j["status"] = skipped ? "skipped" : passed() ? "pass" : "fail";
    j["seconds"] = seconds;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
        j["checks"].push_back({{"name", c.name},
                               {"measured", c.measured},
                               {"target", c.target},
                               {"tolerance", c.tolerance},
                               {"relation", c.relation},
                               {"passed", c.passed}});
    j["notes"] = notes;
    return j;
}

bool VerifyReport::passed() const {
    for (const auto& r : results)
        if (!r.passed()) return false;
    return true;
}

nlohmann::json VerifyReport::to_json() const {
    nlohmann::json j;
    j["suite"] = suite_name(suite);
    j["passed"] = passed();
    j["criteria"] = nlohmann::json::array();
    for (const auto& r : results) j["criteria"].push_back(r.to_json());
    return j;
}

std::string VerifyReport::table() const {
    std::string s;
    for (const auto& r : results) s += r.line() + "\n";
    return s;
}

namespace {

CriterionResult start(int id, std::string title) {
    CriterionResult r;
    r.id = id;
    r.title = std::move(title);
    return r;
}

Check at_most(std::string name, double x, double tol) {
    return {std::move(name), x, 0.0, tol, "<=", x <= tol};
}

Check at_least(std::string name, double x, double bound) {
    return {std::move(name), x, bound, bound, ">=", x >= bound};
}

Check near(std::string name, double x, double target, double tol) {
    return {std::move(name), x, target, tol, "|x-target|<=", std::abs(x - target) <= tol};
}

// Complex comparison reported through the real parts.
Check near(std::string name, cplx x, cplx target, double tol) {
    return {std::move(name), x.real(), target.real(), tol, "|x-target|<=", std::abs(x - target) <= tol};
}

// Running mean and standard error of a complex per-sample quantity.
struct ComplexStat {
    long n = 0;
    cplx mean = 0.0;
    double m2_re = 0.0, m2_im = 0.0;
    void add(cplx x) {
        ++n;
        const cplx d = x - mean;
        mean += d / double(n);
        const cplx d2 = x - mean;
        m2_re += d.real() * d2.real();
        m2_im += d.imag() * d2.imag();
    }
    double se() const {
        if (n < 2) return 0.0;
        return std::sqrt((m2_re + m2_im) / (double(n - 1) * n));
    }
};

const TorusKernel& cosine_kernel() {
    static const TorusKernel w = TorusKernel::from_cosines({{1, 0, 1.0}, {0, 1, 1.0}});
    return w;
}

// ---------------------------------------------------------------- 1

CriterionResult wave_law(Suite suite, const Log& log) {
    auto res = start(1, "wave-law short-time derivatives");
    const auto& w = cosine_kernel();
    const auto f0 = TorusDensity::from_cosines({{1, 0, 0.5}});
    const long samples = suite == Suite::Full ? 200000 : 20000;
    const double h = 0.05;
    const Mode k{1, 0};
    res.notes.push_back("S = " + std::to_string(samples) + ", h = " + fmt(h) +
                        ", dt = h/5, stencil error by Richardson against 2h");
    for (int n : {8, 32, 128}) {
        EnsembleConfig cfg;
        cfg.n_particles = n;
        cfg.n_samples = samples;
        cfg.seed = 1000 + n;
        cfg.dt = h / 5;  // integrator steps well below the stencil spacing
        cfg.t_grid = {-4 * h, -2 * h, -h, 0.0, h, 2 * h, 4 * h};
        cfg.single_modes = {k};
        ComplexStat d2, d2c, d3, d3c;
        const double h2 = h * h, h3 = h2 * h;
        auto hook = [&](long, const std::vector<std::vector<cplx>>& v) {
            auto y = [&](int i) { return v[i][0]; };
            d2.add((y(4) - 2.0 * y(3) + y(2)) / h2);
            d2c.add((y(5) - 2.0 * y(3) + y(1)) / (4 * h2));
            d3.add((y(5) - 2.0 * y(4) + 2.0 * y(2) - y(1)) / (2 * h3));
            d3c.add((y(6) - 2.0 * y(5) + 2.0 * y(1) - y(0)) / (16 * h3));
        };
        run_ensemble(cfg, w, f0, hook);
        const auto exact = exact_short_time_derivatives(f0, w, n, 2);
        const double st2 = std::abs(d2c.mean - d2.mean) / 3.0, st3 = std::abs(d3c.mean - d3.mean) / 3.0;
        res.checks.push_back(near("N=" + std::to_string(n) + " d2", d2.mean, exact.d2.at(k), 3 * d2.se() + st2));
        res.checks.push_back(near("N=" + std::to_string(n) + " d3", d3.mean, exact.d3.at(k), 3 * d3.se() + st3));
        if (log)
            log("  N=" + std::to_string(n) + ": d2 " + fmt(d2.mean.real()) + fmt(d2.mean.imag()) + "i (se " +
                fmt(d2.se()) + ", exact " + fmt(exact.d2.at(k).real()) + "), d3 " + fmt(d3.mean.real()) + " (se " +
                fmt(d3.se()) + ")");
    }
    return res;
}

// ---------------------------------------------------------------- 2

CriterionResult cumulant_scaling(Suite suite, const Log& log) {
    auto res = start(2, "critical cumulant scaling");
    if (suite == Suite::Fast) {
        res.skipped = true;
        res.notes.push_back("full suite only");
        return res;
    }
    const auto& w = cosine_kernel();
    const auto f0 = TorusDensity::from_cosines({{1, 0, 0.5}});
    const long samples = 10000;
    std::vector<PairMode> pairs;
    std::vector<Mode> singles;
    const std::vector<Mode> bg{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) {
            singles.push_back({a, b});
            for (Mode l : bg) pairs.push_back({{a, b}, l});
        }
    res.notes.push_back("S = " + std::to_string(samples) + " per N, pair modes |k|<=1 x kernel modes, debiased norm");
    std::vector<CorrelationEstimate> g2;
    for (int n : {128, 256, 512, 1024}) {
        EnsembleConfig cfg;
        cfg.n_particles = n;
        cfg.n_samples = samples;
        cfg.seed = 2000 + n;
        cfg.t_grid = {0.3 * std::sqrt(double(n))};
        cfg.single_modes = singles;
        cfg.pair_modes = pairs;
        const auto m = run_ensemble(cfg, w, f0);
        const auto g = invert_cluster(marginals_from_moments(m, 0, 2), 2);
        g2.push_back(g[1]);
        if (log) {
            double se = 0.0;
            const double nn = g[1].debiased_norm(&se);
            log("  N=" + std::to_string(n) + ": ||g2|| = " + fmt(nn) + " +- " + fmt(se));
        }
    }
    const auto rep = scaling_report(g2);
    res.checks.push_back(near("slope", rep.slope, -0.5, 0.15));
    res.notes.push_back("slope se " + fmt(rep.slope_se));
    return res;
}

// ---------------------------------------------------------------- 3

CriterionResult hierarchy_vs_nbody(Suite suite, const Log& log) {
    auto res = start(3, "hierarchy vs N-body");
    const auto& w = cosine_kernel();
    const auto f0 = TorusDensity::from_cosines({{1, 0, 0.4}, {0, 1, 0.2}, {1, 1, 0.2}});
    const std::vector<double> tau{0.2, 0.4, 0.6};
    const std::vector<Mode> modes{{1, 0}, {0, 1}, {1, 1}};
    const int n = 1024;
    const long samples = suite == Suite::Full ? 4000 : 400;

    // index 2 is a Lambda = 2 reference, reported but not gated
    std::vector<std::vector<std::map<Mode, cplx>>> gbar;
    for (auto [lambda, m] : {std::pair{1, 5}, {1, 6}, {2, 4}}) {
        FockBasis basis(lambda, m);
        const auto op = build_operator(w, basis);
        const auto g = evolve(op, initial_state(f0, basis), tau);
        std::vector<std::map<Mode, cplx>> obs;
        for (const auto& v : g) obs.push_back(tagged_observable(v));
        gbar.push_back(std::move(obs));
    }

    EnsembleConfig cfg;
    cfg.n_particles = n;
    cfg.n_samples = samples;
    cfg.seed = 3000;
    cfg.t_grid = {0.0};
    for (double t : tau) cfg.t_grid.push_back(t * std::sqrt(double(n)));
    cfg.single_modes = modes;
    // control variate: e^{-ik.x1(t)} - e^{-ik.x1(0)} has known mean f_hat(t) - f0_hat
    std::vector<std::vector<ComplexStat>> acc(tau.size(), std::vector<ComplexStat>(modes.size()));
    auto hook = [&](long, const std::vector<std::vector<cplx>>& v) {
        for (std::size_t t = 0; t < tau.size(); ++t)
            for (std::size_t m = 0; m < modes.size(); ++m) acc[t][m].add(v[t + 1][m] - v[0][m]);
    };
    run_ensemble(cfg, w, f0, hook);
    res.notes.push_back("Lambda = 1, M = 5 vs 6, N = 1024, S = " + std::to_string(samples) +
                        ", control-variate estimator, tolerance 3 se + Cauchy difference");
    double cutoff_shift = 0.0;
    for (std::size_t t = 0; t < tau.size(); ++t)
        for (std::size_t m = 0; m < modes.size(); ++m) {
            const cplx mc = f0.coefficient(modes[m]) + acc[t][m].mean;
            const cplx g5 = gbar[0][t].at(modes[m]), g6 = gbar[1][t].at(modes[m]);
            const double tol = 3 * acc[t][m].se() + std::abs(g5 - g6);
            const cplx g2 = gbar[2][t].at(modes[m]);
            cutoff_shift = std::max(cutoff_shift, std::abs(g5 - g2));
            res.checks.push_back(near("tau=" + fmt(tau[t]) + " k=" + to_string(modes[m]), mc, g5, tol));
            if (log)
                log("  tau=" + fmt(tau[t]) + " k=" + to_string(modes[m]) + ": MC " + fmt(mc.real()) + " " +
                    fmt(mc.imag()) + "i +- " + fmt(acc[t][m].se()) + ", hierarchy " + fmt(g5.real()) +
                    ", |M5-M6| " + fmt(std::abs(g5 - g6)) + ", Lambda=2 " + fmt(g2.real()));
        }
    res.notes.push_back("max |Lambda=1 - Lambda=2| " + fmt(cutoff_shift) + " (not gated)");
    return res;
}

// ---------------------------------------------------------------- 4

CriterionResult operator_algebra(Suite, const Log& log) {
    auto res = start(4, "hierarchy operator algebra");
    const auto& w = cosine_kernel();
    const auto f0 = TorusDensity::from_cosines({{1, 0, 0.4}, {0, 1, 0.2}, {1, 1, 0.2}});
    {
        FockBasis basis(1, 4);
        const auto op = build_operator(w, basis);
        res.checks.push_back(at_most("adjoint residual", op.adjoint_residual(20, 4), 1e-12));
        std::vector<double> tau;
        for (int i = 0; i <= 20; ++i) tau.push_back(0.5 * i);
        const auto g0 = initial_state(f0, basis);
        const auto g = evolve(op, g0, tau);
        double drift = 0.0;
        for (const auto& v : g) drift = std::max(drift, std::abs(v.norm() - g0.norm()) / g0.norm());
        res.checks.push_back(at_most("norm drift", drift, 1e-10));
    }
    {
        // Lambda = 2 keeps every mode reached by two applications from the f0 modes
        FockBasis basis(2, 2);
        const auto op = build_operator(w, basis);
        const auto g0 = initial_state(f0, basis);
        const auto s2 = op.apply(op.apply(g0));
        const auto a = diffusion_matrix_torus(w);
        double err = 0.0;
        for (int k1 = -1; k1 <= 1; ++k1)
            for (int k2 = -1; k2 <= 1; ++k2) {
                const Mode k{k1, k2};
                const long i = basis.find({basis.mode_index(k)});
                const double kak = a(0, 0) * k1 * k1 + (a(0, 1) + a(1, 0)) * k1 * k2 + a(1, 1) * k2 * k2;
                // (iS)^2 = -S^2 on the level-1 component
                err = std::max(err, std::abs(-s2.c[i] + kak * f0.coefficient(k)));
            }
        res.checks.push_back(at_most("composition error", err, 1e-10));
    }
    if (log) log("  Lambda = 1, M = 4 for adjoint and drift; Lambda = 2, M = 2 for the composition");
    return res;
}

// ---------------------------------------------------------------- 5

CriterionResult rage(Suite, const Log& log) {
    auto res = start(5, "RAGE diagnostic");
    FockBasis basis(1, 4);
    const auto w = TorusKernel::from_cosines({{1, 0, 6.0}, {0, 1, 4.2}, {1, 1, 2.4}});
    const auto op = build_operator(w, basis);
    const int zero = basis.mode_index({0, 0});
    auto g0 = initial_state(TorusDensity::from_cosines({{1, 0, 0.5}, {0, 1, 0.3}}), basis);
    auto h = initial_state(TorusDensity::from_cosines({{1, 0, 1.0}}), basis);
    g0.c[basis.find({zero})] = 0.0;
    h.c[basis.find({zero})] = 0.0;
    const auto rep = spectral_diagnostics(op, g0, h, {50, 100, 200, 400});
    res.checks.push_back(at_least("decay exponent", rep.decay_exponent, 0.9));
    res.checks.push_back(at_most("hermiticity defect", rep.hermiticity_defect, 1e-12));
    res.notes.push_back("W = 6 cos x1 + 4.2 cos x2 + 2.4 cos(x1+x2), Lambda = 1, M = 4");
    if (log)
        for (std::size_t i = 0; i < rep.T.size(); ++i)
            log("  T=" + fmt(rep.T[i]) + ": cesaro " + fmt(rep.cesaro[i]) + ", envelope " + fmt(rep.envelope[i]));
    return res;
}

// ---------------------------------------------------------------- 6

CriterionResult gaussian_case(Suite, const Log& log) {
    auto res = start(6, "Gaussian equilibrium");
    const double beta = 0.1, R = 40.0, T = 200.0;
    const auto w = RadialFunction::gaussian(5.0, 1.0);
    const double r_max = std::sqrt(60.0 / (beta * R));
    const auto grid = RadialGrid::gauss_legendre(r_max, 20, 8);
    const auto v = gaussian_case_potential(w, beta, R, grid);
    const auto p = solve_mu_beta(ExternalPotential(v), w, beta, grid);
    const auto cls = classify_equilibrium(p);
    res.checks.push_back(at_least("classified Gaussian", cls.is_gaussian() ? 1.0 : 0.0, 1.0));
    const GaussianOperator op(p, R);

    std::mt19937_64 rng(6);
    std::normal_distribution<double> nd;
    auto random_field = [&](bool radial) {
        PlaneField h;
        h.k_max = op.k_max();
        h.modes = Eigen::MatrixXcd::Zero(2 * h.k_max + 1, p.grid.size());
        for (int k = -h.k_max; k <= h.k_max; ++k) {
            if (radial && k != 0) continue;
            for (std::size_t i = 0; i < p.grid.size(); ++i)
                h.modes(k + h.k_max, i) = cplx(nd(rng), nd(rng)) * std::exp(-0.1 * p.grid.r[i] * p.grid.r[i]);
        }
        return h;
    };
    const auto radial = random_field(true);
    res.checks.push_back(at_most("T on radial", op.apply(radial).weighted_norm(p) / radial.weighted_norm(p), 1e-10));
    const auto h1 = random_field(false), h2 = random_field(false);
    const auto th1 = op.apply(h1), th2 = op.apply(h2);
    const double sa = std::abs(th1.weighted_inner(h2, p) - h1.weighted_inner(th2, p)) /
                      (th1.weighted_norm(p) * h2.weighted_norm(p) + h1.weighted_norm(p) * th2.weighted_norm(p));
    res.checks.push_back(at_most("self-adjointness", sa, 1e-10));

    const PlaneKernel kernel(w);
    const Eigen::Matrix2d a0 = diffusion_field_direct(kernel, p, {0.0, 0.0});
    res.checks.push_back(at_most("|A(0)|", a0.cwiseAbs().maxCoeff(), 1e-12));
    const Vec2 x{0.7, 0.3};
    const double phi = 1.1;
    Eigen::Matrix2d rot;
    rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    const Vec2 rx{rot(0, 0) * x[0] + rot(0, 1) * x[1], rot(1, 0) * x[0] + rot(1, 1) * x[1]};
    const Eigen::Matrix2d ax = diffusion_field_direct(kernel, p, x), arx = diffusion_field_direct(kernel, p, rx);
    const double eq = (arx - rot * ax * rot.transpose()).cwiseAbs().maxCoeff() / ax.cwiseAbs().maxCoeff();
    res.checks.push_back(at_most("rotation equivariance", eq, 1e-8));

    const double c = beta * R / 2.0;
    AngularDensity f{RadialFunction::gaussian(1.0, 1.0 / std::sqrt(beta * R)),
                     RadialFunction(
                         "r exp(-c r^2)", [c](double r) { return r * std::exp(-c * r * r); },
                         [c](double r) { return (1 - 2 * c * r * r) * std::exp(-c * r * r); },
                         [c](double r) { return (-6 * c * r + 4 * c * c * r * r * r) * std::exp(-c * r * r); })};
    const auto mt = gaussian_main_term(f, op, {0.0, 10.0, 50.0}, T);
    res.checks.push_back(at_most("Cesaro rel. error", mt.cesaro_rel_error, 0.02));
    double unit = 0.0;
    for (double fn : mt.field_norm) unit = std::max(unit, std::abs(fn - mt.field_norm[0]) / mt.field_norm[0]);
    res.notes.push_back("beta = 0.1, W = 5 exp(-r^2/2), R = 40, T = 200; field-norm drift " + fmt(unit));
    if (log) log("  " + cls.describe() + ", main-term target norm " + fmt(mt.target_norm));
    return res;
}

// ---------------------------------------------------------------- 7

struct NonGaussianSetup {
    ExternalPotential v{RadialFunction::even_polynomial({0.0, 0.5, 0.25})};
    RadialFunction w = RadialFunction::gaussian(1.0, 1.0);
    double beta = 0.1;
    double r_max = 6.5;
    int panels = 20;
};

CriterionResult nongaussian_coefficient(Suite, const Log& log) {
    auto res = start(7, "non-Gaussian coefficient a_beta");
    const NonGaussianSetup s;
    std::vector<double> r_out;
    for (int i = 1; i <= 12; ++i) r_out.push_back(0.25 * i);
    std::vector<CoefficientField> fields;
    for (int ref = 0; ref < 2; ++ref) {
        const auto grid = RadialGrid::gauss_legendre(s.r_max, s.panels << ref, 8);
        const auto p = solve_mu_beta(s.v, s.w, s.beta, grid);
        const auto cls = classify_equilibrium(p);
        const auto wb = renormalized_potential(p);
        fields.push_back(compute_a_beta(p, cls, wb, r_out));
        if (ref == 0) {
            res.checks.push_back(at_least("non-degenerate", cls.is_nondegenerate() ? 1.0 : 0.0, 1.0));
            if (log) log("  " + cls.describe());
        }
    }
    const auto& cf = fields[0];
    res.checks.push_back(at_least("min a", *std::min_element(cf.a.begin(), cf.a.end()), -1e-8));
    res.checks.push_back(at_most("gap ratio", cf.gaps[1] / cf.gaps[0], 1.0));
    double change = 0.0;
    for (std::size_t i = 0; i < cf.a.size(); ++i) change = std::max(change, std::abs(fields[1].a[i] - cf.a[i]));
    res.checks.push_back(at_most("grid-doubling change", change, cf.stability_gap));
    res.checks.push_back(at_most("resolvent residual", cf.stats.identity_residual, 1e-8));
    res.notes.push_back("gaps " + fmt(cf.gaps[0]) + ", " + fmt(cf.gaps[1]));
    if (log)
        for (std::size_t i = 0; i < r_out.size(); ++i) log("  r=" + fmt(r_out[i]) + ": a = " + fmt(cf.a[i]));
    return res;
}

// ---------------------------------------------------------------- 8

CriterionResult fokker_planck(Suite, const Log& log) {
    auto res = start(8, "Fokker-Planck H-theorem");
    const NonGaussianSetup s;
    const auto grid = RadialGrid::gauss_legendre(s.r_max, s.panels, 8);
    const auto p = solve_mu_beta(s.v, s.w, s.beta, grid);
    const auto cls = classify_equilibrium(p);
    const auto wb = renormalized_potential(p);
    std::vector<double> r_out;
    for (int i = 1; i <= 20; ++i) r_out.push_back(0.25 * i);
    ABetaOptions opts;
    opts.eps_schedule = {1e-2, 5e-3};
    const auto cf = compute_a_beta(p, cls, wb, r_out, opts);
    auto a = [&](double r) { return std::max(cf.interpolate(r), 0.0); };

    // initial profile: equilibrium shape with a shifted ring, same mass as mu
    auto shape = [&](double r) { return p.mu_at(r) * (1.0 + 0.5 * std::cos(2.0 * r)); };
    std::vector<double> tau;
    for (int i = 0; i <= 1000; ++i) tau.push_back(0.5 * i);
    const auto fs = fp_evolve(shape, a, p, tau);
    double incr = 0.0, mass = 0.0;
    for (std::size_t i = 1; i < fs.tau.size(); ++i) {
        incr = std::max(incr, fs.h_norm(i) - fs.h_norm(i - 1));
        mass = std::max(mass, std::abs(fs.mass(i) - fs.mass(0)) / fs.mass(0));
    }
    res.checks.push_back(at_most("max H-norm increase", incr, 1e-14 * fs.h_norm(0)));
    res.checks.push_back(at_most("mass drift", mass, 1e-10));

    const auto eq = fp_evolve([&](double r) { return p.mu_at(r); }, a, p, {0.0, 1.0, 10.0, 100.0, 1000.0});
    double stat = 0.0, mu_max = 0.0;
    for (double m : eq.f[0]) mu_max = std::max(mu_max, m);
    for (std::size_t i = 1; i < eq.f.size(); ++i)
        for (std::size_t j = 0; j < eq.r.size(); ++j) stat = std::max(stat, std::abs(eq.f[i][j] - eq.f[0][j]) / mu_max);
    res.checks.push_back(at_most("equilibrium drift", stat, 1e-10));

    std::vector<double> long_tau{0.0};
    for (int i = 0; i <= 80; ++i) long_tau.push_back(std::pow(10.0, i / 10.0));
    const auto lt = fp_evolve(shape, a, p, long_tau);
    const double scale = lt.mass(0) / eq.mass(0);
    double dev = 0.0;
    for (std::size_t j = 0; j < lt.r.size(); ++j)
        dev = std::max(dev, std::abs(lt.f.back()[j] - scale * eq.f[0][j]) / mu_max);
    res.checks.push_back(at_most("late-time deviation", dev, 1e-4));
    res.notes.push_back("a_beta from the criterion-7 setup, 1000 implicit steps of 0.5, late time 1e8");
    if (log) log("  H-norm " + fmt(fs.h_norm(0)) + " -> " + fmt(fs.h_norm(fs.tau.size() - 1)));
    return res;
}

// ---------------------------------------------------------------- 9

CriterionResult meanfield(Suite, const Log& log) {
    auto res = start(9, "mean-field solver");
    const NonGaussianSetup s;
    const auto grid = RadialGrid::gauss_legendre(s.r_max, s.panels, 8);
    const double beta = 0.4;  // beta sup|W| = 0.4
    const auto p = solve_mu_beta(s.v, s.w, beta, grid);
    res.checks.push_back(at_most("fixed-point residual", p.fixed_point_residual, 1e-10));
    const auto wb = renormalized_potential(p);
    res.checks.push_back(at_most("W_beta identity residual", renormalized_identity_residual(p, wb), 1e-8));
    if (log) log("  iterations " + std::to_string(p.iterations) + ", Z = " + fmt(p.z));
    return res;
}

}  // namespace

std::vector<int> suite_criteria(Suite) { return {1, 2, 3, 4, 5, 6, 7, 8, 9}; }

CriterionResult run_criterion(int id, Suite suite, const Log& log) {
    using Fn = CriterionResult (*)(Suite, const Log&);
    static const Fn table[] = {wave_law,      cumulant_scaling,        hierarchy_vs_nbody,
                               operator_algebra, rage,                 gaussian_case,
                               nongaussian_coefficient, fokker_planck, meanfield};
    if (id < 1 || id > 9) throw ConfigError("criterion: expected 1..9, got " + std::to_string(id));
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r = table[id - 1](suite, log);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

VerifyReport run_suite(Suite s, const std::vector<int>& only, const Log& log) {
    VerifyReport rep;
    rep.suite = s;
    for (int id : suite_criteria(s)) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        auto r = run_criterion(id, s, log);
        if (log) log(r.line());
        rep.results.push_back(std::move(r));
    }
    return rep;
}

}  // namespace pvk::app
