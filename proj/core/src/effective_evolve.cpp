#include <cmath>

#include "pvk/effective.hpp"

namespace pvk {

double FPSeries::mass(std::size_t i) const {
    double m = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) m += f[i][j] * volume[j];
    return m;
}

double FPSeries::h_norm(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) s += f[i][j] * f[i][j] / mu[j] * volume[j];
    return std::sqrt(s);
}

FPSeries fp_evolve(const std::function<double(double)>& f0, const std::function<double(double)>& a,
                   const EquilibriumProfile& p, const std::vector<double>& tau, int cells) {
    if (cells < 2) throw ConfigError("Fokker-Planck solver needs at least two cells");
    for (std::size_t i = 1; i < tau.size(); ++i)
        if (!(tau[i] > tau[i - 1])) throw ConfigError("tau grid must increase");
    const int n = cells;
    const double dr = p.grid.r_max / n;
    FPSeries s;
    s.tau = tau;
    std::vector<double> mass_w(n), u(n), flux(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        const double lo = i * dr, hi = lo + dr;
        s.r.push_back(lo + 0.5 * dr);
        s.volume.push_back(kPi * (hi * hi - lo * lo));
        s.mu.push_back(p.mu_at(s.r.back()));
        if (!(s.mu.back() > 0.0)) throw NumericError("fp_evolve", "equilibrium vanishes inside the domain");
        mass_w[i] = s.mu[i] * s.volume[i];
    }
    for (int i = 1; i < n; ++i) {
        const double rf = i * dr, av = a(rf);
        if (av < 0.0) throw NumericError("fp_evolve", "negative diffusion coefficient at r = " + std::to_string(rf));
        flux[i] = kTwoPi * rf * av * p.mu_at(rf) / dr;
    }
    for (int i = 0; i < n; ++i) u[i] = f0(s.r[i]) / s.mu[i];
    auto push = [&] {
        std::vector<double> f(n);
        for (int i = 0; i < n; ++i) f[i] = u[i] * s.mu[i];
        s.f.push_back(std::move(f));
    };
    if (!tau.empty()) push();
    std::vector<double> lo(n), di(n), up(n), rhs(n);
    for (std::size_t t = 1; t < tau.size(); ++t) {
        const double dt = tau[t] - tau[t - 1];
        for (int i = 0; i < n; ++i) {
            const double fl = flux[i], fr = flux[i + 1];
            lo[i] = -dt * fl;
            up[i] = -dt * fr;
            di[i] = mass_w[i] + dt * (fl + fr);
            rhs[i] = mass_w[i] * u[i];
        }
        // Thomas algorithm
        for (int i = 1; i < n; ++i) {
            const double m = lo[i] / di[i - 1];
            di[i] -= m * up[i - 1];
            rhs[i] -= m * rhs[i - 1];
        }
        u[n - 1] = rhs[n - 1] / di[n - 1];
        for (int i = n - 2; i >= 0; --i) u[i] = (rhs[i] - up[i] * u[i + 1]) / di[i];
        for (double x : u)
            if (!std::isfinite(x)) throw NumericError("fp_evolve", "non-finite solution");
        push();
    }
    return s;
}

}  // namespace pvk
