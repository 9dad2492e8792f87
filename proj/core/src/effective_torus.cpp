#include <cmath>

#include "pvk/effective.hpp"

namespace pvk {

DiffusionMatrix diffusion_matrix_torus(const TorusKernel& w) {
    DiffusionMatrix a = DiffusionMatrix::Zero();
    for (const auto& f : w.force_modes())
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) a(i, j) += (f.k_hat[i] * std::conj(f.k_hat[j])).real();
    return a;
}

DiffusionMatrix next_order_B(const TorusKernel& w) {
    std::map<Mode, std::array<cplx, 2>> K;
    for (const auto& f : w.force_modes()) K[f.k] = f.k_hat;
    auto grad = [](Mode p, const std::array<cplx, 2>& kh, int g, int d) {
        const double pg = g == 0 ? p.k1 : p.k2;
        return cplx(0.0, pg) * kh[d];  // hat of d_g K_d at p
    };
    const cplx zero(0.0);
    Eigen::Matrix2cd t1 = Eigen::Matrix2cd::Zero(), t2 = t1, t3 = t1, t4 = t1;
    const DiffusionMatrix A = diffusion_matrix_torus(w);

    for (const auto& [p, kp] : K)
        for (const auto& [q, kq] : K) {
            const Mode r = -(p + q);
            auto it = K.find(r);
            if (it == K.end()) continue;
            const auto& kr = it->second;
            for (int al = 0; al < 2; ++al)
                for (int be = 0; be < 2; ++be) {
                    cplx s1 = zero, s3 = zero, s4 = zero;
                    for (int g = 0; g < 2; ++g)
                        for (int d = 0; d < 2; ++d) {
                            s1 += grad(p, kp, g, d) * grad(q, kq, d, g) * kr[al] * kr[be];
                            s3 += grad(p, kp, d, al) * grad(q, kq, g, be) * kr[d] * kr[g];
                            s4 += grad(p, kp, d, al) * grad(q, kq, g, d) * kr[g] * kr[be];
                        }
                    t1(al, be) += s1;
                    t3(al, be) += s3;
                    t4(al, be) += s4;
                }
        }
    for (const auto& [p, kp] : K) {
        auto it = K.find(-p);
        if (it == K.end()) continue;
        const auto& km = it->second;
        for (int al = 0; al < 2; ++al)
            for (int be = 0; be < 2; ++be)
                for (int g = 0; g < 2; ++g)
                    for (int d = 0; d < 2; ++d)
                        t2(al, be) += grad(p, kp, d, al) * grad(-p, km, g, be) * A(d, g);
    }
    const Eigen::Matrix2cd b = t1 - 2.0 * t2 - 2.0 * t3 - 2.0 * t4;
    return b.real();
}

WaveSeries wave_evolve(const TorusDensity& f0, const DiffusionMatrix& a, const std::vector<double>& tau) {
    if (a.selfadjointView<Eigen::Upper>().eigenvalues().minCoeff() < -1e-12)
        throw NumericError("wave_evolve", "diffusion matrix not positive semidefinite");
    WaveSeries s;
    s.tau = tau;
    for (double t : tau) {
        std::map<Mode, cplx> f, df;
        for (const auto& [k, c] : f0.coefficients()) {
            const double kak = a(0, 0) * k.k1 * k.k1 + (a(0, 1) + a(1, 0)) * k.k1 * k.k2 + a(1, 1) * k.k2 * k.k2;
            const double om = std::sqrt(std::max(0.0, kak));
            f[k] = c * std::cos(om * t);
            df[k] = -c * om * std::sin(om * t);
        }
        s.f.push_back(std::move(f));
        s.dfdt.push_back(std::move(df));
    }
    return s;
}

double WaveSeries::energy(std::size_t i, const DiffusionMatrix& a) const {
    double e = 0.0;
    for (const auto& [k, c] : f[i]) {
        const double kak = a(0, 0) * k.k1 * k.k1 + (a(0, 1) + a(1, 0)) * k.k1 * k.k2 + a(1, 1) * k.k2 * k.k2;
        e += std::norm(dfdt[i].at(k)) + kak * std::norm(c);
    }
    return e;
}

}  // namespace pvk
