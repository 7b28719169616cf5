#include "support/oracles.hpp"

#include <cmath>
#include <numbers>

namespace logconvex::oracles {

FourierVelocity convolution_nonlinear(const FourierVelocity& u) {
    const SpectralGrid& g = spectral_grid(u.K);
    FourierVelocity w = FourierVelocity::zero(u.K);
    // (u·∇)u in modes: ŵ_j(k) = Σ_{p+q=k} û_i(p) · i q_i · û_j(q)
    for (int pidx = 0; pidx < g.count; ++pidx) {
        const bool pzero = u.comp[0][pidx] == Cplx(0.0, 0.0) &&
                           u.comp[1][pidx] == Cplx(0.0, 0.0) &&
                           u.comp[2][pidx] == Cplx(0.0, 0.0);
        if (pzero) continue;
        for (int qidx = 0; qidx < g.count; ++qidx) {
            const int kx = g.kx[pidx] + g.kx[qidx];
            const int ky = g.ky[pidx] + g.ky[qidx];
            const int kz = g.kz[pidx] + g.kz[qidx];
            if (!g.contains(kx, ky, kz)) continue;
            const int kidx = g.index(kx, ky, kz);
            const Cplx udotiq = u.comp[0][pidx] * Cplx(0.0, g.kx[qidx]) +
                                u.comp[1][pidx] * Cplx(0.0, g.ky[qidx]) +
                                u.comp[2][pidx] * Cplx(0.0, g.kz[qidx]);
            for (int j = 0; j < 3; ++j) w.comp[j][kidx] += udotiq * u.comp[j][qidx];
        }
    }
    leray_project(w);
    return w;
}

std::vector<Cplx> dense_dft3(const std::vector<double>& phys, int M) {
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<Cplx> out(static_cast<std::size_t>(M) * M * M, Cplx(0.0, 0.0));
    for (int kx = 0; kx < M; ++kx)
        for (int ky = 0; ky < M; ++ky)
            for (int kz = 0; kz < M; ++kz) {
                Cplx acc(0.0, 0.0);
                for (int x = 0; x < M; ++x)
                    for (int y = 0; y < M; ++y)
                        for (int z = 0; z < M; ++z) {
                            const double phase =
                                -two_pi *
                                (double(kx) * x + double(ky) * y + double(kz) * z) / M;
                            acc += phys[(static_cast<std::size_t>(x) * M + y) * M + z] *
                                   Cplx(std::cos(phase), std::sin(phase));
                        }
                out[(static_cast<std::size_t>(kx) * M + ky) * M + kz] =
                    acc / double(M * M * M);
            }
    return out;
}

double trapezoid(const Field& f, double h) {
    double s = 0.0;
    for (double v : f) s += v;
    return h * s;
}

}  // namespace logconvex::oracles
