#include "logconvex/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

#include "logconvex/rng.hpp"
#include "logconvex/simd.hpp"

namespace logconvex {

double taming_g(double r, double N, double nu);  // tamednse module

namespace {

std::mutex g_registry_mutex;
std::mutex g_fftw_mutex;  // FFTW planning is not thread-safe

}  // namespace

const SpectralGrid& spectral_grid(int K) {
    if (K < 1) throw ConfigError("nse.K must be >= 1");
    std::lock_guard<std::mutex> lock(g_registry_mutex);
    static std::map<int, SpectralGrid> registry;
    auto it = registry.find(K);
    if (it != registry.end()) return it->second;
    SpectralGrid g;
    g.K = K;
    g.n1d = 2 * K + 1;
    g.count = g.n1d * g.n1d * g.n1d;
    g.kx.resize(g.count);
    g.ky.resize(g.count);
    g.kz.resize(g.count);
    g.ksq.resize(g.count);
    for (int ix = -K; ix <= K; ++ix)
        for (int iy = -K; iy <= K; ++iy)
            for (int iz = -K; iz <= K; ++iz) {
                const int idx = g.index(ix, iy, iz);
                g.kx[idx] = ix;
                g.ky[idx] = iy;
                g.kz[idx] = iz;
                g.ksq[idx] = double(ix) * ix + double(iy) * iy + double(iz) * iz;
            }
    return registry.emplace(K, std::move(g)).first->second;
}

FourierVelocity FourierVelocity::zero(int K) {
    FourierVelocity u;
    u.K = K;
    const int n = spectral_grid(K).count;
    for (auto& c : u.comp) c.assign(n, Cplx(0.0, 0.0));
    return u;
}

void leray_project(FourierVelocity& u) {
    const SpectralGrid& g = spectral_grid(u.K);
    for (int idx = 0; idx < g.count; ++idx) {
        const double k2 = g.ksq[idx];
        if (k2 == 0.0) {
            u.comp[0][idx] = u.comp[1][idx] = u.comp[2][idx] = 0.0;
            continue;
        }
        // two subtraction passes: the second removes the round-off
        // longitudinal residue, keeping the per-mode defect near machine
        // precision even where the projection cancels most of the mode
        for (int pass = 0; pass < 2; ++pass) {
            const Cplx kdotu = double(g.kx[idx]) * u.comp[0][idx] +
                               double(g.ky[idx]) * u.comp[1][idx] +
                               double(g.kz[idx]) * u.comp[2][idx];
            const Cplx f = kdotu / k2;
            u.comp[0][idx] -= double(g.kx[idx]) * f;
            u.comp[1][idx] -= double(g.ky[idx]) * f;
            u.comp[2][idx] -= double(g.kz[idx]) * f;
        }
    }
}

double div_residual(const FourierVelocity& u) {
    const SpectralGrid& g = spectral_grid(u.K);
    double worst = 0.0;
    for (int idx = 0; idx < g.count; ++idx) {
        const double k2 = g.ksq[idx];
        if (k2 == 0.0) continue;
        const Cplx kdotu = double(g.kx[idx]) * u.comp[0][idx] +
                           double(g.ky[idx]) * u.comp[1][idx] +
                           double(g.kz[idx]) * u.comp[2][idx];
        const double mag = std::sqrt(std::norm(u.comp[0][idx]) + std::norm(u.comp[1][idx]) +
                                     std::norm(u.comp[2][idx]));
        if (mag == 0.0) continue;
        worst = std::max(worst, std::abs(kdotu) / (std::sqrt(k2) * mag));
    }
    return worst;
}

double herm_residual(const FourierVelocity& u) {
    const SpectralGrid& g = spectral_grid(u.K);
    double worst = 0.0, amp = 0.0;
    for (int c = 0; c < 3; ++c)
        for (int idx = 0; idx < g.count; ++idx) {
            const int mirror = g.index(-g.kx[idx], -g.ky[idx], -g.kz[idx]);
            worst = std::max(worst, std::abs(u.comp[c][idx] - std::conj(u.comp[c][mirror])));
            amp = std::max(amp, std::abs(u.comp[c][idx]));
        }
    return amp > 0.0 ? worst / amp : 0.0;
}

void hermitianize(FourierVelocity& u) {
    const SpectralGrid& g = spectral_grid(u.K);
    for (int c = 0; c < 3; ++c)
        for (int idx = 0; idx < g.count; ++idx) {
            const int mirror = g.index(-g.kx[idx], -g.ky[idx], -g.kz[idx]);
            if (mirror < idx) continue;
            const Cplx avg = 0.5 * (u.comp[c][idx] + std::conj(u.comp[c][mirror]));
            u.comp[c][idx] = avg;
            u.comp[c][mirror] = std::conj(avg);
        }
}

namespace {

inline std::span<const double> as_doubles(const std::vector<Cplx>& v) {
    return {reinterpret_cast<const double*>(v.data()), 2 * v.size()};
}

}  // namespace

double l2sq(const FourierVelocity& u) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += simd::nrm2sq(as_doubles(u.comp[c]));
    return s;
}

double vnormsq(const FourierVelocity& u) {
    const SpectralGrid& g = spectral_grid(u.K);
    double s = 0.0;
    for (int c = 0; c < 3; ++c)
        s += simd::weighted_abs2_sum(g.ksq, as_doubles(u.comp[c]));
    return s;
}

double h2normsq(const FourierVelocity& u) {
    const SpectralGrid& g = spectral_grid(u.K);
    static std::map<int, std::vector<double>> cache;
    std::vector<double>* w;
    {
        std::lock_guard<std::mutex> lock(g_registry_mutex);
        auto& entry = cache[u.K];
        if (entry.empty()) {
            entry.resize(g.count);
            for (int i = 0; i < g.count; ++i) {
                const double f = 1.0 + g.ksq[i];
                entry[i] = f * f;
            }
        }
        w = &entry;
    }
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += simd::weighted_abs2_sum(*w, as_doubles(u.comp[c]));
    return s;
}

void axpy(Cplx a, const FourierVelocity& x, FourierVelocity& y) {
    if (x.K != y.K) throw ConfigError("truncation mismatch in field axpy");
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < x.comp[c].size(); ++i) y.comp[c][i] += a * x.comp[c][i];
}

void scale(double a, FourierVelocity& u) {
    for (int c = 0; c < 3; ++c)
        simd::scale(a, {reinterpret_cast<double*>(u.comp[c].data()), 2 * u.comp[c].size()});
}

FourierVelocity difference(const FourierVelocity& a, const FourierVelocity& b) {
    FourierVelocity z = a;
    axpy(Cplx(-1.0, 0.0), b, z);
    return z;
}

FourierVelocity taylor_green(int K, double amplitude) {
    FourierVelocity u = FourierVelocity::zero(K);
    const SpectralGrid& g = spectral_grid(K);
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1}) {
                const int idx = g.index(sx, sy, sz);
                u.comp[0][idx] = Cplx(0.0, -amplitude * sx / 8.0);  // sin x cos y cos z
                u.comp[1][idx] = Cplx(0.0, amplitude * sy / 8.0);   // −cos x sin y cos z
            }
    return u;
}

FourierVelocity taylor_green_yz(int K, double amplitude) {
    FourierVelocity u = FourierVelocity::zero(K);
    const SpectralGrid& g = spectral_grid(K);
    for (int sy : {-1, 1})
        for (int sz : {-1, 1}) {
            const int idx = g.index(0, sy, sz);
            u.comp[1][idx] = Cplx(0.0, -amplitude * sy / 4.0);  // sin y cos z
            u.comp[2][idx] = Cplx(0.0, amplitude * sz / 4.0);   // −cos y sin z
        }
    return u;
}

FourierVelocity random_divfree(int K, double slope, std::uint64_t seed,
                               std::uint32_t stream) {
    FourierVelocity u = FourierVelocity::zero(K);
    const SpectralGrid& g = spectral_grid(K);
    for (int c = 0; c < 3; ++c)
        for (int idx = 0; idx < g.count; ++idx) {
            if (g.ksq[idx] == 0.0) continue;
            const double amp = std::pow(g.ksq[idx], -0.5 * slope);
            const std::uint64_t ctr = static_cast<std::uint64_t>(idx) * 8 + c * 2;
            u.comp[c][idx] = amp * Cplx(rng::gaussian(seed, stream, ctr),
                                        rng::gaussian(seed, stream, ctr + 1));
        }
    hermitianize(u);
    leray_project(u);
    const double n = std::sqrt(l2sq(u));
    if (n > 0.0) scale(1.0 / n, u);
    return u;
}

int dealias_grid_size(int K) {
    auto smooth235 = [](int n) {
        while (true) {
            int m = n;
            for (int p : {2, 3, 5})
                while (m % p == 0) m /= p;
            if (m == 1) return n;
            ++n;
        }
    };
    return smooth235(3 * K + 1);
}

//
// PseudoSpectral
//

PseudoSpectral::PseudoSpectral(int K) : grid_(&spectral_grid(K)), M_(dealias_grid_size(K)) {
    const int npts = grid_points();
    buf_ = reinterpret_cast<Cplx*>(fftw_alloc_complex(npts));
    for (auto& v : u_) v.assign(npts, 0.0);
    scratch_.assign(npts, 0.0);
    scratch2_.assign(npts, 0.0);
    const SpectralGrid& g = *grid_;
    wrap_.resize(g.count);
    wrap_neg_.resize(g.count);
    for (int idx = 0; idx < g.count; ++idx) {
        const int wx = (g.kx[idx] + M_) % M_;
        const int wy = (g.ky[idx] + M_) % M_;
        const int wz = (g.kz[idx] + M_) % M_;
        wrap_[idx] = (wx * M_ + wy) * M_ + wz;
        const int mx = (M_ - wx) % M_, my = (M_ - wy) % M_, mz = (M_ - wz) % M_;
        wrap_neg_[idx] = (mx * M_ + my) * M_ + mz;
    }
    for (auto& p : prod_) p.assign(g.count, Cplx(0.0, 0.0));
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    plan_fwd_ = fftw_plan_dft_3d(M_, M_, M_, reinterpret_cast<fftw_complex*>(buf_),
                                 reinterpret_cast<fftw_complex*>(buf_), FFTW_FORWARD,
                                 FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_3d(M_, M_, M_, reinterpret_cast<fftw_complex*>(buf_),
                                 reinterpret_cast<fftw_complex*>(buf_), FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
}

PseudoSpectral::~PseudoSpectral() {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(reinterpret_cast<fftw_complex*>(buf_));
}

void PseudoSpectral::to_phys(const std::vector<Cplx>& cube, std::vector<double>& out) {
    out.resize(grid_points());
    to_phys_pair(cube.data(), nullptr, out.data(), nullptr);
}

void PseudoSpectral::to_spec(const std::vector<double>& in, std::vector<Cplx>& cube) {
    cube.resize(grid_->count);
    to_spec_pair(in.data(), nullptr, cube.data(), nullptr);
}

void PseudoSpectral::to_phys_pair(const Cplx* a, const Cplx* b, double* oa, double* ob) {
    const SpectralGrid& g = *grid_;
    const int npts = grid_points();
    std::fill(buf_, buf_ + npts, Cplx(0.0, 0.0));
    if (b != nullptr) {
        for (int idx = 0; idx < g.count; ++idx)
            buf_[wrap_[idx]] = a[idx] + Cplx(0.0, 1.0) * b[idx];
    } else {
        for (int idx = 0; idx < g.count; ++idx) buf_[wrap_[idx]] = a[idx];
    }
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    if (b != nullptr) {
        for (int i = 0; i < npts; ++i) {
            oa[i] = buf_[i].real();
            ob[i] = buf_[i].imag();
        }
    } else {
        for (int i = 0; i < npts; ++i) oa[i] = buf_[i].real();
    }
}

void PseudoSpectral::to_phys_deriv_pair(const Cplx* ua, int axis_a, const Cplx* ub,
                                        int axis_b, double* oa, double* ob) {
    const SpectralGrid& g = *grid_;
    const int npts = grid_points();
    const int* kaxis[3] = {g.kx.data(), g.ky.data(), g.kz.data()};
    std::fill(buf_, buf_ + npts, Cplx(0.0, 0.0));
    const int* ka = kaxis[axis_a];
    if (ub != nullptr) {
        const int* kb = kaxis[axis_b];
        for (int idx = 0; idx < g.count; ++idx) {
            const Cplx da = Cplx(0.0, double(ka[idx])) * ua[idx];
            const Cplx db = Cplx(0.0, double(kb[idx])) * ub[idx];
            buf_[wrap_[idx]] = da + Cplx(0.0, 1.0) * db;
        }
    } else {
        for (int idx = 0; idx < g.count; ++idx)
            buf_[wrap_[idx]] = Cplx(0.0, double(ka[idx])) * ua[idx];
    }
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    if (ub != nullptr) {
        for (int i = 0; i < npts; ++i) {
            oa[i] = buf_[i].real();
            ob[i] = buf_[i].imag();
        }
    } else {
        for (int i = 0; i < npts; ++i) oa[i] = buf_[i].real();
    }
}

void PseudoSpectral::to_spec_pair(const double* f, const double* g2, Cplx* F, Cplx* G) {
    const SpectralGrid& g = *grid_;
    const int npts = grid_points();
    if (g2 != nullptr) {
        for (int i = 0; i < npts; ++i) buf_[i] = Cplx(f[i], g2[i]);
    } else {
        for (int i = 0; i < npts; ++i) buf_[i] = Cplx(f[i], 0.0);
    }
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    const double half_inv = 0.5 / npts;
    const double inv = 1.0 / npts;
    if (g2 != nullptr) {
        for (int idx = 0; idx < g.count; ++idx) {
            const Cplx hk = buf_[wrap_[idx]];
            const Cplx hc = std::conj(buf_[wrap_neg_[idx]]);
            F[idx] = half_inv * (hk + hc);
            const Cplx d = hk - hc;  // = 2i·G_k/M³ before scaling
            G[idx] = half_inv * Cplx(d.imag(), -d.real());
        }
    } else {
        for (int idx = 0; idx < g.count; ++idx) F[idx] = inv * buf_[wrap_[idx]];
    }
}

void PseudoSpectral::load(const FourierVelocity& u) {
    const int npts = grid_points();
    for (auto& v : u_) v.resize(npts);
    to_phys_pair(u.comp[0].data(), u.comp[1].data(), u_[0].data(), u_[1].data());
    to_phys_pair(u.comp[2].data(), nullptr, u_[2].data(), nullptr);
}

void PseudoSpectral::load_gradients(const FourierVelocity& u) {
    const int npts = grid_points();
    for (auto& v : grad_) v.resize(npts);
    // nine fields d_i u_c ride in four pairs plus one single
    int slot = 0;
    const Cplx* cubes[9];
    int axes[9];
    for (int d = 0; d < 3; ++d)
        for (int c = 0; c < 3; ++c) {
            cubes[slot] = u.comp[c].data();
            axes[slot] = d;
            ++slot;
        }
    for (int s = 0; s + 1 < 9; s += 2)
        to_phys_deriv_pair(cubes[s], axes[s], cubes[s + 1], axes[s + 1], grad_[s].data(),
                           grad_[s + 1].data());
    to_phys_deriv_pair(cubes[8], axes[8], nullptr, 0, grad_[8].data(), nullptr);
}

double PseudoSpectral::max_point_speed_sq() const {
    const int npts = grid_points();
    double m = 0.0;
    for (int i = 0; i < npts; ++i) {
        const double s =
            u_[0][i] * u_[0][i] + u_[1][i] * u_[1][i] + u_[2][i] * u_[2][i];
        m = std::max(m, s);
    }
    return m;
}

double PseudoSpectral::mean_speed_quartic() const {
    const double* comps[3] = {u_[0].data(), u_[1].data(), u_[2].data()};
    return simd::sq_norm4(comps, 3, grid_points()) / grid_points();
}

double PseudoSpectral::mean_grad_quartic() const {
    const double* comps[9];
    for (int i = 0; i < 9; ++i) comps[i] = grad_[i].data();
    return simd::sq_norm4(comps, 9, grid_points()) / grid_points();
}

FourierVelocity PseudoSpectral::nonlinear_term(const FourierVelocity& u) {
    FourierVelocity w = FourierVelocity::zero(grid_->K);
    nonlinear_term(u, w);
    return w;
}

void PseudoSpectral::nonlinear_term(const FourierVelocity& u, FourierVelocity& out) {
    const SpectralGrid& g = *grid_;
    const std::size_t npts = static_cast<std::size_t>(grid_points());
    // symmetric products u_i u_j transformed two per FFT
    static constexpr int pi[6] = {0, 0, 0, 1, 1, 2};
    static constexpr int pj[6] = {0, 1, 2, 1, 2, 2};
    for (int s = 0; s < 6; s += 2) {
        simd::mul({u_[pi[s]].data(), npts}, {u_[pj[s]].data(), npts},
                  {scratch_.data(), npts});
        simd::mul({u_[pi[s + 1]].data(), npts}, {u_[pj[s + 1]].data(), npts},
                  {scratch2_.data(), npts});
        to_spec_pair(scratch_.data(), scratch2_.data(), prod_[s].data(),
                     prod_[s + 1].data());
    }
    // ŵ_j = Σ_i i·k_i T̂_ij (divergence form)
    out.K = g.K;
    for (auto& c : out.comp) c.assign(g.count, Cplx(0.0, 0.0));
    for (int s = 0; s < 6; ++s) {
        const int i = pi[s], j = pj[s];
        const int* ki = (i == 0) ? g.kx.data() : (i == 1) ? g.ky.data() : g.kz.data();
        const int* kj = (j == 0) ? g.kx.data() : (j == 1) ? g.ky.data() : g.kz.data();
        Cplx* wj = out.comp[j].data();
        Cplx* wi = out.comp[i].data();
        const Cplx* t = prod_[s].data();
        for (int idx = 0; idx < g.count; ++idx) {
            const Cplx v = t[idx];
            wj[idx] += Cplx(0.0, double(ki[idx])) * v;
            if (i != j) wi[idx] += Cplx(0.0, double(kj[idx])) * v;
        }
    }
    leray_project(out);
    hermitianize(out);
}

FourierVelocity PseudoSpectral::taming_term(const FourierVelocity& u, double N, double nu,
                                            double& activity) {
    FourierVelocity w = FourierVelocity::zero(u.K);
    taming_term(u, N, nu, activity, w);
    return w;
}

void PseudoSpectral::taming_term(const FourierVelocity& u, double N, double nu,
                                 double& activity, FourierVelocity& out) {
    const int npts = grid_points();
    const SpectralGrid& g = *grid_;
    activity = max_point_speed_sq();
    out.K = u.K;
    for (auto& c : out.comp) c.assign(g.count, Cplx(0.0, 0.0));
    if (activity <= N) return;  // g_N vanishes identically: exact zero
    std::vector<double> s(npts);
    for (int i = 0; i < npts; ++i) {
        const double r =
            u_[0][i] * u_[0][i] + u_[1][i] * u_[1][i] + u_[2][i] * u_[2][i];
        s[i] = taming_g(r, N, nu);
    }
    simd::mul({s.data(), s.size()}, {u_[0].data(), static_cast<std::size_t>(npts)},
              {scratch_.data(), static_cast<std::size_t>(npts)});
    simd::mul({s.data(), s.size()}, {u_[1].data(), static_cast<std::size_t>(npts)},
              {scratch2_.data(), static_cast<std::size_t>(npts)});
    to_spec_pair(scratch_.data(), scratch2_.data(), out.comp[0].data(), out.comp[1].data());
    simd::mul({s.data(), s.size()}, {u_[2].data(), static_cast<std::size_t>(npts)},
              {scratch_.data(), static_cast<std::size_t>(npts)});
    to_spec_pair(scratch_.data(), nullptr, out.comp[2].data(), nullptr);
    leray_project(out);
    hermitianize(out);
}

double PseudoSpectral::w14_normsq(const FourierVelocity& u) {
    load(u);
    load_gradients(u);
    return std::sqrt(mean_speed_quartic() + mean_grad_quartic());
}

FourierVelocity multiply_by_trig_mode(const FourierVelocity& u, const std::array<int, 3>& a,
                                      bool is_sin) {
    const SpectralGrid& g = spectral_grid(u.K);
    FourierVelocity v = FourierVelocity::zero(u.K);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int idx = 0; idx < g.count; ++idx) {
        const int kx = g.kx[idx], ky = g.ky[idx], kz = g.kz[idx];
        for (int c = 0; c < 3; ++c) {
            Cplx minus(0.0, 0.0), plus(0.0, 0.0);  // û_{k−a}, û_{k+a}
            if (g.contains(kx - a[0], ky - a[1], kz - a[2]))
                minus = u.comp[c][g.index(kx - a[0], ky - a[1], kz - a[2])];
            if (g.contains(kx + a[0], ky + a[1], kz + a[2]))
                plus = u.comp[c][g.index(kx + a[0], ky + a[1], kz + a[2])];
            if (is_sin)
                v.comp[c][idx] = Cplx(0.0, -inv_sqrt2) * (minus - plus);
            else
                v.comp[c][idx] = inv_sqrt2 * (minus + plus);
        }
    }
    return v;
}

}  // namespace logconvex
