#pragma once

/// Truncated 3D Fourier representation of divergence-free velocity
/// fields on the torus (0,2π)³, the Leray projection (diagonal per
/// mode), and the pseudo-spectral evaluation of the quadratic term with
/// full dealiasing (padded grid M ≥ 3K+1).
///
/// Conventions: u(ξ) = Σ_k û_k e^{ik·ξ}; inner products and quadrature
/// are per unit volume, so |u|² = Σ_k |û_k|² and a physical-grid mean
/// matches the spectral sum by Parseval.

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "logconvex/errors.hpp"

namespace logconvex {

using Cplx = std::complex<double>;

/// Mode bookkeeping for the cube {k : |k_i| ≤ K}.
struct SpectralGrid {
    int K = 0;
    int n1d = 0;           // 2K+1
    int count = 0;         // (2K+1)³
    std::vector<int> kx, ky, kz;
    std::vector<double> ksq;  // |k|²

    int index(int ikx, int iky, int ikz) const {
        return ((ikx + K) * n1d + (iky + K)) * n1d + (ikz + K);
    }
    bool contains(int ikx, int iky, int ikz) const {
        return std::abs(ikx) <= K && std::abs(iky) <= K && std::abs(ikz) <= K;
    }
};

const SpectralGrid& spectral_grid(int K);

/// Divergence-free truncated velocity: û_0 = 0, û_{−k} = conj(û_k).
struct FourierVelocity {
    int K = 0;
    std::array<std::vector<Cplx>, 3> comp;

    static FourierVelocity zero(int K);
    int modes() const { return static_cast<int>(comp[0].size()); }
};

void leray_project(FourierVelocity& u);

/// max_k |k·û_k| / (|k||û_k|), 0-safe; the divergence-free defect.
double div_residual(const FourierVelocity& u);

/// max_k |û_k − conj(û_{−k})| relative to max|û|.
double herm_residual(const FourierVelocity& u);

/// Symmetrize û_k ← (û_k + conj(û_{−k}))/2 (restores exact realness).
void hermitianize(FourierVelocity& u);

double l2sq(const FourierVelocity& u);       // Σ|û_k|²
double vnormsq(const FourierVelocity& u);    // Σ|k|²|û_k|²  (⟨Au,u⟩)
double h2normsq(const FourierVelocity& u);   // Σ(1+|k|²)²|û_k|²

// linear field algebra (same K required)
void axpy(Cplx a, const FourierVelocity& x, FourierVelocity& y);
void scale(double a, FourierVelocity& u);
FourierVelocity difference(const FourierVelocity& a, const FourierVelocity& b);

/// Taylor–Green-type field A·(sin x cos y cos z, −cos x sin y cos z, 0).
FourierVelocity taylor_green(int K, double amplitude);
/// Complementary div-free field B·(0, sin y cos z, −cos y sin z).
FourierVelocity taylor_green_yz(int K, double amplitude);
/// Random div-free field with spectral decay |k|^(−slope), unit L² norm.
FourierVelocity random_divfree(int K, double slope, std::uint64_t seed,
                               std::uint32_t stream);

/// Smallest 2/3/5-smooth integer ≥ 3K+1 (the dealiasing grid).
int dealias_grid_size(int K);

/// Pseudo-spectral engine for one truncation level; owns FFTW plans and
/// padded-grid buffers. Not safe for concurrent use by several threads —
/// give each worker its own instance.
class PseudoSpectral {
  public:
    explicit PseudoSpectral(int K);
    ~PseudoSpectral();
    PseudoSpectral(const PseudoSpectral&) = delete;
    PseudoSpectral& operator=(const PseudoSpectral&) = delete;

    int K() const { return grid_->K; }
    int M() const { return M_; }
    int grid_points() const { return M_ * M_ * M_; }

    /// Inverse transforms of the three components onto the padded grid.
    void load(const FourierVelocity& u);
    /// Inverse transforms of the nine ∂_i u_j fields.
    void load_gradients(const FourierVelocity& u);

    double max_point_speed_sq() const;       // max_ξ |u(ξ)|²₃
    double mean_speed_quartic() const;       // mean |u(ξ)|⁴
    double mean_grad_quartic() const;        // mean |∇u(ξ)|⁴

    /// Π ∂_i(u_i u_j): divergence-form quadratic term, fully dealiased;
    /// identical (mode-exact) to Π(u·∇)u for divergence-free u.
    /// Requires load(u) for the same u.
    FourierVelocity nonlinear_term(const FourierVelocity& u);
    void nonlinear_term(const FourierVelocity& u, FourierVelocity& out);

    /// Π(g_N(|u|²₃)·u); activity reports max|u|²₃. Exact zero (no
    /// transforms run) when the taming threshold is never exceeded.
    FourierVelocity taming_term(const FourierVelocity& u, double N, double nu,
                                double& activity);
    void taming_term(const FourierVelocity& u, double N, double nu, double& activity,
                     FourierVelocity& out);

    /// ‖u‖²_{W^{1,4}} surrogate = sqrt(mean|u|⁴ + mean|∇u|⁴);
    /// runs load + load_gradients.
    double w14_normsq(const FourierVelocity& u);

    /// Physical components (after load); padded-grid row-major.
    const std::vector<double>& phys(int c) const { return u_[c]; }

  private:
    // Real fields ride two per complex transform: a backward FFT of
    // û + i·v̂ (both Hermitian) carries u in the real part and v in the
    // imaginary part; a forward FFT of f + i·g splits into the two
    // Hermitian halves at k and −k.
    void to_phys(const std::vector<Cplx>& cube, std::vector<double>& out);
    void to_spec(const std::vector<double>& in, std::vector<Cplx>& cube);
    void to_phys_pair(const Cplx* a, const Cplx* b, double* oa, double* ob);
    void to_phys_deriv_pair(const Cplx* ua, int axis_a, const Cplx* ub, int axis_b,
                            double* oa, double* ob);
    void to_spec_pair(const double* f, const double* g, Cplx* F, Cplx* G);

    const SpectralGrid* grid_;
    int M_ = 0;
    std::array<std::vector<double>, 3> u_;      // physical velocity
    std::array<std::vector<double>, 9> grad_;   // physical ∂_i u_j
    std::vector<double> scratch_, scratch2_;
    std::vector<int> wrap_, wrap_neg_;          // cube -> padded index of ±k
    std::array<std::vector<Cplx>, 6> prod_;     // product cubes workspace
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
    Cplx* buf_ = nullptr;
};

/// u·e for a single real trigonometric scalar mode e = √2·cos(a·ξ) or
/// √2·sin(a·ξ): exact mode shifts, Galerkin-truncated to the cube.
FourierVelocity multiply_by_trig_mode(const FourierVelocity& u, const std::array<int, 3>& a,
                                      bool is_sin);

}  // namespace logconvex
