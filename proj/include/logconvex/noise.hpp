#pragma once

/// Basis-expanded Wiener field W(t,ξ) = Σ_j μ_j e_j(ξ) β_j(t), its spatial
/// derivatives, and the Itô correction μ(ξ) = ½ Σ_j μ_j² e_j(ξ)².

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "logconvex/grid.hpp"

namespace logconvex {

/// Dirichlet sine basis e_j(ξ) = √(2/π)·sin(jξ) on (0,π), tabulated with
/// analytic first and second derivatives.
struct OrthonormalBasis {
    Grid1D grid;
    int modes = 0;                 // J
    std::vector<Field> e, de, d2e; // per mode, length grid.n
    std::vector<double> c2b_norm;  // max(sup|e_j|, sup|∇e_j|, sup|D²e_j|)

    /// Worst discrete orthonormality defect max_{i,j} |⟨e_i,e_j⟩ − δ_ij|.
    double orthonormality_defect() const;
};

OrthonormalBasis build_basis(const Grid1D& grid, int modes);

/// Mode coefficients μ_j = σ·j^(−p) plus the truncated summability value
/// Σ μ_j² ‖e_j‖²_{C²_b} (logged for reproducibility).
struct NoiseSpec {
    int modes = 0;
    double sigma = 0.0;
    double decay_p = 2.0;
    std::vector<double> mu;

    static NoiseSpec power_law(int modes, double sigma, double decay_p);
    double condition_value(const OrthonormalBasis& basis) const;
};

/// Per-mode Brownian paths on a fixed time grid; counter-based sampling
/// keyed by (seed, mode, step) so path j never depends on how many modes
/// or steps accompany it.
struct BrownianPaths {
    std::vector<double> times;  // t_0=0 < t_1 < ... < t_M
    int modes = 0;
    std::uint64_t seed = 0;
    std::vector<double> beta;   // (M+1) rows × modes, row-major

    static BrownianPaths sample(int modes, const std::vector<double>& times,
                                std::uint64_t seed);

    /// Keep every `factor`-th node (β subsampled: same Brownian path seen
    /// on the coarser grid). M must be divisible by factor.
    BrownianPaths coarsen(int factor) const;

    double value(int mode, int node) const { return beta[static_cast<std::size_t>(node) * modes + mode]; }
    double increment(int mode, int node) const { return value(mode, node + 1) - value(mode, node); }
    int steps() const { return static_cast<int>(times.size()) - 1; }
};

/// Grid evaluation of W and derivatives at one time node.
struct WienerEval {
    Field w, dw, d2w;
};

struct WienerField {
    std::shared_ptr<const OrthonormalBasis> basis;
    std::shared_ptr<const NoiseSpec> spec;
    BrownianPaths paths;
    Field ito_mu;  // ½ Σ μ_j² e_j², cached

    int steps() const { return paths.steps(); }
    double time(int node) const { return paths.times[node]; }

    /// Locate a grid node for time t; anything off-grid is refused
    /// (exactness contract — no Brownian-bridge interpolation).
    int node_of(double t) const;
};

WienerField make_wiener_field(std::shared_ptr<const OrthonormalBasis> basis,
                              std::shared_ptr<const NoiseSpec> spec,
                              const std::vector<double>& times, std::uint64_t seed);

/// W(t_m,·), ∇W, D²W assembled from basis derivatives (never finite
/// differences of W).
WienerEval eval_wiener(const WienerField& field, int node);

Field ito_correction(const OrthonormalBasis& basis, const NoiseSpec& spec);

/// Uniform time grid {0, Δt, ..., MΔt}.
std::vector<double> uniform_times(double dt, int steps);

}  // namespace logconvex
