#pragma once

/// Banded discrete operators on Grid1D: the divergence-form elliptic part
/// A(t) = −∂ξ(a ∂ξ ·) with homogeneous Dirichlet rows, and the first-order
/// part B(t) = a₀· + a₁ ∂ξ.

#include "logconvex/coeffs.hpp"
#include "logconvex/grid.hpp"

namespace logconvex {

/// Tridiagonal matrix (rows = interior nodes).
struct Tridiag {
    std::vector<double> lower, diag, upper;  // lower[0] and upper[n-1] unused
    int n = 0;

    void apply(const Field& x, Field& out) const;
    Field apply(const Field& x) const;
    void apply_transpose(const Field& x, Field& out) const;
    double max_asymmetry() const;
    Tridiag transposed() const;
};

/// Solves (I + c·T)x = rhs by the Thomas algorithm (no pivoting; the
/// IMEX matrices are strictly diagonally dominant).
struct TridiagSolver {
    std::vector<double> dprime, uprime;
    int n = 0;

    TridiagSolver() = default;
    TridiagSolver(const Tridiag& t, double c);
    void solve(const Field& rhs, Field& x) const;

  private:
    std::vector<double> lower_;
};

struct DiscreteOperator {
    Tridiag matrix;
    double t = 0.0;
};

/// Conservative stencil −D₋(a D₊) with face-averaged a; symmetric.
/// Throws HypothesisError if a face value loses positivity.
DiscreteOperator assemble_A(const ParabolicProblem& problem, double t, const Grid1D& grid);

/// Multiplication by a₀ plus first derivative weighted by a₁
/// (centered by default, upwind optional).
DiscreteOperator assemble_B(const RescaledCoefficients& rc, const Grid1D& grid,
                            bool upwind = false);

/// ⟨A z, z⟩ in the trapezoid inner product (the discrete H¹ energy).
double energy(const DiscreteOperator& A, const Field& z, const Grid1D& grid);

}  // namespace logconvex
