#pragma once

/// Approximate controllability by start controllers: the linearized flow
/// Γ = DS(T)(0), its dual Γ* (exact discrete transpose of the forward
/// stepping, plus an independently discretized backward integrator as a
/// cross-check), numerical injectivity, and linear reachability.

#include "logconvex/diagnostics.hpp"
#include "logconvex/parabolic.hpp"

namespace logconvex {

/// Frozen reference path ỹ (the flow solution with zero datum) and the
/// per-node linearization potential P(t_m, ξ) = ψ_r(t_m, ξ, e^{W}ỹ).
/// Owns copies of the problem and the path so it cannot dangle.
struct LinearizedFlow {
    ParabolicProblem problem;
    WienerField field;
    std::vector<Field> potential;  // one per step node

    int state_dim() const { return field.basis->grid.n; }
};

/// Throws HypothesisError for problems that declare unbounded ψ_r.
LinearizedFlow make_linearized_flow(const ParabolicProblem& problem,
                                    const WienerField& field);

/// Γu = v(T): forward IMEX solve with the frozen potential; linear in u.
Field apply_forward(const LinearizedFlow& flow, const Field& u);

/// Γ*p = z(0): exact transpose of each discrete forward step, applied in
/// reverse order (duality ⟨Γu,p⟩ = ⟨u,Γ*p⟩ to round-off).
Field apply_adjoint(const LinearizedFlow& flow, const Field& p);

/// Independent discretization of the backward dual equation
/// dz/dt − A z − B*z − P z = 0, z(T) = p; agrees with apply_adjoint to
/// scheme order only.
Field apply_adjoint_discretized(const LinearizedFlow& flow, const Field& p);

/// Dense n×n matrix of Γ, assembled column-by-column (n ≤ 256).
std::vector<double> assemble_flow_matrix(const LinearizedFlow& flow);

struct InjectivityReport {
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    bool pass = false;  // σ_min > 0 at working precision
};

/// Smallest singular value of the discrete Γ* (== that of Γ).
InjectivityReport injectivity_check(const std::vector<double>& flow_matrix, int n);

struct ReachabilityReport {
    Field controller;          // x
    double achieved_distance;  // ‖S(T)x − target‖₂ from the nonlinear flow
    double linear_residual;    // ‖Γx − (target − S(T)0)‖₂
    double controller_norm;    // ‖x‖₂
    int truncated_modes;       // singular values dropped when reg = 0
};

/// min_x ‖Γx − (target − S(T)0)‖₂² + reg‖x‖₂², solved through the SVD
/// (Tikhonov filter; reg = 0 falls back to a truncated pseudo-inverse),
/// then verified against the full nonlinear flow.
ReachabilityReport approx_reach(const ParabolicProblem& problem, const WienerField& field,
                                const Field& target, double reg);

}  // namespace logconvex
