#pragma once

/// Log-convexity machinery: Dirichlet-quotient traces, the path constants
/// ν₁/γ₂ and the derived rates γ*₁ and γ*, the quotient growth bound, and
/// the headline backward-uniqueness estimate.

#include "logconvex/parabolic.hpp"

namespace logconvex {

/// |z|₂ at or below this floor ends a trace (the maximal-interval cut).
inline constexpr double kDegenerateFloor = 1e-14;

struct QuotientTrace {
    std::vector<double> times;
    std::vector<double> lambda;    // Λ(t) = ⟨A(t)z,z⟩/|z|₂²
    std::vector<double> l2sq;      // |z(t)|₂²
    std::vector<double> log_l2sq;
    std::vector<char> valid;       // 0 from the first degenerate node on
    int first_degenerate = -1;     // -1 when the trace never degenerates
};

/// Discrete Rayleigh quotient; throws DegenerateStateError at the floor.
double dirichlet_quotient(const Field& z, const DiscreteOperator& A, const Grid1D& grid);

/// Trace of z = y₁ − y₂ along two trajectories on a common grid.
QuotientTrace build_quotient_trace(const ParabolicProblem& problem, const Grid1D& grid,
                                   const Trajectory& y1, const Trajectory& y2);

/// Trace of a single difference trajectory (linear problems evolve z
/// directly).
QuotientTrace build_quotient_trace(const ParabolicProblem& problem, const Grid1D& grid,
                                   const Trajectory& z);

struct CalibrationConstants {
    double C1 = 1.0, C2 = 1.0, C3 = 1.0, C4 = 1.0;
};

struct PathConstants {
    double nu1 = 0.0;          // sup‖W‖_{C²_b} + sup|∇W|²
    double gamma2 = 0.0;       // ‖e^{−W}X₁‖^q_∞ + ‖e^{−W}X₂‖^q_∞ + 1
    double gamma1_star = 0.0;  // C₁ + C₂(ν₁+γ₂)²
    double gamma_star = 0.0;   // C₄(ν₁+γ₂+1)·exp(γ*₁(T−t₀))/γ*₁
    CalibrationConstants calib;
};

/// Sup norms over all grid/time nodes; γ*₁ and γ* assembled for the
/// window [t₀, T].
PathConstants path_constants(const WienerField& field, const Trajectory& X1,
                             const Trajectory& X2, const ParabolicProblem& problem,
                             const CalibrationConstants& calib, double t0);

struct QuotientBoundReport {
    bool degenerate = false;
    bool pass = false;
    double max_violation = 0.0;   // max_t log(Λ(t)/Λ(t₀)) − γ*₁(t−t₀)
    double fitted_gamma1 = 0.0;   // minimal rate making the bound hold
};

/// Λ(t) ≤ exp(γ*₁(t−t₀))·Λ(t₀) on [t₀, T].
QuotientBoundReport check_quotient_bound(const QuotientTrace& trace,
                                         const PathConstants& constants, double t0);

struct BackwardEstimateReport {
    bool degenerate = false;
    bool pass = false;
    double worst_margin = 0.0;    // max_t log(|z(t)|₂) − [γ*·Q₀ + log|z(T)|₂]
    double fitted_gamma = 0.0;    // minimal γ̂* making the estimate hold
    double quotient_t0 = 0.0;     // Q₀ = ‖z(t₀)‖₁²/|z(t₀)|₂²
    double z_t0_l2 = 0.0;
    double z_T_l2 = 0.0;
    bool contrapositive_ok = false;  // |z(T)|₂ ≥ exp(−γ̂*Q₀)|z(t₀)|₂ > 0
};

/// Both sides of |X₁(t)−X₂(t)|₂ ≤ exp(γ*·Q₀)·|X₁(T)−X₂(T)|₂ on [t₀,T],
/// plus the contrapositive lower bound on the terminal difference.
BackwardEstimateReport check_backward_estimate(const Trajectory& X1, const Trajectory& X2,
                                               const ParabolicProblem& problem,
                                               const Grid1D& grid,
                                               const PathConstants& constants, double t0);

struct ConvexityReport {
    bool empty = true;
    double min_second_diff = 0.0;   // signed minimum of Δ²log|z|₂²
    double max_lambda_increase = 0.0;  // max_m Λ(t_{m+1}) − Λ(t_m)
};

/// Discrete second differences of log|z(t)|₂² over the valid window.
ConvexityReport log_convexity_probe(const QuotientTrace& trace);

}  // namespace logconvex
