#pragma once

/// Pathwise IMEX integrator for the rescaled random PDE, the
/// Euler–Maruyama integrator for the original Itô SPDE (the
/// cross-validation oracle), and the e^{±W} transform between them.

#include <functional>

#include "logconvex/noise.hpp"
#include "logconvex/operators.hpp"

namespace logconvex {

struct SchemeParams {
    bool upwind = false;
    /// Deliberate mutation switch for the consistency study: drop the
    /// Itô correction μ(ξ) from the rescaled coefficients.
    bool omit_ito_correction = false;
    /// Skip the advective CFL guard (never needed by the library runs).
    bool skip_cfl_check = false;
};

/// Time-indexed state fields with per-node |·|₂ and H¹-energy caches.
struct Trajectory {
    std::vector<double> times;
    std::vector<Field> states;
    std::vector<double> l2;   // |z(t_m)|₂
    std::vector<double> h1;   // ⟨A(t_m) z, z⟩^{1/2}

    int nodes() const { return static_cast<int>(times.size()); }
    const Field& at(int m) const { return states[m]; }
    const Field& terminal() const { return states.back(); }
};

/// Integrates dy/dt + A(t)y + B(t)y + e^{−W}ψ(t,·,e^{W}y) = 0, y(0)=x:
/// A implicit (backward Euler), B and the reaction explicit.
Trajectory solve_random_pde(const ParabolicProblem& problem, const WienerField& field,
                            const Field& x, const SchemeParams& params = {});

/// Same IMEX stepping with the nonlinearity replaced by a frozen
/// multiplicative potential P(t_m,ξ) (the linearized flow).
Trajectory solve_linear_potential(const ParabolicProblem& problem, const WienerField& field,
                                  const Field& x,
                                  const std::function<Field(int node)>& potential,
                                  const SchemeParams& params = {});

/// X = e^{sign·W} y pointwise at every node (sign=+1 maps the rescaled
/// solution back to the SPDE solution; sign=−1 is the exact inverse).
Trajectory transform_to_spde(const Trajectory& y, const ParabolicProblem& problem,
                             const WienerField& field, double sign = 1.0);

/// Euler–Maruyama on the Itô form: diffusion implicit, drift/reaction and
/// the multiplicative increment X·ΔW explicit.
Trajectory solve_spde_direct(const ParabolicProblem& problem, const WienerField& field,
                             const Field& x, const SchemeParams& params = {});

/// ΔW(ξ) between nodes m and m+1.
Field wiener_increment_field(const WienerField& field, int node);

}  // namespace logconvex
