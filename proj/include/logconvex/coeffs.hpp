#pragma once

/// Parabolic problem data (diffusion a, drift b, monotone nonlinearity ψ
/// with its structural hypotheses), the pathwise rescaled coefficients
/// a₀, a₁, and the Yosida regularization of ψ.

#include <functional>
#include <string>

#include "logconvex/grid.hpp"
#include "logconvex/noise.hpp"

namespace logconvex {

using CoefFn = std::function<double(double t, double xi)>;
using PsiFn = std::function<double(double t, double xi, double r)>;
using MajorantFn = std::function<double(double t, double xi, double r1, double r2)>;

struct ParabolicProblem {
    std::string name;
    double horizon = 1.0;            // T
    double ellipticity = 1.0;        // γ in the uniform-ellipticity bound
    double lipschitz_L = 0.0;        // L in the local Lipschitz bound
    double growth_q = 0.0;           // growth exponent of the majorant
    double majorant_C = 1.0;         // C bounding |ψ₀| by |r₁|^q+|r₂|^q+1
    bool psi_r_bounded = true;       // ∂ψ/∂r ∈ L^∞ (linearization hypothesis)

    CoefFn a, a_t, a_xi;             // a₁₁(t,ξ) and its derivatives (d = 1)
    CoefFn b, b_xi;                  // drift and its divergence
    PsiFn psi;                       // ψ(t,ξ,r), monotone in r, ψ(t,ξ,0)=0
    PsiFn psi_r;                     // ∂ψ/∂r
    MajorantFn psi0;                 // declared majorant ψ₀(t,ξ,r₁,r₂)
};

/// Built-in library: "heat", "vardiff" (a = 1 + ½·t·sinξ), "cubic"
/// (ψ = r³, q = 2), "arctan" (ψ = atan r, globally Lipschitz).
ParabolicProblem make_problem(const std::string& name);

/// Coefficients of the rescaled equation
///   ∂t y − ∂ξ(a ∂ξ y) + a₀ y + a₁ ∂ξ y + e^{−W}ψ(t,ξ,e^{W}y) = 0,
/// for one Wiener path at one time node:
///   a₀ = μ(ξ) − [a·(D²W + (∇W)²) + ∂ξa·∇W],   a₁ = −2·a·∇W.
struct RescaledCoefficients {
    Field a0, a1;
};

RescaledCoefficients rescaled_coefficients(const ParabolicProblem& problem,
                                           const WienerField& field, int node);

/// Same assembly from an explicit evaluation (for frozen-field tests).
RescaledCoefficients rescaled_coefficients_at(const ParabolicProblem& problem,
                                              const Grid1D& grid, const WienerEval& ev,
                                              const Field& ito_mu, double t);

/// Yosida approximation ψ_ε(r) = ψ((1 + εψ)^{-1} r): solves
/// y + ε·ψ(t,ξ,y) = r by safeguarded Newton/bisection (|residual| ≤ 1e−12)
/// and returns ψ(t,ξ,y).
double yosida(const ParabolicProblem& problem, double eps, double t, double xi, double r);

/// Pointwise divided difference of r ↦ e^{−W}ψ(t,ξ,e^{W}r) between two
/// states; exact 0 where |y₁−y₂| ≤ 1e−14.
Field lipschitz_quotient(const ParabolicProblem& problem, const Field& y1, const Field& y2,
                         const Field& w, double t, const Grid1D& grid);

struct AssumptionReport {
    bool pass = true;
    double ellipticity_margin = 0.0;   // min sampled a − declared γ... ≥ 0 when pass
    double monotonicity_margin = 0.0;  // min sampled ψ increment
    double psi_zero_max = 0.0;         // max |ψ(t,ξ,0)|
    double majorant_worst = 0.0;       // max of |Δψ| − L|Δr||ψ₀| (≤ 0 when pass)
    double growth_worst = 0.0;         // max of |ψ₀| − C(|r₁|^q+|r₂|^q+1) (≤ 0 when pass)
    double fitted_majorant_C = 0.0;    // empirical min C making the growth bound hold
    std::string detail;
};

/// Samples (t,ξ,r)-tuples and checks ellipticity, ψ(·,·,0)=0, monotonicity
/// and the declared Lipschitz majorant. Report-only; never throws.
AssumptionReport verify_assumptions(const ParabolicProblem& problem, int sample_budget,
                                    std::uint64_t seed = 0x5eedULL);

}  // namespace logconvex
