#include "logconvex/diagnostics.hpp"

#include <cmath>
#include <limits>

namespace logconvex {

double dirichlet_quotient(const Field& z, const DiscreteOperator& A, const Grid1D& grid) {
    const double l2 = grid.l2(z);
    if (l2 <= kDegenerateFloor)
        throw DegenerateStateError("dirichlet_quotient: |z|_2 at the degeneracy floor");
    return energy(A, z, grid) / (l2 * l2);
}

namespace {

QuotientTrace trace_from_states(const ParabolicProblem& problem, const Grid1D& grid,
                                const std::vector<double>& times,
                                const std::function<Field(int)>& z_at) {
    QuotientTrace tr;
    const int nodes = static_cast<int>(times.size());
    tr.times = times;
    tr.lambda.assign(nodes, 0.0);
    tr.l2sq.assign(nodes, 0.0);
    tr.log_l2sq.assign(nodes, 0.0);
    tr.valid.assign(nodes, 0);
    for (int m = 0; m < nodes; ++m) {
        const Field z = z_at(m);
        const double l2 = grid.l2(z);
        if (tr.first_degenerate < 0 && l2 <= kDegenerateFloor) tr.first_degenerate = m;
        if (tr.first_degenerate >= 0) continue;  // entries absent past the floor
        const DiscreteOperator A = assemble_A(problem, times[m], grid);
        tr.l2sq[m] = l2 * l2;
        tr.log_l2sq[m] = std::log(tr.l2sq[m]);
        tr.lambda[m] = energy(A, z, grid) / tr.l2sq[m];
        tr.valid[m] = 1;
    }
    return tr;
}

}  // namespace

QuotientTrace build_quotient_trace(const ParabolicProblem& problem, const Grid1D& grid,
                                   const Trajectory& y1, const Trajectory& y2) {
    if (y1.nodes() != y2.nodes()) throw ConfigError("trajectories disagree on time grid");
    return trace_from_states(problem, grid, y1.times, [&](int m) {
        Field z = y1.states[m];
        simd::axpy(-1.0, y2.states[m], z);
        return z;
    });
}

QuotientTrace build_quotient_trace(const ParabolicProblem& problem, const Grid1D& grid,
                                   const Trajectory& z) {
    return trace_from_states(problem, grid, z.times,
                             [&](int m) { return z.states[m]; });
}

namespace {

int node_at(const std::vector<double>& times, double t) {
    int best = 0;
    double bd = std::fabs(times[0] - t);
    for (std::size_t m = 1; m < times.size(); ++m) {
        const double d = std::fabs(times[m] - t);
        if (d < bd) { bd = d; best = static_cast<int>(m); }
    }
    return best;
}

}  // namespace

PathConstants path_constants(const WienerField& field, const Trajectory& X1,
                             const Trajectory& X2, const ParabolicProblem& problem,
                             const CalibrationConstants& calib, double t0) {
    PathConstants pc;
    pc.calib = calib;

    // ν₁ = sup_t‖W(t)‖_{C²_b} + sup|∇W|² (paper's free constant set to 1,
    // its slack lives in C₂)
    double sup_c2b = 0.0, sup_grad_sq = 0.0;
    double sup_y1 = 0.0, sup_y2 = 0.0;
    const int nodes = static_cast<int>(field.paths.times.size());
    for (int m = 0; m < nodes; ++m) {
        const WienerEval ev = eval_wiener(field, m);
        const double c2b = std::max(
            {simd::max_abs(ev.w), simd::max_abs(ev.dw), simd::max_abs(ev.d2w)});
        sup_c2b = std::max(sup_c2b, c2b);
        const double g = simd::max_abs(ev.dw);
        sup_grad_sq = std::max(sup_grad_sq, g * g);

        // y_i = e^{−W}X_i
        Field y(ev.w.size());
        simd::exp_scale(-1.0, ev.w, X1.states[m], y);
        sup_y1 = std::max(sup_y1, simd::max_abs(y));
        simd::exp_scale(-1.0, ev.w, X2.states[m], y);
        sup_y2 = std::max(sup_y2, simd::max_abs(y));
    }
    pc.nu1 = sup_c2b + sup_grad_sq;
    pc.gamma2 = std::pow(sup_y1, problem.growth_q) + std::pow(sup_y2, problem.growth_q) + 1.0;

    const double s = pc.nu1 + pc.gamma2;
    pc.gamma1_star = calib.C1 + calib.C2 * s * s;
    const double T = field.paths.times.back();
    pc.gamma_star =
        calib.C4 * (s + 1.0) / pc.gamma1_star * std::exp(pc.gamma1_star * (T - t0));
    return pc;
}

QuotientBoundReport check_quotient_bound(const QuotientTrace& trace,
                                         const PathConstants& constants, double t0) {
    QuotientBoundReport rep;
    const int m0 = node_at(trace.times, t0);
    if (!trace.valid[m0] || trace.lambda[m0] <= 0.0) {
        rep.degenerate = true;
        return rep;
    }
    const double lam0 = trace.lambda[m0];
    double worst = -std::numeric_limits<double>::infinity();
    double fitted = 0.0;
    for (std::size_t m = m0; m < trace.times.size(); ++m) {
        if (!trace.valid[m]) break;
        const double dt = trace.times[m] - trace.times[m0];
        const double lhs = std::log(trace.lambda[m] / lam0);
        worst = std::max(worst, lhs - constants.gamma1_star * dt);
        if (dt > 0.0) fitted = std::max(fitted, lhs / dt);
    }
    rep.max_violation = worst;
    rep.fitted_gamma1 = std::max(0.0, fitted);
    rep.pass = worst <= 1e-12;
    return rep;
}

BackwardEstimateReport check_backward_estimate(const Trajectory& X1, const Trajectory& X2,
                                               const ParabolicProblem& problem,
                                               const Grid1D& grid,
                                               const PathConstants& constants, double t0) {
    BackwardEstimateReport rep;
    if (X1.nodes() != X2.nodes()) throw ConfigError("trajectories disagree on time grid");
    const int m0 = node_at(X1.times, t0);
    const int mT = X1.nodes() - 1;

    auto z_at = [&](int m) {
        Field z = X1.states[m];
        simd::axpy(-1.0, X2.states[m], z);
        return z;
    };
    const Field z0 = z_at(m0);
    rep.z_t0_l2 = grid.l2(z0);
    if (rep.z_t0_l2 <= kDegenerateFloor) {
        rep.degenerate = true;  // coincident states: estimate trivial
        return rep;
    }
    const DiscreteOperator A0 = assemble_A(problem, X1.times[m0], grid);
    rep.quotient_t0 = energy(A0, z0, grid) / (rep.z_t0_l2 * rep.z_t0_l2);

    const Field zT = z_at(mT);
    rep.z_T_l2 = grid.l2(zT);
    const double logzT = std::log(std::max(rep.z_T_l2, 1e-300));

    double worst = -std::numeric_limits<double>::infinity();
    for (int m = m0; m <= mT; ++m) {
        const double lz = std::log(std::max(grid.l2(z_at(m)), 1e-300));
        worst = std::max(worst, lz - logzT);
    }
    // |z(t)| ≤ exp(γ·Q₀)|z(T)| for all t ⟺ γ·Q₀ ≥ worst
    rep.worst_margin = worst - constants.gamma_star * rep.quotient_t0;
    rep.fitted_gamma = std::max(0.0, worst) / rep.quotient_t0;
    rep.pass = rep.worst_margin <= 1e-12;
    rep.contrapositive_ok =
        rep.z_T_l2 >= std::exp(-rep.fitted_gamma * rep.quotient_t0) * rep.z_t0_l2 * (1.0 - 1e-12) &&
        rep.z_T_l2 > 0.0;
    return rep;
}

ConvexityReport log_convexity_probe(const QuotientTrace& trace) {
    ConvexityReport rep;
    double min_dd = std::numeric_limits<double>::infinity();
    double max_inc = -std::numeric_limits<double>::infinity();
    const int nodes = static_cast<int>(trace.times.size());
    for (int m = 1; m + 1 < nodes; ++m) {
        if (!trace.valid[m - 1] || !trace.valid[m] || !trace.valid[m + 1]) continue;
        const double dd =
            trace.log_l2sq[m + 1] - 2.0 * trace.log_l2sq[m] + trace.log_l2sq[m - 1];
        min_dd = std::min(min_dd, dd);
        rep.empty = false;
    }
    for (int m = 0; m + 1 < nodes; ++m) {
        if (!trace.valid[m] || !trace.valid[m + 1]) continue;
        max_inc = std::max(max_inc, trace.lambda[m + 1] - trace.lambda[m]);
    }
    if (!rep.empty) {
        rep.min_second_diff = min_dd;
        rep.max_lambda_increase = max_inc;
    }
    return rep;
}

}  // namespace logconvex
