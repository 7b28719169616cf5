#include "logconvex/control.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace logconvex {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Field potential_at(const ParabolicProblem& problem, const WienerField& field,
                   const Trajectory& ytilde, int m) {
    const Grid1D& grid = field.basis->grid;
    const WienerEval ev = eval_wiener(field, m);
    const double t = field.time(m);
    Field ew(grid.n), arg(grid.n), p(grid.n);
    simd::vexp(ev.w, ew);
    simd::mul(ew, ytilde.states[m], arg);
    for (int i = 0; i < grid.n; ++i) p[i] = problem.psi_r(t, grid.xi[i], arg[i]);
    return p;
}

}  // namespace

LinearizedFlow make_linearized_flow(const ParabolicProblem& problem,
                                    const WienerField& field) {
    if (!problem.psi_r_bounded)
        throw HypothesisError("linearized flow needs bounded psi_r; problem '" +
                              problem.name + "' declares it unbounded");
    LinearizedFlow flow;
    flow.problem = problem;
    flow.field = field;
    const Field zero(field.basis->grid.n, 0.0);
    const Trajectory ytilde = solve_random_pde(problem, field, zero);
    const int steps = field.steps();
    flow.potential.resize(steps);
    for (int m = 0; m < steps; ++m)
        flow.potential[m] = potential_at(problem, field, ytilde, m);
    return flow;
}

Field apply_forward(const LinearizedFlow& flow, const Field& u) {
    const auto& potential = flow.potential;
    return solve_linear_potential(flow.problem, flow.field, u,
                                  [&](int m) { return potential[m]; })
        .terminal();
}

Field apply_adjoint(const LinearizedFlow& flow, const Field& p) {
    const ParabolicProblem& problem = flow.problem;
    const WienerField& field = flow.field;
    const Grid1D& grid = field.basis->grid;
    const int steps = field.steps();

    // reverse-order transposes of the forward steps
    // forward:  v⁺ = (I+dtA₊)⁻¹ (I − dt·B − dt·diag(P)) v
    // adjoint:  w ← (I − dt·Bᵀ − dt·diag(P)) (I+dtA₊)⁻¹ w
    Field w = p, tmp(grid.n), btw(grid.n);
    for (int m = steps - 1; m >= 0; --m) {
        const double t = field.time(m);
        const double dt = field.time(m + 1) - t;
        const DiscreteOperator A = assemble_A(problem, field.time(m + 1), grid);
        TridiagSolver solver(A.matrix, dt);
        solver.solve(w, tmp);

        const RescaledCoefficients rc = rescaled_coefficients(problem, field, m);
        const DiscreteOperator B = assemble_B(rc, grid);
        B.matrix.apply_transpose(tmp, btw);
        w = tmp;
        simd::axpy(-dt, btw, w);
        for (int i = 0; i < grid.n; ++i) w[i] -= dt * flow.potential[m][i] * tmp[i];
    }
    return w;
}

Field apply_adjoint_discretized(const LinearizedFlow& flow, const Field& p) {
    const ParabolicProblem& problem = flow.problem;
    const WienerField& field = flow.field;
    const Grid1D& grid = field.basis->grid;
    const int steps = field.steps();
    const double h = grid.h;

    // independent backward integration of dz/dt − A z − B*z − P z = 0 with
    // B*z = a₀ z − ∂ξ(a₁ z) discretized centered; O(dt + h²) agreement only
    Field z = p, rhs(grid.n), znew(grid.n);
    for (int m = steps - 1; m >= 0; --m) {
        const double dt = field.time(m + 1) - field.time(m);
        const RescaledCoefficients rc = rescaled_coefficients(problem, field, m + 1);
        rhs = z;
        for (int i = 0; i < grid.n; ++i) {
            const double zl = (i > 0) ? z[i - 1] : 0.0;
            const double zr = (i + 1 < grid.n) ? z[i + 1] : 0.0;
            const double al = (i > 0) ? rc.a1[i - 1] : 0.0;
            const double ar = (i + 1 < grid.n) ? rc.a1[i + 1] : 0.0;
            const double bstar = rc.a0[i] * z[i] - (ar * zr - al * zl) / (2.0 * h);
            const double pm1 = (m + 1 <= steps - 1) ? flow.potential[m + 1][i]
                                                    : flow.potential[steps - 1][i];
            rhs[i] -= dt * (bstar + pm1 * z[i]);
        }
        const DiscreteOperator A = assemble_A(problem, field.time(m), grid);
        TridiagSolver solver(A.matrix, dt);
        solver.solve(rhs, znew);
        z = znew;
    }
    return z;
}

std::vector<double> assemble_flow_matrix(const LinearizedFlow& flow) {
    const int n = flow.state_dim();
    if (n > 256)
        throw ConfigError("flow matrix assembly is capped at n=256 "
                          "(use matrix-free duality checks beyond that)");
    std::vector<double> mat(static_cast<std::size_t>(n) * n, 0.0);
    Field unit(n, 0.0);
    for (int j = 0; j < n; ++j) {
        unit.assign(n, 0.0);
        unit[j] = 1.0;
        const Field col = apply_forward(flow, unit);
        for (int i = 0; i < n; ++i) mat[static_cast<std::size_t>(i) * n + j] = col[i];
    }
    return mat;
}

InjectivityReport injectivity_check(const std::vector<double>& flow_matrix, int n) {
    Eigen::Map<const RowMat> G(flow_matrix.data(), n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
    InjectivityReport rep;
    rep.sigma_min = svd.singularValues()(n - 1);
    rep.sigma_max = svd.singularValues()(0);
    rep.pass = rep.sigma_min > 0.0;
    return rep;
}

ReachabilityReport approx_reach(const ParabolicProblem& problem, const WienerField& field,
                                const Field& target, double reg) {
    if (reg < 0.0) throw ConfigError("control.reg must be >= 0");
    const Grid1D& grid = field.basis->grid;
    const int n = grid.n;

    const LinearizedFlow flow = make_linearized_flow(problem, field);
    const std::vector<double> mat = assemble_flow_matrix(flow);
    Eigen::Map<const RowMat> G(mat.data(), n, n);

    const Field zero(n, 0.0);
    const Field base = solve_random_pde(problem, field, zero).terminal();
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = target[i] - base[i];

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const Eigen::VectorXd utd = svd.matrixU().transpose() * d;

    ReachabilityReport rep;
    rep.truncated_modes = 0;
    Eigen::VectorXd coef(n);
    const double floor = n * std::numeric_limits<double>::epsilon() * sv(0);
    for (int k = 0; k < n; ++k) {
        const double s = sv(k);
        if (reg == 0.0 && s <= floor) {
            coef(k) = 0.0;  // pseudo-inverse truncation
            ++rep.truncated_modes;
        } else {
            coef(k) = s / (s * s + reg) * utd(k);
        }
    }
    const Eigen::VectorXd x = svd.matrixV() * coef;

    rep.controller.assign(n, 0.0);
    for (int i = 0; i < n; ++i) rep.controller[i] = x(i);
    rep.controller_norm = grid.l2(rep.controller);

    const Eigen::VectorXd res = G * x - d;
    Field resf(n);
    for (int i = 0; i < n; ++i) resf[i] = res(i);
    rep.linear_residual = grid.l2(resf);

    const Field yT = solve_random_pde(problem, field, rep.controller).terminal();
    Field diff(n);
    for (int i = 0; i < n; ++i) diff[i] = yT[i] - target[i];
    rep.achieved_distance = grid.l2(diff);
    return rep;
}

}  // namespace logconvex
