#include "logconvex/parabolic.hpp"

#include <cmath>

namespace logconvex {

namespace {

constexpr double kBlowupFloor = 1e12;

bool a_is_autonomous(const ParabolicProblem& p) {
    // library problems carry analytic ∂t a; treat identically-zero ∂t a
    // (probed at a few points) as autonomous so A factors once
    for (double t : {0.0, 0.37, 1.0})
        for (double xi : {0.5, 1.5, 2.5})
            if (p.a_t(t, xi) != 0.0) return false;
    return true;
}

struct ImexWorkspace {
    const ParabolicProblem& problem;
    const WienerField& field;
    const Grid1D& grid;
    bool autonomous;
    DiscreteOperator a_cached;
    TridiagSolver solver_cached;
    double dt_cached = -1.0;

    explicit ImexWorkspace(const ParabolicProblem& p, const WienerField& f)
        : problem(p), field(f), grid(f.basis->grid), autonomous(a_is_autonomous(p)) {}

    const DiscreteOperator& A_at(double t) {
        if (!autonomous) {
            a_cached = assemble_A(problem, t, grid);
        } else if (a_cached.matrix.n == 0) {
            a_cached = assemble_A(problem, 0.0, grid);
        }
        return a_cached;
    }

    const TridiagSolver& solver_at(double t, double dt) {
        if (!autonomous || dt != dt_cached) {
            solver_cached = TridiagSolver(A_at(t).matrix, dt);
            dt_cached = autonomous ? dt : -1.0;
        }
        return solver_cached;
    }
};

// explicit reaction term at node m: out = callback(y_m)
using Reaction = std::function<void(int node, double t, const WienerEval& ev,
                                    const Field& y, Field& out)>;

Trajectory integrate_imex(const ParabolicProblem& problem, const WienerField& field,
                          const Field& x, const SchemeParams& params,
                          const Reaction& reaction) {
    ImexWorkspace ws(problem, field);
    const Grid1D& grid = ws.grid;
    if (static_cast<int>(x.size()) != grid.n)
        throw ConfigError("initial state has wrong grid size");
    const int steps = field.steps();
    const Field zero_mu(grid.n, 0.0);

    Trajectory traj;
    traj.times = field.paths.times;
    traj.states.reserve(steps + 1);
    traj.l2.reserve(steps + 1);
    traj.h1.reserve(steps + 1);
    traj.states.push_back(x);
    traj.l2.push_back(grid.l2(x));
    traj.h1.push_back(std::sqrt(std::max(0.0, energy(ws.A_at(0.0), x, grid))));

    Field rhs(grid.n), by(grid.n), b1(grid.n), ynext(grid.n);
    for (int m = 0; m < steps; ++m) {
        const double t = field.time(m);
        const double dt = field.time(m + 1) - t;
        const Field& y = traj.states.back();

        const WienerEval ev = eval_wiener(field, m);
        const RescaledCoefficients rc = rescaled_coefficients_at(
            problem, grid, ev, params.omit_ito_correction ? zero_mu : field.ito_mu, t);
        if (!params.skip_cfl_check) {
            const double a1max = simd::max_abs(rc.a1);
            if (dt * a1max > grid.h)
                throw NumericError("advective stability bound dt <= h/max|a1| violated", m);
        }
        const DiscreteOperator B = assemble_B(rc, grid, params.upwind);

        B.matrix.apply(y, by);
        reaction(m, t, ev, y, b1);
        rhs = y;
        simd::axpy(-dt, by, rhs);
        simd::axpy(-dt, b1, rhs);

        ws.solver_at(field.time(m + 1), dt).solve(rhs, ynext);

        const double nrm = grid.l2(ynext);
        if (!(nrm < kBlowupFloor)) throw NumericError("state norm blow-up", m);
        traj.states.push_back(ynext);
        traj.l2.push_back(nrm);
        traj.h1.push_back(
            std::sqrt(std::max(0.0, energy(ws.A_at(field.time(m + 1)), ynext, grid))));
    }
    return traj;
}

}  // namespace

Trajectory solve_random_pde(const ParabolicProblem& problem, const WienerField& field,
                            const Field& x, const SchemeParams& params) {
    const Grid1D& grid = field.basis->grid;
    Field ew(grid.n), arg(grid.n);
    Reaction reaction = [&](int, double t, const WienerEval& ev, const Field& y,
                            Field& out) {
        // e^{−W} ψ(t, ξ, e^{W} y)
        simd::vexp(ev.w, ew);
        simd::mul(ew, y, arg);
        out.resize(grid.n);
        for (int i = 0; i < grid.n; ++i)
            out[i] = problem.psi(t, grid.xi[i], arg[i]) / ew[i];
    };
    return integrate_imex(problem, field, x, params, reaction);
}

Trajectory solve_linear_potential(const ParabolicProblem& problem, const WienerField& field,
                                  const Field& x,
                                  const std::function<Field(int node)>& potential,
                                  const SchemeParams& params) {
    Reaction reaction = [&](int m, double, const WienerEval&, const Field& y, Field& out) {
        const Field p = potential(m);
        out.resize(y.size());
        simd::mul(p, y, out);
    };
    return integrate_imex(problem, field, x, params, reaction);
}

Trajectory transform_to_spde(const Trajectory& y, const ParabolicProblem& problem,
                             const WienerField& field, double sign) {
    const Grid1D& grid = field.basis->grid;
    if (y.nodes() != field.steps() + 1)
        throw ConfigError("trajectory/path time grids differ");
    Trajectory X;
    X.times = y.times;
    X.states.resize(y.nodes());
    X.l2.resize(y.nodes());
    X.h1.resize(y.nodes());
    for (int m = 0; m < y.nodes(); ++m) {
        const WienerEval ev = eval_wiener(field, m);
        X.states[m].resize(grid.n);
        simd::exp_scale(sign, ev.w, y.states[m], X.states[m]);
        X.l2[m] = grid.l2(X.states[m]);
        const DiscreteOperator A = assemble_A(problem, y.times[m], grid);
        X.h1[m] = std::sqrt(std::max(0.0, energy(A, X.states[m], grid)));
    }
    return X;
}

Field wiener_increment_field(const WienerField& field, int node) {
    const auto& b = *field.basis;
    Field dw(b.grid.n, 0.0);
    for (int j = 0; j < b.modes; ++j) {
        const double c = field.spec->mu[j] * field.paths.increment(j, node);
        if (c != 0.0) simd::axpy(c, b.e[j], dw);
    }
    return dw;
}

Trajectory solve_spde_direct(const ParabolicProblem& problem, const WienerField& field,
                             const Field& x, const SchemeParams& params) {
    const Grid1D& grid = field.basis->grid;
    if (static_cast<int>(x.size()) != grid.n)
        throw ConfigError("initial state has wrong grid size");
    const int steps = field.steps();
    const double h = grid.h;

    Trajectory traj;
    traj.times = field.paths.times;
    traj.states.push_back(x);
    traj.l2.push_back(grid.l2(x));
    {
        const DiscreteOperator A0 = assemble_A(problem, 0.0, grid);
        traj.h1.push_back(std::sqrt(std::max(0.0, energy(A0, x, grid))));
    }

    Field rhs(grid.n), xnext(grid.n);
    for (int m = 0; m < steps; ++m) {
        const double t = field.time(m);
        const double dt = field.time(m + 1) - t;
        const Field& X = traj.states.back();
        const Field dW = wiener_increment_field(field, m);

        // explicit part: −dt·(b·∇X + ψ(t,·,X)) + X∘ΔW, diffusion implicit
        rhs = X;
        for (int i = 0; i < grid.n; ++i) {
            const double bx = problem.b(t, grid.xi[i]);
            double grad = 0.0;
            if (bx != 0.0) {
                const double xl = (i > 0) ? X[i - 1] : 0.0;
                const double xr = (i + 1 < grid.n) ? X[i + 1] : 0.0;
                grad = (xr - xl) / (2.0 * h);
            }
            rhs[i] += -dt * (bx * grad + problem.psi(t, grid.xi[i], X[i])) + X[i] * dW[i];
        }

        const DiscreteOperator A = assemble_A(problem, field.time(m + 1), grid);
        TridiagSolver solver(A.matrix, dt);
        solver.solve(rhs, xnext);

        const double nrm = grid.l2(xnext);
        if (!(nrm < kBlowupFloor)) throw NumericError("state norm blow-up", m);
        traj.states.push_back(xnext);
        traj.l2.push_back(nrm);
        traj.h1.push_back(std::sqrt(std::max(0.0, energy(A, xnext, grid))));
    }
    (void)params;
    return traj;
}

}  // namespace logconvex
