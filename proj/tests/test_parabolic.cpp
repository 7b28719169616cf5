#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "logconvex/parabolic.hpp"

using namespace logconvex;

namespace {

struct Lab {
    Grid1D grid;
    std::shared_ptr<const OrthonormalBasis> basis;
    std::shared_ptr<const NoiseSpec> spec;

    Lab(int n, int J, double sigma) : grid(Grid1D::interior(n)) {
        basis = std::make_shared<OrthonormalBasis>(build_basis(grid, J));
        spec = std::make_shared<NoiseSpec>(NoiseSpec::power_law(J, sigma, 2.0));
    }

    WienerField field(double dt, double T, std::uint64_t seed) const {
        return make_wiener_field(basis, spec,
                                 uniform_times(dt, static_cast<int>(std::lround(T / dt))),
                                 seed);
    }

    Field sine(int k, double amp = 1.0) const {
        Field f(grid.n);
        for (int i = 0; i < grid.n; ++i) f[i] = amp * std::sin(k * grid.xi[i]);
        return f;
    }
};

}  // namespace

TEST_CASE("rescaled solver: heat semigroup on the first eigenmode") {
    Lab lab(128, 1, 0.0);
    const WienerField f = lab.field(1e-3, 1.0, 1);
    const ParabolicProblem heat = make_problem("heat");
    const Trajectory y = solve_random_pde(heat, f, lab.sine(1));
    double worst = 0.0;
    const int last = y.nodes() - 1;
    for (int i = 0; i < lab.grid.n; ++i)
        worst = std::max(worst, std::fabs(y.states[last][i] -
                                          std::exp(-1.0) * std::sin(lab.grid.xi[i])));
    CHECK(worst <= 2.0 * (1e-3 + lab.grid.h * lab.grid.h));
}

TEST_CASE("rescaled solver: zero datum stays zero (cubic)") {
    Lab lab(64, 2, 0.3);
    const WienerField f = lab.field(1e-3, 0.3, 7);
    const Trajectory y = solve_random_pde(make_problem("cubic"), f, Field(lab.grid.n, 0.0));
    for (const auto& state : y.states)
        for (double v : state) CHECK(v == 0.0);
}

TEST_CASE("rescaled solver: second eigenmode decay within 1%") {
    Lab lab(128, 1, 0.0);
    const WienerField f = lab.field(1e-3, 1.0, 1);
    const Trajectory y = solve_random_pde(make_problem("heat"), f, lab.sine(2));
    const double ratio = y.l2.back() / y.l2.front();
    CHECK(std::fabs(ratio - std::exp(-4.0)) <= 0.01 * std::exp(-4.0));
}

TEST_CASE("trajectory caches match recomputation") {
    Lab lab(64, 2, 0.25);
    const WienerField f = lab.field(1e-3, 0.2, 11);
    const ParabolicProblem p = make_problem("vardiff");
    const Trajectory y = solve_random_pde(p, f, lab.sine(1));
    for (int m : {0, 57, y.nodes() - 1}) {
        CHECK(y.l2[m] == doctest::Approx(lab.grid.l2(y.states[m])).epsilon(1e-12));
        const DiscreteOperator A = assemble_A(p, y.times[m], lab.grid);
        CHECK(y.h1[m] ==
              doctest::Approx(std::sqrt(energy(A, y.states[m], lab.grid))).epsilon(1e-12));
    }
}

TEST_CASE("transform: identity at W == 0 and exact involution") {
    Lab lab(48, 2, 0.4);
    const ParabolicProblem heat = make_problem("heat");
    {
        Lab quiet(48, 2, 0.0);
        const WienerField f0 = quiet.field(1e-2, 0.1, 3);
        const Trajectory y = solve_random_pde(heat, f0, quiet.sine(1));
        const Trajectory X = transform_to_spde(y, heat, f0);
        for (int m = 0; m < y.nodes(); ++m)
            for (int i = 0; i < quiet.grid.n; ++i) CHECK(X.states[m][i] == y.states[m][i]);
    }
    {
        const WienerField f = lab.field(1e-2, 0.1, 3);
        const Trajectory y = solve_random_pde(heat, f, lab.sine(1));
        const Trajectory X = transform_to_spde(y, heat, f, 1.0);
        const Trajectory back = transform_to_spde(X, heat, f, -1.0);
        for (int m = 0; m < y.nodes(); ++m)
            for (int i = 0; i < lab.grid.n; ++i)
                CHECK(back.states[m][i] ==
                      doctest::Approx(y.states[m][i]).epsilon(1e-15));
    }
}

TEST_CASE("direct solver coincides with rescaled route when W == 0") {
    Lab lab(64, 1, 0.0);
    const WienerField f = lab.field(1e-3, 0.5, 5);
    const ParabolicProblem heat = make_problem("heat");
    const Field x = lab.sine(1);
    const Trajectory y = solve_random_pde(heat, f, x);
    const Trajectory X = solve_spde_direct(heat, f, x);
    for (int i = 0; i < lab.grid.n; ++i)
        CHECK(X.terminal()[i] == doctest::Approx(y.terminal()[i]).epsilon(1e-12));
}

TEST_CASE("direct solver: zero datum fixed point") {
    Lab lab(48, 2, 0.3);
    const WienerField f = lab.field(1e-3, 0.2, 9);
    const Trajectory X = solve_spde_direct(make_problem("cubic"), f, Field(lab.grid.n, 0.0));
    for (double v : X.terminal()) CHECK(v == 0.0);
}

TEST_CASE("route discrepancy shrinks at strong order >= ~1/2; Ito mutation breaks it") {
    Lab lab(64, 2, 0.2);
    const ParabolicProblem heat = make_problem("heat");
    const Field x = lab.sine(1);
    const int levels = 3;
    std::vector<double> dts = {2e-3, 1e-3, 5e-4};
    std::vector<double> err(levels, 0.0), err_mut(levels, 0.0);
    const int nseeds = 3;
    for (int sd = 0; sd < nseeds; ++sd) {
        const WienerField fine = lab.field(5e-4, 0.5, 100 + sd);
        for (int l = 0; l < levels; ++l) {
            WienerField f = fine;
            f.paths = fine.paths.coarsen(1 << (levels - 1 - l));
            const WienerEval evT = eval_wiener(f, f.steps());
            const Trajectory direct = solve_spde_direct(heat, f, x);

            const Trajectory y = solve_random_pde(heat, f, x);
            Field xr(lab.grid.n);
            simd::exp_scale(1.0, evT.w, y.terminal(), xr);
            simd::axpy(-1.0, direct.terminal(), xr);
            err[l] += lab.grid.l2(xr) / direct.l2.back() / nseeds;

            SchemeParams mut;
            mut.omit_ito_correction = true;
            const Trajectory ym = solve_random_pde(heat, f, x, mut);
            Field xm(lab.grid.n);
            simd::exp_scale(1.0, evT.w, ym.terminal(), xm);
            simd::axpy(-1.0, direct.terminal(), xm);
            err_mut[l] += lab.grid.l2(xm) / direct.l2.back() / nseeds;
        }
    }
    // refinement halves dt twice: fitted slope from endpoints
    const double order = std::log(err[0] / err[2]) / std::log(dts[0] / dts[2]);
    const double order_mut = std::log(err_mut[0] / err_mut[2]) / std::log(dts[0] / dts[2]);
    CHECK(order >= 0.3);
    CHECK(order_mut < 0.25);
    CHECK(err_mut[2] > 5.0 * err[2]);  // the missing correction dominates
}

TEST_CASE("superposition for psi == 0 under noise") {
    Lab lab(48, 2, 0.3);
    const WienerField f = lab.field(1e-3, 0.25, 21);
    const ParabolicProblem heat = make_problem("heat");
    const Field x1 = lab.sine(1), x2 = lab.sine(3, -0.4);
    Field xsum = x1;
    simd::axpy(1.0, x2, xsum);
    const Trajectory ya = solve_random_pde(heat, f, x1);
    const Trajectory yb = solve_random_pde(heat, f, x2);
    const Trajectory yc = solve_random_pde(heat, f, xsum);
    for (int i = 0; i < lab.grid.n; ++i)
        CHECK(yc.terminal()[i] ==
              doctest::Approx(ya.terminal()[i] + yb.terminal()[i]).epsilon(1e-12));
}

TEST_CASE("deterministic decay: |y| nonincreasing for monotone psi, W == 0") {
    Lab lab(64, 1, 0.0);
    const WienerField f = lab.field(1e-3, 0.5, 2);
    const Trajectory y = solve_random_pde(make_problem("cubic"), f, lab.sine(1, 1.5));
    for (int m = 0; m + 1 < y.nodes(); ++m) CHECK(y.l2[m + 1] <= y.l2[m] * (1.0 + 1e-14));
}

TEST_CASE("discrete energy identity for the heat problem") {
    Lab lab(64, 1, 0.0);
    const double dt = 1e-3;
    const WienerField f = lab.field(dt, 0.1, 2);
    const ParabolicProblem heat = make_problem("heat");
    const Trajectory y = solve_random_pde(heat, f, lab.sine(1));
    const DiscreteOperator A = assemble_A(heat, 0.0, lab.grid);
    for (int m = 0; m + 1 < y.nodes(); m += 13) {
        const double lhs = (y.l2[m + 1] * y.l2[m + 1] - y.l2[m] * y.l2[m]) / dt;
        const double rhs = -2.0 * energy(A, y.states[m + 1], lab.grid);
        CHECK(std::fabs(lhs - rhs) <= 5.0 * dt * y.l2[m] * y.l2[m] + 1e-12);
    }
}

TEST_CASE("determinism: same seed gives bit-identical trajectories") {
    Lab lab(48, 3, 0.35);
    const WienerField f1 = lab.field(1e-3, 0.2, 77);
    const WienerField f2 = lab.field(1e-3, 0.2, 77);
    const Trajectory a = solve_random_pde(make_problem("cubic"), f1, lab.sine(1));
    const Trajectory b = solve_random_pde(make_problem("cubic"), f2, lab.sine(1));
    for (int m = 0; m < a.nodes(); ++m)
        for (int i = 0; i < lab.grid.n; ++i) CHECK(a.states[m][i] == b.states[m][i]);
}

TEST_CASE("advective CFL guard") {
    // an absurd path amplitude drives a1 past the stability bound
    Lab lab(32, 1, 80.0);
    const WienerField f = lab.field(5e-2, 0.5, 4);
    CHECK_THROWS_AS(solve_random_pde(make_problem("heat"), f, lab.sine(1)), NumericError);
}
