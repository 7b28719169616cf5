#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "logconvex/operators.hpp"

using namespace logconvex;

TEST_CASE("assemble_A: symmetry") {
    const Grid1D grid = Grid1D::interior(64);
    const DiscreteOperator A = assemble_A(make_problem("vardiff"), 0.7, grid);
    CHECK(A.matrix.max_asymmetry() <= 1e-12);
}

TEST_CASE("assemble_A: discrete Laplacian spectrum at n=128") {
    const Grid1D grid = Grid1D::interior(128);
    const DiscreteOperator A = assemble_A(make_problem("heat"), 0.0, grid);
    // z = sin(k xi) is an exact eigenvector with value (2/h^2)(1-cos kh)
    for (int k : {1, 2, 5}) {
        Field z(grid.n);
        for (int i = 0; i < grid.n; ++i) z[i] = std::sin(k * grid.xi[i]);
        const Field az = A.matrix.apply(z);
        const double lam = 2.0 / (grid.h * grid.h) * (1.0 - std::cos(k * grid.h));
        for (int i = 0; i < grid.n; ++i)
            CHECK(az[i] == doctest::Approx(lam * z[i]).epsilon(1e-9));
        CHECK(std::fabs(lam - k * k) <= 1e-3 * k * k * k * k);
    }
    // smallest eigenvalue within 1e-3 of 1
    const double lam1 = 2.0 / (grid.h * grid.h) * (1.0 - std::cos(grid.h));
    CHECK(std::fabs(lam1 - 1.0) <= 1e-3);
}

TEST_CASE("assemble_A: Rayleigh quotient of the first eigenmode") {
    const Grid1D grid = Grid1D::interior(128);
    const DiscreteOperator A = assemble_A(make_problem("heat"), 0.0, grid);
    Field z(grid.n);
    for (int i = 0; i < grid.n; ++i) z[i] = std::sin(grid.xi[i]);
    const double q = energy(A, z, grid) / grid.l2sq(z);
    CHECK(q == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("assemble_A: coercivity and boundedness on a probe set") {
    const Grid1D grid = Grid1D::interior(64);
    const DiscreteOperator A = assemble_A(make_problem("vardiff"), 0.9, grid);
    for (int k : {1, 3, 7}) {
        Field z(grid.n);
        for (int i = 0; i < grid.n; ++i) z[i] = std::sin(k * grid.xi[i]);
        const double e = energy(A, z, grid);
        // discrete H1 seminorm over all faces (Dirichlet ends)
        double h1 = 0.0;
        for (int i = 0; i <= grid.n; ++i) {
            const double zl = (i > 0) ? z[i - 1] : 0.0;
            const double zr = (i < grid.n) ? z[i] : 0.0;
            h1 += (zr - zl) * (zr - zl);
        }
        h1 /= grid.h;
        CHECK(e >= 1.0 * h1 * (1.0 - 1e-10));   // ellipticity constant 1
        CHECK(e <= 1.45 * h1 * (1.0 + 1e-10));  // sup a = 1 + t/2 at t = 0.9
    }
}

TEST_CASE("assemble_A: nonpositive diffusion rejected") {
    const Grid1D grid = Grid1D::interior(16);
    ParabolicProblem bad = make_problem("heat");
    bad.a = [](double, double xi) { return xi < 1.0 ? -1.0 : 1.0; };
    CHECK_THROWS_AS(assemble_A(bad, 0.0, grid), HypothesisError);
}

TEST_CASE("assemble_B: zero, identity, centered derivative") {
    const Grid1D grid = Grid1D::interior(128);
    RescaledCoefficients rc;
    rc.a0.assign(grid.n, 0.0);
    rc.a1.assign(grid.n, 0.0);
    Field z(grid.n);
    for (int i = 0; i < grid.n; ++i) z[i] = std::sin(grid.xi[i]);

    {  // zero operator
        const DiscreteOperator B = assemble_B(rc, grid);
        for (double v : B.matrix.apply(z)) CHECK(v == 0.0);
    }
    {  // pure multiplication
        rc.a0.assign(grid.n, 1.0);
        const DiscreteOperator B = assemble_B(rc, grid);
        const Field bz = B.matrix.apply(z);
        for (int i = 0; i < grid.n; ++i) CHECK(bz[i] == z[i]);
    }
    {  // first derivative, O(h^2) centered
        rc.a0.assign(grid.n, 0.0);
        rc.a1.assign(grid.n, 1.0);
        const DiscreteOperator B = assemble_B(rc, grid);
        const Field bz = B.matrix.apply(z);
        double worst = 0.0;
        for (int i = 1; i + 1 < grid.n; ++i)
            worst = std::max(worst, std::fabs(bz[i] - std::cos(grid.xi[i])));
        CHECK(worst <= grid.h * grid.h);
    }
}

TEST_CASE("transpose matches continuum adjoint for centered advection") {
    const Grid1D grid = Grid1D::interior(32);
    RescaledCoefficients rc;
    rc.a0.resize(grid.n);
    rc.a1.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        rc.a0[i] = std::cos(grid.xi[i]);
        rc.a1[i] = 0.5 + 0.3 * std::sin(grid.xi[i]);
    }
    const DiscreteOperator B = assemble_B(rc, grid);
    Field w(grid.n);
    for (int i = 0; i < grid.n; ++i) w[i] = std::sin(2.0 * grid.xi[i]);
    Field bt;
    B.matrix.apply_transpose(w, bt);
    // continuum adjoint discretized: a0 w - D(a1 w) centered
    for (int i = 0; i < grid.n; ++i) {
        const double wl = (i > 0) ? rc.a1[i - 1] * w[i - 1] : 0.0;
        const double wr = (i + 1 < grid.n) ? rc.a1[i + 1] * w[i + 1] : 0.0;
        const double expect = rc.a0[i] * w[i] - (wr - wl) / (2.0 * grid.h);
        CHECK(bt[i] == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("upwind advection keeps first-order accuracy") {
    const Grid1D grid = Grid1D::interior(256);
    RescaledCoefficients rc;
    rc.a0.assign(grid.n, 0.0);
    rc.a1.assign(grid.n, 1.0);
    const DiscreteOperator B = assemble_B(rc, grid, true);
    Field z(grid.n);
    for (int i = 0; i < grid.n; ++i) z[i] = std::sin(grid.xi[i]);
    const Field bz = B.matrix.apply(z);
    double worst = 0.0;
    for (int i = 1; i + 1 < grid.n; ++i)
        worst = std::max(worst, std::fabs(bz[i] - std::cos(grid.xi[i])));
    CHECK(worst <= grid.h);
    CHECK(worst > grid.h * grid.h);  // genuinely first order
}

TEST_CASE("thomas solver: residual at round-off") {
    const Grid1D grid = Grid1D::interior(64);
    const DiscreteOperator A = assemble_A(make_problem("heat"), 0.0, grid);
    const double dt = 1e-3;
    const TridiagSolver solver(A.matrix, dt);
    Field rhs(grid.n);
    for (int i = 0; i < grid.n; ++i) rhs[i] = std::cos(3.0 * grid.xi[i]);
    Field x;
    solver.solve(rhs, x);
    const Field ax = A.matrix.apply(x);
    for (int i = 0; i < grid.n; ++i)
        CHECK(x[i] + dt * ax[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
}
