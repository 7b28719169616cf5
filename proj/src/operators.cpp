#include "logconvex/operators.hpp"

#include <cmath>

namespace logconvex {

void Tridiag::apply(const Field& x, Field& out) const {
    out.resize(n);
    for (int i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) v += lower[i] * x[i - 1];
        if (i + 1 < n) v += upper[i] * x[i + 1];
        out[i] = v;
    }
}

Field Tridiag::apply(const Field& x) const {
    Field out;
    apply(x, out);
    return out;
}

void Tridiag::apply_transpose(const Field& x, Field& out) const {
    out.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        out[i] += diag[i] * x[i];
        if (i > 0) out[i - 1] += lower[i] * x[i];
        if (i + 1 < n) out[i + 1] += upper[i] * x[i];
    }
}

double Tridiag::max_asymmetry() const {
    double m = 0.0;
    for (int i = 0; i + 1 < n; ++i) m = std::max(m, std::fabs(upper[i] - lower[i + 1]));
    return m;
}

Tridiag Tridiag::transposed() const {
    Tridiag t;
    t.n = n;
    t.lower.assign(n, 0.0);
    t.diag = diag;
    t.upper.assign(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        t.lower[i + 1] = upper[i];
        t.upper[i] = lower[i + 1];
    }
    return t;
}

TridiagSolver::TridiagSolver(const Tridiag& t, double c) : n(t.n) {
    dprime.resize(n);
    uprime.resize(n);
    lower_.resize(n);
    for (int i = 0; i < n; ++i) {
        lower_[i] = (i > 0) ? c * t.lower[i] : 0.0;
        uprime[i] = (i + 1 < n) ? c * t.upper[i] : 0.0;
        dprime[i] = 1.0 + c * t.diag[i];
    }
    // in-place LU factor (Thomas)
    for (int i = 1; i < n; ++i) {
        if (dprime[i - 1] == 0.0)
            throw NumericError("tridiagonal solve: zero pivot", i - 1);
        const double m = lower_[i] / dprime[i - 1];
        lower_[i] = m;
        dprime[i] -= m * uprime[i - 1];
    }
    if (dprime[n - 1] == 0.0) throw NumericError("tridiagonal solve: zero pivot", n - 1);
}

void TridiagSolver::solve(const Field& rhs, Field& x) const {
    x = rhs;
    for (int i = 1; i < n; ++i) x[i] -= lower_[i] * x[i - 1];
    x[n - 1] /= dprime[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (x[i] - uprime[i] * x[i + 1]) / dprime[i];
}

DiscreteOperator assemble_A(const ParabolicProblem& problem, double t, const Grid1D& grid) {
    const int n = grid.n;
    const double h = grid.h;
    DiscreteOperator op;
    op.t = t;
    op.matrix.n = n;
    op.matrix.lower.assign(n, 0.0);
    op.matrix.diag.assign(n, 0.0);
    op.matrix.upper.assign(n, 0.0);
    // faces at ξ_{i±1/2}, including the two boundary faces
    std::vector<double> aface(n + 1);
    for (int f = 0; f <= n; ++f) {
        const double xl = f * h;        // node to the left (0 = boundary)
        const double xr = (f + 1) * h;  // node to the right (n+1 = boundary)
        const double af = 0.5 * (problem.a(t, xl) + problem.a(t, xr));
        if (!(af > 0.0))
            throw HypothesisError("assemble_A: nonpositive diffusion at face " +
                                  std::to_string(f) + " (ellipticity violated)");
        aface[f] = af;
    }
    const double ih2 = 1.0 / (h * h);
    for (int i = 0; i < n; ++i) {
        op.matrix.diag[i] = (aface[i] + aface[i + 1]) * ih2;
        if (i > 0) op.matrix.lower[i] = -aface[i] * ih2;
        if (i + 1 < n) op.matrix.upper[i] = -aface[i + 1] * ih2;
    }
    return op;
}

DiscreteOperator assemble_B(const RescaledCoefficients& rc, const Grid1D& grid,
                            bool upwind) {
    const int n = grid.n;
    const double h = grid.h;
    DiscreteOperator op;
    op.matrix.n = n;
    op.matrix.lower.assign(n, 0.0);
    op.matrix.diag.assign(n, 0.0);
    op.matrix.upper.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        op.matrix.diag[i] = rc.a0[i];
        const double c = rc.a1[i];
        if (!upwind) {
            if (i > 0) op.matrix.lower[i] -= c / (2.0 * h);
            if (i + 1 < n) op.matrix.upper[i] += c / (2.0 * h);
        } else if (c >= 0.0) {  // flow to the right: backward difference
            op.matrix.diag[i] += c / h;
            if (i > 0) op.matrix.lower[i] -= c / h;
        } else {  // forward difference
            op.matrix.diag[i] -= c / h;
            if (i + 1 < n) op.matrix.upper[i] += c / h;
        }
    }
    return op;
}

double energy(const DiscreteOperator& A, const Field& z, const Grid1D& grid) {
    Field az;
    A.matrix.apply(z, az);
    return grid.inner(az, z);
}

}  // namespace logconvex
