#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "logconvex/errors.hpp"
#include "logconvex/simd.hpp"

namespace logconvex {

using Field = std::vector<double>;

/// Uniform grid of n interior nodes on (0,π), homogeneous Dirichlet ends.
/// Trapezoid quadrature degenerates to h·Σ over interior nodes for
/// integrands vanishing on the boundary.
struct Grid1D {
    int n = 0;
    double h = 0.0;
    std::vector<double> xi;

    static Grid1D interior(int n) {
        if (n < 8) throw ConfigError("grid.n must be >= 8, got " + std::to_string(n));
        Grid1D g;
        g.n = n;
        g.h = std::numbers::pi / (n + 1);
        g.xi.resize(n);
        for (int i = 0; i < n; ++i) g.xi[i] = (i + 1) * g.h;
        return g;
    }

    double inner(const Field& u, const Field& v) const {
        return h * simd::dot(u, v);
    }
    double l2sq(const Field& u) const { return h * simd::nrm2sq(u); }
    double l2(const Field& u) const { return std::sqrt(l2sq(u)); }

    Field sample(const std::function<double(double)>& f) const {
        Field out(n);
        for (int i = 0; i < n; ++i) out[i] = f(xi[i]);
        return out;
    }
};

}  // namespace logconvex
