#include "logconvex/noise.hpp"

#include <cmath>

#include "logconvex/rng.hpp"

namespace logconvex {

double OrthonormalBasis::orthonormality_defect() const {
    double worst = 0.0;
    for (int i = 0; i < modes; ++i)
        for (int j = i; j < modes; ++j) {
            const double g = grid.inner(e[i], e[j]) - (i == j ? 1.0 : 0.0);
            worst = std::max(worst, std::fabs(g));
        }
    return worst;
}

OrthonormalBasis build_basis(const Grid1D& grid, int modes) {
    if (modes < 1) throw ConfigError("noise.J must be >= 1");
    if (grid.n < 4 * modes)
        throw ConfigError("grid too coarse for mode count: n=" + std::to_string(grid.n) +
                          " < 4*J=" + std::to_string(4 * modes));
    OrthonormalBasis b;
    b.grid = grid;
    b.modes = modes;
    const double amp = std::sqrt(2.0 / std::numbers::pi);
    b.e.resize(modes);
    b.de.resize(modes);
    b.d2e.resize(modes);
    b.c2b_norm.resize(modes);
    for (int j = 0; j < modes; ++j) {
        const double k = j + 1;
        b.e[j].resize(grid.n);
        b.de[j].resize(grid.n);
        b.d2e[j].resize(grid.n);
        for (int i = 0; i < grid.n; ++i) {
            const double s = std::sin(k * grid.xi[i]);
            const double c = std::cos(k * grid.xi[i]);
            b.e[j][i] = amp * s;
            b.de[j][i] = amp * k * c;
            b.d2e[j][i] = -amp * k * k * s;
        }
        const double m0 = simd::max_abs(b.e[j]);
        const double m1 = simd::max_abs(b.de[j]);
        const double m2 = simd::max_abs(b.d2e[j]);
        b.c2b_norm[j] = std::max({m0, m1, m2});
    }
    return b;
}

NoiseSpec NoiseSpec::power_law(int modes, double sigma, double decay_p) {
    if (modes < 1) throw ConfigError("noise.J must be >= 1");
    if (sigma < 0.0) throw ConfigError("noise.sigma must be >= 0");
    NoiseSpec s;
    s.modes = modes;
    s.sigma = sigma;
    s.decay_p = decay_p;
    s.mu.resize(modes);
    for (int j = 0; j < modes; ++j) s.mu[j] = sigma * std::pow(j + 1.0, -decay_p);
    return s;
}

double NoiseSpec::condition_value(const OrthonormalBasis& basis) const {
    if (basis.modes != modes)
        throw ConfigError("basis/spec mode count mismatch");
    double v = 0.0;
    for (int j = 0; j < modes; ++j) v += mu[j] * mu[j] * basis.c2b_norm[j] * basis.c2b_norm[j];
    return v;
}

BrownianPaths BrownianPaths::sample(int modes, const std::vector<double>& times,
                                    std::uint64_t seed) {
    if (times.empty() || times.front() != 0.0)
        throw ConfigError("time grid must start at 0");
    for (std::size_t m = 1; m < times.size(); ++m)
        if (!(times[m] > times[m - 1]))
            throw ConfigError("time grid must be strictly increasing (node " +
                              std::to_string(m) + ")");
    BrownianPaths p;
    p.times = times;
    p.modes = modes;
    p.seed = seed;
    p.beta.assign(times.size() * static_cast<std::size_t>(modes), 0.0);
    for (std::size_t m = 0; m + 1 < times.size(); ++m) {
        const double sdt = std::sqrt(times[m + 1] - times[m]);
        for (int j = 0; j < modes; ++j) {
            const double dz = sdt * rng::gaussian(seed, static_cast<std::uint32_t>(j), m);
            p.beta[(m + 1) * modes + j] = p.beta[m * modes + j] + dz;
        }
    }
    return p;
}

BrownianPaths BrownianPaths::coarsen(int factor) const {
    if (factor < 1 || steps() % factor != 0)
        throw ConfigError("coarsen factor must divide the step count");
    BrownianPaths p;
    p.modes = modes;
    p.seed = seed;
    const int coarse_steps = steps() / factor;
    p.times.resize(coarse_steps + 1);
    p.beta.resize((coarse_steps + 1) * static_cast<std::size_t>(modes));
    for (int m = 0; m <= coarse_steps; ++m) {
        p.times[m] = times[static_cast<std::size_t>(m) * factor];
        for (int j = 0; j < modes; ++j)
            p.beta[static_cast<std::size_t>(m) * modes + j] =
                beta[static_cast<std::size_t>(m) * factor * modes + j];
    }
    return p;
}

int WienerField::node_of(double t) const {
    const auto& ts = paths.times;
    // nearest node, then exactness check
    std::size_t best = 0;
    double bd = std::fabs(ts[0] - t);
    for (std::size_t m = 1; m < ts.size(); ++m) {
        const double d = std::fabs(ts[m] - t);
        if (d < bd) { bd = d; best = m; }
    }
    const double scale = std::max(1.0, std::fabs(t));
    if (bd > 1e-12 * scale)
        throw ConfigError("t=" + std::to_string(t) +
                          " is not a time-grid node; interpolation is refused");
    return static_cast<int>(best);
}

WienerField make_wiener_field(std::shared_ptr<const OrthonormalBasis> basis,
                              std::shared_ptr<const NoiseSpec> spec,
                              const std::vector<double>& times, std::uint64_t seed) {
    if (basis->modes != spec->modes)
        throw ConfigError("basis/spec mode count mismatch");
    WienerField f;
    f.paths = BrownianPaths::sample(spec->modes, times, seed);
    f.basis = std::move(basis);
    f.spec = std::move(spec);
    f.ito_mu = ito_correction(*f.basis, *f.spec);
    return f;
}

WienerEval eval_wiener(const WienerField& field, int node) {
    const auto& b = *field.basis;
    const int n = b.grid.n;
    WienerEval ev;
    ev.w.assign(n, 0.0);
    ev.dw.assign(n, 0.0);
    ev.d2w.assign(n, 0.0);
    for (int j = 0; j < b.modes; ++j) {
        const double c = field.spec->mu[j] * field.paths.value(j, node);
        if (c == 0.0) continue;
        simd::axpy(c, b.e[j], ev.w);
        simd::axpy(c, b.de[j], ev.dw);
        simd::axpy(c, b.d2e[j], ev.d2w);
    }
    return ev;
}

Field ito_correction(const OrthonormalBasis& basis, const NoiseSpec& spec) {
    if (basis.modes != spec.modes)
        throw ConfigError("basis/spec mode count mismatch");
    Field mu(basis.grid.n, 0.0);
    Field sq(basis.grid.n);
    for (int j = 0; j < basis.modes; ++j) {
        simd::mul(basis.e[j], basis.e[j], sq);
        simd::axpy(0.5 * spec.mu[j] * spec.mu[j], sq, mu);
    }
    return mu;
}

std::vector<double> uniform_times(double dt, int steps) {
    if (dt <= 0.0) throw ConfigError("time.dt must be > 0");
    if (steps < 1) throw ConfigError("step count must be >= 1");
    std::vector<double> t(steps + 1);
    for (int m = 0; m <= steps; ++m) t[m] = m * dt;
    return t;
}

}  // namespace logconvex
