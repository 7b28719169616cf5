#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "logconvex/noise.hpp"
#include "logconvex/rng.hpp"

using namespace logconvex;

TEST_CASE("basis: normalization and orthogonality") {
    const Grid1D grid = Grid1D::interior(64);
    const OrthonormalBasis b = build_basis(grid, 2);
    CHECK(grid.inner(b.e[0], b.e[0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(grid.inner(b.e[0], b.e[1])) < 1e-12);
}

TEST_CASE("basis: defect within quadrature bound at n=256, J=3") {
    const Grid1D grid = Grid1D::interior(256);
    const OrthonormalBasis b = build_basis(grid, 3);
    CHECK(b.orthonormality_defect() <= 1e-3);
    CHECK(b.orthonormality_defect() <= 10.0 * grid.h * grid.h);
}

TEST_CASE("basis: resolution guard") {
    const Grid1D grid = Grid1D::interior(16);
    CHECK_THROWS_AS(build_basis(grid, 5), ConfigError);  // n < 4J
}

TEST_CASE("basis: D2 e_j equals analytic -j^2 e_j and matches finite differences") {
    const Grid1D grid = Grid1D::interior(128);
    const OrthonormalBasis b = build_basis(grid, 3);
    for (int j = 0; j < 3; ++j) {
        const double k = j + 1;
        for (int i = 0; i < grid.n; ++i)
            CHECK(b.d2e[j][i] == doctest::Approx(-k * k * b.e[j][i]).epsilon(1e-12));
        // second central difference agrees to O(h^2)
        double worst = 0.0;
        for (int i = 1; i + 1 < grid.n; ++i) {
            const double fd =
                (b.e[j][i + 1] - 2.0 * b.e[j][i] + b.e[j][i - 1]) / (grid.h * grid.h);
            worst = std::max(worst, std::fabs(fd - b.d2e[j][i]));
        }
        CHECK(worst <= 5.0 * k * k * k * k * grid.h * grid.h);
    }
}

TEST_CASE("brownian: zero start, determinism, increment variance") {
    const auto times = uniform_times(1e-3, 10000);
    const BrownianPaths p1 = BrownianPaths::sample(1, times, 991);
    const BrownianPaths p2 = BrownianPaths::sample(1, times, 991);
    CHECK(p1.value(0, 0) == 0.0);
    for (int m = 0; m <= p1.steps(); m += 997) CHECK(p1.value(0, m) == p2.value(0, m));

    double var = 0.0;
    for (int m = 0; m < p1.steps(); ++m) {
        const double inc = p1.increment(0, m);
        var += inc * inc;
    }
    var /= p1.steps();
    // chi-square 99% band for 1e4 samples
    CHECK(var >= 0.8e-3);
    CHECK(var <= 1.2e-3);
}

TEST_CASE("brownian: mode paths independent of mode count") {
    const auto times = uniform_times(1e-2, 100);
    const BrownianPaths small = BrownianPaths::sample(2, times, 7);
    const BrownianPaths big = BrownianPaths::sample(6, times, 7);
    for (int m = 0; m <= 100; ++m)
        for (int j = 0; j < 2; ++j) CHECK(small.value(j, m) == big.value(j, m));
}

TEST_CASE("brownian: coarsening keeps the same path") {
    const auto times = uniform_times(2.5e-4, 4000);
    const BrownianPaths fine = BrownianPaths::sample(3, times, 55);
    const BrownianPaths coarse = fine.coarsen(4);
    CHECK(coarse.steps() == 1000);
    for (int m = 0; m <= 1000; ++m) {
        CHECK(coarse.times[m] == fine.times[4 * m]);
        for (int j = 0; j < 3; ++j) CHECK(coarse.value(j, m) == fine.value(j, 4 * m));
    }
}

TEST_CASE("wiener field: zero path, single-mode substitution, sine identity") {
    const Grid1D grid = Grid1D::interior(64);
    auto basis = std::make_shared<OrthonormalBasis>(build_basis(grid, 1));

    {  // zero amplitude: W == 0 everywhere
        auto spec = std::make_shared<NoiseSpec>(NoiseSpec::power_law(1, 0.0, 2.0));
        const WienerField f = make_wiener_field(basis, spec, uniform_times(0.1, 10), 1);
        const WienerEval ev = eval_wiener(f, 5);
        CHECK(simd::max_abs(ev.w) == 0.0);
        CHECK(simd::max_abs(ev.dw) == 0.0);
    }

    {  // mu_1 = 2 with beta = 3 gives W = 6 e_1 and D2 W = -W
        auto spec = std::make_shared<NoiseSpec>(NoiseSpec::power_law(1, 1.0, 2.0));
        WienerField f = make_wiener_field(basis, spec, uniform_times(0.1, 10), 1);
        auto forced = std::make_shared<NoiseSpec>(*spec);
        forced->mu[0] = 2.0;
        f.spec = forced;
        for (int m = 0; m <= 10; ++m) f.paths.beta[m] = 3.0;
        const WienerEval ev = eval_wiener(f, 4);
        const double amp = std::sqrt(2.0 / std::numbers::pi);
        for (int i = 0; i < grid.n; ++i) {
            CHECK(ev.w[i] == doctest::Approx(6.0 * amp * std::sin(grid.xi[i])).epsilon(1e-13));
            CHECK(ev.d2w[i] == doctest::Approx(-ev.w[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("wiener field: off-node evaluation refused") {
    const Grid1D grid = Grid1D::interior(32);
    auto basis = std::make_shared<OrthonormalBasis>(build_basis(grid, 1));
    auto spec = std::make_shared<NoiseSpec>(NoiseSpec::power_law(1, 0.1, 2.0));
    const WienerField f = make_wiener_field(basis, spec, uniform_times(0.1, 10), 3);
    CHECK(f.node_of(0.5) == 5);
    CHECK_THROWS_AS(f.node_of(0.55001), ConfigError);
}

TEST_CASE("ito correction: single mode closed form, nonnegativity, scaling") {
    const Grid1D grid = Grid1D::interior(64);
    const OrthonormalBasis b = build_basis(grid, 1);
    NoiseSpec spec = NoiseSpec::power_law(1, 0.7, 2.0);
    const Field mu = ito_correction(b, spec);
    for (int i = 0; i < grid.n; ++i) {
        const double expect =
            0.49 * std::sin(grid.xi[i]) * std::sin(grid.xi[i]) / std::numbers::pi;
        CHECK(mu[i] == doctest::Approx(expect).epsilon(1e-12));
        CHECK(mu[i] >= 0.0);
    }
    // doubling every mu_j quadruples the correction
    NoiseSpec twice = spec;
    for (double& m : twice.mu) m *= 2.0;
    const Field mu2 = ito_correction(b, twice);
    for (int i = 0; i < grid.n; ++i)
        CHECK(mu2[i] == doctest::Approx(4.0 * mu[i]).epsilon(1e-12));
}

TEST_CASE("summability value nondecreasing in J") {
    const Grid1D grid = Grid1D::interior(256);
    double prev = 0.0;
    for (int J : {1, 2, 4, 8}) {
        const OrthonormalBasis b = build_basis(grid, J);
        const NoiseSpec spec = NoiseSpec::power_law(J, 0.3, 2.0);
        const double v = spec.condition_value(b);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("seed derivation is stable") {
    CHECK(rng::derive_seed(1, 0, 0) == rng::derive_seed(1, 0, 0));
    CHECK(rng::derive_seed(1, 0, 0) != rng::derive_seed(1, 0, 1));
    CHECK(rng::derive_seed(1, 0, 0) != rng::derive_seed(1, 1, 0));
    CHECK(rng::derive_seed(1, 0, 0) != rng::derive_seed(2, 0, 0));
}

TEST_CASE("gaussian moments sane") {
    double mean = 0.0, var = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double z = rng::gaussian(123, 0, i);
        mean += z;
        var += z * z;
    }
    mean /= n;
    var = var / n - mean * mean;
    CHECK(std::fabs(mean) < 0.05);
    CHECK(std::fabs(var - 1.0) < 0.05);
}
