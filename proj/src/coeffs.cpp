#include "logconvex/coeffs.hpp"

#include <cmath>
#include <limits>

#include "logconvex/rng.hpp"

namespace logconvex {

ParabolicProblem make_problem(const std::string& name) {
    ParabolicProblem p;
    p.name = name;
    p.b = [](double, double) { return 0.0; };
    p.b_xi = [](double, double) { return 0.0; };
    if (name == "heat") {
        p.ellipticity = 1.0;
        p.lipschitz_L = 0.0;
        p.growth_q = 0.0;
        p.a = [](double, double) { return 1.0; };
        p.a_t = [](double, double) { return 0.0; };
        p.a_xi = [](double, double) { return 0.0; };
        p.psi = [](double, double, double) { return 0.0; };
        p.psi_r = [](double, double, double) { return 0.0; };
        p.psi0 = [](double, double, double, double) { return 0.0; };
        p.psi_r_bounded = true;
    } else if (name == "vardiff") {
        p.ellipticity = 1.0;  // sinξ ≥ 0 on (0,π), so a ≥ 1
        p.lipschitz_L = 0.0;
        p.growth_q = 0.0;
        p.a = [](double t, double xi) { return 1.0 + 0.5 * t * std::sin(xi); };
        p.a_t = [](double, double xi) { return 0.5 * std::sin(xi); };
        p.a_xi = [](double t, double xi) { return 0.5 * t * std::cos(xi); };
        p.psi = [](double, double, double) { return 0.0; };
        p.psi_r = [](double, double, double) { return 0.0; };
        p.psi0 = [](double, double, double, double) { return 0.0; };
        p.psi_r_bounded = true;
    } else if (name == "cubic") {
        p.ellipticity = 1.0;
        p.lipschitz_L = 1.0;
        p.growth_q = 2.0;
        p.majorant_C = 1.5;  // |r₁²+r₁r₂+r₂²| ≤ 1.5(r₁²+r₂²)
        p.a = [](double, double) { return 1.0; };
        p.a_t = [](double, double) { return 0.0; };
        p.a_xi = [](double, double) { return 0.0; };
        p.psi = [](double, double, double r) { return r * r * r; };
        p.psi_r = [](double, double, double r) { return 3.0 * r * r; };
        p.psi0 = [](double, double, double r1, double r2) { return r1 * r1 + r1 * r2 + r2 * r2; };
        p.psi_r_bounded = false;
    } else if (name == "arctan") {
        p.ellipticity = 1.0;
        p.lipschitz_L = 1.0;
        p.growth_q = 0.0;
        p.majorant_C = 1.0;
        p.a = [](double, double) { return 1.0; };
        p.a_t = [](double, double) { return 0.0; };
        p.a_xi = [](double, double) { return 0.0; };
        p.psi = [](double, double, double r) { return std::atan(r); };
        p.psi_r = [](double, double, double r) { return 1.0 / (1.0 + r * r); };
        p.psi0 = [](double, double, double, double) { return 1.0; };
        p.psi_r_bounded = true;
    } else {
        throw ConfigError("unknown problem.name '" + name +
                          "' (library: heat, vardiff, cubic, arctan)");
    }
    return p;
}

RescaledCoefficients rescaled_coefficients_at(const ParabolicProblem& problem,
                                              const Grid1D& grid, const WienerEval& ev,
                                              const Field& ito_mu, double t) {
    if (!problem.a || !problem.a_xi)
        throw ConfigError("problem is missing coefficient derivatives");
    RescaledCoefficients rc;
    rc.a0.resize(grid.n);
    rc.a1.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double av = problem.a(t, grid.xi[i]);
        const double ax = problem.a_xi(t, grid.xi[i]);
        const double dw = ev.dw[i];
        rc.a0[i] = ito_mu[i] - (av * (ev.d2w[i] + dw * dw) + ax * dw);
        rc.a1[i] = -2.0 * av * dw;
    }
    return rc;
}

RescaledCoefficients rescaled_coefficients(const ParabolicProblem& problem,
                                           const WienerField& field, int node) {
    const WienerEval ev = eval_wiener(field, node);
    return rescaled_coefficients_at(problem, field.basis->grid, ev, field.ito_mu,
                                    field.time(node));
}

double yosida(const ParabolicProblem& problem, double eps, double t, double xi, double r) {
    if (eps <= 0.0) throw ConfigError("yosida eps must be > 0");
    const auto f = [&](double y) { return y + eps * problem.psi(t, xi, y) - r; };
    // ψ monotone with ψ(·,·,0)=0 brackets the resolvent between 0 and r.
    double lo = std::min(0.0, r), hi = std::max(0.0, r);
    double flo = f(lo), fhi = f(hi);
    if (flo > 0.0 || fhi < 0.0)
        throw HypothesisError("yosida: resolvent not bracketed (psi not monotone?)");
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fy = f(y);
        if (std::fabs(fy) <= 1e-12) break;
        if (fy > 0.0) { hi = y; fhi = fy; } else { lo = y; flo = fy; }
        // Newton step, safeguarded into the bracket
        const double dpsi = problem.psi_r ? problem.psi_r(t, xi, y) : 0.0;
        const double deriv = 1.0 + eps * dpsi;
        double ynext = (deriv > 0.0) ? y - fy / deriv : 0.5 * (lo + hi);
        if (!(ynext > lo && ynext < hi)) ynext = 0.5 * (lo + hi);
        y = ynext;
    }
    return problem.psi(t, xi, y);
}

Field lipschitz_quotient(const ParabolicProblem& problem, const Field& y1, const Field& y2,
                         const Field& w, double t, const Grid1D& grid) {
    Field g(grid.n, 0.0);
    for (int i = 0; i < grid.n; ++i) {
        const double d = y1[i] - y2[i];
        if (std::fabs(d) <= 1e-14) continue;
        const double ew = std::exp(w[i]);
        const double b1 = std::exp(-w[i]) * problem.psi(t, grid.xi[i], ew * y1[i]);
        const double b2 = std::exp(-w[i]) * problem.psi(t, grid.xi[i], ew * y2[i]);
        g[i] = (b1 - b2) / d;
    }
    return g;
}

AssumptionReport verify_assumptions(const ParabolicProblem& problem, int sample_budget,
                                    std::uint64_t seed) {
    AssumptionReport rep;
    const int n = std::max(8, sample_budget);
    double min_a = std::numeric_limits<double>::infinity();
    double min_inc = std::numeric_limits<double>::infinity();
    double psi0_max = 0.0, major_worst = -std::numeric_limits<double>::infinity();
    double growth_worst = -std::numeric_limits<double>::infinity();
    double fitted_C = 0.0;
    for (int s = 0; s < n; ++s) {
        const double t = rng::uniform(seed, 0, s, 0.0, problem.horizon);
        const double xi = rng::uniform(seed, 1, s, 0.0, std::numbers::pi);
        const double r1 = rng::uniform(seed, 2, s, -3.0, 3.0);
        const double r2 = rng::uniform(seed, 3, s, -3.0, 3.0);
        min_a = std::min(min_a, problem.a(t, xi));
        psi0_max = std::max(psi0_max, std::fabs(problem.psi(t, xi, 0.0)));
        // monotonicity on an r-lattice through r1
        const double dr = 0.25;
        for (int k = -4; k < 4; ++k) {
            const double lo = r1 + k * dr, hi = r1 + (k + 1) * dr;
            min_inc = std::min(min_inc, problem.psi(t, xi, hi) - problem.psi(t, xi, lo));
        }
        const double dpsi = std::fabs(problem.psi(t, xi, r1) - problem.psi(t, xi, r2));
        const double maj = problem.lipschitz_L * std::fabs(r1 - r2) *
                           std::fabs(problem.psi0(t, xi, r1, r2));
        major_worst = std::max(major_worst, dpsi - maj);
        const double env = std::pow(std::fabs(r1), problem.growth_q) +
                           std::pow(std::fabs(r2), problem.growth_q) + 1.0;
        growth_worst =
            std::max(growth_worst, std::fabs(problem.psi0(t, xi, r1, r2)) - problem.majorant_C * env);
        fitted_C = std::max(fitted_C, std::fabs(problem.psi0(t, xi, r1, r2)) / env);
    }
    rep.ellipticity_margin = min_a - problem.ellipticity;
    rep.monotonicity_margin = min_inc;
    rep.psi_zero_max = psi0_max;
    rep.majorant_worst = major_worst;
    rep.growth_worst = growth_worst;
    rep.fitted_majorant_C = fitted_C;
    const double tol = 1e-10;
    rep.pass = rep.ellipticity_margin >= -tol && min_inc >= -tol && psi0_max <= tol &&
               major_worst <= tol && growth_worst <= tol;
    if (!rep.pass) {
        rep.detail = "violations:";
        if (rep.ellipticity_margin < -tol) rep.detail += " ellipticity";
        if (min_inc < -tol) rep.detail += " monotonicity";
        if (psi0_max > tol) rep.detail += " psi(0)!=0";
        if (major_worst > tol) rep.detail += " lipschitz-majorant";
        if (growth_worst > tol) rep.detail += " growth-envelope";
    }
    return rep;
}

}  // namespace logconvex
