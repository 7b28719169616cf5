// Acceptance suite: each criterion runs the library's experiment slices at
// the pinned parameters and prints one pass/fail line. Criteria marked by
// the structural suite also consult the brute-force convolution oracle,
// which lives here in test code on purpose.
//
//   acceptance --criterion N      run criterion N (1..10)
//   acceptance --all              run every criterion

#include <cmath>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "logconvex/csv.hpp"
#include "logconvex/experiments.hpp"
#include "logconvex/rng.hpp"
#include "logconvex/tamednse.hpp"
#include "support/oracles.hpp"

using namespace logconvex;

namespace {

struct Outcome {
    bool pass = true;
    std::string summary;
    std::vector<std::string> detail;

    void fold(const ExperimentResult& res, std::initializer_list<const char*> names) {
        for (const char* name : names) {
            const CheckResult& c = res.check(name);
            pass = pass && c.pass;
            detail.push_back(std::string(c.pass ? "ok   " : "FAIL ") + c.name + ": " +
                             c.detail);
        }
    }
};

Config pinned_defaults() {
    Config cfg = Config::defaults();
    cfg.set("seed", "1");
    return cfg;
}

Outcome criterion1() {
    Outcome o;
    o.summary = "eigenmode quotient constancy (heat, z0 = sin, n=128, dt=1e-3)";
    Config cfg = pinned_defaults();
    cfg.set("grid.n", "128");
    cfg.set("time.dt", "0.001");
    cfg.set("time.T", "1");
    const ExperimentResult res = run_heat_logconvexity(cfg, "");
    o.fold(res, {"eigenmode-quotient-constancy"});
    return o;
}

Outcome criterion2() {
    Outcome o;
    o.summary = "log-convexity oracle (heat, z0 = sin + sin 2x)";
    Config cfg = pinned_defaults();
    const ExperimentResult res = run_heat_logconvexity(cfg, "");
    o.fold(res, {"logconvexity-second-differences", "quotient-monotonicity",
                 "closed-form-agreement"});
    return o;
}

Outcome criterion3() {
    Outcome o;
    o.summary = "rescaling-SPDE consistency and Ito-correction mutation (J=4, sigma=0.2, "
                "10 seeds)";
    Config cfg = pinned_defaults();
    cfg.set("noise.J", "4");
    cfg.set("noise.sigma", "0.2");
    cfg.set("backward.consistency_seeds", "10");
    cfg.set("backward.dt_levels", "3");
    const ExperimentResult res = run_consistency_study(cfg, "");
    o.fold(res, {"rescaling-consistency-order", "ito-mutation-detected"});
    return o;
}

Config theorem1_config() {
    Config cfg = pinned_defaults();
    cfg.set("problem.name", "cubic");
    cfg.set("backward.seeds", "20");
    cfg.set("backward.sigmas", "0,0.05,0.1,0.15,0.2");
    cfg.set("backward.t0", "0.25");
    return cfg;
}

Outcome criterion4() {
    Outcome o;
    o.summary = "Theorem-1 estimate: finite fitted rates, cross-seed stability, envelope "
                "regression (cubic, 20 seeds)";
    const ExperimentResult res = run_theorem1_study(theorem1_config(), "");
    o.fold(res, {"fitted-gamma-finite", "cross-seed-ratio", "envelope-regression"});
    return o;
}

Outcome criterion5() {
    Outcome o;
    o.summary = "backward-uniqueness contrapositive: no finite-time vanishing";
    const ExperimentResult res = run_theorem1_study(theorem1_config(), "");
    o.fold(res, {"contrapositive-no-vanishing"});
    return o;
}

Outcome criterion6() {
    Outcome o;
    o.summary = "duality and injectivity of the dual flow (n=32)";
    Config cfg = pinned_defaults();
    cfg.set("control.n", "32");
    cfg.set("control.duality_pairs", "100");
    const ExperimentResult res = run_control_core(cfg, "");
    o.fold(res, {"duality", "injectivity-margin", "injectivity-decay-slope"});
    return o;
}

Outcome criterion7() {
    Outcome o;
    o.summary = "approximate reachability of sin (heat, T=1)";
    Config cfg = pinned_defaults();
    cfg.set("grid.n", "128");
    cfg.set("problem.T", "1");
    cfg.set("control.reg", "1e-12");
    cfg.set("control.eps", "1e-06");
    const ExperimentResult res = run_control_reach(cfg, "");
    o.fold(res, {"reachability-eigenmode"});
    return o;
}

Outcome criterion8() {
    Outcome o;
    o.summary = "tamed NSE structural suite (divergence, energy, Stokes decay, "
                "convolution oracle, taming bitwise)";
    Config cfg = pinned_defaults();
    cfg.set("nse.K", "8");
    const ExperimentResult res = run_nse_structural(cfg, "");
    o.fold(res, {"divergence-free-preservation", "energy-monotonicity",
                 "stokes-exact-decay", "taming-inactive-bitwise", "taming-activity"});

    {  // brute-force convolution oracle at K = 4
        const int K = 4;
        PseudoSpectral ps(K);
        double worst = 0.0;
        const SpectralGrid& g = spectral_grid(K);
        for (int rep = 0; rep < 3; ++rep) {
            FourierVelocity u = random_divfree(K, 1.0 + 0.4 * rep, 515, rep);
            if (rep == 0) {  // include the Taylor-Green mode itself
                u = taylor_green(K, 1.0);
            }
            ps.load(u);
            const FourierVelocity w = ps.nonlinear_term(u);
            const FourierVelocity ref = oracles::convolution_nonlinear(u);
            for (int c = 0; c < 3; ++c)
                for (int i = 0; i < g.count; ++i)
                    worst = std::max(worst, std::abs(w.comp[c][i] - ref.comp[c][i]));
        }
        const bool pass = worst <= 1e-12;
        o.pass = o.pass && pass;
        o.detail.push_back(std::string(pass ? "ok   " : "FAIL ") +
                           "nonlinear-convolution-oracle: max defect vs direct convolution " +
                           "sum = " + csv_double(worst) + " (<= 1e-12, K=4)");
    }
    return o;
}

Outcome criterion9() {
    Outcome o;
    o.summary = "Theorem-3 expectation inequality (K=8, N=10, nu=1, sigma=0.1, 200 paths)";
    Config cfg = pinned_defaults();
    cfg.set("nse.K", "8");
    cfg.set("nse.N_tame", "10");
    cfg.set("nse.nu", "1");
    cfg.set("nse.sigma", "0.1");
    cfg.set("nse.paths", "200");
    const ExperimentResult res = run_nse_theorem3(cfg, "");
    o.fold(res, {"deterministic-backward-uniqueness", "theorem3-inequality",
                 "theorem3-batch-stability", "theorem3-phi-intermediate"});
    return o;
}

Outcome criterion10() {
    Outcome o;
    o.summary = "interpolation inequality probe (one (C, alpha) over K=8 and K=16)";
    Config cfg = pinned_defaults();
    cfg.set("nse.K", "8");
    cfg.set("nse.interp_fields", "100");
    const ExperimentResult res = run_nse_interpolation(cfg, "");
    o.fold(res, {"interpolation-inequality"});
    return o;
}

Outcome run_criterion(int n) {
    switch (n) {
        case 1: return criterion1();
        case 2: return criterion2();
        case 3: return criterion3();
        case 4: return criterion4();
        case 5: return criterion5();
        case 6: return criterion6();
        case 7: return criterion7();
        case 8: return criterion8();
        case 9: return criterion9();
        case 10: return criterion10();
    }
    Outcome o;
    o.pass = false;
    o.summary = "unknown criterion";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            wanted.push_back(std::atoi(argv[++i]));
        } else if (std::strcmp(argv[i], "--all") == 0) {
            for (int n = 1; n <= 10; ++n) wanted.push_back(n);
        }
    }
    if (wanted.empty())
        for (int n = 1; n <= 10; ++n) wanted.push_back(n);

    bool all_pass = true;
    for (int n : wanted) {
        Outcome o;
        try {
            o = run_criterion(n);
        } catch (const std::exception& e) {
            o.pass = false;
            o.summary = "exception: " + std::string(e.what());
        }
        all_pass = all_pass && o.pass;
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "criterion " << n << ": "
                  << o.summary << "\n";
        for (const auto& d : o.detail) std::cout << "       " << d << "\n";
        std::cout.flush();
    }
    return all_pass ? 0 : 1;
}
