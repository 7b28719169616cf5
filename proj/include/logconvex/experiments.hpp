#pragma once

/// Experiment harness: the four experiment families, artifact writing,
/// and the parameter sweep.

#include <map>
#include <string>
#include <vector>

#include "logconvex/config.hpp"

namespace logconvex {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    std::vector<std::pair<std::string, double>> metrics;

    double metric(const std::string& key) const;
};

struct ExperimentResult {
    std::string experiment;
    std::vector<CheckResult> checks;

    bool all_pass() const;
    const CheckResult& check(const std::string& name) const;
};

/// out_dir may be empty: run the checks, skip the artifacts.
ExperimentResult run_heat_logconvexity(const Config& cfg, const std::string& out_dir);
ExperimentResult run_parabolic_backward(const Config& cfg, const std::string& out_dir);
ExperimentResult run_controllability(const Config& cfg, const std::string& out_dir);
ExperimentResult run_tamed_nse(const Config& cfg, const std::string& out_dir);

// family slices (the acceptance suite drives criteria individually)
ExperimentResult run_consistency_study(const Config& cfg, const std::string& out_dir);
ExperimentResult run_theorem1_study(const Config& cfg, const std::string& out_dir);
ExperimentResult run_control_core(const Config& cfg, const std::string& out_dir);
ExperimentResult run_control_reach(const Config& cfg, const std::string& out_dir);
ExperimentResult run_nse_structural(const Config& cfg, const std::string& out_dir);
ExperimentResult run_nse_theorem3(const Config& cfg, const std::string& out_dir);
ExperimentResult run_nse_interpolation(const Config& cfg, const std::string& out_dir);

ExperimentResult run_family(const Config& cfg, const std::string& out_dir);

/// Writes config.resolved, report.csv and summary.txt; returns the CLI
/// exit status (0 all checks pass, 1 otherwise).
int run_experiment(const Config& cfg, const std::string& out_dir);

/// One row per swept value; returns 0/1 like run_experiment.
int sweep(const Config& cfg, const std::string& key, const std::vector<std::string>& values,
          const std::string& out_dir);

/// Least-squares line fit with R².
struct LinFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};
LinFit linfit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace logconvex
