#pragma once

#include <stdexcept>
#include <string>

namespace logconvex {

/// Bad or inconsistent run configuration (unknown key, coarse grid, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Supplied problem data violates a structural hypothesis
/// (ellipticity, monotonicity, boundedness of the linearization).
struct HypothesisError : std::runtime_error {
    explicit HypothesisError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Runtime breakdown of a scheme: blow-up, failed linear solve.
struct NumericError : std::runtime_error {
    NumericError(const std::string& msg, long step = -1)
        : std::runtime_error(step >= 0 ? msg + " (step " + std::to_string(step) + ")" : msg),
          step_index(step) {}
    long step_index;
};

/// State hit the degeneracy floor (vanishing difference norm).
struct DegenerateStateError : std::runtime_error {
    explicit DegenerateStateError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace logconvex
