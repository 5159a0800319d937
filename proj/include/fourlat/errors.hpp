#pragma once

#include <stdexcept>
#include <string>

namespace fourlat {

// Configuration input that cannot be turned into a runnable experiment.
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solve stopped above its residual target.
struct SolverError : std::runtime_error {
    SolverError(const std::string& what, double residual_, int iterations_)
        : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
    double residual;
    int iterations;
};

} // namespace fourlat
