#pragma once

#include <stdexcept>

namespace parnoise {

// Malformed configuration or input file. CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure at runtime (singular covariance, failed inversion,
// degenerate grid). CLI maps this to exit code 2.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace parnoise
