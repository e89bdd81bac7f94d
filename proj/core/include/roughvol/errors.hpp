#pragma once

#include <stdexcept>
#include <string>

namespace roughvol {

// Covariance could not be factorized even after the jitter escalation policy.
struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative solver (implied vol bisection, zero-vanna fixed point, adaptive
// quadrature) exhausted its budget without meeting tolerance.
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Implied vol inversion: target price below the intrinsic value floor.
struct BelowIntrinsic : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Implied vol inversion: target price at or above the forward (spot) value.
struct AboveSpot : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Monte Carlo estimator asked to run with zero paths.
struct EmptyBatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Too few usable points above the noise floor to fit a decay slope.
struct InsufficientSignal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace roughvol
