#pragma once

#include <functional>

namespace roughvol {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int panels = 0;
};

/// Adaptive Gauss-Kronrod (G7,K15) on [a, b] to an absolute tolerance.
///
/// Panels are bisected until the local K15-G7 discrepancy fits within the
/// tolerance share of the panel. The integrand is never evaluated at the
/// interval endpoints, so integrable endpoint behaviour is tolerated, but
/// callers are expected to substitute away algebraic endpoint singularities
/// first (see fbm_autocovariance). Throws NoConvergence if the panel budget
/// is exhausted before the estimate meets the tolerance.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-10, int max_panels = 20000);

}  // namespace roughvol
