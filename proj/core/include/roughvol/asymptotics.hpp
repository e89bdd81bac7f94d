#pragma once

#include <cstddef>
#include <vector>

#include "roughvol/pricing.hpp"
#include "roughvol/rbergomi.hpp"
#include "roughvol/time_grid.hpp"

namespace roughvol {

/// Leading-order Malliavin kernel of the variance process with the vol factor
/// frozen at sigma0:
///   D_s sigma_r^2 = sigma0^2 alpha sqrt(2H) (r - s)^(H - 1/2),  s < r.
/// At H = 1/2 the kernel is the constant sigma0^2 alpha.
double malliavin_kernel(const ModelParams& params, double s, double r);

/// The three limit terms of the small-window expansion
///   I(k_hat) - E[v_T] ~ total() * (tau - T)^(2H),
/// evaluated with sigma frozen at sigma0. For rho != 0 and alpha > 0 the
/// signs are term1 > 0, term2 < 0, term3 < 0.
struct LimitConstants {
    double term1 = 0.0;
    double term2 = 0.0;
    double term3 = 0.0;
    double total() const { return term1 + term2 + term3; }
};

/// (1/delta^(2H+2)) int_0^delta ds int_s^delta dr int_r^delta du
///   (u-s)^(H-1/2) (u-r)^(H-1/2)
/// by nested adaptive quadrature, with power substitutions absorbing the
/// u -> r endpoint singularity and the r -> s cusp. The normalization makes
/// the value independent of delta (the integrand is homogeneous), which
/// limit_constants checks numerically.
double normalized_triple_integral(double H, double delta);

/// Terms 1 and 2 reduce to closed-form Beta-type integrals of the kernels;
/// term 3 keeps the triple integral and is evaluated by quadrature at two
/// window lengths (agreement to 1e-6 relative is enforced, NoConvergence
/// otherwise). Returns the coefficient set for the expansion above.
LimitConstants limit_constants(const ModelParams& params);

struct DecayPoint {
    double delta = 0.0;      // tau - T
    double error = 0.0;      // I(k_hat) - E[v_T]
    double std_error = 0.0;  // MC standard error of the difference
};

/// Measurements of the same scenario at a ladder of window lengths,
/// deltas strictly decreasing.
struct DecaySeries {
    std::vector<DecayPoint> points;
};

struct SlopeFit {
    double slope = 0.0;
    double slope_se = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<std::size_t> used;  // indices of points above the noise floor
};

/// OLS of log|error| on log delta. Points with |error| <= 3 * std_error are
/// dropped (not deweighted); fewer than 4 surviving points raises
/// InsufficientSignal.
SlopeFit decay_slope(const DecaySeries& series);

struct PredictionReport {
    double delta = 0.0;
    double measured = 0.0;  // I(k_hat) - E[v_T] from simulation
    double measured_se = 0.0;
    double predicted = 0.0;  // limit_constants total * delta^(2H)
    double ratio = 0.0;      // measured / predicted, 0 when predicted == 0
    bool resolvable = false; // |measured| > 3 * SE
    bool sign_consistent = true;  // only meaningful when resolvable and predicted != 0
};

/// Prices the scenario and sets measured vs predicted side by side. The
/// prediction keeps only the leading order, so agreement is in sign and
/// order of magnitude, not in digits.
PredictionReport compare_prediction(const ModelParams& params, const TimeGrid& grid,
                                    const MCConfig& mc);

}  // namespace roughvol
