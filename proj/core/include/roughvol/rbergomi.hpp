#pragma once

#include <span>

#include "roughvol/time_grid.hpp"

namespace roughvol {

/// Rough Bergomi spot-variance dynamics:
///   sigma_u^2 = sigma0^2 exp(alpha W^H_u - alpha^2/2 u^(2H)),
/// with the log price driven by the correlated Brownian B (the correlation
/// lives entirely in the joint law of (W^H, B)).
struct ModelParams {
    double sigma0 = 0.2;
    double alpha = 0.8;
    double H = 0.1;
    double rho = 0.0;
    double x0 = 0.0;

    void validate() const;
};

/// sigma^2 at each node time from W^H node values (exact exponential map,
/// nothing is discretized here). times[i] is the absolute calendar time of
/// wh[i]; out[i] receives sigma^2 at that node.
void variance_path(const ModelParams& params, std::span<const double> times,
                   std::span<const double> wh, std::span<double> out);

/// X_tau - X_T by the left-point Euler scheme over [T, tau):
///   sum_i (-sigma_i^2/2 dt + sigma_i dB_i),
/// sig2 holds sigma^2 per grid node (all nodes), db one increment per grid
/// interval. With alpha = 0 this is the exact Black-Scholes log return.
double log_price_increment(const ModelParams& params, const TimeGrid& grid,
                           std::span<const double> sig2, std::span<const double> db);

/// Forward volatility v_T = sqrt(mean of sigma^2 over [T, tau)), left-Riemann
/// on the same nodes the Euler scheme reads.
double forward_vol(const TimeGrid& grid, std::span<const double> sig2);

}  // namespace roughvol
