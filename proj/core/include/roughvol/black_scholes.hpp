#pragma once

#include <functional>

namespace roughvol {

/// Undiscounted call quote in log coordinates: forward e^x, strike e^k,
/// time to maturity delta_t, Black-Scholes volatility sigma.
struct BSQuote {
    double x = 0.0;
    double k = 0.0;
    double delta_t = 0.0;
    double sigma = 0.0;
};

/// e^x N(d1) - e^k N(d2); collapses to the intrinsic value (e^x - e^k)+ when
/// sigma sqrt(delta_t) is zero.
double bs_price(const BSQuote& q);

/// dPrice/dsigma = e^x phi(d1) sqrt(delta_t). Requires sigma sqrt(delta_t) > 0.
double bs_vega(const BSQuote& q);

/// G = (d^2/dx^2 - d/dx) BS = e^x phi(d1) / (sigma sqrt(delta_t)).
/// Satisfies vega = sigma delta_t G and the heat equation
/// dBS/dt + sigma^2/2 G = 0 in calendar time.
double g_operator(const BSQuote& q);

/// H = (d^3/dx^3 - d^2/dx^2) BS = G (1 - d1/(sigma sqrt(delta_t))).
double h_operator(const BSQuote& q);

/// Inverts bs_price in sigma by bisection on [1e-6, 5], absolute vol
/// tolerance 1e-8. Throws BelowIntrinsic / AboveSpot for prices outside the
/// attainable range and NoConvergence if the bracket cannot contain the root.
double implied_vol(double price, double x, double k, double delta_t);

/// Strike k with d2(k, smile(k)) = 0 at x = 0, i.e. the fixed point
/// k = -smile(k)^2 delta_t / 2. Damped fixed-point iteration seeded at the
/// ATM level, bisection fallback on g(k) = k + smile(k)^2 delta_t / 2.
double zero_vanna_strike(const std::function<double(double)>& smile, double delta_t);

}  // namespace roughvol
