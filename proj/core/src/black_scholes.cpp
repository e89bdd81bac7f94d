#include "roughvol/black_scholes.hpp"

#include <cmath>
#include <stdexcept>

#include "roughvol/errors.hpp"
#include "roughvol/rng.hpp"

namespace roughvol {

namespace {

void check_quote(const BSQuote& q) {
    if (!std::isfinite(q.x) || !std::isfinite(q.k))
        throw std::invalid_argument("BSQuote: x and k must be finite");
    if (!(q.delta_t >= 0.0)) throw std::invalid_argument("BSQuote: delta_t must be >= 0");
    if (!(q.sigma >= 0.0)) throw std::invalid_argument("BSQuote: sigma must be >= 0");
}

double vol_scale_or_throw(const BSQuote& q) {
    check_quote(q);
    const double sd = q.sigma * std::sqrt(q.delta_t);
    if (sd <= 0.0)
        throw std::domain_error("Black-Scholes derivative undefined at sigma sqrt(delta_t) = 0");
    return sd;
}

}  // namespace

double bs_price(const BSQuote& q) {
    check_quote(q);
    const double sd = q.sigma * std::sqrt(q.delta_t);
    const double fwd = std::exp(q.x);
    const double strike = std::exp(q.k);
    if (sd == 0.0) return std::max(fwd - strike, 0.0);
    const double d1 = (q.x - q.k) / sd + 0.5 * sd;
    return fwd * normal_cdf(d1) - strike * normal_cdf(d1 - sd);
}

double bs_vega(const BSQuote& q) {
    const double sd = vol_scale_or_throw(q);
    const double d1 = (q.x - q.k) / sd + 0.5 * sd;
    return std::exp(q.x) * normal_pdf(d1) * std::sqrt(q.delta_t);
}

double g_operator(const BSQuote& q) {
    const double sd = vol_scale_or_throw(q);
    const double d1 = (q.x - q.k) / sd + 0.5 * sd;
    return std::exp(q.x) * normal_pdf(d1) / sd;
}

double h_operator(const BSQuote& q) {
    const double sd = vol_scale_or_throw(q);
    const double d1 = (q.x - q.k) / sd + 0.5 * sd;
    return std::exp(q.x) * normal_pdf(d1) / sd * (1.0 - d1 / sd);
}

double implied_vol(double price, double x, double k, double delta_t) {
    if (!(delta_t > 0.0)) throw std::invalid_argument("implied_vol: delta_t must be positive");
    if (!std::isfinite(price)) throw std::invalid_argument("implied_vol: price must be finite");
    const double intrinsic = std::max(std::exp(x) - std::exp(k), 0.0);
    if (price < intrinsic) throw BelowIntrinsic("implied_vol: price below intrinsic value");
    if (price >= std::exp(x)) throw AboveSpot("implied_vol: price at or above the forward");

    constexpr double lo_vol = 1e-6;
    constexpr double hi_vol = 5.0;
    constexpr double tol = 1e-8;
    double lo = lo_vol, hi = hi_vol;
    if (bs_price({x, k, delta_t, hi}) < price)
        throw NoConvergence("implied_vol: price above the sigma = 5 bracket");
    if (bs_price({x, k, delta_t, lo}) > price)
        throw NoConvergence("implied_vol: price below the sigma = 1e-6 bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (bs_price({x, k, delta_t, mid}) < price ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double zero_vanna_strike(const std::function<double(double)>& smile, double delta_t) {
    if (!(delta_t > 0.0)) throw std::invalid_argument("zero_vanna_strike: delta_t must be positive");
    const auto target = [&](double k) {
        const double vol = smile(k);
        if (!std::isfinite(vol) || vol <= 0.0)
            throw NoConvergence("zero_vanna_strike: smile returned a non-usable vol");
        return -0.5 * vol * vol * delta_t;
    };

    // Damped fixed point k <- -I(k)^2 dt/2 from the ATM seed; the smile is
    // nearly flat on this scale so contraction is fast for sane inputs.
    constexpr double damping = 0.7;
    constexpr double tol = 1e-10;
    double k = target(0.0);
    for (int it = 0; it < 100; ++it) {
        const double next = k + damping * (target(k) - k);
        if (std::abs(next - k) < tol) return next;
        k = next;
    }

    // Bisection fallback on g(k) = k + I(k)^2 dt/2, which is negative for
    // k far enough below the fixed point (vols capped by the inversion
    // bracket) and positive at zero.
    double lo = -0.5 * 25.0 * delta_t - 1.0;
    double hi = std::max(1.0, 0.1 * delta_t);
    auto g = [&](double kk) { return kk - target(kk); };
    if (!(g(lo) < 0.0 && g(hi) > 0.0))
        throw NoConvergence("zero_vanna_strike: no bracket for the fixed point");
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    if (hi - lo > tol) throw NoConvergence("zero_vanna_strike: bisection stalled");
    return 0.5 * (lo + hi);
}

}  // namespace roughvol
