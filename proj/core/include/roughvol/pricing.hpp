#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "roughvol/gaussian_process.hpp"
#include "roughvol/rbergomi.hpp"
#include "roughvol/time_grid.hpp"

namespace roughvol {

struct MCConfig {
    std::uint64_t n_paths = 500'000;
    std::uint64_t seed = 1;
    std::uint64_t batch_size = 4096;
    int n_workers = 1;           // worker count never changes results, only wall time
    bool control_variate = true;
};

struct MCEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t n_paths = 0;
};

/// Simulates one forward-start scenario and retains per-path summaries so
/// every derived quantity (vol swap strike, any strike's option price, the
/// zero-vanna iteration) prices off the same paths. Batches are keyed by
/// (seed, batch_index) and written to disjoint slices, so the stored arrays
/// and everything derived from them are bit-identical for any worker count.
class PathEnsemble {
  public:
    PathEnsemble(const ModelParams& params, const TimeGrid& grid, const MCConfig& mc);

    /// Forward-start call on the price relative e^(X_tau - X_T), log strike k.
    /// With the control variate on, the same-increment Black-Scholes payoff
    /// (vol sigma0) is regressed out using its exact analytic mean.
    MCEstimate price_call(double k) const;

    MCEstimate vol_swap() const;

    /// Standard error of (implied vol at strike k minus the vol swap strike)
    /// via the delta method on the shared paths; vega is evaluated at the
    /// implied vol the caller obtained for this strike.
    double diff_std_error(double k, double vega) const;

    double window() const { return window_; }
    const TimeGrid& grid() const { return grid_; }
    const MCConfig& config() const { return mc_; }
    const ModelParams& params() const { return params_; }

    const std::vector<double>& forward_vols() const { return v_; }
    const std::vector<double>& growth() const { return growth_; }
    const std::vector<double>& bs_growth() const { return bs_growth_; }

  private:
    ModelParams params_;
    TimeGrid grid_;
    MCConfig mc_;
    double window_ = 0.0;
    double cv_delta_t_ = 0.0;  // n_steps * dt, the exact variance of sum dB
    std::vector<double> v_;          // forward vol per path
    std::vector<double> growth_;     // exp(X_tau - X_T)
    std::vector<double> bs_growth_;  // control-variate leg
};

struct SmileKnot {
    double strike = 0.0;
    double vol = 0.0;
    double vol_se = 0.0;
    bool ok = false;
    std::string note;  // inversion failure reason when !ok
};

/// Implied-vol smile at fixed expiry: knots plus a shape-preserving cubic
/// through the usable ones, flat extrapolation outside the knot range.
class Smile {
  public:
    Smile(std::vector<SmileKnot> knots, double delta_t);

    double operator()(double k) const;
    const std::vector<SmileKnot>& knots() const { return knots_; }
    double delta_t() const { return delta_t_; }

  private:
    std::vector<SmileKnot> knots_;
    double delta_t_ = 0.0;
    std::function<double(double)> interp_;  // pchip over the usable knots
    double lo_ = 0.0, hi_ = 0.0, lo_vol_ = 0.0, hi_vol_ = 0.0;
};

struct SmileConfig {
    int n_knots = 13;        // odd, so the ATM strike is a knot
    double width_stds = 3.0; // strikes span +-width_stds * sigma0 * sqrt(window)
};

struct SmileReport {
    MCEstimate forward_vol_strike;  // E_t[v_T]
    double atm_vol = 0.0;
    double atm_vol_se = 0.0;
    double zero_vanna_strike = 0.0;
    double zero_vanna_vol = 0.0;
    double zero_vanna_vol_se = 0.0;
    double diff_zero_vanna = 0.0;  // I(k_hat) - E_t[v_T]
    double diff_zero_vanna_se = 0.0;
    double diff_atm = 0.0;  // ATM vol - E_t[v_T]
    double diff_atm_se = 0.0;
    std::vector<SmileKnot> knots;
};

MCEstimate price_forward_start_call(const ModelParams& params, const TimeGrid& grid, double k,
                                    const MCConfig& mc);

MCEstimate vol_swap_strike(const ModelParams& params, const TimeGrid& grid, const MCConfig& mc);

Smile forward_smile(const PathEnsemble& paths, const SmileConfig& cfg = {});

Smile forward_smile(const ModelParams& params, const TimeGrid& grid, const MCConfig& mc,
                    const SmileConfig& cfg = {});

/// Vol swap strike, ATM and zero-vanna implied vols and their differences,
/// all from one path ensemble (common random numbers). The zero-vanna strike
/// is seeded on the interpolated smile and then polished by direct repricing
/// at the iterated strike, so reported vols carry no interpolation error.
SmileReport zero_vanna_report(const ModelParams& params, const TimeGrid& grid, const MCConfig& mc,
                              const SmileConfig& cfg = {});

SmileReport zero_vanna_report(const PathEnsemble& paths, const SmileConfig& cfg = {});

}  // namespace roughvol
