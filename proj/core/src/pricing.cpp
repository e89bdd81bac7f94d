#include "roughvol/pricing.hpp"

// fpclassify must come first: pchip calls unqualified isnan and relies on
// boost::math::isnan being visible when the template is parsed.
#include <boost/math/special_functions/fpclassify.hpp>

#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <thread>

#include "roughvol/black_scholes.hpp"
#include "roughvol/errors.hpp"

namespace roughvol {

namespace {

// Centered second moments of the two payoff legs at one strike. Sequential
// two-pass sums so the result never depends on the worker count used during
// sampling.
struct LegStats {
    double mean_c = 0.0;
    double mean_b = 0.0;
    double scc = 0.0;
    double sbb = 0.0;
    double scb = 0.0;
};

LegStats leg_stats(const std::vector<double>& growth, const std::vector<double>& bs_growth,
                   double strike) {
    const std::size_t n = growth.size();
    LegStats s;
    for (std::size_t i = 0; i < n; ++i) {
        s.mean_c += std::max(growth[i] - strike, 0.0);
        s.mean_b += std::max(bs_growth[i] - strike, 0.0);
    }
    s.mean_c /= static_cast<double>(n);
    s.mean_b /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::max(growth[i] - strike, 0.0) - s.mean_c;
        const double b = std::max(bs_growth[i] - strike, 0.0) - s.mean_b;
        s.scc += c * c;
        s.sbb += b * b;
        s.scb += c * b;
    }
    return s;
}

}  // namespace

PathEnsemble::PathEnsemble(const ModelParams& params, const TimeGrid& grid, const MCConfig& mc)
    : params_(params), grid_(grid), mc_(mc) {
    params_.validate();
    if (mc_.n_paths == 0) throw EmptyBatch("path ensemble asked to run with zero paths");
    if (mc_.batch_size == 0) throw std::invalid_argument("batch_size must be positive");
    if (mc_.n_workers < 1) throw std::invalid_argument("n_workers must be positive");

    const std::size_t fi = grid_.forward_index;
    const std::size_t n = grid_.n_steps();
    const auto n_win = static_cast<Eigen::Index>(n - fi);
    window_ = grid_.maturity - grid_.forward_start;

    // The payoff reads W^H only at the left endpoints of [T, tau) and B only
    // over the same intervals, so we sample that exact Gaussian marginal
    // instead of the full grid. A node at calendar time zero carries no
    // randomness and is supplied deterministically below.
    std::vector<double> w_times;
    std::vector<double> b_left;
    w_times.reserve(n - fi);
    b_left.reserve(n - fi);
    for (std::size_t i = fi; i < n; ++i) {
        b_left.push_back(grid_.nodes[i]);
        if (grid_.nodes[i] > 0.0) w_times.push_back(grid_.nodes[i]);
    }
    const bool origin_node = static_cast<Eigen::Index>(w_times.size()) < n_win;

    const JointCovariance cov = assemble_joint_covariance(std::move(w_times), std::move(b_left),
                                                          grid_.dt, params_.H, params_.rho);
    const PathSampler sampler(cov);

    const double alpha = params_.alpha;
    const double sig0sq = params_.sigma0 * params_.sigma0;
    Eigen::VectorXd drift(cov.n_w());
    for (Eigen::Index i = 0; i < cov.n_w(); ++i)
        drift[i] = -0.5 * alpha * alpha * std::pow(cov.w_times[i], 2.0 * params_.H);

    const double dt = grid_.dt;
    cv_delta_t_ = static_cast<double>(n_win) * dt;  // matches Var(sum dB) exactly

    v_.resize(mc_.n_paths);
    growth_.resize(mc_.n_paths);
    bs_growth_.resize(mc_.n_paths);

    const std::uint64_t batch_size = mc_.batch_size;
    const std::uint64_t n_batches = (mc_.n_paths + batch_size - 1) / batch_size;

    auto run_worker = [&](std::uint64_t first_batch, std::uint64_t stride) {
        PathBatch batch;
        Eigen::ArrayXXd sig2;
        Eigen::ArrayXXd sig;
        for (std::uint64_t b = first_batch; b < n_batches; b += stride) {
            const std::uint64_t lo = b * batch_size;
            const auto count =
                static_cast<Eigen::Index>(std::min<std::uint64_t>(batch_size, mc_.n_paths - lo));
            sampler.sample_into(batch, count, mc_.seed, b);

            sig2.resize(n_win, count);
            const Eigen::Index off = origin_node ? 1 : 0;
            if (origin_node) sig2.row(0) = sig0sq;
            sig2.bottomRows(n_win - off) =
                sig0sq * ((alpha * batch.wh).colwise() + drift).array().exp();
            sig = sig2.sqrt();

            const auto db = batch.db.array();
            const Eigen::Array<double, 1, Eigen::Dynamic> total_var = sig2.colwise().sum() * dt;
            const Eigen::Array<double, 1, Eigen::Dynamic> ret =
                (sig * db - (0.5 * dt) * sig2).colwise().sum();
            const Eigen::Array<double, 1, Eigen::Dynamic> bs_ret =
                (params_.sigma0 * db - 0.5 * sig0sq * dt).colwise().sum();

            for (Eigen::Index p = 0; p < count; ++p) {
                const std::size_t at = lo + static_cast<std::size_t>(p);
                v_[at] = std::sqrt(total_var(p) / window_);
                growth_[at] = std::exp(ret(p));
                bs_growth_[at] = std::exp(bs_ret(p));
            }
        }
    };

    const auto n_workers = static_cast<std::uint64_t>(mc_.n_workers);
    if (n_workers == 1) {
        run_worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(n_workers);
        pool.reserve(n_workers);
        for (std::uint64_t w = 0; w < n_workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    run_worker(w, n_workers);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (const auto& err : errors)
            if (err) std::rethrow_exception(err);
    }
}

MCEstimate PathEnsemble::price_call(double k) const {
    const double strike = std::exp(k);
    const auto n = static_cast<double>(v_.size());
    const LegStats s = leg_stats(growth_, bs_growth_, strike);

    MCEstimate est;
    est.n_paths = v_.size();
    if (!mc_.control_variate || !(s.sbb > 0.0)) {
        est.value = s.mean_c;
        est.std_error = std::sqrt(std::max(s.scc, 0.0) / ((n - 1.0) * n));
        return est;
    }

    const double beta = s.scb / s.sbb;
    const double analytic = bs_price({0.0, k, cv_delta_t_, params_.sigma0});
    est.value = s.mean_c - beta * (s.mean_b - analytic);

    // Residuals are formed explicitly rather than as scc - scb^2/sbb: when the
    // legs are near-identical (alpha ~ 0) the moment form cancels to noise
    // while the direct sum stays exact.
    double rss = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) {
        const double c = std::max(growth_[i] - strike, 0.0) - s.mean_c;
        const double b = std::max(bs_growth_[i] - strike, 0.0) - s.mean_b;
        const double r = c - beta * b;
        rss += r * r;
    }
    est.std_error = std::sqrt(rss / ((n - 1.0) * n));
    return est;
}

MCEstimate PathEnsemble::vol_swap() const {
    const auto n = static_cast<double>(v_.size());
    MCEstimate est;
    est.n_paths = v_.size();
    double mean = 0.0;
    for (const double v : v_) mean += v;
    mean /= n;
    double ss = 0.0;
    for (const double v : v_) ss += (v - mean) * (v - mean);
    est.value = mean;
    est.std_error = std::sqrt(ss / ((n - 1.0) * n));
    return est;
}

double PathEnsemble::diff_std_error(double k, double vega) const {
    if (!(vega > 0.0)) throw std::invalid_argument("diff_std_error needs a positive vega");
    const double strike = std::exp(k);
    const auto n = static_cast<double>(v_.size());

    double beta = 0.0;
    if (mc_.control_variate) {
        const LegStats s = leg_stats(growth_, bs_growth_, strike);
        if (s.sbb > 0.0) beta = s.scb / s.sbb;
    }

    // Delta method on the shared paths: the implied vol moves by
    // d(price) / vega, so the per-path influence of the difference is
    // (payoff - beta * cv payoff) / vega - v.
    double mean = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) {
        const double c = std::max(growth_[i] - strike, 0.0);
        const double b = std::max(bs_growth_[i] - strike, 0.0);
        mean += (c - beta * b) / vega - v_[i];
    }
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) {
        const double c = std::max(growth_[i] - strike, 0.0);
        const double b = std::max(bs_growth_[i] - strike, 0.0);
        const double a = (c - beta * b) / vega - v_[i];
        ss += (a - mean) * (a - mean);
    }
    return std::sqrt(ss / ((n - 1.0) * n));
}

Smile::Smile(std::vector<SmileKnot> knots, double delta_t)
    : knots_(std::move(knots)), delta_t_(delta_t) {
    std::vector<double> ks;
    std::vector<double> vols;
    for (const auto& knot : knots_) {
        if (!knot.ok) continue;
        ks.push_back(knot.strike);
        vols.push_back(knot.vol);
    }
    if (ks.size() < 4)
        throw NoConvergence("smile interpolation needs at least 4 usable knots, got " +
                            std::to_string(ks.size()));
    lo_ = ks.front();
    hi_ = ks.back();
    lo_vol_ = vols.front();
    hi_vol_ = vols.back();
    auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
        std::move(ks), std::move(vols));
    interp_ = [spline](double k) { return (*spline)(k); };
}

double Smile::operator()(double k) const {
    if (k <= lo_) return lo_vol_;
    if (k >= hi_) return hi_vol_;
    return interp_(k);
}

MCEstimate price_forward_start_call(const ModelParams& params, const TimeGrid& grid, double k,
                                    const MCConfig& mc) {
    return PathEnsemble(params, grid, mc).price_call(k);
}

MCEstimate vol_swap_strike(const ModelParams& params, const TimeGrid& grid, const MCConfig& mc) {
    return PathEnsemble(params, grid, mc).vol_swap();
}

Smile forward_smile(const PathEnsemble& paths, const SmileConfig& cfg) {
    if (cfg.n_knots < 4) throw std::invalid_argument("smile needs at least 4 knots");
    if (!(cfg.width_stds > 0.0)) throw std::invalid_argument("smile width must be positive");
    const double window = paths.window();
    const double width = cfg.width_stds * paths.params().sigma0 * std::sqrt(window);

    std::vector<SmileKnot> knots(static_cast<std::size_t>(cfg.n_knots));
    for (int j = 0; j < cfg.n_knots; ++j) {
        auto& knot = knots[static_cast<std::size_t>(j)];
        knot.strike = -width + 2.0 * width * static_cast<double>(j) /
                                   static_cast<double>(cfg.n_knots - 1);
        const MCEstimate call = paths.price_call(knot.strike);
        try {
            knot.vol = implied_vol(call.value, 0.0, knot.strike, window);
            knot.vol_se = call.std_error / bs_vega({0.0, knot.strike, window, knot.vol});
            knot.ok = true;
        } catch (const std::exception& e) {
            knot.ok = false;
            knot.note = e.what();
        }
    }
    return Smile(std::move(knots), window);
}

Smile forward_smile(const ModelParams& params, const TimeGrid& grid, const MCConfig& mc,
                    const SmileConfig& cfg) {
    const PathEnsemble paths(params, grid, mc);
    return forward_smile(paths, cfg);
}

SmileReport zero_vanna_report(const PathEnsemble& paths, const SmileConfig& cfg) {
    const double window = paths.window();

    SmileReport report;
    report.forward_vol_strike = paths.vol_swap();

    const Smile smile = forward_smile(paths, cfg);
    report.knots = smile.knots();

    const MCEstimate atm_call = paths.price_call(0.0);
    report.atm_vol = implied_vol(atm_call.value, 0.0, 0.0, window);
    const double atm_vega = bs_vega({0.0, 0.0, window, report.atm_vol});
    report.atm_vol_se = atm_call.std_error / atm_vega;

    // Seed the strike on the interpolated smile, then polish against direct
    // repricing so the reported numbers carry no interpolation error.
    double k = zero_vanna_strike([&smile](double s) { return smile(s); }, window);
    double vol = smile(k);
    for (int iter = 0; iter < 25; ++iter) {
        const MCEstimate call = paths.price_call(k);
        vol = implied_vol(call.value, 0.0, k, window);
        const double next = -0.5 * vol * vol * window;
        const bool done = std::abs(next - k) < 1e-10;
        k = next;
        if (done) break;
    }

    const MCEstimate zv_call = paths.price_call(k);
    report.zero_vanna_strike = k;
    report.zero_vanna_vol = implied_vol(zv_call.value, 0.0, k, window);
    const double zv_vega = bs_vega({0.0, k, window, report.zero_vanna_vol});
    report.zero_vanna_vol_se = zv_call.std_error / zv_vega;

    report.diff_zero_vanna = report.zero_vanna_vol - report.forward_vol_strike.value;
    report.diff_zero_vanna_se = paths.diff_std_error(k, zv_vega);
    report.diff_atm = report.atm_vol - report.forward_vol_strike.value;
    report.diff_atm_se = paths.diff_std_error(0.0, atm_vega);
    return report;
}

SmileReport zero_vanna_report(const ModelParams& params, const TimeGrid& grid, const MCConfig& mc,
                              const SmileConfig& cfg) {
    const PathEnsemble paths(params, grid, mc);
    return zero_vanna_report(paths, cfg);
}

}  // namespace roughvol
