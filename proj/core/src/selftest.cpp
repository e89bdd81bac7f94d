#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>

#include "roughvol/asymptotics.hpp"
#include "roughvol/black_scholes.hpp"
#include "roughvol/errors.hpp"
#include "roughvol/experiment.hpp"
#include "roughvol/gaussian_process.hpp"
#include "roughvol/pricing.hpp"
#include "roughvol/time_grid.hpp"

// Named invariant checks behind the selftest mode. Each check throws with a
// human-readable reason on violation; the harness catches and records. Scale
// is fixed here (not taken from the config) so the whole suite stays well
// under a minute regardless of what the config asks the other modes to do.

namespace roughvol {

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void require(bool ok, const std::string& detail) {
    if (!ok) throw std::runtime_error(detail);
}

// Fixed reduced scale: 24 pricing steps, 2e4 paths, a second or two per MC
// check on one core.
constexpr int kStepsPerYear = 48;
constexpr std::uint64_t kPaths = 20'000;

TimeGrid small_grid() { return TimeGrid::make(0.0, 0.25, 0.75, kStepsPerYear); }

MCConfig small_mc(const ExperimentConfig& cfg, bool control_variate) {
    MCConfig mc;
    mc.n_paths = kPaths;
    mc.seed = cfg.mc.seed;
    mc.batch_size = 4096;
    mc.n_workers = 1;
    mc.control_variate = control_variate;
    return mc;
}

std::string check_covariance_symmetry(const ExperimentConfig& cfg) {
    const TimeGrid grid = TimeGrid::make(0.1, 0.35, 0.6, 20);
    JointCovariance cov = build_joint_covariance(grid, 0.1, -0.7);
    if (cfg.selftest_tamper_covariance) cov.matrix(0, 1) += 1e-6;
    const std::string health = covariance_health(cov.matrix);
    require(health.empty(), health + " violated");
    return "symmetric and finite, dimension " + std::to_string(cov.dimension());
}

std::string check_covariance_diagonal(const ExperimentConfig&) {
    double worst = 0.0;
    for (const double H : {0.05, 0.3, 0.7})
        for (const double t : {0.3, 1.0, 1.7}) {
            const double got = fbm_autocovariance(t, t, H);
            worst = std::max(worst, std::abs(got - std::pow(t, 2.0 * H)));
        }
    require(worst <= 1e-14, "Var W_t^H deviates from t^(2H) by " + num(worst));
    return "Var W_t^H = t^(2H), worst " + num(worst);
}

std::string check_covariance_bm_reduction(const ExperimentConfig&) {
    double worst = 0.0;
    for (const double t : {0.4, 1.0, 2.5})
        for (const double s : {0.15, 0.4, 0.9}) {
            const double got = fbm_autocovariance(t, s, 0.5);
            worst = std::max(worst, std::abs(got - std::min(s, t)));
        }
    require(worst <= 1e-10, "H=1/2 autocovariance deviates from min(s,t) by " + num(worst));
    return "H=1/2 reduces to Brownian motion, worst " + num(worst);
}

std::string check_cholesky_reconstruction(const ExperimentConfig&) {
    const TimeGrid grid = TimeGrid::make(0.0, 0.25, 0.5, 16);
    const JointCovariance cov = build_joint_covariance(grid, 0.2, -0.5);
    const CholeskyFactor factor = factorize(cov);
    const Eigen::MatrixXd rebuilt = factor.lower * factor.lower.transpose();
    const double worst = (rebuilt - cov.matrix).cwiseAbs().maxCoeff();
    require(worst <= 1e-10, "L L^T misses the covariance by " + num(worst));
    require(factor.jitter == 0.0, "clean covariance needed jitter " + num(factor.jitter));
    return "L L^T matches, no jitter, worst " + num(worst);
}

std::string check_vega_gamma_identity(const ExperimentConfig&) {
    double worst = 0.0;
    for (const double x : {-0.2, 0.0, 0.3})
        for (const double k : {-0.3, 0.0, 0.25})
            for (const double dt : {0.1, 1.5})
                for (const double sigma : {0.15, 0.8}) {
                    const BSQuote q{x, k, dt, sigma};
                    worst = std::max(worst, std::abs(bs_vega(q) - sigma * dt * g_operator(q)));
                }
    require(worst <= 1e-10, "vega - sigma dt G mismatch " + num(worst));
    return "vega = sigma dt G, worst " + num(worst);
}

std::string check_heat_equation(const ExperimentConfig&) {
    const double h = 1e-5;
    double worst = 0.0;
    for (const double x : {-0.2, 0.0, 0.3})
        for (const double k : {-0.3, 0.0, 0.25})
            for (const double dt : {0.3, 1.5})
                for (const double sigma : {0.15, 0.8}) {
                    const double fd =
                        (bs_price({x, k, dt + h, sigma}) - bs_price({x, k, dt - h, sigma})) /
                        (2.0 * h);
                    const double rhs = 0.5 * sigma * sigma * g_operator({x, k, dt, sigma});
                    worst = std::max(worst, std::abs(fd - rhs));
                }
    require(worst <= 1e-6, "dBS/d(dt) vs sigma^2 G / 2 mismatch " + num(worst));
    return "time decay matches sigma^2 G / 2, worst " + num(worst);
}

std::string check_implied_vol_round_trip(const ExperimentConfig&) {
    // Combos whose vega underflows carry no vol information in the price at
    // double precision (deep ITM at small total vol), so skip those.
    double worst = 0.0;
    int used = 0;
    for (const double k : {-1.0, -0.2, 0.0, 0.3, 1.0})
        for (const double dt : {0.25, 2.0})
            for (const double sigma : {0.02, 0.2, 1.5}) {
                const BSQuote q{0.0, k, dt, sigma};
                if (bs_vega(q) < 1e-10) continue;
                const double back = implied_vol(bs_price(q), 0.0, k, dt);
                worst = std::max(worst, std::abs(back - sigma));
                ++used;
            }
    require(used >= 20, "only " + std::to_string(used) + " resolvable combos");
    require(worst <= 1e-8, "implied vol round trip off by " + num(worst));
    return "round trip within bisection tolerance on " + std::to_string(used) +
           " combos, worst " + num(worst);
}

std::string check_martingale_growth(const ExperimentConfig& cfg) {
    ModelParams p;
    p.sigma0 = 0.2;
    p.alpha = 0.8;
    p.H = 0.1;
    p.rho = 0.0;  // price increments are conditionally independent of the vol leg
    const PathEnsemble paths(p, small_grid(), small_mc(cfg, false));
    double mean = 0.0;
    for (const double g : paths.growth()) mean += g;
    mean /= static_cast<double>(paths.growth().size());
    double ss = 0.0;
    for (const double g : paths.growth()) ss += (g - mean) * (g - mean);
    const double se = std::sqrt(ss / (static_cast<double>(paths.growth().size()) - 1.0)) /
                      std::sqrt(static_cast<double>(paths.growth().size()));
    require(std::abs(mean - 1.0) <= 4.0 * se,
            "E[exp(X_tau - X_T)] = " + num(mean) + " vs 1, SE " + num(se));
    return "E[exp(X_tau - X_T)] - 1 = " + num(mean - 1.0) + " within 4 SE (" + num(se) + ")";
}

std::string check_variance_mean(const ExperimentConfig& cfg) {
    ModelParams p;
    p.sigma0 = 0.2;
    p.alpha = 0.8;
    p.H = 0.1;
    p.rho = -0.8;
    const PathEnsemble paths(p, small_grid(), small_mc(cfg, false));
    const double target = p.sigma0 * p.sigma0;
    double mean = 0.0;
    for (const double v : paths.forward_vols()) mean += v * v;
    mean /= static_cast<double>(paths.forward_vols().size());
    double ss = 0.0;
    for (const double v : paths.forward_vols()) ss += (v * v - mean) * (v * v - mean);
    const double se = std::sqrt(ss / (static_cast<double>(paths.forward_vols().size()) - 1.0)) /
                      std::sqrt(static_cast<double>(paths.forward_vols().size()));
    require(std::abs(mean - target) <= 4.0 * se + 1e-12,
            "E[v^2] = " + num(mean) + " vs " + num(target) + ", SE " + num(se));
    return "E[v^2] - sigma0^2 = " + num(mean - target) + " within 4 SE (" + num(se) + ")";
}

std::string check_worker_invariance(const ExperimentConfig& cfg) {
    ModelParams p;
    p.sigma0 = 0.2;
    p.alpha = 0.8;
    p.H = 0.1;
    p.rho = -0.8;
    const TimeGrid grid = TimeGrid::make(0.0, 0.25, 0.5, 24);
    MCConfig one = small_mc(cfg, true);
    one.n_paths = 5000;
    MCConfig three = one;
    three.n_workers = 3;
    const PathEnsemble a(p, grid, one);
    const PathEnsemble b(p, grid, three);
    require(a.forward_vols() == b.forward_vols() && a.growth() == b.growth() &&
                a.bs_growth() == b.bs_growth(),
            "1-worker and 3-worker runs disagree bitwise");
    return "1 and 3 workers produce identical paths";
}

std::string check_vol_leg_rho_invariance(const ExperimentConfig& cfg) {
    ModelParams p;
    p.sigma0 = 0.2;
    p.alpha = 0.8;
    p.H = 0.1;
    const TimeGrid grid = TimeGrid::make(0.0, 0.25, 0.5, 24);
    MCConfig mc = small_mc(cfg, true);
    mc.n_paths = 5000;
    p.rho = 0.0;
    const PathEnsemble uncorrelated(p, grid, mc);
    p.rho = -0.8;
    const PathEnsemble correlated(p, grid, mc);
    require(uncorrelated.forward_vols() == correlated.forward_vols(),
            "forward vols depend on rho");
    require(uncorrelated.growth() != correlated.growth(),
            "price growth ignores rho entirely");
    return "vol swap leg is rho-invariant bitwise";
}

std::string check_bs_limit(const ExperimentConfig& cfg) {
    ModelParams p;
    p.sigma0 = 0.2;
    p.alpha = 0.0;
    p.H = 0.1;
    p.rho = -0.3;
    const PathEnsemble paths(p, small_grid(), small_mc(cfg, true));
    const SmileReport report = zero_vanna_report(paths);
    const MCEstimate atm = paths.price_call(0.0);
    require(atm.std_error < 1e-6,
            "control variate left price SE " + num(atm.std_error));
    // vol equalities hold up to the 1e-8 implied vol bisection tolerance
    const double tol_iv = 2e-8;
    require(std::abs(report.forward_vol_strike.value - p.sigma0) <=
                3.0 * report.forward_vol_strike.std_error + 1e-10,
            "E[v] = " + num(report.forward_vol_strike.value));
    require(std::abs(report.atm_vol - p.sigma0) <= 3.0 * report.atm_vol_se + tol_iv,
            "ATMI = " + num(report.atm_vol));
    require(std::abs(report.zero_vanna_vol - p.sigma0) <=
                3.0 * report.zero_vanna_vol_se + tol_iv,
            "I(khat) = " + num(report.zero_vanna_vol));
    return "alpha=0 collapses to Black-Scholes, price SE " + num(atm.std_error);
}

std::string check_zero_vanna_flat_smile(const ExperimentConfig&) {
    const double sigma = 0.2;
    const double dt = 0.5;
    const double k = zero_vanna_strike([&](double) { return sigma; }, dt);
    const double target = -0.5 * sigma * sigma * dt;
    require(std::abs(k - target) <= 1e-10,
            "flat smile fixed point " + num(k) + " vs " + num(target));
    return "flat smile gives k = -sigma^2 dt / 2 exactly";
}

std::string check_limit_constant_signs(const ExperimentConfig&) {
    ModelParams p;
    p.sigma0 = 0.2;
    p.alpha = 0.8;
    p.H = 0.1;
    p.rho = -0.8;
    const LimitConstants c = limit_constants(p);
    require(c.term1 > 0.0 && c.term2 < 0.0 && c.term3 < 0.0,
            "signs " + num(c.term1) + ", " + num(c.term2) + ", " + num(c.term3));
    return "term signs +, -, -, total " + num(c.total());
}

std::string check_triple_integral_homogeneity(const ExperimentConfig&) {
    const double at_half = normalized_triple_integral(0.1, 0.5);
    const double at_quarter = normalized_triple_integral(0.1, 0.25);
    const double rel = std::abs(at_half - at_quarter) / std::abs(at_half);
    require(rel <= 1e-6, "normalized triple integral drifts by " + num(rel) + " relative");
    return "delta-free to " + num(rel) + " relative";
}

}  // namespace

std::vector<CheckResult> run_selftest(const ExperimentConfig& config) {
    using Check = std::function<std::string(const ExperimentConfig&)>;
    const std::pair<const char*, Check> checks[] = {
        {"covariance_symmetry", check_covariance_symmetry},
        {"covariance_diagonal", check_covariance_diagonal},
        {"covariance_bm_reduction", check_covariance_bm_reduction},
        {"cholesky_reconstruction", check_cholesky_reconstruction},
        {"vega_gamma_identity", check_vega_gamma_identity},
        {"heat_equation", check_heat_equation},
        {"implied_vol_round_trip", check_implied_vol_round_trip},
        {"martingale_growth", check_martingale_growth},
        {"variance_mean", check_variance_mean},
        {"worker_invariance", check_worker_invariance},
        {"vol_leg_rho_invariance", check_vol_leg_rho_invariance},
        {"bs_limit", check_bs_limit},
        {"zero_vanna_flat_smile", check_zero_vanna_flat_smile},
        {"limit_constant_signs", check_limit_constant_signs},
        {"triple_integral_homogeneity", check_triple_integral_homogeneity},
    };

    std::vector<CheckResult> results;
    results.reserve(std::size(checks));
    for (const auto& [name, fn] : checks) {
        CheckResult r;
        r.name = name;
        const auto t0 = Clock::now();
        try {
            r.detail = fn(config);
            r.pass = true;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = e.what();
        }
        r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        results.push_back(r);
    }
    return results;
}

}  // namespace roughvol
