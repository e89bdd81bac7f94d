#include "roughvol/gaussian_process.hpp"

#include <cmath>
#include <stdexcept>

#include "roughvol/errors.hpp"
#include "roughvol/quadrature.hpp"
#include "roughvol/rng.hpp"

namespace roughvol {

namespace {

void check_hurst(double H) {
    if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("Hurst index must lie in (0, 1)");
}

}  // namespace

double fbm_autocovariance(double t, double s, double H) {
    check_hurst(H);
    if (!(t >= 0.0) || !(s >= 0.0))
        throw std::invalid_argument("fbm_autocovariance: times must be >= 0");
    if (s > t) std::swap(t, s);
    if (s == 0.0) return 0.0;
    if (s == t) return std::pow(t, 2.0 * H);

    // s^2H * 2H/(H+1/2) * int_0^1 (t/s - 1 + u^(1/(H+1/2)))^(H-1/2) du,
    // u = (1-x)^(H+1/2) applied to the scale-reduced kernel integral.
    const double m = t / s - 1.0;
    const double p = 1.0 / (H + 0.5);
    const double expo = H - 0.5;
    const auto g = [m, p, expo](double u) { return std::pow(m + std::pow(u, p), expo); };
    const QuadratureResult q = integrate(g, 0.0, 1.0, 1e-10);
    return std::pow(s, 2.0 * H) * (2.0 * H / (H + 0.5)) * q.value;
}

double fbm_bm_covariance(double t, double s, double H, double rho) {
    check_hurst(H);
    if (!(t >= 0.0) || !(s >= 0.0))
        throw std::invalid_argument("fbm_bm_covariance: times must be >= 0");
    if (!(rho >= -1.0 && rho <= 1.0))
        throw std::invalid_argument("fbm_bm_covariance: need rho in [-1, 1]");
    const double hp = H + 0.5;
    const double reach = std::min(t, s);
    return rho * std::sqrt(2.0 * H) / hp * (std::pow(t, hp) - std::pow(t - reach, hp));
}

std::vector<double> bm_increment_covariance(const TimeGrid& grid) {
    return std::vector<double>(grid.n_steps(), grid.dt);
}

JointCovariance assemble_joint_covariance(std::vector<double> w_times,
                                          std::vector<double> b_left, double dt, double H,
                                          double rho) {
    check_hurst(H);
    if (!(dt > 0.0)) throw std::invalid_argument("assemble_joint_covariance: dt must be positive");

    JointCovariance cov;
    cov.dt = dt;
    cov.w_times = std::move(w_times);
    cov.b_left = std::move(b_left);

    const Eigen::Index nw = cov.n_w();
    const Eigen::Index nb = cov.n_b();
    cov.matrix.setZero(nw + nb, nw + nb);

    for (Eigen::Index i = 0; i < nw; ++i)
        for (Eigen::Index j = i; j < nw; ++j) {
            const double v = fbm_autocovariance(cov.w_times[j], cov.w_times[i], H);
            cov.matrix(i, j) = v;
            cov.matrix(j, i) = v;
        }
    for (Eigen::Index i = 0; i < nw; ++i)
        for (Eigen::Index j = 0; j < nb; ++j) {
            const double left = cov.b_left[j];
            const double v = fbm_bm_covariance(cov.w_times[i], left + dt, H, rho) -
                             fbm_bm_covariance(cov.w_times[i], left, H, rho);
            cov.matrix(i, nw + j) = v;
            cov.matrix(nw + j, i) = v;
        }
    for (Eigen::Index j = 0; j < nb; ++j) cov.matrix(nw + j, nw + j) = dt;
    return cov;
}

JointCovariance build_joint_covariance(const TimeGrid& grid, double H, double rho) {
    const std::size_t n = grid.n_steps();
    std::vector<double> w_times;
    w_times.reserve(n + 1);
    if (grid.start_time > 0.0) w_times.push_back(grid.nodes.front());
    for (std::size_t i = 1; i <= n; ++i) w_times.push_back(grid.nodes[i]);
    std::vector<double> b_left(grid.nodes.begin(), grid.nodes.end() - 1);
    return assemble_joint_covariance(std::move(w_times), std::move(b_left), grid.dt, H, rho);
}

std::string covariance_health(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) return "covariance_square";
    if (!m.allFinite()) return "covariance_finite";
    const double scale = std::max(1e-300, m.diagonal().cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > 1e-12 * scale) return "covariance_symmetry";
    return {};
}

CholeskyFactor factorize(const JointCovariance& cov) {
    const std::string health = covariance_health(cov.matrix);
    if (!health.empty()) throw std::invalid_argument("factorize: " + health + " violated");

    const Eigen::Index dim = cov.dimension();
    Eigen::LLT<Eigen::MatrixXd> llt(cov.matrix);
    if (llt.info() == Eigen::Success) return {llt.matrixL(), 0.0};

    const double base = 1e-12 * cov.matrix.trace() / static_cast<double>(dim);
    double jitter = base;
    for (int attempt = 0; attempt < 3; ++attempt, jitter *= 10.0) {
        Eigen::MatrixXd shifted = cov.matrix;
        shifted.diagonal().array() += jitter;
        llt.compute(shifted);
        if (llt.info() == Eigen::Success) return {llt.matrixL(), jitter};
    }
    throw NotPositiveDefinite("covariance not factorizable after jitter escalation");
}

PathSampler::PathSampler(const JointCovariance& cov)
    : factor_(factorize(cov)), n_w_(cov.n_w()), n_b_(cov.n_b()) {}

void PathSampler::sample_into(PathBatch& out, Eigen::Index n_paths, std::uint64_t seed,
                              std::uint64_t batch_index) const {
    if (n_paths < 0) throw std::invalid_argument("sample_into: negative path count");
    const Eigen::Index dim = n_w_ + n_b_;
    out.seed = seed;
    out.batch_index = batch_index;
    out.wh.resize(n_w_, n_paths);
    out.db.resize(n_b_, n_paths);
    if (n_paths == 0) return;

    thread_local Eigen::MatrixXd z;
    thread_local Eigen::MatrixXd x;
    z.resize(dim, n_paths);
    x.resize(dim, n_paths);

    NormalStream stream(seed, batch_index);
    stream.fill(std::span<double>(z.data(), static_cast<std::size_t>(dim * n_paths)));
    x.noalias() = factor_.lower.triangularView<Eigen::Lower>() * z;
    out.wh = x.topRows(n_w_);
    out.db = x.bottomRows(n_b_);
}

PathBatch PathSampler::sample(Eigen::Index n_paths, std::uint64_t seed,
                              std::uint64_t batch_index) const {
    PathBatch out;
    sample_into(out, n_paths, seed, batch_index);
    return out;
}

PathBatch sample_paths(const JointCovariance& cov, Eigen::Index n_paths, std::uint64_t seed,
                       std::uint64_t batch_index) {
    return PathSampler(cov).sample(n_paths, seed, batch_index);
}

}  // namespace roughvol
