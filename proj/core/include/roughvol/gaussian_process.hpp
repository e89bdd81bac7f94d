#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "roughvol/time_grid.hpp"

namespace roughvol {

/// E(W^H_t W^H_s) for the Riemann-Liouville fractional driver
/// W^H_t = sqrt(2H) int_0^t (t-u)^(H-1/2) dW_u, evaluated via the
/// scale-reduced integral s^2H int_0^1 2H (1-x)^(H-1/2) (t/s - x)^(H-1/2) dx
/// (s <= t) with the substitution u = (1-x)^(H+1/2) removing the endpoint
/// singularity before adaptive quadrature. Diagonal is closed-form t^2H.
double fbm_autocovariance(double t, double s, double H);

/// E(W^H_t B_s) = rho sqrt(2H)/(H+1/2) (t^(H+1/2) - (t - min(t,s))^(H+1/2)).
/// Correlation with the price driver is embedded here; the formula saturates
/// once s >= t because later B increments are independent of W^H_t.
double fbm_bm_covariance(double t, double s, double H, double rho);

/// Per-interval variances of the Brownian increments of a grid (just dt for a
/// uniform grid; disjoint increments are uncorrelated).
std::vector<double> bm_increment_covariance(const TimeGrid& grid);

/// Joint Gaussian layout: W^H node values first, then B increments.
/// For a grid with N increments the W block holds nodes 1..N (node 0 is
/// included too when its time is positive, i.e. grids not anchored at the
/// process origin), so the usual dimension is 2N.
struct JointCovariance {
    Eigen::MatrixXd matrix;
    std::vector<double> w_times;         // times carrying W^H values
    std::vector<double> b_left;          // left endpoints of the B increments
    double dt = 0.0;
    Eigen::Index n_w() const { return static_cast<Eigen::Index>(w_times.size()); }
    Eigen::Index n_b() const { return static_cast<Eigen::Index>(b_left.size()); }
    Eigen::Index dimension() const { return matrix.rows(); }
};

JointCovariance build_joint_covariance(const TimeGrid& grid, double H, double rho);

/// Covariance for an arbitrary layout of W^H node times and B increments
/// (all increments share the spacing dt). build_joint_covariance wraps this
/// with the standard full-grid layout; the pricing engine passes only the
/// window of nodes the payoff reads, which is the exact Gaussian marginal.
JointCovariance assemble_joint_covariance(std::vector<double> w_times,
                                          std::vector<double> b_left, double dt, double H,
                                          double rho);

/// Checks symmetry (relative 1e-12) and finiteness. Returns an empty string
/// when healthy, otherwise the name of the violated invariant.
std::string covariance_health(const Eigen::MatrixXd& m);

struct CholeskyFactor {
    Eigen::MatrixXd lower;
    double jitter = 0.0;  // diagonal shift that was needed, 0 for clean PSD
};

/// LLT with escalating diagonal jitter: starts at 1e-12 * trace/dim and
/// multiplies by 10, at most three retries, then throws NotPositiveDefinite.
CholeskyFactor factorize(const JointCovariance& cov);

struct PathBatch {
    Eigen::MatrixXd wh;  // n_w x n_paths, W^H node values
    Eigen::MatrixXd db;  // n_b x n_paths, B increments
    std::uint64_t seed = 0;
    std::uint64_t batch_index = 0;
    Eigen::Index n_paths() const { return wh.cols(); }
};

/// Holds the factorized covariance so repeated batches skip the Cholesky.
/// Batch content is a pure function of (seed, batch_index, covariance):
/// normals come from a counter-based stream keyed by (seed, batch_index) and
/// are consumed in a fixed column-major order.
class PathSampler {
  public:
    explicit PathSampler(const JointCovariance& cov);

    PathBatch sample(Eigen::Index n_paths, std::uint64_t seed, std::uint64_t batch_index) const;

    /// In-place variant for hot loops; reuses the batch's storage.
    void sample_into(PathBatch& out, Eigen::Index n_paths, std::uint64_t seed,
                     std::uint64_t batch_index) const;

    const CholeskyFactor& factor() const { return factor_; }
    Eigen::Index n_w() const { return n_w_; }
    Eigen::Index n_b() const { return n_b_; }

  private:
    CholeskyFactor factor_;
    Eigen::Index n_w_ = 0;
    Eigen::Index n_b_ = 0;
};

/// One-shot convenience wrapper (factorizes every call).
PathBatch sample_paths(const JointCovariance& cov, Eigen::Index n_paths, std::uint64_t seed,
                       std::uint64_t batch_index);

}  // namespace roughvol
