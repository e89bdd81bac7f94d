#include "roughvol/gaussian_process.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "roughvol/time_grid.hpp"
#include "support/oracles.hpp"

using namespace roughvol;

TEST_SUITE("gaussian_process") {

TEST_CASE("fractional autocovariance reference values") {
    // Frozen from a high precision arbitrary-precision quadrature run.
    CHECK(fbm_autocovariance(1.0, 0.5, 0.1) ==
          doctest::Approx(0.2588015193983138655483).epsilon(1e-10));
    CHECK(fbm_autocovariance(1.0, 0.5, 0.3) ==
          doctest::Approx(0.4620946906970620379052).epsilon(1e-10));
    CHECK(fbm_autocovariance(2.0, 0.5, 0.05) ==
          doctest::Approx(0.09864560779611477978912).epsilon(1e-10));
    CHECK(fbm_autocovariance(1.0, 0.25, 0.3) ==
          doctest::Approx(0.2551448238533841547047).epsilon(1e-10));
    // Near-diagonal arguments keep the substituted integrand mild.
    CHECK(fbm_autocovariance(4.0, 3.98, 0.05) ==
          doctest::Approx(0.5550081575221209350955).epsilon(1e-9));
    CHECK(fbm_autocovariance(1.0, 0.999, 0.1) ==
          doctest::Approx(0.8035654483142732645592).epsilon(1e-9));
}

TEST_CASE("autocovariance diagonal is t^2H") {
    for (const double H : {0.05, 0.1, 0.3, 0.5, 0.8})
        for (const double t : {0.1, 0.5, 1.0, 2.5})
            CHECK(fbm_autocovariance(t, t, H) ==
                  doctest::Approx(std::pow(t, 2.0 * H)).epsilon(1e-14));
}

TEST_CASE("autocovariance is symmetric in its time arguments") {
    CHECK(fbm_autocovariance(1.7, 0.4, 0.1) ==
          doctest::Approx(fbm_autocovariance(0.4, 1.7, 0.1)).epsilon(1e-14));
}

TEST_CASE("H = 1/2 reduces to Brownian motion") {
    CHECK(fbm_autocovariance(1.0, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    for (const double t : {0.2, 0.7, 1.3})
        for (const double s : {0.1, 0.7, 2.0})
            CHECK(fbm_autocovariance(t, s, 0.5) ==
                  doctest::Approx(std::min(t, s)).epsilon(1e-10));
}

TEST_CASE("autocovariance agrees with an independent Gauss-Jacobi oracle") {
    for (const double H : {0.05, 0.1, 0.3, 0.49})
        for (const double t : {0.5, 1.0, 2.5})
            for (const double frac : {0.2, 0.5, 0.9}) {
                const double s = frac * t;
                const double oracle = testsupport::fbm_autocov_oracle(t, s, H);
                CHECK(fbm_autocovariance(t, s, H) == doctest::Approx(oracle).epsilon(1e-9));
            }
}

TEST_CASE("cross covariance with the price driver") {
    // Frozen closed-form evaluations.
    CHECK(fbm_bm_covariance(1.0, 2.0, 0.1, -0.8) ==
          doctest::Approx(-0.5962847939999439190424).epsilon(1e-14));
    CHECK(fbm_bm_covariance(0.5, 0.25, 0.3, -0.8) ==
          doctest::Approx(-0.1893673516913191148985).epsilon(1e-14));
    CHECK(fbm_bm_covariance(2.0, 0.5, 0.05, 1.0) ==
          doctest::Approx(0.1231896088438926176972).epsilon(1e-14));

    // Saturation: B increments after t are independent of W^H_t.
    const double sat = fbm_bm_covariance(1.0, 1.0, 0.1, -0.8);
    CHECK(fbm_bm_covariance(1.0, 5.0, 0.1, -0.8) == doctest::Approx(sat).epsilon(1e-14));
    // rho = 0 kills the coupling entirely.
    CHECK(fbm_bm_covariance(1.0, 2.0, 0.1, 0.0) == 0.0);
}

TEST_CASE("joint covariance layout and health") {
    const TimeGrid grid = TimeGrid::make(0.0, 0.25, 0.5, 8);
    const JointCovariance cov = build_joint_covariance(grid, 0.1, -0.7);

    // Grid anchored at the origin: node 0 carries no W^H value.
    CHECK(cov.n_w() == 4);
    CHECK(cov.n_b() == 4);
    CHECK(cov.dimension() == 8);
    CHECK(covariance_health(cov.matrix).empty());

    // W block diagonal is t^2H, B block is dt * identity.
    for (Eigen::Index i = 0; i < cov.n_w(); ++i)
        CHECK(cov.matrix(i, i) ==
              doctest::Approx(std::pow(cov.w_times[static_cast<std::size_t>(i)], 0.2))
                  .epsilon(1e-12));
    for (Eigen::Index i = 0; i < cov.n_b(); ++i) {
        CHECK(cov.matrix(cov.n_w() + i, cov.n_w() + i) ==
              doctest::Approx(grid.dt).epsilon(1e-14));
        for (Eigen::Index j = 0; j < i; ++j)
            CHECK(cov.matrix(cov.n_w() + i, cov.n_w() + j) == 0.0);
    }
}

TEST_CASE("grids away from the origin keep the first node") {
    const TimeGrid grid = TimeGrid::make(0.5, 0.75, 1.0, 8);
    const JointCovariance cov = build_joint_covariance(grid, 0.1, 0.0);
    CHECK(cov.n_w() == 5);  // node at t = 0.5 has positive time, so it is sampled
    CHECK(cov.w_times.front() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("a window marginal is the matching submatrix of the full covariance") {
    const TimeGrid grid = TimeGrid::make(0.0, 0.5, 1.0, 8);
    const double H = 0.1, rho = -0.8;
    const JointCovariance full = build_joint_covariance(grid, H, rho);

    // The pricing window [T, tau) reads W^H at nodes 4..7 and B over the same
    // intervals; assemble exactly that marginal.
    const std::vector<double> w_sub(grid.nodes.begin() + 4, grid.nodes.begin() + 8);
    const JointCovariance sub = assemble_joint_covariance(w_sub, w_sub, grid.dt, H, rho);

    // Entries must be bit-identical: same covariance functions, same times.
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) {
            CHECK(sub.matrix(i, j) == full.matrix(3 + i, 3 + j));          // W-W
            CHECK(sub.matrix(i, 4 + j) == full.matrix(3 + i, 8 + 4 + j));  // W-B
        }
}

TEST_CASE("health check flags asymmetry") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
    CHECK(covariance_health(m).empty());
    m(0, 1) = 1e-3;
    CHECK(covariance_health(m) == "covariance_symmetry");
}

TEST_CASE("cholesky reconstructs the covariance") {
    const TimeGrid grid = TimeGrid::make(0.0, 0.5, 1.5, 12);
    const JointCovariance cov = build_joint_covariance(grid, 0.05, -0.8);
    const CholeskyFactor f = factorize(cov);
    CHECK(f.jitter == 0.0);
    const Eigen::MatrixXd recon = f.lower * f.lower.transpose();
    CHECK((recon - cov.matrix).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("duplicate node times force the jitter path") {
    // Two identical W^H times make the matrix exactly singular.
    JointCovariance cov =
        assemble_joint_covariance({0.5, 0.5, 1.0}, {0.5}, 0.5, 0.1, 0.0);
    const CholeskyFactor f = factorize(cov);
    CHECK(f.jitter > 0.0);
    const Eigen::MatrixXd recon = f.lower * f.lower.transpose();
    CHECK((recon - cov.matrix).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("assemble rejects invalid parameters") {
    CHECK_THROWS(assemble_joint_covariance({0.5}, {0.5}, 0.0, 0.1, 0.0));   // dt = 0
    CHECK_THROWS(assemble_joint_covariance({0.5}, {0.5}, 0.25, 0.0, 0.0));  // H out of range
    CHECK_THROWS(assemble_joint_covariance({0.5}, {0.5}, 0.25, 1.0, 0.0));
}

TEST_CASE("sampled batches reproduce the covariance statistically") {
    const std::vector<double> w_times{0.25, 0.5, 0.75, 1.0};
    const std::vector<double> b_left{0.25, 0.5, 0.75};
    const JointCovariance cov = assemble_joint_covariance(w_times, b_left, 0.25, 0.1, -0.8);
    const PathSampler sampler(cov);

    const Eigen::Index n = 60000;
    const PathBatch batch = sampler.sample(n, 99, 0);
    Eigen::MatrixXd stacked(cov.dimension(), n);
    stacked.topRows(cov.n_w()) = batch.wh;
    stacked.bottomRows(cov.n_b()) = batch.db;

    const Eigen::MatrixXd sample_cov =
        stacked * stacked.transpose() / static_cast<double>(n);
    for (Eigen::Index i = 0; i < cov.dimension(); ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double cii = cov.matrix(i, i);
            const double cjj = cov.matrix(j, j);
            const double cij = cov.matrix(i, j);
            const double se = std::sqrt((cii * cjj + cij * cij) / static_cast<double>(n));
            CHECK(std::abs(sample_cov(i, j) - cij) <= 4.0 * se);
        }
}

TEST_CASE("sampling is deterministic and batch-keyed") {
    const JointCovariance cov =
        assemble_joint_covariance({0.5, 1.0}, {0.5}, 0.5, 0.3, 0.5);
    const PathSampler sampler(cov);
    const PathBatch a = sampler.sample(16, 11, 2);
    const PathBatch b = sampler.sample(16, 11, 2);
    const PathBatch c = sampler.sample(16, 11, 3);
    CHECK((a.wh.array() == b.wh.array()).all());
    CHECK((a.db.array() == b.db.array()).all());
    CHECK((a.wh.array() != c.wh.array()).any());

    PathBatch reused;
    sampler.sample_into(reused, 16, 11, 2);
    CHECK((reused.wh.array() == a.wh.array()).all());
    CHECK((reused.db.array() == a.db.array()).all());
}

TEST_CASE("zero-path requests are empty, negative ones are errors") {
    // Rejecting an empty batch is the ensemble's job; the sampler just
    // returns empty storage so callers can size buffers uniformly.
    const JointCovariance cov = assemble_joint_covariance({0.5}, {0.5}, 0.5, 0.3, 0.0);
    const PathSampler sampler(cov);
    const PathBatch empty = sampler.sample(0, 1, 0);
    CHECK(empty.n_paths() == 0);
    CHECK(empty.wh.rows() == cov.n_w());
    CHECK_THROWS_AS(sampler.sample(-1, 1, 0), std::invalid_argument);
}

}  // TEST_SUITE
