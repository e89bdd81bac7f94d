#include "roughvol/rbergomi.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

using namespace roughvol;

TEST_SUITE("rbergomi") {

TEST_CASE("parameter validation") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());

    ModelParams bad = p;
    bad.sigma0 = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.sigma0 = -0.2;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.alpha = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.H = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.H = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.H = 0.5;  // open interval (0, 1): the Markovian point is allowed
    CHECK_NOTHROW(bad.validate());
    bad = p;
    bad.rho = -1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.rho = 1.0;  // endpoints allowed
    CHECK_NOTHROW(bad.validate());
    bad.rho = -1.0;
    CHECK_NOTHROW(bad.validate());
    bad = p;
    bad.alpha = 0.0;  // Black-Scholes limit allowed
    CHECK_NOTHROW(bad.validate());
}

TEST_CASE("variance path applies the exact exponential map") {
    ModelParams p;  // sigma0 = 0.2, alpha = 0.8, H = 0.1
    const std::array<double, 3> times{0.5, 1.0, 2.0};
    const std::array<double, 3> wh{0.3, 0.0, -0.4};
    std::array<double, 3> out{};
    variance_path(p, times, wh, out);

    for (std::size_t i = 0; i < 3; ++i) {
        const double expected =
            p.sigma0 * p.sigma0 *
            std::exp(p.alpha * wh[i] -
                     0.5 * p.alpha * p.alpha * std::pow(times[i], 2.0 * p.H));
        CHECK(out[i] == doctest::Approx(expected).epsilon(1e-15));
    }
    // Frozen spot check: 0.04 exp(-0.32) at t = 1, w = 0.
    CHECK(out[1] == doctest::Approx(0.0290459614829476369942).epsilon(1e-14));
}

TEST_CASE("variance path with alpha zero is flat at sigma0^2") {
    ModelParams p;
    p.alpha = 0.0;
    const std::array<double, 2> times{0.5, 1.0};
    const std::array<double, 2> wh{5.0, -5.0};
    std::array<double, 2> out{};
    variance_path(p, times, wh, out);
    CHECK(out[0] == p.sigma0 * p.sigma0);
    CHECK(out[1] == p.sigma0 * p.sigma0);
}

TEST_CASE("variance path rejects mismatched spans") {
    ModelParams p;
    const std::array<double, 2> times{0.5, 1.0};
    const std::array<double, 3> wh{0.0, 0.0, 0.0};
    std::array<double, 2> out{};
    CHECK_THROWS_AS(variance_path(p, times, wh, out), std::invalid_argument);
}

TEST_CASE("log price increment is the left-point Euler sum") {
    ModelParams p;
    const TimeGrid grid = TimeGrid::make(0.0, 0.5, 1.0, 4);  // nodes 0,.25,.5,.75,1
    const std::vector<double> sig2{0.04, 0.05, 0.03, 0.06, 0.02};
    const std::vector<double> db{0.1, -0.2, 0.05, 0.0};

    // Only [T, tau) contributes: intervals starting at nodes 2 and 3.
    const double dt = grid.dt;
    double expected = 0.0;
    for (int i = 2; i <= 3; ++i)
        expected += -0.5 * sig2[static_cast<std::size_t>(i)] * dt +
                    std::sqrt(sig2[static_cast<std::size_t>(i)]) *
                        db[static_cast<std::size_t>(i)];
    CHECK(log_price_increment(p, grid, sig2, db) ==
          doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("alpha zero reproduces the exact lognormal increment") {
    ModelParams p;
    p.alpha = 0.0;
    const TimeGrid grid = TimeGrid::make(0.0, 0.25, 1.0, 8);
    const std::size_t n = grid.nodes.size();
    const std::vector<double> sig2(n, p.sigma0 * p.sigma0);
    std::vector<double> db(n - 1, 0.0);
    db[3] = 0.07;
    db[5] = -0.02;

    const double window = 1.0 - 0.25;
    const double sum_db = 0.07 - 0.02;
    CHECK(log_price_increment(p, grid, sig2, db) ==
          doctest::Approx(-0.5 * p.sigma0 * p.sigma0 * window + p.sigma0 * sum_db)
              .epsilon(1e-14));
}

TEST_CASE("forward vol is the left-Riemann root mean square") {
    const TimeGrid grid = TimeGrid::make(0.0, 0.5, 1.0, 4);
    const std::vector<double> sig2{9.0, 9.0, 0.04, 0.16, 9.0};
    // Window reads nodes 2 and 3; the node at tau is excluded.
    CHECK(forward_vol(grid, sig2) == doctest::Approx(std::sqrt(0.1)).epsilon(1e-15));

    // Constant variance comes back exactly.
    const std::vector<double> flat(5, 0.0625);
    CHECK(forward_vol(grid, flat) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("forward vol rejects short inputs") {
    const TimeGrid grid = TimeGrid::make(0.0, 0.5, 1.0, 4);
    const std::vector<double> sig2{9.0, 9.0, 0.04};
    CHECK_THROWS_AS(forward_vol(grid, sig2), std::invalid_argument);
}

}  // TEST_SUITE
