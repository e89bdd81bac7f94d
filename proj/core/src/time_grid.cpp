#include "roughvol/time_grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace roughvol {

namespace {

std::size_t snap_to_steps(double interval, int steps_per_year, const char* what) {
    const double raw = interval * steps_per_year;
    const double rounded = std::round(raw);
    if (std::abs(raw - rounded) > 1e-6)
        throw std::invalid_argument(std::string(what) +
                                    " is not an integer number of grid steps");
    return static_cast<std::size_t>(rounded);
}

}  // namespace

TimeGrid TimeGrid::make(double t, double T, double tau, int steps_per_year) {
    if (!(t >= 0.0)) throw std::invalid_argument("TimeGrid: start time must be >= 0");
    if (!(t <= T)) throw std::invalid_argument("TimeGrid: need t <= T");
    if (!(T < tau)) throw std::invalid_argument("TimeGrid: need T < tau");
    if (steps_per_year <= 0) throw std::invalid_argument("TimeGrid: steps_per_year must be positive");

    const std::size_t steps_to_T = snap_to_steps(T - t, steps_per_year, "T - t");
    const std::size_t steps_to_tau = snap_to_steps(tau - t, steps_per_year, "tau - t");
    if (steps_to_tau <= steps_to_T)
        throw std::invalid_argument("TimeGrid: tau must be at least one step past T");
    if (steps_to_tau > 2'000'000) throw std::invalid_argument("TimeGrid: grid too large");

    TimeGrid g;
    g.start_time = t;
    g.steps_per_year = steps_per_year;
    g.dt = 1.0 / steps_per_year;
    g.nodes.resize(steps_to_tau + 1);
    for (std::size_t i = 0; i <= steps_to_tau; ++i)
        g.nodes[i] = t + static_cast<double>(i) / steps_per_year;
    g.forward_index = steps_to_T;
    g.forward_start = g.nodes[steps_to_T];
    g.maturity = g.nodes.back();
    return g;
}

}  // namespace roughvol
