#pragma once

#include <cstddef>
#include <vector>

namespace roughvol {

/// Uniform simulation grid on [t, tau] with the forward-start date T pinned to
/// a node. Node times are absolute calendar times; the process origin (where
/// the fractional driver is zero) is calendar time zero.
struct TimeGrid {
    double start_time = 0.0;     // t
    double forward_start = 0.0;  // T, grid.nodes[forward_index]
    double maturity = 0.0;       // tau, grid.nodes.back()
    int steps_per_year = 0;
    double dt = 0.0;  // 1 / steps_per_year
    std::vector<double> nodes;
    std::size_t forward_index = 0;

    std::size_t n_steps() const { return nodes.size() - 1; }

    /// Validates t >= 0, t <= T < tau and that both T - t and tau - T are
    /// integer multiples of 1/steps_per_year, then snaps T and tau onto the
    /// constructed nodes so downstream arithmetic sees exact node times.
    static TimeGrid make(double t, double T, double tau, int steps_per_year);
};

}  // namespace roughvol
