#include "roughvol/rbergomi.hpp"

#include <cmath>
#include <stdexcept>

namespace roughvol {

void ModelParams::validate() const {
    if (!(sigma0 > 0.0)) throw std::invalid_argument("ModelParams: sigma0 must be positive");
    if (!(alpha >= 0.0)) throw std::invalid_argument("ModelParams: alpha must be >= 0");
    if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("ModelParams: H must lie in (0, 1)");
    if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("ModelParams: rho must lie in [-1, 1]");
    if (!std::isfinite(x0)) throw std::invalid_argument("ModelParams: x0 must be finite");
}

void variance_path(const ModelParams& params, std::span<const double> times,
                   std::span<const double> wh, std::span<double> out) {
    params.validate();
    if (times.size() != wh.size() || times.size() != out.size())
        throw std::invalid_argument("variance_path: span lengths differ");
    const double s2 = params.sigma0 * params.sigma0;
    const double a = params.alpha;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double drift = 0.5 * a * a * std::pow(times[i], 2.0 * params.H);
        out[i] = s2 * std::exp(a * wh[i] - drift);
    }
}

double log_price_increment(const ModelParams& params, const TimeGrid& grid,
                           std::span<const double> sig2, std::span<const double> db) {
    params.validate();
    if (sig2.size() != grid.nodes.size())
        throw std::invalid_argument("log_price_increment: sig2 must cover every grid node");
    if (db.size() != grid.n_steps())
        throw std::invalid_argument("log_price_increment: db must cover every grid interval");
    double x = 0.0;
    for (std::size_t i = grid.forward_index; i < grid.n_steps(); ++i)
        x += -0.5 * sig2[i] * grid.dt + std::sqrt(sig2[i]) * db[i];
    return x;
}

double forward_vol(const TimeGrid& grid, std::span<const double> sig2) {
    if (sig2.size() != grid.nodes.size())
        throw std::invalid_argument("forward_vol: sig2 must cover every grid node");
    double acc = 0.0;
    for (std::size_t i = grid.forward_index; i < grid.n_steps(); ++i) acc += sig2[i];
    const double window = grid.maturity - grid.forward_start;
    return std::sqrt(acc * grid.dt / window);
}

}  // namespace roughvol
