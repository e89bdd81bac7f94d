#pragma once

// Slow, independent reference implementations used only by tests. Everything
// here favors the most transparent numerical scheme available (fixed-order
// Gauss rules, composite midpoint grids, central differences) over the
// adaptive machinery in the library, so agreement between the two is
// evidence rather than tautology.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "roughvol/rbergomi.hpp"

namespace testsupport {

struct GaussRule {
    std::vector<double> nodes;    // in (-1, 1)
    std::vector<double> weights;  // include the (1-z)^a factor
};

// Gauss-Jacobi rule for weight (1-z)^a on [-1, 1] (the (1+z) exponent is 0)
// via the Golub-Welsch eigenvalue method on the symmetrized recurrence.
inline GaussRule gauss_jacobi(int n, double a) {
    if (n < 1) throw std::invalid_argument("rule order must be positive");
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    jac(0, 0) = -a / (a + 2.0);
    for (int k = 1; k < n; ++k) {
        const double kk = k;
        jac(k, k) = -(a * a) / ((2.0 * kk + a) * (2.0 * kk + a + 2.0));
        double beta;
        if (k == 1) {
            beta = 4.0 * (a + 1.0) / ((a + 2.0) * (a + 2.0) * (a + 3.0));
        } else {
            const double denom =
                (2.0 * kk + a) * (2.0 * kk + a) * (2.0 * kk + a + 1.0) * (2.0 * kk + a - 1.0);
            beta = 4.0 * kk * kk * (kk + a) * (kk + a) / denom;
        }
        jac(k, k - 1) = jac(k - 1, k) = std::sqrt(beta);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
    const double mu0 = std::pow(2.0, a + 1.0) / (a + 1.0);
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = eig.eigenvalues()(i);
        const double v0 = eig.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

// E(W^H_t W^H_s) for s <= t by an 80-point Gauss-Jacobi rule applied to
//   2H (s/2)^(H+1/2) int_{-1}^{1} (1-z)^(H-1/2) (t - s(1+z)/2)^(H-1/2) dz,
// which is exact up to the polynomial accuracy of the rule since the
// non-weight factor is analytic whenever t > s. The t == s case falls back
// to the closed form t^(2H).
inline double fbm_autocov_oracle(double t, double s, double H) {
    if (s > t) std::swap(t, s);
    if (s == t) return std::pow(t, 2.0 * H);
    if (s == 0.0) return 0.0;
    const GaussRule rule = gauss_jacobi(80, H - 0.5);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double u = s * (1.0 + rule.nodes[i]) / 2.0;
        sum += rule.weights[i] * std::pow(t - u, H - 0.5);
    }
    return 2.0 * H * std::pow(s / 2.0, H + 0.5) * sum;
}

// Composite midpoint over m panels of f on [a, b].
template <typename F>
double midpoint(F&& f, double a, double b, int m) {
    const double h = (b - a) / m;
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += f(a + (i + 0.5) * h);
    return sum * h;
}

struct BruteForceConstants {
    double term1 = 0.0;
    double term2 = 0.0;
    double term3 = 0.0;
    double total() const { return term1 + term2 + term3; }
};

// The three limit coefficients by fixed-grid midpoint quadrature in power
// substituted variables (each substitution flattens one algebraic kernel so
// a uniform grid converges). delta drops out of the result; it is kept as a
// parameter precisely so tests can verify that homogeneity.
inline BruteForceConstants brute_force_limit_constants(const roughvol::ModelParams& p,
                                                       double delta = 1.0, int m = 500) {
    const double H = p.H;
    const double pw = H + 0.5;
    const double s0 = p.sigma0;
    const double common = p.rho * p.rho * p.alpha * p.alpha * s0;
    BruteForceConstants out;
    if (common == 0.0) return out;

    // int_s^delta (r-s)^(H-1/2) dr = (delta-s)^pw / pw, so the squared double
    // integral of the variance kernel needs only the outer s axis.
    const double a1 =
        midpoint([&](double s) { return std::pow(delta - s, pw); }, 0.0, delta, m) / pw;
    out.term1 = 3.0 * common * 2.0 * H * a1 * a1 / (8.0 * std::pow(delta, 3.0 + 2.0 * H));

    const double b2 =
        midpoint([&](double s) { return std::pow(delta - s, 2.0 * pw); }, 0.0, delta, m);
    out.term2 = -common * (H / 4.0) * b2 / (pw * pw * std::pow(delta, 2.0 + 2.0 * H));

    // Triple integral: u axis flattened by w = (u-r)^pw, r axis by
    // y = (r-s)^(2H), s axis plain.
    auto inner_u = [&](double s, double r) {
        const double top = std::pow(delta - r, pw);
        auto g = [&](double w) { return std::pow(r + std::pow(w, 1.0 / pw) - s, H - 0.5); };
        return midpoint(g, 0.0, top, m) / pw;
    };
    auto middle_r = [&](double s) {
        const double top = std::pow(delta - s, 2.0 * H);
        auto g = [&](double y) {
            const double r = s + std::pow(y, 1.0 / (2.0 * H));
            const double jac = std::pow(y, 1.0 / (2.0 * H) - 1.0) / (2.0 * H);
            return inner_u(s, r) * jac;
        };
        return midpoint(g, 0.0, top, m);
    };
    const double t3 = midpoint(middle_r, 0.0, delta, m);
    out.term3 = -common * H * t3 / std::pow(delta, 2.0 + 2.0 * H);
    return out;
}

// Three-grid geometric extrapolation of the oracle above. The composite
// midpoint error on the substituted kernels decays like a single power of
// the panel count whose ratio across grid doublings is empirically stable
// (2.9 to 3.2 over H in [0.05, 0.3]), so eliminating the leading term from
// the m, 2m, 4m sequence gains roughly two digits per term.
inline BruteForceConstants brute_force_extrapolated(const roughvol::ModelParams& p,
                                                    double delta = 1.0, int m = 125) {
    const BruteForceConstants c1 = brute_force_limit_constants(p, delta, m);
    const BruteForceConstants c2 = brute_force_limit_constants(p, delta, 2 * m);
    const BruteForceConstants c4 = brute_force_limit_constants(p, delta, 4 * m);
    auto aitken = [](double a, double b, double c) {
        const double d1 = b - a, d2 = c - b;
        if (d2 == 0.0 || d1 == d2) return c;
        const double ratio = d1 / d2;
        return c + d2 / (ratio - 1.0);
    };
    BruteForceConstants out;
    out.term1 = aitken(c1.term1, c2.term1, c4.term1);
    out.term2 = aitken(c1.term2, c2.term2, c4.term2);
    out.term3 = aitken(c1.term3, c2.term3, c4.term3);
    return out;
}

// d/ds of the bump response sigma0^2 alpha sqrt(2H) int_0^s (r-u)^(H-1/2) du
// by central difference. The difference of the two bump responses is the
// integral over [s-h, s+h], which is evaluated directly on a midpoint grid
// so the finite difference never subtracts two large quadrature results.
// This reconstructs the variance kernel without ever writing it down.
inline double fd_kernel_oracle(const roughvol::ModelParams& p, double s, double r,
                               double h = 1e-5) {
    auto f = [&](double u) { return std::pow(r - u, p.H - 0.5); };
    const double window = midpoint(f, s - h, s + h, 2000);
    return p.sigma0 * p.sigma0 * p.alpha * std::sqrt(2.0 * p.H) * window / (2.0 * h);
}

}  // namespace testsupport
