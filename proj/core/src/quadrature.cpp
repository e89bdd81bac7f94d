#include "roughvol/quadrature.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "roughvol/errors.hpp"

namespace roughvol {
namespace {

// QUADPACK dqk15 abscissae/weights. xgk holds the positive Kronrod nodes,
// even indices are the Kronrod extension, odd indices the embedded Gauss-7.
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEstimate {
    double gauss;
    double kronrod;
};

PanelEstimate eval_panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = wgk[7] * fc;
    double gauss = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * xgk[j];
        const double sum = f(c - x) + f(c + x);
        kron += wgk[j] * sum;
        if (j % 2 == 1) gauss += wg[j / 2] * sum;
    }
    return {gauss * h, kron * h};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, int max_panels) {
    if (a == b) return {0.0, 0.0, 0};
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    struct Panel {
        double a, b, value, error;
    };
    std::vector<Panel> stack;
    const PanelEstimate first = eval_panel(f, a, b);
    stack.push_back({a, b, first.kronrod, std::abs(first.kronrod - first.gauss)});

    QuadratureResult out;
    out.panels = 1;
    double done_value = 0.0;
    double done_error = 0.0;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double share = abs_tol * (p.b - p.a) / (b - a);
        if (p.error <= share || p.b - p.a < 1e-14 * (b - a)) {
            done_value += p.value;
            done_error += p.error;
            continue;
        }
        if (out.panels >= max_panels)
            throw NoConvergence("adaptive quadrature: panel budget exhausted");
        const double mid = 0.5 * (p.a + p.b);
        const PanelEstimate left = eval_panel(f, p.a, mid);
        const PanelEstimate right = eval_panel(f, mid, p.b);
        out.panels += 2;
        stack.push_back({p.a, mid, left.kronrod, std::abs(left.kronrod - left.gauss)});
        stack.push_back({mid, p.b, right.kronrod, std::abs(right.kronrod - right.gauss)});
    }
    out.value = sign * done_value;
    out.error_estimate = done_error;
    return out;
}

}  // namespace roughvol
