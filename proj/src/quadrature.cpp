#include "ewens/quadrature.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "ewens/core.hpp"

namespace ewens::quad {
namespace {

// 15-point Kronrod extension of 7-point Gauss on [-1, 1].
constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000,
};
constexpr double kWeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
};
constexpr double kWeightsG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
};

struct PanelResult {
    double value;
    double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum_k = 0.0;
    double sum_g = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = half * kNodes[i];
        const double f_lo = f(mid - dx);
        const double f_hi = (i == 7) ? 0.0 : f(mid + dx);  // centre node counted once
        const double pair = (i == 7) ? f_lo : f_lo + f_hi;
        sum_k += kWeightsK[i] * pair;
        if (i % 2 == 1) sum_g += kWeightsG[i / 2] * pair;
    }
    const double value = sum_k * half;
    return PanelResult{value, std::abs((sum_k - sum_g) * half)};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol) {
    if (a == b) return 0.0;
    const double sign = (a < b) ? 1.0 : -1.0;
    if (a > b) std::swap(a, b);

    struct Panel {
        double a, b, tol;
    };
    std::vector<Panel> stack{{a, b, abs_tol}};
    double total = 0.0;
    int budget = 200000;
    while (!stack.empty()) {
        if (--budget == 0) throw ResourceError("integrate: panel budget exhausted");
        const Panel p = stack.back();
        stack.pop_back();
        const auto r = gk15(f, p.a, p.b);
        const double width = p.b - p.a;
        if (r.error <= p.tol || width <= 1e-14 * (std::abs(p.a) + std::abs(p.b) + 1.0)) {
            total += r.value;
            continue;
        }
        const double mid = 0.5 * (p.a + p.b);
        stack.push_back({p.a, mid, 0.5 * p.tol});
        stack.push_back({mid, p.b, 0.5 * p.tol});
    }
    return sign * total;
}

double integrate_right_singular(const std::function<double(double)>& g, double a, double c,
                                double theta, double abs_tol) {
    if (!(theta > 0.0)) throw std::domain_error("integrate_right_singular: theta must be > 0");
    if (a >= c) return 0.0;
    if (theta >= 1.0) {
        return integrate([&](double u) { return g(u) * std::pow(c - u, theta - 1.0); }, a, c,
                         abs_tol);
    }
    // u = c - v^(1/theta) maps the weight (c-u)^(theta-1) du to dv / theta.
    const double v_hi = std::pow(c - a, theta);
    return integrate([&](double v) { return g(c - std::pow(v, 1.0 / theta)); }, 0.0, v_hi,
                     abs_tol * theta) /
           theta;
}

}  // namespace ewens::quad
