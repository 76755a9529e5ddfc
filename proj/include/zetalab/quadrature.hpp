#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "zetalab/complex_util.hpp"

namespace zetalab {

// Gauss-Legendre rule on [-1, 1].
struct GLRule {
    std::vector<double> x;  // nodes, ascending
    std::vector<double> w;  // weights
};

// Cached n-point Gauss-Legendre rule (Newton iteration on P_n). Thread-safe.
const GLRule& gauss_legendre(int n);

// Integral of f over [a, b] with one n-point Gauss-Legendre panel.
template <typename F>
auto gl_integrate(F&& f, double a, double b, int n) {
    const GLRule& r = gauss_legendre(n);
    const double c = 0.5 * (a + b), s = 0.5 * (b - a);
    auto acc = f(c + s * r.x[0]) * (s * r.w[0]);
    for (int i = 1; i < n; ++i) acc += f(c + s * r.x[i]) * (s * r.w[i]);
    return acc;
}

// Same integral split into `panels` equal panels (for oscillatory integrands:
// scale the panel count with the frequency).
template <typename F>
auto gl_integrate_panels(F&& f, double a, double b, int n, int panels) {
    const double step = (b - a) / panels;
    auto acc = gl_integrate(f, a, a + step, n);
    for (int k = 1; k < panels; ++k)
        acc += gl_integrate(f, a + k * step, a + (k + 1) * step, n);
    return acc;
}

// Tanh-sinh quadrature over (a, b) for integrands with integrable endpoint
// singularities. The integrand is called as f(u, da, db) where da = u - a and
// db = b - u are computed without cancellation, so u^{p} (1-u)^{q} factors
// with p, q > -1 can be evaluated stably from the distances. Doubles the node
// density until two successive levels agree to `tol` (relative).
template <typename T, typename F>
T tanh_sinh(F&& f, double a, double b, double tol = 1e-12, int max_level = 12) {
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    const double pi_half = 1.5707963267948966;
    // One node evaluation at transform parameter y; returns weight * f.
    // Guards: once the weight or an endpoint distance underflows, the node
    // contributes nothing (the raw product would be 0 * inf otherwise).
    auto term = [&](double y) -> T {
        const double s = std::sinh(y);
        const double ch = std::cosh(pi_half * s);
        const double w = pi_half * std::cosh(y) / (ch * ch);
        // 1 - tanh(z) = 2 / (1 + e^{2z}), stable at both signs of z.
        const double dm = 2.0 / (1.0 + std::exp(M_PI * s));   // 1 - x
        const double dp = 2.0 / (1.0 + std::exp(-M_PI * s));  // 1 + x
        if (w == 0.0 || dm == 0.0 || dp == 0.0) return T{};
        const double x = 0.5 * (dp - dm);
        const double u = c + r * x;
        return f(u, r * dp, r * dm) * (r * w);
    };
    const double y_max = 6.0;  // distances and weights stay normal up to here
    double h = 1.0;
    T sum = term(0.0);
    for (double y = h; y <= y_max; y += h) sum += term(y) + term(-y);
    T prev = sum * h;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        // Add the new midpoints only.
        T add{};
        bool any = false;
        for (double y = h; y <= y_max; y += 2.0 * h) {
            add += term(y) + term(-y);
            any = true;
        }
        if (any) sum += add;
        T cur = sum * h;
        double scale = std::abs(cur);
        if (level >= 3 && std::abs(cur - prev) <= tol * (scale > 0 ? scale : 1.0))
            return cur;
        prev = cur;
    }
    return prev;
}

// (1/2πi) ∮_{|z-c|=r} f(z) dz by the n-node trapezoid rule (geometric
// convergence for f analytic in an annulus around the circle).
template <typename F>
cplx circle_contour(F&& f, cplx c, double r, int n) {
    cplx acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * M_PI * k / n;
        const cplx e{std::cos(th), std::sin(th)};
        acc += f(c + r * e) * e;
    }
    return acc * (r / static_cast<double>(n));
}

}  // namespace zetalab
