#include "zetalab/weights.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "zetalab/quadrature.hpp"

namespace zetalab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// -- catalog ----------------------------------------------------------------

double bump_psi_raw(double t) {
    const double a = t - 1.0, b = 2.0 - t;
    if (a <= 0.0 || b <= 0.0) return 0.0;
    return std::exp(-1.0 / (a * b));
}

double bump_psi_norm() {
    static std::once_flag once;
    static double norm = 0.0;
    std::call_once(once, [] {
        // Stable near the endpoints: a*b from the distances supplied by the rule.
        double mass = tanh_sinh<double>(
            [](double, double da, double db) { return std::exp(-1.0 / (da * db)); },
            1.0, 2.0, 1e-14);
        norm = 1.0 / mass;
    });
    return norm;
}

double bump_upsilon(double x) {
    if (x >= 1.0) return 0.0;
    if (x <= 0.0) return 1.0;
    return std::exp(-x * x / (1.0 - x * x));
}

// 630 u^4 (1-u)^4 on [0,1] has unit mass (1/B(5,5) = 630).
double taper_psi(double t) {
    const double a = t - 1.0, b = 2.0 - t;
    if (a <= 0.0 || b <= 0.0) return 0.0;
    const double ab = a * b;
    return 630.0 * ab * ab * ab * ab;
}

// 1 - 35x^4 + 84x^5 - 70x^6 + 20x^7: decreasing from 1 to 0 on [0,1] with
// derivative -140 x^3 (1-x)^3.
double taper_upsilon(double x) {
    if (x >= 1.0) return 0.0;
    if (x <= 0.0) return 1.0;
    const double x4 = x * x * x * x;
    return 1.0 + x4 * (-35.0 + x * (84.0 + x * (-70.0 + x * 20.0)));
}

}  // namespace

const TestFunctionPair& test_functions(const std::string& name) {
    static const TestFunctionPair bump{
        "bump",
        [](double t) { return bump_psi_norm() * bump_psi_raw(t); },
        bump_upsilon, 1.0, 0};
    static const TestFunctionPair taper{"poly-taper", taper_psi, taper_upsilon, 1.0, 1};
    if (name == "bump") return bump;
    if (name == "poly-taper") return taper;
    throw std::invalid_argument("test_functions: unknown pair '" + name + "'");
}

cplx fourier_psi(const TestFunctionPair& pair, double x) {
    // Panels sized so each sees at most ~3 oscillations of e^{-2 pi i x t};
    // the floor of 16 panels resolves the non-oscillatory shape (the bump's
    // endpoint flat spots have large high derivatives).
    const int panels =
        std::max(16, 1 + static_cast<int>(std::floor(std::abs(x) / 3.0)));
    return gl_integrate_panels(
        [&](double t) {
            const double ph = -kTwoPi * x * t;
            return pair.psi(t) * cplx{std::cos(ph), std::sin(ph)};
        },
        1.0, 2.0, 24, panels);
}

namespace {

// -- interpolated transform grid ---------------------------------------------

constexpr double kGridStep = 0.02;
constexpr double kWindow = 60.0;   // |psi-hat| <= ~4e-9 beyond this for the catalog
constexpr double kGridMax = 64.0;  // head-room for the interpolation stencil

struct PsiHatGrid {
    std::vector<cplx> val;  // psi-hat(k * kGridStep), k = 0..n-1
};

const PsiHatGrid& psi_hat_grid(const TestFunctionPair& pair) {
    static std::once_flag once[2];
    static PsiHatGrid grids[2];
    const int slot = pair.cache_slot;
    if (slot < 0 || slot > 1)
        throw std::invalid_argument("psi_hat_fast: catalog pairs only");
    std::call_once(once[slot], [&] {
        const int n = static_cast<int>(kGridMax / kGridStep) + 1;
        grids[slot].val.resize(n);
        for (int k = 0; k < n; ++k)
            grids[slot].val[k] = fourier_psi(pair, k * kGridStep);
    });
    return grids[slot];
}

}  // namespace

double psi_hat_window() { return kWindow; }

cplx psi_hat_fast(const TestFunctionPair& pair, double x) {
    const double ax = std::abs(x);
    if (ax > kWindow) return 0.0;
    const PsiHatGrid& g = psi_hat_grid(pair);
    // 6-point Lagrange stencil around ax.
    const int n = static_cast<int>(g.val.size());
    int j0 = static_cast<int>(std::floor(ax / kGridStep)) - 2;
    if (j0 < 0) j0 = 0;
    if (j0 > n - 6) j0 = n - 6;
    cplx acc = 0.0;
    for (int i = 0; i < 6; ++i) {
        double li = 1.0;
        const double xi = (j0 + i) * kGridStep;
        for (int j = 0; j < 6; ++j) {
            if (j == i) continue;
            const double xj = (j0 + j) * kGridStep;
            li *= (ax - xj) / (xi - xj);
        }
        acc += li * g.val[j0 + i];
    }
    // psi is real, so the transform at -x is the conjugate.
    return x >= 0.0 ? acc : std::conj(acc);
}

cplx mellin_upsilon_quadrature(const TestFunctionPair& pair, cplx s,
                               int node_multiplier) {
    if (s.real() <= 0.0)
        throw std::domain_error("mellin_upsilon: need Re s > 0");
    const double u0 = pair.upsilon(0.0);
    // Pole part integrated exactly; the remainder upsilon(x) - upsilon(0)
    // vanishes at 0 at least linearly, so dyadic panels toward 0 converge.
    const double tau = std::abs(s.imag());
    int nodes = 32 + static_cast<int>(std::ceil(0.25 * tau));
    if (nodes > 96) nodes = 96;
    nodes *= node_multiplier;
    if (nodes > 192) nodes = 192;
    // Panel count: tail below 2^{-K} contributes O(2^{-K(1+Re s)}).
    const double sr = std::min(s.real(), 3.0);
    int K = static_cast<int>(std::ceil(40.0 / (1.0 + sr))) + 6;
    if (K > 60) K = 60;
    cplx acc = u0 / s;
    double hi = 1.0;
    for (int k = 0; k < K; ++k) {
        const double lo = hi * 0.5;
        acc += gl_integrate(
            [&](double x) {
                return (pair.upsilon(x) - u0) * std::exp((s - 1.0) * std::log(x));
            },
            lo, hi, nodes);
        hi = lo;
    }
    return acc;
}

cplx mellin_upsilon(const TestFunctionPair& pair, cplx s) {
    if (s.real() <= 0.0)
        throw std::domain_error("mellin_upsilon: need Re s > 0");
    if (pair.cache_slot == 1) {
        // poly-taper: term-by-term Mellin of 1 - 35x^4 + 84x^5 - 70x^6 + 20x^7.
        return 1.0 / s - 35.0 / (s + 4.0) + 84.0 / (s + 5.0) - 70.0 / (s + 6.0) +
               20.0 / (s + 7.0);
    }
    return mellin_upsilon_quadrature(pair, s, 1);
}

}  // namespace zetalab
