#pragma once

#include <functional>
#include <string>

#include "zetalab/complex_util.hpp"

namespace zetalab {

// A smoothing pair: psi weights the t-average (smooth, nonnegative, support
// [1,2]), upsilon tapers Dirichlet-polynomial coefficients (smooth on [0,1],
// upsilon(0) > 0, upsilon(x) = 0 for x >= 1).
struct TestFunctionPair {
    std::string name;
    std::function<double(double)> psi;
    std::function<double(double)> upsilon;
    double psi_mass = 1.0;  // ∫ psi (catalog members are normalized to 1)
    int cache_slot = -1;    // >= 0 for catalog members (transform grid cache)
};

// Catalog lookup by name: "bump" (C-infinity bump pair) or "poly-taper"
// (polynomial pair with a closed-form Mellin transform). Throws
// std::invalid_argument for unknown names. Returned references are static.
const TestFunctionPair& test_functions(const std::string& name);

// psi-hat(x) = ∫ psi(t) e^{-2 pi i x t} dt, by oscillation-scaled composite
// Gauss-Legendre panels; absolute error <= 1e-10 for |x| <= 1e4.
cplx fourier_psi(const TestFunctionPair& pair, double x);

// Same transform from a precomputed uniform grid (step 0.02) with 6-point
// Lagrange interpolation; absolute error <= 1e-5 (typically ~1e-6; the
// one-sided stencil at tiny |x| is the worst case). Returns exactly 0 outside
// |x| <= psi_hat_window() where the transform is below ~4e-9 for both catalog
// members. Catalog members only (cache_slot >= 0).
cplx psi_hat_fast(const TestFunctionPair& pair, double x);

// The |x| window within which psi_hat_fast interpolates.
double psi_hat_window();

// Mellin transform of upsilon: ∫_0^1 upsilon(x) x^{s-1} dx for Re s > 0
// (throws std::domain_error otherwise). The upsilon(0)/s pole term is
// integrated analytically and the smooth remainder by dyadic-panel
// Gauss-Legendre; absolute error <= 1e-10 for Re s in [0.01, 3],
// |Im s| <= 200. "poly-taper" uses its exact rational closed form.
cplx mellin_upsilon(const TestFunctionPair& pair, cplx s);

// The dyadic-panel quadrature route regardless of closed forms, at a chosen
// node multiplier (>= 1 sharpens the rule) — the cross-check oracle for
// mellin_upsilon.
cplx mellin_upsilon_quadrature(const TestFunctionPair& pair, cplx s,
                               int node_multiplier = 1);

}  // namespace zetalab
