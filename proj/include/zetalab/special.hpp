#pragma once

#include "zetalab/complex_util.hpp"

namespace zetalab {

// Riemann zeta by Euler-Maclaurin summation: cutoff N = ceil(|Im s|) + 20 and
// eight Bernoulli corrections. Validated to ~1e-12 for 0.2 <= Re s <= 10,
// |Im s| <= 100 (see zeta_in_validated_box); remains accurate for mildly
// negative Re via the functional equation. Throws std::domain_error within
// 1e-8 of the pole at s = 1.
cplx zeta(cplx s);

// True inside the accuracy-validated parameter box of zeta().
bool zeta_in_validated_box(cplx s);

// 1/zeta(s). The reciprocal continues holomorphically through s = 1 with a
// simple zero there; this evaluates that continuation (exactly 0 at s = 1)
// instead of tripping the pole guard.
cplx inv_zeta(cplx s);

// log Gamma(z), principal branch on Re z > 0 (Stirling with recurrence
// shift); reflection formula elsewhere, where the imaginary part is a valid
// logarithm branch (exp of it is Gamma(z)) though not necessarily principal.
cplx lgamma_complex(cplx z);

cplx gamma_complex(cplx z);

// chi(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1 - s), the factor in
// zeta(s) = chi(s) zeta(1 - s). log_chi is overflow-safe for large |Im s|;
// chi = exp(log_chi).
cplx log_chi(cplx s);
cplx chi(cplx s);

// tan(z) computed from e^{±2iz} with the decaying exponential factored out,
// so it is overflow-safe for large |Im z|.
cplx tan_safe(cplx z);

// log sin(z), overflow-safe for large |Im z|; imaginary part is some valid
// branch (only exp(log_sin) is meaningful to callers).
cplx log_sin(cplx z);

// Closed form of sum_{eps = ±1} int y^{a-1} (y - eps)^{b-1} dy (y over the
// range where the integrand is real-positive based, per the two-piece
// contour):
//   chi(a+b) chi(1-a) chi(1-b) (1 + tan(pi a/2) tan(pi b/2)) / 2.
// Requires 0 < Re a < 1/2 and 0 < Re b < 1/2; throws std::domain_error
// otherwise.
cplx beta_pair_integral(cplx a, cplx b);

}  // namespace zetalab
