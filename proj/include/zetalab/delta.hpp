#pragma once

#include <cstdint>
#include <string>

#include "zetalab/arith.hpp"
#include "zetalab/complex_util.hpp"
#include "zetalab/shifts.hpp"

namespace zetalab {

// One correlation-sum instance: sum over mN - nM = h of
// tau_A(m) tau_B(n) f(mN, nM), with the weight specialized to a separable
// window f(x, x-h) = u(x), u(x) = psi((x - window_shift)/X) for the named
// catalog psi (support [X + window_shift, 2X + window_shift]).
struct CorrelationInstance {
    ShiftMultiset A, B;
    std::uint64_t M = 1, N = 1;  // coprime moduli
    long long h = 1;             // nonzero offset
    double X = 5000.0;           // window scale
    double window_shift = 0.0;
    std::string weight = "bump";
};

// Local correction factor g_E(s, n) =
//   prod_{p | n} { prod_{γ∈E} (1 - p^{-s-γ}) * sum_{m>=0} tau_E(p^{m + ord_p n}) p^{-ms} },
// series truncated with a certified geometric tail bound <= 1e-12. Requires
// Re(s + γ) > 0 for every γ in E (throws std::domain_error otherwise).
cplx g_E(const ArithContext& ctx, const ShiftMultiset& E, cplx s, std::uint64_t n);

// Arithmetic factor G_E(s, q) =
//   sum_{d | q} (mu(d) d^s / phi(d)) sum_{e | d} (mu(e) / e^s) g_E(s, e q / d).
// Multiplicative in q with G_E(s, 1) = 1; same precondition as g_E.
cplx G_E(const ArithContext& ctx, const ShiftMultiset& E, cplx s, std::uint64_t q);

// G at a prime power via the two-term g recursion
//   G_E(s, p^r) = (p g_E(s, p^r) - p^s g_E(s, p^{r-1})) / (p - 1),
// the multiplicative building block used inside delta_prediction. Agrees with
// the divisor-sum definition; r = 0 gives 1.
cplx G_pp(const ShiftMultiset& E, cplx s, std::uint64_t p, int r);

// Independent series route for G at prime powers:
//   (p/(p-1)) prod_{γ∈E} (1 - p^{-s-γ}) sum_{j<=K} I_{E,{1-s}}(p^{j+r}) p^{-js}.
// Used as a cross-check oracle against the divisor-sum definition.
cplx G_pp_via_I(const ShiftMultiset& E, cplx s, std::uint64_t p, int r, int K);

// Exact finite double sum over the window: iterates m with u(mN) != 0 and
// solves for n. Throws std::out_of_range if the window exceeds the
// factorization table.
cplx direct_correlation(const ArithContext& ctx, const CorrelationInstance& inst);

struct DeltaPrediction {
    cplx value = 0.0;
    // Analytic worst-case bound on the dropped q > Q_max tail via the
    // |G| <= C (p^r)^{c+0.1} growth bound. Deliberately conservative: it does
    // not credit the contour integral with annihilating the analytic part of
    // each q-term, so it typically overstates the tail by orders of magnitude.
    double q_tail_bound = 0.0;
    // Empirical convergence indicator: the contour-integrated contribution of
    // the last octave q in (Q_max/2, Q_max]. The true tail is usually of this
    // size or smaller.
    double q_tail_last_octave = 0.0;
};

// Divisor-correlation prediction: the double contour integral over
// |z| = |w| = radius of
//   N^{-1-z} M^{-1-w} prod_α zeta(1+z+α) prod_β zeta(1+w+β)
//   * sum_{q <= Q_max} c_q(h) (q,N)^{1+z} (q,M)^{1+w} q^{-2-z-w}
//       G_A(1+z, q/(q,N)) G_B(1+w, q/(q,M))
//   * int x^z (x-h)^w u(x) dx,
// circles discretized by the trapezoid rule. The shifts of A and B must lie
// strictly inside the contour radius (their zeta poles are what the contour
// picks up) and satisfy Re(1 + z + γ) > 0 on the circle so the G-series
// converge. Throws std::invalid_argument for gcd(M,N) != 1 or h = 0.
DeltaPrediction delta_prediction(const ArithContext& ctx,
                                 const CorrelationInstance& inst,
                                 int circle_nodes = 64, double radius = 0.1,
                                 std::uint64_t Q_max = 10000);

}  // namespace zetalab
