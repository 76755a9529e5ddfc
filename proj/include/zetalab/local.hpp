#pragma once
// Local-factor engine: two-sided prime-power correlation sums and their
// closed form, both sides of the per-prime Euler-factor identity behind the
// moment recipe, the arithmetic-factor Euler product calA, and the
// analytically continued L-sum attached to a swap (residue) configuration.
#include <cstdint>
#include <vector>

#include "zetalab/complex_util.hpp"
#include "zetalab/shifts.hpp"

namespace zetalab {

// Quadruple correlation sum
//   Sigma(A,B,z,w,M,N;p) = sum_{q=0}^{1} sum_{d,j,k >= 0} (-1)^q
//     I_{A,{-z}}(p^{j+q+d-min(q+d,N)}) * I_{B,{-w}}(p^{k+q+d-min(q+d,M)})
//     * p^{-d - j(1+z) - k(1+w) - q(2+z+w) + min(q+d,N)(1+z) + min(q+d,M)(1+w)},
// evaluated by direct summation with all indices truncated at K.  Defined for
// any M,N >= 0.  Throws std::runtime_error if the truncation tail is not
// negligible at K.
cplx sigma_series(const ShiftMultiset& A, const ShiftMultiset& B, cplx z, cplx w,
                  int M, int N, std::uint64_t p, int K = 60);

// Closed form of the same sum, valid when min(M,N) = 0 (enforced):
//   p^{Mw+Nz} (1 - p^{-1-w-z}) sum_{r>=0}
//     I_{A ∪ {w}, {-z}}(p^{r+M}) * I_{B ∪ {z}, {-w}}(p^{r+N}) * p^{-r}.
cplx sigma_closed(const ShiftMultiset& A, const ShiftMultiset& B, cplx z, cplx w,
                  int M, int N, std::uint64_t p, int K = 80);

// Evaluation point for the per-prime Euler-factor identity.  The z/w contour
// variables, the combined Mellin variable xi_eta (the identity depends on the
// two Mellin variables only through their sum), and partitions of the shift
// sets into ell = |z_list| = |w_list| blocks (all blocks nonempty).
struct LocalPoint {
    std::uint64_t p = 2;
    std::vector<cplx> z_list;
    std::vector<cplx> w_list;
    cplx xi_eta{0.08, 0.0};
    std::vector<ShiftMultiset> A_parts;
    std::vector<ShiftMultiset> B_parts;
};

// Left side: the constrained sum over exponent tuples (M_1..M_ell, N_1..N_ell)
// with sum M_j = sum N_j and min(M_j,N_j) = 0 for each j, of the per-block
// alternating d,q-sums built from the two-variable g-series G_E(s, p^r).
// The alternating index q is intrinsically {0,1}; Q_bound >= 1 is accepted
// and values above 1 have no effect.  Tuples are enumerated with
// max(M_j), max(N_j) <= MN_bound; throws std::runtime_error if the discarded
// shells are not negligible.
cplx euler_local_lhs(const LocalPoint& pt, int D_max = 40, int Q_bound = 1,
                     int MN_bound = 8);

// Right side: explicit prefactors times the two-sided correlation series
//   (1-1/p)^{-2 ell} * prod_j [ (1-p^{-(1+w_j+z_j-s)})
//       * prod_{a in A_j}(1-p^{-(1+z_j+a)}) * prod_{b in B_j}(1-p^{-(1+w_j+b)}) ]
//   * sum_m I_{A_s ∪ W, (Z^-)_s}(p^m) * I_{B ∪ Z_{-s}, W^-}(p^m) * p^{-m},
// with s = xi_eta.  Convergence is validated dynamically on the series terms.
cplx euler_local_rhs(const LocalPoint& pt, int K = 240);

// Single local factor of the arithmetic Euler product calA(A,B,Z,W,s): the
// zeta-compensated version of the two-sided correlation series whose 1/p
// coefficient vanishes identically near the central box.
cplx calA_factor(const ShiftMultiset& A, const ShiftMultiset& B,
                 const ShiftMultiset& Z, const ShiftMultiset& W, cplx s,
                 std::uint64_t p);

struct EulerProduct {
    cplx value{1.0, 0.0};
    double tail_rel = 0.0;  // estimated relative size of the discarded p > P_cut tail
};

// Product of calA_factor over primes p <= P_cut.  The tail estimate comes
// from fitting |factor - 1| <= c/p^2 over the last decade of primes.
EulerProduct calA(const ShiftMultiset& A, const ShiftMultiset& B,
                  const ShiftMultiset& Z, const ShiftMultiset& W, cplx s,
                  std::uint32_t P_cut = 10000);

// Analytically continued L-sum for a swap configuration U ⊆ A, V ⊆ B
// (|U| = |V|, A and B pairwise distinct): the finite product of zeta factors
// attached to the residue configuration times calA(A, B, U^-, V^-, s).
// Throws std::domain_error if any zeta argument lies within 1e-8 of the pole.
cplx swap_Lsum(const ShiftMultiset& A, const ShiftMultiset& B,
               const ShiftMultiset& U, const ShiftMultiset& V, cplx s,
               std::uint32_t P_cut = 10000);

}  // namespace zetalab
