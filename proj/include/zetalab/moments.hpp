#pragma once
// Moment pipelines: the brute-force windowed moment and its off-diagonal
// strata, the swap-term expansion of the asymptotic recipe, and the
// contour-integral stratum whose circle residues reproduce the swap terms.
//
// All vertical-line pipelines work in the combined Mellin variable
// s = xi + eta.  With the power-law t-average of the chi pair products every
// s-dependent factor of the integrand depends on xi and eta only through
// their sum, so the double line integral against
// upsilon~(xi) upsilon~(eta) X^{xi+eta} collapses exactly (Mellin product
// theorem) to a single line against X^s times the Mellin transform of
// Upsilon^2.  The exact-chi mode keeps the literal double line; its cost is
// quadratic in line_nodes and it exists as a cross-check of the power law.
#include <cstdint>
#include <string>
#include <vector>

#include "zetalab/arith.hpp"
#include "zetalab/complex_util.hpp"
#include "zetalab/report.hpp"
#include "zetalab/shifts.hpp"
#include "zetalab/weights.hpp"

namespace zetalab {

struct QuadratureSpec {
    int circle_nodes = 64;      // trapezoid nodes per residue circle
    double line_height = 40.0;  // s-line truncated at |Im s| <= line_height
    int line_nodes = 3201;      // trapezoid nodes on the truncated s-line
    int t_nodes = 128;          // Gauss-Legendre nodes for the exact chi average
};

struct MomentTruncations {
    std::uint32_t P_cut = 10000;       // Euler-product cutoff in the L-sums
    std::uint64_t N_direct = 2000000;  // admissible sieve range for direct sums
    long long direction_bound = 30;    // cap on M_1...M_ell = N_1...N_ell
    long long h_bound = 50;            // cap on |h_j| in off-diagonal sums
    int MN_bound = 8;                  // exponent-shell cap (per-prime checks)
};

struct MomentConfig {
    double T = 2000.0;   // length scale of the t-window [T, 2T]
    double X = 1000.0;   // Dirichlet-polynomial cutoff
    double epsilon = 0.06;  // residue-circle radius; lines sit at 2*epsilon
    QuadratureSpec quad;
    MomentTruncations trunc;
    std::string weight = "bump";     // test-function pair (see weights.hpp)
    bool exact_chi_average = false;  // integrate the chi pairs in t instead of
                                     // using the power-law t-average
};

// Shared validation: finite positive T and X, 0 < epsilon < 1/4, positive
// truncations and node counts, a known weight pair, and every shift of every
// listed multiset inside the central box |Re alpha| <= epsilon/2.  Throws
// std::invalid_argument (std::domain_error for shift-box violations).
void validate_moment_config(const MomentConfig& cfg,
                            const std::vector<const ShiftMultiset*>& sets);

// Canonical parameter string for report digests (mathematical fields only).
std::string moment_params(const MomentConfig& cfg);

// Brute-force windowed moment
//   sum_{m,n < X} tau_A(m) tau_B(n) Upsilon(m/X) Upsilon(n/X) (mn)^{-1/2}
//     * psihat((T/2pi) log(m/n)),
// the exact t-average of the two Dirichlet polynomials against psi(t/T)/T.
// Pairs with |(T/2pi) log(m/n)| beyond the transform window are dropped
// (the transform vanishes there to ~4e-9 absolute).  Requires X <= N_direct
// and an ArithContext covering n < X.
cplx direct_moment(const ArithContext& ctx, const ShiftMultiset& A,
                   const ShiftMultiset& B, const MomentConfig& cfg);

// Off-diagonal stratum value with its truncation-drift certificates: the
// same sum re-accumulated with h_bound halved, and with direction_bound
// halved (ell >= 2; equal to value at ell = 1, where the only direction is
// M = N = 1).
struct OffDiagonal {
    cplx value{0.0, 0.0};
    cplx value_half_h{0.0, 0.0};
    cplx value_half_directions{0.0, 0.0};
};

// Direct evaluation of the ell-th off-diagonal stratum for a fixed ordered
// partition of the shifts into ell nonempty blocks:
//   (1/ell!^2) sum_{M_1..M_ell = N_1..N_ell <= direction_bound, (M_j,N_j)=1}
//   sum_{0 < |h_j| <= h_bound} sum_{m_j N_j - n_j M_j = h_j}
//     prod_j tau_{A_j}(m_j) tau_{B_j}(n_j)
//     * Upsilon(prod m/X) Upsilon(prod n/X) (prod mn)^{-1/2}
//     * psihat((T/2pi) log(prod m / prod n)).
// The t-average is exact (psi transform); directions and h are truncated by
// the config bounds, certified by the drift fields.  Supports ell in {1, 2}.
OffDiagonal direct_S_ell(const ArithContext& ctx, int ell,
                         const std::vector<ShiftMultiset>& A_parts,
                         const std::vector<ShiftMultiset>& B_parts,
                         const MomentConfig& cfg);

// Value of an s-line pipeline together with its honesty diagnostics.
struct LineIntegral {
    cplx value{0.0, 0.0};
    // |contribution of the outer half of the line| / |value|: how much of the
    // integral still lives near the truncation height.
    double line_tail_rel = 0.0;
    // Estimated relative size of the discarded p > P_cut Euler-product tail.
    double euler_tail_rel = 0.0;
};

// One swap term of the recipe.  U subset A and V subset B with |U| = |V|;
// the term is
//   (1/2pi i) int W2(s) X^s Phi_{U,V}(s) Lsum_{A,B,U,V}(s) ds
// on the line Re s = s_abscissa (default 2*epsilon, i.e. xi and eta lines at
// epsilon each), where W2 is the Mellin transform of Upsilon^2 and Phi is
// the psi-weighted t-average of the chi pair products.  U = V = {} is the
// diagonal stratum, which the xi/eta Mellin inversion reduces to the exact
// finite sum  sum_{n<X} tau_A(n) tau_B(n) Upsilon(n/X)^2 / n  (no quadrature;
// the context supplies the coefficients).  In exact-chi mode the double
// xi/eta line is kept literally (quadratic cost in line_nodes).
LineIntegral swap_term(const ArithContext& ctx, const ShiftMultiset& A,
                       const ShiftMultiset& B, const ShiftMultiset& U,
                       const ShiftMultiset& V, const MomentConfig& cfg,
                       double s_abscissa = 0.0);

// Full recipe prediction: the sum of swap_term over all swap pairs (U, V)
// of every order ell = 0..min(|A|, |B|).  Requires the elements of A
// pairwise distinct and likewise for B.  Diagnostics are the worst over the
// constituent terms.
LineIntegral recipe_moment(const ArithContext& ctx, const ShiftMultiset& A,
                           const ShiftMultiset& B, const MomentConfig& cfg);

// Contour-integral form of the ell-th stratum (ell in {1, 2}):
//   (1/ell!^2) (1/2pi i) int_(4 eps) W2(s) X^s
//     (1/2pi i)^{2 ell} oint...oint Phi(s,Z,W) [zeta-factor product]
//       calA(A,B,Z,W,s) dW dZ ds
// with all 2*ell circles |z_j| = |w_j| = epsilon discretized by the
// trapezoid rule (spectrally accurate for the meromorphic integrand) and the
// s-line at 4*epsilon, where the paper-side xi/eta lines (2*epsilon each)
// keep the zeta(1 - z_i - w_j + s) factors off their poles.  Every shift
// must satisfy |alpha| <= 0.8*epsilon so its residue pole stays well inside
// the circles; violations throw std::domain_error.  Requires the power-law
// t-average (exact-chi mode throws std::invalid_argument).
LineIntegral vandermonde_S_ell(int ell, const ShiftMultiset& A,
                               const ShiftMultiset& B, const MomentConfig& cfg);

// The zeta-factor product times the arithmetic factor of the contour
// integrand at one point (Z, W, s) — the circle integrand without the
// weight/chi factors, exposed for spot checks against independently
// assembled zeta / calA_factor calls.
cplx vandermonde_integrand(const ShiftMultiset& A, const ShiftMultiset& B,
                           const std::vector<cplx>& Z, const std::vector<cplx>& W,
                           cplx s, std::uint32_t P_cut);

// Psi-weighted t-average of the chi pair products attached to a swap (U, V):
//   int_1^2 psi(u) prod_{a in U} chi(1/2 + xi + a + iTu)
//                  prod_{b in V} chi(1/2 + eta + b - iTu) du,
// exactly (Gauss-Legendre panels, t_nodes nodes in total) and in the
// power-law form
//   (T/2pi)^{-C} int_1^2 psi(u) u^{-C} du,  C = sum(U) + sum(V) + ell(xi+eta),
// which drops the O(1/T) corrections of the chi asymptotics.
cplx chi_pair_average_exact(const ShiftMultiset& U, const ShiftMultiset& V,
                            cplx xi, cplx eta, double T,
                            const TestFunctionPair& pair, int t_nodes);
cplx chi_pair_average_power(const ShiftMultiset& U, const ShiftMultiset& V,
                            cplx xi, cplx eta, double T,
                            const TestFunctionPair& pair);

// Mellin transform of Upsilon(x)^2 on Re s > 0 (closed form for the
// polynomial taper, pole-split dyadic quadrature otherwise).
cplx mellin_upsilon_squared(const TestFunctionPair& pair, cplx s);

// Comparison row for two pipeline values under this config: digest of the
// mathematical parameters, wall time as given.  rel_err falls back to the
// absolute discrepancy when rhs = 0 (see rel_err); such rows get an "[abs]"
// marker appended to the label.
ComparisonRow compare(const std::string& label, cplx lhs, cplx rhs,
                      const MomentConfig& cfg, double seconds = 0.0);

}  // namespace zetalab
