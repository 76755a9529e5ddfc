#include "zetalab/local.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

#include "zetalab/arith.hpp"
#include "zetalab/delta.hpp"
#include "zetalab/special.hpp"

namespace zetalab {

namespace {

void require_prime(std::uint64_t p, const char* who) {
    if (!is_prime_u64(p)) {
        std::ostringstream os;
        os << who << ": p = " << p << " is not prime";
        throw std::invalid_argument(os.str());
    }
}

// p^{e} for complex e, with lp = log p.
cplx p_pow(double lp, cplx e) { return std::exp(e * lp); }

// 1 - p^{-e}.
cplx one_minus(double lp, cplx e) { return 1.0 - std::exp(-e * lp); }

// Remove pairs of bitwise-identical elements shared between the numerator and
// denominator shift lists.  The generating function is unchanged, but the
// explicit cancellation keeps the series coefficients small when the shared
// elements have large real part (residue and limit configurations).
void cancel_common(std::vector<cplx>& c, std::vector<cplx>& d) {
    for (std::size_t i = 0; i < d.size();) {
        bool hit = false;
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (c[j] == d[i]) {
                c.erase(c.begin() + static_cast<std::ptrdiff_t>(j));
                d.erase(d.begin() + static_cast<std::ptrdiff_t>(i));
                hit = true;
                break;
            }
        }
        if (!hit) ++i;
    }
}

struct SeriesResult {
    cplx value{0.0, 0.0};
    bool settled = false;  // last term negligible at the requested level
};

// sum_{m=0}^{K} I_{C1,D1}(p^m) I_{C2,D2}(p^m) p^{-m} with a non-finite guard.
// `settle` is the relative size the last term must reach for the sum to count
// as converged.  Term magnitudes are not required to decay monotonically:
// complex shifts make them beat, so divergent input is caught by the callers
// (a divergent series never settles), not by a pointwise growth test.
SeriesResult ii_series(const std::vector<cplx>& c1, const std::vector<cplx>& d1,
                       const std::vector<cplx>& c2, const std::vector<cplx>& d2,
                       std::uint64_t p, int K, double settle, const char* who) {
    const auto I1 = I_pp_table(ShiftMultiset(c1), ShiftMultiset(d1), p, K);
    const auto I2 = I_pp_table(ShiftMultiset(c2), ShiftMultiset(d2), p, K);
    const double pinv = 1.0 / static_cast<double>(p);
    cplx acc = 0.0;
    double pr = 1.0;
    double tlast = 0.0;
    for (int m = 0; m <= K; ++m) {
        const cplx term = I1[static_cast<std::size_t>(m)] *
                          I2[static_cast<std::size_t>(m)] * pr;
        pr *= pinv;
        const double tm = std::abs(term);
        if (!std::isfinite(tm))
            throw std::runtime_error(std::string(who) +
                                     ": correlation series is not finite "
                                     "(likely divergent; check real parts)");
        acc += term;
        tlast = tm;
    }
    SeriesResult out;
    out.value = acc;
    out.settled = tlast <= settle * (1.0 + std::abs(acc));
    return out;
}

// Convergence-enforcing wrapper used by the per-prime Euler factors: extends
// the truncation until the last term is at rounding level.
cplx ii_series_adaptive(std::vector<cplx> c1, std::vector<cplx> d1,
                        std::vector<cplx> c2, std::vector<cplx> d2,
                        std::uint64_t p, const char* who) {
    cancel_common(c1, d1);
    cancel_common(c2, d2);
    int K = std::max(28, static_cast<int>(120.0 / std::log2(static_cast<double>(p))));
    for (int attempt = 0; attempt < 4; ++attempt) {
        const SeriesResult r = ii_series(c1, d1, c2, d2, p, K, 2e-16, who);
        if (r.settled) return r.value;
        K *= 2;
    }
    throw std::runtime_error(std::string(who) +
                             ": correlation series did not settle "
                             "(slow convergence; check real parts)");
}

void validate_point(const LocalPoint& pt, const char* who) {
    require_prime(pt.p, who);
    const std::size_t ell = pt.z_list.size();
    if (ell == 0)
        throw std::invalid_argument(std::string(who) + ": need at least one z,w pair");
    if (pt.w_list.size() != ell || pt.A_parts.size() != ell || pt.B_parts.size() != ell)
        throw std::invalid_argument(std::string(who) +
                                    ": z_list, w_list, A_parts, B_parts must have "
                                    "equal length");
    for (std::size_t j = 0; j < ell; ++j)
        if (pt.A_parts[j].empty() || pt.B_parts[j].empty())
            throw std::invalid_argument(std::string(who) + ": empty partition block");
}

}  // namespace

cplx sigma_series(const ShiftMultiset& A, const ShiftMultiset& B, cplx z, cplx w,
                  int M, int N, std::uint64_t p, int K) {
    require_prime(p, "sigma_series");
    if (M < 0 || N < 0) throw std::invalid_argument("sigma_series: M,N must be >= 0");
    if (K < 8) throw std::invalid_argument("sigma_series: K too small");
    const double lp = std::log(static_cast<double>(p));

    // Inner j- and k-sums are geometric against the I tables; precompute the
    // suffix sums S[c] = sum_{j<=K} I(p^{j+c}) t^j for every offset c that the
    // d,q loop can request (c = q + d - min(q+d, ·) <= K + 1).
    const auto IA = I_pp_table(A, ShiftMultiset{-z}, p, 2 * K + 2);
    const auto IB = I_pp_table(B, ShiftMultiset{-w}, p, 2 * K + 2);
    const cplx tz = p_pow(lp, -(1.0 + z));
    const cplx tw = p_pow(lp, -(1.0 + w));
    const int ncof = K + 2;
    std::vector<cplx> SA(static_cast<std::size_t>(ncof));
    std::vector<cplx> SB(static_cast<std::size_t>(ncof));
    for (int c = 0; c < ncof; ++c) {
        cplx sa = 0.0, sb = 0.0;
        for (int j = K; j >= 0; --j) {
            sa = sa * tz + IA[static_cast<std::size_t>(j + c)];
            sb = sb * tw + IB[static_cast<std::size_t>(j + c)];
        }
        const double taila = std::abs(IA[static_cast<std::size_t>(K + c)]) *
                             std::pow(std::abs(tz), K);
        const double tailb = std::abs(IB[static_cast<std::size_t>(K + c)]) *
                             std::pow(std::abs(tw), K);
        if (taila > 1e-9 * (1.0 + std::abs(sa)) || tailb > 1e-9 * (1.0 + std::abs(sb)))
            throw std::runtime_error(
                "sigma_series: inner geometric sum tail above tolerance "
                "(K too small or series divergent)");
        SA[static_cast<std::size_t>(c)] = sa;
        SB[static_cast<std::size_t>(c)] = sb;
    }

    cplx total = 0.0;
    cplx dblock = 0.0;
    for (int d = 0; d <= K; ++d) {
        dblock = 0.0;
        for (int q = 0; q <= 1; ++q) {
            const int mN = std::min(q + d, N);
            const int mM = std::min(q + d, M);
            const cplx expo = static_cast<double>(mN) * (1.0 + z) +
                              static_cast<double>(mM) * (1.0 + w) -
                              static_cast<double>(q) * (2.0 + z + w) -
                              static_cast<double>(d);
            cplx term = p_pow(lp, expo) * SA[static_cast<std::size_t>(q + d - mN)] *
                        SB[static_cast<std::size_t>(q + d - mM)];
            if (q == 1) term = -term;
            dblock += term;
        }
        total += dblock;
    }
    if (std::abs(dblock) > 1e-9 * (1.0 + std::abs(total)))
        throw std::runtime_error(
            "sigma_series: d-sum tail above tolerance (K too small)");
    return total;
}

cplx sigma_closed(const ShiftMultiset& A, const ShiftMultiset& B, cplx z, cplx w,
                  int M, int N, std::uint64_t p, int K) {
    require_prime(p, "sigma_closed");
    if (M < 0 || N < 0) throw std::invalid_argument("sigma_closed: M,N must be >= 0");
    if (std::min(M, N) != 0)
        throw std::invalid_argument("sigma_closed: requires min(M,N) = 0");
    if (K < 8) throw std::invalid_argument("sigma_closed: K too small");
    const double lp = std::log(static_cast<double>(p));

    ShiftMultiset Aw = A;
    Aw.add(w);
    ShiftMultiset Bz = B;
    Bz.add(z);
    const auto IA = I_pp_table(Aw, ShiftMultiset{-z}, p, K + M);
    const auto IB = I_pp_table(Bz, ShiftMultiset{-w}, p, K + N);
    const double pinv = 1.0 / static_cast<double>(p);
    cplx series = 0.0;
    double pr = 1.0;
    cplx last = 0.0;
    for (int r = 0; r <= K; ++r) {
        last = IA[static_cast<std::size_t>(r + M)] * IB[static_cast<std::size_t>(r + N)] * pr;
        pr *= pinv;
        series += last;
    }
    if (std::abs(last) > 1e-9 * (1.0 + std::abs(series)))
        throw std::runtime_error(
            "sigma_closed: series tail above tolerance (K too small)");
    const cplx pref = p_pow(lp, static_cast<double>(M) * w + static_cast<double>(N) * z) *
                      one_minus(lp, 1.0 + w + z);
    return pref * series;
}

cplx euler_local_lhs(const LocalPoint& pt, int D_max, int Q_bound, int MN_bound) {
    validate_point(pt, "euler_local_lhs");
    if (D_max < 8) throw std::invalid_argument("euler_local_lhs: D_max too small");
    if (Q_bound < 1) throw std::invalid_argument("euler_local_lhs: Q_bound must be >= 1");
    if (MN_bound < 2) throw std::invalid_argument("euler_local_lhs: MN_bound too small");
    const int qmax = std::min(Q_bound, 1);  // alternating index is intrinsically {0,1}
    const std::size_t ell = pt.z_list.size();
    const double lp = std::log(static_cast<double>(pt.p));
    const cplx s = pt.xi_eta;

    // G_E(1+z_j, p^r) and G_E(1+w_j, p^r) tables for r = 0..D_max+1.
    const int rmax = D_max + 1;
    std::vector<std::vector<cplx>> GA(ell), GB(ell);
    for (std::size_t j = 0; j < ell; ++j) {
        GA[j].resize(static_cast<std::size_t>(rmax) + 1);
        GB[j].resize(static_cast<std::size_t>(rmax) + 1);
        for (int r = 0; r <= rmax; ++r) {
            GA[j][static_cast<std::size_t>(r)] =
                G_pp(pt.A_parts[j], 1.0 + pt.z_list[j], pt.p, r);
            GB[j][static_cast<std::size_t>(r)] =
                G_pp(pt.B_parts[j], 1.0 + pt.w_list[j], pt.p, r);
        }
    }

    // Per-block alternating d,q-sum at exponents (Mj, Nj).
    const auto inner = [&](std::size_t j, int Mj, int Nj) -> cplx {
        const cplx z = pt.z_list[j];
        const cplx w = pt.w_list[j];
        cplx acc = 0.0;
        cplx dblock = 0.0;
        for (int d = 0; d <= D_max; ++d) {
            dblock = 0.0;
            for (int q = 0; q <= qmax; ++q) {
                const int mN = std::min(q + d, Nj);
                const int mM = std::min(q + d, Mj);
                const cplx expo = static_cast<double>(mN) * (1.0 + z) +
                                  static_cast<double>(mM) * (1.0 + w) -
                                  static_cast<double>(q) * (2.0 + z + w) -
                                  static_cast<double>(d) * (1.0 + s);
                cplx term = p_pow(lp, expo) * GA[j][static_cast<std::size_t>(q + d - mN)] *
                            GB[j][static_cast<std::size_t>(q + d - mM)];
                if (q == 1) term = -term;
                dblock += term;
            }
            acc += dblock;
        }
        if (std::abs(dblock) > 1e-9 * (1.0 + std::abs(acc)))
            throw std::runtime_error(
                "euler_local_lhs: d-sum tail above tolerance (D_max too small)");
        return acc;
    };

    // Exponent options per block: (0,0), (m,0) for m=1..MN_bound, (0,n) likewise.
    // min(Mj,Nj)=0 holds for each, and every admissible tuple with entries
    // <= MN_bound is a combination of these.
    const int nopt = 2 * MN_bound + 1;
    std::vector<std::vector<cplx>> IN(ell);
    std::vector<int> optM(static_cast<std::size_t>(nopt)), optN(static_cast<std::size_t>(nopt));
    optM[0] = 0;
    optN[0] = 0;
    for (int m = 1; m <= MN_bound; ++m) {
        optM[static_cast<std::size_t>(m)] = m;
        optN[static_cast<std::size_t>(m)] = 0;
        optM[static_cast<std::size_t>(MN_bound + m)] = 0;
        optN[static_cast<std::size_t>(MN_bound + m)] = m;
    }
    for (std::size_t j = 0; j < ell; ++j) {
        IN[j].resize(static_cast<std::size_t>(nopt));
        for (int t = 0; t < nopt; ++t)
            IN[j][static_cast<std::size_t>(t)] =
                inner(j, optM[static_cast<std::size_t>(t)], optN[static_cast<std::size_t>(t)]);
    }

    // Enumerate tuples with sum M = sum N, accumulating the full total and the
    // sub-total with sum <= MN_bound - 2 to measure the truncation margin.
    cplx total = 0.0, total_small = 0.0;
    const auto recurse = [&](auto&& self, std::size_t j, int sm, int sn, cplx zw,
                             cplx prod) -> void {
        if (sm > MN_bound || sn > MN_bound) return;
        if (j == ell) {
            if (sm != sn) return;
            const cplx term =
                p_pow(lp, static_cast<double>(sm) * (s - 1.0) - zw) * prod;
            total += term;
            if (sm <= MN_bound - 2) total_small += term;
            return;
        }
        for (int t = 0; t < nopt; ++t) {
            const int Mj = optM[static_cast<std::size_t>(t)];
            const int Nj = optN[static_cast<std::size_t>(t)];
            self(self, j + 1, sm + Mj, sn + Nj,
                 zw + static_cast<double>(Nj) * pt.z_list[j] +
                     static_cast<double>(Mj) * pt.w_list[j],
                 prod * IN[j][static_cast<std::size_t>(t)]);
        }
    };
    recurse(recurse, 0, 0, 0, cplx(0.0), cplx(1.0));

    if (std::abs(total - total_small) > 3e-7 * (1.0 + std::abs(total)))
        throw std::runtime_error(
            "euler_local_lhs: exponent-tuple tail above tolerance (MN_bound too small)");
    return total;
}

cplx euler_local_rhs(const LocalPoint& pt, int K) {
    validate_point(pt, "euler_local_rhs");
    if (K < 16) throw std::invalid_argument("euler_local_rhs: K too small");
    const std::size_t ell = pt.z_list.size();
    const double lp = std::log(static_cast<double>(pt.p));
    const cplx s = pt.xi_eta;

    cplx pref = std::pow(1.0 - 1.0 / static_cast<double>(pt.p),
                         -2.0 * static_cast<double>(ell));
    for (std::size_t j = 0; j < ell; ++j) {
        const cplx z = pt.z_list[j];
        const cplx w = pt.w_list[j];
        pref *= one_minus(lp, 1.0 + w + z - s);
        for (const cplx& a : pt.A_parts[j]) pref *= one_minus(lp, 1.0 + z + a);
        for (const cplx& b : pt.B_parts[j]) pref *= one_minus(lp, 1.0 + w + b);
    }

    std::vector<cplx> c1, d1, c2, d2;
    for (std::size_t j = 0; j < ell; ++j) {
        for (const cplx& a : pt.A_parts[j]) c1.push_back(a + s);
        for (const cplx& b : pt.B_parts[j]) c2.push_back(b);
    }
    for (std::size_t j = 0; j < ell; ++j) {
        c1.push_back(pt.w_list[j]);
        d1.push_back(-pt.z_list[j] + s);
        c2.push_back(pt.z_list[j] - s);
        d2.push_back(-pt.w_list[j]);
    }
    cancel_common(c1, d1);
    cancel_common(c2, d2);
    const SeriesResult r = ii_series(c1, d1, c2, d2, pt.p, K, 1e-9, "euler_local_rhs");
    if (!r.settled)
        throw std::runtime_error(
            "euler_local_rhs: series tail above tolerance (K too small)");
    return pref * r.value;
}

cplx calA_factor(const ShiftMultiset& A, const ShiftMultiset& B,
                 const ShiftMultiset& Z, const ShiftMultiset& W, cplx s,
                 std::uint64_t p) {
    require_prime(p, "calA_factor");
    if (Z.size() != W.size())
        throw std::invalid_argument("calA_factor: |Z| must equal |W|");
    const std::size_t ell = Z.size();
    const double lp = std::log(static_cast<double>(p));

    cplx f = std::pow(1.0 - 1.0 / static_cast<double>(p),
                      -2.0 * static_cast<double>(ell));
    for (const cplx& a : A)
        for (const cplx& b : B) f *= one_minus(lp, 1.0 + a + b + s);
    for (const cplx& z : Z)
        for (const cplx& a : A) f *= one_minus(lp, 1.0 + a + z);
    for (const cplx& w : W)
        for (const cplx& b : B) f *= one_minus(lp, 1.0 + b + w);
    for (const cplx& w : W)
        for (const cplx& a : A) f /= one_minus(lp, 1.0 + a + s - w);
    for (const cplx& z : Z)
        for (const cplx& b : B) f /= one_minus(lp, 1.0 + b + s - z);
    for (std::size_t i = 0; i < ell; ++i)
        for (std::size_t j = 0; j < ell; ++j) {
            if (i != j) {
                f /= one_minus(lp, 1.0 - Z[i] + Z[j]);
                f /= one_minus(lp, 1.0 - W[i] + W[j]);
            }
            f *= one_minus(lp, 1.0 + Z[i] + W[j] - s);
            f *= one_minus(lp, 1.0 - Z[i] - W[j] + s);
        }

    std::vector<cplx> c1, d1, c2, d2;
    for (const cplx& a : A) c1.push_back(a + s);
    for (const cplx& b : B) c2.push_back(b);
    for (std::size_t j = 0; j < ell; ++j) {
        c1.push_back(W[j]);
        d1.push_back(-Z[j] + s);
        c2.push_back(Z[j] - s);
        d2.push_back(-W[j]);
    }
    return f * ii_series_adaptive(std::move(c1), std::move(d1), std::move(c2),
                                  std::move(d2), p, "calA_factor");
}

EulerProduct calA(const ShiftMultiset& A, const ShiftMultiset& B,
                  const ShiftMultiset& Z, const ShiftMultiset& W, cplx s,
                  std::uint32_t P_cut) {
    if (Z.size() != W.size())
        throw std::invalid_argument("calA: |Z| must equal |W|");
    if (P_cut < 100) throw std::invalid_argument("calA: P_cut must be >= 100");

    // Simple sieve; the module does not depend on a shared arithmetic context.
    std::vector<bool> comp(static_cast<std::size_t>(P_cut) + 1, false);
    EulerProduct out;
    double cfit = 0.0;
    const double p_lo = static_cast<double>(P_cut) / 10.0;
    for (std::uint32_t p = 2; p <= P_cut; ++p) {
        if (comp[p]) continue;
        for (std::uint64_t q = static_cast<std::uint64_t>(p) * p; q <= P_cut;
             q += p)
            comp[static_cast<std::size_t>(q)] = true;
        const cplx f = calA_factor(A, B, Z, W, s, p);
        out.value *= f;
        if (static_cast<double>(p) >= p_lo) {
            const double dev =
                std::abs(f - 1.0) * static_cast<double>(p) * static_cast<double>(p);
            cfit = std::max(cfit, dev);
        }
    }
    out.tail_rel = 2.0 * cfit /
                   (static_cast<double>(P_cut) * std::log(static_cast<double>(P_cut)));
    return out;
}

cplx swap_Lsum(const ShiftMultiset& A, const ShiftMultiset& B,
               const ShiftMultiset& U, const ShiftMultiset& V, cplx s,
               std::uint32_t P_cut) {
    if (U.size() != V.size())
        throw std::invalid_argument("swap_Lsum: |U| must equal |V|");
    if (!A.contains(U))
        throw std::invalid_argument("swap_Lsum: U must be a sub-multiset of A");
    if (!B.contains(V))
        throw std::invalid_argument("swap_Lsum: V must be a sub-multiset of B");
    if (!A.all_distinct() || !B.all_distinct())
        throw std::invalid_argument(
            "swap_Lsum: A and B must have pairwise distinct elements");

    struct ZetaArg {
        cplx arg;
        bool recip;
        const char* family;
    };
    std::vector<ZetaArg> args;
    for (const cplx& a : A)
        for (const cplx& b : B) args.push_back({1.0 + a + b + s, false, "zeta(1+alpha+beta+s)"});
    for (const cplx& a : A)
        for (const cplx& u : U)
            if (a != u) args.push_back({1.0 + a - u, false, "zeta(1+alpha-alpha_hat)"});
    for (const cplx& b : B)
        for (const cplx& v : V)
            if (b != v) args.push_back({1.0 + b - v, false, "zeta(1+beta-beta_hat)"});
    for (const cplx& u : U)
        for (const cplx& v : V) {
            args.push_back({1.0 - u - v - s, false, "zeta(1-alpha_hat-beta_hat-s)"});
            args.push_back({1.0 + u + v + s, false, "zeta(1+alpha_hat+beta_hat+s)"});
        }
    for (const cplx& v : V)
        for (const cplx& a : A) args.push_back({1.0 + a + s + v, true, "1/zeta(1+alpha+s+beta_hat)"});
    for (const cplx& u : U)
        for (const cplx& b : B) args.push_back({1.0 + b + s + u, true, "1/zeta(1+beta+s+alpha_hat)"});
    for (std::size_t i = 0; i < U.size(); ++i)
        for (std::size_t j = 0; j < U.size(); ++j)
            if (i != j) {
                args.push_back({1.0 + U[i] - U[j], true, "1/zeta(1+alpha_hat_i-alpha_hat_j)"});
                args.push_back({1.0 + V[i] - V[j], true, "1/zeta(1+beta_hat_i-beta_hat_j)"});
            }

    cplx zfac = 1.0;
    for (const ZetaArg& za : args) {
        if (std::abs(za.arg - 1.0) < 1e-8) {
            std::ostringstream os;
            os << "swap_Lsum: zeta argument within 1e-8 of the pole: family "
               << za.family << ", argument = (" << za.arg.real() << ", "
               << za.arg.imag() << ")";
            throw std::domain_error(os.str());
        }
        zfac *= za.recip ? inv_zeta(za.arg) : zeta(za.arg);
    }
    return zfac * calA(A, B, negate(U), negate(V), s, P_cut).value;
}

}  // namespace zetalab
