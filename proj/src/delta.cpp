#include "zetalab/delta.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "zetalab/quadrature.hpp"
#include "zetalab/special.hpp"
#include "zetalab/weights.hpp"

namespace zetalab {
namespace {

constexpr double kSeriesTailTarget = 1e-13;  // certified g-series tail

void require_convergent(const ShiftMultiset& E, cplx s) {
    for (const cplx& g : E) {
        if (!((s + g).real() > 0.0)) {
            throw std::domain_error(
                "zetalab: g/G series diverge: need Re(s + γ) > 0 for every shift γ");
        }
    }
}

// |tau_E(p^k)| <= (k+1)^e p^{k c}: growth exponent c and polynomial degree e.
struct SeriesPlan {
    double c = 0.0;
    int e = 0;
};

SeriesPlan plan_for(const ShiftMultiset& E) {
    SeriesPlan pl;
    pl.e = E.empty() ? 0 : static_cast<int>(E.size()) - 1;
    bool first = true;
    for (const cplx& g : E) {
        double v = -g.real();
        if (first || v > pl.c) {
            pl.c = v;
            first = false;
        }
    }
    return pl;
}

// Smallest K with sum_{m>K} (m+r+1)^e p^{(m+r)c - m re_s} < target (the term
// bounds form a ratio-dominated series once kappa*rho < 1).
int certified_terms(double re_s, const SeriesPlan& pl, int r, double lp,
                    double target) {
    const double rho = std::exp(-(re_s - pl.c) * lp);
    if (!(rho < 1.0)) {
        throw std::domain_error(
            "zetalab: g/G series diverge: need Re(s + γ) > 0 for every shift γ");
    }
    const double lead = std::exp(r * pl.c * lp);
    for (int K = 2; K <= 20000; ++K) {
        const double kappa =
            std::pow(1.0 + 1.0 / double(K + r + 1), double(pl.e));
        if (kappa * rho >= 1.0) continue;
        const double first_term = std::pow(double(K + r + 2), double(pl.e)) *
                                  lead * std::pow(rho, double(K + 1));
        if (first_term / (1.0 - kappa * rho) < target) return K;
    }
    throw std::runtime_error("zetalab: g-series tail certification failed");
}

// prod_{γ∈E} (1 - p^{-s-γ})
cplx local_factor_product(const ShiftMultiset& E, cplx s, double lp) {
    cplx prod = 1.0;
    for (const cplx& g : E) prod *= 1.0 - std::exp(-(s + g) * lp);
    return prod;
}

// sum_{m=0}^{K} tau[r+m] p^{-ms}, ascending m.
cplx tau_power_series(const std::vector<cplx>& tau, cplx s, double lp, int r,
                      int K) {
    const cplx u = std::exp(-s * lp);
    cplx pw = 1.0, sum = 0.0;
    for (int m = 0; m <= K; ++m) {
        sum += tau[std::size_t(r + m)] * pw;
        pw *= u;
    }
    return sum;
}

// g at a single prime power p^r (r >= 1) given a precomputed tau table.
cplx g_prime_power(const ShiftMultiset& E, cplx s, double lp,
                   const std::vector<cplx>& tau, const SeriesPlan& pl, int r) {
    const int K = certified_terms(s.real(), pl, r, lp, kSeriesTailTarget);
    if (std::size_t(r + K) >= tau.size()) {
        throw std::logic_error("zetalab: tau table shorter than certified series");
    }
    return local_factor_product(E, s, lp) * tau_power_series(tau, s, lp, r, K);
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
    return std::gcd(a, b);
}

void validate_instance(const CorrelationInstance& inst) {
    if (inst.M == 0 || inst.N == 0 || gcd_u64(inst.M, inst.N) != 1) {
        throw std::invalid_argument("zetalab: correlation moduli must be coprime positive integers");
    }
    if (inst.h == 0) {
        throw std::invalid_argument("zetalab: correlation offset h must be nonzero");
    }
    if (!(inst.X > 0.0)) {
        throw std::invalid_argument("zetalab: window scale X must be positive");
    }
}

}  // namespace

cplx g_E(const ArithContext& ctx, const ShiftMultiset& E, cplx s,
         std::uint64_t n) {
    require_convergent(E, s);
    if (n == 0) throw std::invalid_argument("zetalab: g_E needs n >= 1");
    const SeriesPlan pl = plan_for(E);
    cplx out = 1.0;
    for (const auto& [p, r] : ctx.factor(n)) {
        const double lp = std::log(double(p));
        const int K = certified_terms(s.real(), pl, r, lp, kSeriesTailTarget);
        const auto tau = I_pp_table(E, ShiftMultiset{}, p, r + K);
        out *= local_factor_product(E, s, lp) * tau_power_series(tau, s, lp, r, K);
    }
    return out;
}

cplx G_E(const ArithContext& ctx, const ShiftMultiset& E, cplx s,
         std::uint64_t q) {
    require_convergent(E, s);
    if (q == 0) throw std::invalid_argument("zetalab: G_E needs q >= 1");
    cplx total = 0.0;
    for (std::uint64_t d : ctx.divisors(q)) {
        const int mu_d = ctx.mobius(d);
        if (mu_d == 0) continue;
        const cplx outer = double(mu_d) * std::exp(s * std::log(double(d))) /
                           double(ctx.euler_phi(d));
        cplx inner = 0.0;
        for (std::uint64_t e : ctx.divisors(d)) {
            const int mu_e = ctx.mobius(e);
            if (mu_e == 0) continue;
            inner += double(mu_e) * std::exp(-s * std::log(double(e))) *
                     g_E(ctx, E, s, e * (q / d));
        }
        total += outer * inner;
    }
    return total;
}

cplx G_pp(const ShiftMultiset& E, cplx s, std::uint64_t p, int r) {
    require_convergent(E, s);
    if (!is_prime_u64(p)) throw std::invalid_argument("zetalab: G_pp needs prime p");
    if (r < 0) throw std::invalid_argument("zetalab: G_pp needs r >= 0");
    if (r == 0) return 1.0;
    const SeriesPlan pl = plan_for(E);
    const double lp = std::log(double(p));
    const int K = std::max(certified_terms(s.real(), pl, r, lp, kSeriesTailTarget),
                           r >= 2 ? certified_terms(s.real(), pl, r - 1, lp,
                                                    kSeriesTailTarget)
                                  : 0);
    const auto tau = I_pp_table(E, ShiftMultiset{}, p, r + K);
    const cplx g_r = local_factor_product(E, s, lp) *
                     tau_power_series(tau, s, lp, r, K);
    const cplx g_prev =
        (r >= 2) ? local_factor_product(E, s, lp) *
                       tau_power_series(tau, s, lp, r - 1, K)
                 : cplx(1.0);
    const cplx ps = std::exp(s * lp);
    return (double(p) * g_r - ps * g_prev) / double(p - 1);
}

cplx G_pp_via_I(const ShiftMultiset& E, cplx s, std::uint64_t p, int r, int K) {
    require_convergent(E, s);
    if (!is_prime_u64(p)) throw std::invalid_argument("zetalab: G_pp_via_I needs prime p");
    if (r < 0 || K < 0) throw std::invalid_argument("zetalab: G_pp_via_I needs r, K >= 0");
    const double lp = std::log(double(p));
    const ShiftMultiset D{cplx(1.0) - s};
    const auto table = I_pp_table(E, D, p, r + K);
    const cplx u = std::exp(-s * lp);
    cplx pw = 1.0, sum = 0.0;
    for (int j = 0; j <= K; ++j) {
        sum += table[std::size_t(j + r)] * pw;
        pw *= u;
    }
    return double(p) / double(p - 1) * local_factor_product(E, s, lp) * sum;
}

cplx direct_correlation(const ArithContext& ctx, const CorrelationInstance& inst) {
    validate_instance(inst);
    const TestFunctionPair& pair = test_functions(inst.weight);
    const double lo = inst.X + inst.window_shift;
    const double hi = 2.0 * inst.X + inst.window_shift;
    if (!(lo > 0.0)) throw std::invalid_argument("zetalab: window must sit on positive x");

    const long long m_lo = std::max(1LL, (long long)std::ceil(lo / double(inst.N)));
    const long long m_hi = (long long)std::floor(hi / double(inst.N));
    if (m_hi > (long long)ctx.n_max() ||
        (m_hi * (long long)inst.N - inst.h) / (long long)inst.M >
            (long long)ctx.n_max()) {
        throw std::out_of_range("zetalab: correlation window exceeds the factorization table");
    }

    cplx total = 0.0;
    for (long long m = m_lo; m <= m_hi; ++m) {
        const long long x = m * (long long)inst.N;
        const long long num = x - inst.h;
        if (num <= 0 || num % (long long)inst.M != 0) continue;
        const long long n = num / (long long)inst.M;
        const double w = pair.psi((double(x) - inst.window_shift) / inst.X);
        if (w == 0.0) continue;
        total += ctx.tau(inst.A, std::uint64_t(m)) *
                 ctx.tau(inst.B, std::uint64_t(n)) * w;
    }
    return total;
}

DeltaPrediction delta_prediction(const ArithContext& ctx,
                                 const CorrelationInstance& inst,
                                 int circle_nodes, double radius,
                                 std::uint64_t Q_max) {
    validate_instance(inst);
    if (circle_nodes < 8) throw std::invalid_argument("zetalab: need at least 8 contour nodes");
    if (!(radius > 0.0 && radius < 0.5)) {
        throw std::invalid_argument("zetalab: contour radius must lie in (0, 0.5)");
    }
    if (Q_max < 1 || Q_max > ctx.n_max() || Q_max > ctx.p_max()) {
        throw std::invalid_argument("zetalab: Q_max outside the sieve tables");
    }
    // The contour must enclose the zeta poles at z = -α (they carry the main
    // term) while keeping every G-series convergent on the circle.
    for (const cplx& g : multiset_union(inst.A, inst.B)) {
        if (!(std::abs(g) < radius)) {
            throw std::invalid_argument("zetalab: every shift must lie strictly inside the contour radius");
        }
    }
    const TestFunctionPair& pair = test_functions(inst.weight);
    const double lo = inst.X + inst.window_shift;
    const double hi = 2.0 * inst.X + inst.window_shift;
    if (!(lo > 0.0) || !(lo - double(inst.h) > 0.0)) {
        throw std::invalid_argument("zetalab: window must keep x and x - h positive");
    }

    const int n = circle_nodes;
    const double two_pi = 2.0 * std::acos(-1.0);
    std::vector<cplx> eith(static_cast<std::size_t>(n)), znode(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double th = two_pi * double(j) / double(n);
        eith[std::size_t(j)] = cplx(std::cos(th), std::sin(th));
        znode[std::size_t(j)] = radius * eith[std::size_t(j)];
    }

    // Ramanujan coefficients c_q(h)/q^2, kept only where nonzero; alongside
    // each retained q: log gcd(q,N), log gcd(q,M), log q, and the prime-power
    // factorizations of q/(q,N), q/(q,M).
    std::vector<double> aq, lgN, lgM, lgq;
    std::vector<std::vector<std::uint64_t>> ppN, ppM;
    for (std::uint64_t q = 1; q <= Q_max; ++q) {
        const long long c = ctx.ramanujan_sum(q, inst.h);
        if (c == 0) continue;
        aq.push_back(double(c) / (double(q) * double(q)));
        const std::uint64_t gN = gcd_u64(q, inst.N), gM = gcd_u64(q, inst.M);
        lgN.push_back(std::log(double(gN)));
        lgM.push_back(std::log(double(gM)));
        lgq.push_back(std::log(double(q)));
        std::vector<std::uint64_t> fn, fm;
        for (const auto& [p, r] : ctx.factor(q / gN)) {
            std::uint64_t pp = 1;
            for (int i = 0; i < r; ++i) pp *= p;
            fn.push_back(pp);
        }
        for (const auto& [p, r] : ctx.factor(q / gM)) {
            std::uint64_t pp = 1;
            for (int i = 0; i < r; ++i) pp *= p;
            fm.push_back(pp);
        }
        ppN.push_back(std::move(fn));
        ppM.push_back(std::move(fm));
    }
    const std::size_t Qc = aq.size();

    // Per-node tables of G_E(1 + z, p^r) over all prime powers p^r <= Q_max,
    // built from per-prime tau tables shared across nodes. Also fits the
    // empirical constant in |G| <= C (p^r)^{c + 0.1}.
    const auto build_G_tables = [&](const ShiftMultiset& E, double& C_emp)
        -> std::vector<std::unordered_map<std::uint64_t, cplx>> {
        const SeriesPlan pl = plan_for(E);
        const double worst_re = 1.0 - radius;
        const double cexp = std::max(radius, pl.c) + 0.1;
        struct PrimeSlot {
            std::uint64_t p;
            double lp;
            int r_max;
            std::vector<cplx> tau;
        };
        std::vector<PrimeSlot> slots;
        for (std::uint32_t p32 : ctx.primes()) {
            const std::uint64_t p = p32;
            if (p > Q_max) break;
            PrimeSlot slot;
            slot.p = p;
            slot.lp = std::log(double(p));
            slot.r_max = 0;
            std::uint64_t pp = 1;
            while (pp <= Q_max / p) {
                pp *= p;
                ++slot.r_max;
            }
            int need = 0;
            for (int r = 1; r <= slot.r_max; ++r) {
                need = std::max(
                    need, r + certified_terms(worst_re, pl, r, slot.lp,
                                              kSeriesTailTarget));
            }
            slot.tau = I_pp_table(E, ShiftMultiset{}, p, need);
            slots.push_back(std::move(slot));
        }
        std::vector<std::unordered_map<std::uint64_t, cplx>> tabs(static_cast<std::size_t>(n));
        C_emp = 1.0;
        for (int j = 0; j < n; ++j) {
            const cplx s = 1.0 + znode[std::size_t(j)];
            auto& map = tabs[std::size_t(j)];
            for (const PrimeSlot& slot : slots) {
                const cplx ps = std::exp(s * slot.lp);
                cplx g_prev = 1.0;  // g at exponent 0 is the empty product
                std::uint64_t pp = 1;
                for (int r = 1; r <= slot.r_max; ++r) {
                    pp *= slot.p;
                    const cplx g_r =
                        g_prime_power(E, s, slot.lp, slot.tau, pl, r);
                    const cplx G =
                        (double(slot.p) * g_r - ps * g_prev) / double(slot.p - 1);
                    map.emplace(pp, G);
                    g_prev = g_r;
                    const double ratio =
                        std::abs(G) / std::exp(cexp * double(r) * slot.lp);
                    if (ratio > C_emp) C_emp = ratio;
                }
            }
        }
        return tabs;
    };

    double C_A = 1.0, C_B = 1.0;
    const auto GA = build_G_tables(inst.A, C_A);
    const auto GB = build_G_tables(inst.B, C_B);

    // Row matrices F[node][q-index]; the w-side rows fold in c_q(h)/q^2.
    const auto build_rows = [&](const std::vector<std::unordered_map<std::uint64_t, cplx>>& G,
                                const std::vector<double>& lgcd,
                                const std::vector<std::vector<std::uint64_t>>& pps,
                                bool fold_aq) -> std::vector<std::vector<cplx>> {
        std::vector<std::vector<cplx>> rows(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const cplx z = znode[std::size_t(j)];
            auto& row = rows[std::size_t(j)];
            row.resize(Qc);
            const auto& map = G[std::size_t(j)];
            for (std::size_t t = 0; t < Qc; ++t) {
                cplx v = std::exp(lgcd[t] + z * (lgcd[t] - lgq[t]));
                for (std::uint64_t pp : pps[t]) v *= map.at(pp);
                if (fold_aq) v *= aq[t];
                row[t] = v;
            }
        }
        return rows;
    };
    const auto Fz = build_rows(GA, lgN, ppN, false);
    const auto Fw = build_rows(GB, lgM, ppM, true);

    // x-quadrature nodes for int x^z (x-h)^w u(x) dx over [lo, hi].
    const int nx = std::max(32, circle_nodes / 2);
    const int panels = 4;
    const GLRule& rule = gauss_legendre(nx);
    std::vector<double> wpsi, lx, lxh;
    for (int pan = 0; pan < panels; ++pan) {
        const double a = lo + (hi - lo) * double(pan) / double(panels);
        const double b = lo + (hi - lo) * double(pan + 1) / double(panels);
        const double c0 = 0.5 * (a + b), c1 = 0.5 * (b - a);
        for (int i = 0; i < nx; ++i) {
            const double x = c0 + c1 * rule.x[std::size_t(i)];
            const double psi = pair.psi((x - inst.window_shift) / inst.X);
            wpsi.push_back(c1 * rule.w[std::size_t(i)] * psi);
            lx.push_back(std::log(x));
            lxh.push_back(std::log(x - double(inst.h)));
        }
    }
    const std::size_t nq = wpsi.size();
    std::vector<std::vector<cplx>> Ez(static_cast<std::size_t>(n)), Ew(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        Ez[std::size_t(j)].resize(nq);
        Ew[std::size_t(j)].resize(nq);
        for (std::size_t i = 0; i < nq; ++i) {
            Ez[std::size_t(j)][i] =
                std::exp(znode[std::size_t(j)] * lx[i]) * wpsi[i];
            Ew[std::size_t(j)][i] = std::exp(znode[std::size_t(j)] * lxh[i]);
        }
    }

    // Zeta prefactors N^{-1-z} prod_α zeta(1+z+α) and the M/B twin.
    std::vector<cplx> PzA(static_cast<std::size_t>(n)), PwB(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const cplx z = znode[std::size_t(j)];
        cplx pa = std::exp(-(1.0 + z) * std::log(double(inst.N)));
        for (const cplx& al : inst.A) pa *= zeta(1.0 + z + al);
        cplx pb = std::exp(-(1.0 + z) * std::log(double(inst.M)));
        for (const cplx& be : inst.B) pb *= zeta(1.0 + z + be);
        PzA[std::size_t(j)] = pa;
        PwB[std::size_t(j)] = pb;
    }

    // Index of the first retained q above Q_max/2, for the last-octave gauge.
    std::size_t t_half = Qc;
    for (std::size_t t = 0; t < Qc; ++t) {
        if (lgq[t] > std::log(double(Q_max) / 2.0)) {
            t_half = t;
            break;
        }
    }

    cplx acc = 0.0, acc_tail = 0.0;
    double max_outer = 0.0;
    for (int j = 0; j < n; ++j) {
        const auto& fz = Fz[std::size_t(j)];
        const auto& ez = Ez[std::size_t(j)];
        for (int k = 0; k < n; ++k) {
            const auto& fw = Fw[std::size_t(k)];
            const auto& ew = Ew[std::size_t(k)];
            cplx S = 0.0, S_tail = 0.0;
            for (std::size_t t = 0; t < t_half; ++t) S += fz[t] * fw[t];
            for (std::size_t t = t_half; t < Qc; ++t) S_tail += fz[t] * fw[t];
            cplx xint = 0.0;
            for (std::size_t i = 0; i < nq; ++i) xint += ez[i] * ew[i];
            const cplx outer =
                PzA[std::size_t(j)] * PwB[std::size_t(k)] * xint;
            max_outer = std::max(max_outer, std::abs(outer));
            const cplx phase = eith[std::size_t(j)] * eith[std::size_t(k)];
            acc += phase * outer * (S + S_tail);
            acc_tail += phase * outer * S_tail;
        }
    }
    const double scale = radius / double(n);
    DeltaPrediction out;
    out.value = acc * scale * scale;
    out.q_tail_last_octave = std::abs(acc_tail) * scale * scale;

    // Coarse tail estimate for the dropped q > Q_max terms: |c_q(h)| <= σ(|h|),
    // gcd powers <= (NM)^{1+radius}, |G| <= C (q-part)^{c+0.1}, then compare
    // with the integral of q^{-1-eta}.
    const double cA = std::max(radius, plan_for(inst.A).c) + 0.1;
    const double cB = std::max(radius, plan_for(inst.B).c) + 0.1;
    const double eta = 1.0 - 2.0 * radius - cA - cB;
    double sigma_h = 0.0;
    for (std::uint64_t d : ctx.divisors(std::uint64_t(std::llabs(inst.h)))) {
        sigma_h += double(d);
    }
    if (eta > 0.0) {
        out.q_tail_bound = radius * radius * max_outer * sigma_h *
                           std::pow(double(inst.N) * double(inst.M), 1.0 + radius) *
                           C_A * C_B * std::pow(double(Q_max), -eta) / eta;
    } else {
        out.q_tail_bound = std::numeric_limits<double>::infinity();
    }
    return out;
}

}  // namespace zetalab
