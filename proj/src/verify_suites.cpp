#include "zetalab/verify_suites.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "zetalab/arith.hpp"
#include "zetalab/delta.hpp"
#include "zetalab/local.hpp"
#include "zetalab/quadrature.hpp"
#include "zetalab/rng.hpp"
#include "zetalab/special.hpp"

namespace zetalab {

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string cplx_str(cplx z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "(%.17g,%.17g)", z.real(), z.imag());
    return buf;
}

std::string ms_str(const ShiftMultiset& s) {
    std::string out = "{";
    for (const cplx& z : s) out += cplx_str(z);
    out += "}";
    return out;
}

ShiftMultiset rand_ms(Rng& rng, std::size_t n, double re_box, double im_box) {
    ShiftMultiset out;
    for (std::size_t i = 0; i < n; ++i)
        out.add(cplx(rng.uniform(-re_box, re_box), rng.uniform(-im_box, im_box)));
    return out;
}

// Accumulates rows with per-row timing and digests built from a parameter
// string that pins down the instance.
struct RowSink {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<ComparisonRow> rows;

    void add(const std::string& label, cplx lhs, cplx rhs, const std::string& params,
             double seconds) {
        ComparisonRow r;
        r.label = label;
        r.lhs = lhs;
        r.rhs = rhs;
        std::ostringstream key;
        key << "suite=" << suite << ";seed=" << seed << ";" << label << ";" << params;
        r.params_digest = digest_hex(key.str());
        r.seconds = seconds;
        rows.push_back(std::move(r));
    }
};

// --- coefficient-identities ------------------------------------------------
// Four families of exact prime-power identities for the two-sided
// coefficients I_{C,D}(p^k):
//   translation: p^{-ks} I_{C,D}(p^k) = I_{C+s,D+s}(p^k)
//   peel:        I_{C∪{s},D}(p^r) = I_{C,D}(p^r) + p^{-s} I_{C∪{s},D}(p^{r-1})
//   telescope:   sum_{r<=R} I_{C,D}(p^{r+M}) = I_{C∪{0},D}(p^{R+M}) - I_{C∪{0},D}(p^{M-1})
//   series:      sum_k I_{C,{-s}}(p^k) p^{-k(1+s)} = (1-1/p) prod_γ (1-p^{-1-s-γ})^{-1}
void suite_coefficients(RowSink& sink, Rng& rng) {
    static const std::uint64_t primes[4] = {2, 3, 5, 7};
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t p = primes[rng.below(4)];
        const double lp = std::log(static_cast<double>(p));
        const ShiftMultiset C = rand_ms(rng, rng.below(4), 0.1, 0.1);
        const ShiftMultiset D = rand_ms(rng, rng.below(4), 0.1, 0.1);
        const cplx s(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1));
        std::ostringstream base;
        base << "i=" << i << ";p=" << p << ";C=" << ms_str(C) << ";D=" << ms_str(D)
             << ";s=" << cplx_str(s);

        {
            const int k = static_cast<int>(rng.below(13));
            const double t0 = now_seconds();
            const cplx lhs = std::exp(-static_cast<double>(k) * s * lp) * I_pp(C, D, p, k);
            const cplx rhs = I_pp(translate(C, s), translate(D, s), p, k);
            char lab[48];
            std::snprintf(lab, sizeof lab, "translation/i=%d", i);
            sink.add(lab, lhs, rhs, base.str() + ";k=" + std::to_string(k),
                     now_seconds() - t0);
        }
        {
            const int r = static_cast<int>(rng.below(13));
            const double t0 = now_seconds();
            ShiftMultiset Cs = C;
            Cs.add(s);
            const cplx lhs = I_pp(Cs, D, p, r);
            cplx rhs = I_pp(C, D, p, r);
            if (r >= 1) rhs += std::exp(-s * lp) * I_pp(Cs, D, p, r - 1);
            char lab[48];
            std::snprintf(lab, sizeof lab, "peel/i=%d", i);
            sink.add(lab, lhs, rhs, base.str() + ";r=" + std::to_string(r),
                     now_seconds() - t0);
        }
        {
            const int R = static_cast<int>(rng.below(13));
            const int M = static_cast<int>(rng.below(6));
            const double t0 = now_seconds();
            cplx lhs = 0.0;
            for (int r = 0; r <= R; ++r) lhs += I_pp(C, D, p, r + M);
            ShiftMultiset C0 = C;
            C0.add(cplx(0.0));
            cplx rhs = I_pp(C0, D, p, R + M);
            if (M >= 1) rhs -= I_pp(C0, D, p, M - 1);
            char lab[48];
            std::snprintf(lab, sizeof lab, "telescope/i=%d", i);
            sink.add(lab, lhs, rhs,
                     base.str() + ";R=" + std::to_string(R) + ";M=" + std::to_string(M),
                     now_seconds() - t0);
        }
        {
            const int K = 60;
            const double t0 = now_seconds();
            ShiftMultiset Dm;
            Dm.add(-s);
            const std::vector<cplx> tab = I_pp_table(C, Dm, p, K);
            cplx lhs = 0.0;
            const cplx ratio = std::exp(-(1.0 + s) * lp);
            cplx pw = 1.0;
            for (int k = 0; k <= K; ++k, pw *= ratio) lhs += tab[static_cast<std::size_t>(k)] * pw;
            cplx rhs = 1.0 - 1.0 / static_cast<double>(p);
            for (const cplx& g : C) rhs /= 1.0 - std::exp(-(1.0 + s + g) * lp);
            char lab[48];
            std::snprintf(lab, sizeof lab, "series/i=%d", i);
            sink.add(lab, lhs, rhs, base.str() + ";K=" + std::to_string(K),
                     now_seconds() - t0);
        }
    }
}

// --- beta-integral -----------------------------------------------------------
// The closed form of sum_{eps=±1} ∫ y^{a-1}(y-eps)^{b-1} dy against adaptive
// tanh-sinh quadrature of the two Beta-type pieces (substituted onto (0,1)).
void suite_beta(RowSink& sink, Rng& rng) {
    for (int i = 0; i < 20; ++i) {
        const cplx a(rng.uniform(0.05, 0.45), rng.uniform(-2.0, 2.0));
        const cplx b(rng.uniform(0.05, 0.45), rng.uniform(-2.0, 2.0));
        const double t0 = now_seconds();
        const cplx lhs = beta_pair_integral(a, b);
        const cplx plus = tanh_sinh<cplx>(
            [&](double, double da, double db) {
                return std::exp((-a - b) * std::log(da) + (b - 1.0) * std::log(db));
            },
            0.0, 1.0, 1e-13);
        const cplx minus = tanh_sinh<cplx>(
            [&](double, double da, double db) {
                return std::exp((a - 1.0) * std::log(da) + (-a - b) * std::log(db));
            },
            0.0, 1.0, 1e-13);
        char lab[48];
        std::snprintf(lab, sizeof lab, "beta/i=%d", i);
        sink.add(lab, lhs, plus + minus, "a=" + cplx_str(a) + ";b=" + cplx_str(b),
                 now_seconds() - t0);
    }
}

// --- g-series-identity -------------------------------------------------------
// G at prime powers: the divisor-sum recursion route against the independent
// coefficient-series route.
void suite_g_series(RowSink& sink, Rng& rng) {
    static const std::uint64_t primes[4] = {2, 3, 5, 7};
    for (int i = 0; i < 50; ++i) {
        const std::uint64_t p = primes[rng.below(4)];
        const ShiftMultiset E = rand_ms(rng, 1 + rng.below(3), 0.3, 0.3);
        const cplx s(rng.uniform(0.7, 1.7), rng.uniform(-1.0, 1.0));
        const int r = static_cast<int>(rng.below(7));
        const double t0 = now_seconds();
        const cplx lhs = G_pp(E, s, p, r);
        const cplx rhs = G_pp_via_I(E, s, p, r, 220);
        char lab[48];
        std::snprintf(lab, sizeof lab, "g-series/i=%d", i);
        std::ostringstream params;
        params << "p=" << p << ";E=" << ms_str(E) << ";s=" << cplx_str(s) << ";r=" << r;
        sink.add(lab, lhs, rhs, params.str(), now_seconds() - t0);
    }
}

// --- sigma-closed-form -------------------------------------------------------
// The two-variable correlation sum with one window exponent zero: defining
// triple series against the single-series closed form.
void suite_sigma(RowSink& sink, Rng& rng) {
    static const std::uint64_t primes[4] = {2, 3, 5, 7};
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t p = primes[rng.below(4)];
        const ShiftMultiset A = rand_ms(rng, rng.below(4), 0.08, 0.08);
        const ShiftMultiset B = rand_ms(rng, rng.below(4), 0.08, 0.08);
        const cplx z(rng.uniform(-0.08, 0.08), rng.uniform(-0.45, 0.45));
        const cplx w(rng.uniform(-0.08, 0.08), rng.uniform(-0.45, 0.45));
        const int S = static_cast<int>(rng.below(7));
        const bool m_side = rng.below(2) == 0;
        const int M = m_side ? S : 0;
        const int N = m_side ? 0 : S;
        const double t0 = now_seconds();
        const cplx lhs = sigma_series(A, B, z, w, M, N, p, 60);
        const cplx rhs = sigma_closed(A, B, z, w, M, N, p, 80);
        char lab[48];
        std::snprintf(lab, sizeof lab, "sigma/i=%d", i);
        std::ostringstream params;
        params << "p=" << p << ";A=" << ms_str(A) << ";B=" << ms_str(B)
               << ";z=" << cplx_str(z) << ";w=" << cplx_str(w) << ";M=" << M << ";N=" << N;
        sink.add(lab, lhs, rhs, params.str(), now_seconds() - t0);
    }
}

// --- local-factor-identity ---------------------------------------------------
// The stratified local Euler factor: exponent-tuple sum (lhs) against the
// product-prefactor form (rhs), at one and two partition blocks, with
// truncation-drift certificates from doubling/trimming the cutoffs.
void suite_local_factor(RowSink& sink, Rng& rng) {
    static const std::uint64_t primes[3] = {2, 3, 5};
    for (int i = 0; i < 20; ++i) {
        LocalPoint pt;
        pt.p = primes[rng.below(3)];
        pt.A_parts = {rand_ms(rng, 1 + rng.below(2), 0.08, 0.3)};
        pt.B_parts = {rand_ms(rng, 1 + rng.below(2), 0.08, 0.3)};
        pt.z_list = {cplx(rng.uniform(-0.05, 0.05), rng.uniform(-0.3, 0.3))};
        pt.w_list = {cplx(rng.uniform(-0.05, 0.05), rng.uniform(-0.3, 0.3))};
        pt.xi_eta = cplx(rng.uniform(0.06, 0.14), rng.uniform(-0.05, 0.05));
        std::ostringstream params;
        params << "p=" << pt.p << ";A=" << ms_str(pt.A_parts[0])
               << ";B=" << ms_str(pt.B_parts[0]) << ";z=" << cplx_str(pt.z_list[0])
               << ";w=" << cplx_str(pt.w_list[0]) << ";s=" << cplx_str(pt.xi_eta);

        // d-sum cut scaled to the prime and to this block's draw ranges: with
        // shift imaginary parts up to 0.3 against xi_eta as small as 0.06,
        // near-degenerate pairs slow the decay to roughly p^{-0.36} per step,
        // needing ~110 steps at p = 2 for the 1e-9 tail gate.  The exponent
        // tuple bound is moot at one block (only the zero tuple balances the
        // two sides), so it stays at the validation floor.
        const int d_max = pt.p == 2 ? 114 : pt.p == 3 ? 98 : 88;
        double t0 = now_seconds();
        const cplx lhs = euler_local_lhs(pt, d_max, 1, 4);
        const cplx rhs = euler_local_rhs(pt, 240);
        char lab[64];
        std::snprintf(lab, sizeof lab, "ell1/i=%d", i);
        sink.add(lab, lhs, rhs, params.str(), now_seconds() - t0);

        t0 = now_seconds();
        const cplx rhs2 = euler_local_rhs(pt, 480);
        std::snprintf(lab, sizeof lab, "ell1/i=%d/drift-series", i);
        sink.add(lab, rhs, rhs2, params.str() + ";K=240v480", now_seconds() - t0);
    }
    for (int i = 0; i < 10; ++i) {
        LocalPoint pt;
        pt.p = primes[rng.below(3)];
        // Tuple bounds sized so that the trimmed drift run (mn_bound - 2)
        // still clears the 3e-7 internal tail gate on worst-case draws: a
        // 60-seed scan put the largest required bound at 30 / 20 / 14 per
        // prime, so these sit four above that even after trimming.
        const int mn_bound = pt.p == 2 ? 36 : pt.p == 3 ? 26 : 20;
        const int d_max = mn_bound + 30;
        pt.A_parts = {rand_ms(rng, 1, 0.03, 0.2), rand_ms(rng, 1, 0.03, 0.2)};
        pt.B_parts = {rand_ms(rng, 1, 0.03, 0.2), rand_ms(rng, 1, 0.03, 0.2)};
        pt.z_list = {cplx(rng.uniform(-0.03, 0.03), rng.uniform(-0.2, 0.2)),
                     cplx(rng.uniform(-0.03, 0.03), rng.uniform(-0.2, 0.2))};
        pt.w_list = {cplx(rng.uniform(-0.03, 0.03), rng.uniform(-0.2, 0.2)),
                     cplx(rng.uniform(-0.03, 0.03), rng.uniform(-0.2, 0.2))};
        pt.xi_eta = cplx(rng.uniform(0.10, 0.16), rng.uniform(-0.03, 0.03));
        std::ostringstream params;
        params << "p=" << pt.p << ";A=" << ms_str(pt.A_parts[0]) << ms_str(pt.A_parts[1])
               << ";B=" << ms_str(pt.B_parts[0]) << ms_str(pt.B_parts[1])
               << ";z=" << cplx_str(pt.z_list[0]) << cplx_str(pt.z_list[1])
               << ";w=" << cplx_str(pt.w_list[0]) << cplx_str(pt.w_list[1])
               << ";s=" << cplx_str(pt.xi_eta) << ";MN=" << mn_bound;

        double t0 = now_seconds();
        const cplx lhs = euler_local_lhs(pt, d_max, 1, mn_bound);
        const cplx rhs = euler_local_rhs(pt, 280);
        char lab[64];
        std::snprintf(lab, sizeof lab, "ell2/i=%d", i);
        sink.add(lab, lhs, rhs, params.str(), now_seconds() - t0);

        t0 = now_seconds();
        const cplx lhs_small = euler_local_lhs(pt, d_max, 1, mn_bound - 2);
        std::snprintf(lab, sizeof lab, "ell2/i=%d/drift-tuples", i);
        sink.add(lab, lhs, lhs_small, params.str() + ";MNv" + std::to_string(mn_bound - 2),
                 now_seconds() - t0);

        t0 = now_seconds();
        const cplx rhs2 = euler_local_rhs(pt, 560);
        std::snprintf(lab, sizeof lab, "ell2/i=%d/drift-series", i);
        sink.add(lab, rhs, rhs2, params.str() + ";K=280v560", now_seconds() - t0);
    }
}

// --- functional-equation -------------------------------------------------
// zeta(s) = chi(s) zeta(1-s) and chi(s) chi(1-s) = 1 on a fixed 200-point
// grid of the critical strip, plus chi(1/2) = 1 at tightened tolerance.
void suite_functional_equation(RowSink& sink) {
    int idx = 0;
    for (int si = 0; si < 10; ++si) {
        for (int tj = 0; tj < 20; ++tj, ++idx) {
            const double sigma = 0.25 + 0.05 * si;
            const double t = 0.8 + 4.6 * tj;
            const cplx s(sigma, t);
            std::ostringstream params;
            params << "s=" << cplx_str(s);
            double t0 = now_seconds();
            const cplx lhs = zeta(s);
            const cplx rhs = chi(s) * zeta(1.0 - s);
            char lab[48];
            std::snprintf(lab, sizeof lab, "fe/i=%d", idx);
            sink.add(lab, lhs, rhs, params.str(), now_seconds() - t0);

            t0 = now_seconds();
            const cplx pair = chi(s) * chi(1.0 - s);
            std::snprintf(lab, sizeof lab, "chi-pair/i=%d", idx);
            sink.add(lab, pair, cplx(1.0), params.str(), now_seconds() - t0);
        }
    }
    const double t0 = now_seconds();
    sink.add("chi-half", chi(cplx(0.5)), cplx(1.0), "s=(0.5,0)", now_seconds() - t0);
}

struct SuiteSpec {
    const char* name;
    const char* statement;
    double tolerance;
    std::vector<std::pair<std::string, double>> gates;
};

const std::vector<SuiteSpec>& suite_specs() {
    static const std::vector<SuiteSpec> specs = {
        {"coefficient-identities",
         "prime-power coefficient identities: shift translation, union peel, telescoped "
         "partial sums, generating series",
         1e-10,
         {{"series/", 1e-9}}},
        {"beta-integral",
         "two-piece power-kernel integral: closed form versus adaptive quadrature", 1e-7, {}},
        {"g-series-identity",
         "arithmetic factor G at prime powers: divisor-sum recursion versus coefficient "
         "series",
         1e-10,
         {}},
        {"sigma-closed-form",
         "two-variable correlation sum: defining series versus closed form", 1e-8, {}},
        {"local-factor-identity",
         "stratified local Euler factor: exponent-tuple sum versus product form, with "
         "truncation-drift certificates",
         1e-7,
         {{"ell2/", 1e-6}}},
        {"functional-equation",
         "functional equation of zeta and the chi-factor reflection identity",
         1e-10,
         {{"chi-half", 1e-12}}},
    };
    return specs;
}

}  // namespace

double SuiteResult::gate_for(const std::string& label) const {
    for (const auto& [prefix, tol] : gates)
        if (label.compare(0, prefix.size(), prefix) == 0) return tol;
    return tolerance;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const SuiteSpec& s : suite_specs()) v.emplace_back(s.name);
        return v;
    }();
    return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed,
                      double tolerance_override) {
    const SuiteSpec* spec = nullptr;
    for (const SuiteSpec& s : suite_specs())
        if (name == s.name) spec = &s;
    if (!spec) {
        std::string known;
        for (const SuiteSpec& s : suite_specs()) {
            if (!known.empty()) known += ", ";
            known += s.name;
        }
        throw std::invalid_argument("unknown suite \"" + name + "\" (available: " + known + ")");
    }

    SuiteResult result;
    result.name = spec->name;
    result.statement = spec->statement;
    result.tolerance = spec->tolerance;
    result.gates = spec->gates;
    if (tolerance_override > 0.0) {
        result.tolerance = tolerance_override;
        result.gates.clear();
    }

    RowSink sink;
    sink.suite = result.name;
    sink.seed = seed;
    Rng rng(seed);
    if (result.name == "coefficient-identities") {
        suite_coefficients(sink, rng);
    } else if (result.name == "beta-integral") {
        suite_beta(sink, rng);
    } else if (result.name == "g-series-identity") {
        suite_g_series(sink, rng);
    } else if (result.name == "sigma-closed-form") {
        suite_sigma(sink, rng);
    } else if (result.name == "local-factor-identity") {
        suite_local_factor(sink, rng);
    } else {
        suite_functional_equation(sink);
    }
    result.rows = std::move(sink.rows);

    result.pass = true;
    for (const ComparisonRow& r : result.rows) {
        const double e = rel_err(r.lhs, r.rhs);
        if (e >= result.max_rel) {
            result.max_rel = e;
            result.worst_label = r.label;
        }
        if (e > result.gate_for(r.label)) result.pass = false;
    }
    return result;
}

}  // namespace zetalab
