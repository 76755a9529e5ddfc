#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "test_util.hpp"
#include "zetalab/arith.hpp"

using namespace zetalab;
using zetalab_test::check_close;
using zetalab_test::random_shifts;

namespace {

// Brute-force oracle for I_{C,D}(p^k): enumerate all exponent splittings
// m_1 + ... + m_h + n_1 + ... + n_l = k with m_i >= 0 and n_j in {0,1}
// (mu(p^n) kills n >= 2), term = prod p^{-m_i γ_i} prod (-1)^{n_j} p^{-n_j δ_j}.
cplx I_pp_oracle(const ShiftMultiset& C, const ShiftMultiset& D, std::uint64_t p,
                 int k) {
    const double lp = std::log(double(p));
    cplx total = 0.0;
    const std::size_t h = C.size(), l = D.size();
    // Odometer over the D-side bits and the C-side exponents bounded by k.
    std::vector<int> m(h, 0), n(l, 0);
    auto term_sum = [&](auto&& self, std::size_t idx, int left) -> cplx {
        if (idx < h) {
            cplx acc = 0.0;
            for (int mi = 0; mi <= left; ++mi) {
                m[idx] = mi;
                acc += self(self, idx + 1, left - mi);
            }
            return acc;
        }
        if (idx < h + l) {
            cplx acc = 0.0;
            for (int nj = 0; nj <= std::min(1, left); ++nj) {
                n[idx - h] = nj;
                acc += self(self, idx + 1, left - nj);
            }
            return acc;
        }
        if (left != 0) return 0.0;
        cplx t = 1.0;
        for (std::size_t i = 0; i < h; ++i) t *= std::exp(-double(m[i]) * C[i] * lp);
        for (std::size_t j = 0; j < l; ++j)
            if (n[j] == 1) t *= -std::exp(-D[j] * lp);
        return t;
    };
    total = term_sum(term_sum, 0, k);
    return total;
}

}  // namespace

TEST_CASE("sieve and factorization basics") {
    ArithContext ctx(200000, 10000);
    CHECK(ctx.primes().size() == 1229);  // pi(10^4)
    CHECK(ctx.primes().front() == 2);
    CHECK(ctx.primes().back() == 9973);

    auto f = ctx.factor(360);
    REQUIRE(f.size() == 3);
    CHECK(f[0] == std::pair<std::uint64_t, int>{2, 3});
    CHECK(f[1] == std::pair<std::uint64_t, int>{3, 2});
    CHECK(f[2] == std::pair<std::uint64_t, int>{5, 1});
    CHECK(ctx.factor(1).empty());
    CHECK_THROWS_AS(ctx.factor(0), std::out_of_range);
    CHECK_THROWS_AS(ctx.factor(200001), std::out_of_range);

    auto d = ctx.divisors(60);
    CHECK(d.size() == 12);
    std::uint64_t sum = 0;
    for (auto x : d) sum += x;
    CHECK(sum == 168);

    CHECK(ctx.mobius(1) == 1);
    CHECK(ctx.mobius(6) == 1);
    CHECK(ctx.mobius(30) == -1);
    CHECK(ctx.mobius(12) == 0);
    CHECK(ctx.euler_phi(1) == 1);
    CHECK(ctx.euler_phi(10) == 4);
    CHECK(ctx.euler_phi(97) == 96);
    CHECK(ctx.euler_phi(360) == 96);

    CHECK(is_prime_u64(2));
    CHECK(is_prime_u64(9973));
    CHECK(!is_prime_u64(1));
    CHECK(!is_prime_u64(100003ull * 100003ull));
}

TEST_CASE("I_pp two-sided coefficients: pinned examples") {
    const cplx delta(0.2, 0.0);
    ShiftMultiset D{delta};
    check_close(I_pp(ShiftMultiset{}, D, 5, 1), -std::exp(-delta * std::log(5.0)),
                1e-14, "mu(p) weight");
    CHECK(std::abs(I_pp(ShiftMultiset{}, D, 5, 2)) == 0.0);  // mu(p^2) = 0

    // I_{{0.1},{0.2}}(2^2) = 2^{-0.2} - 2^{-0.3}.
    check_close(I_pp(ShiftMultiset{cplx(0.1)}, ShiftMultiset{cplx(0.2)}, 2, 2),
                cplx(std::pow(2.0, -0.2) - std::pow(2.0, -0.3)), 1e-14,
                "hand example");
    CHECK(std::abs(std::pow(2.0, -0.2) - std::pow(2.0, -0.3) - 0.05830) < 1e-4);

    CHECK_THROWS_AS(I_pp(D, D, 6, 1), std::invalid_argument);
    CHECK_THROWS_AS(I_pp(D, D, 5, -1), std::invalid_argument);
}

TEST_CASE("I_pp matches the brute-force splitting oracle") {
    zetalab_test::Rng rng(31);
    for (int rep = 0; rep < 30; ++rep) {
        ShiftMultiset C = random_shifts(rng, rng.below(4), 0.25);
        ShiftMultiset D = random_shifts(rng, rng.below(3), 0.25);
        const std::uint64_t p = (rep % 3 == 0) ? 2 : (rep % 3 == 1 ? 3 : 7);
        const int k = static_cast<int>(rng.below(9));
        check_close(I_pp(C, D, p, k), I_pp_oracle(C, D, p, k), 1e-12,
                    "splitting oracle");
    }
}

TEST_CASE("tau at prime powers and the I_{C,emptyset} reduction") {
    for (std::uint64_t p : {2ull, 3ull, 13ull})
        for (int k : {0, 1, 2, 5})
            check_close(tau_pp(ShiftMultiset{cplx(0.0)}, p, k), cplx(1.0), 1e-15,
                        "zeta coefficients are 1");
    check_close(tau_pp(ShiftMultiset{cplx(0.0), cplx(0.0)}, 3, 4), cplx(5.0), 1e-14,
                "d(3^4) = 5");
    const cplx al(0.03, -0.4), be(-0.11, 0.2);
    check_close(tau_pp(ShiftMultiset{al, be}, 7, 1),
                std::exp(-al * std::log(7.0)) + std::exp(-be * std::log(7.0)), 1e-14,
                "first coefficient");
    zetalab_test::Rng rng(32);
    ShiftMultiset C = random_shifts(rng, 3, 0.3);
    for (int k : {0, 1, 4})
        check_close(I_pp(C, ShiftMultiset{}, 5, k), tau_pp(C, 5, k), 0.0,
                    "I with empty D is tau");
}

TEST_CASE("tau over integers: divisor-sum oracle and multiplicativity") {
    ArithContext ctx(100000, 1000);
    CHECK(ctx.tau(ShiftMultiset{}, 1) == cplx(1.0));
    CHECK(ctx.tau(ShiftMultiset{}, 2) == cplx(0.0));
    CHECK(ctx.tau(ShiftMultiset{}, 97) == cplx(0.0));
    check_close(ctx.tau(ShiftMultiset{cplx(0.0), cplx(0.0)}, 12), cplx(6.0), 1e-14,
                "d(12)");

    // Direct divisor enumeration oracle for tau_{α,β}(60) = sum_{de=60} d^{-α} e^{-β}.
    const cplx al(0.05), be(-0.03);
    cplx oracle = 0.0;
    for (std::uint64_t d = 1; d <= 60; ++d)
        if (60 % d == 0)
            oracle += std::exp(-al * std::log(double(d))) *
                      std::exp(-be * std::log(double(60 / d)));
    check_close(ctx.tau(ShiftMultiset{al, be}, 60), oracle, 1e-13, "divisor sum");

    zetalab_test::Rng rng(33);
    ShiftMultiset A = random_shifts(rng, 2, 0.2);
    for (auto [m, n] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{
             {4, 9}, {8, 15}, {49, 25}, {31, 64}, {77, 100}}) {
        check_close(ctx.tau(A, m * n), ctx.tau(A, m) * ctx.tau(A, n), 1e-13,
                    "multiplicative");
    }
}

TEST_CASE("Ramanujan sums: divisor formula vs exponential-sum oracle") {
    ArithContext ctx(100000, 1000);
    for (long long h : {-7, 1, 3, 12})
        CHECK(ctx.ramanujan_sum(1, h) == 1);
    for (std::uint64_t p : {3ull, 7ull, 11ull})
        CHECK(ctx.ramanujan_sum(p, 1) == -1);
    CHECK(ctx.ramanujan_sum(4, 2) == -2);

    // Exponential-sum definition: c_q(h) = sum over a mod q, gcd(a,q)=1, of
    // e^{2 pi i a h / q}; the result is a (real) integer.
    auto expsum = [](std::uint64_t q, long long h) {
        double re = 0.0;
        for (std::uint64_t a = 1; a <= q; ++a) {
            if (std::gcd(a, q) != 1) continue;
            re += std::cos(2.0 * M_PI * double(a) * double(h) / double(q));
        }
        return std::llround(re);
    };
    for (std::uint64_t q = 1; q <= 40; ++q)
        for (long long h = -40; h <= 40; ++h)
            CHECK(ctx.ramanujan_sum(q, h) == expsum(q, h));
    // h = 0 degenerates to Euler phi.
    for (std::uint64_t q : {1ull, 4ull, 12ull, 36ull})
        CHECK(ctx.ramanujan_sum(q, 0) == static_cast<long long>(ctx.euler_phi(q)));
}

TEST_CASE("one-element peel recursion (two forms) holds") {
    zetalab_test::Rng rng(34);
    for (int rep = 0; rep < 15; ++rep) {
        ShiftMultiset C = random_shifts(rng, 2, 0.25);
        ShiftMultiset D = random_shifts(rng, 2, 0.25);
        const cplx s(rng.uniform(-0.25, 0.25), rng.uniform(-0.25, 0.25));
        const std::uint64_t p = 3;
        const double lp = std::log(3.0);
        ShiftMultiset Cs = multiset_union(C, ShiftMultiset{s});
        for (int r = 0; r <= 6; ++r) {
            const cplx lhs = I_pp(Cs, D, p, r);
            const cplx tail =
                r == 0 ? cplx(0.0) : std::exp(-s * lp) * I_pp(Cs, D, p, r - 1);
            check_close(lhs, I_pp(C, D, p, r) + tail, 1e-13, "peel recursion");
        }
    }
}

TEST_CASE("translation identity: p^{-ks} I_{C,D} = I_{C_s, D_s}") {
    zetalab_test::Rng rng(35);
    for (int rep = 0; rep < 15; ++rep) {
        ShiftMultiset C = random_shifts(rng, 1 + rng.below(3), 0.25);
        ShiftMultiset D = random_shifts(rng, rng.below(3), 0.25);
        const cplx s(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
        for (std::uint64_t p : {2ull, 3ull, 5ull}) {
            const double lp = std::log(double(p));
            for (int k : {0, 1, 3, 7, 12}) {
                check_close(std::exp(-double(k) * s * lp) * I_pp(C, D, p, k),
                            I_pp(translate(C, s), translate(D, s), p, k), 1e-13,
                            "translation");
            }
        }
    }
}

TEST_CASE("zero-shift adjunction telescopes partial sums") {
    // sum_{r=0}^{R} I_{C,D}(p^{r+M}) = I_{C∪{0},D}(p^{R+M}) - I_{C∪{0},D}(p^{M-1}).
    zetalab_test::Rng rng(36);
    for (int rep = 0; rep < 10; ++rep) {
        ShiftMultiset C = random_shifts(rng, 2, 0.25);
        ShiftMultiset D = random_shifts(rng, 1, 0.25);
        ShiftMultiset C0 = multiset_union(C, ShiftMultiset{cplx(0.0)});
        const std::uint64_t p = 5;
        for (int M : {0, 1, 3, 8}) {
            for (int R : {0, 2, 8}) {
                cplx lhs = 0.0;
                for (int r = 0; r <= R; ++r) lhs += I_pp(C, D, p, r + M);
                const cplx low = M == 0 ? cplx(0.0) : I_pp(C0, D, p, M - 1);
                check_close(lhs, I_pp(C0, D, p, R + M) - low, 1e-13, "telescoping");
            }
        }
    }
}

TEST_CASE("weighted I-series sums to the Euler-factor closed form") {
    // sum_k I_{C,{-s}}(p^k) p^{-k(1+s)} = (1 - 1/p) prod_γ (1 - p^{-1-s-γ})^{-1}.
    zetalab_test::Rng rng(37);
    for (int rep = 0; rep < 10; ++rep) {
        ShiftMultiset C = random_shifts(rng, 1 + rng.below(3), 0.1);
        const cplx s(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1));
        for (std::uint64_t p : {2ull, 3ull, 11ull}) {
            const double lp = std::log(double(p));
            auto table = I_pp_table(C, ShiftMultiset{-s}, p, 60);
            cplx lhs = 0.0;
            for (int k = 60; k >= 0; --k)
                lhs += table[k] * std::exp(-double(k) * (1.0 + s) * lp);
            cplx rhs = 1.0 - 1.0 / double(p);
            for (const cplx& g : C) rhs /= 1.0 - std::exp(-(1.0 + s + g) * lp);
            check_close(lhs, rhs, 1e-10, "Euler factor");
        }
    }
}

TEST_CASE("divisor bound controls coefficient growth") {
    zetalab_test::Rng rng(38);
    for (int rep = 0; rep < 10; ++rep) {
        ShiftMultiset C = random_shifts(rng, 2, 0.25);
        ShiftMultiset D = random_shifts(rng, 2, 0.25);
        double c = 0.0;
        for (const cplx& g : C) c = std::max(c, -g.real());
        for (const cplx& d : D) c = std::max(c, -d.real());
        for (std::uint64_t p : {2ull, 5ull}) {
            for (int k : {1, 4, 9}) {
                const double bound = std::pow(double(p), k * (c + 0.1)) *
                                     std::pow(k + 1.0, double(C.size() + D.size()));
                CHECK(std::abs(I_pp(C, D, p, k)) <= bound);
            }
        }
    }
}

TEST_CASE("Dirichlet convolution of prime-power tables") {
    zetalab_test::Rng rng(39);
    const cplx al(0.07, -0.2), be(-0.12, 0.33);
    auto fa = I_pp_table(ShiftMultiset{al}, ShiftMultiset{}, 3, 10);
    auto fb = I_pp_table(ShiftMultiset{be}, ShiftMultiset{}, 3, 10);
    for (int k : {0, 1, 2, 5, 10})
        check_close(dirichlet_convolve_pp(fa, fb, k),
                    tau_pp(ShiftMultiset{al, be}, 3, k), 1e-13,
                    "tau convolution");

    // Identity sequence is neutral.
    std::vector<cplx> id(11, cplx(0.0));
    id[0] = 1.0;
    for (int k : {0, 3, 10})
        check_close(dirichlet_convolve_pp(fa, id, k), fa[k], 0.0, "identity");

    // Convolving two-sided tables multiplies the generating functions, i.e.
    // unions the multisets on both sides.
    ShiftMultiset C1 = random_shifts(rng, 2, 0.3), D1 = random_shifts(rng, 1, 0.3);
    ShiftMultiset C2 = random_shifts(rng, 1, 0.3), D2 = random_shifts(rng, 2, 0.3);
    auto t1 = I_pp_table(C1, D1, 5, 8);
    auto t2 = I_pp_table(C2, D2, 5, 8);
    auto tu = I_pp_table(multiset_union(C1, C2), multiset_union(D1, D2), 5, 8);
    for (int k = 0; k <= 8; ++k)
        check_close(dirichlet_convolve_pp(t1, t2, k), tu[k], 1e-13, "union tables");

    CHECK_THROWS_AS(dirichlet_convolve_pp(fa, fb, 11), std::invalid_argument);
}

TEST_CASE("coefficient cache reproduces fresh computation bit-for-bit") {
    ArithContext ctx(1000, 100);
    zetalab_test::Rng rng(40);
    ShiftMultiset C = random_shifts(rng, 3, 0.3);
    ShiftMultiset D = random_shifts(rng, 2, 0.3);
    for (int pass = 0; pass < 2; ++pass) {
        for (int k : {0, 3, 17, 40}) {
            const cplx cached = ctx.cached_I(C, D, 7, k);
            const cplx fresh = I_pp(C, D, 7, k);
            CHECK(cached.real() == fresh.real());
            CHECK(cached.imag() == fresh.imag());
        }
    }
    // Insertion order must not matter: permuted multisets share cache entries.
    std::vector<cplx> perm(C.elements().rbegin(), C.elements().rend());
    const cplx a = ctx.cached_I(ShiftMultiset(perm), D, 7, 9);
    const cplx b = ctx.cached_I(C, D, 7, 9);
    CHECK(a.real() == b.real());
    CHECK(a.imag() == b.imag());
}
