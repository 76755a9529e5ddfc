#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "zetalab/complex_util.hpp"
#include "zetalab/shifts.hpp"

namespace zetalab {

// Deterministic primality by trial division (fine for the sieve-scale inputs
// used here).
bool is_prime_u64(std::uint64_t p);

// Table of I_{C,D}(p^k) for k = 0..kmax. The generating function is
//   sum_k I_{C,D}(p^k) x^k = prod_{γ∈C} (1 - p^{-γ} x)^{-1} prod_{δ∈D} (1 - p^{-δ} x),
// i.e. the two-sided coefficients: sums over p-power splittings m_1...m_h,
// n_1...n_l with each n_j in {0,1} carrying a Möbius sign and δ-weights.
// Computed in O((|C|+|D|)·kmax) by polynomial multiply/peel.
std::vector<cplx> I_pp_table(const ShiftMultiset& C, const ShiftMultiset& D,
                             std::uint64_t p, int kmax);

// I_{C,D}(p^k); throws std::invalid_argument for nonprime p or k < 0.
cplx I_pp(const ShiftMultiset& C, const ShiftMultiset& D, std::uint64_t p, int k);

// tau_A(p^k) = I_{A,∅}(p^k): the p^k-th Dirichlet coefficient of
// prod_{α∈A} zeta(s + α).
cplx tau_pp(const ShiftMultiset& A, std::uint64_t p, int k);

// sum_{i+j=k} f(i) g(j); both sequences must reach index k.
cplx dirichlet_convolve_pp(const std::vector<cplx>& f, const std::vector<cplx>& g,
                           int k);

// Sieve + factorization context: primes up to p_max, smallest-prime-factor
// table up to n_max, and a coefficient cache keyed by (C, D, p) in canonical
// sorted form. Built once; safe for concurrent readers (the cache has its own
// lock).
class ArithContext {
public:
    explicit ArithContext(std::size_t n_max = 1000000, std::size_t p_max = 10000);

    std::size_t n_max() const { return n_max_; }
    std::size_t p_max() const { return p_max_; }
    const std::vector<std::uint32_t>& primes() const { return primes_; }

    // Prime factorization of n (n <= n_max), (p, multiplicity) pairs with p
    // ascending. Throws std::out_of_range beyond the table.
    std::vector<std::pair<std::uint64_t, int>> factor(std::uint64_t n) const;

    // Möbius function, Euler phi, and the sorted divisor list of n <= n_max.
    int mobius(std::uint64_t n) const;
    std::uint64_t euler_phi(std::uint64_t n) const;
    std::vector<std::uint64_t> divisors(std::uint64_t n) const;

    // tau_A(n) = prod_{p^k || n} tau_A(p^k).
    cplx tau(const ShiftMultiset& A, std::uint64_t n) const;

    // Ramanujan sum c_q(h) = sum_{d | q, d | h} d mu(q/d). Matches the
    // exponential-sum definition sum_{a mod q, (a,q)=1} e(ah/q).
    long long ramanujan_sum(std::uint64_t q, long long h) const;

    // Cached I_{C,D}(p^k); identical to I_pp bit-for-bit, amortized across
    // repeated (C, D, p) lookups.
    cplx cached_I(const ShiftMultiset& C, const ShiftMultiset& D, std::uint64_t p,
                  int k) const;

private:
    std::size_t n_max_, p_max_;
    std::vector<std::uint32_t> spf_;       // smallest prime factor, index <= n_max
    std::vector<std::uint32_t> primes_;    // primes <= p_max
    mutable std::mutex cache_mu_;
    mutable std::unordered_map<std::string, std::vector<cplx>> I_cache_;
};

}  // namespace zetalab
