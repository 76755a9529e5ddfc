#include "zetalab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace zetalab {

bool is_prime_u64(std::uint64_t p) {
    if (p < 2) return false;
    if (p % 2 == 0) return p == 2;
    for (std::uint64_t d = 3; d * d <= p; d += 2)
        if (p % d == 0) return false;
    return true;
}

std::vector<cplx> I_pp_table(const ShiftMultiset& C, const ShiftMultiset& D,
                             std::uint64_t p, int kmax) {
    if (!is_prime_u64(p)) throw std::invalid_argument("I_pp_table: p must be prime");
    if (kmax < 0) throw std::invalid_argument("I_pp_table: kmax must be >= 0");
    const double lp = std::log(static_cast<double>(p));
    std::vector<cplx> seq(kmax + 1, cplx(0.0));
    seq[0] = 1.0;
    // Multiply by (1 - p^{-δ} x) for each δ in D (descending update).
    for (const cplx& d : D) {
        const cplx v = std::exp(-d * lp);
        for (int m = kmax; m >= 1; --m) seq[m] -= v * seq[m - 1];
    }
    // Divide by (1 - p^{-γ} x) for each γ in C (ascending update).
    for (const cplx& c : C) {
        const cplx u = std::exp(-c * lp);
        for (int m = 1; m <= kmax; ++m) seq[m] += u * seq[m - 1];
    }
    return seq;
}

cplx I_pp(const ShiftMultiset& C, const ShiftMultiset& D, std::uint64_t p, int k) {
    if (k < 0) throw std::invalid_argument("I_pp: k must be >= 0");
    return I_pp_table(C, D, p, k)[k];
}

cplx tau_pp(const ShiftMultiset& A, std::uint64_t p, int k) {
    return I_pp(A, ShiftMultiset{}, p, k);
}

cplx dirichlet_convolve_pp(const std::vector<cplx>& f, const std::vector<cplx>& g,
                           int k) {
    if (k < 0 || static_cast<std::size_t>(k) >= f.size() ||
        static_cast<std::size_t>(k) >= g.size())
        throw std::invalid_argument("dirichlet_convolve_pp: sequences too short");
    cplx acc = 0.0;
    for (int i = 0; i <= k; ++i) acc += f[i] * g[k - i];
    return acc;
}

ArithContext::ArithContext(std::size_t n_max, std::size_t p_max)
    : n_max_(n_max), p_max_(p_max) {
    if (n_max_ < 2 || p_max_ < 2)
        throw std::invalid_argument("ArithContext: ranges too small");
    spf_.assign(n_max_ + 1, 0);
    for (std::size_t i = 2; i <= n_max_; ++i) {
        if (spf_[i] == 0)
            for (std::size_t j = i; j <= n_max_; j += i)
                if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
    }
    for (std::size_t p = 2; p <= p_max_; ++p)
        if (p <= n_max_ ? spf_[p] == p : is_prime_u64(p))
            primes_.push_back(static_cast<std::uint32_t>(p));
}

std::vector<std::pair<std::uint64_t, int>> ArithContext::factor(std::uint64_t n) const {
    if (n == 0 || n > n_max_)
        throw std::out_of_range("ArithContext::factor: n outside table range");
    std::vector<std::pair<std::uint64_t, int>> out;
    while (n > 1) {
        const std::uint64_t p = spf_[n];
        int k = 0;
        while (n % p == 0) {
            n /= p;
            ++k;
        }
        out.emplace_back(p, k);
    }
    return out;
}

int ArithContext::mobius(std::uint64_t n) const {
    int sign = 1;
    for (const auto& [p, k] : factor(n)) {
        (void)p;
        if (k >= 2) return 0;
        sign = -sign;
    }
    return sign;
}

std::uint64_t ArithContext::euler_phi(std::uint64_t n) const {
    std::uint64_t phi = 1;
    for (const auto& [p, k] : factor(n)) {
        std::uint64_t pk = p;
        for (int i = 1; i < k; ++i) pk *= p;
        phi *= pk - pk / p;
    }
    return phi;
}

std::vector<std::uint64_t> ArithContext::divisors(std::uint64_t n) const {
    std::vector<std::uint64_t> out{1};
    for (const auto& [p, k] : factor(n)) {
        const std::size_t base = out.size();
        std::uint64_t pk = 1;
        for (int i = 1; i <= k; ++i) {
            pk *= p;
            for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

cplx ArithContext::tau(const ShiftMultiset& A, std::uint64_t n) const {
    cplx acc = 1.0;
    for (const auto& [p, k] : factor(n)) acc *= tau_pp(A, p, k);
    return acc;
}

long long ArithContext::ramanujan_sum(std::uint64_t q, long long h) const {
    const std::uint64_t ah = h >= 0 ? static_cast<std::uint64_t>(h)
                                    : static_cast<std::uint64_t>(-h);
    long long acc = 0;
    for (std::uint64_t d : divisors(q)) {
        if (ah % d != 0 && h != 0) continue;
        acc += static_cast<long long>(d) * mobius(q / d);
    }
    return acc;
}

namespace {

void append_multiset_bytes(std::string& key, const ShiftMultiset& S) {
    auto sorted = S.sorted();
    const std::size_t n = sorted.size();
    key.append(reinterpret_cast<const char*>(&n), sizeof(n));
    if (n > 0)
        key.append(reinterpret_cast<const char*>(sorted.data()), n * sizeof(cplx));
}

}  // namespace

cplx ArithContext::cached_I(const ShiftMultiset& C, const ShiftMultiset& D,
                            std::uint64_t p, int k) const {
    std::string key;
    append_multiset_bytes(key, C);
    append_multiset_bytes(key, D);
    key.append(reinterpret_cast<const char*>(&p), sizeof(p));
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = I_cache_.find(key);
    if (it == I_cache_.end() || static_cast<int>(it->second.size()) <= k) {
        const int grow = std::max(k, it == I_cache_.end()
                                         ? 16
                                         : 2 * static_cast<int>(it->second.size()));
        I_cache_[key] = I_pp_table(C, D, p, grow);
        it = I_cache_.find(key);
    }
    return it->second[k];
}

}  // namespace zetalab
