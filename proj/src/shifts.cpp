#include "zetalab/shifts.hpp"

#include <algorithm>
#include <stdexcept>

namespace zetalab {

std::vector<cplx> ShiftMultiset::sorted() const {
    std::vector<cplx> out = elems_;
    std::sort(out.begin(), out.end(), cplx_less);
    return out;
}

bool ShiftMultiset::operator==(const ShiftMultiset& other) const {
    if (elems_.size() != other.elems_.size()) return false;
    return sorted() == other.sorted();
}

bool ShiftMultiset::contains(const ShiftMultiset& sub) const {
    std::vector<cplx> a = sorted();
    std::vector<cplx> u = sub.sorted();
    return std::includes(a.begin(), a.end(), u.begin(), u.end(), cplx_less);
}

bool ShiftMultiset::all_distinct() const {
    std::vector<cplx> a = sorted();
    return std::adjacent_find(a.begin(), a.end()) == a.end();
}

cplx ShiftMultiset::sum() const {
    cplx s = 0.0;
    for (const cplx& x : elems_) s += x;
    return s;
}

ShiftMultiset translate(const ShiftMultiset& A, cplx s) {
    std::vector<cplx> out;
    out.reserve(A.size());
    for (const cplx& a : A) out.push_back(a + s);
    return ShiftMultiset(std::move(out));
}

ShiftMultiset negate(const ShiftMultiset& A) {
    std::vector<cplx> out;
    out.reserve(A.size());
    for (const cplx& a : A) out.push_back(-a);
    return ShiftMultiset(std::move(out));
}

ShiftMultiset multiset_union(const ShiftMultiset& A, const ShiftMultiset& B) {
    std::vector<cplx> out = A.elements();
    out.insert(out.end(), B.begin(), B.end());
    return ShiftMultiset(std::move(out));
}

ShiftMultiset setminus(const ShiftMultiset& A, const ShiftMultiset& U) {
    std::vector<cplx> out = A.elements();
    for (const cplx& u : U) {
        auto it = std::find(out.begin(), out.end(), u);
        if (it == out.end())
            throw std::invalid_argument("setminus: element of U not present in A");
        out.erase(it);
    }
    return ShiftMultiset(std::move(out));
}

namespace {

// All size-ell index subsets of {0, ..., n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> index_subsets(std::size_t n, std::size_t ell) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (cur.size() == ell) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i + (ell - cur.size()) <= n; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

ShiftMultiset pick(const ShiftMultiset& A, const std::vector<std::size_t>& idx) {
    std::vector<cplx> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(A[i]);
    return ShiftMultiset(std::move(out));
}

}  // namespace

std::vector<std::pair<ShiftMultiset, ShiftMultiset>>
enumerate_swaps(const ShiftMultiset& A, const ShiftMultiset& B, std::size_t ell) {
    if (ell > A.size() || ell > B.size())
        throw std::invalid_argument("enumerate_swaps: ell exceeds min(|A|, |B|)");
    if (!A.all_distinct() || !B.all_distinct())
        throw std::invalid_argument("enumerate_swaps: repeated shifts within A or B");
    auto ua = index_subsets(A.size(), ell);
    auto vb = index_subsets(B.size(), ell);
    std::vector<std::pair<ShiftMultiset, ShiftMultiset>> out;
    out.reserve(ua.size() * vb.size());
    for (const auto& iu : ua)
        for (const auto& iv : vb) out.emplace_back(pick(A, iu), pick(B, iv));
    return out;
}

std::vector<std::vector<ShiftMultiset>>
enumerate_partitions(const ShiftMultiset& A, std::size_t ell) {
    if (ell == 0 || ell > A.size())
        throw std::invalid_argument("enumerate_partitions: need 1 <= ell <= |A|");
    const std::size_t n = A.size();
    std::vector<std::vector<ShiftMultiset>> out;
    // Assign each element a part label in [0, ell); keep surjective labelings.
    std::vector<std::size_t> label(n, 0);
    for (;;) {
        std::vector<std::vector<cplx>> parts(ell);
        for (std::size_t i = 0; i < n; ++i) parts[label[i]].push_back(A[i]);
        bool surjective = true;
        for (const auto& p : parts)
            if (p.empty()) surjective = false;
        if (surjective) {
            std::vector<ShiftMultiset> row;
            row.reserve(ell);
            for (auto& p : parts) row.emplace_back(std::move(p));
            out.push_back(std::move(row));
        }
        // Odometer increment over labels.
        std::size_t pos = 0;
        while (pos < n && ++label[pos] == ell) label[pos++] = 0;
        if (pos == n) break;
    }
    return out;
}

}  // namespace zetalab
