#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "zetalab/complex_util.hpp"

namespace zetalab {

// Finite multiset of complex shifts. Elements keep their insertion order for
// reproducible iteration; equality is multiset equality via a sorted copy.
// Comparisons are exact (bitwise) — the residue bookkeeping downstream needs
// honest "same shift" tests, so callers must canonicalize fuzzy inputs.
class ShiftMultiset {
public:
    ShiftMultiset() = default;
    ShiftMultiset(std::initializer_list<cplx> xs) : elems_(xs) {}
    explicit ShiftMultiset(std::vector<cplx> xs) : elems_(std::move(xs)) {}

    std::size_t size() const { return elems_.size(); }
    bool empty() const { return elems_.empty(); }
    const std::vector<cplx>& elements() const { return elems_; }
    const cplx& operator[](std::size_t i) const { return elems_[i]; }
    auto begin() const { return elems_.begin(); }
    auto end() const { return elems_.end(); }

    void add(cplx x) { elems_.push_back(x); }

    // Canonically sorted element list (lexicographic by (re, im)).
    std::vector<cplx> sorted() const;

    bool operator==(const ShiftMultiset& other) const;
    bool operator!=(const ShiftMultiset& other) const { return !(*this == other); }

    // True when every element of `sub` occurs in *this with at least the same
    // multiplicity.
    bool contains(const ShiftMultiset& sub) const;

    // True when all elements are pairwise distinct (exact comparison).
    bool all_distinct() const;

    cplx sum() const;

private:
    std::vector<cplx> elems_;
};

// {α + s : α ∈ A}
ShiftMultiset translate(const ShiftMultiset& A, cplx s);

// {−α : α ∈ A}
ShiftMultiset negate(const ShiftMultiset& A);

// Multiset union (concatenation).
ShiftMultiset multiset_union(const ShiftMultiset& A, const ShiftMultiset& B);

// Multiset difference A ∖ U with exact-match removal. Throws
// std::invalid_argument if U is not a sub-multiset of A.
ShiftMultiset setminus(const ShiftMultiset& A, const ShiftMultiset& U);

// All pairs (U, V) with U ⊆ A, V ⊆ B, |U| = |V| = ell. Requires the elements
// of A pairwise distinct and likewise for B; throws std::invalid_argument
// otherwise or when ell > min(|A|, |B|). The result has exactly
// C(|A|,ell)·C(|B|,ell) entries.
std::vector<std::pair<ShiftMultiset, ShiftMultiset>>
enumerate_swaps(const ShiftMultiset& A, const ShiftMultiset& B, std::size_t ell);

// All ordered partitions of A into ell nonempty parts (parts are
// sub-multisets; their disjoint union is A). Throws std::invalid_argument if
// ell == 0 or ell > |A|.
std::vector<std::vector<ShiftMultiset>>
enumerate_partitions(const ShiftMultiset& A, std::size_t ell);

}  // namespace zetalab
