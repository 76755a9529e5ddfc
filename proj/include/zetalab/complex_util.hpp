#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace zetalab {

using cplx = std::complex<double>;

// Lexicographic order on (re, im). Used for canonical multiset keys, where
// equality must be exact bit-level equality of the stored doubles.
inline bool cplx_less(const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

inline bool near(const cplx& a, const cplx& b, double tol = 1e-12) {
    return std::abs(a - b) <= tol * (1.0 + std::abs(a) + std::abs(b));
}

// Relative discrepancy with a guard for tiny reference values: falls back to
// absolute discrepancy when |rhs| is below `floor`.
inline double rel_err(const cplx& lhs, const cplx& rhs, double floor = 1e-300) {
    double d = std::abs(lhs - rhs);
    double scale = std::abs(rhs);
    return scale > floor ? d / scale : d;
}

// FNV-1a, used for reproducible parameter digests in reports.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 14695981039346656037ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 14695981039346656037ull) {
    return fnv1a(s.data(), s.size(), h);
}

}  // namespace zetalab
