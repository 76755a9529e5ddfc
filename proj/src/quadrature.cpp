#include "zetalab/quadrature.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace zetalab {

namespace {

GLRule build_gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    GLRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    // Newton iteration on P_n from the Chebyshev-like initial guess; only the
    // lower half is computed, the rest follows by symmetry.
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Recurrence: (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}.
            double p0 = 1.0, p1 = x;
            for (int k = 1; k < n; ++k) {
                double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.x[i] = -x;
        rule.x[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.w[i] = w;
        rule.w[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GLRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GLRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
    return it->second;
}

}  // namespace zetalab
