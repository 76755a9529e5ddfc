#include "zetalab/special.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace zetalab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;  // log(2*pi)
constexpr double kEulerGamma = 0.5772156649015328606065120900824024;

// B_2, B_4, ..., B_16 for the Euler-Maclaurin tail of zeta.
constexpr double kBernoulli[8] = {
    1.0 / 6.0,     -1.0 / 30.0,     1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0,     -3617.0 / 510.0};

// B_{2k} / (2k (2k-1)) for Stirling's series, k = 1..10.
constexpr double kStirling[10] = {
    1.0 / 12.0,      -1.0 / 360.0,        1.0 / 1260.0,  -1.0 / 1680.0,
    1.0 / 1188.0, -691.0 / 360360.0,      1.0 / 156.0, -3617.0 / 122400.0,
    43867.0 / 244188.0, -174611.0 / 125400.0};

// ln n cache for the Euler-Maclaurin partial sums (n^{-s} = exp(-s ln n) is
// evaluated thousands of times at the same n).
double cached_log(std::size_t n) {
    static std::mutex mu;
    static std::vector<double> logs{0.0, 0.0};  // logs[1] = 0
    {
        std::lock_guard<std::mutex> lock(mu);
        if (n < logs.size()) return logs[n];
        std::size_t old = logs.size();
        logs.resize(n + 1);
        for (std::size_t k = old; k <= n; ++k) logs[k] = std::log(double(k));
        return logs[n];
    }
}

cplx zeta_euler_maclaurin(cplx s) {
    const std::size_t N = static_cast<std::size_t>(std::ceil(std::abs(s.imag()))) + 20;
    cplx sum = 0.0;
    for (std::size_t n = 1; n < N; ++n) sum += std::exp(-s * cached_log(n));
    const double logN = cached_log(N);
    const cplx Npow = std::exp(-s * logN);        // N^{-s}
    sum += Npow * (double(N) / (s - 1.0)) + 0.5 * Npow;
    // Correction terms B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{1-s-2k}.
    cplx rising = s;                 // s (s+1) ... (s + 2k - 2)
    double fact = 2.0;               // (2k)!
    cplx Nneg = Npow / double(N);    // N^{-s-2k+1}
    const double invN2 = 1.0 / (double(N) * double(N));
    for (int k = 1; k <= 8; ++k) {
        sum += (kBernoulli[k - 1] / fact) * rising * Nneg;
        // Advance to k+1: multiply rising by (s+2k-1)(s+2k), fact by (2k+1)(2k+2).
        rising *= (s + double(2 * k - 1)) * (s + double(2 * k));
        fact *= double(2 * k + 1) * double(2 * k + 2);
        Nneg *= invN2;
    }
    return sum;
}

}  // namespace

bool zeta_in_validated_box(cplx s) {
    return s.real() >= 0.2 && s.real() <= 10.0 && std::abs(s.imag()) <= 100.0;
}

cplx zeta(cplx s) {
    if (std::abs(s - 1.0) < 1e-8)
        throw std::domain_error("zeta: pole at s = 1");
    if (s.real() >= -0.5) return zeta_euler_maclaurin(s);
    // Reflect into the half-plane where Euler-Maclaurin converges fast.
    return chi(s) * zeta_euler_maclaurin(1.0 - s);
}

cplx inv_zeta(cplx s) {
    const cplx u = s - 1.0;
    if (std::abs(u) < 1e-8) {
        // 1/zeta(s) = (s-1)(1 - gamma (s-1)) + O((s-1)^3) near the pole.
        return u * (1.0 - kEulerGamma * u);
    }
    return 1.0 / zeta(s);
}

cplx log_sin(cplx z) {
    const double y = z.imag();
    if (std::abs(y) <= 20.0) return std::log(std::sin(z));
    const cplx i(0.0, 1.0);
    if (y > 0.0) {
        // sin z = e^{-iz} (e^{2iz} - 1) / (2i), |e^{2iz}| = e^{-2y} tiny.
        const cplx q = std::exp(2.0 * i * z);
        return -i * z + std::log((q - 1.0) / (2.0 * i));
    }
    // sin z = e^{iz} (1 - e^{-2iz}) / (2i), |e^{-2iz}| = e^{2y} tiny.
    const cplx q = std::exp(-2.0 * i * z);
    return i * z + std::log((1.0 - q) / (2.0 * i));
}

cplx tan_safe(cplx z) {
    const cplx i(0.0, 1.0);
    if (z.imag() >= 0.0) {
        const cplx q = std::exp(2.0 * i * z);  // |q| <= 1
        return -i * (q - 1.0) / (q + 1.0);
    }
    const cplx q = std::exp(-2.0 * i * z);  // |q| < 1
    return -i * (1.0 - q) / (1.0 + q);
}

namespace {

// Stirling expansion, valid for |z| large with Re z >= 0.5.
cplx lgamma_stirling(cplx z) {
    const cplx lz = std::log(z);
    cplx sum = (z - 0.5) * lz - z + 0.5 * kLog2Pi;
    const cplx z2 = z * z;
    cplx zp = z;
    for (int k = 0; k < 10; ++k) {
        sum += kStirling[k] / zp;
        zp *= z2;
    }
    return sum;
}

}  // namespace

cplx lgamma_complex(cplx z) {
    if (z.real() >= 0.5) {
        // Shift until |z| is comfortably in Stirling territory.
        cplx shift_log = 0.0;
        while (std::abs(z) < 12.0) {
            shift_log += std::log(z);
            z += 1.0;
        }
        return lgamma_stirling(z) - shift_log;
    }
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    return std::log(cplx(kPi)) - log_sin(kPi * z) - lgamma_complex(1.0 - z);
}

cplx gamma_complex(cplx z) { return std::exp(lgamma_complex(z)); }

cplx log_chi(cplx s) {
    // chi(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s).
    return s * std::log(2.0) + (s - 1.0) * std::log(kPi) + log_sin(0.5 * kPi * s) +
           lgamma_complex(1.0 - s);
}

cplx chi(cplx s) { return std::exp(log_chi(s)); }

cplx beta_pair_integral(cplx a, cplx b) {
    if (!(a.real() > 0.0 && a.real() < 0.5 && b.real() > 0.0 && b.real() < 0.5))
        throw std::domain_error("beta_pair_integral: need 0 < Re a, Re b < 1/2");
    const cplx tt = tan_safe(0.5 * kPi * a) * tan_safe(0.5 * kPi * b);
    return chi(a + b) * chi(1.0 - a) * chi(1.0 - b) * (1.0 + tt) * 0.5;
}

}  // namespace zetalab
