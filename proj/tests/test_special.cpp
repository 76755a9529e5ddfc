#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>

#include "test_util.hpp"
#include "zetalab/quadrature.hpp"
#include "zetalab/special.hpp"
#include "zetalab/weights.hpp"

using namespace zetalab;
using zetalab_test::check_close;

namespace {

// Quadrature oracle for the two-piece integral sum_{eps=±1} ∫ y^{a-1}(y-eps)^{b-1} dy.
// Substituting y = 1/u (eps = +1 piece over y > 1) and y = u/(1-u) (eps = -1
// piece over y > 0) turns both pieces into Beta-type integrals on (0,1):
//   ∫_0^1 u^{-a-b}(1-u)^{b-1} du  +  ∫_0^1 u^{a-1}(1-u)^{-a-b} du.
cplx beta_pair_oracle(cplx a, cplx b) {
    cplx plus = tanh_sinh<cplx>(
        [&](double, double da, double db) {
            return std::exp((-a - b) * std::log(da) + (b - 1.0) * std::log(db));
        },
        0.0, 1.0, 1e-13);
    cplx minus = tanh_sinh<cplx>(
        [&](double, double da, double db) {
            return std::exp((a - 1.0) * std::log(da) + (-a - b) * std::log(db));
        },
        0.0, 1.0, 1e-13);
    return plus + minus;
}

}  // namespace

TEST_CASE("zeta matches classical values") {
    check_close(zeta(cplx(2.0)), cplx(M_PI * M_PI / 6.0), 1e-13, "zeta(2)");
    check_close(zeta(cplx(0.0)), cplx(-0.5), 1e-13, "zeta(0)");
    check_close(zeta(cplx(3.0)), cplx(1.2020569031595943), 1e-13, "zeta(3)");
    check_close(zeta(cplx(0.5)), cplx(-1.4603545088095868), 1e-12, "zeta(1/2)");
    // First nontrivial zero (independent high-precision location).
    CHECK(std::abs(zeta(cplx(0.5, 14.134725141734693))) < 1e-6);
}

TEST_CASE("zeta pole guard and validated box") {
    CHECK_THROWS_AS(zeta(cplx(1.0)), std::domain_error);
    CHECK_THROWS_AS(zeta(cplx(1.0, 5e-9)), std::domain_error);
    CHECK(zeta_in_validated_box(cplx(0.5, 30.0)));
    CHECK(!zeta_in_validated_box(cplx(0.1, 30.0)));
    CHECK(!zeta_in_validated_box(cplx(0.5, 150.0)));
}

TEST_CASE("inv_zeta continues through s = 1 with a simple zero") {
    CHECK(inv_zeta(cplx(1.0)) == cplx(0.0));
    check_close(inv_zeta(cplx(2.0)), cplx(6.0 / (M_PI * M_PI)), 1e-13, "1/zeta(2)");
    // The series branch (inside the pole guard) continues the direct
    // reciprocal (outside it): along one ray, values scale like u itself.
    const cplx dir(0.8, 0.6);
    const cplx u1 = 0.9e-8 * dir;  // series branch
    const cplx u2 = 1.2e-8 * dir;  // direct branch
    check_close(inv_zeta(1.0 + u2) / inv_zeta(1.0 + u1), cplx(u2 / u1), 1e-7,
                "series vs direct near the pole");
}

TEST_CASE("functional equation zeta(s) = chi(s) zeta(1-s) on a grid") {
    for (double sigma : {0.3, 0.5, 0.7}) {
        for (double t : {-50.0, -20.0, -5.0, -1.0, 0.5, 2.0, 10.0, 30.0, 50.0}) {
            const cplx s(sigma, t);
            check_close(zeta(s), chi(s) * zeta(1.0 - s), 1e-10, "functional equation");
        }
    }
}

TEST_CASE("chi basics") {
    check_close(chi(cplx(0.5)), cplx(1.0), 1e-12, "chi(1/2)");
    zetalab_test::Rng rng(21);
    for (int rep = 0; rep < 25; ++rep) {
        const cplx s(rng.uniform(-2.0, 3.0), rng.uniform(-80.0, 80.0));
        check_close(chi(s) * chi(1.0 - s), cplx(1.0), 1e-12, "chi reflection");
    }
    // |chi(1/2 + it)| = 1, checked in log form so t can be large.
    for (double t : {0.3, 2.0, 14.0, 100.0, 2000.0}) {
        CHECK(std::abs(log_chi(cplx(0.5, t)).real()) < 1e-10);
        CHECK(std::abs(log_chi(cplx(0.5, -t)).real()) < 1e-10);
    }
}

TEST_CASE("zeta reflection identity used by the correlation pipeline") {
    // zeta(xi+eta-z-w) chi(1+z+w-xi-eta) = zeta(1+z+w-xi-eta): arguments just
    // left of 0 and just right of 1.
    zetalab_test::Rng rng(22);
    for (int rep = 0; rep < 20; ++rep) {
        const double xi = rng.uniform(0.01, 0.05), eta = rng.uniform(0.01, 0.05);
        const cplx z(rng.uniform(-0.06, 0.06), rng.uniform(-0.06, 0.06));
        const cplx w(rng.uniform(-0.06, 0.06), rng.uniform(-0.06, 0.06));
        const cplx arg = xi + eta - z - w;
        check_close(zeta(arg) * chi(1.0 - arg), zeta(1.0 - arg), 1e-10,
                    "reflection identity");
    }
}

TEST_CASE("complex log-gamma agrees with classical values and reflection") {
    check_close(gamma_complex(cplx(5.0)), cplx(24.0), 1e-13, "Gamma(5)");
    check_close(gamma_complex(cplx(0.5)), cplx(std::sqrt(M_PI)), 1e-13, "Gamma(1/2)");
    check_close(gamma_complex(cplx(1.0, 1.0)),
                cplx(0.49801566811835607, -0.15494982830181069), 1e-12,
                "Gamma(1+i)");
    zetalab_test::Rng rng(23);
    for (int rep = 0; rep < 25; ++rep) {
        const cplx z(rng.uniform(-3.0, 4.0), rng.uniform(-40.0, 40.0));
        if (std::abs(z - std::round(z.real())) < 0.05 && std::abs(z.imag()) < 0.05)
            continue;  // keep clear of Gamma poles
        const cplx lhs = gamma_complex(z) * gamma_complex(1.0 - z);
        const cplx rhs = M_PI / std::sin(M_PI * z);
        if (std::abs(z.imag()) < 15.0)  // sin overflows far out; covered by log tests
            check_close(lhs, rhs, 1e-11, "Gamma reflection");
    }
}

TEST_CASE("tan_safe matches std::tan at moderate height and saturates at ±i") {
    zetalab_test::Rng rng(24);
    for (int rep = 0; rep < 20; ++rep) {
        const cplx z(rng.uniform(-1.4, 1.4), rng.uniform(-8.0, 8.0));
        check_close(tan_safe(z), std::tan(z), 1e-12, "tan vs std");
    }
    CHECK(std::abs(tan_safe(cplx(0.3, 400.0)) - cplx(0.0, 1.0)) < 1e-12);
    CHECK(std::abs(tan_safe(cplx(0.3, -400.0)) + cplx(0.0, 1.0)) < 1e-12);
}

TEST_CASE("two-sided beta integral: closed form vs quadrature and Gamma routes") {
    // Reference point: 2 B(1/4, 1/2).
    const cplx v = beta_pair_integral(cplx(0.25), cplx(0.25));
    check_close(v, cplx(2.0 * std::beta(0.25, 0.5)), 1e-11, "2 B(1/4,1/2)");
    CHECK(std::abs(v.real() - 10.4882) < 2e-4);

    zetalab_test::Rng rng(25);
    for (int rep = 0; rep < 20; ++rep) {
        const cplx a(rng.uniform(0.05, 0.45), rng.uniform(-1.2, 1.2));
        const cplx b(rng.uniform(0.05, 0.45), rng.uniform(-1.2, 1.2));
        const cplx closed = beta_pair_integral(a, b);
        check_close(closed, beta_pair_oracle(a, b), 1e-7, "quadrature oracle");
        // Gamma-function route: B(a,1-a-b) + B(b,1-a-b).
        const cplx lg = lgamma_complex(1.0 - a - b);
        const cplx gammas =
            std::exp(lgamma_complex(a) + lg - lgamma_complex(1.0 - b)) +
            std::exp(lgamma_complex(b) + lg - lgamma_complex(1.0 - a));
        check_close(closed, gammas, 1e-11, "Gamma route");
        // Symmetry in (a, b).
        check_close(closed, beta_pair_integral(b, a), 1e-12, "symmetry");
    }
    CHECK_THROWS_AS(beta_pair_integral(cplx(0.6), cplx(0.25)), std::domain_error);
    CHECK_THROWS_AS(beta_pair_integral(cplx(0.25), cplx(-0.1)), std::domain_error);
}

TEST_CASE("beta integral at large height: the tan product collapses to 1") {
    const double t = 50.0, xi = 0.04, eta = 0.04;
    const cplx z = 0.0, w = 0.0;
    const cplx a = 0.5 - xi + z - cplx(0, t);
    const cplx b = 0.5 - eta + w + cplx(0, t);
    const cplx tt = tan_safe(0.5 * M_PI * a) * tan_safe(0.5 * M_PI * b);
    CHECK(std::abs(tt - 1.0) < std::exp(-t / 4.0));
    const cplx lhs = beta_pair_integral(a, b);
    const cplx rhs = chi(1.0 + z + w - xi - eta) * chi(0.5 + xi - z + cplx(0, t)) *
                     chi(0.5 + eta - w - cplx(0, t)) * (1.0 + tt) * 0.5;
    check_close(lhs, rhs, 1e-11, "chi-product form");
}

TEST_CASE("catalog weight pairs: mass, bounds, decay") {
    for (const char* name : {"bump", "poly-taper"}) {
        const TestFunctionPair& pair = test_functions(name);
        const cplx mass = fourier_psi(pair, 0.0);
        check_close(mass, cplx(1.0), 1e-10, "unit mass");
        CHECK(pair.upsilon(0.0) > 0.0);
        CHECK(pair.upsilon(1.0) == 0.0);
        zetalab_test::Rng rng(26);
        for (int rep = 0; rep < 10; ++rep) {
            const double x = rng.uniform(-1e4, 1e4);
            CHECK(std::abs(fourier_psi(pair, x)) <= 1.0 + 1e-10);
        }
    }
    // Smooth bump: superpolynomial transform decay.
    CHECK(std::abs(fourier_psi(test_functions("bump"), 100.0)) <= 1e-4);
    CHECK_THROWS_AS(test_functions("gaussian"), std::invalid_argument);
}

TEST_CASE("interpolated psi-hat grid tracks the exact transform") {
    zetalab_test::Rng rng(27);
    for (const char* name : {"bump", "poly-taper"}) {
        const TestFunctionPair& pair = test_functions(name);
        for (int rep = 0; rep < 40; ++rep) {
            const double x = rng.uniform(-59.0, 59.0);
            const cplx fast = psi_hat_fast(pair, x);
            const cplx exact = fourier_psi(pair, x);
            CHECK(std::abs(fast - exact) < 1e-5);
        }
        CHECK(psi_hat_fast(pair, psi_hat_window() + 0.5) == cplx(0.0));
        const cplx plus = psi_hat_fast(pair, 7.3);
        const cplx minus = psi_hat_fast(pair, -7.3);
        CHECK(std::abs(plus - std::conj(minus)) < 1e-15);
    }
}

TEST_CASE("Mellin transform: elementary stand-in, closed form, quadrature oracle") {
    // Non-smooth stand-in upsilon(x) = 1 - x has the elementary transform
    // 1/(s(s+1)).
    TestFunctionPair linear{"linear-standin", test_functions("bump").psi,
                            [](double x) { return x >= 1.0 ? 0.0 : 1.0 - x; }, 1.0,
                            -1};
    for (cplx s : {cplx(1.0), cplx(0.3, 2.0), cplx(0.01, 0.5), cplx(2.5, -40.0)}) {
        // The accuracy contract is absolute (the transform decays on vertical
        // lines, so relative comparison is meaningless far out).
        CHECK(std::abs(mellin_upsilon(linear, s) - 1.0 / (s * (s + 1.0))) < 1e-10);
    }

    // poly-taper closed form vs its own quadrature route.
    const TestFunctionPair& taper = test_functions("poly-taper");
    for (cplx s : {cplx(0.08, 5.0), cplx(1.0), cplx(0.5, 60.0), cplx(0.02, -3.0)}) {
        CHECK(std::abs(mellin_upsilon(taper, s) -
                       mellin_upsilon_quadrature(taper, s, 2)) < 1e-9);
    }
    check_close(mellin_upsilon(taper, cplx(1.0)), cplx(0.5), 1e-13,
                "poly-taper mass");

    // bump: doubled-node oracle agreement, including the far edge of the box.
    const TestFunctionPair& bump = test_functions("bump");
    for (cplx s : {cplx(0.08, 5.0), cplx(0.5, 200.0), cplx(3.0, -120.0)}) {
        CHECK(std::abs(mellin_upsilon(bump, s) -
                       mellin_upsilon_quadrature(bump, s, 2)) < 1e-9);
    }
    CHECK(mellin_upsilon(bump, cplx(1.0)).real() > 0.0);
    CHECK(std::abs(mellin_upsilon(bump, cplx(1.0)).imag()) < 1e-12);

    CHECK_THROWS_AS(mellin_upsilon(bump, cplx(-0.2, 1.0)), std::domain_error);
}

TEST_CASE("Mellin transforms decay rapidly on vertical lines") {
    // |mellin(eps + i tau)| <= C_m tau^{-m} for m <= 4 with modest C_m on the
    // tau-grid, plus net two-decade decay across the grid. (The bump's decay
    // is superpolynomial asymptotically but has a pre-asymptotic hump, so the
    // check is for bounded constants, not monotonicity.)
    for (const char* name : {"bump", "poly-taper"}) {
        const TestFunctionPair& pair = test_functions(name);
        double first = 0.0, last = 0.0;
        for (int m = 1; m <= 4; ++m) {
            double cm = 0.0;
            for (double tau : {10.0, 20.0, 40.0, 80.0, 160.0}) {
                const double v = std::abs(mellin_upsilon(pair, cplx(0.5, tau)));
                cm = std::max(cm, v * std::pow(tau, double(m)));
                if (m == 1 && tau == 10.0) first = v;
                if (m == 1 && tau == 160.0) last = v;
            }
            CHECK(cm < 1e4);
        }
        CHECK(last <= first / 100.0);
    }
}
