#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fracflow/kernels.hpp"
#include "fracflow/quad_oracle.hpp"
#include "fracflow/util.hpp"

using namespace fracflow;

TEST_CASE("antideriv2 branches") {
    CHECK(antideriv2(-2.0, 1.0) == 0.0);
    CHECK(antideriv2(-1.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(antideriv2(-1.5, 4.0) == doctest::Approx(-8.0).epsilon(1e-14));
    CHECK(antideriv2(-1.0, 0.0) == 0.0);
    CHECK_THROWS_AS(antideriv2(-2.0, 0.0), NumericalError);
    CHECK_THROWS_AS(antideriv2(-2.5, 0.0), NumericalError);
    CHECK_THROWS_AS(antideriv2(std::nan(""), 1.0), NumericalError);
}

TEST_CASE("antideriv2 second derivative recovers the kernel") {
    // Central second difference of Psi matches t^q.
    for (double q : {-1.5, -1.0, -2.0, -2.7, -1.2}) {
        for (double t : {0.5, 1.0, 2.5}) {
            const double d = 1e-4 * t;
            const double second =
                (antideriv2(q, t + d) - 2.0 * antideriv2(q, t) + antideriv2(q, t - d)) / (d * d);
            CHECK(second == doctest::Approx(std::pow(t, q)).epsilon(1e-6));
        }
    }
}

TEST_CASE("piecewise-constant pair integral") {
    // Empty clipped region.
    CHECK(pair_integral_pc(1.0, 1.0, -2.0, RangeClip::band(10.0, 12.0)) == 0.0);

    // Unclipped separated pair: Psi(3) - 2 Psi(2) + Psi(1) = -ln3 + 2 ln2.
    const double expected = -std::log(3.0) + 2.0 * std::log(2.0);
    CHECK(pair_integral_pc(1.0, 1.0, -2.0) == doctest::Approx(expected).epsilon(1e-14));

    // Adjacent intervals diverge only at q <= -2.
    CHECK_THROWS_AS(pair_integral_pc(0.0, 1.0, -2.0), NumericalError);
    CHECK_THROWS_AS(pair_integral_pc(0.0, 1.0, -2.5), NumericalError);
    CHECK(pair_integral_pc(0.0, 1.0, -1.5) > 0.0);

    // A lower clip rescues the touching configuration.
    CHECK(pair_integral_pc(0.0, 1.0, -2.0, RangeClip::far_range(0.5)) > 0.0);
}

TEST_CASE("pair integral agrees with the 2-D quadrature oracle") {
    struct Case {
        double gap, h, q;
        RangeClip clip;
    };
    const Case cases[] = {
        {1.0, 1.0, -2.0, RangeClip::none()},
        {0.5, 1.0, -1.5, RangeClip::none()},
        {0.25, 0.5, -1.2, RangeClip::band(0.3, 1.1)},
        {1.0, 2.0, -2.6, RangeClip::band(1.5, 4.0)},
        {2.0, 0.5, -1.0, RangeClip::none()},
    };
    for (const auto& c : cases) {
        CAPTURE(c.gap);
        CAPTURE(c.q);
        const double closed = pair_integral_pc(c.gap, c.h, c.q, c.clip);
        const double oracle = oracle_pair_integral_pc(c.gap, c.h, c.q, c.clip);
        CHECK(closed == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("branch continuity across q = -1 and q = -2") {
    for (double q0 : {-1.0, -2.0}) {
        const double base = pair_integral_pc(1.0, 1.0, q0);
        for (double dq : {1e-6, -1e-6}) {
            const double v = pair_integral_pc(1.0, 1.0, q0 + dq);
            CHECK(std::abs(v - base) <= 1e-4 * std::abs(base));
        }
    }
}

TEST_CASE("clip additivity") {
    struct Case {
        double gap, h, q;
    };
    for (const auto& c : {Case{1.0, 1.0, -2.0}, Case{0.5, 0.75, -1.5}, Case{0.2, 2.0, -2.4}}) {
        const double whole = pair_integral_pc(c.gap, c.h, c.q);
        const double near = pair_integral_pc(c.gap, c.h, c.q, RangeClip::near_range(1.0));
        const double far = pair_integral_pc(c.gap, c.h, c.q, RangeClip::far_range(1.0));
        CHECK(near + far == doctest::Approx(whole).epsilon(1e-12));
    }
}

TEST_CASE("hat pair entries: symmetry, locality beyond the clip, divergences") {
    auto g = make_grid({-1.0, 1.0}, 31);
    const auto kexp = KernelExponent::fractional(0.25);

    Rng rng(7);
    for (int rep = 0; rep < 10; ++rep) {
        const auto i = static_cast<std::size_t>(rng.below(g->n()));
        const auto j = static_cast<std::size_t>(rng.below(g->n()));
        CHECK(hat_pair_entry(*g, i, j, kexp) == hat_pair_entry(*g, j, i, kexp));
    }

    // Disjoint supports beyond the clip range: exactly zero.
    const RangeClip clip = RangeClip::near_range(0.2);
    CHECK(hat_pair_entry(*g, 0, 30, kexp, clip) == 0.0);

    CHECK_THROWS_AS(hat_pair_entry(*g, 40, 2, kexp), ConfigError);

    // s = 0 without an upper clip diverges for overlapping supports.
    const auto k0 = KernelExponent::fractional(0.0);
    CHECK_THROWS_AS(hat_pair_entry(*g, 4, 4, k0), NumericalError);
    CHECK_THROWS_AS(hat_pair_entry(*g, 4, 5, k0), NumericalError);
    // Near-clipped s = 0 entries are finite.
    CHECK(std::isfinite(hat_pair_entry(*g, 4, 4, k0, RangeClip::near_range(1.0))));
}

TEST_CASE("hat pair entries match the adaptive quadrature oracle") {
    auto g = make_grid({-1.0, 1.0}, 31);

    // Center diagonal entry at s = 0.25, unclipped.
    {
        const auto kexp = KernelExponent::fractional(0.25);
        const double closed = hat_pair_entry(*g, 15, 15, kexp);
        const double numeric = oracle_hat_pair_entry(*g, 15, 15, kexp);
        CHECK(closed == doctest::Approx(numeric).epsilon(1e-8));
    }

    // Adjacent entry at s = 0.75 (strong singularity) is finite and matches.
    {
        const auto kexp = KernelExponent::fractional(0.75);
        const double closed = hat_pair_entry(*g, 10, 11, kexp);
        CHECK(std::isfinite(closed));
        const double numeric = oracle_hat_pair_entry(*g, 10, 11, kexp);
        CHECK(closed == doctest::Approx(numeric).epsilon(1e-8));
    }

    // A spread of offsets, exponents, and clips.
    struct Case {
        std::size_t i, j;
        double s;
        RangeClip clip;
    };
    const Case cases[] = {
        {3, 3, 0.5, RangeClip::none()},
        {3, 4, 0.5, RangeClip::none()},
        {0, 2, 0.1, RangeClip::none()},
        {12, 20, 0.9, RangeClip::none()},
        {0, 30, 0.25, RangeClip::none()},
        {8, 8, 0.0, RangeClip::near_range(1.0)},
        {8, 9, 0.0, RangeClip::near_range(1.0)},
        {5, 26, 0.0, RangeClip::far_range(1.0)},
        {2, 17, 0.35, RangeClip::band(0.25, 1.5)},
    };
    for (const auto& c : cases) {
        CAPTURE(c.i);
        CAPTURE(c.j);
        CAPTURE(c.s);
        const auto kexp = KernelExponent::fractional(c.s);
        const double closed = hat_pair_entry(*g, c.i, c.j, kexp, c.clip);
        const double numeric = oracle_hat_pair_entry(*g, c.i, c.j, kexp, c.clip);
        if (numeric == 0.0) {
            CHECK(std::abs(closed) < 1e-14);
        } else {
            CHECK(closed == doctest::Approx(numeric).epsilon(1e-8));
        }
    }
}

TEST_CASE("product entries match the oracle and vanish beyond range") {
    auto g = make_grid({-1.0, 1.0}, 31);
    const RangeClip far = RangeClip::far_range(1.0);
    for (double s : {0.0, 0.3, 0.8}) {
        const auto kexp = KernelExponent::fractional(s);
        for (std::size_t off : {16u, 20u, 24u, 30u}) {
            const double closed = hat_product_entry(*g, 0, off, kexp, far);
            const double numeric = oracle_hat_product_entry(*g, 0, off, kexp, far);
            if (numeric == 0.0) {
                CHECK(std::abs(closed) < 1e-14);
            } else {
                CHECK(closed == doctest::Approx(numeric).epsilon(1e-8));
            }
        }
        // Pairs never reaching distance 1: zero.
        CHECK(hat_product_entry(*g, 0, 1, kexp, far) == 0.0);
    }
}

TEST_CASE("near-range quadratic form is monotone in s") {
    auto g = make_grid({-1.0, 1.0}, 15);
    Rng rng(99);
    Vec u(g->n());
    for (double& v : u) v = rng.sym();

    const RangeClip near = RangeClip::near_range(1.0);
    double prev = -1.0;
    for (double s : {0.1, 0.3, 0.5, 0.7}) {
        const auto kexp = KernelExponent::fractional(s);
        double quad = 0.0;
        for (std::size_t i = 0; i < g->n(); ++i)
            for (std::size_t j = 0; j < g->n(); ++j)
                quad += u[i] * u[j] * hat_pair_entry(*g, i, j, kexp, near);
        CHECK(quad >= prev);
        prev = quad;
    }
}

TEST_CASE("oracle self-consistency under tolerance refinement") {
    auto g = make_grid({-1.0, 1.0}, 31);
    const auto kexp = KernelExponent::fractional(0.5);
    const double coarse = oracle_hat_pair_entry(*g, 14, 16, kexp, RangeClip::none(), 1e-7);
    const double fine = oracle_hat_pair_entry(*g, 14, 16, kexp, RangeClip::none(), 1e-11);
    CHECK(std::abs(coarse - fine) <= 1e-6 * std::abs(fine));
}
