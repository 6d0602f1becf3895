#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fracflow/energy.hpp"
#include "fracflow/flows.hpp"
#include "fracflow/util.hpp"

using namespace fracflow;

namespace {

GridFunction random_function(GridPtr g, Rng& rng) {
    Vec v(g->n());
    for (double& x : v) x = rng.sym();
    return GridFunction(std::move(g), std::move(v));
}

}  // namespace

TEST_CASE("value: zero, homogeneity, grid mismatch") {
    auto g = make_grid({-1.0, 1.0}, 32);
    const QuadraticEnergy E = build_energy(FlowFamily::ZeroOrder, 0.3, g, MassMode::Lumped);

    CHECK(E.value(GridFunction(g)) == 0.0);

    Rng rng(42);
    const GridFunction u = random_function(g, rng);
    GridFunction u2(g, scaled(u.coeffs(), 2.0));
    CHECK(E.value(u2) == doctest::Approx(4.0 * E.value(u)).epsilon(1e-12));

    auto other = make_grid({-1.0, 1.0}, 33);
    CHECK_THROWS_AS(E.value(GridFunction(other)), ConfigError);
}

TEST_CASE("renormalized energy takes negative values on wide domains") {
    // Far-field dominance needs diam Omega comfortably above the split
    // radius; a low plateau on (-2,2) lands well below zero.
    auto g = make_grid({-2.0, 2.0}, 128);
    const GridFunction u = sample(plateau_field(g->domain(), 0.05), g);
    const QuadraticEnergy E0 = build_energy(FlowFamily::LimitZero, 0.0, g, MassMode::Lumped);
    CHECK(E0.value(u) < 0.0);
    const QuadraticEnergy Es = build_energy(FlowFamily::Renormalized, 0.05, g, MassMode::Lumped);
    CHECK(Es.value(u) < 0.0);
}

TEST_CASE("gradient: zero input, finite-difference identity, F0 closed form") {
    auto g = make_grid({-1.0, 1.0}, 48);
    Rng rng(7);

    for (MassMode mass : {MassMode::Lumped, MassMode::Consistent}) {
        for (FlowFamily fam : {FlowFamily::ZeroOrder, FlowFamily::Renormalized, FlowFamily::LimitZero,
                               FlowFamily::LimitHeat}) {
            const QuadraticEnergy E = build_energy(fam, 0.35, g, mass);
            CHECK(norm2(E.gradient(GridFunction(g)).coeffs()) == 0.0);

            const GridFunction u = random_function(g, rng);
            const GridFunction v = random_function(g, rng);
            const GridFunction grad = E.gradient(u);
            const double eps = 1e-5;
            Vec up = u.coeffs(), um = u.coeffs();
            axpy(eps, v.coeffs(), up);
            axpy(-eps, v.coeffs(), um);
            const double fd =
                (E.value(GridFunction(g, up)) - E.value(GridFunction(g, um))) / (2.0 * eps);
            const double pairing = E.inner(grad.coeffs(), v.coeffs());
            CHECK(fd == doctest::Approx(pairing).epsilon(1e-6));
        }
    }

    // F0 gradient is d w_d u = 2u exactly, in either mass mode.
    for (MassMode mass : {MassMode::Lumped, MassMode::Consistent}) {
        const QuadraticEnergy E = build_energy(FlowFamily::LimitODE, 0.0, g, mass);
        const GridFunction u = random_function(g, rng);
        const GridFunction grad = E.gradient(u);
        for (std::size_t i = 0; i < g->n(); ++i)
            CHECK(grad.coeffs()[i] == doctest::Approx(2.0 * u.coeffs()[i]).epsilon(1e-11));
    }
}

TEST_CASE("prox: anchor at zero, O(tau) step, F0 closed form, residual") {
    auto g = make_grid({-1.0, 1.0}, 48);
    Rng rng(99);
    const QuadraticEnergy E = build_energy(FlowFamily::ZeroOrder, 0.45, g, MassMode::Lumped);

    // y = 0 -> 0.
    const GridFunction x0 = E.prox(0.1, GridFunction(g));
    CHECK(norm2(x0.coeffs()) <= 1e-14);

    // ||prox(tau,y) - y|| = O(tau): slope fit on a tau ladder.
    const GridFunction y = random_function(g, rng);
    std::vector<std::pair<double, double>> pts;
    for (double tau : {1e-2, 1e-3, 1e-4, 1e-5}) {
        const GridFunction x = E.prox(tau, y);
        pts.emplace_back(tau, E.norm(vsub(x.coeffs(), y.coeffs())));
    }
    const double slope = std::log(pts[0].second / pts[3].second) / std::log(pts[0].first / pts[3].first);
    CHECK(slope >= 0.9);

    // F0 prox is diagonal: x = y / (1 + tau d w_d).
    const QuadraticEnergy E0 = build_energy(FlowFamily::LimitODE, 0.0, g, MassMode::Lumped);
    const double tau = 0.37;
    const GridFunction xf = E0.prox(tau, y);
    for (std::size_t i = 0; i < g->n(); ++i)
        CHECK(xf.coeffs()[i] == doctest::Approx(y.coeffs()[i] / (1.0 + 2.0 * tau)).epsilon(1e-10));

    // Optimality residual of the prox system.
    const GridFunction xr = E.prox(0.05, y);
    SymMatrix S(E.mass().mat);
    S.add_scaled(E.form().mat, 2.0 * 0.05 * E.scale());
    const Vec lhs = S.matvec(xr.coeffs());
    const Vec rhs = E.mass().mat.matvec(y.coeffs());
    CHECK(norm2(vsub(lhs, rhs)) <= 1e-12 * norm2(rhs) * 10.0);
}

TEST_CASE("prox admissibility window") {
    auto g = make_grid({-1.0, 1.0}, 24);
    const QuadraticEnergy E = build_energy(FlowFamily::Renormalized, 0.25, g, MassMode::Lumped);
    CHECK(E.lambda() == doctest::Approx(4.0));
    Rng rng(3);
    const GridFunction y = random_function(g, rng);
    CHECK_THROWS_AS(E.prox(0.125, y), ConfigError);  // 1/(2 lambda) = 0.125
    CHECK_NOTHROW(E.prox(0.124, y));
}

TEST_CASE("prox of a convex energy is firmly nonexpansive in the mass norm") {
    auto g = make_grid({-1.0, 1.0}, 32);
    const QuadraticEnergy E = build_energy(FlowFamily::BBM, 0.6, g, MassMode::Consistent);
    Rng rng(55);
    for (int rep = 0; rep < 10; ++rep) {
        const GridFunction y1 = random_function(g, rng);
        const GridFunction y2 = random_function(g, rng);
        const GridFunction x1 = E.prox(0.2, y1);
        const GridFunction x2 = E.prox(0.2, y2);
        const double dx = E.norm(vsub(x1.coeffs(), x2.coeffs()));
        const double dy = E.norm(vsub(y1.coeffs(), y2.coeffs()));
        CHECK(dx <= dy * (1.0 + 1e-10));
    }
}

TEST_CASE("subgradient inequality with the analytic modulus") {
    auto g = make_grid({-1.0, 1.0}, 32);
    Rng rng(21);
    for (FlowFamily fam : {FlowFamily::ZeroOrder, FlowFamily::Renormalized, FlowFamily::LimitZero}) {
        const QuadraticEnergy E = build_energy(fam, 0.2, g, MassMode::Consistent);
        const double lambda = E.lambda() + 1e-9;
        for (int rep = 0; rep < 20; ++rep) {
            const GridFunction x = random_function(g, rng);
            const GridFunction y = random_function(g, rng);
            const GridFunction gx = E.gradient(x);
            const Vec d = vsub(y.coeffs(), x.coeffs());
            const double lhs = E.value(y) - E.value(x) - E.inner(gx.coeffs(), d);
            const double rhs = -0.5 * lambda * E.mass().mat.quad(d);
            CHECK(lhs >= rhs - 1e-9 * (std::abs(lhs) + 1.0));
        }
    }
}

TEST_CASE("estimate_lambda certificates") {
    auto g = make_grid({-1.0, 1.0}, 48);

    const QuadraticEnergy gag = build_energy(FlowFamily::ZeroOrder, 0.3, g, MassMode::Consistent);
    CHECK(estimate_lambda(gag) <= 1e-8);

    const QuadraticEnergy heat = build_energy(FlowFamily::LimitHeat, 0.0, g, MassMode::Consistent);
    CHECK(estimate_lambda(heat) <= 1e-8);

    const QuadraticEnergy f0 = build_energy(FlowFamily::LimitODE, 0.0, g, MassMode::Lumped);
    CHECK(estimate_lambda(f0) <= 1e-10);

    for (double s : {0.05, 0.25, 0.45}) {
        const QuadraticEnergy ren = build_energy(FlowFamily::Renormalized, s, g, MassMode::Consistent);
        const double lam = estimate_lambda(ren);
        CHECK(lam <= 2.0 * g->domain().length() + 1e-6);
    }
}
