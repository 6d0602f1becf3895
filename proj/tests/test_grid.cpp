#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "fracflow/grid.hpp"
#include "fracflow/util.hpp"

using namespace fracflow;

TEST_CASE("uniform grid construction") {
    auto g = make_grid({-1.0, 1.0}, 3);
    CHECK(g->h() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g->node(0) == doctest::Approx(-0.5));
    CHECK(g->node(1) == doctest::Approx(0.0));
    CHECK(g->node(2) == doctest::Approx(0.5));

    auto g2 = make_grid({0.0, 1.0}, 7);
    CHECK(g2->h() == doctest::Approx(0.125).epsilon(1e-15));

    CHECK_THROWS_AS(make_grid({-1.0, 1.0}, 2), ConfigError);
    CHECK_THROWS_AS(make_grid({1.0, -1.0}, 8), ConfigError);
}

TEST_CASE("sampling fields onto grids") {
    auto g = make_grid({-1.0, 1.0}, 3);

    auto zero = sample([](double) { return 0.0; }, g);
    for (double v : zero.coeffs()) CHECK(v == 0.0);

    auto ident = sample([](double x) { return x; }, g);
    CHECK(ident.coeffs()[0] == doctest::Approx(-0.5));
    CHECK(ident.coeffs()[1] == doctest::Approx(0.0));
    CHECK(ident.coeffs()[2] == doctest::Approx(0.5));

    auto gauss = sample([](double x) { return std::exp(-8.0 * x * x); }, g);
    CHECK(gauss.coeffs()[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(gauss.coeffs()[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(gauss.coeffs()[2] == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("zero extension vanishes at and outside the boundary") {
    auto g = make_grid({-1.0, 1.0}, 17);
    auto u = sample(bump_field(g->domain()), g);
    for (double x : {-1.0, 1.0, -1.5, 2.0, 17.0, -1.0000001}) {
        CHECK(u.eval(x) == 0.0);
    }
    // Interior evaluation interpolates the nodal values.
    CHECK(u.eval(g->node(8)) == doctest::Approx(u.coeffs()[8]).epsilon(1e-14));
    const double mid = 0.5 * (g->node(3) + g->node(4));
    CHECK(u.eval(mid) == doctest::Approx(0.5 * (u.coeffs()[3] + u.coeffs()[4])).epsilon(1e-14));
}

TEST_CASE("builtin families") {
    Domain dom{0.0, 1.0};

    auto sine = sine_mode_field(dom, 1);
    CHECK(sine(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sine(0.25) == doctest::Approx(std::sin(3.14159265358979323846 * 0.25)).epsilon(1e-14));

    CHECK_THROWS_AS(bump_field(dom, 0.5, 0.0), ConfigError);
    CHECK_THROWS_AS(builtin_family("warp", dom, {}), ConfigError);

    // Plateau: exactly 1 on the central region, < 1e-12 at the margin line.
    auto plat = plateau_field(dom, 0.2);
    CHECK(plat(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(plat(0.2)) < 1e-12);
    CHECK(std::abs(plat(0.8)) < 1e-12);
    CHECK(std::abs(plat(0.05)) < 1e-12);
    CHECK(plat(0.45) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("even families sample symmetrically") {
    auto g = make_grid({-1.0, 1.0}, 33);
    for (const char* name : {"bump", "plateau"}) {
        auto u = sample(builtin_family(name, g->domain(), {}), g);
        const auto& c = u.coeffs();
        for (std::size_t i = 0; i < c.size(); ++i)
            CHECK(c[i] == doctest::Approx(c[c.size() - 1 - i]).epsilon(1e-14));
    }
}

TEST_CASE("csv round trip is lossless") {
    auto g = make_grid({-1.0, 1.0}, 9);
    auto u = sample([](double x) { return std::sin(3.0 * x) * std::exp(x); }, g);
    const auto path = std::filesystem::temp_directory_path() / "fracflow_grid_roundtrip.csv";
    u.write_csv(path.string());
    auto v = GridFunction::read_csv(g, path.string());
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(u.coeffs()[i] == v.coeffs()[i]);
    std::filesystem::remove(path);
}
