#include <doctest.h>

#include "support.hpp"
#include "vfil/geometry.hpp"

using namespace vfil;
using namespace vfil::testing;

TEST_CASE("cross product is antisymmetric and orthogonal to its factors") {
    for (int trial = 0; trial < 200; ++trial) {
        const Vec3 a = random_vec(), b = random_vec();
        CHECK(cross(a, b) == -cross(b, a));
        CHECK(std::fabs(dot(cross(a, b), a)) < 1e-15);
        CHECK(std::fabs(dot(cross(a, b), b)) < 1e-15);
        CHECK(cross(a, a) == Vec3{});
    }
    CHECK(cross(Vec3{1, 0, 0}, Vec3{0, 1, 0}) == e3);
}

TEST_CASE("grid construction") {
    const auto half = Grid::half_line(20.0, 512);
    CHECK(half.h() == 20.0 / 511.0);
    CHECK(half.s(0) == 0.0);
    CHECK(half.s(511) == doctest::Approx(20.0));
    CHECK(half.origin() == std::optional<std::size_t>(0));

    SUBCASE("whole line mirrors the half line node for node") {
        const auto whole = Grid::whole_line(20.0, 1023);
        REQUIRE(whole.origin() == std::optional<std::size_t>(511));
        CHECK(whole.h() == half.h());
        for (std::size_t i = 0; i < 512; ++i) {
            CHECK(whole.s(511 + i) == half.s(i));
            CHECK(whole.s(511 - i) == -half.s(i));
        }
    }
    SUBCASE("periodic grid excludes the right endpoint") {
        const auto p = Grid::periodic(0.0, 2.0 * pi, 256);
        CHECK(p.h() == 2.0 * pi / 256.0);
        CHECK(p.s(255) < 2.0 * pi);
        CHECK(p.origin() == std::optional<std::size_t>(0));
        CHECK_FALSE(Grid::periodic(1.0, 2.0, 16).origin());
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(Grid::half_line(1.0, 7), Error);
        try {
            Grid::half_line(1.0, 4);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::GridTooSmall);
        }
        try {
            Grid::whole_line(1.0, 64);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::GridNotSymmetric);
        }
        CHECK_THROWS_AS(Grid::half_line(-1.0, 16), Error);
        CHECK_THROWS_AS(Grid::periodic(0.0, 0.0, 16), Error);
    }
}

TEST_CASE("sampled fields validate size and finiteness") {
    const auto g = Grid::half_line(1.0, 8);
    CHECK_THROWS_AS(VectorField(g, std::vector<Vec3>(7)), Error);
    std::vector<double> bad(8, 0.0);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(ScalarField(g, bad), Error);
}

TEST_CASE("finite-difference weights") {
    const std::vector<double> central{-1.0, 0.0, 1.0};
    const auto w2 = fd_weights(2, central);
    CHECK(w2[0] == doctest::Approx(1.0));
    CHECK(w2[1] == doctest::Approx(-2.0));
    CHECK(w2[2] == doctest::Approx(1.0));
    const std::vector<double> right{0.0, 1.0, 2.0};
    const auto w1 = fd_weights(1, right);
    CHECK(w1[0] == doctest::Approx(-1.5));
    CHECK(w1[1] == doctest::Approx(2.0));
    CHECK(w1[2] == doctest::Approx(-0.5));
}

TEST_CASE("interior derivatives converge at second order") {
    double prev1 = 0.0, prev2 = 0.0;
    for (std::size_t n : {64, 128, 256}) {
        const auto g = Grid::periodic(0.0, 2.0 * pi, n);
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(3.0 * g.s(i));
        const auto d1 = deriv(ScalarField(g, f), 1);
        const auto d2 = deriv(ScalarField(g, f), 2);
        double e1 = 0.0, e2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            e1 = std::max(e1, std::fabs(d1[i] - 3.0 * std::cos(3.0 * g.s(i))));
            e2 = std::max(e2, std::fabs(d2[i] + 9.0 * std::sin(3.0 * g.s(i))));
        }
        if (prev1 > 0.0) {
            CHECK(prev1 / e1 == doctest::Approx(4.0).epsilon(0.05));
            CHECK(prev2 / e2 == doctest::Approx(4.0).epsilon(0.05));
        }
        prev1 = e1;
        prev2 = e2;
    }
}

TEST_CASE("non-periodic edges use one-sided second-order stencils") {
    const auto g = Grid::half_line(1.0, 11);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = 1.0 + 2.0 * g.s(i) - 3.0 * g.s(i) * g.s(i);
    const auto d1 = deriv(ScalarField(g, f), 1);
    const auto d2 = deriv(ScalarField(g, f), 2);
    // Quadratics are differentiated exactly by every stencil in use.
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(d1[i] == doctest::Approx(2.0 - 6.0 * g.s(i)).epsilon(1e-10));
        CHECK(d2[i] == doctest::Approx(-6.0).epsilon(1e-9));
    }
}

TEST_CASE("one-sided boundary derivatives are exact on low-degree polynomials") {
    const auto g = Grid::whole_line(1.0, 41);
    std::vector<double> f(g.size());
    // k + 4 nodes differentiate quartics exactly for every k >= 1.
    auto poly = [](double s) { return 0.5 - s + 2.0 * s * s + 0.25 * std::pow(s, 3) - std::pow(s, 4); };
    const double exact[] = {0.5, -1.0, 4.0, 1.5, -24.0};
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = poly(g.s(i));
    const ScalarField field(g, f);
    for (int k = 1; k <= 4; ++k) {
        const double right = one_sided_deriv_at_zero(field, k, {4, 4}, Side::Right);
        const double left = one_sided_deriv_at_zero(field, k, {4, 4}, Side::Left);
        CHECK(right == doctest::Approx(exact[k]).epsilon(1e-6));
        CHECK(left == doctest::Approx(exact[k]).epsilon(1e-6));
    }
    try {
        one_sided_deriv_at_zero(field, 5, {4, 4});
        FAIL("expected OrderTooHigh");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OrderTooHigh);
    }
    CHECK_THROWS_AS(one_sided_deriv(field, 39, 2, Side::Right, {4, 4}), Error);
}

TEST_CASE("projection onto the sphere is idempotent") {
    for (int trial = 0; trial < 500; ++trial) {
        const Vec3 v = random_vec(3.0);
        if (norm(v) < 0.5) continue;
        const Vec3 p = project_unit(v);
        CHECK(std::fabs(norm(p) - 1.0) <= 2.0 * std::numeric_limits<double>::epsilon());
        CHECK(project_unit(p) == p);
    }
    const auto g = Grid::half_line(5.0, 32);
    const auto f = random_smooth_field(g);
    const auto once = normalize_field(f);
    CHECK(normalize_field(once) == once);
    CHECK(max_norm_deviation(once) <= 2.0 * std::numeric_limits<double>::epsilon());
    try {
        project_unit(Vec3{0.1, 0.0, 0.0});
        FAIL("expected DegenerateVector");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateVector);
    }
}

TEST_CASE("trapezoid integration") {
    const auto g = Grid::half_line(3.0, 31);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = g.s(i);
    CHECK(integrate(ScalarField(g, f)) == doctest::Approx(4.5));
    const auto p = Grid::periodic(0.0, 2.0 * pi, 64);
    std::vector<double> c(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) c[i] = std::cos(p.s(i)) * std::cos(p.s(i));
    CHECK(integrate(ScalarField(p, c)) == doctest::Approx(pi).epsilon(1e-14));
}
