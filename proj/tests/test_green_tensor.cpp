#include <doctest.h>

#include <cmath>

#include "halfspace/errors.hpp"
#include "halfspace/green_tensor.hpp"

using namespace halfspace;

TEST_SUITE("green_tensor") {

TEST_CASE("j = n column is the reflected heat kernel") {
    HalfSpacePoint x({0.3}, 0.4), y({-0.1}, 0.9);
    double t = 0.5;
    Vec d{x.x_tangential[0] - y.x_tangential[0], x.x_normal + y.x_normal};
    CHECK(g_star({2, 2}, x, y, t).value == doctest::Approx(-heat_kernel(d, t)).epsilon(1e-15));
    CHECK(g_star({1, 2}, x, y, t).value == 0.0);
    HalfSpacePoint x3({0.3, 0.1}, 0.4), y3({-0.1, 0.2}, 0.9);
    Vec d3{0.4, -0.1, 1.3};
    CHECK(g_star({3, 3}, x3, y3, t).value == doctest::Approx(-heat_kernel(d3, t)).epsilon(1e-15));
}

TEST_CASE("restricted tensor vanishes on the boundary") {
    for (int s = 0; s < 25; ++s) {
        double xp = std::sin(0.9 * s), yp = std::cos(1.7 * s), yn = 0.1 + 0.5 * std::abs(std::sin(0.3 * s));
        double t = 0.05 + 0.1 * s;
        HalfSpacePoint x({xp}, 0.0), y({yp}, yn);
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j) CHECK(std::abs(g_breve({i, j}, x, y, t).value) <= 1e-12);
    }
}

TEST_CASE("strip quadrature is stable under refinement") {
    StripQuadrature q;
    for (double t : {0.05, 1.0}) {
        HalfSpacePoint x({0.2}, 0.3), y({-0.4}, 0.6);
        for (int i = 1; i <= 2; ++i) {
            double a = g_star({i, 1}, x, y, t, q).value, b = g_star({i, 1}, x, y, t, q.refined()).value;
            CHECK(std::abs(a - b) <= 1e-6 * std::max(std::abs(b), 1e-12));
        }
    }
}

TEST_CASE("strip nodes stay inside the truncated strip") {
    HalfSpacePoint x({0.2}, 0.3), y({-0.4}, 0.6);
    StripNodes s = strip_nodes(x, y, 0.5, {});
    CHECK(s.normal_upper > 0);
    for (double z : s.normal.nodes) {
        CHECK(z >= 0);
        CHECK(z <= s.normal_upper);
    }
    CHECK(gaussian_radius(1.0, std::exp(-1.0)) == doctest::Approx(2.0));
}

TEST_CASE("first derivatives agree with centered differences") {
    HalfSpacePoint x({0.2}, 0.5), y({-0.3}, 0.7);
    double t = 0.4;
    StripQuadrature q;
    q.estimate_error = false;
    for (int w = 0; w < 4; ++w) {
        MultiIndex d;
        auto shifted = [&](double h) {
            HalfSpacePoint xs = x, ys = y;
            double ts = t;
            if (w == 0) xs.x_tangential[0] += h;
            if (w == 1) xs.x_normal += h;
            if (w == 2) ys.x_normal += h;
            if (w == 3) ts += h;
            return g_star({1, 1}, xs, ys, ts, q).value;
        };
        if (w == 0) d.l = 1;
        if (w == 1) d.k = 1;
        if (w == 2) d.q = 1;
        if (w == 3) d.m = 1;
        double exact = g_star_deriv({1, 1}, x, y, t, d, q).value;
        auto err = [&](double h) { return std::abs((shifted(h) - shifted(-h)) / (2 * h) - exact); };
        double e1 = err(0.04), e2 = err(0.02);
        CAPTURE(w);
        CHECK(std::log2(e1 / e2) >= 1.8);
    }
}

TEST_CASE("precomputed strip integrals reproduce direct evaluation") {
    HalfSpacePoint x({0.1}, 0.8), y({0.6}, 0.2);
    double t = 0.3;
    StripQuadrature q;
    StripIntegrals s = strip_integrals(x, y, t, q);
    for (int i = 1; i <= 2; ++i) {
        CHECK(g_star_from(s, {i, 1}, x, y, t, {}) == doctest::Approx(g_star({i, 1}, x, y, t, q).value).epsilon(1e-12));
        MultiIndex d;
        d.k = 1;
        CHECK(g_star_from(s, {i, 1}, x, y, t, d) ==
              doctest::Approx(g_star_deriv({i, 1}, x, y, t, d, q).value).epsilon(1e-12));
    }
}

TEST_CASE("away from the boundary the diagonal is the heat kernel") {
    double t = 0.05;
    HalfSpacePoint x({0.0}, 4.0);
    double v = g_breve({1, 1}, x, x, t).value;
    double g = heat_kernel({0.0, 0.0}, t);
    CHECK(std::abs(v - g) / g < 0.05);
}

TEST_CASE("off-diagonal part decays when y_n is large against sqrt t") {
    double t = 0.01;
    HalfSpacePoint x({0.0}, 0.5), y({0.1}, 2.0);
    CHECK(std::abs(g_breve({2, 1}, x, y, t).value) < 1e-12);
}

TEST_CASE("large-time decay t^{-1}") {
    HalfSpacePoint x({0.3}, 0.4), y({-0.2}, 0.6);
    double prev = INFINITY;
    for (double t : {1.0, 4.0, 16.0, 64.0, 256.0}) {
        double r = t * std::abs(g_breve({1, 1}, x, y, t).value);
        CHECK(r < 1.0);
        CHECK(r <= prev * (1 + 1e-12));
        prev = r;
    }
}

TEST_CASE("input checks") {
    HalfSpacePoint x({0.0}, 0.5), y({0.0}, 0.5);
    CHECK_THROWS_AS(g_star({1, 1}, x, y, 0.0), DomainError);
    CHECK_THROWS_AS(g_star({3, 1}, x, y, 1.0), DomainError);
    HalfSpacePoint x3({0.0, 0.0}, 0.5), y3({0.0, 0.0}, 0.5);
    CHECK_THROWS_AS(g_star({1, 1}, x3, y3, 1.0), DomainError);
}

}  // TEST_SUITE
