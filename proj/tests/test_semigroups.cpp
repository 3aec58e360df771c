#include <doctest.h>

#include <cmath>

#include "halfspace/errors.hpp"
#include "halfspace/semigroups.hpp"
#include "helpers.hpp"

using namespace halfspace;

namespace {

TensorGrid grid128() { return TensorGrid::plane(8, 8, 128, 128); }

double interior_max_diff(const Field& a, const Field& b, double xn_max) {
    double m = 0;
    for (std::size_t i = 0; i < a.grid.node_count(); ++i) {
        if (a.grid.normal_coord(i) > xn_max) continue;
        for (int c = 0; c < a.components; ++c) m = std::max(m, std::abs(a.at(i, c) - b.at(i, c)));
    }
    return m;
}

}  // namespace

TEST_SUITE("semigroups") {

TEST_CASE("Stokes semigroup rejects compressible data") {
    TensorGrid g = grid128();
    Field f = sample(g, 2, [](const Vec& x) { return Vec{0.0, std::exp(-x[0] * x[0] - (x[1] - 1) * (x[1] - 1))}; });
    CHECK_THROWS_AS(stokes_semigroup(f, 0.5), PreconditionError);
    CHECK_THROWS_AS(mixed_star_semigroup(f, 0.5), PreconditionError);
}

TEST_CASE("Stokes semigroup keeps solenoidal data near t = 0") {
    Field u0 = test::curl_bump(grid128());
    Field u = stokes_semigroup(u0, 1e-3);
    CHECK(test::max_diff(u, u0) / u0.max_abs() < 0.02);
}

TEST_CASE("Stokes flow keeps the no-slip trace and stays solenoidal") {
    Field u0 = test::curl_bump(grid128());
    for (double t : {0.1, 0.5, 2.0}) {
        Field u = stokes_semigroup(u0, t);
        CHECK(boundary_trace(u).max_abs() / u.max_abs() < 1e-6);
        CHECK(solenoidal_residual(u).divergence < 1e-3);
    }
}

TEST_CASE("Stokes semigroup is bounded and composes") {
    Field u0 = test::curl_bump(grid128());
    double m0 = u0.max_norm();
    for (double t : {0.01, 0.1, 1.0, 4.0}) CHECK(stokes_semigroup(u0, t).max_norm() <= 2 * m0);
    Field a = stokes_semigroup(stokes_semigroup(u0, 0.25), 0.25);
    Field b = stokes_semigroup(u0, 0.5);
    CHECK(test::max_diff(a, b) / b.max_abs() < 1e-4);
}

TEST_CASE("heat semigroups on constant data") {
    TensorGrid g = grid128();
    Field one = sample(g, 1, [](const Vec&) { return Vec{1.0}; });
    double t = 0.5;
    Field n = heat_semigroup(one, t, HeatBc::Neumann);
    Field exact = one;
    // stay 5 sqrt(t) below the truncation at x_n = H
    CHECK(interior_max_diff(n, exact, 3.0) < 1e-6);
    Field d = heat_semigroup(one, t, HeatBc::Dirichlet);
    Field erf_profile = sample(g, 1, [t](const Vec& x) { return Vec{std::erf(x[1] / (2 * std::sqrt(t)))}; });
    CHECK(interior_max_diff(d, erf_profile, 3.0) < 1e-6);
    CHECK(boundary_trace(d).max_abs() == 0.0);
}

TEST_CASE("mixed semigroup preserves solenoidality") {
    Field b0 = test::curl_bump(grid128());
    for (double t : {0.1, 0.5}) {
        Field b = mixed_star_semigroup(b0, t);
        Field div = divergence(b, DiffScheme::HighOrder);
        CHECK(div.max_abs() / b.max_abs() < 1e-6);
    }
}

TEST_CASE("gradient of the heat semigroup from data derivatives") {
    TensorGrid g = grid128();
    Field one = sample(g, 1, [](const Vec&) { return Vec{1.0}; });
    CHECK(grad_heat_of_data(one, 0.3, HeatBc::Neumann).max_abs() < 1e-10);
    Field f = sample(g, 1, [](const Vec& x) { return Vec{x[1] * x[1] * std::exp(-x[0] * x[0] - (x[1] - 1) * (x[1] - 1))}; });
    for (HeatBc bc : {HeatBc::Neumann, HeatBc::Dirichlet}) {
        Field a = grad_heat_of_data(f, 0.3, bc);
        Field b = gradient(heat_semigroup(f, 0.3, bc), DiffScheme::HighOrder);
        CHECK(interior_max_diff(a, b, 6.0) / b.max_abs() < 1e-5);
    }
    Field bad = sample(g, 1, [](const Vec& x) { return Vec{std::exp(-x[0] * x[0] - x[1] * x[1])}; });
    CHECK_THROWS_AS(grad_heat_of_data(bad, 0.3, HeatBc::Dirichlet), PreconditionError);
}

TEST_CASE("Duhamel integrals") {
    TensorGrid g = grid128();
    double t = 0.2;
    DuhamelSchedule s = DuhamelSchedule::graded(t);
    Field zero(g, 4);
    CHECK(duhamel_stokes(TimeHistory::constant(zero), t, s).max_abs() == 0.0);
    Field one = sample(g, 1, [](const Vec&) { return Vec{1.0}; });
    Field h = duhamel_heat(TimeHistory::constant(one), 1e-3, HeatBc::Neumann, DuhamelSchedule::graded(1e-3));
    CHECK(interior_max_diff(h, 1e-3 * one, 4.0) < 5e-5);
}

TEST_CASE("Duhamel schedules") {
    for (int M : {8, 24}) {
        DuhamelSchedule s = DuhamelSchedule::graded(0.7, M);
        double w = 0, sing = 0;
        for (std::size_t i = 0; i < s.nodes.size(); ++i) {
            CHECK(s.nodes[i] > 0);
            CHECK(s.nodes[i] < 0.7);
            if (i) CHECK(s.nodes[i] > s.nodes[i - 1]);
            w += s.weights[i];
            sing += s.weights[i] / std::sqrt(0.7 - s.nodes[i]);
        }
        CHECK(w == doctest::Approx(0.7).epsilon(1e-13));
        CHECK(sing == doctest::Approx(2 * std::sqrt(0.7)).epsilon(1e-12));
    }
    DuhamelSchedule n = DuhamelSchedule::nested({0, 0.25, 0.5, 0.75, 1.0}, 0.75, 8);
    CHECK(n.breaks == std::vector<double>{0, 0.25, 0.5});
    DuhamelSchedule c = n.coarsened();
    CHECK(c.breaks == n.breaks);
    CHECK(c.order == 4);
    CHECK(c.nodes.size() < n.nodes.size());
}

TEST_CASE("time history interpolation") {
    TensorGrid g = TensorGrid::plane(4, 4, 16, 16);
    Field a = sample(g, 1, [](const Vec&) { return Vec{1.0}; });
    TimeHistory h{{0.0, 1.0}, {a, 3.0 * a}};
    CHECK(h.at(0.5).at(7, 0) == doctest::Approx(2.0));
    CHECK(h.at(2.0).at(7, 0) == 3.0);
}

TEST_CASE("divergence form of a constant tensor vanishes") {
    TensorGrid g = grid128();
    Field F = sample(g, 4, [](const Vec&) { return Vec{1.0, -2.0, 0.5, 3.0}; });
    CHECK(divergence_form(F).max_abs() < 1e-10);
}

TEST_CASE("antisymmetric forcing yields a solenoidal divergence") {
    // div(b (x) u - u (x) b) for solenoidal u, b is itself divergence free
    TensorGrid g = grid128();
    Field u = test::curl_bump(g, 0.0, 1.2, 0.5), b = test::curl_bump(g, 0.5, 1.5, 0.4);
    Field F(g, 4);
    for (std::size_t i = 0; i < g.node_count(); ++i)
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j) F.at(i, k * 2 + j) = b.at(i, k) * u.at(i, j) - u.at(i, k) * b.at(i, j);
    Field f = divergence_form(F);
    CHECK(solenoidal_residual(f).divergence < 1e-3);
    TraceField tr = boundary_trace(f);
    double fn = 0;
    for (std::size_t p = 0; p < tr.points; ++p) fn = std::max(fn, std::abs(tr.values[p * 2 + 1]));
    CHECK(fn / f.max_abs() < 1e-10);
}

}  // TEST_SUITE
