#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "halfspace/errors.hpp"
#include "halfspace/fields.hpp"
#include "helpers.hpp"

using namespace halfspace;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("halfspace_test_" + name)).string();
}

}  // namespace

TEST_SUITE("fields") {

TEST_CASE("grid geometry") {
    TensorGrid g = TensorGrid::plane(4, 3, 16, 13);
    CHECK(g.node_count() == 16 * 13);
    CHECK(g.coords(0) == Vec{-4, 0});
    CHECK(g.coords(12)[1] == doctest::Approx(3.0));
    CHECK(g.coords(13)[0] == doctest::Approx(-3.5));
    double area = 0;
    for (std::size_t i = 0; i < g.node_count(); ++i) area += g.cell_weight(i);
    CHECK(area == doctest::Approx(8 * 3).epsilon(1e-14));
    CHECK_THROWS_AS(TensorGrid::plane(4, 3, 4, 13).validate(), DomainError);
    CHECK_THROWS_AS(TensorGrid(2, -1, 3, {16, 16}).validate(), DomainError);
}

TEST_CASE("norms of the zero field vanish") {
    Field z(TensorGrid::plane(4, 4, 16, 16), 2);
    for (auto s : {WeightedNormSpec::Lq(2), WeightedNormSpec::Lq(INFINITY), WeightedNormSpec::Ya(1),
                   WeightedNormSpec::Za(1), WeightedNormSpec::Yab(1, 0.5), WeightedNormSpec::Zaal(1, 1),
                   WeightedNormSpec::Lq_uloc(2)})
        CHECK(weighted_norm(z, s) == 0.0);
}

TEST_CASE("Y_{a,b} norm of its own weight is one") {
    TensorGrid g = TensorGrid::plane(8, 8, 64, 64);
    double a = 1.3, b = 0.7;
    Field f = sample(g, 1, [&](const Vec& x) {
        return Vec{std::pow(japanese(x[0] * x[0] + x[1] * x[1]), -a) * std::pow(japanese(x[1] * x[1]), -b)};
    });
    CHECK(weighted_norm(f, WeightedNormSpec::Yab(a, b)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("boundary weighted norm of x_n exp(-|x|^2)") {
    TensorGrid g = TensorGrid::plane(4, 4, 256, 257);
    Field f = sample(g, 1, [](const Vec& x) { return Vec{x[1] * std::exp(-(x[0] * x[0] + x[1] * x[1]))}; });
    // sup of <x> <x_n> exp(-|x|^2) is 1, attained at the origin
    CHECK(std::abs(weighted_norm(f, WeightedNormSpec::Zaal(1, 1)) - 1) < 0.02);
}

TEST_CASE("Z_{a,0} equals Y_{a,0}") {
    TensorGrid g = TensorGrid::plane(4, 4, 32, 32);
    Field f = test::curl_bump(g);
    CHECK(weighted_norm(f, WeightedNormSpec::Zaal(1.5, 0)) == weighted_norm(f, WeightedNormSpec::Yab(1.5, 0)));
}

TEST_CASE("weights are monotone in the exponents") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    TensorGrid g = TensorGrid::plane(4, 4, 16, 16);
    for (int trial = 0; trial < 10; ++trial) {
        Field f(g, 2);
        for (double& v : f.values) v = u(rng);
        CHECK(weighted_norm(f, WeightedNormSpec::Yab(1, 0.5)) <= weighted_norm(f, WeightedNormSpec::Yab(1.5, 0.5)));
        CHECK(weighted_norm(f, WeightedNormSpec::Yab(1, 0.5)) <= weighted_norm(f, WeightedNormSpec::Yab(1, 1)));
        CHECK(weighted_norm(f, WeightedNormSpec::Lq(INFINITY)) <= weighted_norm(f, WeightedNormSpec::Ya(0.5)));
    }
}

TEST_CASE("L^q norms of a Gaussian") {
    TensorGrid g = TensorGrid::plane(6, 6, 128, 129);
    Field f = sample(g, 1, [](const Vec& x) { return Vec{std::exp(-(x[0] * x[0] + x[1] * x[1]))}; });
    CHECK(weighted_norm(f, WeightedNormSpec::Lq(2)) == doctest::Approx(std::sqrt(std::numbers::pi / 4)).epsilon(2e-3));
    CHECK(weighted_norm(f, WeightedNormSpec::Lq(1)) == doctest::Approx(std::numbers::pi / 2).epsilon(2e-3));
    CHECK(weighted_norm(f, WeightedNormSpec::Lq(INFINITY)) == doctest::Approx(1.0));
}

TEST_CASE("uniformly local norm of a constant") {
    TensorGrid g = TensorGrid::plane(4, 4, 128, 129);
    Field f = sample(g, 1, [](const Vec&) { return Vec{1.0}; });
    CHECK(weighted_norm(f, WeightedNormSpec::Lq_uloc(INFINITY)) == 1.0);
    CHECK(weighted_norm(f, WeightedNormSpec::Lq_uloc(2)) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(0.03));
}

TEST_CASE("norm selector validation") {
    CHECK_THROWS_AS(weighted_norm(Field(TensorGrid::plane(4, 4, 16, 16), 1), WeightedNormSpec::Lq(0.5)), DomainError);
    CHECK_THROWS_AS(WeightedNormSpec::Zaal(1, 1.5).validate(), DomainError);
    CHECK_THROWS_AS(WeightedNormSpec::Ya(-1).validate(), DomainError);
}

TEST_CASE("divergence of linear and solenoidal fields") {
    TensorGrid g = TensorGrid::plane(4, 4, 32, 32);
    Field lin = sample(g, 2, [](const Vec& x) { return Vec{std::sin(std::numbers::pi * x[0] / 4), x[1]}; });
    Field d = divergence(lin);
    // interior nodes away from the x_1 wrap
    std::size_t node = 16 * 32 + 10;
    double x0 = g.coords(node)[0];
    CHECK(d.at(node, 0) ==
          doctest::Approx(1 + std::numbers::pi / 4 * std::cos(std::numbers::pi * x0 / 4)).epsilon(0.01));
    auto resid = [](int N) {
        TensorGrid gg = TensorGrid::plane(4, 4, N, N);
        return divergence(test::curl_bump(gg)).max_abs();
    };
    CHECK(test::order(resid(64), resid(128)) >= 1.8);
}

TEST_CASE("gradient layout") {
    TensorGrid g = TensorGrid::plane(4, 4, 32, 32);
    Field f = sample(g, 2, [](const Vec& x) { return Vec{x[1], 2 * x[1]}; });
    Field gr = gradient(f);
    CHECK(gr.components == 4);
    CHECK(gr.at(100, 1) == doctest::Approx(1.0));
    CHECK(gr.at(100, 3) == doctest::Approx(2.0));
    CHECK(std::abs(gr.at(100, 0)) < 1e-14);
}

TEST_CASE("boundary trace") {
    TensorGrid g = TensorGrid::plane(4, 4, 16, 16);
    Field f = sample(g, 2, [](const Vec& x) { return Vec{x[0], 1 + x[1]}; });
    TraceField t = boundary_trace(f);
    CHECK(t.points == 16);
    CHECK(t.components == 2);
    CHECK(t.values[1] == 1.0);
    CHECK(t.values[2] == doctest::Approx(-3.5));
}

TEST_CASE("Leray projection") {
    TensorGrid g = TensorGrid::plane(8, 8, 128, 128);
    Field u = test::curl_bump(g);
    Field pu = leray_project(u);
    CHECK(test::max_diff(pu, u) / u.max_abs() < 1e-8);
    CHECK(test::max_diff(leray_project(pu), pu) / pu.max_abs() < 1e-8);
    Field grad = sample(g, 2, [](const Vec& x) {
        double e = std::exp(-(x[0] * x[0] + (x[1] - 1.5) * (x[1] - 1.5)));
        return Vec{-2 * x[0] * e, -2 * (x[1] - 1.5) * e};
    });
    CHECK(leray_project(grad).max_abs() / grad.max_abs() < 1e-6);
    Field mixed = u + grad;
    SolenoidalResidual r = solenoidal_residual(leray_project(mixed));
    CHECK(r.divergence < 1e-6);
    CHECK(r.normal_trace < 1e-6);
}

TEST_CASE("solenoidal residual flags compressible fields") {
    TensorGrid g = TensorGrid::plane(4, 4, 64, 64);
    Field f = sample(g, 2, [](const Vec& x) { return Vec{0.0, std::exp(-x[0] * x[0] - (x[1] - 1) * (x[1] - 1))}; });
    SolenoidalResidual r = solenoidal_residual(f);
    CHECK(r.divergence > 1e-3);
    CHECK(r.normal_trace > 1e-3);
}

TEST_CASE("CSV and binary round trips are exact") {
    TensorGrid g = TensorGrid::plane(3, 2, 16, 9);
    std::mt19937 rng(3);
    std::normal_distribution<double> n;
    Field f(g, 3);
    for (double& v : f.values) v = n(rng) * 1e3;
    f.values[5] = 1.0 / 3.0;
    std::string c = temp_path("rt.csv"), b = temp_path("rt.bin");
    write_csv(f, c);
    write_binary(f, b);
    for (const Field& h : {read_csv(c), read_binary(b)}) {
        CHECK(h.grid.same_as(g));
        CHECK(h.components == 3);
        CHECK(h.values == f.values);
    }
    std::filesystem::remove(c);
    std::filesystem::remove(b);
    CHECK_THROWS_AS(read_csv(temp_path("missing.csv")), IoError);
}

TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.07957747154594767}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(0.5) == "0.5");
}

}  // TEST_SUITE
