#include <doctest.h>

#include <cmath>

#include "halfspace/errors.hpp"
#include "halfspace/mild_solvers.hpp"
#include "halfspace/semigroups.hpp"
#include "helpers.hpp"

using namespace halfspace;

namespace {

TensorGrid grid64() { return TensorGrid::plane(8, 8, 64, 64); }

PicardConfig config(SystemKind s, int max_iter = 40) {
    PicardConfig c;
    c.system = s;
    c.T = 0.1;
    c.time_intervals = 2;
    c.schedule_nodes = 8;
    c.max_iter = max_iter;
    return c;
}

double history_diff(const std::vector<Field>& a, const std::vector<Field>& b) {
    double m = 0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, test::max_diff(a[k], b[k]));
    return m;
}

}  // namespace

TEST_SUITE("mild_solvers") {

TEST_CASE("system names") {
    for (SystemKind s : {SystemKind::Nse, SystemKind::Mhd, SystemKind::FmMhd, SystemKind::NlcfN, SystemKind::NlcfD})
        CHECK(parse_system(system_name(s)) == s);
    CHECK_THROWS_AS(parse_system("euler"), DomainError);
}

TEST_CASE("zero data is a fixed point") {
    Field z(grid64(), 2);
    PicardResult r = picard_nse(z, config(SystemKind::Nse));
    CHECK(r.trace.verdict == "converged");
    CHECK(r.trace.iterations == 1);
    for (const Field& u : r.u) CHECK(u.max_abs() == 0.0);
}

TEST_CASE("small data contracts") {
    PicardConfig c = config(SystemKind::Nse);
    Field u0 = solenoidal_bump(grid64(), 0.1, c.norm);
    PicardResult r = picard_nse(u0, c);
    CHECK(r.trace.verdict == "converged");
    CHECK(r.trace.norms.back() <= 2 * r.trace.linear_norm);
    for (std::size_t m = 2; m < r.trace.ratios.size(); ++m) CHECK(r.trace.ratios[m] < 0.5);
    CHECK(r.trace.fixed_point_residual <= 2 * r.trace.diffs.back() + 1e-15);
    CHECK(r.times.size() == 3);
}

TEST_CASE("second iterate is quadratic in the data") {
    PicardConfig c = config(SystemKind::Nse, 2);
    Field u0 = solenoidal_bump(grid64(), 0.1, c.norm);
    PicardResult a = picard_nse(u0, c), b = picard_nse(2.0 * u0, c);
    double worst = 0, scale = 0;
    for (std::size_t k = 1; k < a.times.size(); ++k) {
        Field lin = stokes_semigroup_unchecked(u0, a.times[k]);
        Field qa = a.u[k] - lin, qb = b.u[k] - 2.0 * lin;
        worst = std::max(worst, test::max_diff(qb, 4.0 * qa));
        scale = std::max(scale, qb.max_abs());
    }
    CHECK(scale > 0);
    CHECK(worst / scale < 1e-10);
}

TEST_CASE("coupled systems reduce to Navier-Stokes without a second field") {
    TensorGrid g = grid64();
    PicardConfig c = config(SystemKind::Mhd);
    Field u0 = solenoidal_bump(g, 0.1, c.norm), zero(g, 2);
    PicardResult ref = picard_nse(u0, c);
    for (auto kind : {SystemKind::Mhd, SystemKind::FmMhd}) {
        c.system = kind;
        PicardResult r = picard_solve(u0, zero, c);
        CHECK(history_diff(r.u, ref.u) < 1e-10);
        for (const Field& b : r.second) CHECK(b.max_abs() == 0.0);
    }
}

TEST_CASE("equal velocity and field cancel in the F-M first correction") {
    PicardConfig c = config(SystemKind::FmMhd, 2);
    Field u0 = solenoidal_bump(grid64(), 0.1, c.norm);
    PicardResult r = picard_fm_mhd(u0, u0, c);
    for (std::size_t k = 1; k < r.times.size(); ++k) {
        Field lin = stokes_semigroup_unchecked(u0, r.times[k]);
        CHECK(test::max_diff(r.u[k], lin) / lin.max_abs() < 1e-12);
    }
}

TEST_CASE("equal velocity and field nearly cancel in the MHD first correction") {
    // u and b use different propagators in MHD, so the cancellation is only approximate
    PicardConfig c = config(SystemKind::Mhd, 2);
    Field u0 = solenoidal_bump(grid64(), 0.1, c.norm);
    PicardResult m = picard_mhd(u0, u0, c), n = picard_nse(u0, c);
    for (std::size_t k = 1; k < m.times.size(); ++k) {
        Field lin = stokes_semigroup_unchecked(u0, m.times[k]);
        CHECK((m.u[k] - lin).max_abs() < 0.1 * (n.u[k] - lin).max_abs());
    }
}

TEST_CASE("swapping u0 and b0 flips the magnetic correction") {
    TensorGrid g = grid64();
    PicardConfig c = config(SystemKind::FmMhd, 2);
    Field u0 = solenoidal_bump(g, 0.1, c.norm), b0 = solenoidal_bump(g, 0.1, c.norm, 0.7, 0.4);
    PicardResult a = picard_fm_mhd(u0, b0, c), b = picard_fm_mhd(b0, u0, c);
    for (std::size_t k = 1; k < a.times.size(); ++k) {
        Field ca = a.second[k] - stokes_semigroup_unchecked(b0, a.times[k]);
        Field cb = b.second[k] - stokes_semigroup_unchecked(u0, a.times[k]);
        CHECK(ca.max_abs() > 0);
        CHECK(test::max_diff(ca, -1.0 * cb) / ca.max_abs() < 1e-10);
    }
}

TEST_CASE("F-M magnetic field keeps a zero trace") {
    TensorGrid g = grid64();
    PicardConfig c = config(SystemKind::FmMhd);
    Field u0 = solenoidal_bump(g, 0.1, c.norm), b0 = solenoidal_bump(g, 0.1, c.norm, 0.7, 0.4);
    PicardResult r = picard_fm_mhd(u0, b0, c);
    CHECK(r.trace.verdict == "converged");
    for (std::size_t k = 1; k < r.second.size(); ++k) CHECK(boundary_trace(r.second[k]).max_abs() / r.second[k].max_abs() < 1e-6);
}

TEST_CASE("constant director with zero velocity is stationary") {
    TensorGrid g = grid64();
    for (auto kind : {SystemKind::NlcfN, SystemKind::NlcfD}) {
        PicardConfig c = config(kind);
        c.norm = WeightedNormSpec::Ya(1);
        c.d_const = {0.0, 1.0};
        Field d0 = sample(g, 2, [](const Vec&) { return Vec{0.0, 1.0}; });
        PicardResult r = picard_nlcf(Field(g, 2), d0, c);
        CHECK(r.trace.verdict == "converged");
        for (const Field& u : r.u) CHECK(u.max_abs() == 0.0);
        for (const Field& d : r.second) CHECK(test::max_diff(d, d0) == 0.0);
    }
}

TEST_CASE("director preconditions") {
    TensorGrid g = grid64();
    PicardConfig c = config(SystemKind::NlcfD);
    c.norm = WeightedNormSpec::Ya(1);
    c.d_const = {1.0, 0.0};
    Field d0 = director_bump(g, 0.05, c.norm);  // equals (0, 1) on the boundary
    CHECK_THROWS_AS(picard_nlcf(Field(g, 2), d0, c), PreconditionError);
    c.d_const = {0.0, 1.0};
    CHECK_THROWS_AS(picard_nlcf(Field(g, 2), 2.0 * d0, c), PreconditionError);
    c.d_const = {0.0, 2.0};
    CHECK_THROWS_AS(c.validate(2), DomainError);
}

TEST_CASE("director stays near the unit sphere") {
    TensorGrid g = grid64();
    PicardConfig c = config(SystemKind::NlcfN);
    c.norm = WeightedNormSpec::Ya(1);
    c.d_const = {0.0, 1.0};
    Field u0 = solenoidal_bump(g, 0.05, c.norm), d0 = director_bump(g, 0.05, c.norm);
    PicardResult r = picard_nlcf(u0, d0, c);
    CHECK(r.trace.verdict == "converged");
    CHECK(r.trace.director_drift.back() < 1e-3);
    CHECK(r.trace.far_field_initial < 1e-6);
}

TEST_CASE("halving the data does not worsen contraction") {
    PicardConfig c = config(SystemKind::Nse);
    Field u0 = solenoidal_bump(grid64(), 0.2, c.norm);
    PicardResult full = picard_nse(u0, c), half = picard_nse(0.5 * u0, c);
    std::size_t m = std::min(full.trace.ratios.size(), half.trace.ratios.size());
    for (std::size_t i = 1; i < m; ++i) CHECK(half.trace.ratios[i] <= full.trace.ratios[i] + 0.05);
}

TEST_CASE("critical exponent is flagged") {
    PicardConfig c = config(SystemKind::Nse, 3);
    c.norm = WeightedNormSpec::Yab(1, 1);
    PicardResult r = picard_nse(solenoidal_bump(grid64(), 0.05, c.norm), c);
    CHECK(r.trace.critical_exponent);
    CHECK(!r.trace.warnings.empty());
}

TEST_CASE("large data is reported, not thrown") {
    PicardConfig c = config(SystemKind::Nse, 30);
    c.T = 1.0;
    PicardResult r = picard_nse(solenoidal_bump(grid64(), 300.0, c.norm), c);
    CHECK(r.trace.verdict == "diverged");
}

TEST_CASE("configuration checks") {
    PicardConfig c;
    c.T = -1;
    CHECK_THROWS_AS(c.validate(2), DomainError);
    c = PicardConfig{};
    c.norm = WeightedNormSpec::Yab(1.5, 1);
    CHECK_THROWS_AS(c.validate(2), DomainError);
    c = PicardConfig{};
    c.norm = WeightedNormSpec::Za(1);
    CHECK_THROWS_AS(c.validate(2), DomainError);
    c = PicardConfig{};
    c.system = SystemKind::NlcfN;
    CHECK_THROWS_AS(c.validate(2), DomainError);
    TensorGrid g = grid64();
    Field bad = sample(g, 2, [](const Vec& x) { return Vec{0.0, std::exp(-x[0] * x[0] - (x[1] - 1) * (x[1] - 1))}; });
    CHECK_THROWS_AS(picard_nse(bad, PicardConfig{}), PreconditionError);
}

}  // TEST_SUITE
