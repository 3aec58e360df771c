#include "halfspace/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "halfspace/errors.hpp"
#include "halfspace/kernels.hpp"
#include "halfspace/parallel.hpp"
#include "halfspace/quadrature.hpp"
#include "halfspace/semigroups.hpp"

namespace halfspace {

double EstimateReport::extra(const std::string& key) const {
    for (const auto& [k, v] : extras)
        if (k == key) return v;
    throw DomainError("report has no extra '" + key + "'");
}

double log_plus(double s) { return s > 1 ? std::log(s) : 0.0; }

namespace {

constexpr double kRichardsonTol = 0.01;
// Bisection cap; the nested integrals carry inner noise that finer panels cannot remove.
constexpr unsigned kDepth = 20;

// int_a^inf f for f(z) ~ z^{-1-p}, p > 0: z = a e^u turns the algebraic tail into e^{-p u}.
double algebraic_tail(const std::function<double(double)>& f, double a, double p, double tol) {
    auto g = [&](double u) {
        double z = a * std::exp(u);
        return z * f(z);
    };
    return integrate_adaptive(g, 0, 42 / p, tol, kDepth).value;
}

// Sum over the panels between the sorted breaks, clipped to [br.front(), br.back()].
double integrate_pieces(const std::function<double(double)>& f, std::vector<double> br, double tol) {
    double lo = br.front(), hi = br.back();
    for (double& b : br) b = std::clamp(b, lo, hi);
    std::sort(br.begin(), br.end());
    double sum = 0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i)
        if (br[i + 1] > br[i]) sum += integrate_adaptive(f, br[i], br[i + 1], tol, kDepth).value;
    return sum;
}

double rel_change(double fine, double coarse) {
    if (fine == coarse) return 0;
    return std::abs(fine - coarse) / std::max(std::abs(fine), std::numeric_limits<double>::min());
}

void finish(EstimateReport& r, double sup_fine, double sup_coarse) {
    r.sup_ratio = sup_fine;
    r.refinement_delta = rel_change(sup_fine, sup_coarse);
    bool ok = std::isfinite(sup_fine) && r.refinement_delta < kRefinementTol;
    r.verdict = ok ? "bounded" : "unstable";
}

// Sup of ratio(case, tol) at a coarse and a fine tolerance; also tracks the LHS Richardson
// gap. ratio returns (lhs, rhs).
template <class Case, class Eval>
void ratio_sweep(EstimateReport& r, const std::vector<Case>& cases, Eval eval, double coarse_tol, double fine_tol,
                 const std::function<std::vector<double>(const Case&)>& coords) {
    if (cases.empty()) throw DomainError("empty sweep");
    std::vector<double> fine(cases.size()), coarse(cases.size()), gap(cases.size());
    parallel_for(cases.size(), [&](std::size_t i) {
        auto [lf, rf] = eval(cases[i], fine_tol);
        auto [lc, rc] = eval(cases[i], coarse_tol);
        fine[i] = lf / rf;
        coarse[i] = lc / rc;
        gap[i] = rel_change(lf, lc);
    });
    std::size_t best = 0;
    double sc = 0, worst_gap = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        if (fine[i] > fine[best]) best = i;
        sc = std::max(sc, coarse[i]);
        worst_gap = std::max(worst_gap, gap[i]);
    }
    r.samples = cases.size();
    r.argmax = coords(cases[best]);
    finish(r, fine[best], sc);
    r.extras.push_back({"richardson_gap", worst_gap});
    if (worst_gap > kRichardsonTol) {
        r.verdict = "unstable";
        r.notes.push_back("quadrature not refinement-converged");
    }
}

}  // namespace

// ----------------------------------------------------------------------- radial power

double lemma21_lhs(const RadialCase& c, double rel_tol) {
    if (!(c.L > 0 && c.a > 0 && c.d > 0 && c.k > 0)) throw DomainError("radial integral needs positive parameters");
    auto f = [&](double r) { return std::pow(r, c.d - 1) * std::pow(r + c.a, -c.k); };
    // split at a so the knee of (r + a)^{-k} sits on a panel edge
    if (c.a < c.L) return integrate_adaptive(f, 0, c.a, rel_tol).value + integrate_adaptive(f, c.a, c.L, rel_tol).value;
    return integrate_adaptive(f, 0, c.L, rel_tol).value;
}

double lemma21_rhs(const RadialCase& c) {
    double base = std::pow(c.L, c.d);
    if (c.k < c.d) return base * std::pow(c.a + c.L, -c.k);
    base *= std::pow(c.a + c.L, -c.d);
    if (c.k == c.d) return base * (1 + log_plus(c.L / c.a));
    return base * std::pow(c.a, -(c.k - c.d));
}

EstimateReport check_lemma21(const std::vector<RadialCase>& cases) {
    EstimateReport r;
    r.id = "lemma21";
    r.anchor = "radial-power-integral";
    if (cases.size() == 1) r.params = {{"L", cases[0].L}, {"a", cases[0].a}, {"d", cases[0].d}, {"k", cases[0].k}};
    r.argmax_labels = {"L", "a", "d", "k"};
    ratio_sweep<RadialCase>(
        r, cases, [](const RadialCase& c, double tol) { return std::pair{lemma21_lhs(c, tol), lemma21_rhs(c)}; },
        1e-7, 1e-12, [](const RadialCase& c) { return std::vector<double>{c.L, c.a, c.d, c.k}; });
    return r;
}

std::vector<RadialCase> lemma21_default_sweep() {
    std::vector<RadialCase> out;
    const double dk[][2] = {{1, 2}, {2, 2}, {2, 1}, {2, 3}};
    for (double L : {0.1, 1.0, 10.0})
        for (double a : {0.1, 1.0, 10.0})
            for (auto& p : dk) out.push_back({L, a, p[0], p[1]});
    return out;
}

// ------------------------------------------------------------------- two-centre integral

namespace {

void check_two_center(const TwoCenterCase& c) {
    if (c.d < 1 || c.d > 3) throw DomainError("two-centre integral needs d in {1, 2, 3}");
    if (!(c.a > 0 && c.b > 0 && c.k >= 0 && c.m >= 0 && c.x > 0)) throw DomainError("two-centre parameters out of range");
    if (!(c.k + c.m > c.d)) throw DomainError("two-centre integral needs k + m > d");
}

}  // namespace

double lemma22_lhs(const TwoCenterCase& c, double tol) {
    check_two_center(c);
    double x = c.x;
    auto wa = [&](double r) { return std::pow(r + c.a, -c.k); };
    auto wb = [&](double r) { return std::pow(r + c.b, -c.m); };
    if (c.d == 1) {
        auto f = [&](double z) { return wa(std::abs(z)) * wb(std::abs(z - x)); };
        auto mirrored = [&](double z) { return f(-z); };
        double p = c.k + c.m - 1;
        double near = integrate_adaptive(f, -std::max(x, 1.0), 0, tol).value + integrate_adaptive(f, 0, x, tol).value +
                      integrate_adaptive(f, x, 2 * std::max(x, 1.0), tol).value;
        return near + algebraic_tail(mirrored, std::max(x, 1.0), p, tol) + algebraic_tail(f, 2 * std::max(x, 1.0), p, tol);
    }
    std::function<double(double)> shell;
    const double inner = std::max(1e-2 * tol, 1e-15);
    if (c.d == 2) {
        shell = [&](double r) {
            // rho^2 = (r - x)^2 + 4 r x sin^2(theta / 2); break at the angular scales of the near-kink at theta = 0
            auto g = [&](double th) {
                double sn = std::sin(0.5 * th);
                return wb(std::sqrt((r - x) * (r - x) + 4 * r * x * sn * sn));
            };
            double rx = std::sqrt(r * x);
            return 2 * r * wa(r) * integrate_pieces(g, {0, std::abs(r - x) / rx, c.b / rx, std::numbers::pi}, inner);
        };
    } else {
        // Integrate over the sphere |z| = r in the distance rho = |z - x|: dS = 2 pi r rho / x d rho.
        shell = [&](double r) {
            auto g = [&](double rho) { return rho * wb(rho); };
            double lo = std::abs(r - x), hi = r + x;
            return 2 * std::numbers::pi * r / x * wa(r) * integrate_pieces(g, {lo, c.b, hi}, inner);
        };
    }
    double far = 2 * std::max({x, c.a, c.b, 1.0});
    return integrate_pieces(shell, {0, c.a, x - c.b, x, x + c.b, far}, tol) +
           algebraic_tail(shell, far, c.k + c.m - c.d, tol);
}

double lemma22_rhs(const TwoCenterCase& c) {
    check_two_center(c);
    double d = c.d, R = std::max({c.x, c.a, c.b});
    double s = std::pow(R, d - c.k - c.m);
    if (c.k == d) s += std::pow(R, -c.m) * std::log(R / c.a);
    if (c.m == d) s += std::pow(R, -c.k) * std::log(R / c.b);
    if (c.k > d) s += std::pow(R, -c.m) * std::pow(c.a, d - c.k);
    if (c.m > d) s += std::pow(R, -c.k) * std::pow(c.b, d - c.m);
    return s;
}

EstimateReport check_lemma22(const std::vector<TwoCenterCase>& cases) {
    EstimateReport r;
    r.id = "lemma22";
    r.anchor = "two-center-integral";
    if (cases.size() == 1) {
        const auto& c = cases[0];
        r.params = {{"d", double(c.d)}, {"a", c.a}, {"b", c.b}, {"k", c.k}, {"m", c.m}, {"x", c.x}};
    }
    r.argmax_labels = {"d", "a", "b", "k", "m", "x"};
    ratio_sweep<TwoCenterCase>(
        r, cases, [](const TwoCenterCase& c, double tol) { return std::pair{lemma22_lhs(c, tol), lemma22_rhs(c)}; },
        1e-6, 1e-10,
        [](const TwoCenterCase& c) { return std::vector<double>{double(c.d), c.a, c.b, c.k, c.m, c.x}; });
    return r;
}

std::vector<TwoCenterCase> lemma22_default_sweep() {
    std::vector<TwoCenterCase> out;
    for (int d = 1; d <= 3; ++d) {
        double dd = d;
        const double km[][2] = {{dd, 1}, {1, dd}, {dd + 1, 0.5}, {0.5, dd + 1}, {0.5 * dd + 0.5, 0.5 * dd + 0.5}};
        for (auto& p : km)
            for (double a : {0.1, 1.0, 10.0})
                for (double b : {0.1, 1.0, 10.0})
                    for (double x : {0.1, 1.0, 10.0}) out.push_back({d, a, b, p[0], p[1], x});
    }
    return out;
}

double lemma22d1_lhs(const LineCase& c, double tol) {
    if (!(c.k > 1 && c.m >= 0 && c.A > 0)) throw DomainError("line integral needs k > 1, m >= 0, A > 0");
    auto f = [&](double z) { return std::pow(z + c.A, -c.k) * std::pow(z + 1, -c.m); };
    double knee = std::max(c.A, 1.0);
    return integrate_adaptive(f, 0, knee, tol).value + algebraic_tail(f, knee, c.k + c.m - 1, tol);
}

double lemma22d1_rhs(const LineCase& c) {
    double R = c.A + 1;
    double s = std::pow(R, -c.m) * std::pow(c.A, 1 - c.k);
    if (c.m == 1) s += std::pow(R, -c.k) * std::log(R);
    if (c.m > 1) s += std::pow(R, -c.k);
    return s;
}

EstimateReport check_lemma22d1(const std::vector<LineCase>& cases) {
    EstimateReport r;
    r.id = "lemma22d1";
    r.anchor = "two-center-line-integral";
    if (cases.size() == 1) r.params = {{"k", cases[0].k}, {"m", cases[0].m}, {"A", cases[0].A}};
    r.argmax_labels = {"k", "m", "A"};
    ratio_sweep<LineCase>(
        r, cases, [](const LineCase& c, double tol) { return std::pair{lemma22d1_lhs(c, tol), lemma22d1_rhs(c)}; },
        1e-7, 1e-12, [](const LineCase& c) { return std::vector<double>{c.k, c.m, c.A}; });
    return r;
}

std::vector<LineCase> lemma22d1_default_sweep() {
    std::vector<LineCase> out;
    for (double k : {1.5, 2.0, 3.0})
        for (double m : {0.0, 0.5, 1.0, 2.0})
            for (double A : {0.01, 0.1, 1.0, 10.0, 100.0}) out.push_back({k, m, A});
    return out;
}

// ----------------------------------------------------------------------- log lemma

double log_lemma_ratio(double k, double r, double t, double c) {
    double lhs = std::pow(t, -0.5 * k) * std::exp(-r * r / (c * t)) * std::log(2 + r);
    return lhs * std::pow(r + std::sqrt(t), k) / std::log(2 + t);
}

namespace {

std::vector<double> with_midpoints(const std::vector<double>& v) {
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    std::vector<double> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        out.push_back(s[i]);
        if (i + 1 < s.size()) out.push_back(s[i] > 0 ? std::sqrt(s[i] * s[i + 1]) : 0.5 * (s[i] + s[i + 1]));
    }
    return out;
}

}  // namespace

EstimateReport check_log_lemma(double k, const std::vector<double>& rs, const std::vector<double>& ts) {
    if (k < 0) throw DomainError("log lemma needs k >= 0");
    if (rs.empty() || ts.empty()) throw DomainError("empty sweep");
    for (double r : rs)
        if (!(r > 0)) throw DomainError("log lemma needs r > 0");
    for (double t : ts)
        if (!(t > 0)) throw DomainError("log lemma needs t > 0");
    EstimateReport rep;
    rep.id = "log_lemma";
    rep.anchor = "gaussian-log-comparison";
    rep.params = {{"k", k}, {"c", 4.0}};
    rep.argmax_labels = {"r", "t"};
    auto sup = [&](const std::vector<double>& R, const std::vector<double>& T, std::vector<double>* arg) {
        double best = 0;
        for (double r : R)
            for (double t : T) {
                double v = log_lemma_ratio(k, r, t);
                if (v > best) {
                    best = v;
                    if (arg) *arg = {r, t};
                }
            }
        return best;
    };
    // 8 and 16 nodes per interval of the given sweeps
    auto rc = rs, tc = ts;
    for (int i = 0; i < 3; ++i) {
        rc = with_midpoints(rc);
        tc = with_midpoints(tc);
    }
    double coarse = sup(rc, tc, nullptr);
    auto rf = with_midpoints(rc), tf = with_midpoints(tc);
    double fine = sup(rf, tf, &rep.argmax);
    rep.samples = rf.size() * tf.size();
    finish(rep, fine, coarse);
    return rep;
}

// ------------------------------------------------------------ heat decay convolution

namespace {

// e^{-z} I_0(z).
double i0_scaled(double z) {
    if (z < 700) return std::exp(-z) * std::cyl_bessel_i(0.0, z);
    double iz = 1 / (8 * z);
    return (1 + iz + 4.5 * iz * iz + 37.5 * iz * iz * iz) / std::sqrt(2 * std::numbers::pi * z);
}

}  // namespace

double heat_decay_lhs(int k, double a, double x, double t, double tol) {
    if (k < 1 || k > 3) throw DomainError("heat convolution needs k in {1, 2, 3}");
    if (!(t > 0) || x < 0 || a < 0) throw DomainError("heat convolution parameters out of range");
    const double S = 6.5;  // e^{-S^2} below 1e-18
    double s = 2 * std::sqrt(t);
    // Breaks at the decay scales of (|y| + 1)^{-a}, which is sharp against the Gaussian at large t.
    auto scales = [&](double lo, double hi, bool sym) {
        std::vector<double> br{lo, x, 0.0};
        for (double p = 1; p < 2 * hi + 2 * std::abs(lo); p *= 4) {
            br.push_back(p);
            if (sym) br.push_back(-p);
        }
        br.push_back(hi);
        return br;
    };
    if (k == 1) {
        auto f = [&](double y) { return heat_kernel_1d(x - y, t) * std::pow(std::abs(y) + 1, -a); };
        return integrate_pieces(f, scales(x - s * S, x + s * S, true), tol);
    }
    auto radial = [&](double rho) {
        double z = x * rho / (2 * t);
        double g = std::exp(-(x - rho) * (x - rho) / (4 * t));
        double ang;
        if (k == 2) {
            ang = 2 * std::numbers::pi * g * i0_scaled(z) / (4 * std::numbers::pi * t);
            return rho * std::pow(rho + 1, -a) * ang;
        }
        double sh = z > 1e-12 ? -std::expm1(-2 * z) / z : 2.0;
        ang = 2 * std::numbers::pi * g * sh / std::pow(4 * std::numbers::pi * t, 1.5);
        return rho * rho * std::pow(rho + 1, -a) * ang;
    };
    return integrate_pieces(radial, scales(std::max(0.0, x - s * S), x + s * S, false), tol);
}

double heat_decay_rhs(int k, double a, double x, double t, bool log_factor, bool power_factor) {
    double st = std::sqrt(t);
    double pf = power_factor && a > k ? std::pow(st + 1, a - k) : 1.0;
    double lf = log_factor && a == k ? 1 + log_plus(t) : 1.0;
    return pf * lf * std::pow(x + st + 1, -a);
}

EstimateReport check_heat_decay_conv(int k, double a, const std::vector<double>& xs, const std::vector<double>& ts) {
    if (xs.empty() || ts.empty()) throw DomainError("empty sweep");
    struct Case {
        double x, t;
    };
    std::vector<Case> cases;
    for (double x : xs)
        for (double t : ts) cases.push_back({x, t});
    EstimateReport r;
    r.id = "heat_decay_conv";
    r.anchor = "heat-decay-convolution";
    r.params = {{"k", double(k)}, {"a", a}};
    r.argmax_labels = {"x", "t"};
    ratio_sweep<Case>(
        r, cases,
        [k, a](const Case& c, double tol) {
            return std::pair{heat_decay_lhs(k, a, c.x, c.t, tol), heat_decay_rhs(k, a, c.x, c.t)};
        },
        1e-7, 1e-11, [](const Case& c) { return std::vector<double>{c.x, c.t}; });
    // Sharpness: sup over x of the ratio with the conditional factor dropped, at t = 1 and t_max.
    bool log_case = a == k, power_case = a > k;
    if (log_case || power_case) {
        double tmax = *std::max_element(ts.begin(), ts.end());
        auto sup_without = [&](double t) {
            double best = 0;
            for (double x : xs)
                best = std::max(best, heat_decay_lhs(k, a, x, t) / heat_decay_rhs(k, a, x, t, !log_case, !power_case));
            return best;
        };
        double r1 = sup_without(1.0), rm = sup_without(tmax);
        std::string tag = log_case ? "nolog" : "nopower";
        r.extras.push_back({"ratio_" + tag + "_t1", r1});
        r.extras.push_back({"ratio_" + tag + "_tmax", rm});
        r.extras.push_back({tag + "_growth", rm / r1});
        r.extras.push_back({"t_max", tmax});
    }
    return r;
}

// ---------------------------------------------------------------- pointwise bounds

double solonnikov_bound(const HalfSpacePoint& x, const HalfSpacePoint& y, double t, const MultiIndex& d, double c) {
    int n = x.dim();
    double r2 = 0;
    for (int a = 0; a < n - 1; ++a) r2 += (x.x_tangential[a] - y.x_tangential[a]) * (x.x_tangential[a] - y.x_tangential[a]);
    double s = x.x_normal + y.x_normal;  // |x* - y| normal part
    r2 += s * s;
    double yn = y.x_normal, xn = x.x_normal;
    return std::exp(-c * yn * yn / t) /
           (std::pow(t, d.m + 0.5 * d.q) * std::pow(r2 + t, 0.5 * (d.l + n)) * std::pow(xn * xn + t, 0.5 * d.k));
}

double heat_green_bound(const HalfSpacePoint& x, const HalfSpacePoint& y, double t, const MultiIndex& d) {
    int n = x.dim();
    Vec xc = x.coords(), yc = y.coords();
    double r2 = 0;
    for (int a = 0; a < n; ++a) r2 += (xc[a] - yc[a]) * (xc[a] - yc[a]);
    int s = d.l + d.k + d.q + 2 * d.m;
    return std::pow(r2 + t, -0.5 * (n + s));
}

std::vector<PointwiseTarget> first_order_targets(KernelKind kind) {
    std::vector<MultiIndex> ds(5);
    ds[1].l = 1;
    ds[2].k = 1;
    ds[3].q = 1;
    ds[4].m = 1;
    std::vector<PointwiseTarget> out;
    if (kind == KernelKind::Gstar) {
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j)
                for (const auto& d : ds) out.push_back({{i, j}, d});
    } else {
        for (const auto& d : ds) out.push_back({{1, 1}, d});
    }
    return out;
}

namespace {

std::string kernel_name(KernelKind k) {
    switch (k) {
        case KernelKind::Gstar: return "Gstar";
        case KernelKind::GN: return "GN";
        case KernelKind::GD: return "GD";
    }
    return "?";
}

std::vector<double> lattice(double lo, double hi, int p) {
    std::vector<double> v(std::size_t(std::max(p, 1)));
    if (p == 1) {
        v[0] = 0.5 * (lo + hi);
        return v;
    }
    for (int i = 0; i < p; ++i) v[i] = lo + (hi - lo) * i / (p - 1);
    return v;
}

}  // namespace

std::vector<EstimateReport> sweep_pointwise_bounds(KernelKind kind, const std::vector<PointwiseTarget>& targets,
                                                   const SampleBox& box, const std::vector<SweepResolution>& res,
                                                   double c) {
    if (res.size() < 2) throw DomainError("pointwise sweeps need at least two resolutions");
    if (targets.empty()) throw DomainError("no targets");
    for (const auto& tg : targets)
        if (tg.deriv.total() > 1 && kind == KernelKind::Gstar) throw DomainError("G* sweeps take first derivatives");
    if (!(box.normal_lo >= 0) || box.times.empty()) throw DomainError("bad sample box");
    std::size_t T = targets.size();
    std::vector<std::vector<double>> sup(res.size(), std::vector<double>(T, 0.0));
    std::vector<std::vector<double>> arg(T);
    std::vector<std::size_t> counts(res.size());
    bool need_line = false;
    for (const auto& tg : targets) need_line |= tg.deriv.k == 1;
    for (std::size_t ri = 0; ri < res.size(); ++ri) {
        const SweepResolution& R = res[ri];
        auto tx = lattice(box.tangential_lo, box.tangential_hi, R.points);
        auto nx = lattice(box.normal_lo, box.normal_hi, R.points);
        struct Sample {
            double x1, x2, y1, y2, t;
        };
        std::vector<Sample> samples;
        for (double t : box.times)
            for (double x1 : tx)
                for (double x2 : nx)
                    for (double y1 : tx)
                        for (double y2 : nx) samples.push_back({x1, x2, y1, y2, t});
        counts[ri] = samples.size();
        std::vector<std::vector<double>> ratio(samples.size(), std::vector<double>(T));
        parallel_for(samples.size(), [&](std::size_t s) {
            const Sample& p = samples[s];
            HalfSpacePoint x({p.x1}, p.x2), y({p.y1}, p.y2);
            StripIntegrals si;
            if (kind == KernelKind::Gstar) si = strip_integrals(x, y, p.t, R.quad, need_line);
            for (std::size_t j = 0; j < T; ++j) {
                const auto& tg = targets[j];
                double v, b;
                if (kind == KernelKind::Gstar) {
                    v = g_star_from(si, tg.idx, x, y, p.t, tg.deriv);
                    b = solonnikov_bound(x, y, p.t, tg.deriv, c);
                } else {
                    v = kind == KernelKind::GN ? green_heat_N(x, y, p.t, tg.deriv) : green_heat_D(x, y, p.t, tg.deriv);
                    b = heat_green_bound(x, y, p.t, tg.deriv);
                }
                ratio[s][j] = std::abs(v) / b;
            }
        });
        for (std::size_t j = 0; j < T; ++j)
            for (std::size_t s = 0; s < samples.size(); ++s)
                if (ratio[s][j] > sup[ri][j]) {
                    sup[ri][j] = ratio[s][j];
                    if (ri + 1 == res.size()) {
                        const Sample& p = samples[s];
                        arg[j] = {p.x1, p.x2, p.y1, p.y2, p.t};
                    }
                }
    }
    std::vector<EstimateReport> out;
    for (std::size_t j = 0; j < T; ++j) {
        const auto& tg = targets[j];
        EstimateReport r;
        r.id = "pointwise_" + kernel_name(kind);
        r.anchor = kind == KernelKind::Gstar ? "solonnikov-pointwise" : "heat-green-pointwise";
        if (kind == KernelKind::Gstar) r.params = {{"i", double(tg.idx.i)}, {"j", double(tg.idx.j)}};
        r.params.push_back({"l", double(tg.deriv.l)});
        r.params.push_back({"k", double(tg.deriv.k)});
        r.params.push_back({"q", double(tg.deriv.q)});
        r.params.push_back({"m", double(tg.deriv.m)});
        if (kind == KernelKind::Gstar) r.params.push_back({"c", c});
        r.samples = counts.back();
        r.argmax = arg[j];
        r.argmax_labels = {"x1", "x2", "y1", "y2", "t"};
        // largest relative change of the sup between consecutive resolutions
        double worst = 0;
        for (std::size_t ri = 1; ri < res.size(); ++ri) worst = std::max(worst, rel_change(sup[ri][j], sup[ri - 1][j]));
        r.sup_ratio = sup.back()[j];
        r.refinement_delta = worst;
        r.verdict = std::isfinite(r.sup_ratio) && worst < kRefinementTol ? "bounded" : "unstable";
        for (std::size_t ri = 0; ri < res.size(); ++ri)
            r.extras.push_back({"sup_resolution_" + std::to_string(ri), sup[ri][j]});
        out.push_back(std::move(r));
    }
    return out;
}

EstimateReport sweep_pointwise_bound(KernelKind kind, const PointwiseTarget& target, const SampleBox& box,
                                     const std::vector<SweepResolution>& res, double c) {
    return sweep_pointwise_bounds(kind, {target}, box, res, c).front();
}

// ------------------------------------------------------------------ decay experiment

const DecayRow& DecayTable::row(const std::string& quantity, double q) const {
    for (const auto& r : rows)
        if (r.quantity == quantity && (r.q == q || (std::isinf(r.q) && std::isinf(q)))) return r;
    throw DomainError("no decay row for " + quantity);
}

LogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("fit needs two or more matching points");
    std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0 && y[i] > 0)) throw DomainError("log fit needs positive data");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    LogFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = ly[i] - (f.intercept + f.slope * lx[i]);
        sse += e * e;
    }
    f.r2 = syy > 0 ? 1 - sse / syy : 1.0;
    return f;
}

Field dipole_data(const TensorGrid& g) {
    const double s = 0.6;
    Field u = sample(g, 2, [s](const Vec& x) {
        double a = x[0], b = x[1] - 1.0;
        double e = std::exp(-(a * a + b * b) / s);
        double d1 = x[1] * x[1] * e * (-2 * a / s);
        double d2 = (2 * x[1] - x[1] * x[1] * 2 * b / s) * e;
        return Vec{d2, -d1};
    });
    u *= 1 / weighted_norm(u, WeightedNormSpec::Lq(1));
    return u;
}

namespace {

double outer_fraction(const Field& u) {
    const TensorGrid& g = u.grid;
    double total = 0, outer = 0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        double m = 0;
        for (int c = 0; c < u.components; ++c) m += u.at(i, c) * u.at(i, c);
        double w = g.cell_weight(i) * std::sqrt(m);
        Vec x = g.coords(i);
        bool out = x[g.n - 1] > 0.75 * g.H;
        for (int a = 0; a < g.n - 1; ++a) out |= std::abs(x[a]) > 0.75 * g.L;
        total += w;
        if (out) outer += w;
    }
    return total > 0 ? outer / total : 0.0;
}

struct LeavingMass {
    double fraction, required_L, required_H;
};

// Heat-type spreading of the support of u0 (nodes above 1e-6 max) up to time t: the Gaussian
// tail beyond each open wall, summed. Required sizes put every wall at the 1% share.
LeavingMass leaving_mass(const Field& u0, double t) {
    const TensorGrid& g = u0.grid;
    int n = g.n;
    double cut = 1e-6 * u0.max_norm();
    Vec lo(n, std::numeric_limits<double>::infinity()), hi(n, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        double m = 0;
        for (int c = 0; c < u0.components; ++c) m += u0.at(i, c) * u0.at(i, c);
        if (std::sqrt(m) <= cut) continue;
        Vec x = g.coords(i);
        for (int a = 0; a < n; ++a) {
            lo[a] = std::min(lo[a], x[a]);
            hi[a] = std::max(hi[a], x[a]);
        }
    }
    if (!(hi[0] >= lo[0])) return {0, g.L, g.H};
    int walls = 2 * (n - 1) + 1;
    double s = 2 * std::sqrt(t);
    auto tail = [s](double d) { return 0.5 * std::erfc(std::max(d, 0.0) / s); };
    double f = tail(g.H - hi[n - 1]);
    double ext = 0;
    for (int a = 0; a < n - 1; ++a) {
        f += tail(g.L + lo[a]) + tail(g.L - hi[a]);
        ext = std::max({ext, -lo[a], hi[a]});
    }
    double d = s * boost::math::erfc_inv(2 * 0.01 / walls);
    return {f, std::ceil(ext + d), std::ceil(hi[n - 1] + d)};
}

}  // namespace

DecayTable decay_experiment(const Field& u0, const std::vector<double>& q_list, const std::vector<double>& times) {
    if (times.size() < 2) throw DomainError("decay experiment needs two or more times");
    if (q_list.empty()) throw DomainError("decay experiment needs a q list");
    for (double t : times)
        if (!(t > 0)) throw DomainError("decay times must be positive");
    for (double q : q_list)
        if (!(q >= 1)) throw DomainError("q must lie in [1, inf]");
    int n = u0.grid.n;
    double tmax = *std::max_element(times.begin(), times.end());
    LeavingMass lm = leaving_mass(u0, tmax);
    if (lm.fraction > 0.01)
        throw DomainError("box too small for t = " + format_double(tmax) + ": about " +
                          format_double(100 * lm.fraction) + "% of the mass leaves the box; use at least L = " +
                          format_double(lm.required_L) + ", H = " + format_double(lm.required_H));
    std::size_t K = times.size();
    std::vector<Field> u(K), gu(K), ut(K);
    parallel_for(K, [&](std::size_t i) {
        double t = times[i], dt = 0.01 * t;
        u[i] = stokes_semigroup(u0, t);
        gu[i] = gradient(u[i], DiffScheme::HighOrder);
        ut[i] = stokes_semigroup_unchecked(u0, t + dt) - stokes_semigroup_unchecked(u0, t - dt);
        ut[i] *= 0.5 / dt;
    });
    DecayTable tab;
    tab.times = times;
    std::size_t last = std::max_element(times.begin(), times.end()) - times.begin();
    tab.outer_mass_fraction = outer_fraction(u[last]);
    for (double q : q_list) {
        double base = -0.5 * n * (1 - (std::isinf(q) ? 0.0 : 1 / q));
        const std::pair<const char*, const std::vector<Field>*> qs[] = {{"u", &u}, {"grad_u", &gu}, {"dt_u", &ut}};
        const double shift[] = {0.0, -0.5, -1.0};
        for (int j = 0; j < 3; ++j) {
            DecayRow row;
            row.quantity = qs[j].first;
            row.q = q;
            row.expected = base + shift[j];
            for (const Field& f : *qs[j].second) row.values.push_back(weighted_norm(f, WeightedNormSpec::Lq(q)));
            LogFit fit = fit_loglog(times, row.values);
            row.slope = fit.slope;
            row.intercept = fit.intercept;
            row.r2 = fit.r2;
            row.conclusive = fit.r2 >= 0.99;
            if (!row.conclusive) tab.notes.push_back(row.quantity + " q=" + format_double(q) + " inconclusive (R^2 < 0.99)");
            tab.rows.push_back(std::move(row));
        }
    }
    return tab;
}

// --------------------------------------------------------------------- scaling sweeps

std::string scaling_op_name(ScalingOp op) {
    switch (op) {
        case ScalingOp::HeatGradLq: return "heat_grad_lq";
        case ScalingOp::HeatLinearYa: return "heat_linear_ya";
        case ScalingOp::StokesLinearYab: return "stokes_linear_yab";
        case ScalingOp::MixedBilinear: return "mixed_bilinear";
        case ScalingOp::BoundaryBilinear: return "boundary_bilinear";
    }
    return "?";
}

ScalingOp parse_scaling_op(const std::string& s) {
    for (ScalingOp op : {ScalingOp::HeatGradLq, ScalingOp::HeatLinearYa, ScalingOp::StokesLinearYab,
                         ScalingOp::MixedBilinear, ScalingOp::BoundaryBilinear})
        if (scaling_op_name(op) == s) return op;
    throw DomainError("unknown scaling operator '" + s + "'");
}

TensorGrid layered_grid() { return TensorGrid::plane(20.0, 4.0, 128, 641); }

Field layered_forcing(const TensorGrid& g, double layer) {
    if (!(layer > 0)) throw DomainError("layer width must be positive");
    // F_21 = phi(x1) S(x2) g(x2), F_11 = -Phi(x1) S(x2) g'(x2), Phi' = phi: the smooth parts
    // cancel in div F, leaving the tangential sheet (phi S' g, 0) at x2 = 1.
    const double s2 = 25.0, c = 1.0, w = 0.5;
    return sample(g, 4, [=](const Vec& x) {
        double e = std::exp(-x[0] * x[0] / s2);
        double phi = x[0] * e, Phi = -0.5 * s2 * e;
        double S = 0.5 * (1 + std::tanh((x[1] - c) / layer));
        double gg = std::exp(-(x[1] - c) * (x[1] - c) / w), gp = -2 * (x[1] - c) / w * gg;
        return Vec{-Phi * S * gp, 0.0, phi * S * gg, 0.0};
    });
}

namespace {

// sup <x>^a <x_n>^alpha x_n^{-alpha} |f| without the alpha <= 1 restriction of WeightedNormSpec.
double boundary_weighted_sup(const Field& f, double a, double alpha) {
    double best = 0;
    for (std::size_t i = 0; i < f.grid.node_count(); ++i) {
        Vec x = f.grid.coords(i);
        double xn = x.back();
        if (alpha > 0 && xn == 0) continue;
        double r2 = 0, m = 0;
        for (double v : x) r2 += v * v;
        for (int c = 0; c < f.components; ++c) m += f.at(i, c) * f.at(i, c);
        double w = std::pow(japanese(r2), a) * std::pow(japanese(xn * xn), alpha) / std::pow(xn, alpha);
        best = std::max(best, std::sqrt(m) * w);
    }
    return best;
}

}  // namespace

EstimateReport sweep_semigroup_scaling(ScalingOp op, const WeightedNormSpec& spec, const std::vector<double>& ts,
                                       double mu) {
    spec.validate();
    if (ts.size() < 2) throw DomainError("scaling sweep needs two or more times");
    for (double t : ts)
        if (!(t > 0)) throw DomainError("scaling times must be positive");
    EstimateReport r;
    r.id = "scaling_" + scaling_op_name(op);
    r.params = {{"q", spec.q}, {"a", spec.a}, {"b", spec.b}, {"alpha", spec.alpha}};
    r.argmax_labels = {"t"};
    std::vector<double> out_norm(ts.size()), ratio(ts.size()), coarse(ts.size());
    auto require = [&](NormFamily f) {
        if (spec.family != f) throw DomainError(scaling_op_name(op) + " needs norm family " + spec.name());
    };
    switch (op) {
        case ScalingOp::HeatGradLq: {
            require(NormFamily::Lq);
            r.anchor = "heat-gradient-lq";
            auto run = [&](int N, std::vector<double>& out, std::vector<double>* norms) {
                TensorGrid g = TensorGrid::plane(8, 8, N, N);
                Field f = sample(g, 1, [](const Vec& x) {
                    double b = x[1] - 1.5;
                    return Vec{std::exp(-(x[0] * x[0] + b * b))};
                });
                double in = weighted_norm(f, spec);
                for (std::size_t i = 0; i < ts.size(); ++i) {
                    double v = weighted_norm(grad_heat_of_data(f, ts[i], HeatBc::Neumann), spec);
                    if (norms) (*norms)[i] = v;
                    out[i] = v / (std::pow(ts[i], -0.5) * in);
                }
            };
            run(128, ratio, &out_norm);
            run(64, coarse, nullptr);
            break;
        }
        case ScalingOp::HeatLinearYa: {
            require(NormFamily::Ya);
            r.anchor = "heat-linear-ya";
            auto run = [&](int N, std::vector<double>& out, std::vector<double>* norms) {
                TensorGrid g = TensorGrid::plane(8, 8, N, N);
                double a = spec.a;
                Field f = sample(g, 1, [a](const Vec& x) {
                    double b = x[1] - 1.0;
                    return Vec{std::pow(1 + x[0] * x[0] + b * b, -0.5 * a) * std::exp(-0.02 * (x[0] * x[0] + b * b))};
                });
                double in = weighted_norm(f, spec);
                for (std::size_t i = 0; i < ts.size(); ++i) {
                    double v = weighted_norm(heat_semigroup(f, ts[i], HeatBc::Neumann), spec);
                    if (norms) (*norms)[i] = v;
                    double rate = 1 + (a == g.n ? log_plus(ts[i]) : 0.0);
                    out[i] = v / (rate * in);
                }
            };
            run(128, ratio, &out_norm);
            run(64, coarse, nullptr);
            break;
        }
        case ScalingOp::StokesLinearYab: {
            if (spec.family != NormFamily::Yab && spec.family != NormFamily::Ya) require(NormFamily::Yab);
            r.anchor = "stokes-linear-mixed";
            auto run = [&](int N, std::vector<double>& out, std::vector<double>* norms) {
                TensorGrid g = TensorGrid::plane(8, 8, N, N);
                Field u0 = sample(g, 2, [](const Vec& x) {
                    double a = x[0], b = x[1] - 1.2, s = 0.5;
                    double e = std::exp(-(a * a + b * b) / s);
                    return Vec{(2 * x[1] - x[1] * x[1] * 2 * b / s) * e, x[1] * x[1] * e * 2 * a / s};
                });
                double in = weighted_norm(u0, spec);
                for (std::size_t i = 0; i < ts.size(); ++i) {
                    double v = weighted_norm(stokes_semigroup(u0, ts[i]), spec);
                    if (norms) (*norms)[i] = v;
                    out[i] = v / in;
                }
            };
            run(128, ratio, &out_norm);
            run(64, coarse, nullptr);
            break;
        }
        case ScalingOp::MixedBilinear:
        case ScalingOp::BoundaryBilinear: {
            bool mixed = op == ScalingOp::MixedBilinear;
            require(mixed ? NormFamily::Yab : NormFamily::Zaal);
            r.anchor = mixed ? "mixed-bilinear" : "boundary-bilinear";
            TensorGrid g = layered_grid();
            Field F = layered_forcing(g);
            double in = mixed ? weighted_norm(F, WeightedNormSpec::Yab(2 * spec.a, 2 * spec.b))
                              : boundary_weighted_sup(F, 2 * spec.a, 2 * spec.alpha);
            TimeHistory h = TimeHistory::constant(F);
            double expo = mixed ? 0.5 : 0.5 * (1 - mu);
            if (!mixed) r.params.push_back({"mu", mu});
            for (std::size_t i = 0; i < ts.size(); ++i) {
                double t = ts[i];
                DuhamelSchedule s = DuhamelSchedule::graded(t, 24);
                double v = weighted_norm(duhamel_stokes(h, t, s), spec);
                double vc = weighted_norm(duhamel_stokes(h, t, s.coarsened()), spec);
                out_norm[i] = v;
                ratio[i] = v / (std::pow(t, expo) * in);
                coarse[i] = vc / (std::pow(t, expo) * in);
            }
            r.extras.push_back({"expected_exponent", expo});
            break;
        }
    }
    std::size_t best = std::max_element(ratio.begin(), ratio.end()) - ratio.begin();
    r.samples = ts.size();
    r.argmax = {ts[best]};
    finish(r, ratio[best], *std::max_element(coarse.begin(), coarse.end()));
    LogFit fit = fit_loglog(ts, out_norm);
    r.extras.push_back({"growth_exponent", fit.slope});
    r.extras.push_back({"growth_r2", fit.r2});
    return r;
}

}  // namespace halfspace
