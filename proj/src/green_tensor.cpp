#include "halfspace/green_tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "halfspace/errors.hpp"

namespace halfspace {

namespace {

constexpr double kInv2Pi = 1.0 / (2.0 * std::numbers::pi);

void check_args(TensorIndex idx, const HalfSpacePoint& x, const HalfSpacePoint& y, double t) {
    int n = x.dim();
    if (y.dim() != n) throw DomainError("dimension mismatch");
    if (!std::isfinite(t)) throw DomainError("non-finite time");
    if (t <= 0) throw DomainError("Green tensor requires t > 0");
    if (idx.i < 1 || idx.i > n || idx.j < 1 || idx.j > n) throw DomainError("tensor index out of range");
    for (double v : x.coords())
        if (!std::isfinite(v)) throw DomainError("non-finite coordinate");
    for (double v : y.coords())
        if (!std::isfinite(v)) throw DomainError("non-finite coordinate");
    if (idx.j < n && n != 2)
        throw DomainError("the boundary-layer integral is implemented for n = 2 only");
}

// Derivative of Gamma(x - y*, t) in the variables of x (orders per axis, time order m).
double reflected_gamma(const HalfSpacePoint& x, const HalfSpacePoint& y, double t,
                       std::array<int, 3> ord, int m) {
    int n = x.dim();
    std::array<double, 3> z{};
    for (int a = 0; a < n - 1; ++a) z[a] = x.x_tangential[a] - y.x_tangential[a];
    z[n - 1] = x.x_normal + y.x_normal;
    return heat_kernel_partial(z.data(), n, t, ord.data(), m);
}

struct Breaks {
    std::vector<double> tangential, normal;
    double zmax = 0;
};

Breaks make_breaks(const HalfSpacePoint& x, const HalfSpacePoint& y, double t, const StripQuadrature& q) {
    Breaks b;
    double R = gaussian_radius(t, q.truncation_eps);
    double h = std::sqrt(t) / q.panels_per_sqrt_t;
    double x1 = x.x_tangential[0], y1 = y.x_tangential[0];
    b.tangential = graded_breaks(y1 - R, y1 + R, h, x1, q.grading_ratio, q.grading_levels);
    b.zmax = std::min(x.x_normal, std::max(0.0, R - y.x_normal));
    if (b.zmax > 0) {
        double hn = std::min(h, b.zmax);
        b.normal = graded_breaks(0.0, b.zmax, hn, x.x_normal, q.grading_ratio, q.grading_levels);
    }
    return b;
}

struct RawSums {
    double base[2]{}, d11[2]{}, d12[2]{}, dlap[2]{}, line[2]{};
};

RawSums integrate(const HalfSpacePoint& x, const HalfSpacePoint& y, double t, const Breaks& br, int p,
                  bool need_line) {
    RawSums s;
    Rule1D rt = composite_rule(br.tangential, p);
    std::size_t nt = rt.size();
    double x1 = x.x_tangential[0], x2 = x.x_normal, y1 = y.x_tangential[0], y2 = y.x_normal;
    // Tangential Gaussian factor and its derivatives: g_a(z1 - y1).
    std::vector<double> g1(nt), g2(nt), g3(nt), g0(nt), dx(nt);
    for (std::size_t a = 0; a < nt; ++a) {
        double u = rt.nodes[a] - y1;
        g0[a] = heat_kernel_1d(u, t) * rt.weights[a];
        g1[a] = g0[a] * (-u / (2 * t));
        g2[a] = g0[a] * (u * u / (4 * t * t) - 1 / (2 * t));
        g3[a] = g0[a] * (-u * u * u / (8 * t * t * t) + 3 * u / (4 * t * t));
        dx[a] = x1 - rt.nodes[a];
    }
    if (!br.normal.empty()) {
        Rule1D rn = composite_rule(br.normal, p);
        for (std::size_t b = 0; b < rn.size(); ++b) {
            double zn = rn.nodes[b];
            double v = zn + y2;
            double h0 = heat_kernel_1d(v, t) * rn.weights[b];
            double h1 = h0 * (-v / (2 * t));
            double h2 = h0 * (v * v / (4 * t * t) - 1 / (2 * t));
            double dn = x2 - zn;
            double dn2 = dn * dn;
            double acc[2][4]{};
            for (std::size_t a = 0; a < nt; ++a) {
                double inv = 1.0 / (dx[a] * dx[a] + dn2);
                double e1 = dx[a] * inv, e2 = dn * inv;
                double base = g1[a] * h0, d11 = g2[a] * h0, d12 = g1[a] * h1, dl = g3[a] * h0 + g1[a] * h2;
                acc[0][0] += e1 * base;
                acc[0][1] += e1 * d11;
                acc[0][2] += e1 * d12;
                acc[0][3] += e1 * dl;
                acc[1][0] += e2 * base;
                acc[1][1] += e2 * d11;
                acc[1][2] += e2 * d12;
                acc[1][3] += e2 * dl;
            }
            for (int i = 0; i < 2; ++i) {
                s.base[i] -= kInv2Pi * acc[i][0];
                s.d11[i] -= kInv2Pi * acc[i][1];
                s.d12[i] -= kInv2Pi * acc[i][2];
                s.dlap[i] -= kInv2Pi * acc[i][3];
            }
        }
    }
    if (need_line) {
        double hy = heat_kernel_1d(y2, t);
        double dn = x2;
        for (std::size_t a = 0; a < nt; ++a) {
            double inv = 1.0 / (dx[a] * dx[a] + dn * dn);
            s.line[0] -= kInv2Pi * dx[a] * inv * g1[a] * hy;
            s.line[1] -= kInv2Pi * dn * inv * g1[a] * hy;
        }
    }
    return s;
}

double max_diff(const RawSums& a, const RawSums& b) {
    double m = 0;
    for (int i = 0; i < 2; ++i) {
        m = std::max(m, std::abs(a.base[i] - b.base[i]));
        m = std::max(m, std::abs(a.d11[i] - b.d11[i]));
        m = std::max(m, std::abs(a.d12[i] - b.d12[i]));
        m = std::max(m, std::abs(a.dlap[i] - b.dlap[i]));
        m = std::max(m, std::abs(a.line[i] - b.line[i]));
    }
    return m;
}

double delta(int a, int b) { return a == b ? 1.0 : 0.0; }

}  // namespace

StripQuadrature StripQuadrature::refined() const {
    StripQuadrature q = *this;
    q.points_per_panel *= 2;
    return q;
}

double gaussian_radius(double t, double eps) { return std::sqrt(4 * t * std::log(1 / eps)); }

StripNodes strip_nodes(const HalfSpacePoint& x, const HalfSpacePoint& y, double t, const StripQuadrature& quad) {
    check_args({1, 1}, x, y, t);
    Breaks br = make_breaks(x, y, t, quad);
    StripNodes nodes;
    nodes.tangential = composite_rule(br.tangential, quad.points_per_panel);
    if (!br.normal.empty()) nodes.normal = composite_rule(br.normal, quad.points_per_panel);
    nodes.normal_upper = br.zmax;
    return nodes;
}

StripIntegrals strip_integrals(const HalfSpacePoint& x, const HalfSpacePoint& y, double t,
                               const StripQuadrature& quad, bool need_line) {
    check_args({1, 1}, x, y, t);
    if (x.dim() != 2) throw DomainError("strip integrals are implemented for n = 2 only");
    Breaks br = make_breaks(x, y, t, quad);
    RawSums hi = integrate(x, y, t, br, quad.points_per_panel, need_line);
    StripIntegrals s;
    for (int i = 0; i < 2; ++i) {
        s.base[i] = hi.base[i];
        s.d11[i] = hi.d11[i];
        s.d12[i] = hi.d12[i];
        s.dlap[i] = hi.dlap[i];
        s.line[i] = hi.line[i];
    }
    if (quad.estimate_error) {
        RawSums lo = integrate(x, y, t, br, std::max(4, quad.points_per_panel - 3), need_line);
        s.err = max_diff(hi, lo);
    }
    return s;
}

double g_star_from(const StripIntegrals& s, TensorIndex idx, const HalfSpacePoint& x, const HalfSpacePoint& y,
                   double t, const MultiIndex& d) {
    if (d.total() > 1) throw DomainError("only first derivatives of G* are available");
    int n = x.dim();
    double dij = delta(idx.i, idx.j);
    std::array<int, 3> ord{};
    int m = 0;
    if (d.l == 1) ord[d.axis] = 1;
    if (d.k == 1 || d.q == 1) ord[n - 1] = 1;
    if (d.m == 1) m = 1;
    double value = dij != 0 ? -reflected_gamma(x, y, t, ord, m) : 0.0;
    if (idx.j == n) return value;
    int i = idx.i - 1;
    double comp;
    if (d.l == 1) comp = s.d11[i];
    else if (d.k == 1) comp = s.line[i] + s.d12[i];
    else if (d.q == 1) comp = s.d12[i];
    else if (d.m == 1) comp = s.dlap[i];
    else comp = s.base[i];
    return value - 4.0 * comp;
}

namespace {

GStarResult evaluate(TensorIndex idx, const HalfSpacePoint& x, const HalfSpacePoint& y, double t,
                     const MultiIndex& d, const StripQuadrature& quad) {
    check_args(idx, x, y, t);
    int n = x.dim();
    GStarResult r;
    if (idx.j == n) {
        StripIntegrals none;
        r.value = g_star_from(none, idx, x, y, t, d);
        return r;
    }
    StripIntegrals s = strip_integrals(x, y, t, quad, d.k == 1);
    r.value = g_star_from(s, idx, x, y, t, d);
    r.error_estimate = 4.0 * s.err;
    double scale = std::pow(t, -0.5 * n - 0.5 * d.total()) * 1e-13;
    r.accuracy_warning = quad.estimate_error && r.error_estimate > quad.warn_rel_tol * std::abs(r.value) + scale;
    return r;
}

}  // namespace

GStarResult g_star(TensorIndex idx, const HalfSpacePoint& x, const HalfSpacePoint& y, double t,
                   const StripQuadrature& quad) {
    return evaluate(idx, x, y, t, {}, quad);
}

GStarResult g_breve(TensorIndex idx, const HalfSpacePoint& x, const HalfSpacePoint& y, double t,
                    const StripQuadrature& quad) {
    GStarResult r = g_star(idx, x, y, t, quad);
    if (idx.i == idx.j) {
        int n = x.dim();
        std::array<double, 3> z{};
        for (int a = 0; a < n - 1; ++a) z[a] = x.x_tangential[a] - y.x_tangential[a];
        z[n - 1] = x.x_normal - y.x_normal;
        std::array<int, 3> ord{};
        r.value += heat_kernel_partial(z.data(), n, t, ord.data(), 0);
    }
    return r;
}

GStarResult g_star_deriv(TensorIndex idx, const HalfSpacePoint& x, const HalfSpacePoint& y, double t,
                         const MultiIndex& deriv, const StripQuadrature& quad) {
    if (deriv.total() != 1) throw DomainError("g_star_deriv needs exactly one derivative");
    if (deriv.l == 1 && deriv.axis != 0) throw DomainError("tangential axis out of range");
    return evaluate(idx, x, y, t, deriv, quad);
}

}  // namespace halfspace
