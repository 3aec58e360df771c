#include "halfspace/kernels.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "halfspace/errors.hpp"

namespace halfspace {

namespace {

void require_finite(const Vec& x, double t) {
    for (double v : x)
        if (!std::isfinite(v)) throw DomainError("non-finite coordinate");
    if (!std::isfinite(t)) throw DomainError("non-finite time");
}

void require_dim(std::size_t n) {
    if (n != 2 && n != 3) throw DomainError("dimension must be 2 or 3");
}

double factorial(int k) {
    double f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// Sum over all ways to spread c laplacians over n axes, adding 2 to each chosen axis.
double laplacian_power(const double* x, int n, double t, std::array<int, 3>& ord, int axis,
                       int remaining, double coeff) {
    if (axis == n - 1) {
        ord[axis] += 2 * remaining;
        double p = coeff / factorial(remaining);
        for (int a = 0; a < n; ++a) p *= heat_kernel_1d_deriv(x[a], t, ord[a]);
        ord[axis] -= 2 * remaining;
        return p;
    }
    double s = 0;
    for (int c = 0; c <= remaining; ++c) {
        ord[axis] += 2 * c;
        s += laplacian_power(x, n, t, ord, axis + 1, remaining - c, coeff / factorial(c));
        ord[axis] -= 2 * c;
    }
    return s;
}

void check_order(const MultiIndex& d) {
    if (d.l < 0 || d.k < 0 || d.q < 0 || d.m < 0) throw DomainError("negative derivative order");
    if (d.total() > kMaxDerivOrder) throw DomainError("derivative order above 2 is not supported");
}

// Derivative of Gamma(x - y, t) or Gamma(x - y*, t) w.r.t. (x', x_n, y_n, t).
double image_term(const HalfSpacePoint& x, const HalfSpacePoint& y, double t, const MultiIndex& d,
                  bool reflected) {
    int n = x.dim();
    std::array<double, 3> z{};
    for (int a = 0; a < n - 1; ++a) z[a] = x.x_tangential[a] - y.x_tangential[a];
    z[n - 1] = reflected ? x.x_normal + y.x_normal : x.x_normal - y.x_normal;
    std::array<int, 3> ord{};
    ord[d.axis] += d.l;
    ord[n - 1] += d.k + d.q;
    double sign = 1.0;
    // d/dy_n of (x_n - y_n) flips the sign; of (x_n + y_n) it does not.
    if (!reflected && (d.q % 2 == 1)) sign = -1.0;
    return sign * heat_kernel_partial(z.data(), n, t, ord.data(), d.m);
}

void check_green_args(const HalfSpacePoint& x, const HalfSpacePoint& y, double t, const MultiIndex& d) {
    if (x.dim() != y.dim()) throw DomainError("dimension mismatch");
    require_finite(x.coords(), t);
    require_finite(y.coords(), t);
    if (t <= 0) throw DomainError("heat Green function requires t > 0");
    check_order(d);
    if (d.axis < 0 || d.axis >= x.dim() - 1) throw DomainError("tangential axis out of range");
}

}  // namespace

HalfSpacePoint::HalfSpacePoint(Vec tangential, double normal)
    : x_tangential(std::move(tangential)), x_normal(normal) {
    require_dim(x_tangential.size() + 1);
    if (!(normal >= 0)) throw DomainError("x_normal must be >= 0");
}

Vec HalfSpacePoint::coords() const {
    Vec c = x_tangential;
    c.push_back(x_normal);
    return c;
}

Vec HalfSpacePoint::reflected() const {
    Vec c = x_tangential;
    c.push_back(-x_normal);
    return c;
}

double heat_kernel_1d(double y, double t) {
    if (t <= 0) return 0.0;
    return std::exp(-y * y / (4 * t)) / std::sqrt(4 * std::numbers::pi * t);
}

double heat_kernel_1d_deriv(double y, double t, int a) {
    if (t <= 0) return 0.0;
    if (a == 0) return heat_kernel_1d(y, t);
    double s = std::sqrt(4 * t);
    double h = std::hermite(static_cast<unsigned>(a), y / s);
    double sign = (a % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(s, -a) * h * heat_kernel_1d(y, t);
}

double heat_kernel_partial(const double* x, int n, double t, const int* orders, int m) {
    if (t <= 0) return 0.0;
    std::array<int, 3> ord{};
    for (int a = 0; a < n; ++a) ord[a] = orders[a];
    if (m == 0) {
        double p = 1;
        for (int a = 0; a < n; ++a) p *= heat_kernel_1d_deriv(x[a], t, ord[a]);
        return p;
    }
    return laplacian_power(x, n, t, ord, 0, m, factorial(m));
}

double heat_kernel(const Vec& x, double t, const MultiIndex& d) {
    require_dim(x.size());
    require_finite(x, t);
    check_order(d);
    if (d.q != 0) throw DomainError("heat_kernel has no y_n argument");
    int n = static_cast<int>(x.size());
    if (d.axis < 0 || d.axis >= n - 1) throw DomainError("tangential axis out of range");
    if (t <= 0) return 0.0;
    std::array<int, 3> ord{};
    ord[d.axis] += d.l;
    ord[n - 1] += d.k;
    return heat_kernel_partial(x.data(), n, t, ord.data(), d.m);
}

double unit_ball_volume(int n) {
    return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

namespace {

double norm2(const Vec& x) {
    double s = 0;
    for (double v : x) s += v * v;
    return s;
}

void check_laplace_arg(const Vec& x) {
    require_dim(x.size());
    require_finite(x, 0.0);
    if (norm2(x) == 0) throw SingularityError("fundamental solution is singular at x = 0");
}

}  // namespace

double laplace_fundamental(const Vec& x) {
    check_laplace_arg(x);
    int n = static_cast<int>(x.size());
    double r = std::sqrt(norm2(x));
    if (n == 2) return -std::log(r) / (2 * std::numbers::pi);
    return std::pow(r, 2 - n) / (n * (n - 2) * unit_ball_volume(n));
}

Vec laplace_fundamental_grad(const Vec& x) {
    check_laplace_arg(x);
    int n = static_cast<int>(x.size());
    double r2 = norm2(x);
    // grad E = -x / (n |B_1| |x|^n) in every dimension.
    double c = -1.0 / (n * unit_ball_volume(n) * std::pow(r2, n / 2.0));
    Vec g(n);
    for (int a = 0; a < n; ++a) g[a] = c * x[a];
    return g;
}

Vec laplace_fundamental_hessian(const Vec& x) {
    check_laplace_arg(x);
    int n = static_cast<int>(x.size());
    double r2 = norm2(x);
    double c = -1.0 / (n * unit_ball_volume(n) * std::pow(r2, n / 2.0));
    Vec h(n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            h[a * n + b] = c * ((a == b ? 1.0 : 0.0) - n * x[a] * x[b] / r2);
    return h;
}

Vec laplace_fundamental(const Vec& x, int grad_order) {
    switch (grad_order) {
        case 0: return {laplace_fundamental(x)};
        case 1: return laplace_fundamental_grad(x);
        case 2: return laplace_fundamental_hessian(x);
        default: throw DomainError("grad_order must be 0, 1 or 2");
    }
}

double green_heat_N(const HalfSpacePoint& x, const HalfSpacePoint& y, double t, const MultiIndex& d) {
    check_green_args(x, y, t, d);
    return image_term(x, y, t, d, false) + image_term(x, y, t, d, true);
}

double green_heat_D(const HalfSpacePoint& x, const HalfSpacePoint& y, double t, const MultiIndex& d) {
    check_green_args(x, y, t, d);
    return image_term(x, y, t, d, false) - image_term(x, y, t, d, true);
}

}  // namespace halfspace
