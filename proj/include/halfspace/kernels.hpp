#pragma once

#include <vector>

namespace halfspace {

using Vec = std::vector<double>;

/// Point (x', x_n) of the closed half space, n in {2, 3}.
struct HalfSpacePoint {
    Vec x_tangential;    ///< length n-1
    double x_normal = 0; ///< >= 0

    HalfSpacePoint() = default;
    /// Validates n and x_normal >= 0; throws DomainError otherwise.
    HalfSpacePoint(Vec tangential, double normal);

    int dim() const { return static_cast<int>(x_tangential.size()) + 1; }
    Vec coords() const;
    /// y* = (y', -y_n); deliberately leaves the half space, so returned as raw coordinates.
    Vec reflected() const;
};

/// Derivative orders: l tangential (along `axis`), k in x_n, q in y_n, m in t.
struct MultiIndex {
    int l = 0, k = 0, q = 0, m = 0;
    int axis = 0;  ///< tangential axis carrying the l derivatives (0 or 1)
    int total() const { return l + k + q + m; }
};

/// Public derivative limit.
inline constexpr int kMaxDerivOrder = 2;

/// 1D heat kernel (4 pi t)^{-1/2} exp(-y^2/4t), 0 for t <= 0.
double heat_kernel_1d(double y, double t);

/// d^a/dy^a of the 1D heat kernel (any a >= 0).
double heat_kernel_1d_deriv(double y, double t, int a);

/// Mixed partial of Gamma with per-axis orders `orders[0..n)` and time order m,
/// computed as Gaussian times Hermite products with d_t = Laplacian. No order cap;
/// this is what the tensor code builds on.
double heat_kernel_partial(const double* x, int n, double t, const int* orders, int m);

/// d^deriv Gamma(x, t). deriv.q must be 0. Zero for t <= 0.
/// Throws DomainError for non-finite input, n outside {2,3} or order > 2.
double heat_kernel(const Vec& x, double t, const MultiIndex& deriv = {});

/// Laplace fundamental solution E(x); throws SingularityError at x = 0.
double laplace_fundamental(const Vec& x);
/// Gradient of E.
Vec laplace_fundamental_grad(const Vec& x);
/// Hessian of E, row major n x n.
Vec laplace_fundamental_hessian(const Vec& x);

/// E, grad E or Hessian E as a flat vector (length 1, n, n*n) for grad_order 0, 1, 2.
Vec laplace_fundamental(const Vec& x, int grad_order);

/// Neumann heat Green function Gamma(x-y,t) + Gamma(x-y*,t) and derivatives
/// (l along x', k in x_n, q in y_n, m in t). Throws DomainError for t <= 0.
double green_heat_N(const HalfSpacePoint& x, const HalfSpacePoint& y, double t,
                    const MultiIndex& deriv = {});

/// Dirichlet heat Green function Gamma(x-y,t) - Gamma(x-y*,t).
double green_heat_D(const HalfSpacePoint& x, const HalfSpacePoint& y, double t,
                    const MultiIndex& deriv = {});

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

}  // namespace halfspace
