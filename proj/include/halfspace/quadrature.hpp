#pragma once

#include <functional>
#include <vector>

namespace halfspace {

/// Nodes and weights of a 1D rule.
struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

/// p-point Gauss-Legendre rule on [-1, 1] (cached, thread safe).
const Rule1D& gauss_legendre(int p);

/// Gauss-Legendre rule mapped to [a, b].
Rule1D gauss_legendre(int p, double a, double b);

/// Composite Gauss-Legendre rule on the panels [breaks[i], breaks[i+1]].
Rule1D composite_rule(const std::vector<double>& breaks, int p);

/// Panel breakpoints on [a, b]: uniform spacing <= h, plus the geometric sequence
/// c +- h * ratio^k (k = 1..levels) around the singular point c, kept where it falls inside.
std::vector<double> graded_breaks(double a, double b, double h, double c, double ratio, int levels);

/// Result of an adaptive integration.
struct Integral {
    double value = 0;
    double error = 0;
};

/// Adaptive Gauss-Kronrod (G15/K31) integration; a or b may be infinite.
Integral integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                            double rel_tol = 1e-13, unsigned max_depth = 30);

}  // namespace halfspace
