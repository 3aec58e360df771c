#pragma once

#include <cmath>
#include <vector>

#include "halfspace/fields.hpp"
#include "halfspace/quadrature.hpp"

namespace test {

/// Product Gauss-Legendre rule on [lo, hi]^2 with `panels` panels of p points per axis.
template <class F>
double integrate_2d(F&& f, double lo, double hi, int panels = 24, int p = 12) {
    std::vector<double> br;
    for (int i = 0; i <= panels; ++i) br.push_back(lo + (hi - lo) * i / panels);
    halfspace::Rule1D r = halfspace::composite_rule(br, p);
    double s = 0;
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < r.size(); ++j) s += r.weights[i] * r.weights[j] * f(r.nodes[i], r.nodes[j]);
    return s;
}

/// Observed order log2(e_coarse / e_fine).
inline double order(double coarse, double fine) { return std::log2(coarse / fine); }

/// curl(x_2^2 exp(-|x - c|^2 / s)), c = (cx, cy).
inline halfspace::Field curl_bump(const halfspace::TensorGrid& g, double cx = 0.0, double cy = 1.2, double s = 0.5) {
    return halfspace::sample(g, 2, [=](const halfspace::Vec& x) {
        double a = x[0] - cx, b = x[1] - cy;
        double e = std::exp(-(a * a + b * b) / s);
        return halfspace::Vec{(2 * x[1] - x[1] * x[1] * 2 * b / s) * e, x[1] * x[1] * e * 2 * a / s};
    });
}

inline double max_diff(const halfspace::Field& a, const halfspace::Field& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

}  // namespace test
