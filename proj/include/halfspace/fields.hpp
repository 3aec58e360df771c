#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "halfspace/kernels.hpp"

namespace halfspace {

/// Uniform tensor grid on [-L, L)^{n-1} x [0, H].
/// Tangential nodes -L + i*2L/N (periodic); normal nodes k*H/(Nn-1), k = 0..Nn-1,
/// so both x_n = 0 and x_n = H are nodes. Node index runs normal-fastest.
struct TensorGrid {
    int n = 2;
    double L = 8.0;
    double H = 8.0;
    std::vector<int> counts{128, 128};  ///< n entries, normal count last
    bool periodic_tangential = true;

    TensorGrid() = default;
    TensorGrid(int n, double L, double H, std::vector<int> counts);
    /// n = 2 shorthand.
    static TensorGrid plane(double L, double H, int n_tangential, int n_normal);

    void validate() const;
    std::size_t node_count() const;
    int normal_count() const { return counts.back(); }
    std::size_t tangential_count() const { return node_count() / counts.back(); }
    double tangential_spacing() const { return 2 * L / counts[0]; }
    double normal_spacing() const { return H / (counts.back() - 1); }
    double min_spacing() const;
    /// Coordinates of a node (length n).
    Vec coords(std::size_t node) const;
    void coords(std::size_t node, double* out) const;
    double normal_coord(std::size_t node) const { return normal_spacing() * (node % counts.back()); }
    /// Cell volume for quadrature (trapezoid in x_n, rectangle tangentially).
    double cell_weight(std::size_t node) const;
    bool same_as(const TensorGrid& o) const;
};

/// Per-node field with `components` values per node, node-major.
struct Field {
    TensorGrid grid;
    int components = 1;
    std::vector<double> values;

    Field() = default;
    Field(const TensorGrid& g, int comps);
    double& at(std::size_t node, int c) { return values[node * components + c]; }
    double at(std::size_t node, int c) const { return values[node * components + c]; }
    /// One component as a contiguous array.
    std::vector<double> component(int c) const;
    void set_component(int c, const std::vector<double>& v);
    double max_abs() const;
    /// Node-wise Euclidean norm maximum.
    double max_norm() const;
    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double s);
    bool all_finite() const;
};

using VectorField = Field;
using ScalarField = Field;

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Fill from a function of the coordinates returning `comps` values.
Field sample(const TensorGrid& g, int comps, const std::function<Vec(const Vec&)>& f);

enum class NormFamily { Lq, Ya, Za, Yab, Zaal, Lq_uloc };

/// Norm selector. q may be +infinity.
struct WeightedNormSpec {
    NormFamily family = NormFamily::Lq;
    double q = 2.0, a = 0.0, b = 0.0, alpha = 0.0;

    static WeightedNormSpec Lq(double q);
    static WeightedNormSpec Ya(double a);
    static WeightedNormSpec Za(double a);
    static WeightedNormSpec Yab(double a, double b);
    static WeightedNormSpec Zaal(double a, double alpha);
    static WeightedNormSpec Lq_uloc(double q);

    void validate() const;
    std::string name() const;
};

/// <x> = (1 + |x|^2)^{1/2}.
inline double japanese(double r2) { return std::sqrt(1.0 + r2); }

/// Norm of the node-wise Euclidean magnitude of f.
double weighted_norm(const Field& f, const WeightedNormSpec& spec);

enum class DiffScheme {
    Centered2,  ///< centered second-order differences, one-sided at x_n = 0 and x_n = H
    HighOrder   ///< spectral tangentially, 9-point Lagrange stencils normally (n = 2)
};

/// Sum of d_a u_a; u must have n components.
Field divergence(const Field& u, DiffScheme scheme = DiffScheme::Centered2);

/// grad of every component; output component c*n + a is d_a f_c.
Field gradient(const Field& f, DiffScheme scheme = DiffScheme::Centered2);

/// Values at x_n = 0, tangential nodes in grid order.
struct TraceField {
    std::size_t points = 0;
    int components = 0;
    std::vector<double> values;
    double max_abs() const;
};

TraceField boundary_trace(const Field& u);

/// Grid-scaled solenoidality residuals: h_min * max|div u| / max|u| (high-order
/// divergence, n = 2) and max|u_n(x',0)| / max|u|.
struct SolenoidalResidual {
    double divergence = 0;
    double normal_trace = 0;
};

SolenoidalResidual solenoidal_residual(const Field& u);

/// Diagnostics collected by operations that may warn.
struct Diagnostics {
    std::vector<std::string> warnings;
};

/// Helmholtz-Leray projection (n = 2). Tangential Fourier modes; for each mode the
/// pressure potential solves phi'' - |xi|^2 phi = div with phi'(0) = u_n(0), decaying
/// at H, written through exponential moments of the data so no derivatives of u are
/// taken. The xi = 0 mode gets the pure Neumann solution (u_n mean removed).
Field leray_project(const Field& u, Diagnostics* diag = nullptr);

/// Node-major CSV: a metadata comment line, a header row, one row per node.
void write_csv(const Field& f, const std::string& path);
Field read_csv(const std::string& path);
/// Flat little-endian binary with the same metadata.
void write_binary(const Field& f, const std::string& path);
Field read_binary(const std::string& path);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace halfspace
