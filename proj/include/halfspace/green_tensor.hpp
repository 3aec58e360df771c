#pragma once

#include "halfspace/kernels.hpp"
#include "halfspace/quadrature.hpp"

namespace halfspace {

/// 1-based component pair (i, j) of the tensor.
struct TensorIndex {
    int i = 1, j = 1;
};

/// Rule parameters for the boundary-layer strip integral. Node lists are built per
/// (x, y, t): composite Gauss-Legendre panels of width sqrt(t)/panels_per_sqrt_t,
/// refined geometrically (ratio grading_ratio, grading_levels levels) toward the
/// corner z = x, on z' within the Gaussian truncation radius of y'.
struct StripQuadrature {
    int points_per_panel = 10;
    double panels_per_sqrt_t = 2.0;
    double grading_ratio = 0.5;
    int grading_levels = 30;
    double truncation_eps = 1e-14;
    bool estimate_error = true;   ///< rerun with a lower-order rule on the same panels
    double warn_rel_tol = 1e-7;   ///< warning if the estimate exceeds this relative error

    /// Same panels, twice the points per panel.
    StripQuadrature refined() const;
};

/// Nodes actually used for one evaluation (for inspection and tests).
struct StripNodes {
    Rule1D tangential;
    Rule1D normal;
    double normal_upper = 0;  ///< strip height after truncation
};

/// Value with its quadrature error estimate.
struct GStarResult {
    double value = 0;
    double error_estimate = 0;
    bool accuracy_warning = false;
};

/// Truncation radius sqrt(4 t ln(1/eps)).
double gaussian_radius(double t, double eps);

/// Node lists for the strip around (x, y, t). n = 2 only.
StripNodes strip_nodes(const HalfSpacePoint& x, const HalfSpacePoint& y, double t,
                       const StripQuadrature& quad);

/// Boundary-layer part G*_ij. n = 2 for j < n; j = n is closed form in n = 2, 3.
GStarResult g_star(TensorIndex idx, const HalfSpacePoint& x, const HalfSpacePoint& y, double t,
                   const StripQuadrature& quad = {});

/// delta_ij Gamma(x - y, t) + G*_ij.
GStarResult g_breve(TensorIndex idx, const HalfSpacePoint& x, const HalfSpacePoint& y, double t,
                    const StripQuadrature& quad = {});

/// One first derivative of G*_ij: l (x' along axis 0), k (x_n), q (y_n) or m (t).
GStarResult g_star_deriv(TensorIndex idx, const HalfSpacePoint& x, const HalfSpacePoint& y, double t,
                         const MultiIndex& deriv, const StripQuadrature& quad = {});

/// All strip integrals for one (x, y, t), n = 2, j = 1, both i. Used by the sweeps so that
/// one pass over the nodes serves every component and first derivative.
struct StripIntegrals {
    double base[2]{};   ///< int dE_i(x-z) d_1 Gamma(z-y*)
    double d11[2]{};    ///< int dE_i d_1 d_1 Gamma(z-y*)
    double d12[2]{};    ///< int dE_i d_2 d_1 Gamma(z-y*)
    double dlap[2]{};   ///< int dE_i d_1 Lap Gamma(z-y*)
    double line[2]{};   ///< int_Sigma dE_i(x'-z', x_n) d_1 Gamma((z',0)-y*)
    double err = 0;     ///< largest difference to the lower-order rule (0 if not estimated)
};

StripIntegrals strip_integrals(const HalfSpacePoint& x, const HalfSpacePoint& y, double t,
                               const StripQuadrature& quad, bool need_line = true);

/// G*_ij or one of its first derivatives assembled from precomputed strip integrals
/// (n = 2). deriv.total() must be 0 or 1.
double g_star_from(const StripIntegrals& s, TensorIndex idx, const HalfSpacePoint& x,
                   const HalfSpacePoint& y, double t, const MultiIndex& deriv);

}  // namespace halfspace
