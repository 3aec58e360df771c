#pragma once

#include <vector>

#include "halfspace/fields.hpp"

namespace halfspace {

enum class HeatBc { Neumann, Dirichlet, Mixed };

/// Time nodes and weights for int_0^t g(s) ds. The last interval [breaks.back(), t] uses
/// s = t - tau^2 with M Gauss-Legendre points in tau, so a (t - s)^{-1/2} factor becomes
/// bounded; earlier intervals get max(4, M/2) plain Gauss points each.
struct DuhamelSchedule {
    double t = 0;
    int order = 0;
    std::vector<double> breaks;   ///< interval starts, breaks[0] = 0
    std::vector<double> nodes;    ///< increasing, inside (0, t)
    std::vector<double> weights;

    static DuhamelSchedule graded(double t, int M = 24);
    /// Split at the history times below t so no node straddles a time node.
    static DuhamelSchedule nested(const std::vector<double>& history_times, double t, int M = 24);
    /// Same breaks with half the points, for error estimates.
    DuhamelSchedule coarsened() const;
};

/// Field values at increasing times; linear interpolation in between, constant
/// extension outside. All entries share one grid and component count.
struct TimeHistory {
    std::vector<double> times;
    std::vector<Field> values;

    Field at(double s) const;
    /// Single time-independent field.
    static TimeHistory constant(const Field& f);
};

/// Tolerance on the grid-scaled residuals used by the solenoidal preconditions.
inline constexpr double kSolenoidalTol = 1e-3;

/// e^{-tA} u0 through the restricted tensor. Throws PreconditionError if u0 is not
/// solenoidal within `tol` (grid-scaled).
Field stokes_semigroup(const Field& u0, double t, double tol = kSolenoidalTol);

/// Same without the precondition check (input already projected).
Field stokes_semigroup_unchecked(const Field& u0, double t);

/// Componentwise e^{t Delta^N} or e^{t Delta^D}; Mixed means N on tangential components and
/// D on the last one (requires n components).
Field heat_semigroup(const Field& f, double t, HeatBc bc);

/// e^{t Delta*} b0 with Delta* = (Delta^N, ..., Delta^N, Delta^D). b0 must be solenoidal.
Field mixed_star_semigroup(const Field& b0, double t, double tol = kSolenoidalTol);

/// Gradient of the heat semigroup computed from the gradient of the data, using the
/// image-sign identities. For bc = Dirichlet the trace of f0 must vanish within trace_tol
/// relative to max|f0|; the boundary term is still included. Output component c*n + j.
Field grad_heat_of_data(const Field& f0, double t, HeatBc bc, double trace_tol = 1e-10);

/// (div F)_j = sum_k d_k F_kj for a tensor field with n*n components (index k*n + j),
/// high-order differences.
Field divergence_form(const Field& F);

/// int_0^t e^{-(t-s)A} P[div F(s)] ds. Writes a warning to diag when the half-order rule
/// differs by more than warn_tol relative.
Field duhamel_stokes(const TimeHistory& F, double t, const DuhamelSchedule& sched, Diagnostics* diag = nullptr,
                     double warn_tol = 1e-3);

/// int_0^t e^{-(t-s)A} g(s) ds for a history of solenoidal fields.
Field duhamel_stokes_projected(const TimeHistory& g, double t, const DuhamelSchedule& sched);

/// int_0^t e^{(t-s)Delta} g(s) ds with the chosen boundary condition.
Field duhamel_heat(const TimeHistory& g, double t, HeatBc bc, const DuhamelSchedule& sched,
                   Diagnostics* diag = nullptr, double warn_tol = 1e-3);

}  // namespace halfspace
