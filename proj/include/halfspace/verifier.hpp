#pragma once

#include <string>
#include <utility>
#include <vector>

#include "halfspace/fields.hpp"
#include "halfspace/green_tensor.hpp"

namespace halfspace {

/// Summary of one sampled estimate: sup of LHS / RHS over a sweep, with the change of that
/// sup between two resolutions.
struct EstimateReport {
    std::string id;      ///< operation identifier, e.g. "lemma21"
    std::string anchor;  ///< tag of the estimate being tested
    std::vector<std::pair<std::string, double>> params;
    std::size_t samples = 0;
    double sup_ratio = 0;
    std::vector<double> argmax;  ///< sample coordinates at the sup (meaning listed in argmax_labels)
    std::vector<std::string> argmax_labels;
    double refinement_delta = 0;  ///< |sup_fine - sup_coarse| / sup_fine
    std::string verdict;          ///< bounded | unstable
    std::vector<std::pair<std::string, double>> extras;
    std::vector<std::string> notes;

    /// Value of a named extra; throws if absent.
    double extra(const std::string& key) const;
};

/// Verdict rule shared by all sweeps.
inline constexpr double kRefinementTol = 0.10;

/// log_+ s = max(log s, 0).
double log_plus(double s);

// radial power integral ------------------------------------------------------------

struct RadialCase {
    double L, a, d, k;
};

/// int_0^L r^{d-1} (r + a)^{-k} dr.
double lemma21_lhs(const RadialCase& c, double rel_tol = 1e-12);
/// Three-branch closed form (k < d, k = d, k > d).
double lemma21_rhs(const RadialCase& c);
EstimateReport check_lemma21(const std::vector<RadialCase>& cases);
/// (L, a) in {0.1, 1, 10}^2, (d, k) in {(1,2), (2,2), (2,1), (2,3)}.
std::vector<RadialCase> lemma21_default_sweep();

// two-centre integral --------------------------------------------------------------

struct TwoCenterCase {
    int d;
    double a, b, k, m;
    double x;  ///< |x| > 0
};

/// int_{R^d} (|z| + a)^{-k} (|z - x| + b)^{-m} dz over all of R^d (rotational reduction).
double lemma22_lhs(const TwoCenterCase& c, double rel_tol = 1e-10);
/// Five-term bound with R = max(|x|, a, b).
double lemma22_rhs(const TwoCenterCase& c);
EstimateReport check_lemma22(const std::vector<TwoCenterCase>& cases);
std::vector<TwoCenterCase> lemma22_default_sweep();

struct LineCase {
    double k, m, A;
};

/// int_0^inf (z + A)^{-k} (z + 1)^{-m} dz.
double lemma22d1_lhs(const LineCase& c, double rel_tol = 1e-12);
/// R^{-m} A^{1-k} + delta_{m1} R^{-k} log R + 1_{m>1} R^{-k}, R = A + 1.
double lemma22d1_rhs(const LineCase& c);
EstimateReport check_lemma22d1(const std::vector<LineCase>& cases);
std::vector<LineCase> lemma22d1_default_sweep();

// Gaussian-log comparison ----------------------------------------------------------

/// [t^{-k/2} e^{-r^2/(c t)} log(2 + r)] (r + sqrt t)^k / log(2 + t).
double log_lemma_ratio(double k, double r, double t, double c = 4.0);
/// Sup over the product sweep; refinement inserts geometric midpoints.
EstimateReport check_log_lemma(double k, const std::vector<double>& r_sweep, const std::vector<double>& t_sweep);

// heat kernel against (|y| + 1)^{-a} ------------------------------------------------

/// int_{R^k} Gamma_k(x - y, t) (|y| + 1)^{-a} dy for |x| = x, k in {1, 2, 3}.
double heat_decay_lhs(int k, double a, double x, double t, double rel_tol = 1e-11);
/// (1_{a>k} sqrt t + 1)^{a-k} (|x| + sqrt t + 1)^{-a} (1 + delta_{ak} log_+ t), with the two
/// conditional factors switchable for the sharpness probes.
double heat_decay_rhs(int k, double a, double x, double t, bool log_factor = true, bool power_factor = true);
/// Sup ratio over the sweep. For a = k (log factor) or a > k (power factor) the extras
/// report the ratio without the factor at x = 0, t = 1 and t = max(t_sweep).
EstimateReport check_heat_decay_conv(int k, double a, const std::vector<double>& x_sweep,
                                     const std::vector<double>& t_sweep);

// pointwise kernel bounds ----------------------------------------------------------

enum class KernelKind { Gstar, GN, GD };

/// Sample box for n = 2: x', y' in [tangential_lo, tangential_hi], x_n, y_n in
/// [normal_lo, normal_hi], t from `times`; `points` lattice nodes per spatial axis.
struct SampleBox {
    double tangential_lo = -4, tangential_hi = 4;
    double normal_lo = 0.05, normal_hi = 4;
    std::vector<double> times{0.05, 0.2, 1.0, 4.0};
    int points = 6;
};

/// One resolution of a pointwise sweep: lattice points per axis and the strip rule.
struct SweepResolution {
    int points = 6;
    StripQuadrature quad{};
};

struct PointwiseTarget {
    TensorIndex idx{};   ///< ignored for GN / GD
    MultiIndex deriv{};
};

/// Solonnikov-type bound e^{-c y_n^2/t} / [t^{m+q/2} (|x*-y|^2+t)^{(l+n)/2} (x_n^2+t)^{k/2}].
double solonnikov_bound(const HalfSpacePoint& x, const HalfSpacePoint& y, double t, const MultiIndex& d, double c);
/// (|x-y|^2 + t)^{-(n+s)/2}, s = spatial order + 2 * time order.
double heat_green_bound(const HalfSpacePoint& x, const HalfSpacePoint& y, double t, const MultiIndex& d);

/// Sup |kernel| / bound at every resolution; one report per target. For Gstar the strip
/// integrals are computed once per sample and shared by all targets. `c` is the Gaussian
/// constant of the Solonnikov bound.
std::vector<EstimateReport> sweep_pointwise_bounds(KernelKind kind, const std::vector<PointwiseTarget>& targets,
                                                   const SampleBox& box, const std::vector<SweepResolution>& res,
                                                   double c = 0.125);
EstimateReport sweep_pointwise_bound(KernelKind kind, const PointwiseTarget& target, const SampleBox& box,
                                     const std::vector<SweepResolution>& res, double c = 0.125);
/// All (i, j) and derivative tuples with total order <= 1 (l, k, q, m).
std::vector<PointwiseTarget> first_order_targets(KernelKind kind);

// decay experiment -----------------------------------------------------------------

struct DecayRow {
    std::string quantity;  ///< u | grad_u | dt_u
    double q;
    std::vector<double> values;
    double slope = 0, intercept = 0, r2 = 0;
    double expected = 0;
    bool conclusive = false;  ///< r2 >= 0.99
};

struct DecayTable {
    std::vector<double> times;
    std::vector<DecayRow> rows;
    double outer_mass_fraction = 0;  ///< share of |u(t_max)|_1 in the outer quarter of the box (informational)
    std::vector<std::string> notes;

    const DecayRow& row(const std::string& quantity, double q) const;
};

/// Least-squares fit of log y against log x.
struct LogFit {
    double slope = 0, intercept = 0, r2 = 0;
};
LogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// |u(t)|_q, |grad u(t)|_q and |d_t u(t)|_q (centered difference, step 0.01 t) for the
/// Stokes flow of u0, with log-log slopes. Throws DomainError naming a larger box if heat-type
/// spreading of the support of u0 carries more than 1% of the mass through the open walls
/// (tangential sides and x_n = H) by the last time.
DecayTable decay_experiment(const Field& u0, const std::vector<double>& q_list, const std::vector<double>& times);
/// Compact dipole curl(x_n^2 exp(-|x - (0, 1)|^2 / 0.6)) scaled to unit L^1 norm.
Field dipole_data(const TensorGrid& g);

// operator scaling -----------------------------------------------------------------

enum class ScalingOp {
    HeatGradLq,        ///< |grad e^{t Delta^N} g|_q / (t^{-1/2} |g|_q)
    HeatLinearYa,      ///< |e^{t Delta^N} f|_{Y_a} / ((1 + delta_{an} log_+ t) |f|_{Y_a})
    StokesLinearYab,   ///< |e^{-tA} u0|_{Y_{a,b}} / |u0|_{Y_{a,b}}
    MixedBilinear,     ///< |Duhamel(F)(t)|_{Y_{a,b}} / (t^{1/2} |F|_{Y_{2a,2b}})
    BoundaryBilinear   ///< |Duhamel(F)(t)|_{Z_{a,alpha}} / (t^{(1-mu)/2} |F|_{Z_{2a,2alpha}})
};

std::string scaling_op_name(ScalingOp op);
ScalingOp parse_scaling_op(const std::string& s);

/// Constant-in-time forcing whose divergence is a tangential sheet of width `layer` at x_n = 1,
/// on the normal-refined grid used by the bilinear sweeps.
Field layered_forcing(const TensorGrid& g, double layer = 0.02);
TensorGrid layered_grid();

/// Ratio sup over t of output norm / (rate(t) * input norm) for fixed representative inputs.
/// Extras: growth_exponent and growth_r2 from a log-log fit of the output norm.
/// Refinement: schedule order halved (bilinear) or grid halved (linear).
EstimateReport sweep_semigroup_scaling(ScalingOp op, const WeightedNormSpec& spec, const std::vector<double>& t_sweep,
                                       double mu = 0.05);

}  // namespace halfspace
