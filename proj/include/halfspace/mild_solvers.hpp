#pragma once

#include <string>
#include <vector>

#include "halfspace/fields.hpp"

namespace halfspace {

enum class SystemKind { Nse, Mhd, FmMhd, NlcfN, NlcfD };

std::string system_name(SystemKind s);
/// Accepts nse, mhd, fm_mhd, nlcf_n, nlcf_d.
SystemKind parse_system(const std::string& s);

struct PicardConfig {
    SystemKind system = SystemKind::Nse;
    double T = 0.25;
    int time_intervals = 4;  ///< uniform nodes t_k = k T / K, k = 0..K
    WeightedNormSpec norm = WeightedNormSpec::Yab(1.0, 0.5);
    int max_iter = 40;
    double tol = 1e-10;       ///< stop when the successive difference falls below tol * norm
    int schedule_nodes = 24;  ///< Duhamel nodes per time node
    std::vector<double> d_const;  ///< d_inf (nlcf_n) or d_star (nlcf_d), unit length

    void validate(int n) const;
    std::vector<double> times() const;
};

/// Per-iteration record. Entry m belongs to iterate m + 1 (iterate 0 is zero).
struct PicardTrace {
    std::vector<double> norms;        ///< sup over time nodes of the iterate norm
    std::vector<double> diffs;        ///< sup over time nodes of the successive difference
    std::vector<double> ratios;       ///< diffs[m] / diffs[m-1]; first entry 0
    std::vector<double> div_residual;     ///< max over t_k > 0 of the grid-scaled divergence of u (and b)
    std::vector<double> trace_residual;   ///< max boundary trace of the Dirichlet components / max|field|
    std::vector<double> director_drift;   ///< NLCF: max | |d| - 1 |
    std::string verdict;              ///< converged | max_iterations | diverged
    int iterations = 0;
    double fixed_point_residual = 0;  ///< |Phi(w) - w| for the returned iterate w
    double linear_norm = 0;           ///< sup_t norm of the linear part
    double magnetic_divergence = 0;   ///< MHD and F-M: max grid-scaled div b over t_k > 0
    double far_field_initial = 0;     ///< NLCF: max_{|x| >= 6} |d0 - d_const|
    double far_field_final = 0;       ///< NLCF: same for the returned solution over t_k
    bool critical_exponent = false;   ///< Y_{a,b} at (a, b) = (n - 1, 1)
    std::vector<std::string> warnings;
};

/// Histories at the time nodes. `second` is b for MHD-type systems and d (not d~) for NLCF.
struct PicardResult {
    std::vector<double> times;
    std::vector<Field> u;
    std::vector<Field> second;
    PicardTrace trace;
};

/// u^{m+1} = e^{-tA} u0 + Duhamel(-u^m (x) u^m), starting from u^0 = 0.
PicardResult picard_nse(const Field& u0, const PicardConfig& cfg);
/// Velocity forcing -(u (x) u - b (x) b); b through e^{t Delta*} and the mixed heat Duhamel of
/// d_k (b_k u - u_k b).
PicardResult picard_mhd(const Field& u0, const Field& b0, const PicardConfig& cfg);
/// Both fields through the Stokes semigroup; b forcing -(u_k b_j - b_k u_j).
PicardResult picard_fm_mhd(const Field& u0, const Field& b0, const PicardConfig& cfg);
/// Velocity forcing -(u (x) u + grad d (.) grad d); director d~ = d - d_const through the
/// Neumann (nlcf_n) or Dirichlet (nlcf_d) heat semigroup of -u . grad d~ + |grad d~|^2 d.
PicardResult picard_nlcf(const Field& u0, const Field& d0, const PicardConfig& cfg);

/// Dispatch on cfg.system; `second` is ignored for nse.
PicardResult picard_solve(const Field& u0, const Field& second, const PicardConfig& cfg);

/// Solenoidal bump curl(x_n^2 exp(-|x - c|^2 / s)) with c = (shift, 1.2), scaled to the given
/// norm value (zero amplitude gives the zero field).
Field solenoidal_bump(const TensorGrid& g, double amplitude, const WeightedNormSpec& spec, double shift = 0.0,
                      double width = 0.5);
/// Unit director (sin theta, cos theta) with theta = eps x_n^2 exp(-|x - c|^2 / s), c = (0, 1),
/// eps chosen so |grad d| has the given norm value. Equals (0, 1) on the boundary.
Field director_bump(const TensorGrid& g, double amplitude, const WeightedNormSpec& spec);

}  // namespace halfspace
