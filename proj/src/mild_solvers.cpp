#include "halfspace/mild_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "halfspace/errors.hpp"
#include "halfspace/semigroups.hpp"

namespace halfspace {

std::string system_name(SystemKind s) {
    switch (s) {
        case SystemKind::Nse: return "nse";
        case SystemKind::Mhd: return "mhd";
        case SystemKind::FmMhd: return "fm_mhd";
        case SystemKind::NlcfN: return "nlcf_n";
        case SystemKind::NlcfD: return "nlcf_d";
    }
    return "?";
}

SystemKind parse_system(const std::string& s) {
    if (s == "nse") return SystemKind::Nse;
    if (s == "mhd") return SystemKind::Mhd;
    if (s == "fm_mhd") return SystemKind::FmMhd;
    if (s == "nlcf_n") return SystemKind::NlcfN;
    if (s == "nlcf_d") return SystemKind::NlcfD;
    throw DomainError("unknown system '" + s + "'");
}

void PicardConfig::validate(int n) const {
    if (!(T > 0) || !std::isfinite(T)) throw DomainError("horizon T must be positive");
    if (time_intervals < 1) throw DomainError("need at least one time interval");
    if (max_iter < 1) throw DomainError("max_iter must be at least 1");
    if (!(tol > 0)) throw DomainError("tolerance must be positive");
    if (schedule_nodes < 1) throw DomainError("schedule needs at least one node");
    norm.validate();
    switch (norm.family) {
        case NormFamily::Lq: break;
        case NormFamily::Ya:
            if (norm.a > n) throw DomainError("Y_a solver space needs a <= n");
            break;
        case NormFamily::Yab:
            if (norm.b > 1 || norm.a + norm.b > n) throw DomainError("Y_{a,b} solver space needs b <= 1, a + b <= n");
            break;
        case NormFamily::Zaal:
            if (norm.alpha > 1 || !(norm.alpha < norm.a) || norm.a > n)
                throw DomainError("Z_{a,alpha} solver space needs alpha <= 1, alpha < a <= n");
            break;
        default: throw DomainError("norm " + norm.name() + " is not a solver space");
    }
    if (system == SystemKind::NlcfN || system == SystemKind::NlcfD) {
        if (d_const.empty()) throw DomainError("NLCF needs d_inf / d_star");
        double s = 0;
        for (double v : d_const) s += v * v;
        if (std::abs(std::sqrt(s) - 1) > 1e-12) throw DomainError("d_inf / d_star must have unit length");
    }
}

std::vector<double> PicardConfig::times() const {
    std::vector<double> t(std::size_t(time_intervals) + 1);
    for (int k = 0; k <= time_intervals; ++k) t[k] = T * k / time_intervals;
    return t;
}

namespace {

using History = std::vector<Field>;

// Iterate pair: first block is u, second is b or d~ (may be empty).
struct State {
    History u, w;
};

Field tensor_product(const Field& a, const Field& b, double sign) {
    int n = a.grid.n;
    Field F(a.grid, n * n);
    for (std::size_t i = 0; i < a.grid.node_count(); ++i)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) F.at(i, k * n + j) = sign * a.at(i, k) * b.at(i, j);
    return F;
}

// b_k u_j - u_k b_j
Field antisymmetric(const Field& u, const Field& b) {
    int n = u.grid.n;
    Field F(u.grid, n * n);
    for (std::size_t i = 0; i < u.grid.node_count(); ++i)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) F.at(i, k * n + j) = b.at(i, k) * u.at(i, j) - u.at(i, k) * b.at(i, j);
    return F;
}

struct Engine {
    const PicardConfig& cfg;
    TensorGrid grid;
    std::vector<double> times;
    std::vector<DuhamelSchedule> schedules;

    Engine(const PicardConfig& c, const TensorGrid& g) : cfg(c), grid(g), times(c.times()) {
        for (std::size_t k = 1; k < times.size(); ++k)
            schedules.push_back(DuhamelSchedule::nested(times, times[k], c.schedule_nodes));
    }

    History zero(int comps) const { return History(times.size(), Field(grid, comps)); }

    // Duhamel at every time node of an already projected (or heat) forcing history.
    template <class Apply>
    History duhamel_all(const History& g, Diagnostics* diag, Apply apply) const {
        TimeHistory h;
        h.times = times;
        h.values = g;
        History out;
        out.push_back(Field(grid, g.front().components));
        for (std::size_t k = 1; k < times.size(); ++k) out.push_back(apply(h, times[k], schedules[k - 1], diag));
        return out;
    }

    History stokes_duhamel(const std::vector<Field>& F, Diagnostics* diag) const {
        History g;
        for (const Field& f : F) g.push_back(leray_project(divergence_form(f)));
        return duhamel_all(g, diag, [](const TimeHistory& h, double t, const DuhamelSchedule& s, Diagnostics* d) {
            Field out = duhamel_stokes_projected(h, t, s);
            if (d) {
                Field c = duhamel_stokes_projected(h, t, s.coarsened());
                double scale = out.max_abs(), err = (out - c).max_abs();
                if (scale > 0 && err > 1e-3 * scale)
                    d->warnings.push_back("duhamel_stokes: schedule error estimate " + format_double(err / scale) +
                                          " above tolerance at t = " + format_double(t));
            }
            return out;
        });
    }

    History heat_duhamel(const std::vector<Field>& g, HeatBc bc, Diagnostics* diag) const {
        return duhamel_all(g, diag, [bc](const TimeHistory& h, double t, const DuhamelSchedule& s, Diagnostics* d) {
            return duhamel_heat(h, t, bc, s, d);
        });
    }

    double sup_norm(const History& h, const std::function<Field(const Field&)>& measure) const {
        double s = 0;
        for (const Field& f : h) s = std::max(s, weighted_norm(measure ? measure(f) : f, cfg.norm));
        return s;
    }
};

History add(const History& a, const History& b) {
    History out = a;
    for (std::size_t k = 0; k < a.size(); ++k) out[k] += b[k];
    return out;
}

History sub(const History& a, const History& b) {
    History out = a;
    for (std::size_t k = 0; k < a.size(); ++k) out[k] -= b[k];
    return out;
}

bool finite(const History& h) {
    for (const Field& f : h)
        if (!f.all_finite()) return false;
    return true;
}

struct Problem {
    State linear;
    std::function<State(const State&, Diagnostics*)> nonlinear;
    std::function<Field(const Field&)> measure_w;  // what the norm sees of the second block
    std::function<void(const State&, double&, double&, double&)> residuals;  // div, trace, drift
};

double size_of(const Engine& e, const Problem& p, const State& s) {
    double v = e.sup_norm(s.u, nullptr);
    if (!s.w.empty()) v += e.sup_norm(s.w, p.measure_w);
    return v;
}

State combine(const State& a, const State& b, bool subtract) {
    State out;
    out.u = subtract ? sub(a.u, b.u) : add(a.u, b.u);
    if (!a.w.empty()) out.w = subtract ? sub(a.w, b.w) : add(a.w, b.w);
    return out;
}

State run_iteration(const Engine& e, const Problem& p, PicardTrace& tr) {
    State w;
    w.u = e.zero(p.linear.u.front().components);
    if (!p.linear.w.empty()) w.w = e.zero(p.linear.w.front().components);
    tr.linear_norm = size_of(e, p, p.linear);
    int above = 0;
    tr.verdict = "max_iterations";
    for (int it = 1; it <= e.cfg.max_iter; ++it) {
        State next = combine(p.linear, p.nonlinear(w, nullptr), false);
        tr.iterations = it;
        if (!finite(next.u) || (!next.w.empty() && !finite(next.w))) {
            tr.verdict = "diverged";
            tr.warnings.push_back("non-finite iterate at iteration " + std::to_string(it));
            return w;
        }
        double nrm = size_of(e, p, next);
        double diff = size_of(e, p, combine(next, w, true));
        tr.norms.push_back(nrm);
        tr.ratios.push_back(tr.diffs.empty() || tr.diffs.back() == 0 ? 0.0 : diff / tr.diffs.back());
        tr.diffs.push_back(diff);
        double dv = 0, tc = 0, dr = 0;
        p.residuals(next, dv, tc, dr);
        tr.div_residual.push_back(dv);
        tr.trace_residual.push_back(tc);
        tr.director_drift.push_back(dr);
        w = std::move(next);
        if (diff <= e.cfg.tol * nrm || diff == 0) {
            tr.verdict = "converged";
            break;
        }
        above = tr.ratios.back() >= 1 && tr.diffs.size() > 1 ? above + 1 : 0;
        if (above >= 3) {
            tr.verdict = "diverged";
            return w;
        }
    }
    Diagnostics diag;
    State again = combine(p.linear, p.nonlinear(w, &diag), false);
    tr.fixed_point_residual = size_of(e, p, combine(again, w, true));
    for (auto& s : diag.warnings) tr.warnings.push_back(s);
    return w;
}

void check_solenoidal_input(const Field& u, const char* what) {
    if (u.grid.n != 2) throw DomainError("solvers are implemented for n = 2");
    if (u.components != 2) throw DomainError(std::string(what) + " needs 2 components");
    SolenoidalResidual r = solenoidal_residual(u);
    if (r.divergence > kSolenoidalTol) throw PreconditionError(std::string(what) + " is not divergence free", r.divergence);
    if (r.normal_trace > kSolenoidalTol) throw PreconditionError(std::string(what) + " has a nonzero normal trace", r.normal_trace);
}

double relative_trace(const Field& f, const std::vector<int>& comps) {
    double scale = f.max_abs();
    if (scale == 0) return 0;
    TraceField tr = boundary_trace(f);
    double m = 0;
    for (std::size_t p = 0; p < tr.points; ++p)
        for (int c : comps) m = std::max(m, std::abs(tr.values[p * tr.components + c]));
    return m / scale;
}

double max_divergence(const History& h) {
    double m = 0;
    for (std::size_t k = 1; k < h.size(); ++k) m = std::max(m, solenoidal_residual(h[k]).divergence);
    return m;
}

State linear_stokes(const Engine& e, const Field& u0) {
    State s;
    s.u.push_back(u0);
    for (std::size_t k = 1; k < e.times.size(); ++k) s.u.push_back(stokes_semigroup_unchecked(u0, e.times[k]));
    return s;
}

void finish_flags(PicardTrace& tr, const PicardConfig& cfg, int n) {
    if (cfg.norm.family == NormFamily::Yab && cfg.norm.a == n - 1 && cfg.norm.b == 1) {
        tr.critical_exponent = true;
        tr.warnings.push_back("(a, b) = (n - 1, 1) lies outside the range covered by the linear estimate");
    }
}

// Shared by mhd and fm_mhd; `stokes_b` selects the magnetic propagator.
PicardResult magnetic(const Field& u0, const Field& b0, const PicardConfig& cfg, bool stokes_b) {
    check_solenoidal_input(u0, "u0");
    check_solenoidal_input(b0, "b0");
    if (!u0.grid.same_as(b0.grid)) throw DomainError("u0 and b0 live on different grids");
    cfg.validate(u0.grid.n);
    Engine e(cfg, u0.grid);
    Problem p;
    p.linear = linear_stokes(e, u0);
    p.linear.w.push_back(b0);
    for (std::size_t k = 1; k < e.times.size(); ++k)
        p.linear.w.push_back(stokes_b ? stokes_semigroup_unchecked(b0, e.times[k])
                                      : heat_semigroup(b0, e.times[k], HeatBc::Mixed));
    p.nonlinear = [&e, stokes_b](const State& s, Diagnostics* d) {
        std::vector<Field> Fu, Fb;
        for (std::size_t k = 0; k < e.times.size(); ++k) {
            Field F = tensor_product(s.u[k], s.u[k], -1.0);
            F += tensor_product(s.w[k], s.w[k], 1.0);
            Fu.push_back(std::move(F));
            Fb.push_back(antisymmetric(s.u[k], s.w[k]));
        }
        State out;
        out.u = e.stokes_duhamel(Fu, d);
        if (stokes_b) {
            out.w = e.stokes_duhamel(Fb, d);
        } else {
            std::vector<Field> g;
            for (const Field& F : Fb) g.push_back(divergence_form(F));
            out.w = e.heat_duhamel(g, HeatBc::Mixed, d);
        }
        return out;
    };
    p.residuals = [stokes_b](const State& s, double& dv, double& tc, double& dr) {
        dv = std::max(max_divergence(s.u), max_divergence(s.w));
        tc = 0;
        for (std::size_t k = 1; k < s.u.size(); ++k) {
            tc = std::max(tc, relative_trace(s.u[k], {0, 1}));
            tc = std::max(tc, relative_trace(s.w[k], stokes_b ? std::vector<int>{0, 1} : std::vector<int>{1}));
        }
        dr = 0;
    };
    PicardResult r;
    r.times = e.times;
    State w = run_iteration(e, p, r.trace);
    r.u = std::move(w.u);
    r.second = std::move(w.w);
    r.trace.magnetic_divergence = max_divergence(r.second);
    finish_flags(r.trace, cfg, u0.grid.n);
    return r;
}

}  // namespace

PicardResult picard_nse(const Field& u0, const PicardConfig& cfg) {
    check_solenoidal_input(u0, "u0");
    cfg.validate(u0.grid.n);
    Engine e(cfg, u0.grid);
    Problem p;
    p.linear = linear_stokes(e, u0);
    p.nonlinear = [&e](const State& s, Diagnostics* d) {
        std::vector<Field> F;
        for (const Field& u : s.u) F.push_back(tensor_product(u, u, -1.0));
        State out;
        out.u = e.stokes_duhamel(F, d);
        return out;
    };
    p.residuals = [](const State& s, double& dv, double& tc, double& dr) {
        dv = max_divergence(s.u);
        tc = 0;
        for (std::size_t k = 1; k < s.u.size(); ++k) tc = std::max(tc, relative_trace(s.u[k], {0, 1}));
        dr = 0;
    };
    PicardResult r;
    r.times = e.times;
    State w = run_iteration(e, p, r.trace);
    r.u = std::move(w.u);
    finish_flags(r.trace, cfg, u0.grid.n);
    return r;
}

PicardResult picard_mhd(const Field& u0, const Field& b0, const PicardConfig& cfg) {
    return magnetic(u0, b0, cfg, false);
}

PicardResult picard_fm_mhd(const Field& u0, const Field& b0, const PicardConfig& cfg) {
    return magnetic(u0, b0, cfg, true);
}

PicardResult picard_nlcf(const Field& u0, const Field& d0, const PicardConfig& cfg) {
    check_solenoidal_input(u0, "u0");
    if (!u0.grid.same_as(d0.grid)) throw DomainError("u0 and d0 live on different grids");
    cfg.validate(u0.grid.n);
    bool dirichlet = cfg.system == SystemKind::NlcfD;
    int nd = d0.components;
    if (int(cfg.d_const.size()) != nd) throw DomainError("d_const length differs from the director components");
    for (std::size_t i = 0; i < d0.grid.node_count(); ++i) {
        double s = 0;
        for (int c = 0; c < nd; ++c) s += d0.at(i, c) * d0.at(i, c);
        if (std::abs(std::sqrt(s) - 1) > 1e-10)
            throw PreconditionError("d0 is not unit length", std::abs(std::sqrt(s) - 1));
    }
    Field dt0 = d0;
    for (std::size_t i = 0; i < d0.grid.node_count(); ++i)
        for (int c = 0; c < nd; ++c) dt0.at(i, c) -= cfg.d_const[c];
    if (dirichlet) {
        double m = boundary_trace(dt0).max_abs();
        if (m > 1e-10) throw PreconditionError("d0 does not match d_star on the boundary", m);
    }
    HeatBc bc = dirichlet ? HeatBc::Dirichlet : HeatBc::Neumann;
    Engine e(cfg, u0.grid);
    int n = u0.grid.n;
    Problem p;
    p.linear = linear_stokes(e, u0);
    p.linear.w.push_back(dt0);
    for (std::size_t k = 1; k < e.times.size(); ++k) p.linear.w.push_back(heat_semigroup(dt0, e.times[k], bc));
    const std::vector<double> dc = cfg.d_const;
    p.measure_w = [](const Field& d) { return gradient(d, DiffScheme::HighOrder); };
    p.nonlinear = [&e, bc, n, nd, dc](const State& s, Diagnostics* diag) {
        std::vector<Field> F1, F2;
        for (std::size_t k = 0; k < e.times.size(); ++k) {
            const Field& u = s.u[k];
            const Field& d = s.w[k];
            Field gd = gradient(d, DiffScheme::HighOrder);
            Field F = tensor_product(u, u, -1.0);
            Field g(u.grid, nd);
            for (std::size_t i = 0; i < u.grid.node_count(); ++i) {
                double g2 = 0;
                for (int l = 0; l < nd; ++l)
                    for (int a = 0; a < n; ++a) g2 += gd.at(i, l * n + a) * gd.at(i, l * n + a);
                for (int kk = 0; kk < n; ++kk)
                    for (int j = 0; j < n; ++j) {
                        double s2 = 0;
                        for (int l = 0; l < nd; ++l) s2 += gd.at(i, l * n + kk) * gd.at(i, l * n + j);
                        F.at(i, kk * n + j) -= s2;
                    }
                for (int l = 0; l < nd; ++l) {
                    double adv = 0;
                    for (int a = 0; a < n; ++a) adv += u.at(i, a) * gd.at(i, l * n + a);
                    g.at(i, l) = -adv + g2 * (d.at(i, l) + dc[l]);
                }
            }
            F1.push_back(std::move(F));
            F2.push_back(std::move(g));
        }
        State out;
        out.u = e.stokes_duhamel(F1, diag);
        out.w = e.heat_duhamel(F2, bc, diag);
        return out;
    };
    p.residuals = [nd, dc](const State& s, double& dv, double& tc, double& dr) {
        dv = max_divergence(s.u);
        tc = 0;
        for (std::size_t k = 1; k < s.u.size(); ++k) tc = std::max(tc, relative_trace(s.u[k], {0, 1}));
        dr = 0;
        for (const Field& d : s.w)
            for (std::size_t i = 0; i < d.grid.node_count(); ++i) {
                double q = 0;
                for (int c = 0; c < nd; ++c) q += (d.at(i, c) + dc[c]) * (d.at(i, c) + dc[c]);
                dr = std::max(dr, std::abs(std::sqrt(q) - 1));
            }
    };
    PicardResult r;
    r.times = e.times;
    State w = run_iteration(e, p, r.trace);
    r.u = std::move(w.u);
    auto far = [&](const Field& dt) {
        double m = 0;
        Vec x;
        for (std::size_t i = 0; i < dt.grid.node_count(); ++i) {
            x = dt.grid.coords(i);
            double r2 = 0;
            for (double v : x) r2 += v * v;
            if (r2 < 36) continue;
            double q = 0;
            for (int c = 0; c < nd; ++c) q += dt.at(i, c) * dt.at(i, c);
            m = std::max(m, std::sqrt(q));
        }
        return m;
    };
    r.trace.far_field_initial = far(dt0);
    for (const Field& dt : w.w) r.trace.far_field_final = std::max(r.trace.far_field_final, far(dt));
    for (Field& dt : w.w) {
        for (std::size_t i = 0; i < dt.grid.node_count(); ++i)
            for (int c = 0; c < nd; ++c) dt.at(i, c) += dc[c];
        r.second.push_back(std::move(dt));
    }
    finish_flags(r.trace, cfg, n);
    return r;
}

PicardResult picard_solve(const Field& u0, const Field& second, const PicardConfig& cfg) {
    switch (cfg.system) {
        case SystemKind::Nse: return picard_nse(u0, cfg);
        case SystemKind::Mhd: return picard_mhd(u0, second, cfg);
        case SystemKind::FmMhd: return picard_fm_mhd(u0, second, cfg);
        case SystemKind::NlcfN:
        case SystemKind::NlcfD: return picard_nlcf(u0, second, cfg);
    }
    throw DomainError("unknown system");
}

Field solenoidal_bump(const TensorGrid& g, double amplitude, const WeightedNormSpec& spec, double shift, double width) {
    if (!(width > 0)) throw DomainError("bump width must be positive");
    Field u = sample(g, 2, [shift, width](const Vec& x) {
        double a = x[0] - shift, b = x[1] - 1.2;
        double e = std::exp(-(a * a + b * b) / width);
        double d1 = x[1] * x[1] * e * (-2 * a / width);
        double d2 = (2 * x[1] - x[1] * x[1] * 2 * b / width) * e;
        return Vec{d2, -d1};
    });
    if (amplitude == 0) return Field(g, 2);
    u *= amplitude / weighted_norm(u, spec);
    return u;
}

Field director_bump(const TensorGrid& g, double amplitude, const WeightedNormSpec& spec) {
    const double s = 0.5;
    auto theta = [s](const Vec& x) {
        double b = x[1] - 1.0;
        return x[1] * x[1] * std::exp(-(x[0] * x[0] + b * b) / s);
    };
    // |grad d| = |grad theta| for d = (sin theta, cos theta), so the scale is linear in eps.
    Field gt = sample(g, 2, [&](const Vec& x) {
        double th = theta(x), b = x[1] - 1.0;
        return Vec{th * (-2 * x[0] / s), 2 * x[1] * std::exp(-(x[0] * x[0] + b * b) / s) + th * (-2 * b / s)};
    });
    double base = weighted_norm(gt, spec);
    double eps = base > 0 ? amplitude / base : 0.0;
    return sample(g, 2, [&](const Vec& x) {
        double th = eps * theta(x);
        return Vec{std::sin(th), std::cos(th)};
    });
}

}  // namespace halfspace
