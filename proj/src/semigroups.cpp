#include "halfspace/semigroups.hpp"

#include <algorithm>
#include <cmath>

#include "halfspace/errors.hpp"
#include "halfspace/kernels.hpp"
#include "halfspace/parallel.hpp"
#include "halfspace/quadrature.hpp"
#include "halfspace/spectral.hpp"

namespace halfspace {

DuhamelSchedule DuhamelSchedule::graded(double t, int M) { return nested({0.0}, t, M); }

DuhamelSchedule DuhamelSchedule::nested(const std::vector<double>& history_times, double t, int M) {
    if (!(t > 0)) throw DomainError("schedule needs t > 0");
    if (M < 1) throw DomainError("schedule needs at least one node");
    DuhamelSchedule s;
    s.t = t;
    s.order = M;
    s.breaks.push_back(0.0);
    for (double h : history_times)
        if (h > s.breaks.back() && h < t * (1 - 1e-12)) s.breaks.push_back(h);
    int m = std::max(4, M / 2);
    for (std::size_t j = 0; j + 1 < s.breaks.size(); ++j) {
        Rule1D r = gauss_legendre(m, s.breaks[j], s.breaks[j + 1]);
        s.nodes.insert(s.nodes.end(), r.nodes.begin(), r.nodes.end());
        s.weights.insert(s.weights.end(), r.weights.begin(), r.weights.end());
    }
    Rule1D r = gauss_legendre(M, 0.0, std::sqrt(t - s.breaks.back()));
    // tau ascending gives s descending; store s ascending.
    for (int q = M - 1; q >= 0; --q) {
        double tau = r.nodes[q];
        s.nodes.push_back(t - tau * tau);
        s.weights.push_back(2 * tau * r.weights[q]);
    }
    return s;
}

DuhamelSchedule DuhamelSchedule::coarsened() const {
    std::vector<double> h(breaks.begin() + 1, breaks.end());
    return nested(h, t, std::max(1, order / 2));
}

Field TimeHistory::at(double s) const {
    if (values.empty()) throw DomainError("empty history");
    if (values.size() == 1 || s <= times.front()) return values.front();
    if (s >= times.back()) return values.back();
    auto it = std::upper_bound(times.begin(), times.end(), s);
    std::size_t j = std::size_t(it - times.begin());
    double t0 = times[j - 1], t1 = times[j];
    double w = (s - t0) / (t1 - t0);
    Field f = values[j - 1];
    const Field& g = values[j];
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = (1 - w) * f.values[i] + w * g.values[i];
    return f;
}

TimeHistory TimeHistory::constant(const Field& f) {
    TimeHistory h;
    h.times = {0.0};
    h.values = {f};
    return h;
}

namespace {

void require2d(const Field& f) {
    if (f.grid.n != 2) throw DomainError("semigroups are implemented for n = 2");
    if (!f.all_finite()) throw DomainError("field has non-finite values");
}

// out = M * spectrum (+ tail column times the value at H), column m for mode m, then times exp(-t xi^2).
std::vector<cplx> apply_normal(const Spectral2D& sp, const Eigen::MatrixXd& M, const std::vector<cplx>& in, double t,
                               const Eigen::MatrixXd* tail = nullptr) {
    int nn = sp.nn(), modes = sp.modes();
    Eigen::MatrixXd xr(nn, modes), xi(nn, modes);
    for (int m = 0; m < modes; ++m)
        for (int k = 0; k < nn; ++k) {
            xr(k, m) = in[std::size_t(m) * nn + k].real();
            xi(k, m) = in[std::size_t(m) * nn + k].imag();
        }
    Eigen::MatrixXd re = M * xr, im = M * xi;
    std::vector<cplx> out(std::size_t(nn) * modes);
    for (int m = 0; m < modes; ++m) {
        double e = std::exp(-t * sp.xi(m) * sp.xi(m));
        cplx top = in[std::size_t(m) * nn + nn - 1];
        for (int k = 0; k < nn; ++k) {
            cplx v(re(k, m), im(k, m));
            if (tail) v += (*tail)(k, m) * top;
            out[std::size_t(m) * nn + k] = e * v;
        }
    }
    return out;
}

void check_solenoidal(const Field& u, double tol, const char* who) {
    if (u.components != 2) throw DomainError(std::string(who) + " needs a 2-component field");
    SolenoidalResidual r = solenoidal_residual(u);
    if (r.divergence > tol) throw PreconditionError(std::string(who) + ": input is not divergence free", r.divergence);
    if (r.normal_trace > tol)
        throw PreconditionError(std::string(who) + ": input has a nonzero normal trace", r.normal_trace);
}

}  // namespace

Field stokes_semigroup_unchecked(const Field& u0, double t) {
    require2d(u0);
    if (!(t > 0)) throw DomainError("stokes_semigroup requires t > 0");
    auto sp = Spectral2D::for_grid(u0.grid);
    auto hm = sp->heat_matrices(t);
    auto s = to_spectral(*sp, u0);
    Eigen::MatrixXd MD = hm->M0 - hm->MR, TD = hm->T0 - hm->TR;
    std::vector<std::vector<cplx>> out(2);
    out[0] = apply_normal(*sp, MD, s[0], t, &TD);
    out[1] = apply_normal(*sp, MD, s[1], t, &TD);
    // Mirrored tangential data drives the boundary-layer part.
    std::vector<cplx> w = apply_normal(*sp, hm->MR, s[0], t, &hm->TR);
    int nn = sp->nn();
    std::vector<cplx> I(nn);
    for (int m = 1; m < sp->modes(); ++m) {
        if (sp->is_nyquist(m)) continue;
        double xi = sp->xi(m);
        sp->exp_forward(m, &w[std::size_t(m) * nn], I.data());
        for (int k = 0; k < nn; ++k) {
            out[0][std::size_t(m) * nn + k] += 2.0 * xi * I[k];
            out[1][std::size_t(m) * nn + k] += cplx(0, 2.0 * xi) * I[k];
        }
    }
    return from_spectral(*sp, u0.grid, out);
}

Field stokes_semigroup(const Field& u0, double t, double tol) {
    require2d(u0);
    check_solenoidal(u0, tol, "stokes_semigroup");
    return stokes_semigroup_unchecked(u0, t);
}

Field heat_semigroup(const Field& f, double t, HeatBc bc) {
    require2d(f);
    if (!(t > 0)) throw DomainError("heat_semigroup requires t > 0");
    if (bc == HeatBc::Mixed && f.components != f.grid.n) throw DomainError("mixed condition needs n components");
    auto sp = Spectral2D::for_grid(f.grid);
    auto hm = sp->heat_matrices(t);
    Eigen::MatrixXd MN = hm->M0 + hm->MR, MD = hm->M0 - hm->MR;
    auto s = to_spectral(*sp, f);
    for (int c = 0; c < f.components; ++c) {
        bool dirichlet = bc == HeatBc::Dirichlet || (bc == HeatBc::Mixed && c == f.grid.n - 1);
        s[c] = apply_normal(*sp, dirichlet ? MD : MN, s[c], t);
    }
    return from_spectral(*sp, f.grid, s);
}

Field mixed_star_semigroup(const Field& b0, double t, double tol) {
    require2d(b0);
    check_solenoidal(b0, tol, "mixed_star_semigroup");
    return heat_semigroup(b0, t, HeatBc::Mixed);
}

Field grad_heat_of_data(const Field& f0, double t, HeatBc bc, double trace_tol) {
    require2d(f0);
    if (bc == HeatBc::Mixed) throw DomainError("grad_heat_of_data takes N or D");
    if (!(t > 0)) throw DomainError("grad_heat_of_data requires t > 0");
    const TensorGrid& g = f0.grid;
    int n = g.n, nn = g.normal_count();
    TraceField tr = boundary_trace(f0);
    if (bc == HeatBc::Dirichlet) {
        double scale = std::max(f0.max_abs(), 1e-300);
        if (tr.max_abs() > trace_tol * scale)
            throw PreconditionError("grad_heat_of_data: Dirichlet data violates the compatibility condition",
                                    tr.max_abs());
    }
    Field grad = gradient(f0, DiffScheme::HighOrder);
    Field out(g, f0.components * n);
    for (int c = 0; c < f0.components; ++c) {
        for (int j = 0; j < n; ++j) {
            Field dj(g, 1);
            dj.set_component(0, grad.component(c * n + j));
            bool tangential = j < n - 1;
            // Neumann: N for tangential, D for normal. Dirichlet: the other way round.
            HeatBc use = (bc == HeatBc::Neumann) == tangential ? HeatBc::Neumann : HeatBc::Dirichlet;
            Field h = heat_semigroup(dj, t, use);
            out.set_component(c * n + j, h.component(0));
        }
        if (bc == HeatBc::Dirichlet) {
            // 2 Gamma_1(x_n, t) times the tangential heat flow of the trace.
            auto sp = Spectral2D::for_grid(g);
            std::vector<double> col(g.node_count(), 0.0);
            for (std::size_t p = 0; p < tr.points; ++p)
                for (int k = 0; k < nn; ++k) col[p * nn + k] = tr.values[p * tr.components + c];
            std::vector<cplx> s(std::size_t(sp->modes()) * nn);
            sp->forward(col.data(), s.data());
            for (int m = 0; m < sp->modes(); ++m) {
                double e = std::exp(-t * sp->xi(m) * sp->xi(m));
                for (int k = 0; k < nn; ++k) s[std::size_t(m) * nn + k] *= e * 2 * heat_kernel_1d(k * g.normal_spacing(), t);
            }
            sp->inverse(s.data(), col.data());
            for (std::size_t i = 0; i < g.node_count(); ++i) out.at(i, c * n + n - 1) += col[i];
        }
    }
    return out;
}

Field divergence_form(const Field& F) {
    int n = F.grid.n;
    if (F.components != n * n) throw DomainError("tensor field needs n*n components");
    Field out(F.grid, n);
    for (int k = 0; k < n; ++k) {
        Field row(F.grid, n);
        for (int j = 0; j < n; ++j) row.set_component(j, F.component(k * n + j));
        Field g = gradient(row, DiffScheme::HighOrder);
        for (int j = 0; j < n; ++j) {
            std::vector<double> d = g.component(j * n + k);
            for (std::size_t i = 0; i < d.size(); ++i) out.at(i, j) += d[i];
        }
    }
    return out;
}

namespace {

template <class Apply>
Field schedule_sum(const TimeHistory& g, const DuhamelSchedule& sched, Apply apply) {
    if (g.values.empty()) throw DomainError("empty history");
    std::size_t M = sched.nodes.size();
    std::vector<Field> parts(M);
    parallel_for(M, [&](std::size_t q) {
        Field gs = g.at(sched.nodes[q]);
        parts[q] = apply(gs, sched.t - sched.nodes[q]);
        parts[q] *= sched.weights[q];
    });
    Field sum = parts[0];
    for (std::size_t q = 1; q < M; ++q) sum += parts[q];
    return sum;
}

void coarse_check(const Field& fine, const Field& coarse, double tol, Diagnostics* diag, const char* who) {
    double scale = fine.max_abs();
    Field d = fine - coarse;
    double err = d.max_abs();
    if (scale > 0 && err > tol * scale)
        diag->warnings.push_back(std::string(who) + ": schedule error estimate " + format_double(err / scale) +
                                 " above tolerance");
}

}  // namespace

Field duhamel_stokes_projected(const TimeHistory& g, double t, const DuhamelSchedule& sched) {
    if (std::abs(sched.t - t) > 1e-14 * std::max(1.0, t)) throw DomainError("schedule built for another time");
    return schedule_sum(g, sched, [](const Field& f, double lag) { return stokes_semigroup_unchecked(f, lag); });
}

Field duhamel_stokes(const TimeHistory& F, double t, const DuhamelSchedule& sched, Diagnostics* diag,
                     double warn_tol) {
    TimeHistory g;
    g.times = F.times;
    for (const Field& f : F.values) g.values.push_back(leray_project(divergence_form(f)));
    Field out = duhamel_stokes_projected(g, t, sched);
    if (diag) {
        coarse_check(out, duhamel_stokes_projected(g, t, sched.coarsened()), warn_tol, diag, "duhamel_stokes");
    }
    return out;
}

Field duhamel_heat(const TimeHistory& g, double t, HeatBc bc, const DuhamelSchedule& sched, Diagnostics* diag,
                   double warn_tol) {
    if (std::abs(sched.t - t) > 1e-14 * std::max(1.0, t)) throw DomainError("schedule built for another time");
    auto apply = [bc](const Field& f, double lag) { return heat_semigroup(f, lag, bc); };
    Field out = schedule_sum(g, sched, apply);
    if (diag) {
        coarse_check(out, schedule_sum(g, sched.coarsened(), apply), warn_tol, diag, "duhamel_heat");
    }
    return out;
}

}  // namespace halfspace
