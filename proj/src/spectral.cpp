#include "halfspace/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include <fftw3.h>

#include "halfspace/errors.hpp"
#include "halfspace/green_tensor.hpp"
#include "halfspace/quadrature.hpp"

namespace halfspace {

namespace {

constexpr int kInterpNodes = 8;  // degree-7 local interpolant per cell
constexpr int kCellRule = 16;    // Gauss-Legendre points per (sub)cell

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Lagrange basis on nodes (j - o), j = 0..7, evaluated at s (unit spacing).
void lagrange_basis(int o, double s, double* out) {
    for (int j = 0; j < kInterpNodes; ++j) {
        double v = 1.0;
        for (int i = 0; i < kInterpNodes; ++i)
            if (i != j) v *= (s - (i - o)) / double(j - i);
        out[j] = v;
    }
}

int cell_start(int c, int nn) { return std::clamp(c - 3, 0, nn - kInterpNodes); }

// int_0^inf Gamma_1(d + r, t) e^{-lam r} dr = e^{lam^2 t + lam d} erfc((d + 2 lam t) / (2 sqrt t)) / 2.
double exp_tail_integral(double d, double lam, double t) {
    double sq = std::sqrt(t);
    double z = (d + 2 * lam * t) / (2 * sq);
    if (z < 5) return 0.5 * std::exp(lam * lam * t + lam * d) * std::erfc(z);
    // exp(a) erfc(z) = exp(a - z^2) erfcx(z); asymptotic series for erfcx.
    double a = -d * d / (4 * t);
    double iz2 = 1 / (z * z);
    double erfcx = (1 - 0.5 * iz2 + 0.75 * iz2 * iz2 - 1.875 * iz2 * iz2 * iz2) / (z * std::sqrt(std::numbers::pi));
    return 0.5 * std::exp(a) * erfcx;
}

}  // namespace

struct Spectral2D::Impl {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    // Exponential moment weights: [m][o][j].
    std::vector<std::array<std::array<double, kInterpNodes>, 7>> wf, wb;
    std::vector<double> decay;  // e^{-lambda h}
    mutable std::mutex cache_mutex;
    mutable std::map<double, std::shared_ptr<const HeatMatrices>> heat_cache;
    std::size_t cache_cap = 64;
};

Spectral2D::Spectral2D(const TensorGrid& g) : impl_(std::make_unique<Impl>()) {
    g.validate();
    if (g.n != 2) throw DomainError("spectral operators are implemented for n = 2");
    n1_ = g.counts[0];
    nn_ = g.counts[1];
    modes_ = n1_ / 2 + 1;
    h1_ = g.tangential_spacing();
    hn_ = g.normal_spacing();
    xi_.resize(modes_);
    for (int m = 0; m < modes_; ++m) xi_[m] = std::numbers::pi * m / g.L;

    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        std::vector<double> rin(std::size_t(n1_) * nn_);
        std::vector<cplx> cout_(std::size_t(modes_) * nn_);
        int len[1] = {n1_};
        auto* cbuf = reinterpret_cast<fftw_complex*>(cout_.data());
        impl_->r2c = fftw_plan_many_dft_r2c(1, len, nn_, rin.data(), nullptr, nn_, 1, cbuf, nullptr, nn_, 1,
                                            FFTW_ESTIMATE | FFTW_UNALIGNED);
        impl_->c2r = fftw_plan_many_dft_c2r(1, len, nn_, cbuf, nullptr, nn_, 1, rin.data(), nullptr, nn_, 1,
                                            FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!impl_->r2c || !impl_->c2r) throw SolverError("FFTW planning failed");
    }

    // Exponential moments on one cell [0, h] for every offset o.
    impl_->wf.resize(modes_);
    impl_->wb.resize(modes_);
    impl_->decay.resize(modes_);
    const Rule1D& gl = gauss_legendre(kCellRule);
    double basis[kInterpNodes];
    for (int m = 0; m < modes_; ++m) {
        double lam = xi_[m];
        impl_->decay[m] = std::exp(-lam * hn_);
        int nsub = std::max(1, int(std::ceil(lam * hn_ / 3.0)));
        for (int o = 0; o < 7; ++o) {
            auto& f = impl_->wf[m][o];
            auto& b = impl_->wb[m][o];
            f.fill(0);
            b.fill(0);
            for (int sub = 0; sub < nsub; ++sub) {
                double a0 = double(sub) / nsub, a1 = double(sub + 1) / nsub;
                for (std::size_t q = 0; q < gl.size(); ++q) {
                    double s = 0.5 * (a0 + a1) + 0.5 * (a1 - a0) * gl.nodes[q];
                    double w = 0.5 * (a1 - a0) * gl.weights[q] * hn_;
                    lagrange_basis(o, s, basis);
                    double ef = std::exp(-lam * hn_ * (1 - s)), eb = std::exp(-lam * hn_ * s);
                    for (int j = 0; j < kInterpNodes; ++j) {
                        f[j] += w * ef * basis[j];
                        b[j] += w * eb * basis[j];
                    }
                }
            }
        }
    }

    // Derivative stencils at nodes.
    stencil_ = std::min(9, nn_);
    dstencil_.resize(nn_);
    dstart_.resize(nn_);
    for (int k = 0; k < nn_; ++k) {
        int start = std::clamp(k - stencil_ / 2, 0, nn_ - stencil_);
        dstart_[k] = start;
        double s = k - start;
        std::vector<double> w(stencil_, 0.0);
        for (int j = 0; j < stencil_; ++j) {
            double sum = 0;
            for (int mm = 0; mm < stencil_; ++mm) {
                if (mm == j) continue;
                double p = 1.0 / (j - mm);
                for (int i = 0; i < stencil_; ++i)
                    if (i != j && i != mm) p *= (s - i) / double(j - i);
                sum += p;
            }
            w[j] = sum;
        }
        dstencil_[k] = std::move(w);
    }
    std::size_t bytes = 2 * std::size_t(nn_) * nn_ * sizeof(double);
    impl_->cache_cap = std::max<std::size_t>(16, (std::size_t(256) << 20) / bytes);
}

Spectral2D::~Spectral2D() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    if (impl_->r2c) fftw_destroy_plan(impl_->r2c);
    if (impl_->c2r) fftw_destroy_plan(impl_->c2r);
}

std::shared_ptr<const Spectral2D> Spectral2D::for_grid(const TensorGrid& g) {
    static std::mutex mutex;
    static std::map<std::tuple<double, double, int, int>, std::shared_ptr<const Spectral2D>> registry;
    auto key = std::make_tuple(g.L, g.H, g.counts.at(0), g.counts.back());
    std::lock_guard<std::mutex> lock(mutex);
    auto it = registry.find(key);
    if (it != registry.end()) return it->second;
    if (registry.size() > 8) registry.clear();
    auto sp = std::make_shared<const Spectral2D>(g);
    registry.emplace(key, sp);
    return sp;
}

void Spectral2D::forward(const double* in, cplx* out) const {
    fftw_execute_dft_r2c(impl_->r2c, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void Spectral2D::inverse(const cplx* in, double* out) const {
    std::vector<cplx> tmp(in, in + std::size_t(modes_) * nn_);
    fftw_execute_dft_c2r(impl_->c2r, reinterpret_cast<fftw_complex*>(tmp.data()), out);
    double s = 1.0 / n1_;
    for (std::size_t i = 0; i < std::size_t(n1_) * nn_; ++i) out[i] *= s;
}

void Spectral2D::exp_forward(int m, const cplx* f, cplx* out) const {
    double e = impl_->decay[m];
    out[0] = 0;
    cplx acc = 0;
    for (int c = 0; c + 1 < nn_; ++c) {
        int start = cell_start(c, nn_), o = c - start;
        const auto& w = impl_->wf[m][o];
        cplx s = 0;
        for (int j = 0; j < kInterpNodes; ++j) s += w[j] * f[start + j];
        acc = e * acc + s;
        out[c + 1] = acc;
    }
}

void Spectral2D::exp_backward(int m, const cplx* f, cplx* out) const {
    double e = impl_->decay[m];
    cplx acc = xi_[m] > 0 ? f[nn_ - 1] / (2 * xi_[m]) : cplx(0);
    out[nn_ - 1] = acc;
    for (int c = nn_ - 2; c >= 0; --c) {
        int start = cell_start(c, nn_), o = c - start;
        const auto& w = impl_->wb[m][o];
        cplx s = 0;
        for (int j = 0; j < kInterpNodes; ++j) s += w[j] * f[start + j];
        acc = e * acc + s;
        out[c] = acc;
    }
}

std::shared_ptr<const HeatMatrices> Spectral2D::heat_matrices(double t) const {
    if (!(t > 0)) throw DomainError("heat operator requires t > 0");
    {
        std::lock_guard<std::mutex> lock(impl_->cache_mutex);
        auto it = impl_->heat_cache.find(t);
        if (it != impl_->heat_cache.end()) return it->second;
    }
    auto hm = std::make_shared<HeatMatrices>();
    hm->M0 = Eigen::MatrixXd::Zero(nn_, nn_);
    hm->MR = Eigen::MatrixXd::Zero(nn_, nn_);
    double R = gaussian_radius(t, 1e-16);
    double sq = std::sqrt(t);
    int nsub = std::clamp(int(std::ceil(hn_ / (0.5 * sq))), 1, 1024);
    const Rule1D& gl = gauss_legendre(kCellRule);
    // Basis tables per offset on the sub-cell points.
    int npts = nsub * int(gl.size());
    std::vector<double> s_loc(npts), w_loc(npts);
    for (int sub = 0; sub < nsub; ++sub)
        for (std::size_t q = 0; q < gl.size(); ++q) {
            double a0 = double(sub) / nsub, a1 = double(sub + 1) / nsub;
            s_loc[sub * gl.size() + q] = 0.5 * (a0 + a1) + 0.5 * (a1 - a0) * gl.nodes[q];
            w_loc[sub * gl.size() + q] = 0.5 * (a1 - a0) * gl.weights[q] * hn_;
        }
    std::vector<double> table(7 * std::size_t(npts) * kInterpNodes);
    for (int o = 0; o < 7; ++o)
        for (int p = 0; p < npts; ++p) lagrange_basis(o, s_loc[p], &table[(o * std::size_t(npts) + p) * kInterpNodes]);
    std::vector<double> g0(npts), gr(npts);
    for (int c = 0; c + 1 < nn_; ++c) {
        int start = cell_start(c, nn_), o = c - start;
        double a = c * hn_, b = (c + 1) * hn_;
        const double* tb = &table[o * std::size_t(npts) * kInterpNodes];
        for (int k = 0; k < nn_; ++k) {
            double x = k * hn_;
            double dmin = std::max({0.0, a - x, x - b});
            bool direct = dmin <= R;
            bool image = x + a <= R;
            if (!direct && !image) continue;
            for (int p = 0; p < npts; ++p) {
                double s = a + s_loc[p] * hn_;
                g0[p] = direct ? w_loc[p] * heat_kernel_1d(x - s, t) : 0.0;
                gr[p] = image ? w_loc[p] * heat_kernel_1d(x + s, t) : 0.0;
            }
            for (int j = 0; j < kInterpNodes; ++j) {
                double s0 = 0, sr = 0;
                for (int p = 0; p < npts; ++p) {
                    double bj = tb[std::size_t(p) * kInterpNodes + j];
                    s0 += g0[p] * bj;
                    sr += gr[p] * bj;
                }
                hm->M0(k, start + j) += s0;
                hm->MR(k, start + j) += sr;
            }
        }
    }
    hm->T0 = Eigen::MatrixXd::Zero(nn_, modes_);
    hm->TR = Eigen::MatrixXd::Zero(nn_, modes_);
    double H = (nn_ - 1) * hn_;
    for (int m = 1; m < modes_; ++m) {
        if (is_nyquist(m)) continue;
        for (int k = 0; k < nn_; ++k) {
            double x = k * hn_;
            hm->T0(k, m) = exp_tail_integral(H - x, xi_[m], t);
            hm->TR(k, m) = exp_tail_integral(H + x, xi_[m], t);
        }
    }
    std::lock_guard<std::mutex> lock(impl_->cache_mutex);
    if (impl_->heat_cache.size() >= impl_->cache_cap) impl_->heat_cache.clear();
    auto [it, inserted] = impl_->heat_cache.emplace(t, hm);
    return it->second;
}

std::vector<std::vector<cplx>> to_spectral(const Spectral2D& sp, const Field& f) {
    std::size_t nodes = f.grid.node_count();
    std::vector<std::vector<cplx>> out(f.components);
    std::vector<double> comp(nodes);
    for (int c = 0; c < f.components; ++c) {
        for (std::size_t i = 0; i < nodes; ++i) comp[i] = f.values[i * f.components + c];
        out[c].resize(std::size_t(sp.modes()) * sp.nn());
        sp.forward(comp.data(), out[c].data());
    }
    return out;
}

Field from_spectral(const Spectral2D& sp, const TensorGrid& g, const std::vector<std::vector<cplx>>& spec) {
    Field f(g, int(spec.size()));
    std::size_t nodes = g.node_count();
    std::vector<double> comp(nodes);
    for (std::size_t c = 0; c < spec.size(); ++c) {
        sp.inverse(spec[c].data(), comp.data());
        for (std::size_t i = 0; i < nodes; ++i) f.values[i * spec.size() + c] = comp[i];
    }
    return f;
}

}  // namespace halfspace
