#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "halfspace/fields.hpp"

namespace halfspace {

using cplx = std::complex<double>;

/// Normal-direction heat operators for one t: rows are output nodes.
/// M0 integrates Gamma_1(x_k - s, t), MR integrates Gamma_1(x_k + s, t), both against the
/// piecewise degree-7 interpolant of the data on [0, H]. Neumann = M0 + MR, Dirichlet = M0 - MR.
/// T0 and TR (Nn x modes) carry the data beyond H, modelled per mode as the harmonic tail
/// f(H) e^{-|xi|(s-H)}; column m holds the integrals of Gamma_1(x_k -+ s, t) e^{-|xi_m|(s-H)}
/// over s > H (zero for the xi = 0 and Nyquist modes).
struct HeatMatrices {
    Eigen::MatrixXd M0, MR;
    Eigen::MatrixXd T0, TR;
};

/// Spectral machinery for one n = 2 grid. Tangential real FFT (FFTW) plus exact
/// exponential and Gaussian moments of local polynomial interpolants in x_n.
/// Immutable apart from an internal cache guarded by a mutex; safe to share.
class Spectral2D {
public:
    /// Shared instance for the grid (cached by grid parameters).
    static std::shared_ptr<const Spectral2D> for_grid(const TensorGrid& g);

    explicit Spectral2D(const TensorGrid& g);
    ~Spectral2D();
    Spectral2D(const Spectral2D&) = delete;
    Spectral2D& operator=(const Spectral2D&) = delete;

    int n1() const { return n1_; }
    int nn() const { return nn_; }
    int modes() const { return modes_; }
    double xi(int m) const { return xi_[m]; }
    /// True for the Nyquist mode, which the derivative-type operators drop.
    bool is_nyquist(int m) const { return n1_ % 2 == 0 && m == n1_ / 2; }

    /// Forward transform along x1 of node-major real data (stride 1, layout i*Nn + k)
    /// into column-major spectra out[m*Nn + k].
    void forward(const double* in, cplx* out) const;
    /// Inverse transform including the 1/N1 factor.
    void inverse(const cplx* in, double* out) const;

    /// A(x_k) = int_0^{x_k} e^{-lambda (x_k - s)} f(s) ds, lambda = |xi_m|.
    void exp_forward(int m, const cplx* f, cplx* out) const;
    /// B(x_k) = int_{x_k}^{inf} e^{-lambda (s - x_k)} f(s) ds, with f continued past H by its
    /// harmonic tail f(H) e^{-lambda (s - H)}.
    void exp_backward(int m, const cplx* f, cplx* out) const;

    /// High-order d/dx_n at every normal node; works on a single column.
    template <class T>
    void normal_derivative(const T* f, T* out) const {
        for (int k = 0; k < nn_; ++k) {
            T s{};
            const auto& w = dstencil_[k];
            for (int j = 0; j < stencil_; ++j) s += w[j] * f[dstart_[k] + j];
            out[k] = s / hn_;
        }
    }

    /// Heat matrices for time t > 0 (cached).
    std::shared_ptr<const HeatMatrices> heat_matrices(double t) const;

private:
    struct Impl;
    int n1_, nn_, modes_, stencil_;
    double h1_, hn_;
    std::vector<double> xi_;
    std::vector<std::vector<double>> dstencil_;
    std::vector<int> dstart_;
    std::unique_ptr<Impl> impl_;
};

/// Spectra of all components of a field: spec[c][m*Nn + k].
std::vector<std::vector<cplx>> to_spectral(const Spectral2D& sp, const Field& f);
/// Back to a field on grid g.
Field from_spectral(const Spectral2D& sp, const TensorGrid& g, const std::vector<std::vector<cplx>>& spec);

}  // namespace halfspace
