#pragma once

#include "qdnls/grid.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace qdnls {

/// Scaled Fourier transform (F_m phi)(xi) = -i m phihat(m xi). Input must be
/// physical; the result lives on the dual grid rescaled by 1/m (xi_scale).
Field2D scaled_fourier(double m, const Field2D& f);
Field2D scaled_fourier_inverse(double m, const Field2D& f);

/// (M_m(t) phi)(x) = e^{i m |x|^2 / (2t)} phi(x), t != 0.
Field2D modulate(double m, double t, const Field2D& f);

struct DilateResult {
    Field2D field;
    bool exact = false;               // index rescaling was exact
    double interp_error_bound = 0.0;  // bilinear bound when not exact
};

/// (D(t) phi)(x) = (1/t) phi(x/t), t > 0. Exact index rescaling when 1/t is
/// a positive integer; otherwise bilinear interpolation with a reported
/// error bound. Samples falling outside the box are treated as zero.
DilateResult dilate(double t, const Field2D& f);

/// Free evolution U_m(t) = e^{i t Delta / (2m)}: frequency multiplier
/// e^{-i t |k|^2 / (2m)}. Exact inverse is free_propagate(m, -t, .).
Field2D free_propagate(double m, double t, const Field2D& f);

/// W_m(t) = F_m M_m(t) F_m^{-1}, realized as the Fourier multiplier
/// e^{+i |y|^2 / (2 m t)} in the variable dual to the field's own grid.
Field2D wave_op(double m, double t, const Field2D& f, bool inverse = false);

/// J_{m,a}(t) = x_a + (i t / m) d_a with a spectral derivative; exact at
/// t = 0 and well conditioned for small t.
Field2D apply_J(double m, double t, int axis, const Field2D& f);

/// Gauge form (i t / m) e^{i m theta} d_a (e^{-i m theta} f) with
/// theta = |x|^2/(2t). Valid on the grid only while the chirp m|x|/t stays
/// below the Nyquist frequency; kept as a validated identity of apply_J.
Field2D apply_J_gauge(double m, double t, int axis, const Field2D& f);

/// Axis Hilbert transform: frequency multiplier -i sign(k_axis); the zero
/// frequency along the axis maps to 0.
Field2D hilbert(int axis, const Field2D& f);

/// S_{+/-}(t;kappa) = S_{+/-,1} S_{+/-,2} with
/// S_{+/-,a} phi = cosh(kappa Theta_a) phi -/+ i sinh(kappa Theta_a) H_a phi,
/// Theta_a = arctan(x_a / <t>). sign must be +1 or -1; kappa in (0, 1].
Field2D smoothing_S(int sign, double t, double kappa, const Field2D& f);
Field2D smoothing_S_axis(int sign, int axis, double t, double kappa, const Field2D& f);

/// Weight w_a(t,x) = (1 + x_a^2/(1+t^2))^{-1/2} as a multiplier field.
Field2D weight_w(const Grid2D& g, int axis, double t);

/// Spectral partial derivative along axis (1 or 2) of a physical field.
Field2D spectral_derivative(const Field2D& f, int axis);

/// Spectral derivative of data sampled on a centered uniform grid with the
/// given spacing (used for xi-derivatives of A-type arrays).
std::vector<cplx> uniform_spectral_derivative(const std::vector<cplx>& v, std::size_t n,
                                              double spacing, int axis);

/// Zero all modes with |signed index| > n/3 along either axis (2/3 rule).
void dealias_23(Field2D& freq);

/// Exact semidiscrete evaluation of (F_m f)(xi) = -i m (h^2/2pi)
/// sum_x e^{-i m xi . x} f(x) at arbitrary points; the serial per-point sum
/// is the reference the FFT path is tested against.
cplx sample_scaled_fourier(double m, const Field2D& f, const Eigen::Vector2d& xi);
std::vector<cplx> sample_scaled_fourier_many(double m, const Field2D& f,
                                             const std::vector<Eigen::Vector2d>& xis);

/// Randomized estimate of the L2 operator norm of S_{+/-}(t;kappa) on a box
/// scaled with <t> (side L0 <t>), which probes the operator at its own
/// dilation scale; max of ||Sf||/||f|| over n_samples random fields.
double estimate_smoothing_norm(int sign, double t, double kappa, double L0, std::size_t n,
                               int n_samples, std::uint64_t seed);

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool less_is_pass = true; // pass iff measured <= tolerance
    bool pass = false;
};

struct SelfTestReport {
    std::vector<CheckResult> checks;
    bool all_pass = false;
    std::string to_text() const;
};

/// Runs the operator identity suite (Leibniz rule for J, the F_m U_m^{-1}
/// commutation identity, the U_m factorization, Gaussian free-evolution and
/// F_m oracles, W_m decay slope, Hilbert/smoothing/weight checks) on Gaussian
/// and modulated-Gaussian test fields.
SelfTestReport operator_selftest(const Grid2D& g);

} // namespace qdnls
