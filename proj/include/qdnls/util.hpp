#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace qdnls {

using cplx = std::complex<double>;
using Rng = std::mt19937_64;

inline Eigen::VectorXcd random_complex_vector(Rng& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
    return v;
}

inline Eigen::VectorXcd random_unit_complex_vector(Rng& rng, int n) {
    Eigen::VectorXcd v = random_complex_vector(rng, n);
    double nn = v.norm();
    return nn > 0 ? Eigen::VectorXcd(v / nn) : v;
}

inline Eigen::Vector2d random_unit_xi(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    double a = u(rng);
    return {std::cos(a), std::sin(a)};
}

inline Eigen::MatrixXcd random_hermitian(Rng& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd H(n, n);
    for (int i = 0; i < n; ++i) {
        H(i, i) = cplx(g(rng), 0.0);
        for (int j = i + 1; j < n; ++j) {
            cplx z(g(rng), g(rng));
            H(i, j) = z;
            H(j, i) = std::conj(z);
        }
    }
    return H;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
}

} // namespace qdnls
