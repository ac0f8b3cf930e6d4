#pragma once

#include "qdnls/grid.hpp"

#include <cmath>
#include <complex>

namespace qdnls::test {

inline Field2D gaussian(const Grid2D& g, double sigma2 = 1.0, double amp = 1.0) {
    return make_field(g, [sigma2, amp](double x1, double x2) {
        return cplx(amp * std::exp(-(x1 * x1 + x2 * x2) / (2.0 * sigma2)), 0.0);
    });
}

/// Closed form of U_m(t) applied to amp*exp(-|x|^2/(2 sigma^2)).
inline Field2D gaussian_free(const Grid2D& g, double m, double t, double sigma2 = 1.0,
                             double amp = 1.0) {
    const cplx a = cplx(sigma2, 0.0) + cplx(0.0, t / m);
    return make_field(g, [a, sigma2, amp](double x1, double x2) {
        return amp * sigma2 / a * std::exp(-(x1 * x1 + x2 * x2) / (2.0 * a));
    });
}

inline double sup_diff(const Field2D& a, const Field2D& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i)
        m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

} // namespace qdnls::test
