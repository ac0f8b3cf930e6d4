#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace qdnls {

using cplx = std::complex<double>;

/// Uniform periodic box [-L/2, L/2)^2 with n points per axis (power of two).
/// Physical nodes x_i = (i - n/2) h, h = L/n; dual nodes kappa_k =
/// (k - n/2) * 2*pi/L stored in centered order (slot k <-> signed k - n/2).
struct Grid2D {
    std::size_t n = 0;
    double L = 0.0;

    Grid2D() = default;
    Grid2D(std::size_t n_, double L_);

    double h() const { return L / double(n); }
    double dk() const;
    double x(std::size_t i) const { return (double(i) - double(n) / 2.0) * h(); }
    double kappa(std::size_t i) const { return (double(i) - double(n) / 2.0) * dk(); }

    bool operator==(const Grid2D&) const = default;
};

enum class Rep { Physical, Frequency };

/// Complex scalar field on a Grid2D, in physical or frequency representation.
/// Frequency fields carry xi_scale: slot k holds the value at
/// xi = kappa_k * xi_scale (1 for the plain transform, 1/m after F_m).
class Field2D {
  public:
    Field2D() = default;
    Field2D(const Grid2D& g, Rep rep = Rep::Physical);

    const Grid2D& grid() const { return grid_; }
    Rep rep() const { return rep_; }
    double xi_scale() const { return xi_scale_; }
    void set_xi_scale(double s) { xi_scale_ = s; }

    std::size_t n() const { return grid_.n; }
    cplx& at(std::size_t i1, std::size_t i2) { return v_[i1 * grid_.n + i2]; }
    const cplx& at(std::size_t i1, std::size_t i2) const { return v_[i1 * grid_.n + i2]; }
    std::vector<cplx>& values() { return v_; }
    const std::vector<cplx>& values() const { return v_; }

    /// Plain centered transform pair with the (1/2pi) integral convention:
    /// forward approximates (1/2pi) \int e^{-i x.kappa} f(x) dx on the dual
    /// grid; backward inverts it exactly on the grid.
    Field2D to_frequency() const;
    Field2D to_physical() const;

    /// L2 norm with the field's own measure: h^2 per node in physical
    /// representation, (dk*|xi_scale|)^2 per node in frequency representation.
    double l2_norm() const;
    double linf_norm() const;
    bool all_finite() const;

    Field2D conjugate() const;

    Field2D& operator+=(const Field2D& o);
    Field2D& operator-=(const Field2D& o);
    Field2D& operator*=(cplx s);
    friend Field2D operator+(Field2D a, const Field2D& b) { return a += b; }
    friend Field2D operator-(Field2D a, const Field2D& b) { return a -= b; }
    friend Field2D operator*(cplx s, Field2D a) { return a *= s; }

    /// Pointwise product (physical representation on a shared grid).
    static Field2D pointwise_product(const Field2D& a, const Field2D& b);

    void write_csv(const std::string& path) const;
    void write_binary(const std::string& path) const;
    static Field2D read_binary(const std::string& path);

  private:
    Grid2D grid_;
    Rep rep_ = Rep::Physical;
    double xi_scale_ = 1.0;
    std::vector<cplx> v_;
};

/// Fill from a callable f(x1, x2) -> cplx on the physical grid.
template <typename F>
Field2D make_field(const Grid2D& g, F&& f) {
    Field2D out(g, Rep::Physical);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j)
            out.at(i, j) = f(g.x(i), g.x(j));
    return out;
}

} // namespace qdnls
