#include "qdnls/grid.hpp"

#include "qdnls/fft.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qdnls {

Grid2D::Grid2D(std::size_t n_, double L_) : n(n_), L(L_) {
    if (!fft::is_pow2(n) || n < 8) throw std::invalid_argument("Grid2D: n must be a power of two >= 8");
    if (!(L > 0.0)) throw std::invalid_argument("Grid2D: L must be positive");
}

double Grid2D::dk() const { return 2.0 * M_PI / L; }

Field2D::Field2D(const Grid2D& g, Rep rep) : grid_(g), rep_(rep), v_(g.n * g.n, cplx(0.0, 0.0)) {}

namespace {
// centered transform: the (-1)^(i+j) pre/post phases realize x and kappa
// offsets of -n/2 exactly (n is a multiple of 4, so the constant phase is 1)
void apply_checkerboard(std::vector<cplx>& v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if ((i + j) & 1) v[i * n + j] = -v[i * n + j];
}
} // namespace

Field2D Field2D::to_frequency() const {
    if (rep_ != Rep::Physical) throw std::logic_error("to_frequency: field is not physical");
    Field2D out(grid_, Rep::Frequency);
    out.v_ = v_;
    apply_checkerboard(out.v_, grid_.n);
    fft::fft2d(out.v_.data(), grid_.n, false);
    apply_checkerboard(out.v_, grid_.n);
    const double c = grid_.h() * grid_.h() / (2.0 * M_PI);
    for (auto& z : out.v_) z *= c;
    return out;
}

Field2D Field2D::to_physical() const {
    if (rep_ != Rep::Frequency) throw std::logic_error("to_physical: field is not frequency");
    if (xi_scale_ != 1.0) throw std::logic_error("to_physical: field has a scaled dual grid; undo the scaling first");
    Field2D out(grid_, Rep::Physical);
    out.v_ = v_;
    apply_checkerboard(out.v_, grid_.n);
    fft::fft2d(out.v_.data(), grid_.n, true);
    apply_checkerboard(out.v_, grid_.n);
    const double c = 2.0 * M_PI / (grid_.L * grid_.L);
    for (auto& z : out.v_) z *= c;
    return out;
}

double Field2D::l2_norm() const {
    double s = 0.0;
    for (const auto& z : v_) s += std::norm(z);
    double meas = (rep_ == Rep::Physical) ? grid_.h() : grid_.dk() * std::abs(xi_scale_);
    return std::sqrt(s) * meas;
}

double Field2D::linf_norm() const {
    double m = 0.0;
    for (const auto& z : v_) m = std::max(m, std::abs(z));
    return m;
}

bool Field2D::all_finite() const {
    for (const auto& z : v_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

Field2D Field2D::conjugate() const {
    Field2D out = *this;
    for (auto& z : out.v_) z = std::conj(z);
    return out;
}

Field2D& Field2D::operator+=(const Field2D& o) {
    if (v_.size() != o.v_.size()) throw std::invalid_argument("Field2D: size mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

Field2D& Field2D::operator-=(const Field2D& o) {
    if (v_.size() != o.v_.size()) throw std::invalid_argument("Field2D: size mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

Field2D& Field2D::operator*=(cplx s) {
    for (auto& z : v_) z *= s;
    return *this;
}

Field2D Field2D::pointwise_product(const Field2D& a, const Field2D& b) {
    if (!(a.grid_ == b.grid_)) throw std::invalid_argument("pointwise_product: grid mismatch");
    Field2D out(a.grid_, Rep::Physical);
    const std::size_t m = out.v_.size();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)m; ++i) out.v_[i] = a.v_[i] * b.v_[i];
    return out;
}

void Field2D::write_csv(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fprintf(f, "x1,x2,re,im\n");
    for (std::size_t i = 0; i < grid_.n; ++i)
        for (std::size_t j = 0; j < grid_.n; ++j)
            std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", grid_.x(i), grid_.x(j),
                         v_[i * grid_.n + j].real(), v_[i * grid_.n + j].imag());
    std::fclose(f);
}

// binary layout: u32 n, f64 L, u8 rep, f64 xi_scale, then n*n (re,im) f64
// pairs row-major, little-endian
void Field2D::write_binary(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::uint32_t n32 = (std::uint32_t)grid_.n;
    std::uint8_t rep8 = rep_ == Rep::Physical ? 0 : 1;
    f.write(reinterpret_cast<const char*>(&n32), 4);
    f.write(reinterpret_cast<const char*>(&grid_.L), 8);
    f.write(reinterpret_cast<const char*>(&rep8), 1);
    f.write(reinterpret_cast<const char*>(&xi_scale_), 8);
    f.write(reinterpret_cast<const char*>(v_.data()), (std::streamsize)(v_.size() * sizeof(cplx)));
}

Field2D Field2D::read_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::uint32_t n32 = 0;
    double L = 0.0, scale = 1.0;
    std::uint8_t rep8 = 0;
    f.read(reinterpret_cast<char*>(&n32), 4);
    f.read(reinterpret_cast<char*>(&L), 8);
    f.read(reinterpret_cast<char*>(&rep8), 1);
    f.read(reinterpret_cast<char*>(&scale), 8);
    Field2D out(Grid2D(n32, L), rep8 == 0 ? Rep::Physical : Rep::Frequency);
    out.xi_scale_ = scale;
    f.read(reinterpret_cast<char*>(out.v_.data()), (std::streamsize)(out.v_.size() * sizeof(cplx)));
    if (!f) throw std::runtime_error("truncated field file " + path);
    return out;
}

} // namespace qdnls
