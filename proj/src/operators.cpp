#include "qdnls/operators.hpp"

#include "qdnls/util.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace qdnls {

namespace {

void require_physical(const Field2D& f, const char* who) {
    if (f.rep() != Rep::Physical) throw std::logic_error(std::string(who) + ": field must be physical");
}

Field2D apply_freq_multiplier(const Field2D& f, const std::function<cplx(double, double)>& mult) {
    require_physical(f, "apply_freq_multiplier");
    Field2D g = f.to_frequency();
    const Grid2D& gr = g.grid();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)gr.n; ++i) {
        const double k1 = gr.kappa((std::size_t)i);
        for (std::size_t j = 0; j < gr.n; ++j) g.at((std::size_t)i, j) *= mult(k1, gr.kappa(j));
    }
    return g.to_physical();
}

} // namespace

Field2D scaled_fourier(double m, const Field2D& f) {
    if (m == 0.0) throw std::invalid_argument("scaled_fourier: m must be nonzero");
    require_physical(f, "scaled_fourier");
    Field2D g = f.to_frequency();
    g *= cplx(0.0, -m);
    g.set_xi_scale(1.0 / m);
    return g;
}

Field2D scaled_fourier_inverse(double m, const Field2D& f) {
    if (m == 0.0) throw std::invalid_argument("scaled_fourier_inverse: m must be nonzero");
    if (f.rep() != Rep::Frequency) throw std::logic_error("scaled_fourier_inverse: field must be frequency");
    if (std::abs(f.xi_scale() - 1.0 / m) > 1e-12 * std::abs(1.0 / m))
        throw std::logic_error("scaled_fourier_inverse: field was not produced by F_m for this m");
    Field2D g = f;
    g *= cplx(0.0, 1.0 / m); // 1 / (-i m)
    g.set_xi_scale(1.0);
    return g.to_physical();
}

Field2D modulate(double m, double t, const Field2D& f) {
    if (!(t > 0.0)) throw std::invalid_argument("modulate: t must be positive");
    require_physical(f, "modulate");
    Field2D out = f;
    const Grid2D& gr = f.grid();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)gr.n; ++i) {
        const double x1 = gr.x((std::size_t)i);
        for (std::size_t j = 0; j < gr.n; ++j) {
            const double x2 = gr.x(j);
            const double phase = m * (x1 * x1 + x2 * x2) / (2.0 * t);
            out.at((std::size_t)i, j) *= cplx(std::cos(phase), std::sin(phase));
        }
    }
    return out;
}

DilateResult dilate(double t, const Field2D& f) {
    if (!(t > 0.0)) throw std::invalid_argument("dilate: t must be positive");
    require_physical(f, "dilate");
    const Grid2D& gr = f.grid();
    const std::size_t n = gr.n;
    DilateResult res;
    res.field = Field2D(gr, Rep::Physical);

    const double q = 1.0 / t;
    const bool integer_recip = std::abs(q - std::round(q)) < 1e-12 && std::round(q) >= 1.0;
    if (integer_recip) {
        res.exact = true;
        const long long iq = (long long)std::llround(q);
        const long long half = (long long)n / 2;
        for (long long i = 0; i < (long long)n; ++i)
            for (long long j = 0; j < (long long)n; ++j) {
                const long long si = (i - half) * iq + half;
                const long long sj = (j - half) * iq + half;
                cplx v = (si >= 0 && si < (long long)n && sj >= 0 && sj < (long long)n)
                             ? f.at((std::size_t)si, (std::size_t)sj)
                             : cplx(0.0, 0.0);
                res.field.at((std::size_t)i, (std::size_t)j) = q * v;
            }
        return res;
    }

    // bilinear sampling of f at x/t; out-of-box samples are zero
    const double h = gr.h();
    auto value_at = [&](long long i, long long j) {
        return (i >= 0 && i < (long long)n && j >= 0 && j < (long long)n)
                   ? f.at((std::size_t)i, (std::size_t)j)
                   : cplx(0.0, 0.0);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const double xs1 = gr.x(i) / t;
        const double fi = (xs1 + gr.L / 2.0) / h;
        const long long i0 = (long long)std::floor(fi);
        const double a = fi - double(i0);
        for (std::size_t j = 0; j < n; ++j) {
            const double xs2 = gr.x(j) / t;
            const double fj = (xs2 + gr.L / 2.0) / h;
            const long long j0 = (long long)std::floor(fj);
            const double b = fj - double(j0);
            cplx v = (1 - a) * (1 - b) * value_at(i0, j0) + a * (1 - b) * value_at(i0 + 1, j0) +
                     (1 - a) * b * value_at(i0, j0 + 1) + a * b * value_at(i0 + 1, j0 + 1);
            res.field.at(i, j) = v / t;
        }
    }
    // interpolation bound (h^2/8)(max|f_11| + max|f_22|), derivatives spectral
    double m11 = 0.0, m22 = 0.0;
    Field2D d1 = spectral_derivative(spectral_derivative(f, 1), 1);
    Field2D d2 = spectral_derivative(spectral_derivative(f, 2), 2);
    for (const auto& z : d1.values()) m11 = std::max(m11, std::abs(z));
    for (const auto& z : d2.values()) m22 = std::max(m22, std::abs(z));
    res.interp_error_bound = h * h / 8.0 * (m11 + m22) / t;
    return res;
}

Field2D free_propagate(double m, double t, const Field2D& f) {
    if (m == 0.0) throw std::invalid_argument("free_propagate: m must be nonzero");
    if (t == 0.0) return f;
    return apply_freq_multiplier(f, [m, t](double k1, double k2) {
        const double phase = -t * (k1 * k1 + k2 * k2) / (2.0 * m);
        return cplx(std::cos(phase), std::sin(phase));
    });
}

Field2D wave_op(double m, double t, const Field2D& f, bool inverse) {
    if (m == 0.0) throw std::invalid_argument("wave_op: m must be nonzero");
    if (!(t > 0.0)) throw std::invalid_argument("wave_op: t must be positive");
    const double sgn = inverse ? -1.0 : 1.0;
    return apply_freq_multiplier(f, [m, t, sgn](double k1, double k2) {
        const double phase = sgn * (k1 * k1 + k2 * k2) / (2.0 * m * t);
        return cplx(std::cos(phase), std::sin(phase));
    });
}

Field2D apply_J(double m, double t, int axis, const Field2D& f) {
    if (m == 0.0) throw std::invalid_argument("apply_J: m must be nonzero");
    if (axis != 1 && axis != 2) throw std::invalid_argument("apply_J: axis must be 1 or 2");
    require_physical(f, "apply_J");
    const Grid2D& gr = f.grid();
    // x_a f + (i t / m) d_a f; reduces to x_a f at t = 0 and stays well
    // conditioned for small t (the gauge form e^{im theta} d_a e^{-im theta}
    // aliases on a fixed grid once m|x|/t exceeds the Nyquist frequency)
    Field2D out = f;
    for (std::size_t i = 0; i < gr.n; ++i)
        for (std::size_t j = 0; j < gr.n; ++j)
            out.at(i, j) *= axis == 1 ? gr.x(i) : gr.x(j);
    if (t != 0.0) {
        Field2D d = spectral_derivative(f, axis);
        d *= cplx(0.0, t / m);
        out += d;
    }
    return out;
}

Field2D apply_J_gauge(double m, double t, int axis, const Field2D& f);

Field2D apply_J_gauge(double m, double t, int axis, const Field2D& f) {
    if (m == 0.0 || t == 0.0) throw std::invalid_argument("apply_J_gauge: needs m != 0 and t != 0");
    require_physical(f, "apply_J_gauge");
    const Grid2D& gr = f.grid();
    Field2D g = f;
    for (std::size_t i = 0; i < gr.n; ++i)
        for (std::size_t j = 0; j < gr.n; ++j) {
            const double x1 = gr.x(i), x2 = gr.x(j);
            const double phase = -m * (x1 * x1 + x2 * x2) / (2.0 * t);
            g.at(i, j) *= cplx(std::cos(phase), std::sin(phase));
        }
    Field2D d = spectral_derivative(g, axis);
    Field2D out(gr, Rep::Physical);
    for (std::size_t i = 0; i < gr.n; ++i)
        for (std::size_t j = 0; j < gr.n; ++j) {
            const double x1 = gr.x(i), x2 = gr.x(j);
            const double phase = m * (x1 * x1 + x2 * x2) / (2.0 * t);
            out.at(i, j) = cplx(0.0, t / m) * cplx(std::cos(phase), std::sin(phase)) * d.at(i, j);
        }
    return out;
}

Field2D hilbert(int axis, const Field2D& f) {
    if (axis != 1 && axis != 2) throw std::invalid_argument("hilbert: axis must be 1 or 2");
    return apply_freq_multiplier(f, [axis](double k1, double k2) {
        const double k = axis == 1 ? k1 : k2;
        if (k > 0.0) return cplx(0.0, -1.0);
        if (k < 0.0) return cplx(0.0, 1.0);
        return cplx(0.0, 0.0);
    });
}

Field2D smoothing_S_axis(int sign, int axis, double t, double kappa, const Field2D& f) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("smoothing_S: sign must be +1 or -1");
    if (!(kappa > 0.0) || kappa > 1.0) throw std::invalid_argument("smoothing_S: kappa must be in (0,1]");
    if (t < 0.0) throw std::invalid_argument("smoothing_S: t must be >= 0");
    require_physical(f, "smoothing_S");
    const Grid2D& gr = f.grid();
    const double tb = std::sqrt(1.0 + t * t);
    Field2D hf = hilbert(axis, f);
    Field2D out(gr, Rep::Physical);
    const cplx isgn(0.0, sign > 0 ? -1.0 : 1.0); // -/+ i per the +/- branch
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)gr.n; ++i)
        for (std::size_t j = 0; j < gr.n; ++j) {
            const double xa = axis == 1 ? gr.x((std::size_t)i) : gr.x(j);
            const double th = kappa * std::atan(xa / tb);
            out.at((std::size_t)i, j) = std::cosh(th) * f.at((std::size_t)i, j) +
                                        isgn * std::sinh(th) * hf.at((std::size_t)i, j);
        }
    return out;
}

Field2D smoothing_S(int sign, double t, double kappa, const Field2D& f) {
    return smoothing_S_axis(sign, 1, t, kappa, smoothing_S_axis(sign, 2, t, kappa, f));
}

Field2D weight_w(const Grid2D& g, int axis, double t) {
    Field2D out(g, Rep::Physical);
    const double denom = 1.0 + t * t;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j) {
            const double xa = axis == 1 ? g.x(i) : g.x(j);
            out.at(i, j) = 1.0 / std::sqrt(1.0 + xa * xa / denom);
        }
    return out;
}

Field2D spectral_derivative(const Field2D& f, int axis) {
    if (axis != 1 && axis != 2) throw std::invalid_argument("spectral_derivative: axis must be 1 or 2");
    return apply_freq_multiplier(f, [axis](double k1, double k2) {
        return cplx(0.0, axis == 1 ? k1 : k2);
    });
}

std::vector<cplx> uniform_spectral_derivative(const std::vector<cplx>& v, std::size_t n,
                                              double spacing, int axis) {
    Grid2D g(n, spacing * double(n));
    Field2D f(g, Rep::Physical);
    f.values() = v;
    return spectral_derivative(f, axis).values();
}

void dealias_23(Field2D& freq) {
    if (freq.rep() != Rep::Frequency) throw std::logic_error("dealias_23: field must be frequency");
    const std::size_t n = freq.n();
    const long long cut = (long long)(n / 3);
    const long long half = (long long)n / 2;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const long long s1 = (long long)i - half, s2 = (long long)j - half;
            if (std::llabs(s1) > cut || std::llabs(s2) > cut) freq.at(i, j) = cplx(0.0, 0.0);
        }
}

cplx sample_scaled_fourier(double m, const Field2D& f, const Eigen::Vector2d& xi) {
    if (m == 0.0) throw std::invalid_argument("sample_scaled_fourier: m must be nonzero");
    require_physical(f, "sample_scaled_fourier");
    const Grid2D& gr = f.grid();
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < gr.n; ++i) {
        const double p1 = m * xi(0) * gr.x(i);
        cplx row(0.0, 0.0);
        for (std::size_t j = 0; j < gr.n; ++j) {
            const double ph = -(p1 + m * xi(1) * gr.x(j));
            row += f.at(i, j) * cplx(std::cos(ph), std::sin(ph));
        }
        acc += row;
    }
    return cplx(0.0, -m) * gr.h() * gr.h() / (2.0 * M_PI) * acc;
}

std::vector<cplx> sample_scaled_fourier_many(double m, const Field2D& f,
                                             const std::vector<Eigen::Vector2d>& xis) {
    std::vector<cplx> out(xis.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < (long long)xis.size(); ++i)
        out[(std::size_t)i] = sample_scaled_fourier(m, f, xis[(std::size_t)i]);
    return out;
}

double estimate_smoothing_norm(int sign, double t, double kappa, double L0, std::size_t n,
                               int n_samples, std::uint64_t seed) {
    const double tb = std::sqrt(1.0 + t * t);
    Grid2D g(n, L0 * tb);
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double best = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        Field2D f(g, Rep::Physical);
        for (auto& z : f.values()) z = cplx(gauss(rng), gauss(rng));
        const double r = smoothing_S(sign, t, kappa, f).l2_norm() / f.l2_norm();
        best = std::max(best, r);
    }
    return best;
}

std::string SelfTestReport::to_text() const {
    std::ostringstream os;
    os.precision(6);
    os << std::scientific;
    for (const auto& c : checks)
        os << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  measured=" << c.measured
           << "  tolerance" << (c.less_is_pass ? "<=" : ">=") << c.tolerance << "\n";
    os << (all_pass ? "all operator checks passed" : "operator check FAILURES present") << "\n";
    return os.str();
}

namespace {

Field2D gaussian_field(const Grid2D& g, double sigma2) {
    return make_field(g, [sigma2](double x1, double x2) {
        return cplx(std::exp(-(x1 * x1 + x2 * x2) / (2.0 * sigma2)), 0.0);
    });
}

// closed form of U_m(t) applied to exp(-|x|^2/(2 sigma^2))
Field2D gaussian_free_closed_form(const Grid2D& g, double m, double t, double sigma2) {
    const cplx a = cplx(sigma2, 0.0) + cplx(0.0, t / m);
    Field2D out(g, Rep::Physical);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j) {
            const double r2 = g.x(i) * g.x(i) + g.x(j) * g.x(j);
            out.at(i, j) = sigma2 / a * std::exp(-r2 / (2.0 * a));
        }
    return out;
}

double sup_diff(const Field2D& a, const Field2D& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i)
        m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

} // namespace

SelfTestReport operator_selftest(const Grid2D& g) {
    SelfTestReport rep;
    auto add = [&rep](const std::string& name, double measured, double tol, bool less = true) {
        CheckResult c{name, measured, tol, less, less ? measured <= tol : measured >= tol};
        rep.checks.push_back(c);
    };

    const Field2D G = gaussian_field(g, 1.0);
    const double gsup = G.linf_norm();

    // F_m round trip and Gaussian oracle
    {
        Field2D rt = scaled_fourier_inverse(1.0, scaled_fourier(1.0, G));
        add("fm_roundtrip_rel", sup_diff(rt, G) / gsup, 1e-12);

        Field2D F1 = scaled_fourier(1.0, G);
        double err1 = 0.0;
        for (std::size_t i = 0; i < g.n; ++i)
            for (std::size_t j = 0; j < g.n; ++j) {
                const double xi1 = g.kappa(i), xi2 = g.kappa(j); // xi_scale = 1
                const cplx want = cplx(0.0, -1.0) * std::exp(-(xi1 * xi1 + xi2 * xi2) / 2.0);
                err1 = std::max(err1, std::abs(F1.at(i, j) - want));
            }
        add("fm_gaussian_m1", err1, 1e-8);

        Field2D F2 = scaled_fourier(2.0, G);
        double err2 = 0.0;
        for (std::size_t i = 0; i < g.n; ++i)
            for (std::size_t j = 0; j < g.n; ++j) {
                const double xi1 = g.kappa(i) * F2.xi_scale(), xi2 = g.kappa(j) * F2.xi_scale();
                const cplx want = cplx(0.0, -2.0) * std::exp(-2.0 * (xi1 * xi1 + xi2 * xi2));
                err2 = std::max(err2, std::abs(F2.at(i, j) - want));
            }
        add("fm_gaussian_m2", err2, 1e-8);
    }

    // free evolution: Gaussian oracle, unitarity, round trip
    {
        Field2D u = free_propagate(1.0, 1.0, G);
        add("gaussian_free_evolution", sup_diff(u, gaussian_free_closed_form(g, 1.0, 1.0, 1.0)), 1e-8);
        add("um_unitary_rel", std::abs(u.l2_norm() - G.l2_norm()) / G.l2_norm(), 1e-13);
        Field2D rt = free_propagate(1.0, -1.0, u);
        add("um_roundtrip_rel", sup_diff(rt, G) / gsup, 1e-13);
    }

    // W_m isometry and decay slope
    {
        Field2D w = wave_op(1.0, 1.0, G);
        add("wave_isometry_rel", std::abs(w.l2_norm() - G.l2_norm()) / G.l2_norm(), 1e-12);
        std::vector<double> lt, le;
        for (double t : {1.0, 4.0, 16.0, 64.0}) {
            Field2D d = wave_op(1.0, t, G) - G;
            lt.push_back(std::log(t));
            le.push_back(std::log(d.linf_norm()));
        }
        add("wave_decay_slope", fit_slope(lt, le), -0.45);
    }

    // U_m = M_m D F_m M_m, sampled against the exact semidiscrete composition
    {
        double err = 0.0;
        for (double t : {1.0, 2.0}) {
            const double m = 1.0;
            Field2D lhs = free_propagate(m, t, G);
            Field2D Mf = modulate(m, t, G);
            std::vector<Eigen::Vector2d> pts;
            std::vector<std::pair<std::size_t, std::size_t>> ij;
            for (std::size_t i = g.n / 4; i <= 3 * g.n / 4; i += g.n / 16)
                for (std::size_t j = g.n / 4; j <= 3 * g.n / 4; j += g.n / 16) {
                    pts.push_back(Eigen::Vector2d(g.x(i) / t, g.x(j) / t));
                    ij.push_back({i, j});
                }
            std::vector<cplx> rhs_inner = sample_scaled_fourier_many(m, Mf, pts);
            for (std::size_t p = 0; p < pts.size(); ++p) {
                const auto [i, j] = ij[p];
                const double r2 = g.x(i) * g.x(i) + g.x(j) * g.x(j);
                const cplx mod(std::cos(m * r2 / (2.0 * t)), std::sin(m * r2 / (2.0 * t)));
                const cplx rhs = mod * rhs_inner[p] / t;
                err = std::max(err, std::abs(lhs.at(i, j) - rhs));
            }
        }
        add("um_factorization", err, 1e-6);
    }

    // Leibniz rule for J with m = mu1 + mu2
    {
        const double mu1 = 1.0, mu2 = 2.0, m = 3.0, t = 1.0;
        Field2D p1 = gaussian_field(g, 1.0);
        Field2D p2 = gaussian_field(g, 2.0);
        Field2D prod = Field2D::pointwise_product(p1, p2);
        for (int axis : {1, 2}) {
            Field2D lhs = apply_J(m, t, axis, prod);
            Field2D rhs = mu1 / m * Field2D::pointwise_product(apply_J(mu1, t, axis, p1), p2) +
                          mu2 / m * Field2D::pointwise_product(p1, apply_J(mu2, t, axis, p2));
            add(axis == 1 ? "leibniz_axis1" : "leibniz_axis2", sup_diff(lhs, rhs), 1e-10);
        }
    }

    // gauge form of J agrees with the direct definition where the chirp
    // m|x|/t stays resolved on the grid (m = 1, t = 1 here)
    {
        Field2D lhs = apply_J_gauge(1.0, 1.0, 1, G);
        Field2D rhs = apply_J(1.0, 1.0, 1, G);
        add("jhenkei_gauge_identity", sup_diff(lhs, rhs), 1e-8);
    }

    // (i/m d_xi) F_m U_m^{-1} phi = F_m U_m^{-1} J_m phi
    {
        const double t = 1.0;
        double err = 0.0;
        for (double m : {1.0, 2.0}) {
            Field2D A = scaled_fourier(m, free_propagate(m, -t, G));
            for (int axis : {1, 2}) {
                std::vector<cplx> dA =
                    uniform_spectral_derivative(A.values(), g.n, g.dk() * A.xi_scale(), axis);
                Field2D rhs = scaled_fourier(m, free_propagate(m, -t, apply_J(m, t, axis, G)));
                for (std::size_t i = 0; i < dA.size(); ++i)
                    err = std::max(err, std::abs(cplx(0.0, 1.0 / m) * dA[i] - rhs.values()[i]));
            }
        }
        add("lem1_commutation", err, 1e-8);
    }

    // J at t = 0 is multiplication by x_a; continuity for small t
    {
        Field2D j0 = apply_J(1.0, 0.0, 1, G);
        double err = 0.0;
        for (std::size_t i = 0; i < g.n; ++i)
            for (std::size_t j = 0; j < g.n; ++j)
                err = std::max(err, std::abs(j0.at(i, j) - g.x(i) * G.at(i, j)));
        add("j_t0_exact", err, 1e-14);

        const double ts = 1e-3;
        Field2D js = apply_J(1.0, ts, 1, G);
        Field2D raw = j0;
        Field2D d = spectral_derivative(G, 1);
        d *= cplx(0.0, ts);
        raw += d;
        add("j_small_t_continuity", sup_diff(js, raw), 1e-10);
    }

    // Hilbert transform: plane wave eigenvector and H^2 = -1 + axis mean
    {
        const double k = g.dk() * std::round(1.0 / g.dk());
        Field2D pw = make_field(g, [k](double x1, double) { return std::exp(cplx(0.0, k * x1)); });
        Field2D hpw = hilbert(1, pw);
        add("hilbert_planewave", sup_diff(hpw, cplx(0.0, -1.0) * pw), 1e-12);

        Field2D h2 = hilbert(1, hilbert(1, G));
        Field2D want = cplx(-1.0, 0.0) * G;
        // add back the axis-1 mean (zero-frequency plane along axis 1)
        for (std::size_t j = 0; j < g.n; ++j) {
            cplx mean(0.0, 0.0);
            for (std::size_t i = 0; i < g.n; ++i) mean += G.at(i, j);
            mean /= double(g.n);
            for (std::size_t i = 0; i < g.n; ++i) want.at(i, j) += mean;
        }
        add("hilbert_square", sup_diff(h2, want), 1e-12);
    }

    // smoothing operators
    {
        Field2D s = smoothing_S(1, 1.0, 1e-6, G);
        add("smoothing_small_kappa", (s - G).l2_norm() / G.l2_norm(), 1e-5);

        Field2D ab = smoothing_S_axis(1, 1, 1.0, 0.5, smoothing_S_axis(1, 2, 1.0, 0.5, G));
        Field2D ba = smoothing_S_axis(1, 2, 1.0, 0.5, smoothing_S_axis(1, 1, 1.0, 0.5, G));
        add("smoothing_axes_commute", sup_diff(ab, ba), 1e-12);

        Rng rng(7);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (double kappa : {0.1, 1.0}) {
            double best = 0.0;
            for (double t : {0.0, 1.0, 10.0, 100.0}) {
                for (int s2 = 0; s2 < 50; ++s2) {
                    Field2D f(g, Rep::Physical);
                    for (auto& z : f.values()) z = cplx(gauss(rng), gauss(rng));
                    for (int sign : {1, -1})
                        best = std::max(best, smoothing_S(sign, t, kappa, f).l2_norm() / f.l2_norm());
                }
            }
            std::ostringstream nm;
            nm << "smoothing_norm_bound_k" << kappa;
            add(nm.str(), best, std::exp(kappa * M_PI) + 0.05);
        }
    }

    // weight w_a values: 1 at the origin, exactly 1/sqrt(2) where x_a = <t>
    // (t chosen so that <t> falls on a grid node), monotone in |x_a|
    {
        const std::size_t istar = 3 * g.n / 4;
        const double xs = g.x(istar); // L/4 > 1 for the default boxes
        const double t = std::sqrt(std::max(xs * xs - 1.0, 0.25));
        Field2D w = weight_w(g, 1, t);
        add("weight_origin", std::abs(w.at(g.n / 2, 0).real() - 1.0), 1e-15);
        add("weight_halfheight_at_tbar",
            xs > 1.0 ? std::abs(w.at(istar, 0).real() - 1.0 / std::sqrt(2.0)) : 0.0, 1e-12);
        double bad = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) {
            const double v = w.at(i, 0).real();
            if (v <= 0.0 || v > 1.0) bad = 1.0;
            if (i > 0 && std::abs(g.x(i)) > std::abs(g.x(i - 1)) && v > w.at(i - 1, 0).real() + 1e-15)
                bad = 1.0;
            if (i > 0 && std::abs(g.x(i)) < std::abs(g.x(i - 1)) && v < w.at(i - 1, 0).real() - 1e-15)
                bad = 1.0;
        }
        add("weight_range_monotone", bad, 0.0);
    }

    // L-infinity estimate for free solutions: deficit constant stays small
    {
        const double m = 2.0;
        double cmax = 0.0;
        for (double t : {1.0, 4.0, 16.0}) {
            Field2D u = free_propagate(m, t, G);
            Field2D A = scaled_fourier(m, free_propagate(m, -t, u));
            double jsum = 0.0;
            for (auto [b1, b2] : {std::pair{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}) {
                Field2D v = u;
                for (int r = 0; r < b1; ++r) v = apply_J(m, t, 1, v);
                for (int r = 0; r < b2; ++r) v = apply_J(m, t, 2, v);
                jsum += v.l2_norm();
            }
            const double deficit = u.linf_norm() - A.linf_norm() / t;
            cmax = std::max(cmax, std::max(0.0, deficit) * std::pow(t, 1.5) / jsum);
        }
        add("linfty_estimate_constant", cmax, 10.0);
    }

    // order swap bound |J^beta d^alpha f| vs sum of d^alpha' J^beta' f
    {
        const double m = 1.0, t = 1.0;
        double cmax = 0.0;
        for (int a : {1, 2})
            for (int b : {1, 2}) {
                Field2D lhs = apply_J(m, t, b, spectral_derivative(G, a));
                double denom = 0.0;
                denom += G.l2_norm();
                denom += spectral_derivative(G, a).l2_norm();
                denom += apply_J(m, t, b, G).l2_norm();
                denom += spectral_derivative(apply_J(m, t, b, G), a).l2_norm();
                cmax = std::max(cmax, lhs.l2_norm() / denom);
            }
        add("lem2_order_swap_constant", cmax, 4.0);
    }

    // uniformity of the smoothing norm across t on the operator's own scale
    {
        for (double kappa : {0.1, 1.0}) {
            double lo = 1e300, hi = 0.0;
            int idx = 0;
            for (double t : {0.0, 1.0, 10.0, 100.0}) {
                const double est = estimate_smoothing_norm(
                    1, t, kappa, g.L, std::min<std::size_t>(g.n, 128), 20,
                    9000 + (std::uint64_t)(100 * kappa) + (std::uint64_t)idx++);
                lo = std::min(lo, est);
                hi = std::max(hi, est);
            }
            std::ostringstream nm;
            nm << "smoothing_uniformity_k" << kappa;
            add(nm.str(), (hi - lo) / lo, 0.05);
        }
    }

    rep.all_pass = true;
    for (const auto& c : rep.checks)
        if (!c.pass) rep.all_pass = false;
    return rep;
}

} // namespace qdnls
