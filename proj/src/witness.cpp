#include "qdnls/witness.hpp"

#include "qdnls/util.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qdnls {

ResonanceReport check_mass_resonance(const SystemSpec& spec, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("check_mass_resonance: tol must be positive");
    ResonanceReport rep;
    rep.tol = tol;
    for (const auto& e : spec.coeffs) {
        if (e.c == cplx(0.0, 0.0)) continue;
        const double mj = spec.masses[(std::size_t)e.j];
        const double msum = spec.sharp_mass(e.k) + spec.sharp_mass(e.l);
        if (std::abs(mj - msum) > tol) rep.violations.push_back({e, mj, msum});
    }
    rep.passed = rep.violations.empty();
    return rep;
}

CPoly expand_im_pHY(const SystemSpec& spec, const Eigen::MatrixXcd& H) {
    const int N = (int)spec.N();
    if (H.rows() != N || H.cols() != N)
        throw std::invalid_argument("expand_im_pHY: H size mismatch");
    const auto tables = resonant_symbol_coefficients(spec);
    CPoly out;
    const cplx half_i(0.0, 0.5);
    auto sharp_flip = [N](int k) { return k < N ? k + N : k - N; };
    // f = sum_j p_j conj((HY)_j); Im f = (f - conj f) / (2i).
    for (int j = 0; j < N; ++j) {
        for (const auto& [m, c] : tables[(std::size_t)j]) {
            for (int i = 0; i < N; ++i) {
                const cplx hji = H(j, i);
                if (hji == cplx(0.0, 0.0)) continue;
                // term of f: c conj(H_ji) Ys_k Ys_l Ys_{i+N}
                CMonomial m1{m.e1, m.e2, {m.k, m.l, i + N}};
                std::sort(m1.idx.begin(), m1.idx.end());
                out[m1] += -half_i * c * std::conj(hji);
                // term of conj f: conj(c) H_ji Ys_k# Ys_l# Ys_i
                CMonomial m2{m.e1, m.e2, {sharp_flip(m.k), sharp_flip(m.l), i}};
                std::sort(m2.idx.begin(), m2.idx.end());
                out[m2] += half_i * std::conj(c) * hji;
            }
        }
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == cplx(0.0, 0.0); });
    return out;
}

cplx eval_cpoly(const CPoly& poly, const Eigen::Vector2d& xi, const Eigen::VectorXcd& Y) {
    Eigen::VectorXcd Ys = sharp_extend(Y);
    cplx acc(0.0, 0.0);
    for (const auto& [m, c] : poly) {
        cplx term = c * Ys(m.idx[0]) * Ys(m.idx[1]) * Ys(m.idx[2]);
        for (int i = 0; i < m.e1; ++i) term *= xi(0);
        for (int i = 0; i < m.e2; ++i) term *= xi(1);
        acc += term;
    }
    return acc;
}

std::vector<Eigen::MatrixXcd> hermitian_basis(int N) {
    std::vector<Eigen::MatrixXcd> basis;
    basis.reserve((std::size_t)(N * N));
    for (int a = 0; a < N; ++a) {
        Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(N, N);
        B(a, a) = 1.0;
        basis.push_back(B);
    }
    const double s = 1.0 / std::sqrt(2.0);
    for (int a = 0; a < N; ++a) {
        for (int b = a + 1; b < N; ++b) {
            Eigen::MatrixXcd Br = Eigen::MatrixXcd::Zero(N, N);
            Br(a, b) = s;
            Br(b, a) = s;
            basis.push_back(Br);
            Eigen::MatrixXcd Bi = Eigen::MatrixXcd::Zero(N, N);
            Bi(a, b) = cplx(0.0, s);
            Bi(b, a) = cplx(0.0, -s);
            basis.push_back(Bi);
        }
    }
    return basis;
}

Eigen::MatrixXcd hermitian_from_coords(const Eigen::VectorXd& h, int N) {
    auto basis = hermitian_basis(N);
    if ((int)basis.size() != h.size())
        throw std::invalid_argument("hermitian_from_coords: coordinate size mismatch");
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(N, N);
    for (int r = 0; r < h.size(); ++r) H += h(r) * basis[(std::size_t)r];
    // enforce exact Hermitian symmetry against rounding
    for (int a = 0; a < N; ++a) {
        H(a, a) = cplx(H(a, a).real(), 0.0);
        for (int b = a + 1; b < N; ++b) H(b, a) = std::conj(H(a, b));
    }
    return H;
}

Eigen::VectorXd hermitian_to_coords(const Eigen::MatrixXcd& H) {
    const int N = (int)H.rows();
    Eigen::VectorXd h(N * N);
    int r = 0;
    for (int a = 0; a < N; ++a) h(r++) = H(a, a).real();
    const double s = std::sqrt(2.0);
    for (int a = 0; a < N; ++a) {
        for (int b = a + 1; b < N; ++b) {
            h(r++) = H(a, b).real() * s;
            h(r++) = H(a, b).imag() * s;
        }
    }
    return h;
}

ConstraintSystem witness_constraints(const SystemSpec& spec) {
    const int N = (int)spec.N();
    const auto basis = hermitian_basis(N);
    std::vector<CPoly> expansions;
    expansions.reserve(basis.size());
    std::map<CMonomial, std::size_t> key_index;
    for (const auto& B : basis) {
        expansions.push_back(expand_im_pHY(spec, B));
        for (const auto& [m, c] : expansions.back()) key_index.emplace(m, 0);
    }
    ConstraintSystem cs;
    std::size_t idx = 0;
    for (auto& [m, i] : key_index) {
        i = idx++;
        cs.monomials.push_back(m);
    }
    cs.M = Eigen::MatrixXd::Zero(2 * (Eigen::Index)idx, (Eigen::Index)basis.size());
    for (std::size_t r = 0; r < expansions.size(); ++r) {
        for (const auto& [m, c] : expansions[r]) {
            const std::size_t i = key_index.at(m);
            cs.M(2 * (Eigen::Index)i, (Eigen::Index)r) = c.real();
            cs.M(2 * (Eigen::Index)i + 1, (Eigen::Index)r) = c.imag();
        }
    }
    return cs;
}

WitnessReport verify_witness(const SystemSpec& spec, const Eigen::MatrixXcd& H,
                             int n_samples, std::uint64_t seed) {
    const int N = (int)spec.N();
    if (H.rows() != N || H.cols() != N)
        throw std::invalid_argument("verify_witness: H size mismatch");
    WitnessReport rep;
    rep.hermiticity_defect = (H - H.adjoint()).norm();
    Eigen::MatrixXcd Hh = 0.5 * (H + H.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hh);
    rep.min_eigenvalue = es.eigenvalues().minCoeff();

    const double hnorm = H.norm();
    if (hnorm > 0.0) {
        CPoly poly = expand_im_pHY(spec, H / hnorm);
        for (const auto& [m, c] : poly)
            rep.max_constraint_residual = std::max(rep.max_constraint_residual, std::abs(c));
    }

    Rng rng(seed);
    rep.n_samples = std::max(n_samples, 200);
    for (int s = 0; s < rep.n_samples; ++s) {
        Eigen::VectorXcd Y = random_unit_complex_vector(rng, N);
        Eigen::Vector2d xi = random_unit_xi(rng);
        Eigen::VectorXcd p = eval_p(spec, xi, Y);
        cplx ip = (H * Y).dot(p); // dot conjugates the left factor: <p, HY>
        rep.sample_residual = std::max(rep.sample_residual, std::abs(ip.imag()));
    }
    return rep;
}

namespace {

struct EigInfo {
    double lambda_min;
    Eigen::VectorXcd vec;
};

EigInfo min_eig(const Eigen::MatrixXcd& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    Eigen::Index which = 0;
    es.eigenvalues().minCoeff(&which);
    return {es.eigenvalues()(which), es.eigenvectors().col(which)};
}

} // namespace

FindWitnessResult find_witness(const SystemSpec& spec, const FindWitnessOptions& opts) {
    if (opts.restarts <= 0 || opts.max_iters <= 0 || !(opts.pd_threshold > 0.0))
        throw std::invalid_argument("find_witness: options must be positive");
    const int N = (int)spec.N();
    FindWitnessResult res;

    ConstraintSystem cs = witness_constraints(spec);
    const int dim = N * N;

    // nullspace basis of M as Frobenius-orthonormal Hermitian matrices
    std::vector<Eigen::MatrixXcd> null_basis;
    Eigen::MatrixXd V;
    int r = dim;
    if (cs.M.rows() == 0) {
        V = Eigen::MatrixXd::Identity(dim, dim);
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(cs.M, Eigen::ComputeFullV);
        const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
        int rank = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > opts.svd_rank_tol * smax) ++rank;
        r = dim - rank;
        V = svd.matrixV().rightCols(r);
    }
    res.nullspace_dim = r;
    if (r == 0) {
        res.status = WitnessStatus::NoWitnessExists;
        res.message = "constraint nullspace is empty: no nonzero Hermitian matrix satisfies "
                      "Im<p,HY> = 0, so condition (b) fails definitively";
        return res;
    }
    null_basis.reserve((std::size_t)r);
    for (int i = 0; i < r; ++i) null_basis.push_back(hermitian_from_coords(V.col(i), N));

    auto assemble = [&](const Eigen::VectorXd& c) {
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(N, N);
        for (int i = 0; i < r; ++i) H += c(i) * null_basis[(std::size_t)i];
        return H;
    };

    // Concave objective lambda_min(H(c)) maximized over the unit sphere by
    // projected subgradient ascent with backtracking.
    auto ascend = [&](Eigen::VectorXd c) {
        c.normalize();
        EigInfo e = min_eig(assemble(c));
        double step = 0.5;
        for (int it = 0; it < opts.max_iters && step > 1e-14; ++it) {
            Eigen::VectorXd g(r);
            for (int i = 0; i < r; ++i)
                g(i) = (e.vec.adjoint() * null_basis[(std::size_t)i] * e.vec)(0).real();
            Eigen::VectorXd cand = (c + step * g).normalized();
            EigInfo ec = min_eig(assemble(cand));
            if (ec.lambda_min > e.lambda_min) {
                c = cand;
                e = ec;
                step *= 1.3;
            } else {
                step *= 0.5;
            }
        }
        return std::pair<Eigen::VectorXd, double>(c, e.lambda_min);
    };

    Rng rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd best_c;
    double best_lm = -std::numeric_limits<double>::infinity();

    // warm start: projection of the identity onto the nullspace
    {
        Eigen::VectorXd id_coords = hermitian_to_coords(
            Eigen::MatrixXcd::Identity(N, N) / std::sqrt((double)N));
        Eigen::VectorXd c0 = V.transpose() * id_coords;
        if (c0.norm() > 1e-12) {
            auto [c, lm] = ascend(c0);
            if (lm > best_lm) {
                best_lm = lm;
                best_c = c;
            }
        }
    }
    for (int s = 0; s < opts.restarts; ++s) {
        Eigen::VectorXd c0(r);
        for (int i = 0; i < r; ++i) c0(i) = gauss(rng);
        if (c0.norm() < 1e-12) continue;
        auto [c, lm] = ascend(c0);
        if (lm > best_lm) {
            best_lm = lm;
            best_c = c;
        }
    }

    res.best_lambda_min = best_lm;
    if (best_lm >= opts.pd_threshold) {
        Eigen::MatrixXcd H = assemble(best_c);
        H /= H.norm();
        // exact symmetry
        for (int a = 0; a < N; ++a) {
            H(a, a) = cplx(H(a, a).real(), 0.0);
            for (int b = a + 1; b < N; ++b) H(b, a) = std::conj(H(a, b));
        }
        res.status = WitnessStatus::Found;
        res.witness.H = H;
        res.witness.min_eigenvalue = min_eig(H).lambda_min;
        res.message = "witness found";
    } else {
        res.status = WitnessStatus::NotFound;
        std::ostringstream msg;
        msg << "no positive definite combination found (best lambda_min = " << best_lm
            << " over a nullspace of dimension " << r
            << "); this is a search failure, not a proof that condition (b) fails";
        res.message = msg.str();
    }
    return res;
}

bool check_oddness(const SystemSpec& spec, const Eigen::MatrixXcd& H, int n_samples,
                   std::uint64_t seed) {
    Rng rng(seed);
    const int N = (int)spec.N();
    for (int s = 0; s < n_samples; ++s) {
        Eigen::VectorXcd Y = random_complex_vector(rng, N);
        Eigen::Vector2d xi = random_unit_xi(rng);
        auto g = [&](const Eigen::VectorXcd& y) {
            return (H * y).dot(eval_p(spec, xi, y)).imag();
        };
        const double gp = g(Y), gm = g(-Y);
        const double scale = std::max(1.0, std::abs(gp));
        if (std::abs(gm + gp) > 1e-12 * scale) return false;
    }
    return true;
}

} // namespace qdnls
