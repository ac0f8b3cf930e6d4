#pragma once

#include "qdnls/system.hpp"

#include <Eigen/Dense>
#include <array>
#include <map>
#include <string>
#include <vector>

namespace qdnls {

/// One coefficient entry violating the mass relation m_j = ms_k + ms_l.
struct ResonanceViolation {
    CoeffEntry entry;
    double m_j = 0.0;
    double mass_sum = 0.0;
};

struct ResonanceReport {
    bool passed = false;
    double tol = 0.0;
    std::vector<ResonanceViolation> violations;
};

/// Mass-resonance check: every stored nonzero coefficient must satisfy
/// |m_j - ms_k - ms_l| <= tol.
ResonanceReport check_mass_resonance(const SystemSpec& spec, double tol = 1e-9);

/// Monomial of the cubic form Im<p(xi;Y), HY>: xi1^e1 xi2^e2 times the
/// product of three sharp variables Ys_a Ys_b Ys_c (indices sorted).
struct CMonomial {
    int e1 = 0;
    int e2 = 0;
    std::array<int, 3> idx{};
    auto operator<=>(const CMonomial&) const = default;
};

using CPoly = std::map<CMonomial, cplx>;

/// Exact formal expansion of Im<p(xi;Y), HY> over monomials in
/// (xi1, xi2, Ys_1..Ys_2N), treating Y and conj(Y) as independent variables.
/// The identity Im<p,HY> = 0 on R^2 x C^N holds iff every coefficient is 0.
CPoly expand_im_pHY(const SystemSpec& spec, const Eigen::MatrixXcd& H);

cplx eval_cpoly(const CPoly& poly, const Eigen::Vector2d& xi, const Eigen::VectorXcd& Y);

/// Orthonormal (Frobenius) basis of the real vector space of N x N Hermitian
/// matrices; dimension N^2. Ordering: diagonal entries first, then for each
/// pair a < b the real and imaginary off-diagonal generators.
std::vector<Eigen::MatrixXcd> hermitian_basis(int N);

Eigen::MatrixXcd hermitian_from_coords(const Eigen::VectorXd& h, int N);
Eigen::VectorXd hermitian_to_coords(const Eigen::MatrixXcd& H);

/// Real linear constraint system M h = 0 on the N^2 Hermitian coordinates h,
/// equivalent to Im<p(xi;Y), HY> = 0 identically. Rows come in (Re, Im)
/// pairs, one pair per cubic monomial present.
struct ConstraintSystem {
    Eigen::MatrixXd M;
    std::vector<CMonomial> monomials;
};

ConstraintSystem witness_constraints(const SystemSpec& spec);

struct WitnessReport {
    double hermiticity_defect = 0.0;
    double min_eigenvalue = 0.0;
    /// Largest |monomial coefficient| of Im<p,HY> for H/||H||_F.
    double max_constraint_residual = 0.0;
    /// max |Im<p(xi;Y),HY>| over random samples with |Y| = |xi| = 1.
    double sample_residual = 0.0;
    int n_samples = 0;
};

WitnessReport verify_witness(const SystemSpec& spec, const Eigen::MatrixXcd& H,
                             int n_samples = 200, std::uint64_t seed = 2026);

struct HermitianWitness {
    Eigen::MatrixXcd H;       // exactly Hermitian, ||H||_F = 1
    double min_eigenvalue = 0.0;
};

enum class WitnessStatus {
    Found,
    NotFound,        // search failure; NOT a proof of infeasibility
    NoWitnessExists, // constraint nullspace is empty: no Hermitian H at all
};

struct FindWitnessOptions {
    int restarts = 24;
    int max_iters = 400;
    double pd_threshold = 1e-6;
    double svd_rank_tol = 1e-10; // relative to sigma_max
    std::uint64_t seed = 2026;
};

struct FindWitnessResult {
    WitnessStatus status = WitnessStatus::NotFound;
    HermitianWitness witness;    // valid when status == Found
    double best_lambda_min = 0.0;
    int nullspace_dim = 0;
    std::string message;
};

/// Nullspace of witness_constraints via SVD, then minimum-eigenvalue
/// maximization over the unit sphere of nullspace coordinates by multi-start
/// projected subgradient ascent. Deterministic for a fixed seed.
FindWitnessResult find_witness(const SystemSpec& spec, const FindWitnessOptions& opts = {});

/// Samples confirm that Y -> Im<p(xi;Y), HY> is odd, i.e. the value at -Y is
/// the negative of the value at Y, to 1e-12 relative.
bool check_oddness(const SystemSpec& spec, const Eigen::MatrixXcd& H, int n_samples = 100,
                   std::uint64_t seed = 2026);

} // namespace qdnls
