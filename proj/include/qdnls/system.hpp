#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qdnls {

using cplx = std::complex<double>;

/// First-order derivative multi-index: (0,0), (1,0) or (0,1).
struct DerivIdx {
    int d1 = 0;
    int d2 = 0;
    int order() const { return d1 + d2; }
    bool operator==(const DerivIdx&) const = default;
};

/// One entry C_{j,k,l}^{alpha,beta} of the quadratic coefficient tensor.
/// All indices are 0-based here; config files use the 1-based convention
/// documented in the schema. j in [0,N), k,l in [0,2N) with the upper half
/// addressing conjugated components.
struct CoeffEntry {
    int j = 0;
    int k = 0;
    int l = 0;
    DerivIdx alpha;
    DerivIdx beta;
    cplx c;
};

/// A quadratic derivative NLS system: component masses plus the sparse
/// coefficient tensor of the nonlinearity
///   F_j(u, du) = sum C_{j,k,l}^{alpha,beta} (d^alpha us_k)(d^beta us_l),
/// where us is the conjugation-doubled (sharp) extension of u.
struct SystemSpec {
    std::size_t n_components = 0;
    std::vector<double> masses;
    std::vector<CoeffEntry> coeffs;

    std::size_t N() const { return n_components; }

    /// Extended mass table: ms_k = m_k for k < N, -m_{k-N} for k >= N.
    double sharp_mass(int k) const {
        return k < (int)n_components ? masses[(std::size_t)k]
                                     : -masses[(std::size_t)(k - (int)n_components)];
    }

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;
};

/// Doubles z to (z, conj z).
Eigen::VectorXcd sharp_extend(const Eigen::VectorXcd& z);

/// Pointwise nonlinearity F(u, grad_u). grad_u is N x 2 (columns: d1, d2);
/// gradients of conjugated components are conjugates of the given gradients.
Eigen::VectorXcd eval_nonlinearity(const SystemSpec& spec, const Eigen::VectorXcd& u,
                                   const Eigen::MatrixXcd& grad_u);

/// Resonant symbol p(xi; Y): each derivative d^alpha on sharp component k
/// is replaced by the factor (i * ms_k * xi)^alpha.
Eigen::VectorXcd eval_p(const SystemSpec& spec, const Eigen::Vector2d& xi,
                        const Eigen::VectorXcd& Y);

/// Canonical monomial of p_j: xi1^e1 xi2^e2 * Ys_k Ys_l with k <= l
/// (0-based sharp indices).
struct PMonomial {
    int e1 = 0;
    int e2 = 0;
    int k = 0;
    int l = 0;
    auto operator<=>(const PMonomial&) const = default;
};

using PPoly = std::map<PMonomial, cplx>;

/// Exact canonical coefficient tables of p_j, one per component, with the
/// k<->l (and matching alpha<->beta) symmetrization applied and exact-zero
/// monomials pruned. p vanishes identically iff every table is empty.
std::vector<PPoly> resonant_symbol_coefficients(const SystemSpec& spec);

cplx eval_ppoly(const PPoly& poly, const Eigen::Vector2d& xi, const Eigen::VectorXcd& Y,
                std::size_t n_components);

bool p_is_null(const std::vector<PPoly>& tables);

/// Polynomial in (xi1, xi2): (e1, e2) -> coefficient.
using XiPoly = std::map<std::pair<int, int>, cplx>;

struct Lambda3Report {
    std::array<XiPoly, 3> lambda;
    bool is_null3 = false;
};

/// Null symbols Lambda_1..3 for a three-component system whose coupling
/// pattern is F1 ~ (conj u2, u3), F2 ~ (u3, conj u1), F3 ~ (u1, u2).
/// Throws std::invalid_argument naming the first entry outside that pattern.
Lambda3Report eval_lambda3(const SystemSpec& spec);

/// Named example systems.
struct PresetParams {
    cplx lambda1 = 1.0;  // two-component
    cplx lambda2 = 1.0;
    double m1 = 1.0;
    double alpha = 0.5;  // colin-colin
    double beta = 1.0;
    double gamma = 1.0;
    cplx c = 1.0;        // three-component-null
};

/// Presets: "two-component", "three-component-null", "colin-colin".
SystemSpec make_preset(const std::string& name, const PresetParams& params = {});

/// Known witness candidate carried by a preset (Remarks 2 and 4), if any.
std::optional<Eigen::MatrixXcd> preset_witness(const std::string& name,
                                               const PresetParams& params = {});

std::vector<std::string> preset_names();

/// Config (de)serialization; schema: {"n_components", "masses", "coefficients":
/// [{"j","k","l","alpha":[a1,a2],"beta":[b1,b2],"re","im"}]} with 1-based
/// j, k, l in the file.
std::string system_to_json(const SystemSpec& spec);
SystemSpec system_from_json(const std::string& text);
void save_system(const SystemSpec& spec, const std::string& path);
SystemSpec load_system(const std::string& path);

} // namespace qdnls
