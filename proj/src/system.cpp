#include "qdnls/system.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qdnls {

using json = nlohmann::json;

void SystemSpec::validate() const {
    if (n_components == 0) throw std::invalid_argument("SystemSpec: N must be positive");
    if (masses.size() != n_components)
        throw std::invalid_argument("SystemSpec: masses size does not match N");
    for (std::size_t j = 0; j < masses.size(); ++j)
        if (masses[j] == 0.0 || !std::isfinite(masses[j]))
            throw std::invalid_argument("SystemSpec: mass " + std::to_string(j + 1) + " must be nonzero");
    const int N = (int)n_components;
    for (const auto& e : coeffs) {
        std::ostringstream tag;
        tag << "coefficient (j=" << e.j + 1 << ",k=" << e.k + 1 << ",l=" << e.l + 1 << ")";
        if (e.j < 0 || e.j >= N) throw std::invalid_argument("SystemSpec: " + tag.str() + ": j out of range");
        if (e.k < 0 || e.k >= 2 * N || e.l < 0 || e.l >= 2 * N)
            throw std::invalid_argument("SystemSpec: " + tag.str() + ": sharp index out of range");
        for (const DerivIdx* d : {&e.alpha, &e.beta})
            if (d->d1 < 0 || d->d2 < 0 || d->order() > 1)
                throw std::invalid_argument("SystemSpec: " + tag.str() + ": derivative index must have order <= 1");
    }
}

Eigen::VectorXcd sharp_extend(const Eigen::VectorXcd& z) {
    const Eigen::Index N = z.size();
    Eigen::VectorXcd out(2 * N);
    out.head(N) = z;
    out.tail(N) = z.conjugate();
    return out;
}

namespace {

// d^alpha of the sharp component k, from values and gradients of u
cplx sharp_factor(const Eigen::VectorXcd& u, const Eigen::MatrixXcd& grad, int k,
                  const DerivIdx& a) {
    const int N = (int)u.size();
    if (a.order() == 0) return k < N ? u(k) : std::conj(u(k - N));
    const int axis = a.d1 == 1 ? 0 : 1;
    return k < N ? grad(k, axis) : std::conj(grad(k - N, axis));
}

// (i * ms_k * xi)^alpha as an exact product (i^0=1, i^1=i)
cplx symbol_factor(double ms, const Eigen::Vector2d& xi, const DerivIdx& a) {
    if (a.order() == 0) return cplx(1.0, 0.0);
    const double x = a.d1 == 1 ? xi(0) : xi(1);
    return cplx(0.0, ms * x);
}

} // namespace

Eigen::VectorXcd eval_nonlinearity(const SystemSpec& spec, const Eigen::VectorXcd& u,
                                   const Eigen::MatrixXcd& grad_u) {
    const int N = (int)spec.N();
    if (u.size() != N || grad_u.rows() != N || grad_u.cols() != 2)
        throw std::invalid_argument("eval_nonlinearity: dimension mismatch");
    Eigen::VectorXcd F = Eigen::VectorXcd::Zero(N);
    for (const auto& e : spec.coeffs)
        F(e.j) += e.c * sharp_factor(u, grad_u, e.k, e.alpha) * sharp_factor(u, grad_u, e.l, e.beta);
    return F;
}

Eigen::VectorXcd eval_p(const SystemSpec& spec, const Eigen::Vector2d& xi,
                        const Eigen::VectorXcd& Y) {
    const int N = (int)spec.N();
    if (Y.size() != N) throw std::invalid_argument("eval_p: dimension mismatch");
    Eigen::VectorXcd Ys = sharp_extend(Y);
    Eigen::VectorXcd p = Eigen::VectorXcd::Zero(N);
    for (const auto& e : spec.coeffs)
        p(e.j) += e.c * symbol_factor(spec.sharp_mass(e.k), xi, e.alpha) *
                  symbol_factor(spec.sharp_mass(e.l), xi, e.beta) * Ys(e.k) * Ys(e.l);
    return p;
}

std::vector<PPoly> resonant_symbol_coefficients(const SystemSpec& spec) {
    std::vector<PPoly> tables(spec.N());
    for (const auto& e : spec.coeffs) {
        // i^(|alpha|+|beta|) and the mass factors, kept exact
        cplx scal = e.c;
        if (e.alpha.order() == 1) scal *= cplx(0.0, spec.sharp_mass(e.k));
        if (e.beta.order() == 1) scal *= cplx(0.0, spec.sharp_mass(e.l));
        PMonomial mono;
        mono.e1 = e.alpha.d1 + e.beta.d1;
        mono.e2 = e.alpha.d2 + e.beta.d2;
        mono.k = std::min(e.k, e.l);
        mono.l = std::max(e.k, e.l);
        tables[(std::size_t)e.j][mono] += scal;
    }
    for (auto& t : tables)
        std::erase_if(t, [](const auto& kv) { return kv.second == cplx(0.0, 0.0); });
    return tables;
}

cplx eval_ppoly(const PPoly& poly, const Eigen::Vector2d& xi, const Eigen::VectorXcd& Y,
                std::size_t) {
    Eigen::VectorXcd Ys = sharp_extend(Y);
    cplx acc(0.0, 0.0);
    for (const auto& [m, c] : poly) {
        cplx term = c * Ys(m.k) * Ys(m.l);
        for (int i = 0; i < m.e1; ++i) term *= xi(0);
        for (int i = 0; i < m.e2; ++i) term *= xi(1);
        acc += term;
    }
    return acc;
}

bool p_is_null(const std::vector<PPoly>& tables) {
    for (const auto& t : tables)
        if (!t.empty()) return false;
    return true;
}

Lambda3Report eval_lambda3(const SystemSpec& spec) {
    const int N = (int)spec.N();
    if (N != 3) throw std::invalid_argument("eval_lambda3: system must have N = 3");
    // allowed (k, l) pair per equation: F1 ~ (conj u2) u3, F2 ~ u3 (conj u1),
    // F3 ~ u1 u2
    const std::array<std::pair<int, int>, 3> pattern = {{{N + 1, 2}, {2, N + 0}, {0, 1}}};
    Lambda3Report rep;
    for (const auto& e : spec.coeffs) {
        if (e.c == cplx(0.0, 0.0)) continue;
        const auto [pk, pl] = pattern[(std::size_t)e.j];
        if (e.k != pk || e.l != pl) {
            std::ostringstream msg;
            msg << "eval_lambda3: entry (j=" << e.j + 1 << ",k=" << e.k + 1 << ",l=" << e.l + 1
                << ") does not match the three-component coupling pattern (expected k=" << pk + 1
                << ",l=" << pl + 1 << ")";
            throw std::invalid_argument(msg.str());
        }
        cplx scal = e.c;
        if (e.alpha.order() == 1) scal *= cplx(0.0, spec.sharp_mass(e.k));
        if (e.beta.order() == 1) scal *= cplx(0.0, spec.sharp_mass(e.l));
        rep.lambda[(std::size_t)e.j][{e.alpha.d1 + e.beta.d1, e.alpha.d2 + e.beta.d2}] += scal;
    }
    rep.is_null3 = true;
    for (auto& L : rep.lambda) {
        std::erase_if(L, [](const auto& kv) { return kv.second == cplx(0.0, 0.0); });
        if (!L.empty()) rep.is_null3 = false;
    }
    return rep;
}

SystemSpec make_preset(const std::string& name, const PresetParams& p) {
    SystemSpec s;
    if (name == "two-component") {
        // L_{m1} u1 = lambda1 conj(u1) u2,  L_{2 m1} u2 = lambda2 u1^2
        s.n_components = 2;
        s.masses = {p.m1, 2.0 * p.m1};
        s.coeffs.push_back({0, 2, 1, {0, 0}, {0, 0}, p.lambda1});
        s.coeffs.push_back({1, 0, 0, {0, 0}, {0, 0}, p.lambda2});
    } else if (name == "three-component-null") {
        // F3 = c (d1 u1)(d2 u2) - c (d2 u1)(d1 u2), F1 = F2 = 0
        s.n_components = 3;
        s.masses = {1.0, 1.0, 2.0};
        s.coeffs.push_back({2, 0, 1, {1, 0}, {0, 1}, p.c});
        s.coeffs.push_back({2, 0, 1, {0, 1}, {1, 0}, -p.c});
    } else if (name == "colin-colin") {
        // laser-plasma model with A_C=(u1,u2), A_R=(u3,u4), E=(u5,u6)
        if (p.alpha == 0.0 || p.beta == 0.0 || p.gamma == 0.0)
            throw std::invalid_argument("colin-colin: alpha, beta, gamma must be nonzero");
        s.n_components = 6;
        const double m_c = 1.0 / (2.0 * p.alpha);
        const double m_r = 1.0 / (2.0 * p.beta);
        const double m_e = 1.0 / (2.0 * p.gamma);
        s.masses = {m_c, m_c, m_r, m_r, m_e, m_e};
        const cplx neg(-1.0, 0.0), pos(1.0, 0.0);
        // F1 = -(d1 u5 + d2 u6) u3, F2 = -(d1 u5 + d2 u6) u4
        s.coeffs.push_back({0, 4, 2, {1, 0}, {0, 0}, neg});
        s.coeffs.push_back({0, 5, 2, {0, 1}, {0, 0}, neg});
        s.coeffs.push_back({1, 4, 3, {1, 0}, {0, 0}, neg});
        s.coeffs.push_back({1, 5, 3, {0, 1}, {0, 0}, neg});
        // F3 = -(d1 conj(u5) + d2 conj(u6)) u1, F4 likewise with u2
        s.coeffs.push_back({2, 10, 0, {1, 0}, {0, 0}, neg});
        s.coeffs.push_back({2, 11, 0, {0, 1}, {0, 0}, neg});
        s.coeffs.push_back({3, 10, 1, {1, 0}, {0, 0}, neg});
        s.coeffs.push_back({3, 11, 1, {0, 1}, {0, 0}, neg});
        // F5 = d1(u1 conj(u3) + u2 conj(u4)), F6 = d2(...)
        s.coeffs.push_back({4, 0, 8, {1, 0}, {0, 0}, pos});
        s.coeffs.push_back({4, 0, 8, {0, 0}, {1, 0}, pos});
        s.coeffs.push_back({4, 1, 9, {1, 0}, {0, 0}, pos});
        s.coeffs.push_back({4, 1, 9, {0, 0}, {1, 0}, pos});
        s.coeffs.push_back({5, 0, 8, {0, 1}, {0, 0}, pos});
        s.coeffs.push_back({5, 0, 8, {0, 0}, {0, 1}, pos});
        s.coeffs.push_back({5, 1, 9, {0, 1}, {0, 0}, pos});
        s.coeffs.push_back({5, 1, 9, {0, 0}, {0, 1}, pos});
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    s.validate();
    return s;
}

std::optional<Eigen::MatrixXcd> preset_witness(const std::string& name, const PresetParams& p) {
    if (name == "two-component") {
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(2, 2);
        H(0, 0) = p.lambda1 * p.lambda2;
        H(1, 1) = std::norm(p.lambda1);
        return H;
    }
    if (name == "colin-colin") {
        Eigen::VectorXcd d(6);
        d << 2.0, 2.0, 1.0, 1.0, 1.0, 1.0;
        return Eigen::MatrixXcd(d.asDiagonal());
    }
    return std::nullopt;
}

std::vector<std::string> preset_names() {
    return {"two-component", "three-component-null", "colin-colin"};
}

std::string system_to_json(const SystemSpec& spec) {
    json j;
    j["n_components"] = spec.n_components;
    j["masses"] = spec.masses;
    j["coefficients"] = json::array();
    for (const auto& e : spec.coeffs) {
        json r;
        r["j"] = e.j + 1;
        r["k"] = e.k + 1;
        r["l"] = e.l + 1;
        r["alpha"] = {e.alpha.d1, e.alpha.d2};
        r["beta"] = {e.beta.d1, e.beta.d2};
        r["re"] = e.c.real();
        r["im"] = e.c.imag();
        j["coefficients"].push_back(r);
    }
    return j.dump(2);
}

SystemSpec system_from_json(const std::string& text) {
    json j = json::parse(text);
    SystemSpec s;
    s.n_components = j.at("n_components").get<std::size_t>();
    s.masses = j.at("masses").get<std::vector<double>>();
    for (const auto& r : j.value("coefficients", json::array())) {
        CoeffEntry e;
        e.j = r.at("j").get<int>() - 1;
        e.k = r.at("k").get<int>() - 1;
        e.l = r.at("l").get<int>() - 1;
        e.alpha = {r.at("alpha")[0].get<int>(), r.at("alpha")[1].get<int>()};
        e.beta = {r.at("beta")[0].get<int>(), r.at("beta")[1].get<int>()};
        e.c = cplx(r.value("re", 0.0), r.value("im", 0.0));
        s.coeffs.push_back(e);
    }
    s.validate();
    return s;
}

void save_system(const SystemSpec& spec, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << system_to_json(spec) << "\n";
}

SystemSpec load_system(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return system_from_json(ss.str());
}

} // namespace qdnls
