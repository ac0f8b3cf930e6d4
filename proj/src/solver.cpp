#include "qdnls/solver.hpp"

#include "qdnls/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace qdnls {

bool SimState::all_finite() const {
    for (const auto& f : fields)
        if (!f.all_finite()) return false;
    return true;
}

namespace {

// key for the per-stage factor cache: sharp index plus derivative slot
struct FactorKey {
    int k;
    int d; // 0: none, 1: d1, 2: d2
    auto operator<=>(const FactorKey&) const = default;
};

int deriv_slot(const DerivIdx& a) { return a.order() == 0 ? 0 : (a.d1 == 1 ? 1 : 2); }

} // namespace

std::vector<Field2D> nonlinear_rhs(const SystemSpec& spec, const SimState& state) {
    const int N = (int)spec.N();
    if ((int)state.fields.size() != N) throw std::invalid_argument("nonlinear_rhs: component count mismatch");
    const Grid2D& g = state.fields[0].grid();

    // dealiased spectra of the components actually used
    std::vector<Field2D> spectra(spec.N());
    std::vector<bool> have_spec(spec.N(), false);
    auto spectrum = [&](int base) -> const Field2D& {
        if (!have_spec[(std::size_t)base]) {
            Field2D s = state.fields[(std::size_t)base].to_frequency();
            dealias_23(s);
            spectra[(std::size_t)base] = std::move(s);
            have_spec[(std::size_t)base] = true;
        }
        return spectra[(std::size_t)base];
    };

    std::map<FactorKey, Field2D> factors;
    auto factor = [&](int k, const DerivIdx& a) -> const Field2D& {
        FactorKey key{k, deriv_slot(a)};
        auto it = factors.find(key);
        if (it != factors.end()) return it->second;
        const int base = k < N ? k : k - N;
        Field2D s = spectrum(base); // copy of the dealiased spectrum
        if (key.d != 0) {
            const int axis = key.d;
            for (std::size_t i = 0; i < g.n; ++i) {
                const double k1 = g.kappa(i);
                for (std::size_t j = 0; j < g.n; ++j)
                    s.at(i, j) *= cplx(0.0, axis == 1 ? k1 : g.kappa(j));
            }
        }
        Field2D phys = s.to_physical();
        if (k >= N) phys = phys.conjugate();
        return factors.emplace(key, std::move(phys)).first->second;
    };

    std::vector<Field2D> F(spec.N(), Field2D(g, Rep::Physical));
    for (const auto& e : spec.coeffs) {
        const Field2D& f1 = factor(e.k, e.alpha);
        const Field2D& f2 = factor(e.l, e.beta);
        Field2D& out = F[(std::size_t)e.j];
        const std::size_t sz = out.values().size();
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < (long long)sz; ++i)
            out.values()[(std::size_t)i] += e.c * f1.values()[(std::size_t)i] * f2.values()[(std::size_t)i];
    }
    for (auto& f : F) {
        Field2D s = f.to_frequency();
        dealias_23(s);
        f = s.to_physical();
        if (!f.all_finite()) throw std::runtime_error("nonlinear_rhs: nonfinite output");
    }
    return F;
}

namespace {

void half_free(const SystemSpec& spec, SimState& s, double dt) {
    for (std::size_t j = 0; j < s.fields.size(); ++j)
        s.fields[j] = free_propagate(spec.masses[j], dt, s.fields[j]);
}

void apply_exp_filter(Field2D& f, double strength, int order) {
    Field2D s = f.to_frequency();
    const Grid2D& g = f.grid();
    const double kmax = double(g.n / 2) * g.dk();
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j) {
            const double k1 = g.kappa(i) / kmax, k2 = g.kappa(j) / kmax;
            const double r = std::sqrt(k1 * k1 + k2 * k2);
            s.at(i, j) *= std::exp(-strength * std::pow(r, order));
        }
    f = s.to_physical();
}

} // namespace

SimState step(const SystemSpec& spec, const SimState& state, double dt, const StepOptions& opts) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    if (dt > opts.dt_max)
        throw std::invalid_argument("step: dt exceeds the nonlinear substep guard dt_max");
    SimState s = state;
    half_free(spec, s, dt / 2.0);

    // RK4 on du/dt = -i F(u, d_x u), spectral derivatives at every stage
    const std::size_t N = s.fields.size();
    auto eval = [&](const SimState& st) {
        std::vector<Field2D> k = nonlinear_rhs(spec, st);
        for (auto& f : k) f *= cplx(0.0, -1.0);
        return k;
    };
    auto advanced = [&](const SimState& st, const std::vector<Field2D>& k, double h) {
        SimState out = st;
        for (std::size_t j = 0; j < N; ++j) {
            Field2D add = k[j];
            add *= h;
            out.fields[j] += add;
        }
        return out;
    };
    std::vector<Field2D> k1 = eval(s);
    std::vector<Field2D> k2 = eval(advanced(s, k1, dt / 2.0));
    std::vector<Field2D> k3 = eval(advanced(s, k2, dt / 2.0));
    std::vector<Field2D> k4 = eval(advanced(s, k3, dt));
    for (std::size_t j = 0; j < N; ++j) {
        Field2D incr = k1[j];
        incr += k4[j];
        Field2D mid = k2[j];
        mid += k3[j];
        mid *= 2.0;
        incr += mid;
        incr *= dt / 6.0;
        s.fields[j] += incr;
    }

    half_free(spec, s, dt / 2.0);
    if (opts.exp_filter)
        for (auto& f : s.fields) apply_exp_filter(f, opts.filter_strength, opts.filter_order);
    s.t = state.t + dt;
    if (!s.all_finite()) {
        std::ostringstream msg;
        msg << "step: nonfinite state at t=" << s.t;
        throw std::runtime_error(msg.str());
    }
    return s;
}

std::vector<Field2D> compute_A(const SystemSpec& spec, const SimState& state) {
    if (!(state.t > 0.0)) throw std::invalid_argument("compute_A: requires t > 0");
    std::vector<Field2D> A;
    A.reserve(state.fields.size());
    for (std::size_t j = 0; j < state.fields.size(); ++j)
        A.push_back(scaled_fourier(spec.masses[j],
                                   free_propagate(spec.masses[j], -state.t, state.fields[j])));
    return A;
}

DiagnosticSampler::DiagnosticSampler(const Grid2D& g, const std::vector<double>& masses,
                                     std::vector<double> xi1, std::vector<double> xi2)
    : grid_(g), xi1_(std::move(xi1)), xi2_(std::move(xi2)) {
    if (xi1_.empty() || xi2_.empty())
        throw std::invalid_argument("DiagnosticSampler: xi point lists must be nonempty");
    for (double a : xi1_)
        for (double b : xi2_) points_.push_back(Eigen::Vector2d(a, b));
    const std::size_t n = g.n;
    t1_.reserve(masses.size());
    t2_.reserve(masses.size());
    for (double m : masses) {
        Eigen::MatrixXcd T1((Eigen::Index)xi1_.size(), (Eigen::Index)n);
        Eigen::MatrixXcd T2((Eigen::Index)xi2_.size(), (Eigen::Index)n);
        for (std::size_t p = 0; p < xi1_.size(); ++p)
            for (std::size_t i = 0; i < n; ++i) {
                const double ph = -m * xi1_[p] * g.x(i);
                T1((Eigen::Index)p, (Eigen::Index)i) = cplx(std::cos(ph), std::sin(ph));
            }
        for (std::size_t q = 0; q < xi2_.size(); ++q)
            for (std::size_t j = 0; j < n; ++j) {
                const double ph = -m * xi2_[q] * g.x(j);
                T2((Eigen::Index)q, (Eigen::Index)j) = cplx(std::cos(ph), std::sin(ph));
            }
        t1_.push_back(std::move(T1));
        t2_.push_back(std::move(T2));
    }
}

Eigen::MatrixXcd DiagnosticSampler::sample_transformed(const SystemSpec& spec, double t,
                                                       const std::vector<Field2D>& gfields) const {
    if (!(t > 0.0)) throw std::invalid_argument("DiagnosticSampler: requires t > 0");
    const std::size_t N = gfields.size();
    const std::size_t n = grid_.n;
    Eigen::MatrixXcd out((Eigen::Index)N, (Eigen::Index)n_points());
    const double c = grid_.h() * grid_.h() / (2.0 * M_PI);
    for (std::size_t j = 0; j < N; ++j) {
        const double m = spec.masses[j];
        Field2D gj = free_propagate(m, -t, gfields[j]);
        Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> V(
            gj.values().data(), (Eigen::Index)n, (Eigen::Index)n);
        Eigen::MatrixXcd partial = V * t2_[j].transpose();            // n x P2
        Eigen::MatrixXcd full = t1_[j] * partial;                     // P1 x P2
        full *= cplx(0.0, -m) * c;
        Eigen::Index p = 0;
        for (Eigen::Index a = 0; a < full.rows(); ++a)
            for (Eigen::Index b = 0; b < full.cols(); ++b) out((Eigen::Index)j, p++) = full(a, b);
    }
    return out;
}

Eigen::MatrixXcd DiagnosticSampler::sample_A(const SystemSpec& spec, const SimState& state) const {
    return sample_transformed(spec, state.t, state.fields);
}

Eigen::MatrixXcd remainder(const SystemSpec& spec, const SimState& state,
                           const DiagnosticSampler& sampler, const Eigen::MatrixXcd& A) {
    if (!(state.t > 0.0)) throw std::invalid_argument("remainder: requires t > 0");
    std::vector<Field2D> F = nonlinear_rhs(spec, state);
    Eigen::MatrixXcd R = sampler.sample_transformed(spec, state.t, F);
    const auto& pts = sampler.points();
    for (std::size_t p = 0; p < pts.size(); ++p) {
        Eigen::VectorXcd Ap = A.col((Eigen::Index)p);
        Eigen::VectorXcd pp = eval_p(spec, pts[p], Ap);
        R.col((Eigen::Index)p) -= pp / state.t;
    }
    return R;
}

std::string DiagnosticsSeries::csv_header() const {
    std::ostringstream os;
    os << "t";
    for (std::size_t j = 1; j <= n_components; ++j) os << ",linf_" << j;
    for (std::size_t j = 1; j <= n_components; ++j) os << ",l2_" << j;
    os << ",weighted_linf,sys_l2,nu_sup,r_sup,red1_gap,cmp_sup,cmp_l2";
    if (smoothing_probe)
        for (std::size_t j = 1; j <= n_components; ++j) os << ",s_l2_" << j;
    return os.str();
}

void DiagnosticsSeries::write_csv(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fprintf(f, "%s\n", csv_header().c_str());
    for (const auto& r : records) {
        std::fprintf(f, "%.17g", r.t);
        for (double v : r.linf) std::fprintf(f, ",%.17g", v);
        for (double v : r.l2) std::fprintf(f, ",%.17g", v);
        std::fprintf(f, ",%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.weighted_linf, r.sys_l2,
                     r.nu_sup, r.r_sup, r.red1_gap, r.cmp_sup, r.cmp_l2);
        if (smoothing_probe)
            for (double v : r.s_l2) std::fprintf(f, ",%.17g", v);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

std::string DiagnosticsSeries::csv_schema(std::size_t N, bool probe) {
    std::ostringstream os;
    os << "t: simulation time\n"
       << "linf_j (j=1.." << N << "): sup norm of component j\n"
       << "l2_j (j=1.." << N << "): L2 norm of component j\n"
       << "weighted_linf: (1+t) * max_j linf_j\n"
       << "sys_l2: sqrt(sum_j l2_j^2)\n"
       << "nu_sup: sup over diagnostic xi points of sqrt(<A,HA>) (nan without H)\n"
       << "r_sup: sup over diagnostic xi points of |R(t,xi)| (nan before diag_t_min)\n"
       << "red1_gap: sup |i dA/dt (centered FD) - (1/t) p(xi,A) - R| (nan at ends)\n"
       << "cmp_sup: sup over shared xi points of |A(t,xi) - Y(log t, xi)| (nan without profile)\n"
       << "cmp_l2: RMS over shared xi points of the same difference\n";
    if (probe) os << "s_l2_j: ||S_{sign m_j}(t;kappa) u_j||_{L2}\n";
    return os.str();
}

SimulateResult simulate(const SystemSpec& spec, const SimState& initial,
                        const SimulateOptions& opts) {
    if ((int)initial.fields.size() != (int)spec.N())
        throw std::invalid_argument("simulate: component count mismatch");
    if (std::abs(initial.t - opts.t_start) > 1e-12)
        throw std::invalid_argument("simulate: initial state time must equal t_start");
    if (!(opts.t_end > opts.t_start)) throw std::invalid_argument("simulate: empty time window");
    if (!(opts.dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");

    const Grid2D& g = initial.fields[0].grid();
    const std::size_t nsteps = (std::size_t)std::llround((opts.t_end - opts.t_start) / opts.dt);
    const std::size_t cadence = std::max<std::size_t>(1, opts.cadence);

    DiagnosticSampler sampler(g, spec.masses, opts.diag_xi1, opts.diag_xi2);

    DiagnosticsSeries series;
    series.n_components = spec.N();
    series.smoothing_probe = opts.smoothing_kappa > 0.0;

    // red1 consistency check state: a record waits for A at the next step
    struct Pending {
        std::size_t rec_index;
        double t;
        Eigen::MatrixXcd A;      // A at the record step
        Eigen::MatrixXcd Aprev;  // A one step before
        Eigen::MatrixXcd R;
    };
    std::optional<Pending> pending;

    SimState cur = initial;
    SimState prev; // state one step back (valid once s >= 1)
    auto diag_ready = [&](double t) { return t >= opts.diag_t_min - 1e-12 && t > 0.0; };

    for (std::size_t s = 0; s <= nsteps; ++s) {
        if (pending) {
            // cur is now one step past the pending record
            Eigen::MatrixXcd Anext = sampler.sample_A(spec, cur);
            double gap = 0.0;
            const auto& pts = sampler.points();
            for (std::size_t p = 0; p < pts.size(); ++p) {
                Eigen::VectorXcd fd = cplx(0.0, 1.0) *
                                      (Anext.col((Eigen::Index)p) - pending->Aprev.col((Eigen::Index)p)) /
                                      (2.0 * opts.dt);
                Eigen::VectorXcd rhs = eval_p(spec, pts[p], pending->A.col((Eigen::Index)p)) / pending->t +
                                       pending->R.col((Eigen::Index)p);
                gap = std::max(gap, (fd - rhs).cwiseAbs().maxCoeff());
            }
            series.records[pending->rec_index].red1_gap = gap;
            pending.reset();
        }

        const bool is_record = (s % cadence == 0) || s == nsteps;
        if (is_record) {
            DiagnosticsRecord rec;
            rec.t = cur.t;
            rec.linf.resize(spec.N());
            rec.l2.resize(spec.N());
            double lmax = 0.0, l2s = 0.0;
            for (std::size_t j = 0; j < spec.N(); ++j) {
                rec.linf[j] = cur.fields[j].linf_norm();
                rec.l2[j] = cur.fields[j].l2_norm();
                lmax = std::max(lmax, rec.linf[j]);
                l2s += rec.l2[j] * rec.l2[j];
            }
            rec.weighted_linf = (1.0 + cur.t) * lmax;
            rec.sys_l2 = std::sqrt(l2s);

            if (diag_ready(cur.t)) {
                Eigen::MatrixXcd A = sampler.sample_A(spec, cur);
                Eigen::MatrixXcd R = remainder(spec, cur, sampler, A);
                rec.r_sup = R.cwiseAbs().maxCoeff();
                if (opts.H) {
                    double nmax = 0.0;
                    for (Eigen::Index p = 0; p < A.cols(); ++p) {
                        Eigen::VectorXcd a = A.col(p);
                        nmax = std::max(nmax, ((*opts.H) * a).dot(a).real());
                    }
                    rec.nu_sup = std::sqrt(std::max(0.0, nmax));
                }
                if (opts.profile_lookup) {
                    const std::vector<Eigen::VectorXcd> Y = opts.profile_lookup(std::log(cur.t));
                    if (Y.size() != sampler.points().size())
                        throw std::invalid_argument(
                            "simulate: profile lookup must return one Y per diagnostic xi point");
                    double sup = 0.0, sq = 0.0;
                    for (std::size_t p = 0; p < Y.size(); ++p) {
                        sup = std::max(sup, (A.col((Eigen::Index)p) - Y[p]).cwiseAbs().maxCoeff());
                        sq += (A.col((Eigen::Index)p) - Y[p]).squaredNorm();
                    }
                    rec.cmp_sup = sup;
                    rec.cmp_l2 = std::sqrt(sq / double(Y.size()));
                }
                if (opts.smoothing_kappa > 0.0) {
                    rec.s_l2.resize(spec.N());
                    for (std::size_t j = 0; j < spec.N(); ++j)
                        rec.s_l2[j] = smoothing_S(spec.masses[j] > 0 ? 1 : -1, cur.t,
                                                  opts.smoothing_kappa, cur.fields[j])
                                          .l2_norm();
                }
                if (opts.fd_consistency && s >= 1 && s < nsteps && diag_ready(prev.t)) {
                    Pending pend;
                    pend.rec_index = series.records.size();
                    pend.t = cur.t;
                    pend.A = A;
                    pend.Aprev = sampler.sample_A(spec, prev);
                    pend.R = std::move(R);
                    pending = std::move(pend);
                }
            }
            if (!opts.snapshot_dir.empty() && diag_ready(cur.t)) {
                for (std::size_t j = 0; j < spec.N(); ++j) {
                    char name[64];
                    std::snprintf(name, sizeof(name), "/field_%zu_t%.6f.bin", j + 1, cur.t);
                    cur.fields[j].write_binary(opts.snapshot_dir + name);
                }
            }
            series.records.push_back(std::move(rec));
        }
        if (s == nsteps) break;
        prev = cur;
        cur = step(spec, cur, opts.dt, opts.stepopt);
    }

    return {std::move(series), std::move(cur)};
}

ProfileLookup cointegrating_profile_lookup(const SystemSpec& spec, ProfileGrid init, double dtau) {
    auto integ = std::make_shared<ProfileIntegrator>(spec, std::move(init), dtau);
    return [integ](double tau) {
        integ->advance_to(tau);
        return integ->state().Y;
    };
}

SimState gaussian_data(const Grid2D& g, std::size_t n_components, double eps, double width,
                       double t) {
    SimState s;
    s.t = t;
    const double w2 = width * width;
    for (std::size_t j = 0; j < n_components; ++j)
        s.fields.push_back(make_field(g, [eps, w2](double x1, double x2) {
            return cplx(eps * std::exp(-(x1 * x1 + x2 * x2) / (2.0 * w2)), 0.0);
        }));
    return s;
}

PhiHatSampler gaussian_phi_hat(double eps, double width) {
    const double w2 = width * width;
    return [eps, w2](int, const Eigen::Vector2d& xi) {
        return cplx(eps * w2 * std::exp(-w2 * xi.squaredNorm() / 2.0), 0.0);
    };
}

std::vector<SmoothingProbeRecord> smoothing_energy_probe(const SystemSpec& spec,
                                                         const std::vector<SimState>& trajectory,
                                                         double kappa) {
    std::vector<SmoothingProbeRecord> out;
    out.reserve(trajectory.size());
    for (const auto& st : trajectory) {
        SmoothingProbeRecord rec;
        rec.t = st.t;
        for (std::size_t j = 0; j < st.fields.size(); ++j) {
            rec.s_l2.push_back(
                smoothing_S(spec.masses[j] > 0 ? 1 : -1, st.t, kappa, st.fields[j]).l2_norm());
            rec.l2.push_back(st.fields[j].l2_norm());
        }
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace qdnls
