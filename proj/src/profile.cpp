#include "qdnls/profile.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qdnls {

ProfileGrid initial_profile(const PhiHatSampler& phi_hat, const std::vector<double>& masses,
                            const std::vector<Eigen::Vector2d>& xi_points) {
    if (xi_points.empty()) throw std::invalid_argument("initial_profile: xi_points empty");
    ProfileGrid g;
    g.xi_points = xi_points;
    g.tau = 0.0;
    const int N = (int)masses.size();
    g.Y.reserve(xi_points.size());
    for (const auto& xi : xi_points) {
        Eigen::VectorXcd y(N);
        for (int j = 0; j < N; ++j)
            y(j) = cplx(0.0, -masses[(std::size_t)j]) * phi_hat(j, masses[(std::size_t)j] * xi);
        g.Y.push_back(std::move(y));
    }
    return g;
}

Eigen::VectorXcd profile_rhs(const SystemSpec& spec, const Eigen::Vector2d& xi,
                             const Eigen::VectorXcd& Y) {
    return cplx(0.0, -1.0) * eval_p(spec, xi, Y);
}

double lyapunov(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& Y) {
    if ((H - H.adjoint()).norm() > 1e-12 * std::max(1.0, H.norm()))
        throw std::invalid_argument("lyapunov: H is not Hermitian");
    return (H * Y).dot(Y).real();
}

namespace {

inline void rk4_step(const SystemSpec& spec, const Eigen::Vector2d& xi, Eigen::VectorXcd& Y,
                     double h) {
    const Eigen::VectorXcd k1 = profile_rhs(spec, xi, Y);
    const Eigen::VectorXcd k2 = profile_rhs(spec, xi, Y + 0.5 * h * k1);
    const Eigen::VectorXcd k3 = profile_rhs(spec, xi, Y + 0.5 * h * k2);
    const Eigen::VectorXcd k4 = profile_rhs(spec, xi, Y + h * k3);
    Y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace

ProfileResult integrate_profile(const SystemSpec& spec, const ProfileGrid& start,
                                double tau_end, double dtau,
                                const std::optional<Eigen::MatrixXcd>& H,
                                std::size_t trajectory_cadence) {
    if (!(dtau > 0.0)) throw std::invalid_argument("integrate_profile: dtau must be positive");
    if (!(tau_end > start.tau)) throw std::invalid_argument("integrate_profile: tau_end must exceed start tau");
    if (start.xi_points.empty() || start.Y.size() != start.xi_points.size())
        throw std::invalid_argument("integrate_profile: malformed profile grid");
    for (const auto& y : start.Y)
        if ((std::size_t)y.size() != spec.N())
            throw std::invalid_argument("integrate_profile: Y size does not match the system");
    if (trajectory_cadence == 0) trajectory_cadence = 1;
    const std::size_t P = start.xi_points.size();
    const double span = tau_end - start.tau;
    const std::size_t nsteps = (std::size_t)std::ceil(span / dtau - 1e-12);

    // record layout is fixed up front so every point can fill its own slots
    std::vector<std::size_t> rec_steps; // step indices after which we record
    rec_steps.push_back(0);
    for (std::size_t s = trajectory_cadence; s < nsteps; s += trajectory_cadence) rec_steps.push_back(s);
    if (rec_steps.back() != nsteps) rec_steps.push_back(nsteps);

    ProfileResult out;
    out.xi_points = start.xi_points;
    out.taus.resize(rec_steps.size());
    out.trajectory.assign(rec_steps.size(), std::vector<Eigen::VectorXcd>(P));
    const bool track_nu = H.has_value();
    std::vector<std::vector<double>> nu2; // [step][point]
    if (track_nu) nu2.assign(nsteps + 1, std::vector<double>(P, 0.0));

    auto tau_at = [&](std::size_t s) {
        return s == nsteps ? tau_end : start.tau + double(s) * dtau;
    };
    for (std::size_t r = 0; r < rec_steps.size(); ++r) out.taus[r] = tau_at(rec_steps[r]);

    bool bad = false;
    double bad_tau = 0.0;
    Eigen::Vector2d bad_xi = Eigen::Vector2d::Zero();

#pragma omp parallel for schedule(static)
    for (long long pp = 0; pp < (long long)P; ++pp) {
        const std::size_t p = (std::size_t)pp;
        const Eigen::Vector2d& xi = start.xi_points[p];
        Eigen::VectorXcd Y = start.Y[p];
        std::size_t next_rec = 0;
        for (std::size_t s = 0; s <= nsteps; ++s) {
            if (!Y.allFinite()) {
#pragma omp critical
                {
                    if (!bad) {
                        bad = true;
                        bad_tau = tau_at(s);
                        bad_xi = xi;
                    }
                }
                break;
            }
            if (track_nu) nu2[s][p] = lyapunov(*H, Y);
            if (next_rec < rec_steps.size() && rec_steps[next_rec] == s)
                out.trajectory[next_rec++][p] = Y;
            if (s < nsteps) {
                const double h = std::min(dtau, tau_end - tau_at(s));
                rk4_step(spec, xi, Y, h);
            }
        }
    }
    if (bad) {
        std::ostringstream msg;
        msg << "integrate_profile: nonfinite state at tau=" << bad_tau << ", xi=(" << bad_xi(0)
            << "," << bad_xi(1) << ")";
        throw std::runtime_error(msg.str());
    }

    if (track_nu) {
        out.lyapunov.records.resize(nsteps + 1);
        for (std::size_t s = 0; s <= nsteps; ++s) {
            LyapunovRecord rec;
            rec.tau = tau_at(s);
            rec.nu2 = std::move(nu2[s]);
            double m = 0.0;
            for (double v : rec.nu2) m = std::max(m, v);
            rec.sup_nu = std::sqrt(std::max(0.0, m));
            out.lyapunov.records[s] = std::move(rec);
        }
    }
    return out;
}

ProfileIntegrator::ProfileIntegrator(const SystemSpec& spec, ProfileGrid start, double dtau)
    : spec_(spec), grid_(std::move(start)), dtau_(dtau) {
    if (!(dtau_ > 0.0)) throw std::invalid_argument("ProfileIntegrator: dtau must be positive");
    for (const auto& y : grid_.Y)
        if ((std::size_t)y.size() != spec_.N())
            throw std::invalid_argument("ProfileIntegrator: Y size does not match the system");
}

void ProfileIntegrator::advance_to(double tau_target) {
    if (tau_target < grid_.tau - 1e-12)
        throw std::invalid_argument("ProfileIntegrator: targets must be nondecreasing");
    const std::size_t P = grid_.xi_points.size();
    while (grid_.tau < tau_target - 1e-14) {
        const double h = std::min(dtau_, tau_target - grid_.tau);
#pragma omp parallel for schedule(static)
        for (long long p = 0; p < (long long)P; ++p)
            rk4_step(spec_, grid_.xi_points[(std::size_t)p], grid_.Y[(std::size_t)p], h);
        grid_.tau += h;
    }
    grid_.tau = tau_target;
}

Eigen::VectorXcd integrate_point_reference(const SystemSpec& spec, const Eigen::Vector2d& xi,
                                           Eigen::VectorXcd Y, double tau0, double tau_end,
                                           double dtau) {
    // step layout matches integrate_profile exactly (index-based tau)
    const std::size_t nsteps = (std::size_t)std::ceil((tau_end - tau0) / dtau - 1e-12);
    for (std::size_t s = 0; s < nsteps; ++s) {
        const double h = std::min(dtau, tau_end - (tau0 + double(s) * dtau));
        rk4_step(spec, xi, Y, h);
    }
    return Y;
}

} // namespace qdnls
