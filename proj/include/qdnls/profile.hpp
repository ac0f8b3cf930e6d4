#pragma once

#include "qdnls/system.hpp"

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

namespace qdnls {

/// Sampled profile Y(tau, xi) on a list of xi points.
struct ProfileGrid {
    std::vector<Eigen::Vector2d> xi_points;
    std::vector<Eigen::VectorXcd> Y; // one N-vector per xi point
    double tau = 0.0;
};

struct LyapunovRecord {
    double tau = 0.0;
    std::vector<double> nu2; // per xi point
    double sup_nu = 0.0;
};

struct LyapunovSeries {
    std::vector<LyapunovRecord> records;
};

struct ProfileResult {
    std::vector<double> taus;                              // trajectory record times
    std::vector<std::vector<Eigen::VectorXcd>> trajectory; // [record][point]
    LyapunovSeries lyapunov;                               // every step when H given
    std::vector<Eigen::Vector2d> xi_points;
};

/// Samples phi_hat(j, xi) -> complex for component j (0-based).
using PhiHatSampler = std::function<cplx(int, const Eigen::Vector2d&)>;

/// Y_j(0, xi) = -i m_j phi_hat_j(m_j xi).
ProfileGrid initial_profile(const PhiHatSampler& phi_hat, const std::vector<double>& masses,
                            const std::vector<Eigen::Vector2d>& xi_points);

/// Right-hand side of i dY/dtau = p(xi; Y), i.e. -i p(xi; Y).
Eigen::VectorXcd profile_rhs(const SystemSpec& spec, const Eigen::Vector2d& xi,
                             const Eigen::VectorXcd& Y);

/// <Y, HY>, real and nonnegative for Hermitian positive semidefinite H.
/// Throws if H is not Hermitian.
double lyapunov(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& Y);

/// Classical RK4 in tau, fixed step (short final step to land on tau_end),
/// each xi point integrated independently (OpenMP-parallel over points).
/// Records the trajectory every trajectory_cadence steps (and at the final
/// step) and nu^2 at every step when H is given. Throws on nonfinite state,
/// naming the offending tau and xi.
ProfileResult integrate_profile(const SystemSpec& spec, const ProfileGrid& start,
                                double tau_end, double dtau,
                                const std::optional<Eigen::MatrixXcd>& H = std::nullopt,
                                std::size_t trajectory_cadence = 1);

/// Incremental integrator: advances the profile to arbitrary increasing tau
/// targets with fixed internal steps of at most dtau. Used to co-integrate
/// the profile alongside a PDE run.
class ProfileIntegrator {
  public:
    ProfileIntegrator(const SystemSpec& spec, ProfileGrid start, double dtau);
    void advance_to(double tau_target);
    const ProfileGrid& state() const { return grid_; }

  private:
    SystemSpec spec_;
    ProfileGrid grid_;
    double dtau_;
};

/// Single serial RK4 trajectory for one xi point; reference implementation
/// used by tests and the benchmark.
Eigen::VectorXcd integrate_point_reference(const SystemSpec& spec, const Eigen::Vector2d& xi,
                                           Eigen::VectorXcd Y, double tau0, double tau_end,
                                           double dtau);

} // namespace qdnls
