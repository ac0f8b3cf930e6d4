#pragma once

#include "qdnls/grid.hpp"
#include "qdnls/profile.hpp"
#include "qdnls/system.hpp"

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace qdnls {

/// Full simulation state: physical-representation fields u_j at time t.
struct SimState {
    double t = 0.0;
    std::vector<Field2D> fields;
    bool all_finite() const;
};

/// F_j(u, d_x u) on the grid, gradients spectral, 2/3-rule dealiasing applied
/// to the product factors and to the result.
std::vector<Field2D> nonlinear_rhs(const SystemSpec& spec, const SimState& state);

struct StepOptions {
    double dt_max = 0.1;          // nonlinear substep stability guard
    bool exp_filter = false;      // optional high-frequency filter, off by default
    double filter_strength = 36.0;
    int filter_order = 36;
};

/// One Strang step: exact half free propagation per component, RK4 on
/// du/dt = -i F(u, d_x u) over the full dt, half free propagation.
/// Throws on nonfinite state, reporting t.
SimState step(const SystemSpec& spec, const SimState& state, double dt,
              const StepOptions& opts = {});

/// A_j(t, .) = F_{m_j} U_{m_j}(t)^{-1} u_j(t, .) on each component's own
/// rescaled dual grid. Requires t > 0.
std::vector<Field2D> compute_A(const SystemSpec& spec, const SimState& state);

/// Exact semidiscrete sampler of F_m U_m(t)^{-1}(.) on a fixed tensor grid of
/// xi points, with precomputed phase tables (one per component mass).
class DiagnosticSampler {
  public:
    DiagnosticSampler(const Grid2D& g, const std::vector<double>& masses,
                      std::vector<double> xi1, std::vector<double> xi2);

    std::size_t n_points() const { return xi1_.size() * xi2_.size(); }
    const std::vector<Eigen::Vector2d>& points() const { return points_; }

    /// N x P matrix of A_j(t, xi_p) from the state (t > 0).
    Eigen::MatrixXcd sample_A(const SystemSpec& spec, const SimState& state) const;
    /// N x P matrix of F_{m_j}[U^{-1}_{m_j} g_j](xi_p) for given fields g_j.
    Eigen::MatrixXcd sample_transformed(const SystemSpec& spec, double t,
                                        const std::vector<Field2D>& gfields) const;

  private:
    Grid2D grid_;
    std::vector<double> xi1_, xi2_;
    std::vector<Eigen::Vector2d> points_;
    // per component: phase tables for both axes
    std::vector<Eigen::MatrixXcd> t1_, t2_;
};

/// R_j(t, xi_p) = F_{m_j}[U^{-1}_{m_j} F_j(u, du)](xi_p) - (1/t) p_j(xi_p, A(t, xi_p)).
Eigen::MatrixXcd remainder(const SystemSpec& spec, const SimState& state,
                           const DiagnosticSampler& sampler, const Eigen::MatrixXcd& A);

struct DiagnosticsRecord {
    double t = 0.0;
    std::vector<double> linf;   // per component sup norm
    std::vector<double> l2;     // per component L2 norm
    double weighted_linf = 0.0; // (1+t) * max_j linf_j
    double sys_l2 = 0.0;        // sqrt(sum_j l2_j^2)
    double nu_sup = std::numeric_limits<double>::quiet_NaN();
    double r_sup = std::numeric_limits<double>::quiet_NaN();
    double red1_gap = std::numeric_limits<double>::quiet_NaN(); // FD of i dA/dt vs (1/t)p + R
    double cmp_sup = std::numeric_limits<double>::quiet_NaN();  // |A - Y(log t)| sup
    double cmp_l2 = std::numeric_limits<double>::quiet_NaN();   // RMS over shared points
    std::vector<double> s_l2;   // smoothing probe, per component (optional)
};

struct DiagnosticsSeries {
    std::vector<DiagnosticsRecord> records;
    std::size_t n_components = 0;
    bool smoothing_probe = false;
    std::string csv_header() const;
    void write_csv(const std::string& path) const;
    static std::string csv_schema(std::size_t n_components, bool smoothing_probe);
};

/// Supplies Y(tau) on the diagnostic xi points; called with nondecreasing tau.
using ProfileLookup = std::function<std::vector<Eigen::VectorXcd>(double)>;

/// Lookup that co-integrates the profile ODE from the given tau=0 state.
ProfileLookup cointegrating_profile_lookup(const SystemSpec& spec, ProfileGrid init, double dtau);

struct SimulateOptions {
    double t_start = 1.0;
    double t_end = 50.0;
    double dt = 0.02;
    std::size_t cadence = 25;      // record every this many steps
    double diag_t_min = 1.0;       // diagnostics deferred below this time
    std::optional<Eigen::MatrixXcd> H;
    std::vector<double> diag_xi1 = {-2.0, -1.0, 0.0, 1.0, 2.0};
    std::vector<double> diag_xi2 = {-2.0, -1.0, 0.0, 1.0, 2.0};
    ProfileLookup profile_lookup;  // profile comparison when set
    double smoothing_kappa = 0.0;  // probe disabled when 0
    bool fd_consistency = true;
    StepOptions stepopt;
    std::string snapshot_dir;      // binary field snapshots at records when set
};

struct SimulateResult {
    DiagnosticsSeries series;
    SimState final_state;
};

/// Evolves the system from the given state (its t must equal opts.t_start)
/// and records diagnostics every cadence steps once t >= diag_t_min.
SimulateResult simulate(const SystemSpec& spec, const SimState& initial,
                        const SimulateOptions& opts);

/// eps * exp(-|x|^2 / (2 w^2)) in every component.
SimState gaussian_data(const Grid2D& g, std::size_t n_components, double eps, double width = 1.0,
                       double t = 0.0);

/// phi_hat for that data: eps * w^2 * exp(-w^2 |xi|^2 / 2), every component.
PhiHatSampler gaussian_phi_hat(double eps, double width = 1.0);

struct SmoothingProbeRecord {
    double t = 0.0;
    std::vector<double> s_l2; // ||S_{sign m_j}(t;kappa) u_j||_{L2}
    std::vector<double> l2;   // ||u_j||_{L2}
};

/// ||S(t;kappa) u_j(t)||_{L2} along a trajectory, sign of S chosen by the
/// sign of m_j.
std::vector<SmoothingProbeRecord> smoothing_energy_probe(const SystemSpec& spec,
                                                         const std::vector<SimState>& trajectory,
                                                         double kappa);

} // namespace qdnls
