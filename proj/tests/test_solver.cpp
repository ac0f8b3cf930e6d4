#include <doctest.h>

#include "helpers.hpp"
#include "qdnls/operators.hpp"
#include "qdnls/solver.hpp"
#include "qdnls/util.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace qdnls;
using test::gaussian_free;
using test::sup_diff;

namespace {

SystemSpec free_system(std::size_t n, std::vector<double> masses) {
    SystemSpec s;
    s.n_components = n;
    s.masses = std::move(masses);
    return s;
}

} // namespace

TEST_CASE("nonlinear rhs on constants and plane waves") {
    Grid2D g(64, 30.0);
    SystemSpec two = make_preset("two-component");

    SimState zero{1.0, {Field2D(g), Field2D(g)}};
    for (const auto& f : nonlinear_rhs(two, zero)) CHECK(f.linf_norm() == 0.0);

    const cplx c1(0.4, -0.2), c2(-0.3, 0.7);
    SimState consts{1.0,
                    {make_field(g, [&](double, double) { return c1; }),
                     make_field(g, [&](double, double) { return c2; })}};
    auto F = nonlinear_rhs(two, consts);
    const cplx want1 = std::conj(c1) * c2, want2 = c1 * c1;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j) {
            CHECK(std::abs(F[0].at(i, j) - want1) < 1e-13);
            CHECK(std::abs(F[1].at(i, j) - want2) < 1e-13);
        }

    // colin-colin with u3 = 1, u5 = e^{i x1}: F1 = -i e^{i x1}
    Grid2D gp(64, 8.0 * M_PI);
    SystemSpec cc = make_preset("colin-colin");
    SimState st{1.0, std::vector<Field2D>(6, Field2D(gp))};
    st.fields[2] = make_field(gp, [](double, double) { return cplx(1.0, 0.0); });
    st.fields[4] = make_field(gp, [](double x1, double) { return std::exp(cplx(0.0, x1)); });
    auto Fc = nonlinear_rhs(cc, st);
    double err = 0.0;
    for (std::size_t i = 0; i < gp.n; ++i)
        for (std::size_t j = 0; j < gp.n; ++j)
            err = std::max(err, std::abs(Fc[0].at(i, j) -
                                         cplx(0.0, -1.0) * std::exp(cplx(0.0, gp.x(i)))));
    CHECK(err < 1e-12);
    for (int comp : {1, 3}) CHECK(Fc[(std::size_t)comp].linf_norm() < 1e-13);
}

TEST_CASE("step reduces to exact free propagation when F = 0") {
    Grid2D g(64, 30.0);
    SystemSpec fs = free_system(1, {2.0});
    SimState st{1.0, {test::gaussian(g)}};
    StepOptions so;
    for (int k = 0; k < 10; ++k) st = step(fs, st, 0.1, so);
    CHECK(st.t == doctest::Approx(2.0));
    CHECK(sup_diff(st.fields[0], gaussian_free(g, 2.0, 1.0)) < 1e-8);

    SimState z{1.0, {Field2D(g)}};
    SimState z2 = step(fs, z, 0.05, so);
    CHECK(z2.fields[0].linf_norm() == 0.0);

    CHECK_THROWS(step(fs, st, -0.1, so));
    CHECK_THROWS(step(fs, st, 1.0, so)); // dt_max guard
}

TEST_CASE("Strang splitting is at least second order in dt") {
    Grid2D g(64, 30.0);
    SystemSpec two = make_preset("two-component");
    SimState st0 = gaussian_data(g, 2, 0.05, 1.0, 1.0);

    auto run = [&](double dt, double t_end) {
        SimState s = st0;
        const int nsteps = (int)std::llround((t_end - s.t) / dt);
        for (int k = 0; k < nsteps; ++k) s = step(two, s, dt);
        return s;
    };
    SimState ref = run(0.05 / 16.0, 2.0);
    const double e1 = sup_diff(run(0.05, 2.0).fields[0], ref.fields[0]);
    const double e2 = sup_diff(run(0.025, 2.0).fields[0], ref.fields[0]);
    CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("A is constant in t along free solutions") {
    Grid2D g(64, 30.0);
    SystemSpec fs = free_system(2, {1.0, 2.0});
    SimState st{1.0, {test::gaussian(g), test::gaussian(g, 2.0)}};
    auto A1 = compute_A(fs, st);
    SimState st4 = st;
    for (int k = 0; k < 30; ++k) st4 = step(fs, st4, 0.1);
    auto A4 = compute_A(fs, st4);
    for (std::size_t j = 0; j < 2; ++j) CHECK(sup_diff(A1[j], A4[j]) < 1e-10);

    // norm relations under the two measures
    CHECK(std::abs(A1[1].l2_norm() - st.fields[1].l2_norm()) / st.fields[1].l2_norm() < 1e-10);
    Field2D raw = A1[1];
    raw.set_xi_scale(1.0);
    CHECK(std::abs(raw.l2_norm() - 2.0 * st.fields[1].l2_norm()) /
              (2.0 * st.fields[1].l2_norm()) <
          1e-10);

    CHECK_THROWS(compute_A(fs, SimState{0.0, st.fields}));
}

TEST_CASE("diagnostic sampler agrees with the naive semidiscrete reference") {
    Grid2D g(64, 30.0);
    SystemSpec fs = free_system(2, {1.0, 2.0});
    SimState st{1.3, {test::gaussian(g), test::gaussian(g, 1.7)}};
    DiagnosticSampler sampler(g, fs.masses, {-1.0, 0.3, 1.1}, {-0.7, 0.0, 0.9});
    Eigen::MatrixXcd A = sampler.sample_A(fs, st);
    const auto& pts = sampler.points();
    for (std::size_t j = 0; j < 2; ++j) {
        Field2D back = free_propagate(fs.masses[j], -st.t, st.fields[j]);
        for (std::size_t p = 0; p < pts.size(); ++p) {
            const cplx want = sample_scaled_fourier(fs.masses[j], back, pts[p]);
            CHECK(std::abs(A((Eigen::Index)j, (Eigen::Index)p) - want) < 1e-12);
        }
    }
}

TEST_CASE("remainder vanishes on zero data and decays like t^{-3/2} for the null system") {
    Grid2D g(128, 60.0);
    SystemSpec null3 = make_preset("three-component-null");
    DiagnosticSampler sampler(g, null3.masses, {-1.0, -0.5, 0.0, 0.5, 1.0},
                              {-1.0, -0.5, 0.0, 0.5, 1.0});

    SimState zero{2.0, std::vector<Field2D>(3, Field2D(g))};
    Eigen::MatrixXcd Az = sampler.sample_A(null3, zero);
    CHECK(remainder(null3, zero, sampler, Az).cwiseAbs().maxCoeff() == 0.0);

    // free-like data: R is the full transformed nonlinearity since p = 0.
    // u1 and u2 get different widths (the strong null form annihilates
    // identical factors); t stays below the box wrap-around time ~ 8.
    std::vector<double> lts, lrs;
    const std::array<double, 3> widths = {1.0, 2.0, 1.5};
    for (double t : {2.0, 3.0, 4.5, 6.75}) {
        SimState st{t, {}};
        for (int j = 0; j < 3; ++j)
            st.fields.push_back(free_propagate(null3.masses[(std::size_t)j], t,
                                               test::gaussian(g, widths[(std::size_t)j], 0.05)));
        Eigen::MatrixXcd A = sampler.sample_A(null3, st);
        Eigen::MatrixXcd R = remainder(null3, st, sampler, A);
        lts.push_back(std::log(t));
        lrs.push_back(std::log(R.cwiseAbs().maxCoeff()));
    }
    CHECK(fit_slope(lts, lrs) <= -1.2);
}

TEST_CASE("gauge covariance of the discrete evolution") {
    Grid2D g(64, 30.0);
    SystemSpec two = make_preset("two-component");
    SimState a = gaussian_data(g, 2, 0.05, 1.0, 1.0);
    const double theta = M_PI / 3.0;
    SimState b = a;
    for (std::size_t j = 0; j < 2; ++j) b.fields[j] *= std::polar(1.0, two.masses[j] * theta);
    for (int k = 0; k < 12; ++k) {
        a = step(two, a, 0.05);
        b = step(two, b, 0.05);
    }
    double err = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
        Field2D phased = a.fields[j];
        phased *= std::polar(1.0, two.masses[j] * theta);
        err = std::max(err, sup_diff(b.fields[j], phased));
    }
    CHECK(err < 1e-8);
}

TEST_CASE("simulate: zero data, red1 consistency, profile comparison plumbing") {
    Grid2D g(64, 30.0);
    SystemSpec two = make_preset("two-component");

    SUBCASE("eps = 0 gives identically zero diagnostics") {
        SimulateOptions opts;
        opts.t_start = 1.0;
        opts.t_end = 2.0;
        opts.dt = 0.05;
        opts.cadence = 5;
        SimulateResult res = simulate(two, SimState{1.0, {Field2D(g), Field2D(g)}}, opts);
        REQUIRE(!res.series.records.empty());
        for (const auto& r : res.series.records) {
            for (double v : r.linf) CHECK(v == 0.0);
            for (double v : r.l2) CHECK(v == 0.0);
            CHECK(r.r_sup == 0.0);
        }
    }

    SUBCASE("red1 gap is small and the profile comparison starts at zero mismatch") {
        SimulateOptions opts;
        opts.t_start = 1.0;
        opts.t_end = 3.0;
        opts.dt = 0.02;
        opts.cadence = 20;
        opts.H = Eigen::MatrixXcd::Identity(2, 2);
        opts.diag_xi1 = {-1.0, 0.0, 1.0};
        opts.diag_xi2 = {-1.0, 0.0, 1.0};

        SimState data = gaussian_data(g, 2, 0.01, 1.0, 1.0);
        // profile seeded from the PDE side at t = 1 so the comparison is pure drift
        DiagnosticSampler sampler(g, two.masses, opts.diag_xi1, opts.diag_xi2);
        Eigen::MatrixXcd A0 = sampler.sample_A(two, data);
        ProfileGrid pg;
        pg.xi_points = sampler.points();
        for (Eigen::Index p = 0; p < A0.cols(); ++p) pg.Y.push_back(A0.col(p));
        opts.profile_lookup = cointegrating_profile_lookup(two, pg, 1e-3);

        SimulateResult res = simulate(two, data, opts);
        REQUIRE(res.series.records.size() >= 3);
        CHECK(res.series.records.front().cmp_sup == 0.0);
        for (const auto& r : res.series.records) {
            if (!std::isnan(r.red1_gap)) CHECK(r.red1_gap < 1e-4);
            CHECK(r.nu_sup > 0.0);
            // drift is the genuine remainder integral, O(eps^2) against the
            // O(eps) amplitude scale
            if (!std::isnan(r.cmp_sup)) CHECK(r.cmp_sup < 1e-3);
        }
        CHECK(res.final_state.t == doctest::Approx(3.0));
    }

    SUBCASE("self-convergence of recorded diagnostics under dt halving") {
        auto run = [&](double dt) {
            SimulateOptions opts;
            opts.t_start = 1.0;
            opts.t_end = 2.0;
            opts.dt = dt;
            opts.cadence = (std::size_t)std::llround(0.5 / dt);
            opts.fd_consistency = false;
            return simulate(two, gaussian_data(g, 2, 0.01, 1.0, 1.0), opts).series;
        };
        DiagnosticsSeries a = run(0.02), b = run(0.01);
        REQUIRE(a.records.size() == b.records.size());
        for (std::size_t r = 0; r < a.records.size(); ++r) {
            CHECK(a.records[r].t == doctest::Approx(b.records[r].t));
            for (std::size_t j = 0; j < 2; ++j) {
                CHECK(std::abs(a.records[r].linf[j] - b.records[r].linf[j]) <
                      1e-4 * b.records[r].linf[j]);
                CHECK(std::abs(a.records[r].l2[j] - b.records[r].l2[j]) <
                      1e-4 * b.records[r].l2[j]);
            }
            CHECK(std::abs(a.records[r].r_sup - b.records[r].r_sup) <
                  1e-4 * std::max(1e-30, b.records[r].r_sup));
        }
    }
}

TEST_CASE("smoothing energy probe on free solutions") {
    Grid2D g(64, 60.0);
    SystemSpec fs = free_system(1, {1.0});
    std::vector<SimState> traj;
    for (double t : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        SimState st{t, {free_propagate(1.0, t, test::gaussian(g))}};
        traj.push_back(std::move(st));
    }

    auto probe_tiny = smoothing_energy_probe(fs, traj, 1e-6);
    for (const auto& rec : probe_tiny) CHECK(std::abs(rec.s_l2[0] - rec.l2[0]) < 1e-4 * rec.l2[0]);

    auto probe = smoothing_energy_probe(fs, traj, 0.5);
    std::vector<double> lx, ly;
    for (const auto& rec : probe) {
        lx.push_back(std::log(std::sqrt(1.0 + rec.t * rec.t)));
        ly.push_back(std::log(rec.s_l2[0] * rec.s_l2[0]));
    }
    const double c1 = fit_slope(lx, ly) / 0.5;
    MESSAGE("fitted smoothing growth constant C1 = ", c1);
    CHECK(std::isfinite(c1));
    CHECK(c1 <= 10.0);

    std::vector<SimState> zt{SimState{1.0, {Field2D(g)}}};
    auto pz = smoothing_energy_probe(fs, zt, 0.5);
    CHECK(pz[0].s_l2[0] == 0.0);
}

TEST_CASE("diagnostics CSV is deterministic and carries the schema") {
    Grid2D g(64, 30.0);
    SystemSpec two = make_preset("two-component");
    SimulateOptions opts;
    opts.t_start = 1.0;
    opts.t_end = 1.2;
    opts.dt = 0.02;
    opts.cadence = 5;
    DiagnosticsSeries s1 = simulate(two, gaussian_data(g, 2, 0.01, 1.0, 1.0), opts).series;
    DiagnosticsSeries s2 = simulate(two, gaussian_data(g, 2, 0.01, 1.0, 1.0), opts).series;
    s1.write_csv("/tmp/qdnls_diag1.csv");
    s2.write_csv("/tmp/qdnls_diag2.csv");
    std::ifstream f1("/tmp/qdnls_diag1.csv"), f2("/tmp/qdnls_diag2.csv");
    std::stringstream b1, b2;
    b1 << f1.rdbuf();
    b2 << f2.rdbuf();
    CHECK(b1.str() == b2.str());
    CHECK(b1.str().find("weighted_linf") != std::string::npos);
    CHECK(DiagnosticsSeries::csv_schema(2, false).find("nu_sup") != std::string::npos);
}
