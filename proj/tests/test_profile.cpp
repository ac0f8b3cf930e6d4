#include <doctest.h>

#include "qdnls/profile.hpp"
#include "qdnls/solver.hpp"
#include "qdnls/util.hpp"

#include <cmath>

using namespace qdnls;

namespace {

std::vector<Eigen::Vector2d> small_xi_grid() {
    std::vector<Eigen::Vector2d> pts;
    for (double a : {-1.0, 0.0, 1.0})
        for (double b : {-1.0, 0.0, 0.5}) pts.push_back(Eigen::Vector2d(a, b));
    return pts;
}

} // namespace

TEST_CASE("initial profile values for Gaussian data") {
    PhiHatSampler phat = gaussian_phi_hat(1.0);
    ProfileGrid g1 = initial_profile(phat, {1.0}, {Eigen::Vector2d(0.0, 0.0)});
    CHECK(std::abs(g1.Y[0](0) - cplx(0.0, -1.0)) < 1e-15);

    ProfileGrid g2 = initial_profile(phat, {2.0}, {Eigen::Vector2d(1.0, 0.0)});
    CHECK(std::abs(g2.Y[0](0) - cplx(0.0, -2.0 * std::exp(-2.0))) < 1e-15);

    PhiHatSampler zero = [](int, const Eigen::Vector2d&) { return cplx(0.0, 0.0); };
    ProfileGrid g0 = initial_profile(zero, {1.0, 2.0}, small_xi_grid());
    for (const auto& y : g0.Y) CHECK(y.isZero(0.0));

    CHECK_THROWS(initial_profile(phat, {1.0}, {}));
}

TEST_CASE("the Gaussian hat is confirmed by 2D quadrature") {
    // (1/2pi) * integral of e^{-i x.xi} e^{-|x|^2/2} over the plane at xi=(1,0)
    const double want = std::exp(-0.5);
    const int n = 400;
    const double R = 10.0, h = 2.0 * R / n;
    cplx acc(0.0, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x1 = -R + (i + 0.5) * h, x2 = -R + (j + 0.5) * h;
            acc += std::exp(cplx(0.0, -x1)) * std::exp(-(x1 * x1 + x2 * x2) / 2.0);
        }
    acc *= h * h / (2.0 * M_PI);
    CHECK(std::abs(acc - want) < 1e-8);
}

TEST_CASE("profile rhs") {
    SystemSpec two = make_preset("two-component");
    Eigen::VectorXcd Y(2);
    Y << cplx(1, 1), cplx(2, 0);
    Eigen::VectorXcd r = profile_rhs(two, Eigen::Vector2d(0.3, 0.4), Y);
    CHECK(std::abs(r(0) - cplx(-2, -2)) < 1e-15);
    CHECK(std::abs(r(1) - cplx(2, 0)) < 1e-15);

    CHECK(profile_rhs(two, Eigen::Vector2d(1, 0), Eigen::VectorXcd::Zero(2)).isZero(0.0));

    SystemSpec null3 = make_preset("three-component-null");
    Rng rng(2);
    for (int i = 0; i < 10; ++i) {
        Eigen::VectorXcd y3 = random_complex_vector(rng, 3);
        CHECK(profile_rhs(null3, random_unit_xi(rng), y3).isZero(0.0));
    }
}

TEST_CASE("lyapunov quantity") {
    Eigen::VectorXcd Y(2);
    Y << cplx(3, 0), cplx(0, 4);
    CHECK(lyapunov(Eigen::MatrixXcd::Identity(2, 2), Y) == doctest::Approx(25.0));
    CHECK(lyapunov(Eigen::MatrixXcd::Identity(2, 2), Eigen::VectorXcd::Zero(2)) == 0.0);
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(2, 2);
    D(0, 0) = 2.0;
    D(1, 1) = 1.0;
    Eigen::VectorXcd ones(2);
    ones << 1.0, 1.0;
    CHECK(lyapunov(D, ones) == doctest::Approx(3.0));

    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
    bad(0, 1) = 1.0; // not Hermitian
    CHECK_THROWS(lyapunov(bad, Y));
}

TEST_CASE("lyapunov sandwich bound against eigenvalues") {
    Rng rng(9);
    Eigen::MatrixXcd A = random_hermitian(rng, 4);
    Eigen::MatrixXcd H = A * A.adjoint() + 0.1 * Eigen::MatrixXcd::Identity(4, 4);
    H = 0.5 * (H + H.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    for (int i = 0; i < 1000; ++i) {
        Eigen::VectorXcd Y = random_complex_vector(rng, 4);
        const double v = lyapunov(H, Y);
        const double n2 = Y.squaredNorm();
        CHECK(v >= lo * n2 * (1.0 - 1e-12));
        CHECK(v <= hi * n2 * (1.0 + 1e-12));
    }
}

TEST_CASE("null system is a fixed point of the integrator") {
    SystemSpec null3 = make_preset("three-component-null");
    ProfileGrid start = initial_profile(gaussian_phi_hat(1.0), null3.masses, small_xi_grid());
    ProfileResult res = integrate_profile(null3, start, 2.0, 0.01);
    for (std::size_t p = 0; p < start.xi_points.size(); ++p)
        CHECK((res.trajectory.back()[p] - start.Y[p]).cwiseAbs().maxCoeff() == 0.0);

    SystemSpec two = make_preset("two-component");
    ProfileGrid zero;
    zero.xi_points = small_xi_grid();
    zero.Y.assign(zero.xi_points.size(), Eigen::VectorXcd::Zero(2));
    ProfileResult rz = integrate_profile(two, zero, 1.0, 0.01);
    for (const auto& y : rz.trajectory.back()) CHECK(y.isZero(0.0));
}

TEST_CASE("lyapunov conservation for the two-component system with its witness") {
    SystemSpec two = make_preset("two-component");
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Identity(2, 2);
    ProfileGrid start = initial_profile(gaussian_phi_hat(1.0), two.masses, small_xi_grid());
    ProfileResult res = integrate_profile(two, start, 10.0, 1e-3, H, 1000);
    REQUIRE(!res.lyapunov.records.empty());
    const auto& first = res.lyapunov.records.front();
    for (const auto& rec : res.lyapunov.records) {
        for (std::size_t p = 0; p < rec.nu2.size(); ++p) {
            const double ref = first.nu2[p];
            if (ref > 0.0) CHECK(std::abs(rec.nu2[p] - ref) <= 1e-8 * ref);
        }
    }
}

TEST_CASE("scalar quadratic equation against closed form and a fine reference") {
    // i Y' = Y^2 with Y(0) = 1 has Y(tau) = 1/(1 + i tau)
    SystemSpec s;
    s.n_components = 1;
    s.masses = {1.0};
    s.coeffs.push_back({0, 0, 0, {0, 0}, {0, 0}, cplx(1.0, 0.0)});
    s.validate();

    Eigen::VectorXcd y0(1);
    y0 << 1.0;
    Eigen::Vector2d xi(0.0, 0.0);
    Eigen::VectorXcd at1 = integrate_point_reference(s, xi, y0, 0.0, 1.0, 1e-3);
    const cplx closed = 1.0 / cplx(1.0, 1.0);
    CHECK(std::abs(at1(0) - closed) < 1e-8);

    Eigen::VectorXcd ref = integrate_point_reference(s, xi, y0, 0.0, 1.0, 1e-5);
    CHECK(std::abs(at1(0) - ref(0)) < 1e-8);
    CHECK(std::abs(ref(0) - closed) < 1e-12);
}

TEST_CASE("RK4 self-convergence: halving dtau gains at least 12x against a fine reference") {
    SystemSpec two = make_preset("two-component");
    Eigen::Vector2d xi(0.4, -0.2);
    Eigen::VectorXcd y0(2);
    y0 << cplx(0.9, 0.3), cplx(-0.4, 0.8);

    const double tau_end = 2.0, dtau = 0.05;
    Eigen::VectorXcd ref = integrate_point_reference(two, xi, y0, 0.0, tau_end, dtau / 16.0);
    const double e1 =
        (integrate_point_reference(two, xi, y0, 0.0, tau_end, dtau) - ref).cwiseAbs().maxCoeff();
    const double e2 =
        (integrate_point_reference(two, xi, y0, 0.0, tau_end, dtau / 2.0) - ref).cwiseAbs().maxCoeff();
    CHECK(e1 / e2 >= 12.0);
}

TEST_CASE("parallel integrator matches the serial reference and the incremental one") {
    SystemSpec two = make_preset("two-component");
    ProfileGrid start = initial_profile(gaussian_phi_hat(1.0), two.masses, small_xi_grid());
    const double tau_end = 1.5, dtau = 0.01;
    ProfileResult res = integrate_profile(two, start, tau_end, dtau);
    ProfileIntegrator inc(two, start, dtau);
    inc.advance_to(0.7);
    inc.advance_to(tau_end);
    for (std::size_t p = 0; p < start.xi_points.size(); ++p) {
        Eigen::VectorXcd serial = integrate_point_reference(two, start.xi_points[p], start.Y[p],
                                                            0.0, tau_end, dtau);
        CHECK((res.trajectory.back()[p] - serial).cwiseAbs().maxCoeff() == 0.0);
        // the incremental path lands on tau targets with a shortened step
        CHECK((inc.state().Y[p] - serial).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("integrator aborts on nonfinite states with location info") {
    // Y' = -i Y^2 blows up from large imaginary data in finite tau
    SystemSpec s;
    s.n_components = 1;
    s.masses = {1.0};
    s.coeffs.push_back({0, 0, 0, {0, 0}, {0, 0}, cplx(1.0, 0.0)});
    ProfileGrid g;
    g.xi_points = {Eigen::Vector2d(0.0, 0.0)};
    Eigen::VectorXcd y(1);
    y << cplx(0.0, 1e8);
    g.Y = {y};
    CHECK_THROWS_WITH_AS(integrate_profile(s, g, 10.0, 0.5), doctest::Contains("nonfinite"),
                         std::runtime_error);
}
