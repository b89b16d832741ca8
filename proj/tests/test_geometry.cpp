#include "vishell/geometry.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace vishell;
using Eigen::Vector2d;
using Eigen::Vector3d;

TEST_CASE("plate chart: flat metric, zero curvature") {
    PlateChart chart;
    const SurfacePointData s = surface_eval(chart, {0.31, 0.77});
    CHECK(s.a_lower.isApprox(Eigen::Matrix2d::Identity(), 1e-15));
    CHECK(s.b_lower.norm() == doctest::Approx(0.0));
    CHECK(s.area_a == doctest::Approx(1.0));
    CHECK((s.a3 - Vector3d(0, 0, 1)).norm() == doctest::Approx(0.0));
    for (int sg = 0; sg < 2; ++sg)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) CHECK(s.christoffel[sg][a][b] == 0.0);
}

TEST_CASE("cylinder chart at R=1 matches the FD oracle") {
    CylinderChart chart(1.0, {0.0, 0.0, 2.0, 1.0, false});
    const Vector2d y(0.0, 0.0);
    const SurfacePointData s = surface_eval(chart, y);
    CHECK(s.a_lower.isApprox(Eigen::Matrix2d::Identity(), 1e-14));
    CHECK(s.area_a == doctest::Approx(1.0));
    CHECK(s.b_lower(0, 0) == doctest::Approx(-1.0)); // outward normal orientation
    CHECK(s.b_lower(0, 1) == doctest::Approx(0.0));
    CHECK(s.b_lower(1, 1) == doctest::Approx(0.0));
    for (int sg = 0; sg < 2; ++sg)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) CHECK(std::abs(s.christoffel[sg][a][b]) < 1e-14);

    const oracles::FdSurface fd = oracles::fd_surface(chart, {0.4, 0.3});
    const SurfacePointData s2 = surface_eval(chart, {0.4, 0.3});
    CHECK((fd.b_lower - s2.b_lower).norm() < 1e-8);
    CHECK((fd.a_lower - s2.a_lower).norm() < 1e-9);
}

TEST_CASE("hemisphere patch point values") {
    HemispherePatchChart chart;
    const Vector2d y(M_PI / 4.0, 0.0);
    const SurfacePointData s = surface_eval(chart, y);
    CHECK(s.a_lower(0, 0) == doctest::Approx(1.0));
    CHECK(s.a_lower(1, 1) == doctest::Approx(0.5));
    CHECK(s.christoffel[1][0][1] == doctest::Approx(1.0)); // cot(pi/4)
    CHECK(s.christoffel[1][1][0] == doctest::Approx(1.0));
}

TEST_CASE("graph chart derivatives against the FD fallback chart") {
    GraphChart chart({0.25, 1.1, 0.9, 0.1, -0.05}, {0.0, 0.0, 1.0, 1.0, false});
    FiniteDifferenceChart fd([&](const Vector2d& y) { return chart.position(y); },
                             chart.domain());
    const Vector2d y(0.37, 0.61);
    for (int a = 0; a < 2; ++a) {
        CHECK((chart.first_derivative(a, y) - fd.first_derivative(a, y)).norm() < 1e-9);
        for (int b = 0; b < 2; ++b) {
            CHECK((chart.second_derivative(a, b, y) - fd.second_derivative(a, b, y)).norm() < 1e-7);
        }
    }
    CHECK((chart.third_derivative(0, 0, 1, y) - fd.third_derivative(0, 0, 1, y)).norm() < 1e-4);
}

TEST_CASE("metric raise/lower is the identity and a3 is unit normal") {
    GraphChart chart({0.3, 1.3, 0.7, 0.05, 0.1}, {0.0, 0.0, 1.0, 1.0, false});
    for (double u : {0.1, 0.5, 0.9})
        for (double v : {0.2, 0.8}) {
            const SurfacePointData s = surface_eval(chart, {u, v});
            CHECK(((s.a_upper * s.a_lower) - Eigen::Matrix2d::Identity()).norm() < 1e-12);
            CHECK(std::abs(s.a3.norm() - 1.0) < 1e-14);
            CHECK(std::abs(s.a3.dot(s.a_cov[0])) < 1e-14);
            CHECK(std::abs(s.a3.dot(s.a_cov[1])) < 1e-14);
            CHECK(s.area_a > 0.0);
        }
}

TEST_CASE("b_mixed matches the independent FD computation") {
    GraphChart chart({0.3, 1.3, 0.7, 0.05, 0.1}, {0.0, 0.0, 1.0, 1.0, false});
    const Vector2d y(0.43, 0.58);
    const SurfacePointData s = surface_eval(chart, y);
    const oracles::FdSurface fd = oracles::fd_surface(chart, y);
    CHECK((s.b_mixed - fd.b_mixed).norm() < 1e-8);
}

TEST_CASE("Codazzi symmetry of the curvature covariant derivative") {
    GraphChart chart({0.35, 1.7, 1.1, 0.02, 0.08}, {0.0, 0.0, 1.0, 1.0, false});
    for (double u : {0.21, 0.64})
        for (double v : {0.33, 0.72}) {
            const SurfacePointData s = surface_eval(chart, {u, v});
            CHECK(s.codazzi_defect < 1e-10);
            // and against the FD oracle
            for (int sg = 0; sg < 2; ++sg)
                for (int b = 0; b < 2; ++b)
                    for (int a = 0; a < 2; ++a) {
                        const double fd = oracles::fd_b_cov_deriv(chart, {u, v}, sg, b, a);
                        CHECK(std::abs(s.b_cov_deriv[sg][b][a] - fd) < 1e-6);
                    }
        }
}

TEST_CASE("degenerate chart raises a typed error") {
    AnalyticChart chart(
        [](const Vector2d& y) { return Vector3d(y[0], y[0], 0.0); },
        [](int, const Vector2d&) { return Vector3d(1, 1, 0); },
        [](int, int, const Vector2d&) { return Vector3d::Zero(); },
        [](int, int, int, const Vector2d&) { return Vector3d::Zero(); },
        {0.0, 0.0, 1.0, 1.0, false});
    CHECK_THROWS_AS(surface_eval(chart, {0.5, 0.5}), DegenerateChartError);
}

TEST_CASE("volume_eval on the plate: flat data everywhere") {
    PlateChart chart;
    const VolumePointData v = volume_eval(chart, 0.3, {0.5, 0.5, 0.7});
    CHECK(v.g_upper.isApprox(Eigen::Matrix3d::Identity(), 1e-14));
    CHECK(v.det_g == doctest::Approx(1.0));
    for (int p = 0; p < 3; ++p)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(v.christoffel[p][i][j] == 0.0);
}

TEST_CASE("volume_eval structural zeros and exact identities") {
    CylinderChart chart(1.0, {0.0, 0.0, 2.0, 1.0, false});
    const VolumePointData v = volume_eval(chart, 0.1, {0.4, 0.3, 0.6});
    for (int a = 0; a < 2; ++a) {
        CHECK(v.christoffel[2][a][2] == 0.0); // Gamma^3_{a3}
        CHECK(v.christoffel[2][2][a] == 0.0);
    }
    for (int p = 0; p < 3; ++p) CHECK(v.christoffel[p][2][2] == 0.0); // Gamma^p_{33}
    CHECK(((v.g_upper * v.g_lower) - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(v.det_g > 0.0);
}

TEST_CASE("volume_eval at x3=0 embeds the surface data") {
    HemispherePatchChart chart;
    const Vector2d y(0.8, 0.4);
    const SurfacePointData s = surface_eval(chart, y);
    const VolumePointData v = volume_eval(chart, 0.2, {y[0], y[1], 0.0});
    CHECK((v.g_lower.topLeftCorner<2, 2>() - s.a_lower).norm() < 1e-12);
    CHECK(v.g_lower(2, 2) == doctest::Approx(1.0));
    CHECK(v.det_g == doctest::Approx(s.area_a));
    CHECK((v.g_cov[0] - s.a_cov[0]).norm() < 1e-13);
    CHECK((v.g_cov[2] - s.a3).norm() == doctest::Approx(0.0));
}

TEST_CASE("volume_eval against the full FD oracle on a curved chart") {
    GraphChart chart({0.3, 1.3, 0.7, 0.05, 0.1}, {0.0, 0.0, 1.0, 1.0, false});
    const double eps = 0.15;
    const Vector3d x(0.37, 0.62, 0.5);
    const VolumePointData v = volume_eval(chart, eps, x);
    const oracles::FdVolume fd = oracles::fd_volume(chart, eps, x);
    CHECK((v.g_lower - fd.g_lower).norm() < 1e-7);
    CHECK(std::abs(v.det_g - fd.det_g) < 1e-7);
    for (int p = 0; p < 3; ++p)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(v.christoffel[p][i][j] - fd.christoffel[p][i][j]) < 1e-5);
}

TEST_CASE("cylinder mixed Christoffel at x3=0 equals minus the mixed curvature") {
    CylinderChart chart(1.0, {0.0, 0.0, 2.0, 1.0, false});
    const Vector2d y(0.5, 0.5);
    const SurfacePointData s = surface_eval(chart, y);
    const VolumePointData v = volume_eval(chart, 0.1, {y[0], y[1], 0.0});
    for (int sg = 0; sg < 2; ++sg)
        for (int a = 0; a < 2; ++a)
            CHECK(v.christoffel[sg][a][2] == doctest::Approx(-s.b_mixed(sg, a)).epsilon(1e-12));
}

TEST_CASE("epsilon too large raises once the offset map degenerates") {
    // unit-sphere patch with outward normal: the inward offset passes through
    // the center at z = -1
    HemispherePatchChart chart;
    CHECK_THROWS_AS(volume_eval(chart, 1.2, {0.8, 0.3, -1.0}), EpsilonTooLargeError);
    CHECK_NOTHROW(volume_eval(chart, 0.5, {0.8, 0.3, -1.0}));
}

TEST_CASE("asymptotic_check: plate is exact in all quantities") {
    PlateChart chart;
    const double eps[] = {0.1, 0.05, 0.025};
    const AsymptoticReport rep = asymptotic_check(chart, {0.4, 0.6}, eps);
    for (const auto& e : rep.entries) CHECK(e.exact);
}

TEST_CASE("asymptotic_check on the cylinder: det slope 1, normal identity exact") {
    CylinderChart chart(1.0, {0.0, 0.0, 2.0, 1.0, false});
    const double eps[] = {0.1, 0.05, 0.025};
    const AsymptoticReport rep = asymptotic_check(chart, {0.5, 0.5}, eps);
    for (const auto& e : rep.entries) {
        if (e.name == "det_g_minus_a") {
            CHECK(!e.exact);
            CHECK(e.slope > 0.8);
            CHECK(e.slope < 1.2);
        } else if (e.name == "christoffel_normal_identity") {
            for (double r : e.residual) CHECK(r < 1e-10);
        } else if (e.name == "christoffel_tangential_residual") {
            // covariantly constant curvature: the residual vanishes identically
            CHECK(e.exact);
        } else if (e.name == "christoffel_mixed_residual") {
            CHECK(!e.exact);
            CHECK(e.slope > 1.8);
            CHECK(e.slope < 2.2);
        }
    }
}

TEST_CASE("asymptotic_check on a varying-curvature graph: second-order tangential residual") {
    GraphChart chart({0.3, 1.3, 0.7, 0.05, 0.1}, {0.0, 0.0, 1.0, 1.0, false});
    const double eps[] = {0.1, 0.05, 0.025};
    const AsymptoticReport rep = asymptotic_check(chart, {0.37, 0.43}, eps);
    for (const auto& e : rep.entries) {
        if (e.name == "christoffel_tangential_residual" || e.name == "christoffel_mixed_residual") {
            CHECK(!e.exact);
            CHECK(e.slope > 1.8);
            CHECK(e.slope < 2.2);
        }
        if (e.name == "christoffel_normal_identity") {
            for (double r : e.residual) CHECK(r < 1e-10);
        }
        if (e.name == "det_g_minus_a") {
            CHECK(e.slope > 0.8);
            CHECK(e.slope < 1.2);
        }
    }
}

TEST_CASE("chart catalogue factory") {
    ChartSpec spec;
    spec.name = "cylinder";
    spec.radius = 2.0;
    spec.dom = {0.0, 0.0, 4.0, 1.0, true};
    auto chart = make_chart(spec);
    CHECK(chart->domain().periodic_y1);
    ChartSpec unknown;
    unknown.name = "torus";
    CHECK_THROWS_AS(make_chart(unknown), ConfigError);
}
