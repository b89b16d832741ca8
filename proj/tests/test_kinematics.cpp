#include "vishell/kinematics.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace vishell;
using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

Field2DSample random_sample(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Field2DSample s;
    s.eta << u(rng), u(rng);
    s.deta << u(rng), u(rng), u(rng), u(rng);
    s.eta3 = u(rng);
    s.deta3 << u(rng), u(rng);
    const double m01 = u(rng);
    s.d2eta3 << u(rng), m01, m01, u(rng);
    return s;
}

Field2DSample combine(const Field2DSample& a, const Field2DSample& b, double ca, double cb) {
    Field2DSample s;
    s.eta = ca * a.eta + cb * b.eta;
    s.deta = ca * a.deta + cb * b.deta;
    s.eta3 = ca * a.eta3 + cb * b.eta3;
    s.deta3 = ca * a.deta3 + cb * b.deta3;
    s.d2eta3 = ca * a.d2eta3 + cb * b.d2eta3;
    return s;
}

} // namespace

TEST_CASE("plate reductions: membrane strain is the symmetric gradient") {
    PlateChart chart;
    const SurfacePointData s = surface_eval(chart, {0.3, 0.4});

    SUBCASE("pure normal displacement gives zero membrane strain") {
        Field2DSample f;
        f.eta3 = 1.7;
        f.deta3 << 0.4, -0.2;
        CHECK(membrane_strain(f, s).norm() == doctest::Approx(0.0));
    }
    SUBCASE("in-plane rotation gives zero membrane strain") {
        // eta = (y2, -y1): skew gradient
        Field2DSample f;
        f.eta << 0.4, -0.3;
        f.deta << 0.0, 1.0, -1.0, 0.0;
        CHECK(membrane_strain(f, s).norm() == doctest::Approx(0.0));
    }
    SUBCASE("bending strain is the Hessian of eta3") {
        // eta3 = y1^2 at y1 = 0.3
        Field2DSample f;
        f.eta3 = 0.09;
        f.deta3 << 0.6, 0.0;
        f.d2eta3 << 2.0, 0.0, 0.0, 0.0;
        const Matrix2d r = bending_strain(f, s);
        CHECK(r(0, 0) == doctest::Approx(2.0));
        CHECK(std::abs(r(0, 1)) < 1e-15);
        CHECK(std::abs(r(1, 1)) < 1e-15);
    }
    SUBCASE("tangential-only field has zero bending strain on the plate") {
        Field2DSample f;
        f.eta << 0.7, -0.4;
        f.deta << 0.2, 0.5, -0.1, 0.9;
        CHECK(bending_strain(f, s).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("cylinder: normal displacement strains") {
    CylinderChart chart(1.0, {0.0, 0.0, 2.0, 1.0, false});
    const SurfacePointData s = surface_eval(chart, {0.6, 0.4});
    Field2DSample f;
    f.eta3 = 1.0;
    SUBCASE("membrane strain is minus the curvature tensor") {
        const Matrix2d g = membrane_strain(f, s);
        CHECK((g + s.b_lower).norm() < 1e-14);
        CHECK(g(0, 0) == doctest::Approx(1.0)); // -b_11 = +1/R
    }
    SUBCASE("bending strain is minus the squared curvature") {
        const Matrix2d r = bending_strain(f, s);
        // -b^s_a b_sb: only the 11 entry survives, equal to -1/R^2
        CHECK(r(0, 0) == doctest::Approx(-1.0));
        CHECK(std::abs(r(0, 1)) < 1e-14);
        CHECK(std::abs(r(1, 1)) < 1e-14);
    }
}

TEST_CASE("membrane strain kernel contains rigid motions (FD oracle components)") {
    GraphChart chart({0.3, 1.3, 0.7, 0.05, 0.1}, {0.0, 0.0, 1.0, 1.0, false});
    const Vector3d t(0.3, -0.2, 0.5), w(0.1, 0.25, -0.15);
    for (double u : {0.25, 0.7})
        for (double v : {0.3, 0.8}) {
            const Vector2d y(u, v);
            const Field2DSample f = oracles::rigid_motion_sample(chart, y, t, w);
            const SurfacePointData s = surface_eval(chart, y);
            CHECK(membrane_strain(f, s).norm() < 1e-10);
        }
}

TEST_CASE("linearity of the strain measures") {
    HemispherePatchChart chart;
    const SurfacePointData s = surface_eval(chart, {0.9, 0.5});
    std::mt19937 rng(2024);
    for (int i = 0; i < 10; ++i) {
        const Field2DSample a = random_sample(rng);
        const Field2DSample b = random_sample(rng);
        const double ca = 1.7, cb = -0.45;
        const Field2DSample c = combine(a, b, ca, cb);
        CHECK((membrane_strain(c, s) -
               (ca * membrane_strain(a, s) + cb * membrane_strain(b, s))).norm() < 1e-13);
        CHECK((bending_strain(c, s) -
               (ca * bending_strain(a, s) + cb * bending_strain(b, s))).norm() < 1e-12);
    }
}

TEST_CASE("scaled 3D strains on the plate") {
    PlateChart chart;
    SUBCASE("v = (0,0,x3): transverse stretch 1/eps") {
        const VolumePointData vol = volume_eval(chart, 0.5, {0.4, 0.6, 0.3});
        Field3DSample f;
        f.v << 0.0, 0.0, 0.3;
        f.dv.setZero();
        f.dv(2, 2) = 1.0;
        const Matrix3d e = scaled_strain_3d(f, vol);
        CHECK(e(2, 2) == doctest::Approx(2.0));
        CHECK(std::abs(e(0, 0)) < 1e-15);
        CHECK(std::abs(e(0, 2)) < 1e-15);
    }
    SUBCASE("v = (x3,0,0): scaled shear") {
        const VolumePointData vol = volume_eval(chart, 0.25, {0.4, 0.6, 0.3});
        Field3DSample f;
        f.v << 0.3, 0.0, 0.0;
        f.dv.setZero();
        f.dv(0, 2) = 1.0;
        const Matrix3d e = scaled_strain_3d(f, vol);
        CHECK(e(0, 2) == doctest::Approx(2.0)); // (1/2)(1/eps)
        CHECK(std::abs(e(2, 2)) < 1e-15);
    }
}

TEST_CASE("scaled strains match the FD oracle on the cylinder") {
    CylinderChart chart(1.0, {0.0, 0.0, 2.0, 1.0, false});
    const double eps = 0.12;
    // random polynomial field in (y1, y2, x3)
    AnalyticField3D field;
    auto poly = [](double c0, double c1, double c2, double c3) {
        return [=](const Vector3d& x) {
            return c0 + c1 * x[0] * x[2] + c2 * x[1] * x[1] + c3 * x[0] * x[1] * x[2];
        };
    };
    field.value[0] = poly(0.2, 0.7, -0.3, 0.4);
    field.value[1] = poly(-0.1, 0.5, 0.6, -0.2);
    field.value[2] = poly(0.3, -0.4, 0.2, 0.8);
    auto d = [](auto f, int j) {
        return [=](const Vector3d& x) {
            const double h = 1e-6;
            Vector3d a = x, b = x;
            a[j] += h;
            b[j] -= h;
            return (f(a) - f(b)) / (2.0 * h);
        };
    };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) field.d1[i][j] = d(field.value[i], j);

    for (const Vector3d& x : {Vector3d(0.5, 0.4, 0.3), Vector3d(1.1, 0.7, -0.6)}) {
        const Field3DSample f = field.sample(x);
        const VolumePointData vol = volume_eval(chart, eps, x);
        const Matrix3d e = scaled_strain_3d(f, vol);
        const Matrix3d ref = oracles::fd_scaled_strain(chart, eps, f, x);
        CHECK((e - ref).norm() < 1e-7);
    }
}

TEST_CASE("x3-independent normal field: eps * e_33 vanishes exactly") {
    CylinderChart chart(1.0, {0.0, 0.0, 2.0, 1.0, false});
    const VolumePointData vol = volume_eval(chart, 0.2, {0.5, 0.5, 0.7});
    Field3DSample f;
    f.v << 0.0, 0.0, 0.8;
    f.dv.setZero();
    f.dv(2, 0) = 0.3; // in-plane variation only
    const Matrix3d e = scaled_strain_3d(f, vol);
    CHECK(e(2, 2) == 0.0);
}

namespace {

// y2-invariant corrugated graph chart: developable with curvature varying
// along y1, so inextensional fields exist in closed form per point.
struct DevelopableSetup {
    GraphChart chart{GraphChart::Params{0.3, 1.3, 0.0, 0.0, 0.0}, {0.0, 0.0, 1.0, 1.0, false}};

    // eta_1 = sin(y1), eta_2 = 0, eta_3 = (d1 eta_1 - Gamma^1_11 eta_1)/b_11
    double eta3_value(double y1) const {
        const oracles::ExactSurface s = oracles::exact_surface(chart, {y1, 0.5});
        const Eigen::Matrix2d b_lower = (s.a_upper.inverse() * s.b_mixed).eval();
        return (std::cos(y1) - s.christoffel[0][0][0] * std::sin(y1)) / b_lower(0, 0);
    }

    Field2DSample sample(const Vector2d& y) const {
        Field2DSample f;
        f.eta[0] = std::sin(y[0]);
        f.deta(0, 0) = std::cos(y[0]);
        f.eta3 = eta3_value(y[0]);
        f.deta3[0] = oracles::central5(
            [&](int k) { return eta3_value(y[0] + k * 1e-5); }, 1e-5);
        f.d2eta3(0, 0) = oracles::second5(
            [&](int k) { return eta3_value(y[0] + k * 1e-3); }, 1e-3);
        return f;
    }
};

} // namespace

TEST_CASE("Kirchhoff lift of an inextensional field: corrected strain identity") {
    DevelopableSetup setup;
    const Vector2d y(0.45, 0.55);
    const SurfacePointData s = surface_eval(setup.chart, y);
    const Field2DSample eta = setup.sample(y);
    REQUIRE(membrane_strain(eta, s).norm() < 1e-9);

    for (double eps : {0.2, 0.1, 0.05}) {
        for (double x3 : {-0.8, 0.5}) {
            const Field3DSample v = kirchhoff_lift_sample(eta, s, eps, x3);
            CHECK(v.dv(2, 2) == 0.0); // e_33(eps; lift) = 0 for every eps

            // e^1_ab(eps; v(eps)) = -x3 rho_ab(eta) - eps x3^2 b^s_b|a theta_s
            const Matrix2d e1 = corrected_strain_1(v, s, eps, x3);
            Vector2d theta;
            for (int a = 0; a < 2; ++a) {
                theta[a] = eta.deta3[a];
                for (int sg = 0; sg < 2; ++sg) theta[a] += 2.0 * s.b_mixed(sg, a) * eta.eta[sg];
            }
            const Matrix2d rho = bending_strain(eta, s);
            Matrix2d expected;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    double corr = 0.0;
                    for (int sg = 0; sg < 2; ++sg) corr += s.b_cov_deriv[sg][b][a] * theta[sg];
                    expected(a, b) = -x3 * rho(a, b) - eps * x3 * x3 * corr;
                }
            CHECK((e1 - expected).norm() < 1e-6);
        }
    }
}

TEST_CASE("plate lift of a pure deflection: corrected strain is -x3 Hessian") {
    PlateChart chart;
    const Vector2d y(0.3, 0.8);
    const SurfacePointData s = surface_eval(chart, y);
    Field2DSample eta;
    eta.eta3 = 0.24;
    eta.deta3 << 0.8, -0.6;
    eta.d2eta3 << 2.0, 0.3, 0.3, -1.1;
    const double eps = 0.07, x3 = 0.6;
    const Field3DSample v = kirchhoff_lift_sample(eta, s, eps, x3);
    const Matrix2d e1 = corrected_strain_1(v, s, eps, x3);
    CHECK((e1 + x3 * eta.d2eta3).norm() < 1e-13);
}

TEST_CASE("cylinder inextensional lift: scaled planar strain equals -x3 rho exactly") {
    // eta_1(y1) = sin(y1), eta3 = -cos(y1): gamma vanishes identically on the
    // unit cylinder (b_11 = -1). Parallel curvature makes the offset
    // expansions exact, so the scaled strain hits its limit with no O(eps)
    // remainder.
    CylinderChart chart(1.0, {0.0, 0.0, 2.0, 1.0, false});
    const Vector2d y(0.7, 0.3);
    const SurfacePointData s = surface_eval(chart, y);
    AnalyticField2D field;
    field.value[0] = [](const Vector2d& p) { return std::sin(p[0]); };
    field.value[2] = [](const Vector2d& p) { return -std::cos(p[0]); };
    field.d1[0][0] = [](const Vector2d& p) { return std::cos(p[0]); };
    field.d1[0][1] = [](const Vector2d&) { return 0.0; };
    field.d1[2][0] = [](const Vector2d& p) { return std::sin(p[0]); };
    field.d1[2][1] = [](const Vector2d&) { return 0.0; };
    field.d2_eta3[0][0] = [](const Vector2d& p) { return std::cos(p[0]); };
    field.d2_eta3[0][1] = field.d2_eta3[1][0] = [](const Vector2d&) { return 0.0; };
    field.d2_eta3[1][1] = [](const Vector2d&) { return 0.0; };
    const Field2DSample eta = field.sample(y);
    CHECK(membrane_strain(eta, s).norm() < 1e-14);

    const Matrix2d rho = bending_strain(eta, s);
    const double x3 = 0.8;
    for (double eps : {0.2, 0.05}) {
        const Field3DSample v = kirchhoff_lift_sample(eta, s, eps, x3);
        const VolumePointData vol = volume_eval(chart, eps, {y[0], y[1], x3});
        const Matrix3d E = scaled_strain_3d(v, vol);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                CHECK(E(a, b) / eps + x3 * rho(a, b) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("inextensional lift on varying curvature: strain limit at rate 1") {
    DevelopableSetup setup;
    const Vector2d y(0.45, 0.5);
    const SurfacePointData s = surface_eval(setup.chart, y);
    const Field2DSample eta = setup.sample(y);
    CHECK(membrane_strain(eta, s).norm() < 1e-9);
    CHECK(std::abs(s.b_cov_deriv[0][0][0]) > 1e-3); // curvature genuinely varies

    const Matrix2d rho = bending_strain(eta, s);
    const double x3 = 0.8;
    std::vector<double> eps = {0.1, 0.05, 0.025};
    std::vector<double> dev;
    for (double e : eps) {
        const Field3DSample v = kirchhoff_lift_sample(eta, s, e, x3);
        const VolumePointData vol = volume_eval(setup.chart, e, {y[0], y[1], x3});
        const Matrix3d E = scaled_strain_3d(v, vol);
        double d = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) d = std::max(d, std::abs(E(a, b) / e + x3 * rho(a, b)));
        dev.push_back(d);
    }
    const double slope = std::log(dev[0] / dev[2]) / std::log(eps[0] / eps[2]);
    CHECK(slope > 0.85);
    CHECK(slope < 1.15);
}

TEST_CASE("scaled planar strain approaches the corrected strain at rate 1") {
    // general (non-inextensional) field on a doubly curved chart
    GraphChart chart({0.3, 1.3, 0.7, 0.05, 0.1}, {0.0, 0.0, 1.0, 1.0, false});
    const Vector2d y(0.52, 0.41);
    const SurfacePointData s = surface_eval(chart, y);
    std::mt19937 rng(808);
    const Field2DSample eta = random_sample(rng);
    const double x3 = -0.7;
    std::vector<double> eps = {0.1, 0.05, 0.025};
    std::vector<double> dev;
    for (double e : eps) {
        const Field3DSample v = kirchhoff_lift_sample(eta, s, e, x3);
        const VolumePointData vol = volume_eval(chart, e, {y[0], y[1], x3});
        const Matrix3d E = scaled_strain_3d(v, vol);
        const Matrix2d e1 = corrected_strain_1(v, s, e, x3);
        double d = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) d = std::max(d, std::abs(E(a, b) / e - e1(a, b)));
        dev.push_back(d);
    }
    const double slope = std::log(dev[0] / dev[2]) / std::log(eps[0] / eps[2]);
    CHECK(slope > 0.85);
    CHECK(slope < 1.15);
}

TEST_CASE("strain sample symmetry") {
    HemispherePatchChart chart;
    const VolumePointData vol = volume_eval(chart, 0.15, {0.8, 0.4, 0.2});
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Field3DSample f;
    for (int i = 0; i < 3; ++i) {
        f.v[i] = u(rng);
        for (int j = 0; j < 3; ++j) f.dv(i, j) = u(rng);
    }
    const Matrix3d e = scaled_strain_3d(f, vol);
    CHECK((e - e.transpose()).norm() < 1e-14);
}
