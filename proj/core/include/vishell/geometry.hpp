#pragma once

#include "vishell/errors.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vishell {

// Axis-aligned parameter rectangle [o1, o1+l1] x [o2, o2+l2]; the origin
// offset lets charts like the hemisphere patch keep their natural coordinates
// while staying away from singular points.
struct ChartDomain {
    double o1 = 0.0;
    double o2 = 0.0;
    double l1 = 1.0;
    double l2 = 1.0;
    bool periodic_y1 = false;
};

// Analytic midsurface parametrization y -> R^3 with exact derivatives up to
// third order. Third derivatives are consumed by the covariant derivative of
// the mixed curvature tensor, so charts must be C^3.
class SurfaceChart {
public:
    virtual ~SurfaceChart() = default;

    virtual Eigen::Vector3d position(const Eigen::Vector2d& y) const = 0;
    virtual Eigen::Vector3d first_derivative(int alpha, const Eigen::Vector2d& y) const = 0;
    virtual Eigen::Vector3d second_derivative(int alpha, int beta, const Eigen::Vector2d& y) const = 0;
    virtual Eigen::Vector3d third_derivative(int alpha, int beta, int gamma, const Eigen::Vector2d& y) const = 0;
    virtual ChartDomain domain() const = 0;
};

// First/second fundamental form data at one parameter point.
struct SurfacePointData {
    Eigen::Vector3d a_cov[2];   // a_alpha = d_alpha theta
    Eigen::Vector3d a_con[2];   // a^alpha
    Eigen::Vector3d a3;         // unit normal a_1 x a_2 / |a_1 x a_2|
    Eigen::Matrix2d a_lower;    // a_{alpha beta}
    Eigen::Matrix2d a_upper;    // a^{alpha beta}
    double area_a = 0.0;        // det(a_{alpha beta}) > 0
    Eigen::Matrix2d b_lower;    // b_{alpha beta}
    Eigen::Matrix2d b_mixed;    // b^sigma_alpha, row = upper index
    double christoffel[2][2][2];   // Gamma^sigma_{alpha beta}
    double db_mixed[2][2][2];      // d_gamma b^sigma_beta, [sigma][beta][gamma]
    double b_cov_deriv[2][2][2];   // b^sigma_beta|_alpha, [sigma][beta][alpha]
    double codazzi_defect = 0.0;   // max |b^s_b|_a - b^s_a|_b|
};

// Shell-body geometry at one point of the fixed domain omega x [-1,1],
// evaluated for a given half-thickness eps through the normal offset map.
struct VolumePointData {
    Eigen::Vector3d g_cov[3];
    Eigen::Vector3d g_con[3];
    Eigen::Matrix3d g_lower;
    Eigen::Matrix3d g_upper;
    double det_g = 0.0;
    double epsilon = 0.0;
    double christoffel[3][3][3]; // Gamma^p_{ij}(eps); the alpha-3/33 zeros are structural
};

SurfacePointData surface_eval(const SurfaceChart& chart, const Eigen::Vector2d& y);

// x = (y1, y2, x3) with x3 in [-1, 1].
VolumePointData volume_eval(const SurfaceChart& chart, double eps, const Eigen::Vector3d& x);

// Least-squares slopes of log residual vs log eps for the offset-geometry
// expansions: tangential Christoffel correction (second order), the normal
// Christoffel closed form (an identity), the mixed Christoffel correction
// (second order) and det g - a (first order).
struct AsymptoticReport {
    struct Entry {
        std::string name;
        std::vector<double> residual; // one per eps, max over sampled x3
        double slope = 0.0;           // meaningful only when !exact
        bool exact = false;           // residual at rounding level for all eps
    };
    std::vector<double> eps;
    std::vector<Entry> entries;
    double codazzi_defect = 0.0;
};

AsymptoticReport asymptotic_check(const SurfaceChart& chart, const Eigen::Vector2d& y,
                                  std::span<const double> eps_list);

// --- chart catalogue ---------------------------------------------------

class PlateChart final : public SurfaceChart {
public:
    explicit PlateChart(ChartDomain dom = {}) : dom_(dom) {}
    Eigen::Vector3d position(const Eigen::Vector2d& y) const override;
    Eigen::Vector3d first_derivative(int alpha, const Eigen::Vector2d& y) const override;
    Eigen::Vector3d second_derivative(int, int, const Eigen::Vector2d&) const override;
    Eigen::Vector3d third_derivative(int, int, int, const Eigen::Vector2d&) const override;
    ChartDomain domain() const override { return dom_; }

private:
    ChartDomain dom_;
};

// theta(y) = (R cos(y1/R), R sin(y1/R), y2); y1 is arc length, so the
// closed cylinder corresponds to l1 = 2 pi R with periodic_y1 = true.
class CylinderChart final : public SurfaceChart {
public:
    explicit CylinderChart(double radius, ChartDomain dom = {});
    Eigen::Vector3d position(const Eigen::Vector2d& y) const override;
    Eigen::Vector3d first_derivative(int alpha, const Eigen::Vector2d& y) const override;
    Eigen::Vector3d second_derivative(int alpha, int beta, const Eigen::Vector2d& y) const override;
    Eigen::Vector3d third_derivative(int alpha, int beta, int gamma, const Eigen::Vector2d& y) const override;
    ChartDomain domain() const override { return dom_; }
    double radius() const { return radius_; }

private:
    double radius_;
    ChartDomain dom_;
};

// theta(y) = (sin y1 cos y2, sin y1 sin y2, cos y1); y1 is the colatitude,
// so the parameter rectangle must keep away from the poles 0 and pi.
class HemispherePatchChart final : public SurfaceChart {
public:
    explicit HemispherePatchChart(ChartDomain dom = {0.3, 0.0, 1.0, 1.0, false});
    Eigen::Vector3d position(const Eigen::Vector2d& y) const override;
    Eigen::Vector3d first_derivative(int alpha, const Eigen::Vector2d& y) const override;
    Eigen::Vector3d second_derivative(int alpha, int beta, const Eigen::Vector2d& y) const override;
    Eigen::Vector3d third_derivative(int alpha, int beta, int gamma, const Eigen::Vector2d& y) const override;
    ChartDomain domain() const override { return dom_; }

private:
    ChartDomain dom_;
};

// Graph chart z = h(y) for the built-in height family
//   h(y) = amp * sin(fx*y1) * cos(fy*y2) + qx*y1^2 + qy*y2^2.
class GraphChart final : public SurfaceChart {
public:
    struct Params {
        double amp = 0.2, fx = 1.3, fy = 0.7, qx = 0.0, qy = 0.0;
    };
    GraphChart(Params p, ChartDomain dom = {});
    Eigen::Vector3d position(const Eigen::Vector2d& y) const override;
    Eigen::Vector3d first_derivative(int alpha, const Eigen::Vector2d& y) const override;
    Eigen::Vector3d second_derivative(int alpha, int beta, const Eigen::Vector2d& y) const override;
    Eigen::Vector3d third_derivative(int alpha, int beta, int gamma, const Eigen::Vector2d& y) const override;
    ChartDomain domain() const override { return dom_; }

private:
    double h(const Eigen::Vector2d& y, int d1, int d2) const; // d_1^{d1} d_2^{d2} h
    Params p_;
    ChartDomain dom_;
};

// Chart defined by user callables supplying exact derivatives; used by tests
// for custom and intentionally degenerate geometries.
class AnalyticChart final : public SurfaceChart {
public:
    using PositionFn = std::function<Eigen::Vector3d(const Eigen::Vector2d&)>;
    using Deriv1Fn = std::function<Eigen::Vector3d(int, const Eigen::Vector2d&)>;
    using Deriv2Fn = std::function<Eigen::Vector3d(int, int, const Eigen::Vector2d&)>;
    using Deriv3Fn = std::function<Eigen::Vector3d(int, int, int, const Eigen::Vector2d&)>;

    AnalyticChart(PositionFn pos, Deriv1Fn d1, Deriv2Fn d2, Deriv3Fn d3, ChartDomain dom)
        : pos_(std::move(pos)), d1_(std::move(d1)), d2_(std::move(d2)), d3_(std::move(d3)), dom_(dom) {}

    Eigen::Vector3d position(const Eigen::Vector2d& y) const override { return pos_(y); }
    Eigen::Vector3d first_derivative(int a, const Eigen::Vector2d& y) const override { return d1_(a, y); }
    Eigen::Vector3d second_derivative(int a, int b, const Eigen::Vector2d& y) const override { return d2_(a, b, y); }
    Eigen::Vector3d third_derivative(int a, int b, int c, const Eigen::Vector2d& y) const override { return d3_(a, b, c, y); }
    ChartDomain domain() const override { return dom_; }

private:
    PositionFn pos_;
    Deriv1Fn d1_;
    Deriv2Fn d2_;
    Deriv3Fn d3_;
    ChartDomain dom_;
};

// Testing fallback: wraps a position-only map and supplies derivatives by
// 5-point central differences with h = 1e-4 * domain size. Exact charts are
// required for production use; FD third derivatives are too lossy for
// b^sigma_beta|_alpha.
class FiniteDifferenceChart final : public SurfaceChart {
public:
    using PositionFn = std::function<Eigen::Vector3d(const Eigen::Vector2d&)>;
    FiniteDifferenceChart(PositionFn pos, ChartDomain dom);

    Eigen::Vector3d position(const Eigen::Vector2d& y) const override { return pos_(y); }
    Eigen::Vector3d first_derivative(int alpha, const Eigen::Vector2d& y) const override;
    Eigen::Vector3d second_derivative(int alpha, int beta, const Eigen::Vector2d& y) const override;
    Eigen::Vector3d third_derivative(int alpha, int beta, int gamma, const Eigen::Vector2d& y) const override;
    ChartDomain domain() const override { return dom_; }

private:
    PositionFn pos_;
    ChartDomain dom_;
    double h_;
};

struct ChartSpec {
    std::string name = "plate"; // plate | cylinder | hemisphere_patch | graph
    ChartDomain dom;
    double radius = 1.0;      // cylinder
    GraphChart::Params graph; // graph
};

std::unique_ptr<SurfaceChart> make_chart(const ChartSpec& spec);

} // namespace vishell
