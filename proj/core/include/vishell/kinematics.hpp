#pragma once

#include "vishell/geometry.hpp"

#include <Eigen/Dense>

namespace vishell {

// Pointwise values of a midsurface displacement field (covariant components)
// and the derivatives the strain measures consume. eta3 needs second
// derivatives because the curvature change does.
struct Field2DSample {
    Eigen::Vector2d eta = Eigen::Vector2d::Zero();    // eta_1, eta_2
    Eigen::Matrix2d deta = Eigen::Matrix2d::Zero();   // deta(a, b) = d_b eta_a
    double eta3 = 0.0;
    Eigen::Vector2d deta3 = Eigen::Vector2d::Zero();  // d_a eta_3
    Eigen::Matrix2d d2eta3 = Eigen::Matrix2d::Zero(); // d_ab eta_3
};

// Pointwise values of a 3D displacement field on the fixed domain, covariant
// components; dv(i, j) = d_j v_i with the plain coordinate derivative in x3.
struct Field3DSample {
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    Eigen::Matrix3d dv = Eigen::Matrix3d::Zero();
};

// Linearized change of metric gamma_ab(eta) =
//   1/2 (d_b eta_a + d_a eta_b) - Gamma^s_ab eta_s - b_ab eta3.
Eigen::Matrix2d membrane_strain(const Field2DSample& f, const SurfacePointData& s);

// Linearized change of curvature rho_ab(eta), the six-term covariant form:
//   d_ab eta3 - Gamma^s_ab d_s eta3 - b^s_a b_sb eta3
//   + b^s_a (d_b eta_s - Gamma^t_bs eta_t) + b^t_b (d_a eta_t - Gamma^s_at eta_s)
//   + b^t_b|_a eta_t.
Eigen::Matrix2d bending_strain(const Field2DSample& f, const SurfacePointData& s);

// Scaled linearized 3D strains e_{i||j}(eps; v):
//   e_ab  = 1/2 (d_b v_a + d_a v_b) - Gamma^p_ab(eps) v_p
//   e_a3  = 1/2 ((1/eps) d3 v_a + d_a v3) - Gamma^s_a3(eps) v_s
//   e_33  = (1/eps) d3 v3.
Eigen::Matrix3d scaled_strain_3d(const Field3DSample& f, const VolumePointData& vol);

// First-order corrected in-plane strain
//   e^1_ab(eps; v) = (1/eps) gamma_ab(v) + x3 (b^s_b|_a v_s + b^s_a b_sb v3),
// evaluated for a 3D test field at transverse coordinate x3 using surface
// geometry at the footprint point.
Eigen::Matrix2d corrected_strain_1(const Field3DSample& f, const SurfacePointData& s,
                                   double eps, double x3);

// Kirchhoff-type lift v_a(eps) = eta_a - eps x3 theta_a with
// theta_a = d_a eta3 + 2 b^s_a eta_s, v3(eps) = eta3; returns the sample of
// the lifted 3D field at (y, x3). d2eta used for the derivatives of theta_a
// needs nothing beyond the Field2DSample contents plus db from the geometry.
Field3DSample kirchhoff_lift_sample(const Field2DSample& f, const SurfacePointData& s,
                                    double eps, double x3);

// Analytic field helpers for tests and manufactured solutions.
class AnalyticField2D {
public:
    using Scalar = std::function<double(const Eigen::Vector2d&)>;
    // components[i], first_derivs[i][a], second_derivs (eta3 only) [a][b]
    Scalar value[3];
    Scalar d1[3][2];
    Scalar d2_eta3[2][2];

    Field2DSample sample(const Eigen::Vector2d& y) const;
};

class AnalyticField3D {
public:
    using Scalar = std::function<double(const Eigen::Vector3d&)>;
    Scalar value[3];
    Scalar d1[3][3];

    Field3DSample sample(const Eigen::Vector3d& x) const;
};

} // namespace vishell
