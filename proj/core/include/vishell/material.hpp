#pragma once

#include "vishell/errors.hpp"
#include "vishell/geometry.hpp"

#include <Eigen/Dense>

namespace vishell {

// Lame and viscosity coefficients of the homogeneous isotropic Kelvin-Voigt
// material. theta_v / rho_v are the viscosity pair; the suffix keeps them
// apart from the chart parametrization and the curvature-change tensor.
struct MaterialParams {
    double lambda = 1.0; // >= 0
    double mu = 1.0;     // > 0
    double theta_v = 1.0; // >= 0 here; the 2D reduction requires > 0
    double rho_v = 1.0;  // >= 0

    MaterialParams() = default;
    MaterialParams(double lambda_, double mu_, double theta_v_, double rho_v_);

    // k = (lambda + 2 mu) / (theta + rho), the memory decay rate.
    double k_decay() const { return (lambda + 2.0 * mu) / (theta_v + rho_v); }
    // Lambda = lambda/theta - (lambda + 2 mu)/(theta + rho).
    double memory_coupling() const;

    void require_viscous_branch() const; // throws ElasticCaseError when theta_v = 0
};

using Tensor2x2x2x2 = double[2][2][2][2];
using Tensor3x3x3x3 = double[3][3][3][3];

// The three fourth-order tensors of the two-dimensional flexural model,
// evaluated at one surface point, plus the scalar constants of the memory
// kernel.
struct TwoDTensors {
    Tensor2x2x2x2 A2; // elastic bending tensor
    Tensor2x2x2x2 B2; // viscous bending tensor
    Tensor2x2x2x2 C2; // memory tensor (rank-one in a^{ab} a^{st})
    double k_decay = 0.0;
    double Lambda_c = 0.0;
};

// Scaled 3D elasticity/viscosity tensors built from g^{ij}(eps), or their
// eps -> 0 limits built from a^{ab}.
struct ThreeDTensors {
    Tensor3x3x3x3 A3;
    Tensor3x3x3x3 B3;
};

ThreeDTensors tensors_3d(const MaterialParams& mat, const VolumePointData& vol);
ThreeDTensors tensors_3d_limit(const MaterialParams& mat, const SurfacePointData& surf);
TwoDTensors tensors_2d(const MaterialParams& mat, const SurfacePointData& surf);

// T^{abst} s_st t_ab for symmetric 2x2 arguments.
double contract_2d(const Tensor2x2x2x2& T, const Eigen::Matrix2d& s, const Eigen::Matrix2d& t);
double contract_3d(const Tensor3x3x3x3& T, const Eigen::Matrix3d& s, const Eigen::Matrix3d& t);

// Voigt condensation (11, 22, 33, 23, 13, 12) with engineering doubling on
// the strain side: strain_voigt = (e11, e22, e33, 2 e23, 2 e13, 2 e12) and
// T : e : f = strain_voigt(f)^T * voigt(T) * strain_voigt(e).
Eigen::Matrix<double, 6, 6> voigt_3d(const Tensor3x3x3x3& T);
Eigen::Matrix<double, 6, 1> strain_voigt(const Eigen::Matrix3d& e);

// Residuals of the coefficient identities that collapse the 3D constitutive
// response onto the 2D tensors: both routes are evaluated independently and
// subtracted. All three vanish for admissible parameters.
struct ReductionResiduals {
    double r_a = 0.0;
    double r_b = 0.0;
    double r_c = 0.0;
};
ReductionResiduals reduction_identity_residuals(const MaterialParams& mat);

// Normalized residual of theta*Lambda = lambda - theta*k.
double lambda_identity_residual(const MaterialParams& mat);

// Smallest eigenvalue of the tensor acting on symmetric 2x2 matrices
// (3x3 matrix in the Voigt basis); positive for elliptic tensors.
double min_eigenvalue_sym2(const Tensor2x2x2x2& T);

} // namespace vishell
