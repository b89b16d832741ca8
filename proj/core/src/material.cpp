#include "vishell/material.hpp"

#include <cmath>

namespace vishell {

MaterialParams::MaterialParams(double lambda_, double mu_, double theta_v_, double rho_v_)
    : lambda(lambda_), mu(mu_), theta_v(theta_v_), rho_v(rho_v_) {
    if (lambda < 0.0) throw Error("MaterialParams: lambda must be >= 0");
    if (mu <= 0.0) throw Error("MaterialParams: mu must be > 0");
    if (theta_v < 0.0) throw Error("MaterialParams: theta_v must be >= 0");
    if (rho_v < 0.0) throw Error("MaterialParams: rho_v must be >= 0");
    if (theta_v + rho_v <= 0.0) throw Error("MaterialParams: theta_v + rho_v must be > 0");
}

double MaterialParams::memory_coupling() const {
    require_viscous_branch();
    return lambda / theta_v - (lambda + 2.0 * mu) / (theta_v + rho_v);
}

void MaterialParams::require_viscous_branch() const {
    if (theta_v <= 0.0) {
        throw ElasticCaseError("theta_v = 0: the elastic branch needs a separate model");
    }
}

namespace {

// lambda' g^{ij} g^{kl} + mu' (g^{ik} g^{jl} + g^{il} g^{jk}) for a symmetric
// contravariant metric G.
void isotropic_tensor_3d(const Eigen::Matrix3d& G, double l, double m, Tensor3x3x3x3& T) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int n = 0; n < 3; ++n)
                    T[i][j][k][n] = l * G(i, j) * G(k, n) + m * (G(i, k) * G(j, n) + G(i, n) * G(j, k));
}

void rank_structured_tensor_2d(const Eigen::Matrix2d& A, double c_mem, double c_sym, Tensor2x2x2x2& T) {
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < 2; ++t)
                    T[a][b][s][t] = c_mem * A(a, b) * A(s, t) + c_sym * (A(a, s) * A(b, t) + A(a, t) * A(b, s));
}

} // namespace

ThreeDTensors tensors_3d(const MaterialParams& mat, const VolumePointData& vol) {
    ThreeDTensors T;
    isotropic_tensor_3d(vol.g_upper, mat.lambda, mat.mu, T.A3);
    isotropic_tensor_3d(vol.g_upper, mat.theta_v, 0.5 * mat.rho_v, T.B3);
    return T;
}

ThreeDTensors tensors_3d_limit(const MaterialParams& mat, const SurfacePointData& surf) {
    Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
    G.topLeftCorner<2, 2>() = surf.a_upper;
    G(2, 2) = 1.0;
    ThreeDTensors T;
    isotropic_tensor_3d(G, mat.lambda, mat.mu, T.A3);
    isotropic_tensor_3d(G, mat.theta_v, 0.5 * mat.rho_v, T.B3);
    return T;
}

TwoDTensors tensors_2d(const MaterialParams& mat, const SurfacePointData& surf) {
    mat.require_viscous_branch();
    const double th = mat.theta_v, rh = mat.rho_v, la = mat.lambda, mu = mat.mu;
    const double denom = th + rh;

    TwoDTensors T;
    T.k_decay = mat.k_decay();
    T.Lambda_c = mat.memory_coupling();

    const double ca = (2.0 * la * rh * rh + 4.0 * mu * th * th) / (denom * denom);
    rank_structured_tensor_2d(surf.a_upper, ca, 2.0 * mu, T.A2);

    const double cb = 2.0 * th * rh / denom;
    rank_structured_tensor_2d(surf.a_upper, cb, rh, T.B2);

    const double thL = th * T.Lambda_c;
    const double cc = 2.0 * thL * thL / denom;
    rank_structured_tensor_2d(surf.a_upper, cc, 0.0, T.C2);
    return T;
}

double contract_2d(const Tensor2x2x2x2& T, const Eigen::Matrix2d& s, const Eigen::Matrix2d& t) {
    double v = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) v += T[a][b][c][d] * s(c, d) * t(a, b);
    return v;
}

double contract_3d(const Tensor3x3x3x3& T, const Eigen::Matrix3d& s, const Eigen::Matrix3d& t) {
    double v = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int n = 0; n < 3; ++n) v += T[i][j][k][n] * s(k, n) * t(i, j);
    return v;
}

Eigen::Matrix<double, 6, 6> voigt_3d(const Tensor3x3x3x3& T) {
    static const int vi[6] = {0, 1, 2, 1, 0, 0};
    static const int vj[6] = {0, 1, 2, 2, 2, 1};
    Eigen::Matrix<double, 6, 6> M;
    for (int I = 0; I < 6; ++I)
        for (int J = 0; J < 6; ++J) M(I, J) = T[vi[I]][vj[I]][vi[J]][vj[J]];
    return M;
}

Eigen::Matrix<double, 6, 1> strain_voigt(const Eigen::Matrix3d& e) {
    Eigen::Matrix<double, 6, 1> v;
    v << e(0, 0), e(1, 1), e(2, 2), 2.0 * e(1, 2), 2.0 * e(0, 2), 2.0 * e(0, 1);
    return v;
}

ReductionResiduals reduction_identity_residuals(const MaterialParams& mat) {
    mat.require_viscous_branch();
    const double th = mat.theta_v, rh = mat.rho_v, la = mat.lambda, mu = mat.mu;
    const double denom = th + rh;
    const double Lam = mat.memory_coupling();

    ReductionResiduals r;
    // isotropic coefficient route (limit-equation bracket) vs the 2D tensor
    // coefficient, doubled because the bracket carries half the tensor
    const double bracket_a = la - (th / denom) * (th * Lam + la);
    const double coeff_a = (2.0 * la * rh * rh + 4.0 * mu * th * th) / (denom * denom);
    r.r_a = std::abs(2.0 * bracket_a - coeff_a);

    const double bracket_b_mem = th * rh / denom;
    const double coeff_b_mem = 2.0 * th * rh / denom;
    const double bracket_b_sym = 0.5 * rh;
    const double coeff_b_sym = rh;
    r.r_b = std::abs(2.0 * bracket_b_mem - coeff_b_mem) + std::abs(2.0 * bracket_b_sym - coeff_b_sym);

    const double bracket_c = (th * Lam) * (th * Lam) / denom;
    const double coeff_c = 2.0 * (th * Lam) * (th * Lam) / denom;
    r.r_c = std::abs(2.0 * bracket_c - coeff_c);
    return r;
}

double lambda_identity_residual(const MaterialParams& mat) {
    mat.require_viscous_branch();
    const double thL = mat.theta_v * mat.memory_coupling();
    const double rhs = mat.lambda - mat.theta_v * mat.k_decay();
    return std::abs(thL - rhs) / (1.0 + std::abs(mat.lambda) + std::abs(mat.theta_v * mat.k_decay()));
}

double min_eigenvalue_sym2(const Tensor2x2x2x2& T) {
    // Voigt basis (11, 22, 12) with strain doubling on the off-diagonal slot.
    Eigen::Matrix3d M;
    const int vi[3] = {0, 1, 0};
    const int vj[3] = {0, 1, 1};
    for (int I = 0; I < 3; ++I)
        for (int J = 0; J < 3; ++J) {
            const double w = (I == 2 ? 2.0 : 1.0) * (J == 2 ? 2.0 : 1.0);
            M(I, J) = w * T[vi[I]][vj[I]][vi[J]][vj[J]];
        }
    // eigenvalues of the quadratic form t : T : t over |t| = 1 need the
    // Voigt metric weight on the off-diagonal slot
    Eigen::Matrix3d W = Eigen::Matrix3d::Identity();
    W(2, 2) = 2.0;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> es(M, W);
    return es.eigenvalues().minCoeff();
}

} // namespace vishell
