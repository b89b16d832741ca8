#pragma once

#include "vishell/geometry.hpp"
#include "vishell/kinematics.hpp"
#include "vishell/material.hpp"
#include "vishell/mesh.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace vishell {

using SparseMat = Eigen::SparseMatrix<double>;

// Shared load description: a body force density f^{i,2}(t, y, x3) on the
// fixed domain and surface tractions h^{i,3}(t, y) on the upper/lower faces.
// The 2D solver consumes them through p^i(t,y) = int_{-1}^{1} f dx3 + h+ + h-.
struct Loads {
    std::function<Eigen::Vector3d(double t, const Eigen::Vector2d& y, double x3)> volume;
    std::function<Eigen::Vector3d(double t, const Eigen::Vector2d& y)> traction_top;
    std::function<Eigen::Vector3d(double t, const Eigen::Vector2d& y)> traction_bottom;

    Eigen::Vector3d resultant(double t, const Eigen::Vector2d& y) const; // p^i(t, y)
};

// Discretization of the inextensional-displacement space: every component is
// a Bogner-Fox-Schmit Hermite bicubic. A C^0 tangential space pairs so badly
// with the bicubic deflection under the inextensibility penalty that the
// discrete constrained space collapses (membrane locking); with cubics
// throughout the constraint is exactly representable on constant-curvature
// charts. PlateBending drops the tangential unknowns entirely: on a flat
// chart the clamped inextensional fields have eta_alpha = 0 and the problem
// reduces to bending.
enum class Formulation2D { PlateBending, Full };

class DofLayout2D {
public:
    DofLayout2D(const Mesh2D& mesh, Formulation2D form);

    Formulation2D formulation() const { return form_; }
    int per_node() const { return per_node_; }
    int n_total() const { return per_node_ * mesh_->n_nodes(); }
    int n_free() const { return n_free_; }

    // component order per node, each block Hermite (value, d1, d2, d12):
    // Full (eta1[4], eta2[4], eta3[4]); PlateBending (eta3[4]).
    int dof(int node, int comp) const { return node * per_node_ + comp; }
    int free_index(int dof) const { return free_of_dof_[dof]; }
    bool constrained(int dof) const { return free_of_dof_[dof] < 0; }

    Eigen::VectorXd restrict_free(const Eigen::VectorXd& full) const;
    Eigen::VectorXd expand_full(const Eigen::VectorXd& free) const;

    const Mesh2D& mesh() const { return *mesh_; }

private:
    const Mesh2D* mesh_;
    Formulation2D form_;
    int per_node_;
    int n_free_;
    std::vector<int> free_of_dof_;
};

enum class BendingTensor { A, B, C };

// Assembles the flexural bilinear forms on the free dofs.
class FlexuralAssembler {
public:
    FlexuralAssembler(const DofLayout2D& layout, const SurfaceChart& chart,
                      const MaterialParams& mat);

    // int_omega T^{abst} rho_st(phi_J) rho_ab(phi_I) sqrt(a) dy, 3x3 Gauss.
    SparseMat assemble_bending(BendingTensor which) const;

    // kappa * int_omega A2^{abst} gamma_st gamma_ab sqrt(a) dy, 4x4 Gauss.
    SparseMat assemble_membrane_penalty(double kappa, int gauss_n = 4) const;

    // int_omega p^i(t) phi_i sqrt(a) dy with p from the load resultant.
    Eigen::VectorXd load_vector(const Loads& loads, double t) const;

private:
    const DofLayout2D* layout_;
    const SurfaceChart* chart_;
    MaterialParams mat_;
};

// One implicit-Euler step of the flexural evolution with the exponential
// memory recurrence:
//   M^n = e^{-k dt} M^{n-1} + dt/2 (e^{-k dt} K_C xi^{n-1} + K_C xi^n)
//   [K_A/3 + K_pen + K_B/(3 dt) - dt/6 K_C] xi^n
//     = F^n/s + K_B/(3 dt) xi^{n-1} + e^{-k dt}/3 (M^{n-1} + dt/2 K_C xi^{n-1}).
// The de-scaling factor s (1 or eps^3) multiplies both sides of the discrete
// equation, so it is cancelled analytically: the system is factored once
// unscaled and only the supplied loads are divided by s.
class VolterraStepper {
public:
    VolterraStepper(SparseMat K_A, SparseMat K_B, SparseMat K_C, SparseMat K_pen,
                    double k_decay, double dt, double scale);

    void set_initial(const Eigen::VectorXd& xi0);
    void step(const Eigen::VectorXd& rhs_load); // rhs_load already carries the scale

    const Eigen::VectorXd& state() const { return xi_; }
    const Eigen::VectorXd& previous() const { return xi_prev_; }
    const Eigen::VectorXd& memory() const { return memory_; }
    double time() const { return t_; }
    double dt() const { return dt_; }
    double scale() const { return scale_; }

    // relative residual of the discrete equation at the current state
    double residual(const Eigen::VectorXd& rhs_load) const;

    const SparseMat& K_A() const { return K_A_; }
    const SparseMat& K_B() const { return K_B_; }
    const SparseMat& K_C() const { return K_C_; }

private:
    SparseMat K_A_, K_B_, K_C_, K_pen_, system_;
    Eigen::SimplicialLDLT<SparseMat> solver_;
    double k_decay_, dt_, scale_, decay_;
    Eigen::VectorXd xi_, xi_prev_, memory_;
    double t_ = 0.0;
};

struct DisplacementHistory {
    double dt = 0.0;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states; // full-length dof vectors
    std::vector<double> residuals;
    std::vector<double> bending_energy; // (1/3) xi^T K_A xi
    std::vector<double> memory_norm;

    Eigen::VectorXd backward_difference(int n) const {
        return (states[n] - states[n - 1]) / dt;
    }
};

struct Solve2DOptions {
    int nx = 16, ny = 16;
    std::set<Edge> clamped = {Edge::Left};
    double dt = 0.05;
    double T = 1.0;
    double penalty_kappa = 1e6;
    std::optional<Formulation2D> formulation; // default: PlateBending on flat charts
    bool descaled = false;
    double epsilon = 0.1; // used by the de-scaled mode only
    std::optional<Eigen::VectorXd> xi0; // full-length; default zero
};

struct Flexural2DSolution {
    std::shared_ptr<Mesh2D> mesh;
    std::shared_ptr<DofLayout2D> layout;
    DisplacementHistory history;
    Formulation2D formulation = Formulation2D::PlateBending;
};

Flexural2DSolution solve2d(const SurfaceChart& chart, const MaterialParams& mat,
                           const Loads& loads, const Solve2DOptions& opt);

// Evaluate the FE field (full-length coefficient vector) anywhere on the
// domain, including the Hermite second derivatives.
class FieldEvaluator2D {
public:
    FieldEvaluator2D(const DofLayout2D& layout, const Eigen::VectorXd& coef);
    Field2DSample sample(const Eigen::Vector2d& y) const;

private:
    const DofLayout2D* layout_;
    const Eigen::VectorXd* coef_;
};

// Membrane (penalty) energy kappa-independent part: int A2 gamma:gamma sqrt(a).
double membrane_energy(const DofLayout2D& layout, const SurfaceChart& chart,
                       const MaterialParams& mat, const Eigen::VectorXd& coef);

// Quadrature-sampled broken H2 seminorm of (w_h - w_exact) over the mesh;
// gauss_n = 2 samples at the second-derivative superconvergence points of
// the bicubic, larger values give the fully integrated seminorm.
double broken_h2_error(const DofLayout2D& layout, const Eigen::VectorXd& coef,
                       const std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>& hess_exact,
                       int gauss_n);

} // namespace vishell
