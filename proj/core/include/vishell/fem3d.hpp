#pragma once

#include "vishell/fem2d.hpp"
#include "vishell/geometry.hpp"
#include "vishell/kinematics.hpp"
#include "vishell/material.hpp"
#include "vishell/mesh.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>
#include <optional>

namespace vishell {

// 3 unknowns per node (covariant components), Dirichlet on Gamma_0.
class DofLayout3D {
public:
    explicit DofLayout3D(const Mesh3D& mesh);

    int n_total() const { return 3 * mesh_->n_nodes(); }
    int n_free() const { return n_free_; }
    int dof(int node, int comp) const { return 3 * node + comp; }
    int free_index(int dof) const { return free_of_dof_[dof]; }
    bool constrained(int dof) const { return free_of_dof_[dof] < 0; }

    Eigen::VectorXd restrict_free(const Eigen::VectorXd& full) const;
    Eigen::VectorXd expand_full(const Eigen::VectorXd& free) const;

    const Mesh3D& mesh() const { return *mesh_; }

private:
    const Mesh3D* mesh_;
    int n_free_;
    std::vector<int> free_of_dof_;
};

struct Assemble3DOptions {
    bool selective_reduced_shear = false; // reduced in-plane rule on transverse-strain terms
};

// Stiffness/viscosity matrices of the scaled 3D problem:
//   K(u, v) = int_Omega T^{ijkl}(eps) e_{k||l}(eps; u) e_{i||j}(eps; v) sqrt(g(eps)) dx.
class ShellAssembler3D {
public:
    ShellAssembler3D(const DofLayout3D& layout, const SurfaceChart& chart,
                     const MaterialParams& mat, double eps,
                     Assemble3DOptions opt = {});

    std::pair<SparseMat, SparseMat> assemble_stiffness() const; // (K_A(eps), K_B(eps))

    // eps^2 [ int f^{i,2} v_i sqrt(g) dx + int_{Gamma+-} h^{i,3} v_i sqrt(g) dGamma ]
    Eigen::VectorXd load_vector(const Loads& loads, double t) const;

    double epsilon() const { return eps_; }

private:
    const DofLayout3D* layout_;
    const SurfaceChart* chart_;
    MaterialParams mat_;
    double eps_;
    Assemble3DOptions opt_;
};

struct Solve3DOptions {
    int nx = 16, ny = 16, nz = 8;
    std::set<Edge> clamped = {Edge::Left};
    double dt = 0.05;
    double T = 1.0;
    double epsilon = 0.1;
    Assemble3DOptions assembly;
    std::optional<Eigen::VectorXd> u0; // full-length; default zero
};

struct Shell3DSolution {
    std::shared_ptr<Mesh2D> footprint;
    std::shared_ptr<Mesh3D> mesh;
    std::shared_ptr<DofLayout3D> layout;
    DisplacementHistory history; // bending_energy column holds u^T K_A u here
    double epsilon = 0.0;
};

// Implicit Euler for the Kelvin-Voigt pair: (K_A + K_B/dt) u^n = F^n + K_B/dt u^{n-1}.
class KelvinVoigtStepper {
public:
    KelvinVoigtStepper(SparseMat K_A, SparseMat K_B, double dt);
    void set_initial(const Eigen::VectorXd& u0);
    void step(const Eigen::VectorXd& rhs_load);
    const Eigen::VectorXd& state() const { return u_; }
    double time() const { return t_; }
    const SparseMat& K_A() const { return K_A_; }
    const SparseMat& K_B() const { return K_B_; }

private:
    SparseMat K_A_, K_B_, system_;
    Eigen::SimplicialLDLT<SparseMat> solver_;
    double dt_;
    Eigen::VectorXd u_;
    double t_ = 0.0;
};

Shell3DSolution solve3d(const SurfaceChart& chart, const MaterialParams& mat,
                        const Loads& loads, const Solve3DOptions& opt);

// Transversal average (1/2) int_{-1}^{1} u dx3 by the composite trapezoid
// over the node columns; returns one 3-vector per footprint node, flattened
// node-major.
Eigen::VectorXd transverse_average(const Mesh3D& mesh, const Eigen::VectorXd& full_u);

// Evaluate an averaged (or any footprint-nodal 3-component) field and its
// in-plane gradient with the bilinear element basis.
struct AveragedSample {
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    Eigen::Matrix<double, 3, 2> dv = Eigen::Matrix<double, 3, 2>::Zero(); // dv(i, a) = d_a v_i
};
AveragedSample eval_footprint_field(const Mesh2D& mesh, const Eigen::VectorXd& nodal3,
                                    const Eigen::Vector2d& y);

// Evaluate the 3D FE field sample (values + coordinate derivatives) at a
// point of the fixed domain.
Field3DSample eval_field_3d(const Mesh3D& mesh, const Eigen::VectorXd& full_u,
                            const Eigen::Vector3d& x);

// eps * ||v||_{1,Omega} / (sum_{ij} |e_{i||j}(eps; v)|^2_{0,Omega})^{1/2};
// throws ZeroFieldError on a vanishing field and InadmissibleFieldError if v
// is nonzero on Gamma_0.
double korn_ratio(const DofLayout3D& layout, const SurfaceChart& chart, double eps,
                  const Eigen::VectorXd& full_v);

} // namespace vishell
