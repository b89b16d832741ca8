#include "vishell/fem2d.hpp"

#include "vishell/elements.hpp"
#include "vishell/quadrature.hpp"

#include <cmath>
#include <iostream>

namespace vishell {

Eigen::Vector3d Loads::resultant(double t, const Eigen::Vector2d& y) const {
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    if (volume) {
        const QuadratureRule1D& q = gauss_legendre(8);
        for (size_t i = 0; i < q.points.size(); ++i) p += q.weights[i] * volume(t, y, q.points[i]);
    }
    if (traction_top) p += traction_top(t, y);
    if (traction_bottom) p += traction_bottom(t, y);
    return p;
}

DofLayout2D::DofLayout2D(const Mesh2D& mesh, Formulation2D form)
    : mesh_(&mesh), form_(form), per_node_(form == Formulation2D::Full ? 12 : 4) {
    free_of_dof_.assign(n_total(), -1);
    int next = 0;
    for (int node = 0; node < mesh.n_nodes(); ++node) {
        const bool vert = mesh.clamped_on_vertical(node);
        const bool horiz = mesh.clamped_on_horizontal(node);
        for (int c = 0; c < per_node_; ++c) {
            bool constrained = false;
            const int local = c % 4; // (value, d1, d2, d12) within the component block
            const bool is_w = (form == Formulation2D::PlateBending) || c >= 8;
            if (vert || horiz) {
                if (is_w) {
                    // eta3 = dnu eta3 = 0 kills the whole Hermite block
                    constrained = true;
                } else {
                    // tangential components: only the trace along the clamped
                    // edge vanishes; the normal-derivative dofs stay free
                    if (local == 0) constrained = true;
                    if (vert && local == 2) constrained = true;   // d2 trace on x = const
                    if (horiz && local == 1) constrained = true;  // d1 trace on y = const
                }
            }
            if (!constrained) free_of_dof_[dof(node, c)] = next++;
        }
    }
    n_free_ = next;
}

Eigen::VectorXd DofLayout2D::restrict_free(const Eigen::VectorXd& full) const {
    Eigen::VectorXd out(n_free_);
    for (int d = 0; d < n_total(); ++d)
        if (free_of_dof_[d] >= 0) out[free_of_dof_[d]] = full[d];
    return out;
}

Eigen::VectorXd DofLayout2D::expand_full(const Eigen::VectorXd& free) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_total());
    for (int d = 0; d < n_total(); ++d)
        if (free_of_dof_[d] >= 0) out[d] = free[free_of_dof_[d]];
    return out;
}

namespace {

constexpr int kMaxElemDof = 48;

struct ElementBasis {
    int ndof = 0;
    Field2DSample sample[kMaxElemDof];
};

// Basis fields at one local point; every component block is the Hermite
// bicubic in the per-node order (value, d1, d2, d12).
ElementBasis element_basis(const DofLayout2D& layout, double sx, double sy) {
    const Mesh2D& mesh = layout.mesh();
    ShapeValue2D herm[16];
    hermite_bicubic_basis(sx, sy, mesh.hx(), mesh.hy(), herm);

    ElementBasis basis;
    const bool full = layout.formulation() == Formulation2D::Full;
    basis.ndof = 4 * layout.per_node();
    int d = 0;
    for (int n = 0; n < 4; ++n) {
        if (full) {
            for (int a = 0; a < 2; ++a)
                for (int k = 0; k < 4; ++k) {
                    Field2DSample& s = basis.sample[d++];
                    s.eta[a] = herm[4 * n + k].n;
                    s.deta.row(a) = herm[4 * n + k].d1.transpose();
                }
        }
        for (int k = 0; k < 4; ++k) {
            Field2DSample& s = basis.sample[d++];
            s.eta3 = herm[4 * n + k].n;
            s.deta3 = herm[4 * n + k].d1;
            s.d2eta3 = herm[4 * n + k].d2;
        }
    }
    return basis;
}

std::vector<int> element_dofs(const DofLayout2D& layout, int e) {
    const auto nodes = layout.mesh().element_nodes(e);
    std::vector<int> dofs;
    dofs.reserve(4 * layout.per_node());
    for (int node : nodes)
        for (int c = 0; c < layout.per_node(); ++c) dofs.push_back(layout.dof(node, c));
    return dofs;
}

Field2DSample coefficient_sample(const DofLayout2D& layout, const Eigen::VectorXd& coef,
                                 int e, double sx, double sy) {
    const ElementBasis basis = element_basis(layout, sx, sy);
    const std::vector<int> dofs = element_dofs(layout, e);
    Field2DSample out;
    for (int d = 0; d < basis.ndof; ++d) {
        const double c = coef[dofs[d]];
        if (c == 0.0) continue;
        out.eta += c * basis.sample[d].eta;
        out.deta += c * basis.sample[d].deta;
        out.eta3 += c * basis.sample[d].eta3;
        out.deta3 += c * basis.sample[d].deta3;
        out.d2eta3 += c * basis.sample[d].d2eta3;
    }
    return out;
}

template <typename Kernel>
SparseMat assemble_matrix(const DofLayout2D& layout, const SurfaceChart& chart, int gauss_n,
                          Kernel&& kernel) {
    const Mesh2D& mesh = layout.mesh();
    const QuadratureRule1D& q = gauss_legendre(gauss_n);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(mesh.n_elements()) * kMaxElemDof * kMaxElemDof / 2);

    Eigen::Matrix<double, kMaxElemDof, kMaxElemDof> Ke;
    Eigen::Matrix2d strain[kMaxElemDof];

    for (int e = 0; e < mesh.n_elements(); ++e) {
        const Eigen::Vector2d origin = mesh.element_origin(e);
        const std::vector<int> dofs = element_dofs(layout, e);
        const int nd = static_cast<int>(dofs.size());
        Ke.setZero();
        for (size_t qx = 0; qx < q.points.size(); ++qx)
            for (size_t qy = 0; qy < q.points.size(); ++qy) {
                const double sx = 0.5 * (q.points[qx] + 1.0);
                const double sy = 0.5 * (q.points[qy] + 1.0);
                const double w = 0.25 * q.weights[qx] * q.weights[qy] * mesh.hx() * mesh.hy();
                const Eigen::Vector2d y(origin[0] + sx * mesh.hx(), origin[1] + sy * mesh.hy());
                const SurfacePointData surf = surface_eval(chart, y);
                const ElementBasis basis = element_basis(layout, sx, sy);
                const Tensor2x2x2x2* T = kernel(surf, basis, strain);
                const double www = w * std::sqrt(surf.area_a);
                for (int i = 0; i < nd; ++i)
                    for (int j = 0; j <= i; ++j) {
                        const double v = www * contract_2d(*T, strain[j], strain[i]);
                        Ke(i, j) += v;
                        if (i != j) Ke(j, i) += v;
                    }
            }
        for (int i = 0; i < nd; ++i) {
            const int fi = layout.free_index(dofs[i]);
            if (fi < 0) continue;
            for (int j = 0; j < nd; ++j) {
                const int fj = layout.free_index(dofs[j]);
                if (fj >= 0) trips.emplace_back(fi, fj, Ke(i, j));
            }
        }
    }
    SparseMat K(layout.n_free(), layout.n_free());
    K.setFromTriplets(trips.begin(), trips.end());
    return K;
}

} // namespace

FlexuralAssembler::FlexuralAssembler(const DofLayout2D& layout, const SurfaceChart& chart,
                                     const MaterialParams& mat)
    : layout_(&layout), chart_(&chart), mat_(mat) {}

SparseMat FlexuralAssembler::assemble_bending(BendingTensor which) const {
    return assemble_matrix(*layout_, *chart_, 3,
        [&](const SurfacePointData& surf, const ElementBasis& basis, Eigen::Matrix2d* strain)
            -> const Tensor2x2x2x2* {
            static thread_local TwoDTensors tensors;
            tensors = tensors_2d(mat_, surf);
            for (int d = 0; d < basis.ndof; ++d) strain[d] = bending_strain(basis.sample[d], surf);
            switch (which) {
                case BendingTensor::A: return &tensors.A2;
                case BendingTensor::B: return &tensors.B2;
                default: return &tensors.C2;
            }
        });
}

SparseMat FlexuralAssembler::assemble_membrane_penalty(double kappa, int gauss_n) const {
    if (kappa <= 0.0) throw Error("assemble_membrane_penalty: kappa must be positive");
    SparseMat K = assemble_matrix(*layout_, *chart_, gauss_n,
        [&](const SurfacePointData& surf, const ElementBasis& basis, Eigen::Matrix2d* strain)
            -> const Tensor2x2x2x2* {
            static thread_local TwoDTensors tensors;
            tensors = tensors_2d(mat_, surf);
            for (int d = 0; d < basis.ndof; ++d) strain[d] = membrane_strain(basis.sample[d], surf);
            return &tensors.A2;
        });
    return kappa * K;
}

Eigen::VectorXd FlexuralAssembler::load_vector(const Loads& loads, double t) const {
    const Mesh2D& mesh = layout_->mesh();
    const QuadratureRule1D& q = gauss_legendre(4);
    Eigen::VectorXd F = Eigen::VectorXd::Zero(layout_->n_free());
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const Eigen::Vector2d origin = mesh.element_origin(e);
        const std::vector<int> dofs = element_dofs(*layout_, e);
        for (size_t qx = 0; qx < q.points.size(); ++qx)
            for (size_t qy = 0; qy < q.points.size(); ++qy) {
                const double sx = 0.5 * (q.points[qx] + 1.0);
                const double sy = 0.5 * (q.points[qy] + 1.0);
                const double w = 0.25 * q.weights[qx] * q.weights[qy] * mesh.hx() * mesh.hy();
                const Eigen::Vector2d y(origin[0] + sx * mesh.hx(), origin[1] + sy * mesh.hy());
                const SurfacePointData surf = surface_eval(*chart_, y);
                const Eigen::Vector3d p = loads.resultant(t, y);
                const ElementBasis basis = element_basis(*layout_, sx, sy);
                const double www = w * std::sqrt(surf.area_a);
                for (int d = 0; d < basis.ndof; ++d) {
                    const int fi = layout_->free_index(dofs[d]);
                    if (fi < 0) continue;
                    const Field2DSample& s = basis.sample[d];
                    F[fi] += www * (p[0] * s.eta[0] + p[1] * s.eta[1] + p[2] * s.eta3);
                }
            }
    }
    return F;
}

VolterraStepper::VolterraStepper(SparseMat K_A, SparseMat K_B, SparseMat K_C, SparseMat K_pen,
                                 double k_decay, double dt, double scale)
    : K_A_(std::move(K_A)), K_B_(std::move(K_B)), K_C_(std::move(K_C)), K_pen_(std::move(K_pen)),
      k_decay_(k_decay), dt_(dt), scale_(scale), decay_(std::exp(-k_decay * dt)) {
    if (dt_ <= 0.0) throw Error("VolterraStepper: dt must be positive");
    if (scale_ <= 0.0) throw Error("VolterraStepper: scale must be positive");
    // the de-scaling factor multiplies both sides of the discrete equation,
    // so it cancels out of the solve; it is divided out of the loads instead
    system_ = K_A_ / 3.0 + K_B_ / (3.0 * dt_) - (dt_ / 6.0) * K_C_;
    if (K_pen_.nonZeros() > 0) system_ += K_pen_;
    solver_.compute(system_);
    if (solver_.info() != Eigen::Success || solver_.vectorD().minCoeff() <= 0.0) {
        throw IndefiniteSystemError(
            "time-step matrix failed the positive-definiteness probe; "
            "the time step is too large for the memory term");
    }
    const int n = static_cast<int>(K_A_.rows());
    xi_ = Eigen::VectorXd::Zero(n);
    xi_prev_ = xi_;
    memory_ = Eigen::VectorXd::Zero(n);
}

void VolterraStepper::set_initial(const Eigen::VectorXd& xi0) {
    xi_ = xi0;
    xi_prev_ = xi0;
    memory_.setZero();
    t_ = 0.0;
}

void VolterraStepper::step(const Eigen::VectorXd& rhs_load) {
    const Eigen::VectorXd memory_carry = decay_ * (memory_ + 0.5 * dt_ * (K_C_ * xi_));
    const Eigen::VectorXd rhs =
        rhs_load / scale_ + (K_B_ * xi_) / (3.0 * dt_) + memory_carry / 3.0;
    xi_prev_ = xi_;
    xi_ = solver_.solve(rhs);
    if (solver_.info() != Eigen::Success) throw SolverError("VolterraStepper: back substitution failed");
    memory_ = memory_carry + 0.5 * dt_ * (K_C_ * xi_);
    // memory_carry already contains the decayed half-weight of xi_prev_
    t_ += dt_;
}

double VolterraStepper::residual(const Eigen::VectorXd& rhs_load) const {
    // re-assembled form: s[(1/3)K_A + K_pen] xi + s K_B (xi - xi_prev)/(3 dt)
    //                    - s/3 memory = F
    Eigen::VectorXd r = scale_ * ((K_A_ * xi_) / 3.0 + (K_B_ * (xi_ - xi_prev_)) / (3.0 * dt_) -
                                  memory_ / 3.0) - rhs_load;
    if (K_pen_.nonZeros() > 0) r += scale_ * (K_pen_ * xi_);
    // backward-error normalization: |terms| . |state| bounds the round-off of
    // the re-assembly itself, so stiff penalties do not masquerade as failures
    const Eigen::VectorXd xa = xi_.cwiseAbs();
    double denom = rhs_load.norm() + scale_ * ((K_A_.cwiseAbs() * xa).norm() / 3.0 +
                                               (K_B_.cwiseAbs() * xa).norm() / (3.0 * dt_) +
                                               memory_.norm() / 3.0);
    if (K_pen_.nonZeros() > 0) denom += scale_ * (K_pen_.cwiseAbs() * xa).norm();
    return r.norm() / std::max(1.0, denom);
}

namespace {

bool chart_is_flat(const SurfaceChart& chart) {
    const ChartDomain dom = chart.domain();
    for (double u : {0.13, 0.52, 0.91})
        for (double v : {0.21, 0.77}) {
            const Eigen::Vector2d y(dom.o1 + u * dom.l1, dom.o2 + v * dom.l2);
            const SurfacePointData s = surface_eval(chart, y);
            if (s.b_lower.cwiseAbs().maxCoeff() > 1e-13) return false;
        }
    return true;
}

} // namespace

Flexural2DSolution solve2d(const SurfaceChart& chart, const MaterialParams& mat,
                           const Loads& loads, const Solve2DOptions& opt) {
    mat.require_viscous_branch();
    const bool flat = chart_is_flat(chart);
    Formulation2D form = opt.formulation.value_or(flat ? Formulation2D::PlateBending
                                                       : Formulation2D::Full);
    if (form == Formulation2D::PlateBending && !flat) {
        throw Error("solve2d: the plate-bending formulation needs a flat chart");
    }

    if (opt.clamped.empty()) {
        throw Error("solve2d: the clamped boundary portion must have positive length");
    }
    Flexural2DSolution sol;
    sol.mesh = std::make_shared<Mesh2D>(chart.domain(), opt.nx, opt.ny, opt.clamped);
    sol.layout = std::make_shared<DofLayout2D>(*sol.mesh, form);
    sol.formulation = form;

    FlexuralAssembler assembler(*sol.layout, chart, mat);
    const SparseMat K_A = assembler.assemble_bending(BendingTensor::A);
    const SparseMat K_B = assembler.assemble_bending(BendingTensor::B);
    const SparseMat K_C = assembler.assemble_bending(BendingTensor::C);
    SparseMat K_pen(sol.layout->n_free(), sol.layout->n_free());
    if (form == Formulation2D::Full) K_pen = assembler.assemble_membrane_penalty(opt.penalty_kappa);

    const double scale = opt.descaled ? opt.epsilon * opt.epsilon * opt.epsilon : 1.0;
    VolterraStepper stepper(K_A, K_B, K_C, K_pen, mat.k_decay(), opt.dt, scale);

    Eigen::VectorXd xi0_free = Eigen::VectorXd::Zero(sol.layout->n_free());
    if (opt.xi0) {
        xi0_free = sol.layout->restrict_free(*opt.xi0);
        if (xi0_free.norm() > 0.0) {
            std::cerr << "solve2d: warning: nonzero initial state is inconsistent with the "
                         "zero-initial-strain assumption used by the convergence checks\n";
        }
    }
    stepper.set_initial(xi0_free);

    DisplacementHistory& hist = sol.history;
    hist.dt = opt.dt;
    const int nsteps = static_cast<int>(std::llround(opt.T / opt.dt));
    hist.times.reserve(nsteps + 1);
    hist.states.reserve(nsteps + 1);

    auto record = [&](double residual) {
        hist.times.push_back(stepper.time());
        hist.states.push_back(sol.layout->expand_full(stepper.state()));
        hist.residuals.push_back(residual);
        hist.bending_energy.push_back(stepper.state().dot(K_A * stepper.state()) / 3.0);
        hist.memory_norm.push_back(stepper.memory().norm());
    };
    record(0.0);
    for (int n = 1; n <= nsteps; ++n) {
        const double t = n * opt.dt;
        const Eigen::VectorXd F = scale * assembler.load_vector(loads, t);
        stepper.step(F);
        const double res = stepper.residual(F);
        if (res > 1e-9) {
            throw SolverError("solve2d: discrete variational residual " + std::to_string(res) +
                              " exceeds tolerance at t=" + std::to_string(t));
        }
        record(res);
    }
    return sol;
}

FieldEvaluator2D::FieldEvaluator2D(const DofLayout2D& layout, const Eigen::VectorXd& coef)
    : layout_(&layout), coef_(&coef) {
    if (coef.size() != layout.n_total()) {
        throw Error("FieldEvaluator2D: expected a full-length coefficient vector");
    }
}

Field2DSample FieldEvaluator2D::sample(const Eigen::Vector2d& y) const {
    Eigen::Vector2d local;
    const int e = layout_->mesh().locate(y, local);
    return coefficient_sample(*layout_, *coef_, e, local[0], local[1]);
}

double membrane_energy(const DofLayout2D& layout, const SurfaceChart& chart,
                       const MaterialParams& mat, const Eigen::VectorXd& coef) {
    const Mesh2D& mesh = layout.mesh();
    const QuadratureRule1D& q = gauss_legendre(4);
    double energy = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const Eigen::Vector2d origin = mesh.element_origin(e);
        for (size_t qx = 0; qx < q.points.size(); ++qx)
            for (size_t qy = 0; qy < q.points.size(); ++qy) {
                const double sx = 0.5 * (q.points[qx] + 1.0);
                const double sy = 0.5 * (q.points[qy] + 1.0);
                const double w = 0.25 * q.weights[qx] * q.weights[qy] * mesh.hx() * mesh.hy();
                const Eigen::Vector2d y(origin[0] + sx * mesh.hx(), origin[1] + sy * mesh.hy());
                const SurfacePointData surf = surface_eval(chart, y);
                const TwoDTensors T = tensors_2d(mat, surf);
                const Field2DSample s = coefficient_sample(layout, coef, e, sx, sy);
                const Eigen::Matrix2d g = membrane_strain(s, surf);
                energy += w * std::sqrt(surf.area_a) * contract_2d(T.A2, g, g);
            }
    }
    return energy;
}

double broken_h2_error(const DofLayout2D& layout, const Eigen::VectorXd& coef,
                       const std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>& hess_exact,
                       int gauss_n) {
    const Mesh2D& mesh = layout.mesh();
    const QuadratureRule1D& q = gauss_legendre(gauss_n);
    double acc = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const Eigen::Vector2d origin = mesh.element_origin(e);
        for (size_t qx = 0; qx < q.points.size(); ++qx)
            for (size_t qy = 0; qy < q.points.size(); ++qy) {
                const double sx = 0.5 * (q.points[qx] + 1.0);
                const double sy = 0.5 * (q.points[qy] + 1.0);
                const double w = 0.25 * q.weights[qx] * q.weights[qy] * mesh.hx() * mesh.hy();
                const Eigen::Vector2d y(origin[0] + sx * mesh.hx(), origin[1] + sy * mesh.hy());
                const Field2DSample s = coefficient_sample(layout, coef, e, sx, sy);
                const Eigen::Matrix2d diff = s.d2eta3 - hess_exact(y);
                acc += w * diff.squaredNorm();
            }
    }
    return std::sqrt(acc);
}

} // namespace vishell
