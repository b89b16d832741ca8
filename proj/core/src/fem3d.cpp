#include "vishell/fem3d.hpp"

#include "vishell/elements.hpp"
#include "vishell/quadrature.hpp"

#include <cmath>

namespace vishell {

DofLayout3D::DofLayout3D(const Mesh3D& mesh) : mesh_(&mesh) {
    free_of_dof_.assign(n_total(), -1);
    int next = 0;
    for (int node = 0; node < mesh.n_nodes(); ++node) {
        const bool clamped = mesh.on_gamma0(node);
        for (int c = 0; c < 3; ++c)
            if (!clamped) free_of_dof_[dof(node, c)] = next++;
    }
    n_free_ = next;
}

Eigen::VectorXd DofLayout3D::restrict_free(const Eigen::VectorXd& full) const {
    Eigen::VectorXd out(n_free_);
    for (int d = 0; d < n_total(); ++d)
        if (free_of_dof_[d] >= 0) out[free_of_dof_[d]] = full[d];
    return out;
}

Eigen::VectorXd DofLayout3D::expand_full(const Eigen::VectorXd& free) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_total());
    for (int d = 0; d < n_total(); ++d)
        if (free_of_dof_[d] >= 0) out[d] = free[free_of_dof_[d]];
    return out;
}

namespace {

// Split of the constitutive quadratic form by strain slots: the transverse
// group couples at least one index-3 strain component. Used by selective
// reduced integration, which underintegrates only that group in-plane.
Eigen::Matrix<double, 6, 6> voigt_group(const Tensor3x3x3x3& T, bool transverse) {
    // Voigt order (11, 22, 33, 23, 13, 12): slots 2..4 carry an index 3.
    auto is_trans = [](int I) { return I >= 2 && I <= 4; };
    Eigen::Matrix<double, 6, 6> M = voigt_3d(T);
    for (int I = 0; I < 6; ++I)
        for (int J = 0; J < 6; ++J) {
            const bool trans = is_trans(I) || is_trans(J);
            if (trans != transverse) M(I, J) = 0.0;
        }
    return M;
}

} // namespace

ShellAssembler3D::ShellAssembler3D(const DofLayout3D& layout, const SurfaceChart& chart,
                                   const MaterialParams& mat, double eps, Assemble3DOptions opt)
    : layout_(&layout), chart_(&chart), mat_(mat), eps_(eps), opt_(opt) {
    if (eps_ <= 0.0) throw Error("ShellAssembler3D: eps must be positive");
}

std::pair<SparseMat, SparseMat> ShellAssembler3D::assemble_stiffness() const {
    const Mesh3D& mesh = layout_->mesh();
    const Mesh2D& fp = mesh.footprint();
    const QuadratureRule1D& q2 = gauss_legendre(2);
    const QuadratureRule1D& q1 = gauss_legendre(1);

    std::vector<Eigen::Triplet<double>> tA, tB;
    tA.reserve(static_cast<size_t>(mesh.n_elements()) * 24 * 24);
    tB.reserve(tA.capacity());

    Eigen::Matrix<double, 24, 24> KeA, KeB;
    Eigen::Matrix<double, 6, 24> Bmat;

    // passes: full rule over everything, or (with SRI) full rule on the
    // in-plane group + reduced in-plane rule on the transverse group
    struct Pass {
        const QuadratureRule1D* qx;
        int group; // -1 all, 0 in-plane only, 1 transverse only
    };
    std::vector<Pass> passes;
    if (opt_.selective_reduced_shear) {
        passes.push_back({&q2, 0});
        passes.push_back({&q1, 1});
    } else {
        passes.push_back({&q2, -1});
    }

    for (int e = 0; e < mesh.n_elements(); ++e) {
        const Eigen::Vector3d origin = mesh.element_origin(e);
        const auto nodes = mesh.element_nodes(e);
        KeA.setZero();
        KeB.setZero();
        for (const Pass& pass : passes) {
            const QuadratureRule1D& qip = *pass.qx;
            for (size_t ix = 0; ix < qip.points.size(); ++ix)
                for (size_t iy = 0; iy < qip.points.size(); ++iy)
                    for (size_t iz = 0; iz < q2.points.size(); ++iz) {
                        const double sx = 0.5 * (qip.points[ix] + 1.0);
                        const double sy = 0.5 * (qip.points[iy] + 1.0);
                        const double sz = 0.5 * (q2.points[iz] + 1.0);
                        const double w = 0.125 * qip.weights[ix] * qip.weights[iy] * q2.weights[iz] *
                                         fp.hx() * fp.hy() * mesh.hz();
                        const Eigen::Vector3d x(origin[0] + sx * fp.hx(), origin[1] + sy * fp.hy(),
                                                origin[2] + sz * mesh.hz());
                        const VolumePointData vol = volume_eval(*chart_, eps_, x);
                        const ThreeDTensors T = tensors_3d(mat_, vol);
                        Eigen::Matrix<double, 6, 6> A6, B6;
                        if (pass.group < 0) {
                            A6 = voigt_3d(T.A3);
                            B6 = voigt_3d(T.B3);
                        } else {
                            A6 = voigt_group(T.A3, pass.group == 1);
                            B6 = voigt_group(T.B3, pass.group == 1);
                        }

                        ShapeValue3D shp[8];
                        trilinear_basis(sx, sy, sz, fp.hx(), fp.hy(), mesh.hz(), shp);
                        for (int n = 0; n < 8; ++n)
                            for (int c = 0; c < 3; ++c) {
                                Field3DSample f;
                                f.v[c] = shp[n].n;
                                f.dv.row(c) = shp[n].d1.transpose();
                                Bmat.col(3 * n + c) = strain_voigt(scaled_strain_3d(f, vol));
                            }
                        const double ws = w * std::sqrt(vol.det_g);
                        KeA.noalias() += ws * Bmat.transpose() * A6 * Bmat;
                        KeB.noalias() += ws * Bmat.transpose() * B6 * Bmat;
                    }
        }
        for (int i = 0; i < 24; ++i) {
            const int fi = layout_->free_index(layout_->dof(nodes[i / 3], i % 3));
            if (fi < 0) continue;
            for (int j = 0; j < 24; ++j) {
                const int fj = layout_->free_index(layout_->dof(nodes[j / 3], j % 3));
                if (fj < 0) continue;
                tA.emplace_back(fi, fj, KeA(i, j));
                tB.emplace_back(fi, fj, KeB(i, j));
            }
        }
    }
    SparseMat K_A(layout_->n_free(), layout_->n_free());
    SparseMat K_B(layout_->n_free(), layout_->n_free());
    K_A.setFromTriplets(tA.begin(), tA.end());
    K_B.setFromTriplets(tB.begin(), tB.end());
    return {std::move(K_A), std::move(K_B)};
}

Eigen::VectorXd ShellAssembler3D::load_vector(const Loads& loads, double t) const {
    const Mesh3D& mesh = layout_->mesh();
    const Mesh2D& fp = mesh.footprint();
    const QuadratureRule1D& q = gauss_legendre(2);
    const double eps2 = eps_ * eps_;
    Eigen::VectorXd F = Eigen::VectorXd::Zero(layout_->n_free());

    if (loads.volume) {
        for (int e = 0; e < mesh.n_elements(); ++e) {
            const Eigen::Vector3d origin = mesh.element_origin(e);
            const auto nodes = mesh.element_nodes(e);
            for (size_t ix = 0; ix < q.points.size(); ++ix)
                for (size_t iy = 0; iy < q.points.size(); ++iy)
                    for (size_t iz = 0; iz < q.points.size(); ++iz) {
                        const double sx = 0.5 * (q.points[ix] + 1.0);
                        const double sy = 0.5 * (q.points[iy] + 1.0);
                        const double sz = 0.5 * (q.points[iz] + 1.0);
                        const double w = 0.125 * q.weights[ix] * q.weights[iy] * q.weights[iz] *
                                         fp.hx() * fp.hy() * mesh.hz();
                        const Eigen::Vector3d x(origin[0] + sx * fp.hx(), origin[1] + sy * fp.hy(),
                                                origin[2] + sz * mesh.hz());
                        const VolumePointData vol = volume_eval(*chart_, eps_, x);
                        const Eigen::Vector3d f = loads.volume(t, x.head<2>(), x[2]);
                        ShapeValue3D shp[8];
                        trilinear_basis(sx, sy, sz, fp.hx(), fp.hy(), mesh.hz(), shp);
                        const double ws = eps2 * w * std::sqrt(vol.det_g);
                        for (int n = 0; n < 8; ++n)
                            for (int c = 0; c < 3; ++c) {
                                const int fi = layout_->free_index(layout_->dof(nodes[n], c));
                                if (fi >= 0) F[fi] += ws * f[c] * shp[n].n;
                            }
                    }
        }
    }

    auto add_face = [&](int level, double x3,
                        const std::function<Eigen::Vector3d(double, const Eigen::Vector2d&)>& h) {
        if (!h) return;
        ShapeValue2D shp[4];
        for (int e2 = 0; e2 < fp.n_elements(); ++e2) {
            const Eigen::Vector2d origin = fp.element_origin(e2);
            const auto base = fp.element_nodes(e2);
            for (size_t ix = 0; ix < q.points.size(); ++ix)
                for (size_t iy = 0; iy < q.points.size(); ++iy) {
                    const double sx = 0.5 * (q.points[ix] + 1.0);
                    const double sy = 0.5 * (q.points[iy] + 1.0);
                    const double w = 0.25 * q.weights[ix] * q.weights[iy] * fp.hx() * fp.hy();
                    const Eigen::Vector2d y(origin[0] + sx * fp.hx(), origin[1] + sy * fp.hy());
                    const VolumePointData vol = volume_eval(*chart_, eps_, {y[0], y[1], x3});
                    const Eigen::Vector3d hv = h(t, y);
                    bilinear_basis(sx, sy, fp.hx(), fp.hy(), shp);
                    const double ws = eps2 * w * std::sqrt(vol.det_g);
                    for (int n = 0; n < 4; ++n)
                        for (int c = 0; c < 3; ++c) {
                            const int fi = layout_->free_index(
                                layout_->dof(mesh.node_id(base[n], level), c));
                            if (fi >= 0) F[fi] += ws * hv[c] * shp[n].n;
                        }
                }
        }
    };
    add_face(mesh.nz(), 1.0, loads.traction_top);
    add_face(0, -1.0, loads.traction_bottom);
    return F;
}

KelvinVoigtStepper::KelvinVoigtStepper(SparseMat K_A, SparseMat K_B, double dt)
    : K_A_(std::move(K_A)), K_B_(std::move(K_B)), dt_(dt) {
    if (dt_ <= 0.0) throw Error("KelvinVoigtStepper: dt must be positive");
    system_ = K_A_ + K_B_ / dt_;
    solver_.compute(system_);
    if (solver_.info() != Eigen::Success || solver_.vectorD().minCoeff() <= 0.0) {
        throw SolverError("KelvinVoigtStepper: factorization failed");
    }
    u_ = Eigen::VectorXd::Zero(K_A_.rows());
}

void KelvinVoigtStepper::set_initial(const Eigen::VectorXd& u0) {
    u_ = u0;
    t_ = 0.0;
}

void KelvinVoigtStepper::step(const Eigen::VectorXd& rhs_load) {
    const Eigen::VectorXd rhs = rhs_load + (K_B_ * u_) / dt_;
    u_ = solver_.solve(rhs);
    if (solver_.info() != Eigen::Success) throw SolverError("KelvinVoigtStepper: solve failed");
    t_ += dt_;
}

Shell3DSolution solve3d(const SurfaceChart& chart, const MaterialParams& mat,
                        const Loads& loads, const Solve3DOptions& opt) {
    Shell3DSolution sol;
    sol.footprint = std::make_shared<Mesh2D>(chart.domain(), opt.nx, opt.ny, opt.clamped);
    sol.mesh = std::make_shared<Mesh3D>(*sol.footprint, opt.nz);
    sol.layout = std::make_shared<DofLayout3D>(*sol.mesh);
    sol.epsilon = opt.epsilon;

    ShellAssembler3D assembler(*sol.layout, chart, mat, opt.epsilon, opt.assembly);
    auto [K_A, K_B] = assembler.assemble_stiffness();
    KelvinVoigtStepper stepper(std::move(K_A), std::move(K_B), opt.dt);

    Eigen::VectorXd u0_free = Eigen::VectorXd::Zero(sol.layout->n_free());
    if (opt.u0) u0_free = sol.layout->restrict_free(*opt.u0);
    stepper.set_initial(u0_free);

    DisplacementHistory& hist = sol.history;
    hist.dt = opt.dt;
    const int nsteps = static_cast<int>(std::llround(opt.T / opt.dt));
    auto record = [&]() {
        hist.times.push_back(stepper.time());
        hist.states.push_back(sol.layout->expand_full(stepper.state()));
        hist.bending_energy.push_back(stepper.state().dot(stepper.K_A() * stepper.state()));
        hist.memory_norm.push_back(0.0);
        hist.residuals.push_back(0.0);
    };
    record();
    for (int n = 1; n <= nsteps; ++n) {
        stepper.step(assembler.load_vector(loads, n * opt.dt));
        record();
    }
    return sol;
}

Eigen::VectorXd transverse_average(const Mesh3D& mesh, const Eigen::VectorXd& full_u) {
    const int nn2 = mesh.footprint().n_nodes();
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(3 * nn2);
    const double hz = mesh.hz();
    for (int node = 0; node < nn2; ++node)
        for (int c = 0; c < 3; ++c) {
            double acc = 0.0;
            for (int k = 0; k <= mesh.nz(); ++k) {
                const double wz = (k == 0 || k == mesh.nz()) ? 0.5 : 1.0;
                acc += wz * full_u[3 * mesh.node_id(node, k) + c];
            }
            avg[3 * node + c] = 0.5 * hz * acc;
        }
    return avg;
}

AveragedSample eval_footprint_field(const Mesh2D& mesh, const Eigen::VectorXd& nodal3,
                                    const Eigen::Vector2d& y) {
    Eigen::Vector2d local;
    const int e = mesh.locate(y, local);
    const auto nodes = mesh.element_nodes(e);
    ShapeValue2D shp[4];
    bilinear_basis(local[0], local[1], mesh.hx(), mesh.hy(), shp);
    AveragedSample out;
    for (int n = 0; n < 4; ++n)
        for (int c = 0; c < 3; ++c) {
            const double v = nodal3[3 * nodes[n] + c];
            out.v[c] += v * shp[n].n;
            out.dv.row(c) += v * shp[n].d1.transpose();
        }
    return out;
}

Field3DSample eval_field_3d(const Mesh3D& mesh, const Eigen::VectorXd& full_u,
                            const Eigen::Vector3d& x) {
    const Mesh2D& fp = mesh.footprint();
    Eigen::Vector2d local2;
    const int e2 = fp.locate(x.head<2>(), local2);
    const double z = std::clamp((x[2] + 1.0) / mesh.hz(), 0.0, static_cast<double>(mesh.nz()));
    const int layer = std::min(static_cast<int>(z), mesh.nz() - 1);
    const double sz = z - layer;

    const auto base = fp.element_nodes(e2);
    ShapeValue3D shp[8];
    trilinear_basis(local2[0], local2[1], sz, fp.hx(), fp.hy(), mesh.hz(), shp);
    Field3DSample out;
    for (int k = 0; k < 2; ++k)
        for (int n = 0; n < 4; ++n) {
            const int node = mesh.node_id(base[n], layer + k);
            for (int c = 0; c < 3; ++c) {
                const double v = full_u[3 * node + c];
                out.v[c] += v * shp[4 * k + n].n;
                out.dv.row(c) += v * shp[4 * k + n].d1.transpose();
            }
        }
    return out;
}

double korn_ratio(const DofLayout3D& layout, const SurfaceChart& chart, double eps,
                  const Eigen::VectorXd& full_v) {
    const Mesh3D& mesh = layout.mesh();
    const Mesh2D& fp = mesh.footprint();
    if (full_v.size() != layout.n_total()) throw Error("korn_ratio: full-length vector expected");
    for (int node = 0; node < mesh.n_nodes(); ++node)
        if (mesh.on_gamma0(node))
            for (int c = 0; c < 3; ++c)
                if (full_v[3 * node + c] != 0.0) {
                    throw InadmissibleFieldError("korn_ratio: field does not vanish on Gamma_0");
                }
    if (full_v.norm() == 0.0) throw ZeroFieldError("korn_ratio: zero field");

    const QuadratureRule1D& q = gauss_legendre(2);
    double h1 = 0.0, strain = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const Eigen::Vector3d origin = mesh.element_origin(e);
        const auto nodes = mesh.element_nodes(e);
        for (size_t ix = 0; ix < q.points.size(); ++ix)
            for (size_t iy = 0; iy < q.points.size(); ++iy)
                for (size_t iz = 0; iz < q.points.size(); ++iz) {
                    const double sx = 0.5 * (q.points[ix] + 1.0);
                    const double sy = 0.5 * (q.points[iy] + 1.0);
                    const double sz = 0.5 * (q.points[iz] + 1.0);
                    const double w = 0.125 * q.weights[ix] * q.weights[iy] * q.weights[iz] *
                                     fp.hx() * fp.hy() * mesh.hz();
                    const Eigen::Vector3d x(origin[0] + sx * fp.hx(), origin[1] + sy * fp.hy(),
                                            origin[2] + sz * mesh.hz());
                    ShapeValue3D shp[8];
                    trilinear_basis(sx, sy, sz, fp.hx(), fp.hy(), mesh.hz(), shp);
                    Field3DSample f;
                    for (int n = 0; n < 8; ++n)
                        for (int c = 0; c < 3; ++c) {
                            const double v = full_v[3 * nodes[n] + c];
                            f.v[c] += v * shp[n].n;
                            f.dv.row(c) += v * shp[n].d1.transpose();
                        }
                    const VolumePointData vol = volume_eval(chart, eps, x);
                    const Eigen::Matrix3d E = scaled_strain_3d(f, vol);
                    h1 += w * (f.v.squaredNorm() + f.dv.squaredNorm());
                    strain += w * E.squaredNorm();
                }
    }
    if (strain <= 0.0) throw ZeroFieldError("korn_ratio: vanishing scaled strain");
    return eps * std::sqrt(h1) / std::sqrt(strain);
}

} // namespace vishell
