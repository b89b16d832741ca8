#include "vishell/kinematics.hpp"

namespace vishell {

Eigen::Matrix2d membrane_strain(const Field2DSample& f, const SurfacePointData& s) {
    Eigen::Matrix2d g;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double v = 0.5 * (f.deta(a, b) + f.deta(b, a));
            for (int sg = 0; sg < 2; ++sg) v -= s.christoffel[sg][a][b] * f.eta[sg];
            v -= s.b_lower(a, b) * f.eta3;
            g(a, b) = v;
        }
    return g;
}

Eigen::Matrix2d bending_strain(const Field2DSample& f, const SurfacePointData& s) {
    Eigen::Matrix2d r;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double v = f.d2eta3(a, b);
            for (int sg = 0; sg < 2; ++sg) v -= s.christoffel[sg][a][b] * f.deta3[sg];
            double bb = 0.0;
            for (int sg = 0; sg < 2; ++sg) bb += s.b_mixed(sg, a) * s.b_lower(sg, b);
            v -= bb * f.eta3;
            for (int sg = 0; sg < 2; ++sg) {
                double cov = f.deta(sg, b);
                for (int t = 0; t < 2; ++t) cov -= s.christoffel[t][b][sg] * f.eta[t];
                v += s.b_mixed(sg, a) * cov;
            }
            for (int t = 0; t < 2; ++t) {
                double cov = f.deta(t, a);
                for (int sg = 0; sg < 2; ++sg) cov -= s.christoffel[sg][a][t] * f.eta[sg];
                v += s.b_mixed(t, b) * cov;
            }
            for (int t = 0; t < 2; ++t) v += s.b_cov_deriv[t][b][a] * f.eta[t];
            r(a, b) = v;
        }
    return r;
}

Eigen::Matrix3d scaled_strain_3d(const Field3DSample& f, const VolumePointData& vol) {
    const double inv_eps = 1.0 / vol.epsilon;
    Eigen::Matrix3d e;
    for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b) {
            double v = 0.5 * (f.dv(a, b) + f.dv(b, a));
            for (int p = 0; p < 3; ++p) v -= vol.christoffel[p][a][b] * f.v[p];
            e(a, b) = e(b, a) = v;
        }
    for (int a = 0; a < 2; ++a) {
        double v = 0.5 * (inv_eps * f.dv(a, 2) + f.dv(2, a));
        for (int sg = 0; sg < 2; ++sg) v -= vol.christoffel[sg][a][2] * f.v[sg];
        e(a, 2) = e(2, a) = v;
    }
    e(2, 2) = inv_eps * f.dv(2, 2);
    return e;
}

Eigen::Matrix2d corrected_strain_1(const Field3DSample& f, const SurfacePointData& s,
                                   double eps, double x3) {
    Field2DSample planar;
    planar.eta = f.v.head<2>();
    planar.deta = f.dv.topLeftCorner<2, 2>();
    planar.eta3 = f.v[2];
    planar.deta3 = f.dv.row(2).head<2>();
    const Eigen::Matrix2d gamma = membrane_strain(planar, s);

    Eigen::Matrix2d e1;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double corr = 0.0;
            for (int sg = 0; sg < 2; ++sg) corr += s.b_cov_deriv[sg][b][a] * f.v[sg];
            double bb = 0.0;
            for (int sg = 0; sg < 2; ++sg) bb += s.b_mixed(sg, a) * s.b_lower(sg, b);
            corr += bb * f.v[2];
            e1(a, b) = gamma(a, b) / eps + x3 * corr;
        }
    return e1;
}

Field3DSample kirchhoff_lift_sample(const Field2DSample& f, const SurfacePointData& s,
                                    double eps, double x3) {
    Eigen::Vector2d theta;
    Eigen::Matrix2d dtheta; // dtheta(a, b) = d_b theta_a
    for (int a = 0; a < 2; ++a) {
        double t = f.deta3[a];
        for (int sg = 0; sg < 2; ++sg) t += 2.0 * s.b_mixed(sg, a) * f.eta[sg];
        theta[a] = t;
        for (int b = 0; b < 2; ++b) {
            double dt = f.d2eta3(a, b);
            for (int sg = 0; sg < 2; ++sg)
                dt += 2.0 * (s.db_mixed[sg][a][b] * f.eta[sg] + s.b_mixed(sg, a) * f.deta(sg, b));
            dtheta(a, b) = dt;
        }
    }

    Field3DSample out;
    out.v.head<2>() = f.eta - eps * x3 * theta;
    out.v[2] = f.eta3;
    out.dv.setZero();
    out.dv.topLeftCorner<2, 2>() = f.deta - eps * x3 * dtheta;
    out.dv(0, 2) = -eps * theta[0];
    out.dv(1, 2) = -eps * theta[1];
    out.dv.row(2).head<2>() = f.deta3;
    out.dv(2, 2) = 0.0;
    return out;
}

Field2DSample AnalyticField2D::sample(const Eigen::Vector2d& y) const {
    Field2DSample s;
    auto eval = [&](const Scalar& fn) { return fn ? fn(y) : 0.0; };
    s.eta[0] = eval(value[0]);
    s.eta[1] = eval(value[1]);
    s.eta3 = eval(value[2]);
    for (int a = 0; a < 2; ++a) {
        s.deta(0, a) = eval(d1[0][a]);
        s.deta(1, a) = eval(d1[1][a]);
        s.deta3[a] = eval(d1[2][a]);
        for (int b = 0; b < 2; ++b) s.d2eta3(a, b) = eval(d2_eta3[a][b]);
    }
    return s;
}

Field3DSample AnalyticField3D::sample(const Eigen::Vector3d& x) const {
    Field3DSample s;
    auto eval = [&](const Scalar& fn) { return fn ? fn(x) : 0.0; };
    for (int i = 0; i < 3; ++i) {
        s.v[i] = eval(value[i]);
        for (int j = 0; j < 3; ++j) s.dv(i, j) = eval(d1[i][j]);
    }
    return s;
}

} // namespace vishell
