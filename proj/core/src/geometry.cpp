#include "vishell/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace vishell {

SurfacePointData surface_eval(const SurfaceChart& chart, const Eigen::Vector2d& y) {
    SurfacePointData s;
    s.a_cov[0] = chart.first_derivative(0, y);
    s.a_cov[1] = chart.first_derivative(1, y);

    const Eigen::Vector3d cross = s.a_cov[0].cross(s.a_cov[1]);
    const double cn = cross.norm();
    if (cn < 1e-12 * s.a_cov[0].norm() * s.a_cov[1].norm()) {
        throw DegenerateChartError("surface_eval: tangent vectors linearly dependent at y=(" +
                                   std::to_string(y[0]) + ", " + std::to_string(y[1]) + ")");
    }
    s.a3 = cross / cn;

    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) s.a_lower(a, b) = s.a_cov[a].dot(s.a_cov[b]);
    s.area_a = s.a_lower.determinant();
    s.a_upper = s.a_lower.inverse();
    for (int a = 0; a < 2; ++a)
        s.a_con[a] = s.a_upper(a, 0) * s.a_cov[0] + s.a_upper(a, 1) * s.a_cov[1];

    Eigen::Vector3d d2[2][2];
    for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b) d2[a][b] = d2[b][a] = chart.second_derivative(a, b, y);

    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) s.b_lower(a, b) = s.a3.dot(d2[a][b]);
    s.b_mixed = s.a_upper * s.b_lower;

    for (int sg = 0; sg < 2; ++sg)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) s.christoffel[sg][a][b] = s.a_con[sg].dot(d2[a][b]);

    // d_gamma of the metric, its inverse and the curvature tensor; the normal
    // derivative uses the Weingarten relation d_gamma a3 = -b^sigma_gamma a_sigma.
    Eigen::Matrix2d da_lower[2], da_upper[2], db_lower[2];
    Eigen::Vector3d da3[2];
    for (int g = 0; g < 2; ++g) {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                da_lower[g](a, b) = d2[a][g].dot(s.a_cov[b]) + s.a_cov[a].dot(d2[b][g]);
        da_upper[g] = -s.a_upper * da_lower[g] * s.a_upper;
        da3[g] = -(s.b_mixed(0, g) * s.a_cov[0] + s.b_mixed(1, g) * s.a_cov[1]);
        for (int t = 0; t < 2; ++t)
            for (int b = 0; b < 2; ++b)
                db_lower[g](t, b) = da3[g].dot(d2[t][b]) + s.a3.dot(chart.third_derivative(t, b, g, y));
    }
    for (int g = 0; g < 2; ++g) {
        const Eigen::Matrix2d dbm = da_upper[g] * s.b_lower + s.a_upper * db_lower[g];
        for (int sg = 0; sg < 2; ++sg)
            for (int b = 0; b < 2; ++b) s.db_mixed[sg][b][g] = dbm(sg, b);
    }

    // b^sigma_beta|_alpha = d_alpha b^sigma_beta + Gamma^sigma_{alpha tau} b^tau_beta
    //                       - Gamma^tau_{alpha beta} b^sigma_tau
    for (int sg = 0; sg < 2; ++sg)
        for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 2; ++a) {
                double v = s.db_mixed[sg][b][a];
                for (int t = 0; t < 2; ++t)
                    v += s.christoffel[sg][a][t] * s.b_mixed(t, b) - s.christoffel[t][a][b] * s.b_mixed(sg, t);
                s.b_cov_deriv[sg][b][a] = v;
            }

    s.codazzi_defect = 0.0;
    for (int sg = 0; sg < 2; ++sg)
        for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 2; ++a)
                s.codazzi_defect = std::max(s.codazzi_defect,
                                            std::abs(s.b_cov_deriv[sg][b][a] - s.b_cov_deriv[sg][a][b]));
    return s;
}

VolumePointData volume_eval(const SurfaceChart& chart, double eps, const Eigen::Vector3d& x) {
    const Eigen::Vector2d y(x[0], x[1]);
    const double z = eps * x[2]; // physical transverse offset
    const SurfacePointData s = surface_eval(chart, y);

    VolumePointData v;
    v.epsilon = eps;

    // g_alpha = (delta^sigma_alpha - z b^sigma_alpha) a_sigma, g_3 = a3. The
    // shift matrix has real eigenvalues (1 - z * principal curvatures); both
    // must stay positive on the way from the midsurface, i.e. det > 0 and
    // trace > 0.
    const Eigen::Matrix2d shift = Eigen::Matrix2d::Identity() - z * s.b_mixed;
    if (shift.determinant() <= 0.0 || shift.trace() <= 0.0) {
        throw EpsilonTooLargeError("volume_eval: offset map degenerates at x3=" +
                                   std::to_string(x[2]) + " for eps=" + std::to_string(eps));
    }
    for (int a = 0; a < 2; ++a) v.g_cov[a] = shift(0, a) * s.a_cov[0] + shift(1, a) * s.a_cov[1];
    v.g_cov[2] = s.a3;

    // The normal-offset chart keeps g_{alpha 3} = 0 and g_{33} = 1 identically,
    // so the metric is stored in its exact block form.
    Eigen::Matrix2d g2;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) g2(a, b) = v.g_cov[a].dot(v.g_cov[b]);
    v.g_lower.setZero();
    v.g_lower.topLeftCorner<2, 2>() = g2;
    v.g_lower(2, 2) = 1.0;
    v.det_g = g2.determinant();
    if (v.det_g <= 0.0) {
        throw EpsilonTooLargeError("volume_eval: non-positive metric determinant for eps=" +
                                   std::to_string(eps));
    }
    const Eigen::Matrix2d g2inv = g2.inverse();
    v.g_upper.setZero();
    v.g_upper.topLeftCorner<2, 2>() = g2inv;
    v.g_upper(2, 2) = 1.0;
    for (int a = 0; a < 2; ++a) v.g_con[a] = g2inv(a, 0) * v.g_cov[0] + g2inv(a, 1) * v.g_cov[1];
    v.g_con[2] = s.a3;

    // d_beta g_alpha and d_3 g_alpha; d_3 g_3 = 0.
    Eigen::Vector3d dg[3][3]; // dg[j][i] = d_i g_j
    for (int al = 0; al < 2; ++al) {
        for (int be = 0; be < 2; ++be) {
            Eigen::Vector3d t = Eigen::Vector3d::Zero();
            for (int sg = 0; sg < 2; ++sg) {
                t += -z * s.db_mixed[sg][al][be] * s.a_cov[sg] +
                     shift(sg, al) * chart.second_derivative(sg, be, y);
            }
            dg[al][be] = t;
        }
        dg[al][2] = -(s.b_mixed(0, al) * s.a_cov[0] + s.b_mixed(1, al) * s.a_cov[1]);
        dg[2][al] = dg[al][2]; // d_alpha g_3 = d_alpha a3 = d_3 g_alpha
    }
    dg[2][2] = Eigen::Vector3d::Zero();

    for (auto& plane : v.christoffel)
        for (auto& row : plane) std::fill(std::begin(row), std::end(row), 0.0);

    // Gamma^p_{ij} = g^p . d_i g_j; Gamma^3_{alpha 3} and Gamma^p_{33} vanish
    // identically for the normal-offset chart and stay structurally zero.
    for (int al = 0; al < 2; ++al)
        for (int be = 0; be < 2; ++be)
            for (int p = 0; p < 3; ++p) v.christoffel[p][al][be] = v.g_con[p].dot(dg[be][al]);
    for (int al = 0; al < 2; ++al)
        for (int sg = 0; sg < 2; ++sg) {
            const double val = v.g_con[sg].dot(dg[al][2]);
            v.christoffel[sg][al][2] = val;
            v.christoffel[sg][2][al] = val;
        }
    return v;
}

AsymptoticReport asymptotic_check(const SurfaceChart& chart, const Eigen::Vector2d& y,
                                  std::span<const double> eps_list) {
    if (eps_list.size() < 3) {
        throw Error("asymptotic_check: need at least 3 epsilon values");
    }
    const SurfacePointData s = surface_eval(chart, y);
    const double x3_samples[] = {-1.0, -0.5, 0.5, 1.0};

    AsymptoticReport rep;
    rep.eps.assign(eps_list.begin(), eps_list.end());
    rep.codazzi_defect = s.codazzi_defect;
    AsymptoticReport::Entry tangential{"christoffel_tangential_residual", {}, 0.0, false};
    AsymptoticReport::Entry normal{"christoffel_normal_identity", {}, 0.0, false};
    AsymptoticReport::Entry mixed{"christoffel_mixed_residual", {}, 0.0, false};
    AsymptoticReport::Entry detg{"det_g_minus_a", {}, 0.0, false};

    for (double eps : eps_list) {
        double r_tan = 0.0, r_nor = 0.0, r_mix = 0.0, r_det = 0.0;
        for (double x3 : x3_samples) {
            const VolumePointData v = volume_eval(chart, eps, {y[0], y[1], x3});
            for (int sg = 0; sg < 2; ++sg)
                for (int al = 0; al < 2; ++al)
                    for (int be = 0; be < 2; ++be) {
                        const double expansion = s.christoffel[sg][al][be] - eps * x3 * s.b_cov_deriv[sg][be][al];
                        r_tan = std::max(r_tan, std::abs(v.christoffel[sg][al][be] - expansion));
                    }
            for (int al = 0; al < 2; ++al)
                for (int be = 0; be < 2; ++be) {
                    double bb = 0.0;
                    for (int sg = 0; sg < 2; ++sg) bb += s.b_mixed(sg, al) * s.b_lower(sg, be);
                    const double closed = s.b_lower(al, be) - eps * x3 * bb;
                    r_nor = std::max(r_nor, std::abs(v.christoffel[2][al][be] - closed));
                }
            for (int sg = 0; sg < 2; ++sg)
                for (int al = 0; al < 2; ++al) {
                    double bbt = 0.0;
                    for (int t = 0; t < 2; ++t) bbt += s.b_mixed(t, al) * s.b_mixed(sg, t);
                    const double expansion = -s.b_mixed(sg, al) - eps * x3 * bbt;
                    r_mix = std::max(r_mix, std::abs(v.christoffel[sg][al][2] - expansion));
                }
            r_det = std::max(r_det, std::abs(v.det_g - s.area_a));
        }
        tangential.residual.push_back(r_tan);
        normal.residual.push_back(r_nor);
        mixed.residual.push_back(r_mix);
        detg.residual.push_back(r_det);
    }

    const double scale = std::max(1.0, s.b_mixed.cwiseAbs().maxCoeff());
    auto finish = [&](AsymptoticReport::Entry& e) {
        e.exact = std::all_of(e.residual.begin(), e.residual.end(),
                              [&](double r) { return r < 1e-13 * scale; });
        if (!e.exact) {
            // least-squares slope of log residual vs log eps
            const int n = static_cast<int>(rep.eps.size());
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (int i = 0; i < n; ++i) {
                const double lx = std::log(rep.eps[i]);
                const double ly = std::log(std::max(e.residual[i], 1e-300));
                sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
            }
            e.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        }
        rep.entries.push_back(e);
    };
    finish(tangential);
    finish(normal);
    finish(mixed);
    finish(detg);
    return rep;
}

// --- chart catalogue ---------------------------------------------------

Eigen::Vector3d PlateChart::position(const Eigen::Vector2d& y) const {
    return {y[0], y[1], 0.0};
}
Eigen::Vector3d PlateChart::first_derivative(int alpha, const Eigen::Vector2d&) const {
    return alpha == 0 ? Eigen::Vector3d{1, 0, 0} : Eigen::Vector3d{0, 1, 0};
}
Eigen::Vector3d PlateChart::second_derivative(int, int, const Eigen::Vector2d&) const {
    return Eigen::Vector3d::Zero();
}
Eigen::Vector3d PlateChart::third_derivative(int, int, int, const Eigen::Vector2d&) const {
    return Eigen::Vector3d::Zero();
}

CylinderChart::CylinderChart(double radius, ChartDomain dom) : radius_(radius), dom_(dom) {
    if (radius_ <= 0.0) throw Error("CylinderChart: radius must be positive");
}

Eigen::Vector3d CylinderChart::position(const Eigen::Vector2d& y) const {
    const double t = y[0] / radius_;
    return {radius_ * std::cos(t), radius_ * std::sin(t), y[1]};
}
Eigen::Vector3d CylinderChart::first_derivative(int alpha, const Eigen::Vector2d& y) const {
    if (alpha == 1) return {0, 0, 1};
    const double t = y[0] / radius_;
    return {-std::sin(t), std::cos(t), 0};
}
Eigen::Vector3d CylinderChart::second_derivative(int alpha, int beta, const Eigen::Vector2d& y) const {
    if (alpha != 0 || beta != 0) return Eigen::Vector3d::Zero();
    const double t = y[0] / radius_;
    return {-std::cos(t) / radius_, -std::sin(t) / radius_, 0};
}
Eigen::Vector3d CylinderChart::third_derivative(int alpha, int beta, int gamma, const Eigen::Vector2d& y) const {
    if (alpha != 0 || beta != 0 || gamma != 0) return Eigen::Vector3d::Zero();
    const double t = y[0] / radius_;
    const double r2 = radius_ * radius_;
    return {std::sin(t) / r2, -std::cos(t) / r2, 0};
}

HemispherePatchChart::HemispherePatchChart(ChartDomain dom) : dom_(dom) {
    if (dom_.o1 <= 0.0 || dom_.o1 + dom_.l1 >= M_PI) {
        throw Error("HemispherePatchChart: colatitude range must avoid the poles");
    }
}

namespace {
// Derivatives of (sin c cos p, sin c sin p, cos c) in colatitude c = y1_min + y1
// and longitude p = y2; each partial shifts sin/cos cyclically.
Eigen::Vector3d sphere_deriv(double c, double p, int n_c, int n_p) {
    auto trig = [](double v, int n, bool sine) {
        switch (n % 4) {
            case 0: return sine ? std::sin(v) : std::cos(v);
            case 1: return sine ? std::cos(v) : -std::sin(v);
            case 2: return sine ? -std::sin(v) : -std::cos(v);
            default: return sine ? -std::cos(v) : std::sin(v);
        }
    };
    return {trig(c, n_c, true) * trig(p, n_p, false),
            trig(c, n_c, true) * trig(p, n_p, true),
            n_p == 0 ? trig(c, n_c, false) : 0.0};
}
} // namespace

Eigen::Vector3d HemispherePatchChart::position(const Eigen::Vector2d& y) const {
    return sphere_deriv(y[0], y[1], 0, 0);
}
Eigen::Vector3d HemispherePatchChart::first_derivative(int alpha, const Eigen::Vector2d& y) const {
    return sphere_deriv(y[0], y[1], alpha == 0 ? 1 : 0, alpha == 1 ? 1 : 0);
}
Eigen::Vector3d HemispherePatchChart::second_derivative(int alpha, int beta, const Eigen::Vector2d& y) const {
    const int nc = (alpha == 0) + (beta == 0);
    const int np = (alpha == 1) + (beta == 1);
    return sphere_deriv(y[0], y[1], nc, np);
}
Eigen::Vector3d HemispherePatchChart::third_derivative(int alpha, int beta, int gamma, const Eigen::Vector2d& y) const {
    const int nc = (alpha == 0) + (beta == 0) + (gamma == 0);
    const int np = 3 - nc;
    return sphere_deriv(y[0], y[1], nc, np);
}

GraphChart::GraphChart(Params p, ChartDomain dom) : p_(p), dom_(dom) {}

double GraphChart::h(const Eigen::Vector2d& y, int d1, int d2) const {
    auto sin_d = [](double v, int n) {
        switch (n % 4) {
            case 0: return std::sin(v);
            case 1: return std::cos(v);
            case 2: return -std::sin(v);
            default: return -std::cos(v);
        }
    };
    auto cos_d = [&](double v, int n) { return sin_d(v + M_PI / 2.0, n); };
    double val = p_.amp * std::pow(p_.fx, d1) * std::pow(p_.fy, d2) *
                 sin_d(p_.fx * y[0], d1) * cos_d(p_.fy * y[1], d2);
    if (d2 == 0) {
        if (d1 == 0) val += p_.qx * y[0] * y[0];
        if (d1 == 1) val += 2.0 * p_.qx * y[0];
        if (d1 == 2) val += 2.0 * p_.qx;
    }
    if (d1 == 0) {
        if (d2 == 0) val += p_.qy * y[1] * y[1];
        if (d2 == 1) val += 2.0 * p_.qy * y[1];
        if (d2 == 2) val += 2.0 * p_.qy;
    }
    return val;
}

Eigen::Vector3d GraphChart::position(const Eigen::Vector2d& y) const {
    return {y[0], y[1], h(y, 0, 0)};
}
Eigen::Vector3d GraphChart::first_derivative(int alpha, const Eigen::Vector2d& y) const {
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    v[alpha] = 1.0;
    v[2] = h(y, alpha == 0 ? 1 : 0, alpha == 1 ? 1 : 0);
    return v;
}
Eigen::Vector3d GraphChart::second_derivative(int alpha, int beta, const Eigen::Vector2d& y) const {
    return {0, 0, h(y, (alpha == 0) + (beta == 0), (alpha == 1) + (beta == 1))};
}
Eigen::Vector3d GraphChart::third_derivative(int alpha, int beta, int gamma, const Eigen::Vector2d& y) const {
    const int n1 = (alpha == 0) + (beta == 0) + (gamma == 0);
    return {0, 0, h(y, n1, 3 - n1)};
}

FiniteDifferenceChart::FiniteDifferenceChart(PositionFn pos, ChartDomain dom)
    : pos_(std::move(pos)), dom_(dom), h_(1e-4 * std::max(dom.l1, dom.l2)) {}

namespace {
template <typename F>
Eigen::Vector3d central5(F&& f, double h) {
    // f(k) samples at offsets k*h
    return (f(-2) - 8.0 * f(-1) + 8.0 * f(1) - f(2)) / (12.0 * h);
}
} // namespace

Eigen::Vector3d FiniteDifferenceChart::first_derivative(int alpha, const Eigen::Vector2d& y) const {
    return central5([&](int k) {
        Eigen::Vector2d p = y;
        p[alpha] += k * h_;
        return pos_(p);
    }, h_);
}
Eigen::Vector3d FiniteDifferenceChart::second_derivative(int alpha, int beta, const Eigen::Vector2d& y) const {
    return central5([&](int k) {
        Eigen::Vector2d p = y;
        p[beta] += k * h_;
        return first_derivative(alpha, p);
    }, h_);
}
Eigen::Vector3d FiniteDifferenceChart::third_derivative(int alpha, int beta, int gamma, const Eigen::Vector2d& y) const {
    return central5([&](int k) {
        Eigen::Vector2d p = y;
        p[gamma] += k * h_;
        return second_derivative(alpha, beta, p);
    }, h_);
}

std::unique_ptr<SurfaceChart> make_chart(const ChartSpec& spec) {
    if (spec.name == "plate") return std::make_unique<PlateChart>(spec.dom);
    if (spec.name == "cylinder") return std::make_unique<CylinderChart>(spec.radius, spec.dom);
    if (spec.name == "hemisphere_patch") return std::make_unique<HemispherePatchChart>(spec.dom);
    if (spec.name == "graph") return std::make_unique<GraphChart>(spec.graph, spec.dom);
    throw ConfigError("unknown chart '" + spec.name + "'");
}

} // namespace vishell
