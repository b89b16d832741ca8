#include "vishell/harness.hpp"

#include "vishell/quadrature.hpp"
#include "vishell/report.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace vishell {

bool ConvergenceReport::pass(double ratio_threshold) const {
    return err_h1st_decreasing && err_shear_decreasing && upsilon_decreasing &&
           ratio_h1st < ratio_threshold;
}

namespace {

struct GaussPoint3D {
    Eigen::Vector3d x;
    double weight = 0.0; // includes the cell volume factors
    VolumePointData vol;
    Eigen::Matrix2d a_upper;          // footprint metric for the trace
    SurfacePointData surf;            // footprint geometry for rho(xi)
};

// Strain probe grid: per hex the in-plane element center at the two
// transverse Gauss levels. Element centers are the superconvergent strain
// points of the trilinear basis; the 2x2 in-plane Gauss points would sample
// an eps-independent parasitic-shear floor that swamps the O(eps) decay of
// the scaled strains.
std::vector<GaussPoint3D> build_gauss_cache(const Mesh3D& mesh, const SurfaceChart& chart,
                                            double eps) {
    const Mesh2D& fp = mesh.footprint();
    const QuadratureRule1D& q = gauss_legendre(2);
    std::vector<GaussPoint3D> pts;
    pts.reserve(static_cast<size_t>(mesh.n_elements()) * 2);
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const Eigen::Vector3d origin = mesh.element_origin(e);
        for (size_t iz = 0; iz < 2; ++iz) {
            GaussPoint3D g;
            const double sz = 0.5 * (q.points[iz] + 1.0);
            g.x = {origin[0] + 0.5 * fp.hx(), origin[1] + 0.5 * fp.hy(),
                   origin[2] + sz * mesh.hz()};
            g.weight = 0.5 * q.weights[iz] * fp.hx() * fp.hy() * mesh.hz();
            g.vol = volume_eval(chart, eps, g.x);
            g.surf = surface_eval(chart, g.x.head<2>());
            g.a_upper = g.surf.a_upper;
            pts.push_back(std::move(g));
        }
    }
    return pts;
}

// Discrete H1(omega) squared norm of the difference between an averaged
// footprint field and the 2D FE field, 3x3 Gauss per footprint cell.
double h1_diff_sq(const Mesh2D& fp, const Eigen::VectorXd& avg_nodal,
                  const FieldEvaluator2D& xi_eval) {
    const QuadratureRule1D& q = gauss_legendre(3);
    double acc = 0.0;
    for (int e = 0; e < fp.n_elements(); ++e) {
        const Eigen::Vector2d origin = fp.element_origin(e);
        for (size_t ix = 0; ix < q.points.size(); ++ix)
            for (size_t iy = 0; iy < q.points.size(); ++iy) {
                const double sx = 0.5 * (q.points[ix] + 1.0);
                const double sy = 0.5 * (q.points[iy] + 1.0);
                const double w = 0.25 * q.weights[ix] * q.weights[iy] * fp.hx() * fp.hy();
                const Eigen::Vector2d y(origin[0] + sx * fp.hx(), origin[1] + sy * fp.hy());
                const AveragedSample a = eval_footprint_field(fp, avg_nodal, y);
                const Field2DSample s = xi_eval.sample(y);
                Eigen::Vector3d dv(a.v[0] - s.eta[0], a.v[1] - s.eta[1], a.v[2] - s.eta3);
                Eigen::Matrix<double, 3, 2> dg = a.dv;
                dg.row(0) -= s.deta.row(0);
                dg.row(1) -= s.deta.row(1);
                dg.row(2) -= s.deta3.transpose();
                acc += w * (dv.squaredNorm() + dg.squaredNorm());
            }
    }
    return acc;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

double loglog_slope(const std::vector<double>& eps, const std::vector<double>& err) {
    const int n = static_cast<int>(eps.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(eps[i]);
        const double ly = std::log(std::max(err[i], 1e-300));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

ConvergenceReport run_convergence(const SurfaceChart& chart, const MaterialParams& mat,
                                  const Loads& loads, ConvergenceOptions opt, std::ostream* log) {
    if (opt.epsilons.size() < 3) throw Error("run_convergence: need >= 3 epsilon values");
    std::sort(opt.epsilons.begin(), opt.epsilons.end(), std::greater<double>());

    if (opt.opt3d.nx != opt.opt2d.nx || opt.opt3d.ny != opt.opt2d.ny ||
        opt.opt3d.clamped != opt.opt2d.clamped) {
        throw MeshMismatchError("run_convergence: 2D and 3D footprints must coincide");
    }
    opt.opt3d.dt = opt.opt2d.dt;
    opt.opt3d.T = opt.opt2d.T;

    if (log) *log << "solving 2D reference (" << opt.opt2d.nx << "x" << opt.opt2d.ny << ")\n";
    const Flexural2DSolution ref = solve2d(chart, mat, loads, opt.opt2d);
    const int nsteps = static_cast<int>(ref.history.times.size()) - 1;
    const double dt = ref.history.dt;
    const double k = mat.k_decay();
    const double decay = std::exp(-k * dt);
    const double th = mat.theta_v, denom = mat.theta_v + mat.rho_v;
    const double Lam = mat.memory_coupling();

    ConvergenceReport rep;
    for (double eps : opt.epsilons) {
        Solve3DOptions o3 = opt.opt3d;
        o3.epsilon = eps;
        if (log) *log << "solving 3D at eps = " << eps << "\n";
        Shell3DSolution sol;
        try {
            sol = solve3d(chart, mat, loads, o3);
        } catch (const EpsilonTooLargeError& e) {
            // admissibility is discovered empirically: drop this eps and
            // keep the sweep going with the thinner shells
            if (log) *log << "  skipped: " << e.what() << "\n";
            continue;
        }
        const Mesh3D& mesh = *sol.mesh;
        const Mesh2D& fp = *sol.footprint;
        const std::vector<GaussPoint3D> gauss = build_gauss_cache(mesh, chart, eps);

        ConvergenceRow row;
        row.epsilon = eps;
        rep.smallest_admissible_eps = eps;

        double h1_acc = 0.0, shear_acc = 0.0, ups_acc = 0.0, volt_acc = 0.0;
        double u_norm_acc = 0.0, xdep_acc = 0.0, ups33_acc = 0.0;
        double corr_uv = 0.0, corr_uu = 0.0, corr_vv = 0.0;

        std::vector<double> conv(gauss.size(), 0.0);  // exponential trapezoid of m
        std::vector<double> m_prev(gauss.size(), 0.0);
        std::vector<double> conv_ups(gauss.size(), 0.0); // same recurrence on the Upsilon trace
        std::vector<double> ups_trace_prev(gauss.size(), 0.0);
        std::vector<Eigen::Matrix2d> ups_last(gauss.size());

        for (int n = 1; n <= nsteps; ++n) {
            const Eigen::VectorXd& u_full = sol.history.states[n];
            const Eigen::VectorXd avg = transverse_average(mesh, u_full);
            const FieldEvaluator2D xi_eval(*ref.layout, ref.history.states[n]);

            // value + backward-difference H1(omega) norms
            const Eigen::VectorXd du_full =
                (sol.history.states[n] - sol.history.states[n - 1]) / dt;
            const Eigen::VectorXd davg = transverse_average(mesh, du_full);
            const Eigen::VectorXd dxi =
                (ref.history.states[n] - ref.history.states[n - 1]) / dt;
            const FieldEvaluator2D dxi_eval(*ref.layout, dxi);
            h1_acc += dt * (h1_diff_sq(fp, avg, xi_eval) + h1_diff_sq(fp, davg, dxi_eval));

            // strain probes on the cached 3D Gauss grid
            double shear_sq = 0.0, ups_sq = 0.0, volt_sq = 0.0, u_sq = 0.0, xdep_sq = 0.0;
            double ups33_sq = 0.0;
            for (size_t p = 0; p < gauss.size(); ++p) {
                const GaussPoint3D& g = gauss[p];
                const Field3DSample f = eval_field_3d(mesh, u_full, g.x);
                const Eigen::Matrix3d E = scaled_strain_3d(f, g.vol);
                const double inv_eps = 1.0 / eps;

                shear_sq += g.weight * inv_eps * inv_eps *
                            (E(0, 2) * E(0, 2) + E(1, 2) * E(1, 2));

                const Field2DSample xs = xi_eval.sample(g.x.head<2>());
                const Eigen::Matrix2d rho_xi = bending_strain(xs, g.surf);
                Eigen::Matrix2d ups;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        const double e1_cand = inv_eps * E(a, b);
                        const double limit = -g.x[2] * rho_xi(a, b);
                        ups(a, b) = e1_cand - limit;
                        corr_uv += g.weight * e1_cand * limit;
                        corr_uu += g.weight * e1_cand * e1_cand;
                        corr_vv += g.weight * limit * limit;
                    }
                ups_sq += g.weight * ups.squaredNorm();
                ups_last[p] = ups;

                // Upsilon_33 from the closed Volterra form of the trace of
                // Upsilon_ab; it vanishes along with Upsilon in the limit
                double ups_trace = 0.0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) ups_trace += g.a_upper(a, b) * ups(a, b);
                conv_ups[p] = decay * conv_ups[p] +
                              0.5 * dt * (decay * ups_trace_prev[p] + ups_trace);
                ups_trace_prev[p] = ups_trace;
                const double ups33 = -(th / denom) * (ups_trace + Lam * conv_ups[p]);
                ups33_sq += g.weight * ups33 * ups33;

                // transverse strain vs the closed Volterra form of the trace
                double m = 0.0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) m += g.a_upper(a, b) * inv_eps * E(a, b);
                conv[p] = decay * conv[p] + 0.5 * dt * (decay * m_prev[p] + m);
                m_prev[p] = m;
                const double e33_candidate = inv_eps * E(2, 2);
                const double closed = -(th / denom) * (m + Lam * conv[p]);
                volt_sq += g.weight * (e33_candidate - closed) * (e33_candidate - closed);

                const AveragedSample am = eval_footprint_field(fp, avg, g.x.head<2>());
                u_sq += g.weight * f.v.squaredNorm();
                xdep_sq += g.weight * (f.v - am.v).squaredNorm();
            }
            shear_acc += dt * shear_sq;
            ups_acc += dt * ups_sq;
            volt_acc += dt * volt_sq;
            u_norm_acc += dt * u_sq;
            xdep_acc += dt * xdep_sq;
            ups33_acc += dt * ups33_sq;
        }

        row.err_h1st = std::sqrt(h1_acc);
        row.err_shear = std::sqrt(shear_acc);
        row.upsilon_norm = std::sqrt(ups_acc);
        row.volterra_dev = std::sqrt(volt_acc);
        row.x3_dependence = u_norm_acc > 0.0 ? std::sqrt(xdep_acc / u_norm_acc) : 0.0;
        row.e1_rho_correlation =
            corr_uu > 0.0 && corr_vv > 0.0 ? corr_uv / std::sqrt(corr_uu * corr_vv) : 0.0;
        row.upsilon33_norm = std::sqrt(ups33_acc);

        // x3-independence of the reconstructed Upsilon: spread across the two
        // transverse Gauss levels of each column at the final time
        double gap_sq = 0.0;
        for (size_t p = 0; p + 1 < gauss.size(); p += 2) {
            gap_sq += 0.5 * (gauss[p].weight + gauss[p + 1].weight) *
                      (ups_last[p] - ups_last[p + 1]).squaredNorm();
        }
        row.upsilon_level_gap = std::sqrt(gap_sq);

        if (log) {
            *log << "  err_h1st=" << row.err_h1st << " err_shear=" << row.err_shear
                 << " upsilon=" << row.upsilon_norm << " volterra=" << row.volterra_dev << "\n";
        }
        rep.rows.push_back(row);
    }

    if (rep.rows.size() < 3) {
        throw Error("run_convergence: fewer than 3 admissible epsilon values survived the sweep");
    }
    std::vector<double> eps_used, h1s, shears, upss;
    for (const ConvergenceRow& r : rep.rows) {
        eps_used.push_back(r.epsilon);
        h1s.push_back(r.err_h1st);
        shears.push_back(r.err_shear);
        upss.push_back(r.upsilon_norm);
    }
    rep.err_h1st_decreasing = strictly_decreasing(h1s);
    rep.err_shear_decreasing = strictly_decreasing(shears);
    rep.upsilon_decreasing = strictly_decreasing(upss);
    rep.slope_h1st = loglog_slope(eps_used, h1s);
    rep.slope_shear = loglog_slope(eps_used, shears);
    rep.slope_upsilon = loglog_slope(eps_used, upss);
    rep.ratio_h1st = h1s.back() / h1s.front();
    return rep;
}

void write_convergence_csv(const ConvergenceReport& rep, const std::string& dir, bool svg) {
    {
        CsvWriter csv(dir + "/report_convergence.csv");
        csv.header({"epsilon", "err_h1st", "err_shear", "upsilon_norm", "volterra_dev"});
        for (const ConvergenceRow& r : rep.rows) {
            csv.row({r.epsilon, r.err_h1st, r.err_shear, r.upsilon_norm, r.volterra_dev});
        }
    }
    {
        CsvWriter csv(dir + "/converge_diagnostics.csv");
        csv.header({"epsilon", "x3_dependence", "upsilon_level_gap", "e1_rho_correlation",
                    "upsilon33_norm", "slope_h1st", "slope_shear", "slope_upsilon",
                    "smallest_admissible_eps"});
        for (const ConvergenceRow& r : rep.rows) {
            csv.row({r.epsilon, r.x3_dependence, r.upsilon_level_gap, r.e1_rho_correlation,
                     r.upsilon33_norm, rep.slope_h1st, rep.slope_shear, rep.slope_upsilon,
                     rep.smallest_admissible_eps});
        }
    }
    if (svg) {
        SvgSeries h1{"err_h1st", {}, {}}, sh{"err_shear", {}, {}}, up{"upsilon_norm", {}, {}};
        for (const ConvergenceRow& r : rep.rows) {
            h1.x.push_back(r.epsilon);
            h1.y.push_back(r.err_h1st);
            sh.x.push_back(r.epsilon);
            sh.y.push_back(r.err_shear);
            up.x.push_back(r.epsilon);
            up.y.push_back(r.upsilon_norm);
        }
        write_svg_loglog(dir + "/report_convergence.svg", "average error vs epsilon", "epsilon",
                         "error", {h1, sh, up});
    }
}

void write_identities_csv(const IdentityReport& rep, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"name", "residual", "pass"});
    for (const IdentityReport::Row& r : rep.rows) {
        csv.row_mixed({r.name, CsvWriter::format(r.residual), r.pass ? "1" : "0"});
    }
}

Loads make_loads(const LoadSpec& spec, const ChartDomain& dom) {
    auto profile = [spec](double t) {
        if (spec.profile == "ramp") return 1.0 - std::exp(-spec.rate * t);
        if (spec.profile == "linear") return spec.rate * t;
        return 1.0;
    };
    Loads loads;
    if (spec.name == "none") return loads;
    if (spec.name == "normal_constant") {
        loads.volume = [spec, profile](double t, const Eigen::Vector2d&, double) {
            return Eigen::Vector3d{0.0, 0.0, spec.amplitude * profile(t)};
        };
        return loads;
    }
    if (spec.name == "normal_sine") {
        loads.volume = [spec, profile, dom](double t, const Eigen::Vector2d& y, double) {
            const double s = std::sin(M_PI * (y[0] - dom.o1) / dom.l1) *
                             std::sin(M_PI * (y[1] - dom.o2) / dom.l2);
            return Eigen::Vector3d{0.0, 0.0, spec.amplitude * profile(t) * s};
        };
        return loads;
    }
    if (spec.name == "traction_top") {
        loads.traction_top = [spec, profile](double t, const Eigen::Vector2d&) {
            return Eigen::Vector3d{0.0, 0.0, spec.amplitude * profile(t)};
        };
        return loads;
    }
    throw ConfigError("unknown load '" + spec.name + "'");
}

RunSetup parse_setup(const Config& cfg) {
    RunSetup s;
    s.chart_spec.name = cfg.get_string("chart", "plate");
    ChartDomain dom;
    dom.o1 = cfg.get_double("domain.o1", s.chart_spec.name == "hemisphere_patch" ? 0.3 : 0.0);
    dom.o2 = cfg.get_double("domain.o2", 0.0);
    dom.l1 = cfg.get_double("domain.l1", 1.0);
    dom.l2 = cfg.get_double("domain.l2", 1.0);
    dom.periodic_y1 = cfg.get_bool("periodic_y1", false);
    s.chart_spec.dom = dom;
    s.chart_spec.radius = cfg.get_double("radius", 1.0);
    s.chart_spec.graph.amp = cfg.get_double("graph.amp", 0.2);
    s.chart_spec.graph.fx = cfg.get_double("graph.fx", 1.3);
    s.chart_spec.graph.fy = cfg.get_double("graph.fy", 0.7);
    s.chart_spec.graph.qx = cfg.get_double("graph.qx", 0.0);
    s.chart_spec.graph.qy = cfg.get_double("graph.qy", 0.0);

    s.material = MaterialParams(cfg.get_double("lambda", 1.0), cfg.get_double("mu", 1.0),
                                cfg.get_double("theta", 1.0), cfg.get_double("rho", 1.0));

    s.load_spec.name = cfg.get_string("load", "normal_constant");
    s.load_spec.amplitude = cfg.get_double("load.amplitude", 1.0);
    s.load_spec.profile = cfg.get_string("load.profile", "const");
    s.load_spec.rate = cfg.get_double("load.rate", 1.0);

    Solve2DOptions& o2 = s.opt2d;
    o2.nx = cfg.get_int("mesh.nx", 16);
    o2.ny = cfg.get_int("mesh.ny", 16);
    o2.dt = cfg.get_double("dt", 0.05);
    o2.T = cfg.get_double("T", 1.0);
    o2.penalty_kappa = cfg.get_double("penalty_kappa", 1e6);
    o2.descaled = cfg.get_string("mode", "scaled") == "descaled";
    o2.epsilon = cfg.get_double("epsilon", 0.1);
    const std::string form = cfg.get_string("formulation", "auto");
    if (form == "plate") o2.formulation = Formulation2D::PlateBending;
    else if (form == "penalty") o2.formulation = Formulation2D::Full;
    else if (form != "auto") throw ConfigError("formulation must be auto|plate|penalty");

    o2.clamped.clear();
    for (const std::string& e : cfg.has("clamped_edges")
                                    ? cfg.get_string_list("clamped_edges")
                                    : std::vector<std::string>{"left"}) {
        if (e == "left") o2.clamped.insert(Edge::Left);
        else if (e == "right") o2.clamped.insert(Edge::Right);
        else if (e == "bottom") o2.clamped.insert(Edge::Bottom);
        else if (e == "top") o2.clamped.insert(Edge::Top);
        else throw ConfigError("unknown clamped edge '" + e + "'");
    }

    Solve3DOptions& o3 = s.opt3d;
    o3.nx = o2.nx;
    o3.ny = o2.ny;
    o3.nz = cfg.get_int("mesh.nz", 8);
    o3.clamped = o2.clamped;
    o3.dt = o2.dt;
    o3.T = o2.T;
    o3.epsilon = cfg.get_double("epsilon", 0.1);
    o3.assembly.selective_reduced_shear = cfg.get_bool("sri", false);

    s.epsilons = cfg.has("epsilons") ? cfg.get_double_list("epsilons")
                                     : std::vector<double>{0.2, 0.1, 0.05};
    s.seed = static_cast<unsigned>(cfg.get_int("seed", 20240915));
    s.svg = cfg.get_bool("svg", false);
    s.output_dir = cfg.get_string("output_dir", ".");
    return s;
}

} // namespace vishell
