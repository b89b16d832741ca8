#include "vishell/ode.hpp"

#include <cmath>
#include <random>

namespace vishell {

double PolynomialTrajectory::value(double t) const {
    double v = 0.0;
    for (size_t i = coeffs.size(); i-- > 0;) v = v * t + coeffs[i];
    return v;
}

double PolynomialTrajectory::derivative(double t) const {
    double v = 0.0;
    for (size_t i = coeffs.size(); i-- > 1;) v = v * t + i * coeffs[i];
    return v;
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double fa, double b,
                            double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, simpson(a, fa, b, fb, fm), tol,
                                max_depth);
}

VolterraCheckResult volterra_ode_check(const MaterialParams& mat,
                                       const PolynomialTrajectory& trajectory, double t_end,
                                       double dt) {
    mat.require_viscous_branch();
    if (!trajectory.coeffs.empty() && trajectory.coeffs[0] != 0.0) {
        throw Error("volterra_ode_check: trajectory must vanish at t = 0");
    }
    const double th = mat.theta_v, rh = mat.rho_v, la = mat.lambda, mu = mat.mu;
    const double denom = th + rh;
    const double k = mat.k_decay();
    const double Lam = mat.memory_coupling();

    auto rhs = [&](double t, double y) {
        return -(la * trajectory.value(t) + th * trajectory.derivative(t) + (la + 2.0 * mu) * y) /
               denom;
    };
    auto closed = [&](double t) {
        const double conv = adaptive_simpson(
            [&](double s) { return std::exp(-k * (t - s)) * trajectory.value(s); }, 0.0, t);
        return -(th / denom) * (trajectory.value(t) + Lam * conv);
    };

    // RK4 with substeps when the relaxation rate is stiff for the base dt
    const int substeps = std::max(1, static_cast<int>(std::ceil(k * dt / 0.5)));
    const double h = dt / substeps;
    const int nsteps = static_cast<int>(std::llround(t_end / dt));

    VolterraCheckResult res;
    double y = 0.0, t = 0.0;
    for (int n = 0; n < nsteps; ++n) {
        for (int s = 0; s < substeps; ++s) {
            const double k1 = rhs(t, y);
            const double k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
            const double k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
            const double k4 = rhs(t + h, y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
        }
        const double yc = closed(t);
        res.max_deviation = std::max(res.max_deviation, std::abs(y - yc));

        // derivative identity against a central difference of the closed form
        const double fd_h = 1e-5;
        if (t > fd_h && t < t_end - fd_h) {
            const double dy_fd = (closed(t + fd_h) - closed(t - fd_h)) / (2.0 * fd_h);
            const double dy_id = -(la / denom) * trajectory.value(t) - k * yc -
                                 (th / denom) * trajectory.derivative(t);
            res.max_derivative_dev = std::max(res.max_derivative_dev, std::abs(dy_fd - dy_id));
        }
    }
    return res;
}

bool IdentityReport::all_pass() const {
    for (const Row& r : rows)
        if (!r.pass) return false;
    return true;
}

IdentityReport verify_identities(const MaterialParams& mat, int draws, unsigned seed,
                                 double tol_reduction, double tol_lambda) {
    IdentityReport rep;
    auto add = [&](const std::string& name, double residual, double tol) {
        rep.rows.push_back({name, residual, residual < tol});
    };

    const ReductionResiduals base = reduction_identity_residuals(mat);
    add("reduction_a", base.r_a, tol_reduction);
    add("reduction_b", base.r_b, tol_reduction);
    add("reduction_c", base.r_c, tol_reduction);
    add("theta_lambda", lambda_identity_residual(mat), tol_lambda);

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst_a = 0.0, worst_b = 0.0, worst_c = 0.0, worst_l = 0.0;
    for (int i = 0; i < draws; ++i) {
        const MaterialParams m(10.0 * u01(rng), 10.0 * u01(rng) + 1e-6,
                               10.0 * u01(rng) + 1e-6, 10.0 * u01(rng));
        const ReductionResiduals r = reduction_identity_residuals(m);
        worst_a = std::max(worst_a, r.r_a);
        worst_b = std::max(worst_b, r.r_b);
        worst_c = std::max(worst_c, r.r_c);
        worst_l = std::max(worst_l, lambda_identity_residual(m));
    }
    add("reduction_a_random_max", worst_a, tol_reduction);
    add("reduction_b_random_max", worst_b, tol_reduction);
    add("reduction_c_random_max", worst_c, tol_reduction);
    add("theta_lambda_random_max", worst_l, tol_lambda);
    return rep;
}

} // namespace vishell
