#pragma once

#include "vishell/material.hpp"

#include <functional>
#include <vector>

namespace vishell {

// Polynomial trajectory m(t) = sum c_i t^i with m(0) = 0 (c_0 must be 0).
struct PolynomialTrajectory {
    std::vector<double> coeffs;
    double value(double t) const;
    double derivative(double t) const;
};

// Adaptive Simpson quadrature to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 40);

// Two independent routes to the transverse first-order strain driven by a
// planar trace m(t) = a^{ab} e^1_{ab}(t):
//  - the rate equation lambda m + (lambda+2mu) y + theta m' + (theta+rho) y' = 0
//    integrated by RK4 (substepped when k dt is stiff), and
//  - its closed Volterra form
//    y(t) = -theta/(theta+rho) (m(t) + Lambda int_0^t e^{-k(t-s)} m(s) ds)
//    evaluated by adaptive quadrature.
// Returns the max absolute deviation on [0, t_end], including the check of
// the derivative identity
//    y'(t) = -lambda/(theta+rho) m - k y - theta/(theta+rho) m'
// against a central difference of the quadrature route.
struct VolterraCheckResult {
    double max_deviation = 0.0;      // |rk4 - closed form|
    double max_derivative_dev = 0.0; // |FD of closed form - derivative identity|
};

VolterraCheckResult volterra_ode_check(const MaterialParams& mat,
                                       const PolynomialTrajectory& trajectory,
                                       double t_end = 1.0, double dt = 1e-3);

// Identity report consumed by the verify-identities command.
struct IdentityReport {
    struct Row {
        std::string name;
        double residual = 0.0;
        bool pass = false;
    };
    std::vector<Row> rows;
    bool all_pass() const;
};

IdentityReport verify_identities(const MaterialParams& mat, int draws, unsigned seed,
                                 double tol_reduction = 1e-10, double tol_lambda = 1e-15);

} // namespace vishell
