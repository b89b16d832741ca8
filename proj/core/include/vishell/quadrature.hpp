#pragma once

#include <vector>

namespace vishell {

struct QuadratureRule1D {
    std::vector<double> points;  // on [-1, 1]
    std::vector<double> weights; // sum to 2
};

// Gauss-Legendre rule with n points, exact for polynomials of degree 2n-1.
const QuadratureRule1D& gauss_legendre(int n);

// Rule mapped to [a, b].
QuadratureRule1D gauss_legendre_on(int n, double a, double b);

} // namespace vishell
