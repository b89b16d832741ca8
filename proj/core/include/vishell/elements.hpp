#pragma once

#include <Eigen/Dense>

namespace vishell {

// Scalar shape function data at one quadrature point: value, gradient and
// Hessian with respect to the physical in-plane coordinates.
struct ShapeValue2D {
    double n = 0.0;
    Eigen::Vector2d d1 = Eigen::Vector2d::Zero();
    Eigen::Matrix2d d2 = Eigen::Matrix2d::Zero();
};

// Bilinear quad basis on the reference square [0,1]^2 scaled to hx x hy;
// corner order (0,0), (1,0), (1,1), (0,1).
void bilinear_basis(double sx, double sy, double hx, double hy, ShapeValue2D out[4]);

// Bogner-Fox-Schmit bicubic Hermite rectangle: per corner node the four
// unknowns (w, w_x, w_y, w_xy); 16 functions in node-major order.
void hermite_bicubic_basis(double sx, double sy, double hx, double hy, ShapeValue2D out[16]);

struct ShapeValue3D {
    double n = 0.0;
    Eigen::Vector3d d1 = Eigen::Vector3d::Zero();
};

// Trilinear hex on [0,1]^3 scaled to hx x hy x hz; node order is the 2D
// corner order on the bottom face then the top face.
void trilinear_basis(double sx, double sy, double sz, double hx, double hy, double hz,
                     ShapeValue3D out[8]);

} // namespace vishell
