#include "vishell/elements.hpp"

namespace vishell {

namespace {

struct Herm1D {
    double v[4];  // value of (v0, d0, v1, d1)
    double d[4];  // first derivative w.r.t. the physical coordinate
    double dd[4]; // second derivative
};

Herm1D hermite1d(double s, double h) {
    Herm1D H;
    const double s2 = s * s, s3 = s2 * s;
    H.v[0] = 1.0 - 3.0 * s2 + 2.0 * s3;
    H.v[1] = h * (s - 2.0 * s2 + s3);
    H.v[2] = 3.0 * s2 - 2.0 * s3;
    H.v[3] = h * (s3 - s2);
    H.d[0] = (-6.0 * s + 6.0 * s2) / h;
    H.d[1] = 1.0 - 4.0 * s + 3.0 * s2;
    H.d[2] = (6.0 * s - 6.0 * s2) / h;
    H.d[3] = 3.0 * s2 - 2.0 * s;
    H.dd[0] = (-6.0 + 12.0 * s) / (h * h);
    H.dd[1] = (-4.0 + 6.0 * s) / h;
    H.dd[2] = (6.0 - 12.0 * s) / (h * h);
    H.dd[3] = (6.0 * s - 2.0) / h;
    return H;
}

struct Lin1D {
    double v[2];
    double d[2];
};

Lin1D linear1d(double s, double h) {
    return {{1.0 - s, s}, {-1.0 / h, 1.0 / h}};
}

} // namespace

void bilinear_basis(double sx, double sy, double hx, double hy, ShapeValue2D out[4]) {
    const Lin1D X = linear1d(sx, hx);
    const Lin1D Y = linear1d(sy, hy);
    const int ix[4] = {0, 1, 1, 0};
    const int iy[4] = {0, 0, 1, 1};
    for (int n = 0; n < 4; ++n) {
        out[n].n = X.v[ix[n]] * Y.v[iy[n]];
        out[n].d1 << X.d[ix[n]] * Y.v[iy[n]], X.v[ix[n]] * Y.d[iy[n]];
        out[n].d2 << 0.0, X.d[ix[n]] * Y.d[iy[n]], X.d[ix[n]] * Y.d[iy[n]], 0.0;
    }
}

void hermite_bicubic_basis(double sx, double sy, double hx, double hy, ShapeValue2D out[16]) {
    const Herm1D X = hermite1d(sx, hx);
    const Herm1D Y = hermite1d(sy, hy);
    const int ix[4] = {0, 1, 1, 0}; // corner in x: 0 -> (v0,d0), 1 -> (v1,d1)
    const int iy[4] = {0, 0, 1, 1};
    for (int n = 0; n < 4; ++n) {
        // per-node dof order (w, w_x, w_y, w_xy): x-factor kind, y-factor kind
        const int fx[4] = {2 * ix[n], 2 * ix[n] + 1, 2 * ix[n], 2 * ix[n] + 1};
        const int fy[4] = {2 * iy[n], 2 * iy[n], 2 * iy[n] + 1, 2 * iy[n] + 1};
        for (int d = 0; d < 4; ++d) {
            ShapeValue2D& s = out[4 * n + d];
            const int a = fx[d], b = fy[d];
            s.n = X.v[a] * Y.v[b];
            s.d1 << X.d[a] * Y.v[b], X.v[a] * Y.d[b];
            s.d2(0, 0) = X.dd[a] * Y.v[b];
            s.d2(1, 1) = X.v[a] * Y.dd[b];
            s.d2(0, 1) = s.d2(1, 0) = X.d[a] * Y.d[b];
        }
    }
}

void trilinear_basis(double sx, double sy, double sz, double hx, double hy, double hz,
                     ShapeValue3D out[8]) {
    const Lin1D X = linear1d(sx, hx);
    const Lin1D Y = linear1d(sy, hy);
    const Lin1D Z = linear1d(sz, hz);
    const int ix[4] = {0, 1, 1, 0};
    const int iy[4] = {0, 0, 1, 1};
    for (int k = 0; k < 2; ++k)
        for (int n = 0; n < 4; ++n) {
            ShapeValue3D& s = out[4 * k + n];
            s.n = X.v[ix[n]] * Y.v[iy[n]] * Z.v[k];
            s.d1 << X.d[ix[n]] * Y.v[iy[n]] * Z.v[k],
                X.v[ix[n]] * Y.d[iy[n]] * Z.v[k],
                X.v[ix[n]] * Y.v[iy[n]] * Z.d[k];
        }
}

} // namespace vishell
