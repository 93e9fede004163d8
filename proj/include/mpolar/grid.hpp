#pragma once

#include <cmath>
#include <cstdint>

#include "mpolar/errors.hpp"

namespace mpolar {

/// Uniform tensor-product grid on the rectangle [0, lx] x [0, ly].
///
/// Nodes are (x_i, y_j) = (i*dx, j*dy) with i = 0..nx-1, j = 0..ny-1 and
/// dx = lx/(nx-1), dy = ly/(ny-1), so nodes include the boundary.  Fields are
/// stored row-major with j as the outer index: flat index = j*nx + i.
/// Grid is a small value type; fields carry their own copy and operations
/// compare grids for compatibility.
template <typename Scalar = double>
struct Grid {
    int nx = 0;
    int ny = 0;
    Scalar lx = Scalar(1);
    Scalar ly = Scalar(1);

    Grid() = default;

    Grid(int nx_, int ny_, Scalar lx_, Scalar ly_) : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
        if (nx < 3 || ny < 3)
            throw ContractError("Grid: need nx >= 3 and ny >= 3");
        if (!(lx > Scalar(0)) || !(ly > Scalar(0)) || !std::isfinite(double(lx)) ||
            !std::isfinite(double(ly)))
            throw ContractError("Grid: need finite lx > 0 and ly > 0");
    }

    Scalar dx() const { return lx / Scalar(nx - 1); }
    Scalar dy() const { return ly / Scalar(ny - 1); }

    Scalar x(int i) const { return Scalar(i) * dx(); }
    Scalar y(int j) const { return Scalar(j) * dy(); }

    std::int64_t size() const { return std::int64_t(nx) * ny; }
    std::int64_t index(int i, int j) const { return std::int64_t(j) * nx + i; }

    bool on_boundary(int i, int j) const {
        return i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
    }

    /// Trapezoid quadrature weight of node (i, j): dx*dy, halved along each
    /// boundary the node lies on (quartered at corners).  Weights sum to lx*ly
    /// exactly up to roundoff.
    Scalar quad_weight(int i, int j) const {
        Scalar w = dx() * dy();
        if (i == 0 || i == nx - 1) w *= Scalar(0.5);
        if (j == 0 || j == ny - 1) w *= Scalar(0.5);
        return w;
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.nx == b.nx && a.ny == b.ny && a.lx == b.lx && a.ly == b.ly;
    }
    friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }
};

}  // namespace mpolar
