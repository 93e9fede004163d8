#pragma once

#include <Eigen/Dense>

#include "mpolar/field.hpp"

namespace mpolar {

enum class AdvectionScheme { central2, upwind1, conservative };

namespace detail {

// Second-order first derivative along one axis: central differences at
// interior nodes, one-sided three-point stencils on the two boundary lines.
template <typename Scalar>
ScalarField<Scalar> first_difference(const ScalarField<Scalar>& f, int axis) {
    const auto& g = f.grid;
    ScalarField<Scalar> out(g);
    auto M = f.mat();
    auto D = out.mat();
    if (axis == 1) {
        const Scalar h2 = Scalar(2) * g.dx();
        const int n = g.nx;
        D.block(0, 1, g.ny, n - 2) =
            (M.block(0, 2, g.ny, n - 2) - M.block(0, 0, g.ny, n - 2)) / h2;
        D.col(0) = (Scalar(-3) * M.col(0) + Scalar(4) * M.col(1) - M.col(2)) / h2;
        D.col(n - 1) = (Scalar(3) * M.col(n - 1) - Scalar(4) * M.col(n - 2) + M.col(n - 3)) / h2;
    } else {
        const Scalar h2 = Scalar(2) * g.dy();
        const int n = g.ny;
        D.block(1, 0, n - 2, g.nx) =
            (M.block(2, 0, n - 2, g.nx) - M.block(0, 0, n - 2, g.nx)) / h2;
        D.row(0) = (Scalar(-3) * M.row(0) + Scalar(4) * M.row(1) - M.row(2)) / h2;
        D.row(n - 1) = (Scalar(3) * M.row(n - 1) - Scalar(4) * M.row(n - 2) + M.row(n - 3)) / h2;
    }
    return out;
}

// Second-order second derivative along one axis: three-point stencil at
// interior nodes, four-point one-sided stencils on the boundary lines.
template <typename Scalar>
ScalarField<Scalar> second_difference(const ScalarField<Scalar>& f, int axis) {
    const auto& g = f.grid;
    if ((axis == 1 && g.nx < 4) || (axis == 2 && g.ny < 4))
        throw ContractError("second_difference: boundary stencil needs at least 4 nodes per axis");
    ScalarField<Scalar> out(g);
    auto M = f.mat();
    auto D = out.mat();
    if (axis == 1) {
        const Scalar hh = g.dx() * g.dx();
        const int n = g.nx;
        D.block(0, 1, g.ny, n - 2) =
            (M.block(0, 2, g.ny, n - 2) - Scalar(2) * M.block(0, 1, g.ny, n - 2) +
             M.block(0, 0, g.ny, n - 2)) /
            hh;
        D.col(0) =
            (Scalar(2) * M.col(0) - Scalar(5) * M.col(1) + Scalar(4) * M.col(2) - M.col(3)) / hh;
        D.col(n - 1) = (Scalar(2) * M.col(n - 1) - Scalar(5) * M.col(n - 2) +
                        Scalar(4) * M.col(n - 3) - M.col(n - 4)) /
                       hh;
    } else {
        const Scalar hh = g.dy() * g.dy();
        const int n = g.ny;
        D.block(1, 0, n - 2, g.nx) =
            (M.block(2, 0, n - 2, g.nx) - Scalar(2) * M.block(1, 0, n - 2, g.nx) +
             M.block(0, 0, n - 2, g.nx)) /
            hh;
        D.row(0) =
            (Scalar(2) * M.row(0) - Scalar(5) * M.row(1) + Scalar(4) * M.row(2) - M.row(3)) / hh;
        D.row(n - 1) = (Scalar(2) * M.row(n - 1) - Scalar(5) * M.row(n - 2) +
                        Scalar(4) * M.row(n - 3) - M.row(n - 4)) /
                       hh;
    }
    return out;
}

// One-sided-at-edges first differences used by the upwind scheme.  backward
// falls back to the forward difference on the first line (and vice versa) so
// every node has a value.
template <typename Scalar>
void upwind_differences(const ScalarField<Scalar>& f, int axis, ScalarField<Scalar>& backward,
                        ScalarField<Scalar>& forward) {
    const auto& g = f.grid;
    auto M = f.mat();
    auto B = backward.mat();
    auto F = forward.mat();
    if (axis == 1) {
        const Scalar h = g.dx();
        const int n = g.nx;
        B.block(0, 1, g.ny, n - 1) =
            (M.block(0, 1, g.ny, n - 1) - M.block(0, 0, g.ny, n - 1)) / h;
        F.block(0, 0, g.ny, n - 1) = B.block(0, 1, g.ny, n - 1);
        B.col(0) = F.col(0);
        F.col(n - 1) = B.col(n - 1);
    } else {
        const Scalar h = g.dy();
        const int n = g.ny;
        B.block(1, 0, n - 1, g.nx) =
            (M.block(1, 0, n - 1, g.nx) - M.block(0, 0, n - 1, g.nx)) / h;
        F.block(0, 0, n - 1, g.nx) = B.block(1, 0, n - 1, g.nx);
        B.row(0) = F.row(0);
        F.row(n - 1) = B.row(n - 1);
    }
}

}  // namespace detail

/// d f / d x (axis = 1) or d f / d y (axis = 2), second order everywhere.
template <typename Scalar>
ScalarField<Scalar> partial_derivative(const ScalarField<Scalar>& f, int axis) {
    if (axis != 1 && axis != 2)
        throw ContractError("partial_derivative: axis must be 1 or 2");
    return detail::first_difference(f, axis);
}

/// Five-point Laplacian at interior nodes; one-sided second differences along
/// the normal direction on the boundary (diagnostic use only there).
template <typename Scalar>
ScalarField<Scalar> laplacian(const ScalarField<Scalar>& f) {
    ScalarField<Scalar> out = detail::second_difference(f, 1);
    out.values += detail::second_difference(f, 2).values;
    return out;
}

/// Perpendicular gradient (d f / d y, -d f / d x); divergence-free by
/// construction in the continuum.
template <typename Scalar>
VectorField<Scalar> grad_perp(const ScalarField<Scalar>& f) {
    return VectorField<Scalar>(detail::first_difference(f, 2),
                               ScalarField<Scalar>(f.grid, -detail::first_difference(f, 1).values));
}

/// Scalar curl d u_y / d x - d u_x / d y.
template <typename Scalar>
ScalarField<Scalar> curl(const VectorField<Scalar>& U) {
    ScalarField<Scalar> out = detail::first_difference(U.y, 1);
    out.values -= detail::first_difference(U.x, 2).values;
    return out;
}

/// Divergence form of advection, d(U_x f)/dx + d(U_y f)/dy with the central
/// stencils.  Equals U . grad f up to second order whenever the discrete
/// divergence of U vanishes, which holds identically for U = grad_perp(psi)
/// because the two derivative matrices commute.  Key exact property: the
/// trapezoid pairing <psi, advect_divergence(grad_perp(psi), f)> vanishes to
/// roundoff for any psi that is zero on the boundary and any f, because the
/// tangential velocity vanishes along each edge and the summation-by-parts
/// remainder is f * (u . grad psi), which is zero pointwise.
template <typename Scalar>
ScalarField<Scalar> advect_divergence(const VectorField<Scalar>& U, const ScalarField<Scalar>& f) {
    require_same_grid(U.grid(), f.grid, "advect_divergence");
    ScalarField<Scalar> fx(f.grid), fy(f.grid);
    fx.values = U.x.values * f.values;
    fy.values = U.y.values * f.values;
    ScalarField<Scalar> out = detail::first_difference(fx, 1);
    out.values += detail::first_difference(fy, 2).values;
    return out;
}

/// Skew form of advection, (U . grad f + div(U f)) / 2 with the central
/// stencils.  Key exact property: the trapezoid pairing
/// <f, advect_skew(U, f)> vanishes to roundoff for any U whenever f is zero
/// on the boundary, so self-advection cannot change ||f||_L2.
template <typename Scalar>
ScalarField<Scalar> advect_skew(const VectorField<Scalar>& U, const ScalarField<Scalar>& f) {
    require_same_grid(U.grid(), f.grid, "advect_skew");
    ScalarField<Scalar> out = advect_divergence(U, f);
    out.values = (out.values + U.x.values * detail::first_difference(f, 1).values +
                  U.y.values * detail::first_difference(f, 2).values) /
                 Scalar(2);
    return out;
}

/// Advection term U . grad f with the chosen scheme.  central2 reuses the
/// second-order derivative stencils; upwind1 picks the first-order one-sided
/// difference per node based on the sign of the advecting component;
/// conservative maps to the skew form, the energy-neutral realization for a
/// transported scalar that vanishes on the boundary (the vorticity equation
/// uses the divergence form instead; see rhs_omega).
template <typename Scalar>
ScalarField<Scalar> advect(const VectorField<Scalar>& U, const ScalarField<Scalar>& f,
                           AdvectionScheme scheme = AdvectionScheme::central2) {
    require_same_grid(U.grid(), f.grid, "advect");
    const auto& g = f.grid;
    if (scheme == AdvectionScheme::conservative) return advect_skew(U, f);
    ScalarField<Scalar> out(g);
    if (scheme == AdvectionScheme::central2) {
        out.values = U.x.values * detail::first_difference(f, 1).values +
                     U.y.values * detail::first_difference(f, 2).values;
    } else {
        ScalarField<Scalar> bx(g), fx(g), by(g), fy(g);
        detail::upwind_differences(f, 1, bx, fx);
        detail::upwind_differences(f, 2, by, fy);
        out.values = U.x.values * (U.x.values >= Scalar(0)).select(bx.values, fx.values) +
                     U.y.values * (U.y.values >= Scalar(0)).select(by.values, fy.values);
    }
    return out;
}

/// Trapezoid-rule integral over the rectangle.  The summation order is fixed
/// and documented: inner sum over i within each row j, rows accumulated in
/// increasing j.  This keeps reductions bit-reproducible.
template <typename Scalar>
Scalar integrate(const ScalarField<Scalar>& f) {
    const auto& g = f.grid;
    const Scalar dx = g.dx(), dy = g.dy();
    Scalar total = Scalar(0);
    for (int j = 0; j < g.ny; ++j) {
        const Scalar wy = (j == 0 || j == g.ny - 1) ? dy * Scalar(0.5) : dy;
        Scalar row = Scalar(0);
        for (int i = 0; i < g.nx; ++i) {
            const Scalar wx = (i == 0 || i == g.nx - 1) ? dx * Scalar(0.5) : dx;
            row += wx * f(i, j);
        }
        total += wy * row;
    }
    return total;
}

/// Trapezoid-weighted L2 inner product, same summation order as integrate.
template <typename Scalar>
Scalar inner_product(const ScalarField<Scalar>& f, const ScalarField<Scalar>& h) {
    require_same_grid(f.grid, h.grid, "inner_product");
    const auto& g = f.grid;
    const Scalar dx = g.dx(), dy = g.dy();
    Scalar total = Scalar(0);
    for (int j = 0; j < g.ny; ++j) {
        const Scalar wy = (j == 0 || j == g.ny - 1) ? dy * Scalar(0.5) : dy;
        Scalar row = Scalar(0);
        for (int i = 0; i < g.nx; ++i) {
            const Scalar wx = (i == 0 || i == g.nx - 1) ? dx * Scalar(0.5) : dx;
            row += wx * f(i, j) * h(i, j);
        }
        total += wy * row;
    }
    return total;
}

}  // namespace mpolar
