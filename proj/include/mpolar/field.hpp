#pragma once

#include <Eigen/Dense>
#include <utility>

#include "mpolar/grid.hpp"

namespace mpolar {

/// Scalar field sampled at grid nodes.  Values use the grid's row-major node
/// order (j outer, i inner).  Fields are value types: operators return fresh
/// fields and never mutate their inputs.
template <typename Scalar = double>
struct ScalarField {
    using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
    using MatrixR = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    Grid<Scalar> grid;
    ArrayX values;

    ScalarField() = default;

    explicit ScalarField(const Grid<Scalar>& g) : grid(g), values(ArrayX::Zero(g.size())) {}

    ScalarField(const Grid<Scalar>& g, ArrayX v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size())
            throw ContractError("ScalarField: value count does not match grid");
    }

    Scalar& operator()(int i, int j) { return values[grid.index(i, j)]; }
    Scalar operator()(int i, int j) const { return values[grid.index(i, j)]; }

    /// 2-D view of the node values: row j, column i.
    Eigen::Map<MatrixR> mat() {
        return Eigen::Map<MatrixR>(values.data(), grid.ny, grid.nx);
    }
    Eigen::Map<const MatrixR> mat() const {
        return Eigen::Map<const MatrixR>(values.data(), grid.ny, grid.nx);
    }

    bool all_finite() const { return values.allFinite(); }

    void set_boundary_zero() {
        auto m = mat();
        m.row(0).setZero();
        m.row(grid.ny - 1).setZero();
        m.col(0).setZero();
        m.col(grid.nx - 1).setZero();
    }

    bool boundary_is_zero() const {
        auto m = mat();
        return (m.row(0).array() == Scalar(0)).all() &&
               (m.row(grid.ny - 1).array() == Scalar(0)).all() &&
               (m.col(0).array() == Scalar(0)).all() &&
               (m.col(grid.nx - 1).array() == Scalar(0)).all();
    }

    /// Sample a closed form f(x, y) at the nodes.  zero_boundary forces exact
    /// zeros on the boundary (closed forms that vanish there analytically still
    /// evaluate to O(eps) in floating point).
    template <typename F>
    static ScalarField from_function(const Grid<Scalar>& g, F&& f, bool zero_boundary = false) {
        ScalarField out(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                out(i, j) = f(g.x(i), g.y(j));
        if (zero_boundary) out.set_boundary_zero();
        return out;
    }
};

/// Velocity-style field with x and y components on a shared grid.
template <typename Scalar = double>
struct VectorField {
    ScalarField<Scalar> x;
    ScalarField<Scalar> y;

    VectorField() = default;
    explicit VectorField(const Grid<Scalar>& g) : x(g), y(g) {}
    VectorField(ScalarField<Scalar> xc, ScalarField<Scalar> yc)
        : x(std::move(xc)), y(std::move(yc)) {
        if (x.grid != y.grid)
            throw ContractError("VectorField: components live on different grids");
    }

    const Grid<Scalar>& grid() const { return x.grid; }
    bool all_finite() const { return x.all_finite() && y.all_finite(); }
};

template <typename Scalar>
inline void require_same_grid(const Grid<Scalar>& a, const Grid<Scalar>& b, const char* what) {
    if (a != b) throw ContractError(std::string(what) + ": grids do not match");
}

}  // namespace mpolar
