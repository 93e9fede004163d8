#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "mpolar/operators.hpp"

namespace mpolar {

enum class PoissonMethod { sine_transform, conjugate_gradient };

namespace detail {

/// Apply (a I - b Lap_h) to the interior unknowns of v, reading homogeneous
/// Dirichlet values on the boundary.  X has interior shape (ny-2, nx-2).
template <typename Scalar, typename DerivedIn, typename DerivedOut>
void apply_shifted_operator(const Grid<Scalar>& g, Scalar a, Scalar b,
                            const Eigen::MatrixBase<DerivedIn>& X,
                            Eigen::MatrixBase<DerivedOut>& Y) {
    const int mx = g.nx - 2, my = g.ny - 2;
    const Scalar ix2 = b / (g.dx() * g.dx());
    const Scalar iy2 = b / (g.dy() * g.dy());
    const Scalar diag = a + Scalar(2) * (ix2 + iy2);
    Y = diag * X;
    Y.leftCols(mx - 1) -= ix2 * X.rightCols(mx - 1);
    Y.rightCols(mx - 1) -= ix2 * X.leftCols(mx - 1);
    Y.topRows(my - 1) -= iy2 * X.bottomRows(my - 1);
    Y.bottomRows(my - 1) -= iy2 * X.topRows(my - 1);
}

}  // namespace detail

/// Direct solver for (a I - b Lap_h) x = f on the interior nodes with x = 0 on
/// the boundary, Lap_h the five-point Laplacian.  The default method
/// diagonalizes the operator with dense type-I sine transforms (exact for this
/// stencil); conjugate_gradient is a matrix-free fallback.
///
/// Solves do not mutate the solver and allocate their own scratch space, so a
/// single instance may be shared across threads.
template <typename Scalar = double>
class PoissonSolver {
public:
    using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    explicit PoissonSolver(const Grid<Scalar>& g,
                           PoissonMethod method = PoissonMethod::sine_transform,
                           Scalar cg_tol = Scalar(1e-10), int cg_max_iter = 0)
        : grid_(g), method_(method), cg_tol_(cg_tol),
          cg_max_iter_(cg_max_iter > 0 ? cg_max_iter : 10 * std::max(g.nx, g.ny)) {
        if (g.nx < 3 || g.ny < 3) throw ContractError("PoissonSolver: grid too small");
        if (!(cg_tol_ > Scalar(0))) throw ContractError("PoissonSolver: cg_tol must be positive");
        const int mx = g.nx - 2, my = g.ny - 2;
        // S(k, i) = sin((k+1)(i+1) pi / (n-1)); S * S = ((n-1)/2) I.
        sx_ = sine_matrix(g.nx);
        sy_ = sine_matrix(g.ny);
        lam_x_.resize(mx);
        lam_y_.resize(my);
        const Scalar dx = g.dx(), dy = g.dy();
        for (int k = 0; k < mx; ++k) {
            const Scalar s = std::sin(Scalar(k + 1) * pi() / Scalar(2 * (g.nx - 1)));
            lam_x_[k] = Scalar(4) / (dx * dx) * s * s;
        }
        for (int k = 0; k < my; ++k) {
            const Scalar s = std::sin(Scalar(k + 1) * pi() / Scalar(2 * (g.ny - 1)));
            lam_y_[k] = Scalar(4) / (dy * dy) * s * s;
        }
    }

    const Grid<Scalar>& grid() const { return grid_; }
    PoissonMethod method() const { return method_; }

    /// Smallest and largest eigenvalues of -Lap_h with Dirichlet conditions.
    Scalar lambda_min() const { return lam_x_[0] + lam_y_[0]; }
    Scalar lambda_max() const {
        return lam_x_[grid_.nx - 3] + lam_y_[grid_.ny - 3];
    }

    /// Solve -Lap_h psi = f; psi is zero on the boundary and the interior rhs
    /// values are the only ones read.
    ScalarField<Scalar> solve(const ScalarField<Scalar>& rhs) const {
        return solve_shifted(rhs, Scalar(0), Scalar(1));
    }

    /// Solve (a I - b Lap_h) x = f with a >= 0, b > 0, Dirichlet conditions.
    ScalarField<Scalar> solve_shifted(const ScalarField<Scalar>& rhs, Scalar a, Scalar b) const {
        require_same_grid(grid_, rhs.grid, "PoissonSolver::solve");
        if (!(b > Scalar(0)) || a < Scalar(0))
            throw ContractError("PoissonSolver: need a >= 0 and b > 0");
        if (method_ == PoissonMethod::sine_transform) return solve_dst(rhs, a, b);
        return solve_cg(rhs, a, b);
    }

private:
    static Scalar pi() { return Scalar(3.14159265358979323846L); }

    static MatrixX sine_matrix(int n) {
        const int m = n - 2;
        MatrixX s(m, m);
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i)
                s(k, i) = std::sin(Scalar(k + 1) * Scalar(i + 1) * pi() / Scalar(n - 1));
        return s;
    }

    ScalarField<Scalar> solve_dst(const ScalarField<Scalar>& rhs, Scalar a, Scalar b) const {
        const int mx = grid_.nx - 2, my = grid_.ny - 2;
        MatrixX f = rhs.mat().block(1, 1, my, mx);
        MatrixX fhat = sy_ * f * sx_;
        for (int k = 0; k < my; ++k)
            for (int l = 0; l < mx; ++l)
                fhat(k, l) /= a + b * (lam_y_[k] + lam_x_[l]);
        const Scalar norm = Scalar(4) / (Scalar(grid_.nx - 1) * Scalar(grid_.ny - 1));
        ScalarField<Scalar> out(grid_);
        out.mat().block(1, 1, my, mx) = norm * (sy_ * fhat * sx_);
        return out;
    }

    ScalarField<Scalar> solve_cg(const ScalarField<Scalar>& rhs, Scalar a, Scalar b) const {
        const int mx = grid_.nx - 2, my = grid_.ny - 2;
        MatrixX f = rhs.mat().block(1, 1, my, mx);
        const Scalar fnorm = f.norm();
        ScalarField<Scalar> out(grid_);
        if (fnorm == Scalar(0)) return out;

        MatrixX x = MatrixX::Zero(my, mx);
        MatrixX r = f;
        MatrixX p = r;
        MatrixX ap(my, mx);
        Scalar rr = r.squaredNorm();
        int it = 0;
        for (; it < cg_max_iter_; ++it) {
            if (std::sqrt(rr) <= cg_tol_ * fnorm) break;
            detail::apply_shifted_operator(grid_, a, b, p, ap);
            const Scalar alpha = rr / (p.cwiseProduct(ap)).sum();
            x += alpha * p;
            r -= alpha * ap;
            const Scalar rr_new = r.squaredNorm();
            p = r + (rr_new / rr) * p;
            rr = rr_new;
        }
        const Scalar rel = std::sqrt(rr) / fnorm;
        if (rel > cg_tol_)
            throw SolverError("conjugate gradient did not converge", double(rel), it);
        out.mat().block(1, 1, my, mx) = x;
        return out;
    }

    Grid<Scalar> grid_;
    PoissonMethod method_;
    Scalar cg_tol_;
    int cg_max_iter_;
    MatrixX sx_, sy_;
    VectorX lam_x_, lam_y_;
};

/// -Lap_h psi = omega with psi = 0 on the boundary.
template <typename Scalar>
ScalarField<Scalar> solve_poisson_dirichlet(const PoissonSolver<Scalar>& solver,
                                            const ScalarField<Scalar>& omega) {
    return solver.solve(omega);
}

/// Velocity recovery u = grad_perp(psi) with psi the streamfunction of omega.
/// u . n vanishes exactly on the boundary: psi is identically zero along each
/// edge, so the tangential derivative forming the normal component is zero.
template <typename Scalar>
VectorField<Scalar> velocity_from_vorticity(const PoissonSolver<Scalar>& solver,
                                            const ScalarField<Scalar>& omega) {
    return grad_perp(solver.solve(omega));
}

template <typename Scalar>
struct EigenPair {
    Scalar lambda;
    ScalarField<Scalar> mode;  // L2-normalized, nonnegative in the interior
    int iterations;
};

/// Smallest Dirichlet eigenvalue of -Lap_h by inverse power iteration on the
/// solver.  Stops when successive Rayleigh quotients agree to rel_tol;
/// fails with SolverError after max_iter iterations.
template <typename Scalar>
EigenPair<Scalar> smallest_dirichlet_eigenvalue(const PoissonSolver<Scalar>& solver,
                                                Scalar rel_tol = Scalar(1e-12),
                                                int max_iter = 10000) {
    const Grid<Scalar>& g = solver.grid();
    const int mx = g.nx - 2, my = g.ny - 2;
    using MatrixX = typename PoissonSolver<Scalar>::MatrixX;

    ScalarField<Scalar> v(g);
    v.mat().block(1, 1, my, mx).setOnes();
    v.values /= std::sqrt(v.values.matrix().squaredNorm());

    Scalar lambda = Scalar(0);
    Scalar lambda_prev = Scalar(-1);
    int it = 0;
    MatrixX av(my, mx);
    for (; it < max_iter; ++it) {
        ScalarField<Scalar> z = solver.solve(v);
        z.values /= std::sqrt(z.values.matrix().squaredNorm());
        auto zi = z.mat().block(1, 1, my, mx);
        detail::apply_shifted_operator(g, Scalar(0), Scalar(1), zi, av);
        lambda = zi.cwiseProduct(av).sum() / zi.squaredNorm();
        v = std::move(z);
        if (it > 0 && std::abs(lambda - lambda_prev) <= rel_tol * std::abs(lambda)) break;
        lambda_prev = lambda;
    }
    if (it == max_iter)
        throw SolverError("inverse power iteration did not converge",
                          double(std::abs(lambda - lambda_prev) / std::abs(lambda)), it);

    // normalize to unit L2 norm under the trapezoid quadrature and fix the sign
    ScalarField<Scalar> sq(g);
    sq.values = v.values * v.values;
    v.values /= std::sqrt(integrate(sq));
    if (integrate(v) < Scalar(0)) v.values = -v.values;
    return {lambda, std::move(v), it + 1};
}

}  // namespace mpolar
