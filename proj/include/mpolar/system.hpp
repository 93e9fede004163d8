#pragma once

#include "mpolar/poisson.hpp"

namespace mpolar {

/// Model variant: `standard` couples the angular velocity back through the
/// zeroth-order 4 kappa w term; `damped` drops that term and instead adds
/// linear drag kappa u to the velocity equation.
enum class Variant { standard, damped };

template <typename Scalar = double>
struct PhysParams {
    Scalar gamma = Scalar(1);   // angular viscosity, > 0
    Scalar kappa = Scalar(0);   // micro-rotation coupling, >= 0
    Variant variant = Variant::standard;

    void validate() const {
        if (!(gamma > Scalar(0)) || !std::isfinite(double(gamma)))
            throw ContractError("PhysParams: gamma must be finite and positive");
        if (!(kappa >= Scalar(0)) || !std::isfinite(double(kappa)))
            throw ContractError("PhysParams: kappa must be finite and nonnegative");
    }

    /// Whether the exponential-decay theory applies (gamma > 4 kappa).
    bool decay_regime() const { return gamma > Scalar(4) * kappa; }
};

/// Full flow state.  omega is the vorticity, w the angular velocity, psi the
/// streamfunction and u = grad_perp(psi) the velocity.  Invariants: all values
/// finite; w and psi are exactly zero at boundary nodes; -Lap_h psi = omega at
/// interior nodes to solver tolerance.
template <typename Scalar = double>
struct State {
    Scalar t = Scalar(0);
    ScalarField<Scalar> omega;
    ScalarField<Scalar> w;
    ScalarField<Scalar> psi;
    VectorField<Scalar> u;

    const Grid<Scalar>& grid() const { return omega.grid; }
    bool all_finite() const {
        return omega.all_finite() && w.all_finite() && psi.all_finite() && u.all_finite();
    }
};

/// Build a consistent State from vorticity and angular velocity: solve for the
/// streamfunction, recover the velocity, and force the exact boundary zeros of
/// w.  omega needs no boundary condition of its own.
template <typename Scalar>
State<Scalar> assemble_state(const PoissonSolver<Scalar>& solver, ScalarField<Scalar> omega,
                             ScalarField<Scalar> w, Scalar t) {
    require_same_grid(solver.grid(), omega.grid, "assemble_state");
    require_same_grid(solver.grid(), w.grid, "assemble_state");
    if (!omega.all_finite() || !w.all_finite())
        throw ContractError("assemble_state: non-finite input field");
    State<Scalar> s;
    s.t = t;
    s.psi = solver.solve(omega);
    s.u = grad_perp(s.psi);
    s.omega = std::move(omega);
    s.w = std::move(w);
    s.w.set_boundary_zero();
    return s;
}

}  // namespace mpolar
