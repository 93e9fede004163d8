#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>

#include "mpolar/system.hpp"

namespace mpolar {

template <typename Scalar = double>
struct TimeControls {
    Scalar dt = Scalar(0);       // fixed step size when > 0, adaptive otherwise
    Scalar cfl = Scalar(0.4);    // CFL number for the adaptive step
    Scalar dt_max = Scalar(0.05);
    Scalar t_end = Scalar(1);
    std::int64_t max_steps = 10'000'000;

    void validate() const {
        if (!(t_end >= Scalar(0)) || !std::isfinite(double(t_end)))
            throw ContractError("TimeControls: t_end must be finite and nonnegative");
        if (!(dt >= Scalar(0)) || !std::isfinite(double(dt)))
            throw ContractError("TimeControls: dt must be finite and nonnegative");
        if (dt == Scalar(0) && !(cfl > Scalar(0) && cfl <= Scalar(1)))
            throw ContractError("TimeControls: adaptive stepping needs 0 < cfl <= 1");
        if (!(dt_max > Scalar(0)))
            throw ContractError("TimeControls: dt_max must be positive");
        if (max_steps < 1) throw ContractError("TimeControls: max_steps must be at least 1");
    }
};

/// Right-hand side of the vorticity equation,
///   d omega / dt = -u . grad omega - 2 kappa Lap w          (standard)
///   d omega / dt = -u . grad omega - kappa omega - 2 kappa Lap w   (damped),
/// evaluated with the module stencils.  Pure function of the given fields; the
/// stepper substitutes stage values of u, omega and the midpoint-frozen w.
/// Under the conservative scheme the transport term is the divergence form
/// div(u omega), the realization whose pairing with the streamfunction
/// vanishes to roundoff, so advection moves no kinetic energy.
template <typename Scalar>
ScalarField<Scalar> rhs_omega(const VectorField<Scalar>& u, const ScalarField<Scalar>& omega,
                              const ScalarField<Scalar>& w, const PhysParams<Scalar>& params,
                              AdvectionScheme scheme = AdvectionScheme::central2) {
    ScalarField<Scalar> r = scheme == AdvectionScheme::conservative
                                ? advect_divergence(u, omega)
                                : advect(u, omega, scheme);
    r.values = -r.values - Scalar(2) * params.kappa * laplacian(w).values;
    if (params.variant == Variant::damped) r.values -= params.kappa * omega.values;
    return r;
}

template <typename Scalar>
ScalarField<Scalar> rhs_omega(const State<Scalar>& s, const PhysParams<Scalar>& params,
                              AdvectionScheme scheme = AdvectionScheme::central2) {
    return rhs_omega(s.u, s.omega, s.w, params, scheme);
}

/// One-step IMEX integrator: iterated explicit trapezoid (RK2 with a second
/// corrector pass) for the vorticity transport with the angular velocity
/// frozen at a midpoint prediction, Crank-Nicolson for the stiff
/// angular-velocity equation with its advection and vorticity source
/// evaluated at the step midpoint.  The extra corrector pass gives the
/// stability function 1 + z + z^2/2 + z^3/4, whose modulus is <= 1 on the
/// imaginary axis up to |z| = 2: the undamped vorticity transport cannot
/// accumulate spurious growth at CFL step sizes, which plain Heun does.
/// The scheme carries no cross-step history, so a run can be resumed from
/// (omega, w, t) alone bit-exactly.
template <typename Scalar = double>
class Stepper {
public:
    using ForcingFn = std::function<ScalarField<Scalar>(Scalar)>;

    Stepper(const PoissonSolver<Scalar>& solver, const PhysParams<Scalar>& params,
            AdvectionScheme scheme = AdvectionScheme::central2)
        : solver_(solver), params_(params), scheme_(scheme) {
        params_.validate();
    }

    const PhysParams<Scalar>& params() const { return params_; }
    const PoissonSolver<Scalar>& solver() const { return solver_; }
    AdvectionScheme scheme() const { return scheme_; }

    /// Optional volumetric forcing of the two evolution equations, evaluated
    /// at the substep times the integrator uses (RK2 stage times for the
    /// vorticity, the step midpoint for the angular velocity).
    void set_forcing(ForcingFn f_omega, ForcingFn f_w) {
        f_omega_ = std::move(f_omega);
        f_w_ = std::move(f_w);
    }

    State<Scalar> step(const State<Scalar>& s, Scalar dt) const {
        require_same_grid(solver_.grid(), s.grid(), "Stepper::step");
        if (!(dt > Scalar(0)) || !std::isfinite(double(dt)))
            throw ContractError("Stepper::step: dt must be finite and positive");
        const Scalar t = s.t;
        const Scalar kap = params_.kappa;

        ScalarField<Scalar> w_mid = predict_w_midpoint(s, dt);
        if (!w_mid.all_finite()) throw BlowupError("w_predictor", double(t));

        // Heun stage 1
        ScalarField<Scalar> k1 = rhs_omega(s.u, s.omega, w_mid, params_, scheme_);
        if (f_omega_) k1.values += f_omega_(t).values;
        ScalarField<Scalar> omega_hat(s.grid());
        omega_hat.values = s.omega.values + dt * k1.values;
        if (!omega_hat.all_finite()) throw BlowupError("omega_predictor", double(t));

        // corrector pass 1 with the stage velocity recovered from the predictor
        VectorField<Scalar> u_hat = grad_perp(solver_.solve(omega_hat));
        ScalarField<Scalar> k2 = rhs_omega(u_hat, omega_hat, w_mid, params_, scheme_);
        if (f_omega_) k2.values += f_omega_(t + dt).values;
        ScalarField<Scalar> omega_bar(s.grid());
        omega_bar.values = s.omega.values + (dt / Scalar(2)) * (k1.values + k2.values);
        if (!omega_bar.all_finite()) throw BlowupError("omega_corrector", double(t));

        // corrector pass 2: re-evaluate the end-of-step slope at the pass-1
        // result; this is what moves the advective stability region onto the
        // imaginary axis
        VectorField<Scalar> u_bar = grad_perp(solver_.solve(omega_bar));
        ScalarField<Scalar> k3 = rhs_omega(u_bar, omega_bar, w_mid, params_, scheme_);
        if (f_omega_) k3.values += f_omega_(t + dt).values;

        State<Scalar> out;
        out.t = t + dt;
        out.omega = ScalarField<Scalar>(s.grid());
        out.omega.values = s.omega.values + (dt / Scalar(2)) * (k1.values + k3.values);
        if (!out.omega.all_finite()) throw BlowupError("omega_corrector", double(t));

        out.psi = solver_.solve(out.omega);
        out.u = grad_perp(out.psi);

        // midpoint data for the Crank-Nicolson update of w
        VectorField<Scalar> u_mid(s.grid());
        u_mid.x.values = (s.u.x.values + out.u.x.values) / Scalar(2);
        u_mid.y.values = (s.u.y.values + out.u.y.values) / Scalar(2);
        ScalarField<Scalar> expl = advect(u_mid, w_mid, scheme_);
        expl.values = -expl.values + kap * (s.omega.values + out.omega.values);
        if (f_w_) expl.values += f_w_(t + dt / Scalar(2)).values;

        out.w = cn_solve(s.w, expl, dt);
        if (!out.w.all_finite()) throw BlowupError("w_corrector", double(t));
        out.w.set_boundary_zero();
        return out;
    }

    /// Advance only the angular velocity, holding the flow fields of `s`
    /// fixed over the step.  Exposes the Crank-Nicolson half of the scheme.
    State<Scalar> step_w(const State<Scalar>& s, Scalar dt) const {
        require_same_grid(solver_.grid(), s.grid(), "Stepper::step_w");
        if (!(dt > Scalar(0))) throw ContractError("Stepper::step_w: dt must be positive");
        ScalarField<Scalar> w_mid = predict_w_midpoint(s, dt);
        if (!w_mid.all_finite()) throw BlowupError("w_predictor", double(s.t));
        ScalarField<Scalar> expl = advect(s.u, w_mid, scheme_);
        expl.values = -expl.values + Scalar(2) * params_.kappa * s.omega.values;
        if (f_w_) expl.values += f_w_(s.t + dt / Scalar(2)).values;
        State<Scalar> out = s;
        out.t = s.t + dt;
        out.w = cn_solve(s.w, expl, dt);
        if (!out.w.all_finite()) throw BlowupError("w_corrector", double(s.t));
        out.w.set_boundary_zero();
        return out;
    }

    /// Adaptive step size: CFL bound on the advection stencils plus stability
    /// guards for the explicit 2 kappa Lap w source and the zeroth-order
    /// coupling, capped by controls.dt_max and the remaining time to t_end.
    Scalar stable_dt(const State<Scalar>& s, const TimeControls<Scalar>& controls) const {
        const Scalar eps = Scalar(1e-12);
        const Scalar umax =
            std::max(s.u.x.values.abs().maxCoeff(), s.u.y.values.abs().maxCoeff());
        const Scalar hmin = std::min(s.grid().dx(), s.grid().dy());
        Scalar dt = hmin / (umax + eps);
        if (params_.kappa > Scalar(0)) {
            dt = std::min(dt, Scalar(1) / std::sqrt(Scalar(2) * params_.kappa * solver_.lambda_max()));
            dt = std::min(dt, Scalar(1) / (Scalar(5) * params_.kappa));
        }
        dt *= controls.cfl;
        dt = std::min(dt, controls.dt_max);
        const Scalar remaining = controls.t_end - s.t;
        if (remaining > Scalar(0)) dt = std::min(dt, remaining);
        return dt;
    }

private:
    // Midpoint prediction of w: half-step Crank-Nicolson on gamma Lap - c with
    // the explicit terms frozen at the step start.  Unconditionally stable and
    // second-order accurate at t + dt/2, which is all the corrector needs.
    ScalarField<Scalar> predict_w_midpoint(const State<Scalar>& s, Scalar dt) const {
        const Scalar c = zeroth_order();
        ScalarField<Scalar> n0 = advect(s.u, s.w, scheme_);
        n0.values = -n0.values + Scalar(2) * params_.kappa * s.omega.values;
        if (f_w_) n0.values += f_w_(s.t).values;
        ScalarField<Scalar> rhs(s.grid());
        rhs.values = s.w.values +
                     (dt / Scalar(4)) * (params_.gamma * laplacian(s.w).values - c * s.w.values) +
                     (dt / Scalar(2)) * n0.values;
        return solver_.solve_shifted(rhs, Scalar(1) + dt * c / Scalar(4),
                                     dt * params_.gamma / Scalar(4));
    }

    // (I - (dt/2)(gamma Lap - c)) w1 = (I + (dt/2)(gamma Lap - c)) w + dt expl
    ScalarField<Scalar> cn_solve(const ScalarField<Scalar>& w, const ScalarField<Scalar>& expl,
                                 Scalar dt) const {
        const Scalar c = zeroth_order();
        ScalarField<Scalar> rhs(w.grid);
        rhs.values = w.values +
                     (dt / Scalar(2)) * (params_.gamma * laplacian(w).values - c * w.values) +
                     dt * expl.values;
        return solver_.solve_shifted(rhs, Scalar(1) + dt * c / Scalar(2),
                                     dt * params_.gamma / Scalar(2));
    }

    // coefficient of the zeroth-order term handled implicitly alongside the
    // diffusion: 4 kappa w in the standard variant, absent in the damped one
    Scalar zeroth_order() const {
        return params_.variant == Variant::standard ? Scalar(4) * params_.kappa : Scalar(0);
    }

    const PoissonSolver<Scalar>& solver_;
    PhysParams<Scalar> params_;
    AdvectionScheme scheme_;
    ForcingFn f_omega_;
    ForcingFn f_w_;
};

enum class ICKind { eigenmode, vortex_pair, random_smooth };

namespace detail {

// Uniform double in [-1, 1) from the top 53 bits of the engine output; avoids
// std::uniform_real_distribution, whose mapping is implementation-defined.
inline double unit_symmetric(std::mt19937_64& rng) {
    const double r = double(rng() >> 11) * 0x1p-53;
    return 2.0 * r - 1.0;
}

}  // namespace detail

/// Built-in initial data.  All families are finite sums of Dirichlet
/// eigenmodes of the rectangle, so w, psi and the normal velocity vanish on
/// the boundary exactly and the vorticity is smooth.
///   eigenmode:     psi0 = w0 = A sin(pi x/lx) sin(pi y/ly)
///   vortex_pair:   psi0 = A sin(2 pi x/lx) sin(pi y/ly) (counter-rotating
///                  bumps centered at x = lx/4 and 3 lx/4), w0 = 0
///   random_smooth: modes (m, n) in [1, 8]^2 with coefficients
///                  c_mn/(m^2 + n^2), c_mn drawn from mt19937_64(seed) in
///                  documented order (psi coefficients first, then w; m outer,
///                  n inner); the draw is then rescaled so that
///                  max|omega0| = max|w0| = A.  Pinning the sup norm of the
///                  vorticity makes A the size of the data in the class the
///                  sup-norm bounds are stated for, uniformly across seeds.
///                  Equal seeds give bit-identical states.
/// The vorticity is derived from psi0 with the module Laplacian, so the
/// streamfunction recovered by the solver reproduces psi0 to roundoff.
template <typename Scalar>
State<Scalar> initial_condition(ICKind kind, const PoissonSolver<Scalar>& solver,
                                Scalar amplitude, std::uint64_t seed = 0) {
    if (!std::isfinite(double(amplitude)))
        throw ContractError("initial_condition: amplitude must be finite");
    const Grid<Scalar>& g = solver.grid();
    const Scalar pi = Scalar(3.14159265358979323846L);
    ScalarField<Scalar> psi0(g), w0(g);

    if (kind == ICKind::eigenmode) {
        psi0 = ScalarField<Scalar>::from_function(
            g,
            [&](Scalar x, Scalar y) {
                return amplitude * std::sin(pi * x / g.lx) * std::sin(pi * y / g.ly);
            },
            true);
        w0 = psi0;
    } else if (kind == ICKind::vortex_pair) {
        psi0 = ScalarField<Scalar>::from_function(
            g,
            [&](Scalar x, Scalar y) {
                return amplitude * std::sin(Scalar(2) * pi * x / g.lx) * std::sin(pi * y / g.ly);
            },
            true);
    } else {
        constexpr int kmodes = 8;
        std::mt19937_64 rng(seed);
        Eigen::Matrix<Scalar, kmodes, kmodes> cpsi, cw;
        for (int m = 0; m < kmodes; ++m)
            for (int n = 0; n < kmodes; ++n)
                cpsi(m, n) = Scalar(detail::unit_symmetric(rng)) /
                             Scalar((m + 1) * (m + 1) + (n + 1) * (n + 1));
        for (int m = 0; m < kmodes; ++m)
            for (int n = 0; n < kmodes; ++n)
                cw(m, n) = Scalar(detail::unit_symmetric(rng)) /
                           Scalar((m + 1) * (m + 1) + (n + 1) * (n + 1));

        Eigen::Matrix<Scalar, Eigen::Dynamic, kmodes> sx(g.nx, kmodes), sy(g.ny, kmodes);
        for (int i = 0; i < g.nx; ++i)
            for (int m = 0; m < kmodes; ++m) sx(i, m) = std::sin(Scalar(m + 1) * pi * g.x(i) / g.lx);
        for (int j = 0; j < g.ny; ++j)
            for (int n = 0; n < kmodes; ++n) sy(j, n) = std::sin(Scalar(n + 1) * pi * g.y(j) / g.ly);

        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                Scalar sp = Scalar(0), sw = Scalar(0);
                for (int m = 0; m < kmodes; ++m)
                    for (int n = 0; n < kmodes; ++n) {
                        const Scalar basis = sx(i, m) * sy(j, n);
                        sp += cpsi(m, n) * basis;
                        sw += cw(m, n) * basis;
                    }
                psi0(i, j) = sp;
                w0(i, j) = sw;
            }
        psi0.set_boundary_zero();
        w0.set_boundary_zero();

        ScalarField<Scalar> omega_raw(g);
        omega_raw.values = -laplacian(psi0).values;
        const Scalar om_sup = omega_raw.values.abs().maxCoeff();
        const Scalar w_sup = w0.values.abs().maxCoeff();
        omega_raw.values *= om_sup > Scalar(0) ? amplitude / om_sup : Scalar(0);
        w0.values *= w_sup > Scalar(0) ? amplitude / w_sup : Scalar(0);
        return assemble_state(solver, std::move(omega_raw), std::move(w0), Scalar(0));
    }

    ScalarField<Scalar> omega0(g);
    omega0.values = -laplacian(psi0).values;
    return assemble_state(solver, std::move(omega0), std::move(w0), Scalar(0));
}

}  // namespace mpolar
