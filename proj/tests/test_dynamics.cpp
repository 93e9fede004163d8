#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "mpolar/stepper.hpp"

using namespace mpolar;

namespace {

const double kPi = 3.14159265358979323846;

ScalarField<double> sine_mode(const Grid<double>& g, int kx, int ky) {
    ScalarField<double> m(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            m(i, j) = std::sin(kx * kPi * g.x(i) / g.lx) * std::sin(ky * kPi * g.y(j) / g.ly);
    m.set_boundary_zero();
    return m;
}

double mode_lambda(const Grid<double>& g, int kx, int ky) {
    const double sx = std::sin(kx * kPi / (2.0 * (g.nx - 1)));
    const double sy = std::sin(ky * kPi / (2.0 * (g.ny - 1)));
    return 4.0 / (g.dx() * g.dx()) * sx * sx + 4.0 / (g.dy() * g.dy()) * sy * sy;
}

ScalarField<double> random_field(const Grid<double>& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ScalarField<double> f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            f(i, j) = 2.0 * (double(rng() >> 11) * 0x1p-53) - 1.0;
    return f;
}

}  // namespace

TEST_CASE("time controls validate their ranges") {
    TimeControls<double> c;
    c.t_end = 1.0;
    CHECK_NOTHROW(c.validate());
    c.dt = -1.0;
    CHECK_THROWS_AS(c.validate(), ContractError);
    c.dt = 0.0;
    c.cfl = 1.5;
    CHECK_THROWS_AS(c.validate(), ContractError);
    c.cfl = 0.4;
    c.dt_max = 0.0;
    CHECK_THROWS_AS(c.validate(), ContractError);
    c.dt_max = 0.05;
    c.t_end = -2.0;
    CHECK_THROWS_AS(c.validate(), ContractError);
    c.t_end = 1.0;
    c.max_steps = 0;
    CHECK_THROWS_AS(c.validate(), ContractError);
}

TEST_CASE("vorticity right-hand side decomposes into its terms") {
    Grid<double> g(17, 15, 1.0, 1.1);
    PoissonSolver<double> solver(g);
    auto omega = random_field(g, 1);
    auto w = random_field(g, 2);
    w.set_boundary_zero();
    auto psi = random_field(g, 3);
    psi.set_boundary_zero();
    VectorField<double> u = grad_perp(psi);

    // kappa = 0: pure transport, one realization per scheme
    PhysParams<double> inviscid{1.0, 0.0, Variant::standard};
    auto r1 = rhs_omega(u, omega, w, inviscid, AdvectionScheme::central2);
    auto a1 = advect(u, omega, AdvectionScheme::central2);
    CHECK(((r1.values + a1.values).abs() < 1e-14 * (1.0 + a1.values.abs())).all());

    auto r2 = rhs_omega(u, omega, w, inviscid, AdvectionScheme::conservative);
    auto a2 = advect_divergence(u, omega);
    CHECK(((r2.values + a2.values).abs() < 1e-14 * (1.0 + a2.values.abs())).all());

    // the angular velocity enters only through -2 kappa Lap w
    PhysParams<double> coupled{1.0, 0.3, Variant::standard};
    auto r3 = rhs_omega(u, omega, w, coupled, AdvectionScheme::central2);
    ScalarField<double> expect(g);
    expect.values = r1.values - 0.6 * laplacian(w).values;
    CHECK(((r3.values - expect.values).abs() < 1e-13 * (1.0 + expect.values.abs())).all());

    // the damped variant adds -kappa omega and nothing else
    PhysParams<double> damped{1.0, 0.3, Variant::damped};
    auto r4 = rhs_omega(u, omega, w, damped, AdvectionScheme::central2);
    expect.values = r3.values - 0.3 * omega.values;
    CHECK(((r4.values - expect.values).abs() < 1e-13 * (1.0 + expect.values.abs())).all());
}

TEST_CASE("the rest state is a fixed point of the step") {
    Grid<double> g(17, 17, 1.0, 1.0);
    PoissonSolver<double> solver(g);
    Stepper<double> stepper(solver, {1.0, 0.2, Variant::standard});
    State<double> s = initial_condition(ICKind::eigenmode, solver, 0.0);
    State<double> s1 = stepper.step(s, 0.01);
    CHECK((s1.omega.values == 0.0).all());
    CHECK((s1.w.values == 0.0).all());
    CHECK((s1.psi.values == 0.0).all());
    CHECK(s1.t == 0.01);
}

TEST_CASE("with kappa = 0 the angular velocity relaxes mode by mode") {
    Grid<double> g(33, 33, 1.0, 1.0);
    PoissonSolver<double> solver(g);
    const double gamma = 0.7, dt = 0.01;
    Stepper<double> stepper(solver, {gamma, 0.0, Variant::standard});

    ScalarField<double> zero(g);
    zero.values.setZero();
    State<double> s = assemble_state(solver, zero, sine_mode(g, 2, 1), 0.0);

    const double lam = mode_lambda(g, 2, 1);
    const double sigma = (1.0 - gamma * lam * dt / 2.0) / (1.0 + gamma * lam * dt / 2.0);
    const int nsteps = 20;
    for (int k = 0; k < nsteps; ++k) s = stepper.step(s, dt);

    CHECK((s.u.x.values == 0.0).all());
    CHECK((s.u.y.values == 0.0).all());
    CHECK((s.omega.values == 0.0).all());
    auto expect = sine_mode(g, 2, 1);
    expect.values *= std::pow(sigma, nsteps);
    CHECK((s.w.values - expect.values).abs().maxCoeff() < 1e-11);
}

TEST_CASE("frozen per-step decay factor of the implicit half at 128^2") {
    // pins the arithmetic behind the pure-relaxation rate check: gamma = 1,
    // dt = h/4 on the unit square at 128^2, ground eigenvalue of the grid
    PoissonSolver<double> solver(Grid<double>(128, 128, 1.0, 1.0));
    const double dt = (1.0 / 127.0) / 4.0;
    const double lam = solver.lambda_min();
    const double sigma = (1.0 - lam * dt / 2.0) / (1.0 + lam * dt / 2.0);
    CHECK(sigma == doctest::Approx(0.9618857309366049).epsilon(1e-15));
    // the implied decay rate of ||w||^2 stays within 0.1% of 2 gamma lambda_1
    const double rate = -2.0 * std::log(sigma) / dt;
    CHECK(rate == doctest::Approx(2.0 * lam).epsilon(1e-3));
}

TEST_CASE("stepping is deterministic") {
    Grid<double> g(25, 25, 1.0, 1.0);
    PoissonSolver<double> solver(g);
    Stepper<double> stepper(solver, {1.0, 0.2, Variant::standard}, AdvectionScheme::conservative);
    State<double> s = initial_condition(ICKind::random_smooth, solver, 1.0, 42);
    State<double> a = stepper.step(s, 0.005);
    State<double> b = stepper.step(s, 0.005);
    CHECK((a.omega.values == b.omega.values).all());
    CHECK((a.w.values == b.w.values).all());
    CHECK((a.psi.values == b.psi.values).all());
}

TEST_CASE("eigenmode initial data round-trips through the solver") {
    Grid<double> g(49, 33, 1.0, 0.8);
    PoissonSolver<double> solver(g);
    State<double> s = initial_condition(ICKind::eigenmode, solver, 2.0);
    ScalarField<double> psi0 = ScalarField<double>::from_function(
        g, [&](double x, double y) {
            return 2.0 * std::sin(kPi * x / g.lx) * std::sin(kPi * y / g.ly);
        },
        true);
    CHECK((s.psi.values - psi0.values).abs().maxCoeff() < 1e-10);
    CHECK((s.w.values == psi0.values).all());
    CHECK(s.w.boundary_is_zero());
    CHECK(s.t == 0.0);
}

TEST_CASE("vortex pair initial data is a quiet dipole") {
    Grid<double> g(65, 33, 1.0, 1.0);
    PoissonSolver<double> solver(g);
    State<double> s = initial_condition(ICKind::vortex_pair, solver, 1.5);
    CHECK((s.w.values == 0.0).all());
    // streamfunction is antisymmetric about the vertical midline
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            worst = std::max(worst, std::abs(s.psi(i, j) + s.psi(g.nx - 1 - i, j)));
    CHECK(worst < 1e-10);
}

TEST_CASE("random smooth initial data pins the sup norms to the amplitude") {
    Grid<double> g(64, 64, 1.0, 1.0);
    PoissonSolver<double> solver(g);
    const double amp = 3.25;
    State<double> s = initial_condition(ICKind::random_smooth, solver, amp, 7);

    CHECK(s.omega.values.abs().maxCoeff() == doctest::Approx(amp).epsilon(1e-13));
    CHECK(s.w.values.abs().maxCoeff() == doctest::Approx(amp).epsilon(1e-13));
    CHECK(s.w.boundary_is_zero());
    CHECK(s.psi.boundary_is_zero());

    // equal seeds reproduce the state bit for bit; different seeds do not
    State<double> again = initial_condition(ICKind::random_smooth, solver, amp, 7);
    CHECK((s.omega.values == again.omega.values).all());
    CHECK((s.w.values == again.w.values).all());
    State<double> other = initial_condition(ICKind::random_smooth, solver, amp, 8);
    CHECK((s.omega.values != other.omega.values).any());

    // the amplitude is a pure scale factor
    State<double> unit = initial_condition(ICKind::random_smooth, solver, 1.0, 7);
    CHECK(((s.omega.values - amp * unit.omega.values).abs() <=
           1e-14 * (1.0 + s.omega.values.abs()))
              .all());

    CHECK_THROWS_AS(
        initial_condition(ICKind::random_smooth, solver,
                          std::numeric_limits<double>::infinity(), 1),
        ContractError);
}

TEST_CASE("adaptive step size respects each of its guards") {
    Grid<double> g(33, 33, 1.0, 1.0);
    PoissonSolver<double> solver(g);
    PhysParams<double> params{1.0, 0.2, Variant::standard};
    Stepper<double> stepper(solver, params);
    TimeControls<double> controls;
    controls.t_end = 100.0;
    controls.dt_max = 10.0;

    State<double> slow = initial_condition(ICKind::eigenmode, solver, 0.1);
    State<double> fast = initial_condition(ICKind::eigenmode, solver, 10.0);
    const double dt_slow = stepper.stable_dt(slow, controls);
    const double dt_fast = stepper.stable_dt(fast, controls);
    CHECK(dt_fast < dt_slow);
    CHECK(dt_slow <= controls.dt_max);

    // faster flow halves the step in proportion once advection dominates
    State<double> faster = initial_condition(ICKind::eigenmode, solver, 20.0);
    CHECK(stepper.stable_dt(faster, controls) ==
          doctest::Approx(dt_fast / 2.0).epsilon(1e-6));

    // cfl scales the advective bound linearly
    TimeControls<double> half = controls;
    half.cfl = 0.2;
    CHECK(stepper.stable_dt(fast, half) == doctest::Approx(dt_fast / 2.0).epsilon(1e-12));

    // dt_max and the remaining horizon cap the result
    TimeControls<double> tiny = controls;
    tiny.dt_max = 1e-5;
    CHECK(stepper.stable_dt(slow, tiny) == 1e-5);
    TimeControls<double> nearly = controls;
    nearly.t_end = 1.0;
    State<double> late = slow;
    late.t = 1.0 - 1e-6;
    CHECK(stepper.stable_dt(late, nearly) == doctest::Approx(1e-6).epsilon(1e-9));

    // the relaxation guards bound the step even for a quiescent flow
    Stepper<double> stiff(solver, {1.0, 50.0, Variant::standard});
    const double dt_stiff = stiff.stable_dt(slow, controls);
    CHECK(dt_stiff <= controls.cfl / (5.0 * 50.0) * (1.0 + 1e-12));
    CHECK(dt_stiff <=
          controls.cfl / std::sqrt(2.0 * 50.0 * solver.lambda_max()) * (1.0 + 1e-12));
}

TEST_CASE("non-finite intermediate values raise a blowup with its stage") {
    Grid<double> g(17, 17, 1.0, 1.0);
    PoissonSolver<double> solver(g);
    Stepper<double> stepper(solver, {1.0, 0.2, Variant::standard});
    State<double> s = initial_condition(ICKind::random_smooth, solver, 1e200, 3);
    try {
        stepper.step(s, 1.0);
        FAIL("expected BlowupError");
    } catch (const BlowupError& e) {
        CHECK(!e.stage.empty());
        CHECK(e.time == 0.0);
        CHECK(std::string(e.what()).find(e.stage) != std::string::npos);
    }
    CHECK_THROWS_AS(stepper.step(s, 0.0), ContractError);
    CHECK_THROWS_AS(stepper.step(s, -0.1), ContractError);
}

TEST_CASE("constant vorticity forcing integrates exactly from rest") {
    Grid<double> g(21, 21, 1.0, 1.0);
    PoissonSolver<double> solver(g);
    Stepper<double> stepper(solver, {1.0, 0.0, Variant::standard},
                            AdvectionScheme::conservative);
    const double c = 2.75, dt = 0.02;
    stepper.set_forcing(
        [&](double) {
            ScalarField<double> f(g);
            f.values.setConstant(c);
            return f;
        },
        nullptr);
    State<double> s = initial_condition(ICKind::eigenmode, solver, 0.0);
    State<double> s1 = stepper.step(s, dt);
    // constant slope: both trapezoid stages see the same value, and the stage
    // velocities advect a spatially constant field to machine zero
    CHECK((s1.omega.values - dt * c).abs().maxCoeff() < 1e-13);
}

TEST_CASE("modal angular forcing matches the closed-form implicit update") {
    Grid<double> g(25, 25, 1.0, 1.0);
    PoissonSolver<double> solver(g);
    const double gamma = 1.3, strength = 0.8, dt = 0.05;
    Stepper<double> stepper(solver, {gamma, 0.0, Variant::standard});
    auto mode = sine_mode(g, 1, 2);
    stepper.set_forcing(nullptr, [&](double) {
        ScalarField<double> f(g);
        f.values = strength * mode.values;
        return f;
    });
    State<double> s = initial_condition(ICKind::eigenmode, solver, 0.0);
    State<double> s1 = stepper.step(s, dt);
    const double lam = mode_lambda(g, 1, 2);
    const double gain = dt * strength / (1.0 + dt * gamma * lam / 2.0);
    ScalarField<double> expect(g);
    expect.values = gain * mode.values;
    CHECK((s1.w.values - expect.values).abs().maxCoeff() < 1e-12);
    CHECK((s1.omega.values == 0.0).all());
}

TEST_CASE("the exposed implicit half matches the full step when transport is off") {
    Grid<double> g(33, 33, 1.0, 1.0);
    PoissonSolver<double> solver(g);
    Stepper<double> stepper(solver, {0.9, 0.0, Variant::standard});
    ScalarField<double> zero(g);
    zero.values.setZero();
    State<double> s = assemble_state(solver, zero, sine_mode(g, 1, 1), 0.0);
    State<double> full = stepper.step(s, 0.01);
    State<double> half = stepper.step_w(s, 0.01);
    CHECK((full.w.values - half.w.values).abs().maxCoeff() < 1e-13);
    CHECK(half.t == doctest::Approx(0.01).epsilon(1e-15));
}
