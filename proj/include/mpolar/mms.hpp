#pragma once

#include <utility>
#include <vector>

#include "mpolar/analysis.hpp"
#include "mpolar/stepper.hpp"

namespace mpolar {

/// Closed-form reference solution with the exact partial derivatives the
/// forcing terms need, all as evaluable functions of (x, y, t).  The velocity
/// is u = (psi_y, -psi_x) and omega must equal -(psi_xx + psi_yy).
template <typename Scalar = double>
struct ManufacturedSolution {
    using Fn = std::function<Scalar(Scalar, Scalar, Scalar)>;

    Fn psi, psi_x, psi_y, psi_xx, psi_yy;
    Fn w, w_t, w_x, w_y, w_xx, w_yy;
    Fn omega, omega_t, omega_x, omega_y;

    /// Default separable reference on the unit square:
    ///   psi = e^{-t} sin(pi x) sin(pi y),  w = e^{-t} sin(pi x) sin(2 pi y).
    static ManufacturedSolution default_trig() {
        const Scalar pi = Scalar(3.14159265358979323846L);
        const Scalar mu1 = Scalar(2) * pi * pi;  // -Lap of the psi mode
        ManufacturedSolution ms;
        auto sp = [pi](Scalar v) { return std::sin(pi * v); };
        auto cp = [pi](Scalar v) { return std::cos(pi * v); };
        auto s2 = [pi](Scalar v) { return std::sin(Scalar(2) * pi * v); };
        auto c2 = [pi](Scalar v) { return std::cos(Scalar(2) * pi * v); };
        auto decay = [](Scalar t) { return std::exp(-t); };

        ms.psi = [=](Scalar x, Scalar y, Scalar t) { return decay(t) * sp(x) * sp(y); };
        ms.psi_x = [=](Scalar x, Scalar y, Scalar t) { return decay(t) * pi * cp(x) * sp(y); };
        ms.psi_y = [=](Scalar x, Scalar y, Scalar t) { return decay(t) * pi * sp(x) * cp(y); };
        ms.psi_xx = [=](Scalar x, Scalar y, Scalar t) {
            return -decay(t) * pi * pi * sp(x) * sp(y);
        };
        ms.psi_yy = ms.psi_xx;

        ms.w = [=](Scalar x, Scalar y, Scalar t) { return decay(t) * sp(x) * s2(y); };
        ms.w_t = [=](Scalar x, Scalar y, Scalar t) { return -decay(t) * sp(x) * s2(y); };
        ms.w_x = [=](Scalar x, Scalar y, Scalar t) { return decay(t) * pi * cp(x) * s2(y); };
        ms.w_y = [=](Scalar x, Scalar y, Scalar t) {
            return decay(t) * Scalar(2) * pi * sp(x) * c2(y);
        };
        ms.w_xx = [=](Scalar x, Scalar y, Scalar t) {
            return -decay(t) * pi * pi * sp(x) * s2(y);
        };
        ms.w_yy = [=](Scalar x, Scalar y, Scalar t) {
            return -decay(t) * Scalar(4) * pi * pi * sp(x) * s2(y);
        };

        ms.omega = [=](Scalar x, Scalar y, Scalar t) { return mu1 * decay(t) * sp(x) * sp(y); };
        ms.omega_t = [=](Scalar x, Scalar y, Scalar t) {
            return -mu1 * decay(t) * sp(x) * sp(y);
        };
        ms.omega_x = [=](Scalar x, Scalar y, Scalar t) {
            return mu1 * decay(t) * pi * cp(x) * sp(y);
        };
        ms.omega_y = [=](Scalar x, Scalar y, Scalar t) {
            return mu1 * decay(t) * pi * sp(x) * cp(y);
        };
        return ms;
    }
};

/// Forcing pair (f_omega, f_w) that makes the closed forms an exact solution
/// of the chosen variant.
template <typename Scalar>
std::pair<Scalar, Scalar> mms_forcing(const ManufacturedSolution<Scalar>& ms,
                                      const PhysParams<Scalar>& params, Scalar x, Scalar y,
                                      Scalar t) {
    const Scalar u1 = ms.psi_y(x, y, t);
    const Scalar u2 = -ms.psi_x(x, y, t);
    const Scalar lap_w = ms.w_xx(x, y, t) + ms.w_yy(x, y, t);
    const Scalar om = ms.omega(x, y, t);
    Scalar f_omega = ms.omega_t(x, y, t) + u1 * ms.omega_x(x, y, t) + u2 * ms.omega_y(x, y, t) +
                     Scalar(2) * params.kappa * lap_w;
    Scalar f_w = ms.w_t(x, y, t) - params.gamma * lap_w + u1 * ms.w_x(x, y, t) +
                 u2 * ms.w_y(x, y, t) - Scalar(2) * params.kappa * om;
    if (params.variant == Variant::standard) {
        f_w += Scalar(4) * params.kappa * ms.w(x, y, t);
    } else {
        f_omega += params.kappa * om;
    }
    return {f_omega, f_w};
}

/// Node-sampled forcing generators for the stepper.
template <typename Scalar>
std::pair<typename Stepper<Scalar>::ForcingFn, typename Stepper<Scalar>::ForcingFn>
make_mms_forcing(const ManufacturedSolution<Scalar>& ms, const PhysParams<Scalar>& params,
                 const Grid<Scalar>& g) {
    auto f_omega = [ms, params, g](Scalar t) {
        return ScalarField<Scalar>::from_function(
            g, [&](Scalar x, Scalar y) { return mms_forcing(ms, params, x, y, t).first; });
    };
    auto f_w = [ms, params, g](Scalar t) {
        return ScalarField<Scalar>::from_function(
            g, [&](Scalar x, Scalar y) { return mms_forcing(ms, params, x, y, t).second; });
    };
    return {f_omega, f_w};
}

/// Largest relative deviation between the stored derivatives and numerical
/// differentiation of the stored values, over random sample points.  Guards
/// against transcription slips in a hand-written solution.
template <typename Scalar>
Scalar check_ms_derivatives(const ManufacturedSolution<Scalar>& ms, int n_samples = 50,
                            std::uint64_t seed = 12345) {
    std::mt19937_64 rng(seed);
    auto sample = [&rng](Scalar lo, Scalar hi) {
        return lo + (hi - lo) * Scalar(double(rng() >> 11) * 0x1p-53);
    };
    const Scalar h1 = Scalar(1e-6);  // first derivatives
    const Scalar h2 = Scalar(1e-4);  // second derivatives
    Scalar worst = Scalar(0);
    auto check = [&worst](Scalar got, Scalar expect) {
        const Scalar denom = std::max(Scalar(1), std::abs(expect));
        worst = std::max(worst, std::abs(got - expect) / denom);
    };
    for (int s = 0; s < n_samples; ++s) {
        const Scalar x = sample(Scalar(0.05), Scalar(0.95));
        const Scalar y = sample(Scalar(0.05), Scalar(0.95));
        const Scalar t = sample(Scalar(0), Scalar(1));
        auto d1 = [&](const auto& f, int arg) {
            const Scalar xp = arg == 0 ? x + h1 : x, xm = arg == 0 ? x - h1 : x;
            const Scalar yp = arg == 1 ? y + h1 : y, ym = arg == 1 ? y - h1 : y;
            const Scalar tp = arg == 2 ? t + h1 : t, tm = arg == 2 ? t - h1 : t;
            return (f(xp, yp, tp) - f(xm, ym, tm)) / (Scalar(2) * h1);
        };
        auto d2 = [&](const auto& f, int arg) {
            const Scalar xp = arg == 0 ? x + h2 : x, xm = arg == 0 ? x - h2 : x;
            const Scalar yp = arg == 1 ? y + h2 : y, ym = arg == 1 ? y - h2 : y;
            return (f(xp, yp, t) - Scalar(2) * f(x, y, t) + f(xm, ym, t)) / (h2 * h2);
        };
        check(d1(ms.psi, 0), ms.psi_x(x, y, t));
        check(d1(ms.psi, 1), ms.psi_y(x, y, t));
        check(d2(ms.psi, 0), ms.psi_xx(x, y, t));
        check(d2(ms.psi, 1), ms.psi_yy(x, y, t));
        check(d1(ms.w, 0), ms.w_x(x, y, t));
        check(d1(ms.w, 1), ms.w_y(x, y, t));
        check(d1(ms.w, 2), ms.w_t(x, y, t));
        check(d2(ms.w, 0), ms.w_xx(x, y, t));
        check(d2(ms.w, 1), ms.w_yy(x, y, t));
        check(d1(ms.omega, 0), ms.omega_x(x, y, t));
        check(d1(ms.omega, 1), ms.omega_y(x, y, t));
        check(d1(ms.omega, 2), ms.omega_t(x, y, t));
        // structural identity omega = -(psi_xx + psi_yy)
        check(ms.omega(x, y, t), -(ms.psi_xx(x, y, t) + ms.psi_yy(x, y, t)));
    }
    return worst;
}

/// Largest pointwise residual of the continuum equations after substituting
/// the closed forms together with the generated forcing; grid-independent.
template <typename Scalar>
Scalar check_ms_consistency(const ManufacturedSolution<Scalar>& ms,
                            const PhysParams<Scalar>& params, int n_samples = 50,
                            std::uint64_t seed = 777) {
    std::mt19937_64 rng(seed);
    auto sample = [&rng](Scalar lo, Scalar hi) {
        return lo + (hi - lo) * Scalar(double(rng() >> 11) * 0x1p-53);
    };
    Scalar worst = Scalar(0);
    for (int s = 0; s < n_samples; ++s) {
        const Scalar x = sample(Scalar(0), Scalar(1));
        const Scalar y = sample(Scalar(0), Scalar(1));
        const Scalar t = sample(Scalar(0), Scalar(1));
        const auto [f_omega, f_w] = mms_forcing(ms, params, x, y, t);
        const Scalar u1 = ms.psi_y(x, y, t);
        const Scalar u2 = -ms.psi_x(x, y, t);
        const Scalar lap_w = ms.w_xx(x, y, t) + ms.w_yy(x, y, t);
        const Scalar om = ms.omega(x, y, t);
        Scalar r_omega = ms.omega_t(x, y, t) + u1 * ms.omega_x(x, y, t) +
                         u2 * ms.omega_y(x, y, t) + Scalar(2) * params.kappa * lap_w - f_omega;
        Scalar r_w = ms.w_t(x, y, t) - params.gamma * lap_w + u1 * ms.w_x(x, y, t) +
                     u2 * ms.w_y(x, y, t) - Scalar(2) * params.kappa * om - f_w;
        if (params.variant == Variant::standard)
            r_w += Scalar(4) * params.kappa * ms.w(x, y, t);
        else
            r_omega += params.kappa * om;
        const Scalar r_defn = om + ms.psi_xx(x, y, t) + ms.psi_yy(x, y, t);
        worst = std::max({worst, std::abs(r_omega), std::abs(r_w), std::abs(r_defn)});
    }
    return worst;
}

template <typename Scalar = double>
struct StudyLevel {
    int n = 0;
    Scalar h = Scalar(0);
    Scalar dt = Scalar(0);
    Scalar err_omega = Scalar(0);  // max over steps of ||omega - omega*||_L2
    Scalar err_w = Scalar(0);
};

template <typename Scalar = double>
struct StudyResult {
    std::vector<StudyLevel<Scalar>> levels;
    std::vector<Scalar> order_omega;  // between consecutive levels
    std::vector<Scalar> order_w;
};

/// March the forced system on a sequence of unit-square grids and report the
/// worst-over-time L2 errors against the closed forms, plus observed orders.
/// dt = dt_over_h * h, rounded so the final step lands on t_final.
template <typename Scalar>
StudyResult<Scalar> convergence_study(const ManufacturedSolution<Scalar>& ms,
                                      const PhysParams<Scalar>& params,
                                      AdvectionScheme scheme = AdvectionScheme::central2,
                                      const std::vector<int>& sizes = {32, 64, 128},
                                      Scalar t_final = Scalar(0.5),
                                      Scalar dt_over_h = Scalar(0.25)) {
    StudyResult<Scalar> result;
    for (int n : sizes) {
        Grid<Scalar> g(n, n, Scalar(1), Scalar(1));
        PoissonSolver<Scalar> solver(g);
        Stepper<Scalar> stepper(solver, params, scheme);
        auto [f_omega, f_w] = make_mms_forcing(ms, params, g);
        stepper.set_forcing(f_omega, f_w);

        ScalarField<Scalar> om0 = ScalarField<Scalar>::from_function(
            g, [&](Scalar x, Scalar y) { return ms.omega(x, y, Scalar(0)); });
        ScalarField<Scalar> w0 = ScalarField<Scalar>::from_function(
            g, [&](Scalar x, Scalar y) { return ms.w(x, y, Scalar(0)); });
        State<Scalar> s = assemble_state(solver, std::move(om0), std::move(w0), Scalar(0));

        const Scalar h = g.dx();
        const auto steps = std::max<std::int64_t>(1, std::llround(double(t_final / (dt_over_h * h))));
        const Scalar dt = t_final / Scalar(steps);

        StudyLevel<Scalar> level;
        level.n = n;
        level.h = h;
        level.dt = dt;
        for (std::int64_t k = 0; k < steps; ++k) {
            s = stepper.step(s, dt);
            ScalarField<Scalar> eo(g), ew(g);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    eo(i, j) = s.omega(i, j) - ms.omega(g.x(i), g.y(j), s.t);
                    ew(i, j) = s.w(i, j) - ms.w(g.x(i), g.y(j), s.t);
                }
            level.err_omega = std::max(level.err_omega, l2_norm(eo));
            level.err_w = std::max(level.err_w, l2_norm(ew));
        }
        result.levels.push_back(level);
    }
    for (std::size_t l = 1; l < result.levels.size(); ++l) {
        const Scalar hr = result.levels[l - 1].h / result.levels[l].h;
        result.order_omega.push_back(
            std::log(result.levels[l - 1].err_omega / result.levels[l].err_omega) / std::log(hr));
        result.order_w.push_back(
            std::log(result.levels[l - 1].err_w / result.levels[l].err_w) / std::log(hr));
    }
    return result;
}

}  // namespace mpolar
