#pragma once

#include <vector>

#include "mpolar/system.hpp"

namespace mpolar {

/// L^p norm under the trapezoid quadrature; p may be infinity (max over all
/// nodes).  Requires p >= 1.
template <typename Scalar>
Scalar lp_norm(const ScalarField<Scalar>& f, Scalar p) {
    if (p == std::numeric_limits<Scalar>::infinity()) return f.values.abs().maxCoeff();
    if (!(p >= Scalar(1))) throw ContractError("lp_norm: p must be >= 1 or infinity");
    ScalarField<Scalar> a(f.grid);
    a.values = f.values.abs().pow(p);
    return std::pow(integrate(a), Scalar(1) / p);
}

template <typename Scalar>
Scalar l2_norm(const ScalarField<Scalar>& f) {
    return std::sqrt(inner_product(f, f));
}

/// Gradient energy in the Dirichlet form of the five-point Laplacian: squared
/// forward differences on the links of the grid, midpoint-weighted.  For
/// fields vanishing on the boundary this equals <-Lap_h f, f> exactly, so the
/// discrete Poincare inequality  integrate(f^2) <= (1/lambda1) * energy
/// holds with no truncation slack, and it matches the dissipation rate the
/// Crank-Nicolson update realizes.  Second-order accurate for smooth fields.
template <typename Scalar>
Scalar dirichlet_gradient_energy(const ScalarField<Scalar>& f) {
    const auto& g = f.grid;
    const Scalar dx = g.dx(), dy = g.dy();
    const Scalar cx = dy / dx, cy = dx / dy;  // (df/dx)^2 dx dy = df^2 * dy/dx
    Scalar total = Scalar(0);
    for (int j = 1; j < g.ny - 1; ++j) {
        Scalar row = Scalar(0);
        for (int i = 0; i < g.nx - 1; ++i) {
            const Scalar d = f(i + 1, j) - f(i, j);
            row += d * d;
        }
        total += cx * row;
    }
    for (int j = 0; j < g.ny - 1; ++j) {
        Scalar row = Scalar(0);
        for (int i = 1; i < g.nx - 1; ++i) {
            const Scalar d = f(i, j + 1) - f(i, j);
            row += d * d;
        }
        total += cy * row;
    }
    return total;
}

/// Energy E = ||u||^2_L2 + ||w||^2_L2 with the velocity part evaluated
/// through the stream-vorticity pairing (psi, omega), which equals the
/// integral of |u|^2 after integration by parts (psi vanishes on the
/// boundary).  On the grid this pairing is the Dirichlet form of psi, so the
/// semi-discrete energy identity closes exactly term by term when the
/// conservative advection forms are in use; the recorded residual then
/// measures time discretization alone.  Clamped at zero against roundoff.
template <typename Scalar>
Scalar discrete_energy(const State<Scalar>& s) {
    return std::max(Scalar(0), inner_product(s.psi, s.omega)) + inner_product(s.w, s.w);
}

/// Norm and residual snapshot of one recorded instant.  The residual and
/// envelope fields are filled in by the runner once neighboring states exist;
/// they stay zero when not computable (first/last record, nonuniform dt, or
/// the damped variant for the Z-based columns).
template <typename Scalar = double>
struct DiagnosticsRecord {
    std::int64_t step = 0;
    Scalar t = Scalar(0);
    Scalar l2_u = Scalar(0);
    Scalar l2_w = Scalar(0);
    Scalar h1_semi_u = Scalar(0);   // = ||omega||_L2
    Scalar h1_semi_w = Scalar(0);   // = sqrt(dirichlet_gradient_energy(w))
    Scalar linf_omega = Scalar(0);
    Scalar linf_w = Scalar(0);
    Scalar linf_Z = Scalar(0);
    Scalar lp_Z = Scalar(0);
    Scalar lp_w = Scalar(0);
    Scalar energy = Scalar(0);      // l2_u^2 + l2_w^2
    Scalar energy_residual = Scalar(0);
    Scalar z_residual_l2 = Scalar(0);
    Scalar gronwall_envelope = Scalar(0);
};

/// Combined transported quantity Z = omega + (2 kappa / gamma) w; defined for
/// the standard variant only.
template <typename Scalar>
ScalarField<Scalar> combined_Z(const State<Scalar>& s, const PhysParams<Scalar>& params) {
    if (params.variant != Variant::standard)
        throw UsageError("combined_Z: defined for the standard variant only");
    ScalarField<Scalar> z(s.grid());
    z.values = s.omega.values + (Scalar(2) * params.kappa / params.gamma) * s.w.values;
    return z;
}

/// Transport coefficients of Z: d Z/dt + u . grad Z = a Z - b w with
/// a = 4 kappa^2 / gamma and b = (8 kappa^2 / gamma)(1 + kappa / gamma).
template <typename Scalar>
Scalar z_growth_coefficient(const PhysParams<Scalar>& params) {
    return Scalar(4) * params.kappa * params.kappa / params.gamma;
}

template <typename Scalar>
Scalar z_coupling_coefficient(const PhysParams<Scalar>& params) {
    return (Scalar(8) * params.kappa * params.kappa / params.gamma) *
           (Scalar(1) + params.kappa / params.gamma);
}

namespace detail {

template <typename Scalar>
Scalar uniform_spacing(Scalar t0, Scalar t1, Scalar t2, const char* what) {
    const Scalar d1 = t1 - t0, d2 = t2 - t1;
    if (!(d1 > Scalar(0)) || !(d2 > Scalar(0)))
        throw UsageError(std::string(what) + ": states must be time-ordered");
    // the tolerance absorbs the roundoff drift of accumulating t over many steps
    if (std::abs(d2 - d1) > Scalar(1e-9) * d1)
        throw UsageError(std::string(what) + ": states must be uniformly spaced in time");
    return d1;
}

}  // namespace detail

/// Pointwise residual of the Z transport law over three consecutive states
/// (central time difference at the middle one).  Interior nodes only; the
/// boundary of the returned field is zero.
template <typename Scalar>
ScalarField<Scalar> z_residual(const State<Scalar>& prev, const State<Scalar>& mid,
                               const State<Scalar>& next, const PhysParams<Scalar>& params,
                               AdvectionScheme scheme = AdvectionScheme::central2) {
    require_same_grid(prev.grid(), mid.grid(), "z_residual");
    require_same_grid(mid.grid(), next.grid(), "z_residual");
    const Scalar dt = detail::uniform_spacing(prev.t, mid.t, next.t, "z_residual");
    ScalarField<Scalar> zp = combined_Z(prev, params);
    ScalarField<Scalar> zm = combined_Z(mid, params);
    ScalarField<Scalar> zn = combined_Z(next, params);
    ScalarField<Scalar> r(mid.grid());
    r.values = (zn.values - zp.values) / (Scalar(2) * dt) +
               advect(mid.u, zm, scheme).values - z_growth_coefficient(params) * zm.values +
               z_coupling_coefficient(params) * mid.w.values;
    r.set_boundary_zero();
    return r;
}

template <typename Scalar>
Scalar z_residual_l2(const State<Scalar>& prev, const State<Scalar>& mid,
                     const State<Scalar>& next, const PhysParams<Scalar>& params,
                     AdvectionScheme scheme = AdvectionScheme::central2) {
    return l2_norm(z_residual(prev, mid, next, params, scheme));
}

template <typename Scalar>
struct EnergyBalance {
    Scalar residual = Scalar(0);  // |lhs - rhs| of the energy identity
    Scalar scale = Scalar(0);     // max of the identity's term magnitudes
    Scalar dEdt = Scalar(0);
};

/// Residual of the energy identity over three consecutive states, with the
/// time derivative by central difference and spatial terms at the middle one.
///   standard:  E'/2 + gamma ||grad w||^2 + 4 kappa ||w||^2 = 4 kappa (u, grad_perp w)
///   damped:    E'/2 + kappa ||u||^2 + gamma ||grad w||^2   = 4 kappa (u, grad_perp w)
/// Each term is evaluated in the form that is exact at the semi-discrete
/// level: ||u||^2 through the stream-vorticity pairing (see discrete_energy),
/// ||grad w||^2 through the link sum that equals <-Lap_h w, w>, and the
/// coupling 4 kappa (u, grad_perp w) as 4 kappa (w, omega), its
/// integrated-by-parts twin.  With the conservative advection forms the
/// spatial budget then balances to roundoff and the residual isolates the
/// time-sampling error of the central difference.
template <typename Scalar>
EnergyBalance<Scalar> energy_residual(const State<Scalar>& prev, const State<Scalar>& mid,
                                      const State<Scalar>& next,
                                      const PhysParams<Scalar>& params) {
    require_same_grid(prev.grid(), mid.grid(), "energy_residual");
    require_same_grid(mid.grid(), next.grid(), "energy_residual");
    const Scalar dt = detail::uniform_spacing(prev.t, mid.t, next.t, "energy_residual");

    const Scalar dEdt = (discrete_energy(next) - discrete_energy(prev)) / (Scalar(2) * dt);

    const Scalar grad_w = params.gamma * dirichlet_gradient_energy(mid.w);
    const Scalar w_sq = inner_product(mid.w, mid.w);
    const Scalar u_sq = std::max(Scalar(0), inner_product(mid.psi, mid.omega));
    const Scalar coupling = Scalar(4) * params.kappa * inner_product(mid.w, mid.omega);

    EnergyBalance<Scalar> out;
    out.dEdt = dEdt;
    Scalar lhs;
    if (params.variant == Variant::standard) {
        lhs = dEdt / Scalar(2) + grad_w + Scalar(4) * params.kappa * w_sq;
        out.scale = std::max({grad_w, Scalar(4) * params.kappa * w_sq, std::abs(dEdt)});
    } else {
        lhs = dEdt / Scalar(2) + params.kappa * u_sq + grad_w;
        out.scale = std::max({grad_w, params.kappa * u_sq, std::abs(dEdt)});
    }
    out.residual = std::abs(lhs - coupling);
    return out;
}

/// Integrating-factor envelope for ||Z(t)||_p implied by the transport law:
///   env(t) = e^{a t} ||Z0||_p + int_0^t e^{a (t - s)} b ||w(s)||_p ds,
/// with the integral by the trapezoid rule over the record times.  Records
/// must be uniformly spaced with lp_Z and lp_w populated.  Returns one value
/// per record.
template <typename Scalar>
std::vector<Scalar> gronwall_z_envelope(const std::vector<DiagnosticsRecord<Scalar>>& records,
                                        const PhysParams<Scalar>& params) {
    if (params.variant != Variant::standard)
        throw UsageError("gronwall_z_envelope: defined for the standard variant only");
    if (records.empty()) throw UsageError("gronwall_z_envelope: no records");
    std::vector<Scalar> env(records.size());
    env[0] = records[0].lp_Z;
    if (records.size() == 1) return env;
    const Scalar a = z_growth_coefficient(params);
    const Scalar b = z_coupling_coefficient(params);
    const Scalar dt0 = records[1].t - records[0].t;
    for (std::size_t k = 1; k < records.size(); ++k) {
        const Scalar dt = records[k].t - records[k - 1].t;
        if (!(dt > Scalar(0)) || std::abs(dt - dt0) > Scalar(1e-9) * dt0)
            throw UsageError("gronwall_z_envelope: records must be uniformly spaced");
        const Scalar grow = std::exp(a * dt);
        env[k] = grow * env[k - 1] +
                 (dt / Scalar(2)) * (grow * b * records[k - 1].lp_w + b * records[k].lp_w);
    }
    return env;
}

/// Decay-rate floor for the damped variant in the regime gamma > 4 kappa:
///   C0 = min( 2 kappa (gamma - 4 kappa)/(gamma + 4 kappa),
///             (gamma - 4 kappa)/poincare_sq )
/// with poincare_sq the squared Poincare constant (1/lambda1 on the grid).
template <typename Scalar>
Scalar predicted_c0(const PhysParams<Scalar>& params, Scalar poincare_sq) {
    if (params.variant != Variant::damped)
        throw UsageError("predicted_c0: defined for the damped variant only");
    if (!params.decay_regime())
        throw RegimeError("predicted_c0: requires gamma > 4 kappa");
    if (!(poincare_sq > Scalar(0)))
        throw ContractError("predicted_c0: poincare_sq must be positive");
    const Scalar margin = params.gamma - Scalar(4) * params.kappa;
    const Scalar r1 =
        Scalar(2) * params.kappa * margin / (params.gamma + Scalar(4) * params.kappa);
    const Scalar r2 = margin / poincare_sq;
    return std::min(r1, r2);
}

enum class EnergySeries { l2, h1 };

template <typename Scalar = double>
struct DecayFit {
    Scalar fitted_rate = Scalar(0);  // -slope of the ln E least-squares line
    Scalar intercept = Scalar(0);
    Scalar r_squared = Scalar(0);
    Scalar t_begin = Scalar(0);
    Scalar t_end = Scalar(0);
    int n_points = 0;
    // filled by callers comparing against the damped-variant prediction
    Scalar predicted_c0 = std::numeric_limits<Scalar>::quiet_NaN();
    Scalar poincare_sq = std::numeric_limits<Scalar>::quiet_NaN();
};

/// Least-squares fit of ln E against t over a time window.  The default
/// window is the last 60% of the recorded span.  Needs at least 10 records in
/// the window with strictly positive energies.
template <typename Scalar>
DecayFit<Scalar> fit_decay_rate(const std::vector<DiagnosticsRecord<Scalar>>& records,
                                EnergySeries series = EnergySeries::l2,
                                Scalar t_begin = std::numeric_limits<Scalar>::quiet_NaN(),
                                Scalar t_end = std::numeric_limits<Scalar>::quiet_NaN()) {
    if (records.size() < 2) throw UsageError("fit_decay_rate: need at least 2 records");
    const Scalar t0 = records.front().t, t1 = records.back().t;
    if (std::isnan(double(t_begin))) t_begin = t0 + Scalar(0.4) * (t1 - t0);
    if (std::isnan(double(t_end))) t_end = t1;
    if (!(t_end > t_begin)) throw UsageError("fit_decay_rate: empty window");

    Scalar sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int n = 0;
    Scalar wt0 = t1, wt1 = t0;
    for (const auto& r : records) {
        if (r.t < t_begin || r.t > t_end) continue;
        Scalar e = r.energy;
        if (series == EnergySeries::h1)
            e += r.h1_semi_u * r.h1_semi_u + r.h1_semi_w * r.h1_semi_w;
        if (!(e > Scalar(0)))
            throw UsageError("fit_decay_rate: energies must be strictly positive");
        const Scalar y = std::log(e);
        sx += r.t;
        sy += y;
        sxx += r.t * r.t;
        sxy += r.t * y;
        syy += y * y;
        wt0 = std::min(wt0, r.t);
        wt1 = std::max(wt1, r.t);
        ++n;
    }
    if (n < 10) throw UsageError("fit_decay_rate: need at least 10 records in the window");

    const Scalar det = Scalar(n) * sxx - sx * sx;
    if (!(std::abs(det) > Scalar(0))) throw UsageError("fit_decay_rate: degenerate time points");
    const Scalar slope = (Scalar(n) * sxy - sx * sy) / det;
    const Scalar intercept = (sy - slope * sx) / Scalar(n);
    const Scalar ss_tot = syy - sy * sy / Scalar(n);
    const Scalar ss_res = ss_tot - slope * (sxy - sx * sy / Scalar(n));
    DecayFit<Scalar> fit;
    fit.fitted_rate = -slope;
    fit.intercept = intercept;
    fit.r_squared = ss_tot > Scalar(0) ? Scalar(1) - ss_res / ss_tot : Scalar(1);
    fit.t_begin = wt0;
    fit.t_end = wt1;
    fit.n_points = n;
    return fit;
}

/// True when the recorded energy never increases beyond roundoff.
template <typename Scalar>
bool energy_monotone(const std::vector<DiagnosticsRecord<Scalar>>& records,
                     Scalar rel_tol = Scalar(10) * std::numeric_limits<Scalar>::epsilon()) {
    for (std::size_t k = 1; k < records.size(); ++k)
        if (records[k].energy > records[k - 1].energy * (Scalar(1) + rel_tol)) return false;
    return true;
}

/// Fill the norm fields of a record from a state.  p selects the L^p norm
/// tracked for Z and w (infinity by default); the Z columns are zero for the
/// damped variant, where Z is not defined.
template <typename Scalar>
DiagnosticsRecord<Scalar> compute_record(const State<Scalar>& s, const PhysParams<Scalar>& params,
                                         Scalar p = std::numeric_limits<Scalar>::infinity()) {
    DiagnosticsRecord<Scalar> r;
    r.t = s.t;
    // velocity norm through the stream-vorticity pairing, the evaluation the
    // recorded energy identity is exact in (see discrete_energy)
    const Scalar uu = std::max(Scalar(0), inner_product(s.psi, s.omega));
    r.l2_u = std::sqrt(uu);
    r.l2_w = l2_norm(s.w);
    r.h1_semi_u = l2_norm(s.omega);
    r.h1_semi_w = std::sqrt(dirichlet_gradient_energy(s.w));
    r.linf_omega = s.omega.values.abs().maxCoeff();
    r.linf_w = s.w.values.abs().maxCoeff();
    r.lp_w = lp_norm(s.w, p);
    if (params.variant == Variant::standard) {
        ScalarField<Scalar> z = combined_Z(s, params);
        r.linf_Z = z.values.abs().maxCoeff();
        r.lp_Z = lp_norm(z, p);
    }
    r.energy = uu + r.l2_w * r.l2_w;
    return r;
}

}  // namespace mpolar
