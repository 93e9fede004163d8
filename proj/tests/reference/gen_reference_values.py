#!/usr/bin/env python3
"""Reference value generator for the frozen constants used in the C++ tests.

Computes, independently of the C++ implementation:
  * manufactured-solution forcing values at pinned space-time points
    (symbolic differentiation, evaluated to 30 significant digits),
  * discrete Dirichlet eigenvalues of the 5-point Laplacian,
  * Crank-Nicolson amplification factors and effective decay rates,
  * truncation-error constants for the difference stencils,
  * the damped-regime decay-rate formula at the documented parameter point.

Run from anywhere; output is meant to be pasted into the test sources.
Requires sympy and numpy.
"""

import numpy as np
import sympy as sp


def mms_forcing_table():
    x, y, t, gamma, kappa = sp.symbols("x y t gamma kappa", real=True)

    psi = sp.exp(-t) * sp.sin(sp.pi * x) * sp.sin(sp.pi * y)
    w = sp.exp(-t) * sp.sin(sp.pi * x) * sp.sin(2 * sp.pi * y)

    u1 = sp.diff(psi, y)
    u2 = -sp.diff(psi, x)
    omega = -(sp.diff(psi, x, 2) + sp.diff(psi, y, 2))
    lap_w = sp.diff(w, x, 2) + sp.diff(w, y, 2)
    curl_u = sp.diff(u2, x) - sp.diff(u1, y)

    # curl_u must equal omega identically
    assert sp.simplify(curl_u - omega) == 0

    adv_omega = u1 * sp.diff(omega, x) + u2 * sp.diff(omega, y)
    adv_w = u1 * sp.diff(w, x) + u2 * sp.diff(w, y)

    f_omega_std = sp.diff(omega, t) + adv_omega + 2 * kappa * lap_w
    f_w_std = sp.diff(w, t) - gamma * lap_w + 4 * kappa * w + adv_w - 2 * kappa * omega

    f_omega_dmp = sp.diff(omega, t) + adv_omega + kappa * omega + 2 * kappa * lap_w
    f_w_dmp = sp.diff(w, t) - gamma * lap_w + adv_w - 2 * kappa * omega

    points = [
        (sp.Rational(3, 10), sp.Rational(7, 10), sp.Integer(0)),
        (sp.Rational(1, 4), sp.Rational(1, 2), sp.Rational(1, 10)),
        (sp.Rational(1, 8), sp.Rational(3, 8), sp.Rational(1, 2)),
        (sp.Rational(3, 5), sp.Rational(9, 10), sp.Rational(1, 4)),
        (sp.Rational(1, 3), sp.Rational(2, 3), sp.Integer(1)),
    ]
    subs_params = {gamma: sp.Integer(1), kappa: sp.Rational(1, 5)}

    print("# manufactured forcing, gamma=1 kappa=1/5, at (x, y, t)")
    for px, py, pt in points:
        sub = {x: px, y: py, t: pt, **subs_params}
        fo_s = sp.N(f_omega_std.subs(sub), 30)
        fw_s = sp.N(f_w_std.subs(sub), 30)
        fo_d = sp.N(f_omega_dmp.subs(sub), 30)
        fw_d = sp.N(f_w_dmp.subs(sub), 30)
        print(f"  point ({sp.N(px, 20)}, {sp.N(py, 20)}, {sp.N(pt, 20)})")
        print(f"    std f_omega = {fo_s}")
        print(f"    std f_w     = {fw_s}")
        print(f"    dmp f_omega = {fo_d}")
        print(f"    dmp f_w     = {fw_d}")

    # exact solution values used by the derivative cross-checks
    print("# psi, w, omega at the first pinned point")
    sub = {x: points[0][0], y: points[0][1], t: points[0][2]}
    print(f"    psi   = {sp.N(psi.subs(sub), 30)}")
    print(f"    w     = {sp.N(w.subs(sub), 30)}")
    print(f"    omega = {sp.N(omega.subs(sub), 30)}")


def discrete_eigenvalues():
    print("# smallest discrete Dirichlet eigenvalue, 5-point stencil")
    for nx, ny, lx, ly in [(64, 64, 1.0, 1.0), (128, 128, 1.0, 1.0),
                           (33, 17, 2.0, 1.0), (129, 129, 1.0, 1.0)]:
        dx = lx / (nx - 1)
        dy = ly / (ny - 1)
        lam = (4.0 / dx**2) * np.sin(np.pi * dx / (2 * lx))**2 \
            + (4.0 / dy**2) * np.sin(np.pi * dy / (2 * ly))**2
        lam_max = (4.0 / dx**2) * np.sin((nx - 2) * np.pi / (2 * (nx - 1)))**2 \
            + (4.0 / dy**2) * np.sin((ny - 2) * np.pi / (2 * (ny - 1)))**2
        print(f"  {nx}x{ny} lx={lx} ly={ly}: lambda1 = {lam:.17g}  lambda_max = {lam_max:.17g}")
        print(f"    continuum = {np.pi**2 * (1/lx**2 + 1/ly**2):.17g}")

    # brute-force cross-check on a small grid: assemble the matrix and take
    # the smallest eigenvalue directly
    n = 9
    dx = 1.0 / (n - 1)
    m = n - 2
    A = np.zeros((m * m, m * m))
    for j in range(m):
        for i in range(m):
            k = j * m + i
            A[k, k] = 4.0 / dx**2
            if i > 0:
                A[k, k - 1] = -1.0 / dx**2
            if i < m - 1:
                A[k, k + 1] = -1.0 / dx**2
            if j > 0:
                A[k, k - m] = -1.0 / dx**2
            if j < m - 1:
                A[k, k + m] = -1.0 / dx**2
    ev = np.linalg.eigvalsh(A)
    lam_closed = 2 * (4.0 / dx**2) * np.sin(np.pi * dx / 2)**2
    print(f"  brute force 9x9: lambda1 = {ev[0]:.17g} closed form = {lam_closed:.17g} "
          f"rel diff = {abs(ev[0]-lam_closed)/lam_closed:.3g}")


def cn_heat_decay():
    print("# Crank-Nicolson heat decay, gamma=1, 128x128 unit square, dt = h/4")
    n = 128
    h = 1.0 / (n - 1)
    dt = h / 4
    lam = 2 * (4.0 / h**2) * np.sin(np.pi * h / 2)**2
    sigma = (1 - 0.5 * dt * lam) / (1 + 0.5 * dt * lam)
    rate_eff = -2.0 * np.log(sigma) / dt        # decay rate of ||w||^2
    rate_true = 2.0 * lam
    print(f"  lambda1 = {lam:.17g}")
    print(f"  sigma = {sigma:.17g}")
    print(f"  effective ||w||^2 rate = {rate_eff:.17g}")
    print(f"  2*gamma*lambda1        = {rate_true:.17g}")
    print(f"  relative gap = {abs(rate_eff - rate_true)/rate_true:.3g}")


def stencil_truncation():
    print("# truncation error of the difference stencils on sin(pi x) sin(pi y)")
    for n in [32, 64, 128]:
        h = 1.0 / (n - 1)
        xs = np.linspace(0.0, 1.0, n)
        f = np.sin(np.pi * xs)[None, :] * np.sin(np.pi * xs)[:, None]
        dfdx = np.pi * np.cos(np.pi * xs)[None, :] * np.sin(np.pi * xs)[:, None]
        g = np.zeros_like(f)
        g[:, 1:-1] = (f[:, 2:] - f[:, :-2]) / (2 * h)
        g[:, 0] = (-3 * f[:, 0] + 4 * f[:, 1] - f[:, 2]) / (2 * h)
        g[:, -1] = (3 * f[:, -1] - 4 * f[:, -2] + f[:, -3]) / (2 * h)
        err = np.max(np.abs(g - dfdx))
        print(f"  n={n}: max |d/dx error| = {err:.6g}  err/h^2 = {err/h**2:.6g}")

        lap = np.zeros_like(f)
        lap[1:-1, 1:-1] = (f[1:-1, 2:] - 2 * f[1:-1, 1:-1] + f[1:-1, :-2]) / h**2 \
            + (f[2:, 1:-1] - 2 * f[1:-1, 1:-1] + f[:-2, 1:-1]) / h**2
        lap_true = -2 * np.pi**2 * f
        errl = np.max(np.abs(lap[1:-1, 1:-1] - lap_true[1:-1, 1:-1]))
        print(f"        max interior |laplacian error| = {errl:.6g}  err/h^2 = {errl/h**2:.6g}")

        # trapezoid integral of the product mode
        wts = np.ones(n)
        wts[0] = wts[-1] = 0.5
        q = h * h * (wts[:, None] * wts[None, :] * f).sum()
        print(f"        trapezoid integral = {q:.17g}  exact 4/pi^2 = {4/np.pi**2:.17g} "
              f"err = {abs(q - 4/np.pi**2):.3g}")


def damped_rate_point():
    print("# damped-regime rate floor at gamma=1, kappa=1/10, C_P^2 = 1/(2 pi^2)")
    gamma, kappa = 1.0, 0.1
    lam = 2 * np.pi**2
    r1 = 2 * kappa * (gamma - 4 * kappa) / (gamma + 4 * kappa)
    r2 = (gamma - 4 * kappa) * lam
    print(f"  rate1 = {r1:.17g}")
    print(f"  rate2 = {r2:.17g}")
    print(f"  c0 = min = {min(r1, r2):.17g}")


def z_coefficients():
    print("# combined-quantity transport coefficients at gamma=1, kappa=1/5")
    gamma, kappa = 1.0, 0.2
    a = 4 * kappa**2 / gamma
    b = (8 * kappa**2 / gamma) * (1 + kappa / gamma)
    print(f"  growth a = {a:.17g}   w-coupling b = {b:.17g}")


def dst_identity():
    print("# sine matrix involution, n=9 interior m=7")
    n = 9
    m = n - 2
    S = np.array([[np.sin((k + 1) * (i + 1) * np.pi / (n - 1)) for i in range(m)]
                  for k in range(m)])
    err = np.max(np.abs(S @ S - (n - 1) / 2 * np.eye(m)))
    print(f"  max |S*S - (n-1)/2 I| = {err:.3g}")


if __name__ == "__main__":
    mms_forcing_table()
    discrete_eigenvalues()
    cn_heat_decay()
    stencil_truncation()
    damped_rate_point()
    z_coefficients()
    dst_identity()
