"""Reference integrator and right-hand sides, plain numpy.

This module defines the numerical contract that the compiled core mirrors:
a 13-stage Fehlberg 7(8) embedded pair with local extrapolation, stepping
exactly onto every requested sample time so that the returned rows are
genuine integration states, never interpolants.

System ids
----------
1  modal, amplitude-stiffened:   phi_n'' = -(1 + sum_m s_m phi_m^2) s_n phi_n
                                 dpar = per-mode stiffness s = lam^4 (N,)
2  modal, displacement-coupled:  phi_n'' = -s_n phi_n - (sum_m phi_m^2) phi_n
3  modal, gradient-coupled:      phi'' = -s phi - (phi' D phi') D phi
                                 tab = D, the (N, N) slope Gram matrix
4  modal, pointwise cubic:       phi'' = -s phi - P (E phi)^3
                                 tab rows 0..Q-1 hold E (mode values at the
                                 quadrature nodes), rows Q..2Q-1 hold the
                                 projection weights P^T = (w_q e_n(x_q))
                                 ipar = [N, Q]
5  two-mode rigid pair:          w'' = -l4 w - (1+2A2) z^2 w - w^3
                                 z'' = -k2 z - (1+2A2) w^2 z - z^3
                                 dpar = [l4, k2, A2]
6  two-mode pair, slackening:    adds 2*sig*(w, z) and the nonsmooth hanger
                                 projections; dpar = [l4, k2, A2, sig],
                                 tab = (3, Q): mode values e_q, h_q and
                                 quadrature weights
7  scaled cubic Hill pair:       F'' = -F - F^3, xi'' = -g2 (1 + F^2) xi
                                 two xi columns propagate the monodromy
                                 basis; dpar = [g2]; state dim 6
8  Hill on a cubic carrier:      W'' = -l4 W - c3 W^3,
                                 xi'' = -(q0 + cq W^2) xi; dpar = [l4, c3,
                                 q0, cq]; state dim 6
9  torsional Hill, slackening:   W'' = -(l4+2 sig) W - W^3 - Psi(W),
                                 xi'' = -(k2 + 2 sig + (1+2A2) W^2
                                         + 2 sig^2 B(W)) xi
                                 dpar = [l4, k2, A2, sig]; tab as system 6;
                                 state dim 6; sig = 0 skips the quadrature

All systems are autonomous Hamiltonian-type second-order blocks written as
first-order pairs [q, qdot] interleaved per block: modal systems store
[phi(N), phidot(N)], pair and Hill systems [w, wdot, z, zdot, ...].
"""

import numpy as np

from ..errors import BudgetExceeded

# Fehlberg 7(8) coefficients
_C = np.array(
    [0.0, 2 / 27, 1 / 9, 1 / 6, 5 / 12, 1 / 2, 5 / 6, 1 / 6, 2 / 3, 1 / 3, 1.0, 0.0, 1.0]
)
_A = [
    [],
    [2 / 27],
    [1 / 36, 1 / 12],
    [1 / 24, 0.0, 1 / 8],
    [5 / 12, 0.0, -25 / 16, 25 / 16],
    [1 / 20, 0.0, 0.0, 1 / 4, 1 / 5],
    [-25 / 108, 0.0, 0.0, 125 / 108, -65 / 27, 125 / 54],
    [31 / 300, 0.0, 0.0, 0.0, 61 / 225, -2 / 9, 13 / 900],
    [2.0, 0.0, 0.0, -53 / 6, 704 / 45, -107 / 9, 67 / 90, 3.0],
    [-91 / 108, 0.0, 0.0, 23 / 108, -976 / 135, 311 / 54, -19 / 60, 17 / 6, -1 / 12],
    [2383 / 4100, 0.0, 0.0, -341 / 164, 4496 / 1025, -301 / 82, 2133 / 4100, 45 / 82, 45 / 164, 18 / 41],
    [3 / 205, 0.0, 0.0, 0.0, 0.0, -6 / 41, -3 / 205, -3 / 41, 3 / 41, 6 / 41, 0.0],
    [-1777 / 4100, 0.0, 0.0, -341 / 164, 4496 / 1025, -289 / 82, 2193 / 4100, 51 / 82, 33 / 164, 12 / 41, 0.0, 1.0],
]
_B8 = np.array(
    [0.0, 0.0, 0.0, 0.0, 0.0, 34 / 105, 9 / 35, 9 / 35, 9 / 280, 9 / 280, 0.0, 41 / 840, 41 / 840]
)
_ERRW = 41 / 840
_A_NP = [np.array(row) for row in _A]


def _sqrtm1(x2):
    """sqrt(1 + x2) - 1 without cancellation for small x2 >= 0."""
    return x2 / (1.0 + np.sqrt(1.0 + x2))


def rhs(system, dpar, ipar, tab, y):
    out = np.empty_like(y)
    if system in (1, 2, 3, 4):
        n = y.size // 2
        phi = y[:n]
        out[:n] = y[n:]
        s = dpar
        if system == 1:
            bend = 1.0 + float(np.dot(s * phi, phi))
            out[n:] = -bend * s * phi
        elif system == 2:
            out[n:] = -s * phi - float(np.dot(phi, phi)) * phi
        elif system == 3:
            dphi = tab @ phi
            out[n:] = -s * phi - float(np.dot(phi, dphi)) * dphi
        else:
            q = ipar[1]
            u = tab[:q] @ phi
            out[n:] = -s * phi - tab[q:].T @ (u * u * u)
        return out
    if system in (5, 6):
        l4, k2, a2 = dpar[0], dpar[1], dpar[2]
        w, wd, z, zd = y
        cross = 1.0 + 2.0 * a2
        wdd = -l4 * w - cross * z * z * w - w**3
        zdd = -k2 * z - cross * w * w * z - z**3
        if system == 6:
            sig = dpar[3]
            if sig != 0.0:
                ev, hv, wq = tab
                up = sig * (w * ev + z * hv)
                um = sig * (w * ev - z * hv)
                sp = np.sqrt(1.0 + up * up)
                sm = np.sqrt(1.0 + um * um)
                gamma = float(np.dot((_sqrtm1(up * up) + _sqrtm1(um * um)) * ev, wq))
                xi = float(np.dot(sig * sig * 4.0 * w * z * ev * hv / (sp + sm) * hv, wq))
                wdd += -2.0 * sig * w - gamma
                zdd += -2.0 * sig * z - xi
        out[0], out[1], out[2], out[3] = wd, wdd, zd, zdd
        return out
    if system == 7:
        g2 = dpar[0]
        f, fd = y[0], y[1]
        out[0], out[1] = fd, -f - f**3
        pot = g2 * (1.0 + f * f)
        out[2], out[3] = y[3], -pot * y[2]
        out[4], out[5] = y[5], -pot * y[4]
        return out
    if system == 8:
        l4, c3, q0, cq = dpar
        w, wd = y[0], y[1]
        out[0], out[1] = wd, -l4 * w - c3 * w**3
        pot = q0 + cq * w * w
        out[2], out[3] = y[3], -pot * y[2]
        out[4], out[5] = y[5], -pot * y[4]
        return out
    if system == 9:
        l4, k2, a2, sig = dpar
        w, wd = y[0], y[1]
        wdd = -(l4 + 2.0 * sig) * w - w**3
        pot = k2 + 2.0 * sig + (1.0 + 2.0 * a2) * w * w
        if sig != 0.0:
            ev, hv, wq = tab
            x2 = (sig * w * ev) ** 2
            psi = 2.0 * float(np.dot(_sqrtm1(x2) * ev, wq))
            bw = float(np.dot(ev * hv * hv * w / np.sqrt(1.0 + x2), wq))
            wdd -= psi
            pot += 2.0 * sig * sig * bw
        out[0], out[1] = wd, wdd
        out[2], out[3] = y[3], -pot * y[2]
        out[4], out[5] = y[5], -pot * y[4]
        return out
    raise ValueError(f"unknown system id {system}")


def integrate(system, dpar, ipar, tab, y0, ts, rtol=1e-10, atol=1e-12):
    """Integrate to every time in ``ts``; row i of the result is y(ts[i])."""
    dpar = np.ascontiguousarray(dpar, dtype=float)
    ipar = np.ascontiguousarray(ipar, dtype=np.int64)
    tab = np.ascontiguousarray(tab, dtype=float)
    y0 = np.ascontiguousarray(y0, dtype=float)
    ts = np.ascontiguousarray(ts, dtype=float)
    n = y0.size
    out = np.empty((ts.size, n))
    out[0] = y0
    y = y0.copy()
    t = ts[0]
    h = min(1e-3, ts[-1] - ts[0]) if ts.size > 1 else 1e-3
    k = np.empty((13, n))
    with np.errstate(over="ignore", invalid="ignore"):
        for isamp in range(1, ts.size):
            target = ts[isamp]
            while t < target - 1e-13:
                hstep = min(h, target - t)
                k[0] = rhs(system, dpar, ipar, tab, y)
                for i in range(1, 13):
                    acc = y + hstep * (_A_NP[i] @ k[:i])
                    k[i] = rhs(system, dpar, ipar, tab, acc)
                ynew = y + hstep * (_B8 @ k)
                errvec = _ERRW * hstep * (k[0] + k[10] - k[11] - k[12])
                sc = atol + rtol * np.maximum(np.abs(y), np.abs(ynew))
                err = float(np.sqrt(np.mean((errvec / sc) ** 2)))
                if not np.isfinite(err):
                    err = np.inf
                if err <= 1.0:
                    t = t + hstep
                    y = ynew
                    fac = 0.9 * err ** (-0.125) if err > 0 else 5.0
                    h = hstep * min(5.0, max(0.2, fac))
                else:
                    h = hstep * max(0.2, 0.9 * err ** (-0.125))
                    if h < 1e-12:
                        raise BudgetExceeded("step size underflow in the integrator")
            out[isamp] = y
            t = target
    return out
