"""Equilibrium profiles of the loaded beam resting on two pins.

Solves u'''' + gamma*u = f on (-pi, pi) with hinged ends (u = u'' = 0 at
+-pi) and zero displacement at two interior pins, x = -b*pi and x = a*pi.
The pins need not be symmetric.  The minimizer of

    E(u) = 1/2 int (u''^2 + gamma*u^2) - int f*u

over H^2 functions vanishing at the ends and the pins is C^2 but generically
not C^3: the third derivative jumps across each pin, so distributionally

    u'''' + gamma*u = f + alpha*delta(x - a*pi) + beta*delta(x + b*pi)

and the jump amplitudes alpha, beta are the transverse forces the pins exert.

On each span the solution is a causal kernel convolution from x = -pi (a
particular integral whose value and first three derivatives vanish there)
plus a four-dimensional homogeneous kernel: cubics when gamma = 0, products
of circular and hyperbolic functions at the quarter frequency
nu = (gamma/4)^(1/4) when gamma > 0.  Matching value, slope and curvature at
the pins and imposing the end conditions closes a 12x12 linear system.

The natural comparison profile solves the same equation classically under
the four point constraints alone, dropping the end-moment conditions; it is
admissible for the constrained minimization, so its energy is never below
the pinned minimum.  ``energy_gap`` returns the difference.
"""

import math

import numpy as np

from . import quadrature
from .errors import ConfigError

PI = math.pi


# ---------------------------------------------------------------------------
# homogeneous kernel and particular integral
# ---------------------------------------------------------------------------


class _HomogeneousBasis:
    """Four independent solutions of y'''' + gamma*y = 0, any derivative order."""

    def __init__(self, gamma):
        if gamma < 0:
            raise ConfigError("only nonnegative zero-order coefficients are supported")
        self.gamma = float(gamma)
        self.nu = (gamma / 4.0) ** 0.25 if gamma > 0 else 0.0
        if gamma > 0:
            nu = self.nu
            self._deriv = np.array(
                [
                    [0.0, nu, -nu, 0.0],
                    [nu, 0.0, 0.0, -nu],
                    [nu, 0.0, 0.0, nu],
                    [0.0, nu, nu, 0.0],
                ]
            )

    def eval(self, x, order=0):
        """(4, n) array of basis values; rows are the four kernel functions."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.gamma == 0.0:
            z = np.zeros_like(x)
            o = np.ones_like(x)
            table = {
                0: [o, x, x**2, x**3],
                1: [z, o, 2 * x, 3 * x**2],
                2: [z, z, 2 * o, 6 * x],
                3: [z, z, z, 6 * o],
            }
            rows = table.get(order, [z, z, z, z])
            return np.vstack(rows)
        u = self.nu * x
        raw = np.vstack(
            [
                np.cos(u) * np.cosh(u),
                np.cos(u) * np.sinh(u),
                np.sin(u) * np.cosh(u),
                np.sin(u) * np.sinh(u),
            ]
        )
        if order == 0:
            return raw
        return np.linalg.matrix_power(self._deriv, order) @ raw


def _kernel_derivatives(r, order, gamma, nu):
    """order-th x-derivative of the causal kernel at lag r >= 0.

    The kernel solves the homogeneous equation with unit third derivative
    and vanishing lower ones at r = 0.
    """
    if gamma == 0.0:
        return (r**3 / 6.0, r**2 / 2.0, r, np.ones_like(r))[order]
    u = nu * r
    if order == 0:
        return (np.cosh(u) * np.sin(u) - np.sinh(u) * np.cos(u)) / (4 * nu**3)
    if order == 1:
        return np.sinh(u) * np.sin(u) / (2 * nu**2)
    if order == 2:
        return (np.cosh(u) * np.sin(u) + np.sinh(u) * np.cos(u)) / (2 * nu)
    return np.cosh(u) * np.cos(u)


class _Particular:
    """Convolution of the load with the causal kernel, from the left end."""

    def __init__(self, f, gamma):
        self.f = f
        self.gamma = float(gamma)
        self.nu = (gamma / 4.0) ** 0.25 if gamma > 0 else 0.0

    def eval(self, x, order=0):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x)
        for i, xi in enumerate(x):
            if xi <= -PI + 1e-14:
                continue
            s, w = quadrature.panel_rule(-PI, float(xi), order=12)
            out[i] = float(
                np.dot(_kernel_derivatives(xi - s, order, self.gamma, self.nu) * self.f(s), w)
            )
        return out


# ---------------------------------------------------------------------------
# solution object
# ---------------------------------------------------------------------------


class StationarySolution:
    """Piecewise profile with analytic derivatives up to third order.

    ``alpha`` and ``beta`` are the third-derivative jumps at the right and
    left pin (zero for classical solutions).
    """

    def __init__(self, f, gamma, breaks, coeffs, particular, basis, a=None, b=None):
        self.f = f
        self.gamma = float(gamma)
        self.a = a
        self.b = b
        self._breaks = breaks  # span edges, increasing, first=-pi last=pi
        self._coeffs = coeffs  # (n_spans, 4)
        self._particular = particular
        self._basis = basis
        if len(breaks) == 4:
            ap, bp = breaks[2], breaks[1]
            self.alpha = float(self._jump(ap))
            self.beta = float(self._jump(bp))
        else:
            self.alpha = 0.0
            self.beta = 0.0

    def _jump(self, p):
        i = self._breaks.index(p)
        right = self._coeffs[i] @ self._basis.eval(p, 3)[:, 0]
        left = self._coeffs[i - 1] @ self._basis.eval(p, 3)[:, 0]
        return right - left

    def _span_index(self, x):
        inner = np.asarray(self._breaks[1:-1])
        return np.searchsorted(inner, x, side="right")

    def derivative(self, x, order=0):
        if order > 3:
            raise ValueError("orders above 3 are not representable; use residual()")
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xa = np.atleast_1d(x)
        vals = self._particular.eval(xa, order).copy()
        idx = self._span_index(xa)
        basis_vals = self._basis.eval(xa, order)
        for span in range(len(self._breaks) - 1):
            sel = idx == span
            if np.any(sel):
                vals[sel] += self._coeffs[span] @ basis_vals[:, sel]
        return float(vals[0]) if scalar else vals

    def __call__(self, x):
        return self.derivative(x, 0)

    def residual(self, x, h=0.007):
        """u'''' + gamma*u - f as an a-posteriori check of the profile.

        The fourth derivative comes from a five-point stencil applied to the
        analytic third derivative, so this genuinely differentiates the
        assembled representation instead of echoing the construction.
        Points within 2h of an end or a pin (where u''' jumps) come back as
        nan.
        """
        x = np.asarray(x, dtype=float)
        xa = np.atleast_1d(x).astype(float)
        d3 = lambda t: self.derivative(t, 3)
        d4 = (d3(xa - 2 * h) - 8 * d3(xa - h) + 8 * d3(xa + h) - d3(xa + 2 * h)) / (12 * h)
        out = d4 + self.gamma * self.derivative(xa, 0) - self.f(xa)
        for p in self._breaks:
            out[np.abs(xa - p) < 2 * h] = np.nan
        return float(out[0]) if x.ndim == 0 else out

    def energy(self, order=12):
        """Elastic energy 1/2 int (u''^2 + gamma u^2) - int f u."""
        total = 0.0
        for x0, x1 in zip(self._breaks[:-1], self._breaks[1:]):
            if x1 - x0 < 1e-14:
                continue
            xg, wg = quadrature.panel_rule(x0, x1, order=order)
            u = self.derivative(xg, 0)
            upp = self.derivative(xg, 2)
            dens = 0.5 * (upp**2 + self.gamma * u**2) - self.f(xg) * u
            total += float(np.dot(dens, wg))
        return total


# ---------------------------------------------------------------------------
# solvers
# ---------------------------------------------------------------------------


def _pin_positions(a, b):
    a = float(a)
    b = a if b is None else float(b)
    if not (0.0 < a < 1.0 and 0.0 < b < 1.0):
        raise ConfigError("pin positions must lie strictly inside (0, 1)")
    return a, b


def _row(basis, n_spans, span, p, order):
    row = np.zeros(4 * n_spans)
    row[4 * span : 4 * span + 4] = basis.eval(p, order)[:, 0]
    return row


def pinned_solution(f, a, b=None, gamma=0.0):
    """Energy minimizer among profiles vanishing at ends and pins."""
    a, b = _pin_positions(a, b)
    basis = _HomogeneousBasis(gamma)
    part = _Particular(f, gamma)
    breaks = [-PI, -b * PI, a * PI, PI]
    rows, rhs = [], []

    def point_rows(span, p, orders):
        for order in orders:
            rows.append(_row(basis, 3, span, p, order))
            rhs.append(-part.eval(p, order)[0])

    point_rows(0, -PI, (0, 2))  # hinged left end
    point_rows(0, -b * PI, (0,))  # pin from the left
    point_rows(1, -b * PI, (0,))  # pin from the right
    point_rows(1, a * PI, (0,))
    point_rows(2, a * PI, (0,))
    point_rows(2, PI, (0, 2))  # hinged right end
    for span, p in ((0, -b * PI), (1, a * PI)):
        for order in (1, 2):  # C1 and C2 matching across each pin
            row = _row(basis, 3, span, p, order) - _row(basis, 3, span + 1, p, order)
            rows.append(row)
            rhs.append(0.0)
    coeffs = np.linalg.solve(np.array(rows), np.array(rhs)).reshape(3, 4)
    return StationarySolution(f, gamma, breaks, coeffs, part, basis, a=a, b=b)


def four_point_solution(f, a, b=None, gamma=0.0):
    """Classical solution pinned at the four zeros only (no end moments)."""
    a, b = _pin_positions(a, b)
    basis = _HomogeneousBasis(gamma)
    part = _Particular(f, gamma)
    rows, rhs = [], []
    for p in (-PI, -b * PI, a * PI, PI):
        rows.append(basis.eval(p, 0)[:, 0])
        rhs.append(-part.eval(p, 0)[0])
    c = np.linalg.solve(np.array(rows), np.array(rhs))
    coeffs = np.vstack([c])
    return StationarySolution(f, gamma, [-PI, PI], coeffs, part, basis, a=a, b=b)


def hinged_solution(f, gamma=0.0):
    """Plain hinged beam with no pins at all."""
    basis = _HomogeneousBasis(gamma)
    part = _Particular(f, gamma)
    rows, rhs = [], []
    for p in (-PI, PI):
        for order in (0, 2):
            rows.append(basis.eval(p, order)[:, 0])
            rhs.append(-part.eval(p, order)[0])
    c = np.linalg.solve(np.array(rows), np.array(rhs))
    return StationarySolution(f, gamma, [-PI, PI], np.vstack([c]), part, basis)


def energy_gap(f, a, b=None, gamma=0.0):
    """Energy of the four-point comparison profile above the pinned minimum.

    Nonnegative for every load, since the comparison profile satisfies all
    the constraints of the minimization.
    """
    ub = pinned_solution(f, a, b, gamma)
    uf = four_point_solution(f, a, b, gamma)
    return uf.energy() - ub.energy()
