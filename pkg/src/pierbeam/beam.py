"""Vibrating modes of a hinged beam with two symmetric interior piers.

The beam occupies I = (-pi, pi), is hinged at both endpoints (u = u'' = 0)
and rests on zero-displacement supports ("piers") at x = -a*pi and x = a*pi,
0 < a < 1.  The modes are the weak eigenfunctions of e'''' = lam^4 e in the
space of H^2 functions vanishing at the endpoints and at the piers; they are
C^2 but generically not C^3 across the piers.

With symmetric piers the problem splits by parity.  Odd eigenvalues solve

    sin(lam*pi) sinh(lam*a*pi) sinh(lam*(1-a)*pi)
        = sinh(lam*pi) sin(lam*a*pi) sin(lam*(1-a)*pi)

and even ones

    cos(lam*pi) cosh(lam*a*pi) sinh(lam*(1-a)*pi)
        = cosh(lam*pi) cos(lam*a*pi) sin(lam*(1-a)*pi).

Both are rescaled here by the (positive) product of the hyperbolic factors,
which turns them into bounded, well-conditioned functions of lam whose roots
can be bracketed on a fixed-step scan.

Every mode is L2-normalized and signed so that it is positive at x = 0 when
even and increasing at x = 0 when odd.  A mode whose frequency makes both
trigonometric factors vanish at once is globally analytic (a plain sine or
cosine); all other modes carry hyperbolic corrections on each span.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import quadrature
from .errors import RootNotBracketed

PI = math.pi

# ---------------------------------------------------------------------------
# characteristic functions
# ---------------------------------------------------------------------------


def _sn(s):
    # sin(pi s)/sinh(pi s), the decaying oscillation that controls everything
    s = np.asarray(s, dtype=float)
    return np.sin(PI * s) / np.sinh(PI * s)


def _cs(s):
    s = np.asarray(s, dtype=float)
    return np.cos(PI * s) / np.cosh(PI * s)


def char_odd(lam, a):
    """Scaled characteristic function of the odd modes (roots = odd spectrum)."""
    lam = np.asarray(lam, dtype=float)
    return _sn(lam) - _sn(lam * a) * _sn(lam * (1.0 - a))


def char_even(lam, a):
    """Scaled characteristic function of the even modes."""
    lam = np.asarray(lam, dtype=float)
    return _cs(lam) - _cs(lam * a) * _sn(lam * (1.0 - a))


def g_fn(s):
    """sin(pi s)/sinh(pi s) - cos(pi s)/cosh(pi s); zero iff tan = tanh."""
    return _sn(s) - _cs(s)


def h_fn(s):
    """sin(pi s)/sinh(pi s) + cos(pi s)/cosh(pi s); zero iff tan = -tanh."""
    return _sn(s) + _cs(s)


def g_root(n):
    """n-th positive root of g, close to n + 5/4."""
    return brentq(g_fn, n + 1.05, n + 1.45, xtol=1e-14)


def h_root(n):
    """n-th positive root of h, close to n + 3/4."""
    return brentq(h_fn, n + 0.55, n + 0.95, xtol=1e-14)


def scan_roots(fn, lo, hi, step=2e-3, rescue_tol=1e-6):
    """All roots of ``fn`` in (lo, hi) by scan + Brent refinement.

    Tangential near-roots (scan minima of |fn| below ``rescue_tol`` without a
    sign change) are polished by a local golden search and accepted when the
    residual drops below 1e-10.  These occur only at isolated geometries
    where two branches of the same parity touch.
    """
    xs = np.arange(lo, hi + step, step)
    fs = np.asarray(fn(xs), dtype=float)
    roots = []
    sign = np.sign(fs)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        roots.append(brentq(fn, xs[i], xs[i + 1], xtol=1e-14, rtol=8.9e-16))
    absf = np.abs(fs)
    for i in range(1, len(xs) - 1):
        if sign[i - 1] * sign[i] > 0 and sign[i] * sign[i + 1] > 0:
            if absf[i] < rescue_tol and absf[i] <= absf[i - 1] and absf[i] <= absf[i + 1]:
                from scipy.optimize import minimize_scalar

                res = minimize_scalar(
                    lambda t: float(fn(t)) ** 2, bounds=(xs[i - 1], xs[i + 1]), method="bounded"
                )
                if abs(float(fn(res.x))) < 1e-10:
                    roots.append(float(res.x))
    roots.sort()
    out = []
    for r in roots:
        if not out or r - out[-1] > 1e-10:
            out.append(r)
    return out


# ---------------------------------------------------------------------------
# modes
# ---------------------------------------------------------------------------

_INT_TOL = 1e-6  # snapping tolerance for the analytic families


def _is_near_int(x):
    return abs(x - round(x)) < _INT_TOL


@dataclass
class BeamMode:
    """One eigenfunction of the two-pier beam.

    Evaluation goes through a per-span representation
    c0*sin + c1*cos + c2*sinh + c3*cosh of argument lam*(x - shift), stored
    for x >= 0 only; the parity extension fills in the negative half.
    """

    a: float
    lam: float
    parity: str  # 'odd' or 'even'
    smooth: bool
    _spans: list = field(repr=False, default_factory=list)  # (x0, x1, shift, coeffs)
    _scale: float = field(repr=False, default=1.0)

    @property
    def mu(self):
        return self.lam**4

    # -- construction -------------------------------------------------------

    @classmethod
    def build(cls, a, lam, parity, grid_order=12):
        if a is None:
            return cls._build_free(lam, parity, grid_order)
        lam_a = lam * a
        lam_s = lam * (1.0 - a)
        if parity == "odd":
            smooth = _is_near_int(lam) and _is_near_int(lam_a)
        else:
            smooth = _is_near_int(lam - 0.5) and _is_near_int(lam_a - 0.5)
        spans = []
        if smooth:
            lam = float(round(lam)) if parity == "odd" else round(lam - 0.5) + 0.5
            coeffs = (1.0, 0.0, 0.0, 0.0) if parity == "odd" else (0.0, 1.0, 0.0, 0.0)
            spans.append((0.0, a * PI, 0.0, coeffs))
            spans.append((a * PI, PI, 0.0, coeffs))
        elif parity == "odd":
            k1 = math.sinh(lam_s * PI) / math.sinh(lam_a * PI)
            spans.append(
                (0.0, a * PI, 0.0, (k1 * math.sinh(lam_a * PI), 0.0, -k1 * math.sin(lam_a * PI), 0.0))
            )
            k2 = math.sin(lam_a * PI) / math.sin(lam_s * PI)
            spans.append(
                (a * PI, PI, PI, (-k2 * math.sinh(lam_s * PI), 0.0, k2 * math.sin(lam_s * PI), 0.0))
            )
        else:
            k1 = math.sinh(lam_s * PI) / math.cosh(lam_a * PI)
            spans.append(
                (0.0, a * PI, 0.0, (0.0, k1 * math.cosh(lam_a * PI), 0.0, -k1 * math.cos(lam_a * PI)))
            )
            k2 = math.cos(lam_a * PI) / math.sin(lam_s * PI)
            spans.append(
                (a * PI, PI, PI, (-k2 * math.sinh(lam_s * PI), 0.0, k2 * math.sin(lam_s * PI), 0.0))
            )
        mode = cls(a=a, lam=float(lam), parity=parity, smooth=smooth, _spans=spans)
        mode._normalize(grid_order)
        return mode

    @classmethod
    def _build_free(cls, lam, parity, grid_order=12):
        # pier-free hinged beam: lam = k/2, plain sine/cosine
        coeffs = (1.0, 0.0, 0.0, 0.0) if parity == "odd" else (0.0, 1.0, 0.0, 0.0)
        mode = cls(
            a=None, lam=float(lam), parity=parity, smooth=True, _spans=[(0.0, PI, 0.0, coeffs)]
        )
        mode._normalize(grid_order)
        return mode

    def _normalize(self, grid_order):
        x, w = quadrature.span_grid(self.a, order=grid_order)
        v = self._eval(x, 0)
        nrm = math.sqrt(float(np.dot(v * v, w)))
        self._scale = 1.0 / nrm

    # -- evaluation ----------------------------------------------------------

    def _eval_halfline(self, xa, order):
        # xa >= 0 assumed
        out = np.zeros_like(xa)
        for x0, x1, shift, coeffs in self._spans:
            c = np.array(coeffs, dtype=float)
            for _ in range(order):
                c = self.lam * np.array([-c[1], c[0], c[3], c[2]])
            sel = (xa >= x0 - 1e-12) & (xa <= x1 + 1e-12)
            u = self.lam * (xa[sel] - shift)
            out[sel] = c[0] * np.sin(u) + c[1] * np.cos(u) + c[2] * np.sinh(u) + c[3] * np.cosh(u)
        return out

    def _eval(self, x, order):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xa = np.atleast_1d(x)
        vals = self._eval_halfline(np.abs(xa), order)
        # parity of the order-th derivative as a function of x
        odd_fn = (self.parity == "odd") == (order % 2 == 0)
        if odd_fn:
            vals = vals * np.sign(xa)
        return float(vals[0]) if scalar else vals

    def profile(self, x):
        """Mode values, L2-normalized."""
        return self._scale * self._eval(x, 0)

    def derivative(self, x, order=1):
        return self._scale * self._eval(x, order)

    __call__ = profile

    def upsilon(self, grid_order=12):
        """Slope norm ||e'||, at most lam with equality on the smooth families."""
        x, w = quadrature.span_grid(self.a, order=grid_order)
        d = self.derivative(x)
        return math.sqrt(float(np.dot(d * d, w)))

    # -- nodal structure -----------------------------------------------------

    def zero_counts(self, tol=1e-9):
        """(zeros in side span, zeros in main span, pier tangencies).

        Counts are open-interval counts per span; a tangency is a double zero
        sitting exactly on a pier, which happens iff the mode restricted to
        the main span is clamped there (g or h vanishes at lam*a) and,
        equivalently along the characteristic curve, the side restriction is
        clamped as well (g vanishes at lam*(1-a)).
        """
        if self.a is None:
            # plain hinged beam: k/2 -> k-1 interior zeros, no piers
            return 0, int(round(2 * self.lam)) - 1, 0
        lam, a = self.lam, self.a
        L = lam * a
        S = lam * (1.0 - a)
        g_main = float(g_fn(L))
        h_main = float(h_fn(L))
        g_side = float(g_fn(S))
        main_sw = g_main if self.parity == "odd" else h_main
        degenerate = (abs(main_sw) <= tol) or (abs(g_side) <= tol)

        if self.parity == "odd":
            k = math.floor(L - 0.5) if L > 0.5 else 0
            lo, hi = 2 * k + 1, 2 * k + 3
            take_hi = (g_main > 0) if k % 2 == 1 else (g_main < 0)
        else:
            k = math.floor(L) if L > 0 else 0
            lo, hi = 2 * k, 2 * k + 2
            take_hi = (h_main > 0) if k % 2 == 1 else (h_main < 0)
        main = lo if degenerate else (hi if take_hi else lo)

        r = math.floor(S - 0.5) if S > 0.5 else 0
        side_hi = (g_side > 0) if r % 2 == 1 else (g_side < 0)
        side = r if degenerate else (r + 1 if side_hi else r)

        tang = 2 if degenerate else 0
        return side, main, tang

    def index(self, tol=1e-9):
        """Total nodal index: interior zeros plus one per pier tangency."""
        side, main, tang = self.zero_counts(tol)
        return 2 * side + main + tang


# ---------------------------------------------------------------------------
# spectrum enumeration
# ---------------------------------------------------------------------------


def beam_spectrum(a, n_modes=12, lam_hi=None):
    """First ``n_modes`` modes of the two-pier beam at pier position ``a``.

    Parameters
    ----------
    a : float or None
        Pier position as a fraction of the half-length; ``None`` removes the
        piers (plain hinged beam, lam = k/2).
    n_modes : int
        How many modes, sorted by frequency.

    Returns
    -------
    list of BeamMode
    """
    if a is None:
        modes = []
        for k in range(1, n_modes + 1):
            parity = "even" if k % 2 == 1 else "odd"
            modes.append(BeamMode._build_free(k / 2.0, parity))
        return modes
    a = float(a)
    if not 0.0 < a < 1.0:
        raise ValueError("pier position must satisfy 0 < a < 1")
    hi = lam_hi or (2.0 + 0.75 * n_modes)
    for _ in range(6):
        odd = scan_roots(lambda s: char_odd(s, a), 0.45, hi)
        even = scan_roots(lambda s: char_even(s, a), 0.45, hi)
        if len(odd) + len(even) >= n_modes:
            break
        hi += 2.0
    else:
        raise RootNotBracketed("could not collect %d beam modes below lam=%g" % (n_modes, hi))
    tagged = [(lam, "odd") for lam in odd] + [(lam, "even") for lam in even]
    tagged.sort()
    return [BeamMode.build(a, lam, parity) for lam, parity in tagged[:n_modes]]


def spectrum_table(a, n_modes=12):
    """Eigenvalues lam^4 of the first ``n_modes`` modes."""
    return [m.mu for m in beam_spectrum(a, n_modes)]


def positive_mode_position():
    """Pier position where the third mode loses all interior zeros.

    At this geometry the third mode touches both piers tangentially and is
    one-signed: the main-span restriction is a clamped-clamped mode and each
    side-span restriction a clamped-hinged one, which pins down both span
    lengths up to the common frequency.
    """
    lam_main = h_root(0)  # clamped-clamped even mode, per unit half-span
    lam_side = g_root(0)  # clamped-hinged mode, per unit span
    lam = lam_main + lam_side
    return lam_main / lam, lam
