"""Rotational modes of the deck about its axis, with the same pier layout.

The rotation angle obeys a second-order string-type eigenproblem on
(-pi, pi) with zero conditions at the endpoints and at the piers.  An H^1
function needs only continuity across a pier, so the three spans decouple
completely: every mode is a Dirichlet sine mode of a single span extended by
zero, and the two side spans combine into one odd and one even eigenfunction.

All frequencies are exact rationals once the pier position is rational,

    main span   kappa = k/(2a),   k = 1, 2, ...   (one mode each)
    side spans  kappa = m/(1-a),  m = 1, 2, ...   (an odd and an even mode)

so the whole spectrum is enumerated with Fractions and coincidences between
the two lists give eigenvalues of multiplicity 2 or 3 exactly, never up to a
tolerance.  When frequencies tie, the main-span mode comes first, then the
odd side combination, then the even one.

Squared L2 norms are exact as well: a*pi on the main span, (1-a)*pi for the
side combinations.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import quadrature
from .errors import ConfigError

PI = math.pi

MAIN_SIN = "main-sin"  # sin(kappa x) on the central span, odd
MAIN_COS = "main-cos"  # cos(kappa x) on the central span, even
SIDE_ODD = "side-odd"
SIDE_EVEN = "side-even"


def as_fraction(a):
    """Pier position as an exact Fraction.

    Strings keep their decimal meaning ('0.56' -> 14/25); floats are snapped
    to the simplest nearby rational, which recovers thirds and the like from
    their binary representation.
    """
    if isinstance(a, Fraction):
        frac = a
    elif isinstance(a, str):
        frac = Fraction(a)
    elif isinstance(a, float):
        frac = Fraction(a).limit_denominator(10**6)
    elif isinstance(a, int):
        frac = Fraction(a)
    else:
        raise ConfigError(f"cannot interpret pier position {a!r}")
    if not 0 < frac < 1:
        raise ConfigError(f"pier position must lie in (0, 1), got {frac}")
    return frac


@dataclass
class TorsionMode:
    """One rotational eigenfunction, frequency kappa kept as a Fraction."""

    a: Fraction
    kappa: Fraction
    family: str

    @property
    def mu(self):
        """Exact eigenvalue kappa^2."""
        return self.kappa * self.kappa

    @property
    def parity(self):
        return "odd" if self.family in (MAIN_SIN, SIDE_ODD) else "even"

    @property
    def norm(self):
        frac = self.a if self.family in (MAIN_SIN, MAIN_COS) else 1 - self.a
        return math.sqrt(float(frac) * PI)

    def profile(self, x):
        """L2-normalized values; identically zero off the supporting span."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xa = np.atleast_1d(x).astype(float)
        k = float(self.kappa)
        ap = float(self.a) * PI
        out = np.zeros_like(xa)
        if self.family in (MAIN_SIN, MAIN_COS):
            sel = np.abs(xa) <= ap + 1e-12
            out[sel] = np.sin(k * xa[sel]) if self.family == MAIN_SIN else np.cos(k * xa[sel])
        else:
            right = xa >= ap - 1e-12
            left = xa <= -ap + 1e-12
            out[left] = np.sin(k * (xa[left] + PI))
            if self.family == SIDE_ODD:
                out[right] = np.sin(k * (xa[right] - PI))
            else:
                out[right] = np.sin(k * (PI - xa[right]))
        out /= self.norm
        return float(out[0]) if scalar else out

    __call__ = profile


def torsion_spectrum(a, n_modes=10):
    """First ``n_modes`` rotational modes, sorted by frequency.

    Repeated eigenvalues appear once per eigenfunction, in the tie order
    described in the module docstring.
    """
    a = as_fraction(a)
    modes = []
    k = 1
    m = 1
    # generate well past n_modes entries, then cut after sorting
    while len(modes) < 3 * n_modes + 9:
        kap_main = Fraction(k, 1) / (2 * a)
        kap_side = Fraction(m, 1) / (1 - a)
        if kap_main <= kap_side:
            fam = MAIN_SIN if k % 2 == 0 else MAIN_COS
            modes.append(TorsionMode(a, kap_main, fam))
            k += 1
        else:
            modes.append(TorsionMode(a, kap_side, SIDE_ODD))
            modes.append(TorsionMode(a, kap_side, SIDE_EVEN))
            m += 1
    rank = {MAIN_SIN: 0, MAIN_COS: 0, SIDE_ODD: 1, SIDE_EVEN: 2}
    modes.sort(key=lambda md: (md.kappa, rank[md.family]))
    return modes[:n_modes]


def eigenvalue_multiplicity(a, kappa):
    """Multiplicity of kappa^2 in the rotational spectrum (0 if absent)."""
    a = as_fraction(a)
    kappa = Fraction(kappa)
    mult = 0
    q = kappa * 2 * a
    if q.denominator == 1 and q > 0:
        mult += 1
    q = kappa * (1 - a)
    if q.denominator == 1 and q > 0:
        mult += 2
    return mult


def coupling(beam_mode, torsion_mode, order=12):
    """Overlap integral of a flexural and a rotational mode, both normalized.

    Opposite parities give exactly zero.  The square of this number is what
    weighs the cross term in the two-mode interaction.
    """
    if beam_mode.parity != torsion_mode.parity:
        return 0.0
    a = float(torsion_mode.a)
    if torsion_mode.family in (MAIN_SIN, MAIN_COS):
        x, w = quadrature.panel_rule(-a * PI, a * PI, order=order)
    else:
        xr, wr = quadrature.panel_rule(a * PI, PI, order=order)
        x = np.concatenate([-xr[::-1], xr])
        w = np.concatenate([wr[::-1], wr])
    return float(np.dot(beam_mode.profile(x) * torsion_mode.profile(x), w))
