"""Floquet analysis for modes riding on a periodically flexed carrier.

A single carrier mode of stiffness lam^4 oscillating with amplitude delta
drives linearized companion equations of Hill type.  This module computes
carrier periods in closed form, propagates monodromy matrices with the
shared integrator backends, and extracts linear instability thresholds.

Scaled coordinates: s = delta * lam^2 reduces the cubic carrier to
F'' = -F - F^3 with F(0) = s, and a companion of stiffness rho^4 becomes
xi'' = -gamma^2 (1 + F^2) xi with gamma = rho^2 / lam^2.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ellipk

from . import backends
from .errors import RootNotBracketed
from .quadrature import panel_rule

_NO_TAB = np.zeros((1, 1))
_NO_IP = np.array([0], dtype=np.int64)


def carrier_period(delta, lam4=1.0, c3=1.0):
    """Period of w'' = -lam4 w - c3 w^3 started from rest at amplitude delta."""
    b2 = lam4 + c3 * delta * delta
    m = 0.5 * c3 * delta * delta / b2
    return 4.0 * ellipk(m) / math.sqrt(b2)


def pair_period(delta, lam4=1.0):
    """Period of w^2 for the cubic carrier with unit cubic coefficient.

    This is the natural period of any Hill coefficient built from w^2;
    it equals pi / lam^2 at delta = 0.
    """
    den = 2.0 * (lam4 + delta * delta)
    m = delta * delta / den
    return 2.0 * math.sqrt(2.0) * ellipk(m) / math.sqrt(den)


def scaled_pair_period(s):
    """pair_period in the scaled coordinates (lam4 = 1)."""
    return pair_period(s, 1.0)


def phase_integral(s):
    """Integral of sqrt(1 + F^2) over one period of F^2, scaled carrier."""
    xs, ws = panel_rule(0.0, 0.5 * math.pi, order=12, max_len=0.2)
    sinsq = np.sin(xs) ** 2
    vals = np.sqrt((1.0 + s * s * sinsq) / (2.0 + s * s + s * s * sinsq))
    return 2.0 * math.sqrt(2.0) * float(np.dot(vals, ws))


@dataclass(frozen=True)
class Floquet:
    """Monodromy data of a Hill equation over one coefficient period."""

    trace: float
    det: float
    sigma: float

    @property
    def stable(self):
        return abs(self.trace) <= 2.0

    @property
    def multiplier(self):
        """Largest multiplier magnitude; 1 on the stable side."""
        half = 0.5 * abs(self.trace)
        if half <= 1.0:
            return 1.0
        return half + math.sqrt(half * half - 1.0)

    def growth(self, tau):
        """Amplification factor accumulated over a time window tau."""
        return self.multiplier ** (tau / self.sigma)


def _monodromy(system, dpar, tab, w0, sigma, rtol, atol):
    y0 = np.array([w0, 0.0, 1.0, 0.0, 0.0, 1.0])
    ts = np.array([0.0, sigma])
    out = backends.integrate(system, dpar, _NO_IP, tab, y0, ts,
                             rtol=rtol, atol=atol)
    xi1, xi1d, xi2, xi2d = out[-1, 2], out[-1, 3], out[-1, 4], out[-1, 5]
    return Floquet(trace=xi1 + xi2d, det=xi1 * xi2d - xi1d * xi2, sigma=sigma)


def scaled_monodromy(s, gamma2, rtol=1e-10, atol=1e-12):
    """Monodromy of xi'' = -gamma2 (1 + F^2) xi over one period of F^2."""
    sigma = scaled_pair_period(s)
    return _monodromy(7, np.array([gamma2]), _NO_TAB, s, sigma, rtol, atol)


def carrier_monodromy(lam4, c3, q0, cq, delta, sigma=None, rtol=1e-10, atol=1e-12):
    """Monodromy of xi'' = -(q0 + cq w^2) xi on the cubic carrier w."""
    if sigma is None:
        # the coefficient period is half the carrier period, for c3 = 0 too
        sigma = 0.5 * carrier_period(delta, lam4, c3)
    return _monodromy(8, np.array([lam4, c3, q0, cq]), _NO_TAB, delta, sigma,
                      rtol, atol)


def torsional_monodromy(lam4, kap2, a2, sig, delta, tab=None, sigma=None,
                        rtol=1e-10, atol=1e-12):
    """Monodromy of the twist companion on a (possibly slackening) carrier."""
    if sigma is None:
        if sig != 0.0:
            raise ValueError("sigma must be supplied for a slackening carrier")
        sigma = pair_period(delta, lam4)
    if tab is None:
        tab = _NO_TAB
    return _monodromy(9, np.array([lam4, kap2, a2, sig]), tab, delta, sigma,
                      rtol, atol)


def first_unstable_delta(mono_fn, d_step=0.01, d_max=20.0, refine=1e-10):
    """Smallest amplitude at which mono_fn(delta) loses |trace| <= 2.

    Scans upward from d_step and sharpens the first crossing by bisection.
    Raises RootNotBracketed when the scan exhausts d_max.
    """
    prev = d_step
    prev_val = abs(mono_fn(prev).trace) - 2.0
    if prev_val > 0.0:
        return prev
    d = prev + d_step
    while d <= d_max + 1e-12:
        val = abs(mono_fn(d).trace) - 2.0
        if val > 0.0:
            lo, hi = prev, d
            while hi - lo > refine * max(1.0, hi):
                mid = 0.5 * (lo + hi)
                if abs(mono_fn(mid).trace) - 2.0 > 0.0:
                    hi = mid
                else:
                    lo = mid
            return 0.5 * (lo + hi)
        prev = d
        d += d_step
    raise RootNotBracketed(f"no instability below amplitude {d_max}")


@dataclass(frozen=True)
class CoupleThreshold:
    """First linear instability over a family of mode couples."""

    energy: float
    delta: float
    carrier: int
    probe: int
    ratio: float
    s: float = None


def l2_linear_threshold(mu, n_modes=None):
    """Exact displacement-coupled threshold over all carrier/probe couples.

    For carrier stiffness mu_i and probe stiffness mu_j > mu_i the probe
    turns unstable exactly at carrier amplitude sqrt(2 (mu_j - mu_i)),
    where the carrier energy is (mu_j - mu_i) mu_j.  Returns the couple
    minimizing that energy.
    """
    mu = np.asarray(mu, dtype=float)
    if n_modes is not None:
        mu = mu[:n_modes]
    best = None
    for i in range(mu.size):
        for j in range(i + 1, mu.size):
            gap = mu[j] - mu[i]
            if gap <= 0.0:
                continue
            en = gap * mu[j]
            if best is None or en < best.energy:
                best = CoupleThreshold(energy=en, delta=math.sqrt(2.0 * gap),
                                       carrier=i, probe=j, ratio=mu[j] / mu[i])
    if best is None:
        raise RootNotBracketed("no destabilizable couple in the spectrum")
    return best


def bending_linear_threshold(mu, n_modes=None, d_step=0.005, s_max=4.0,
                             gamma2_max=4.0, rtol=1e-9):
    """Amplitude-stiffened threshold via the scaled stability chart.

    Each couple (carrier i, probe j) maps to the chart point
    gamma^2 = mu_j / mu_i at scaled amplitude s = delta sqrt(mu_i), where
    the carrier energy is s^2/2 + s^4/4.  Only the principal resonance
    region 1 < gamma^2 < gamma2_max is scanned; the higher tongues are
    hairline-thin at these amplitudes and deliberately out of scope.  The
    carrier amplitude runs over a fixed grid of pitch d_step and the first
    unstable grid point is the couple's threshold; the grid pitch is part
    of the definition (no refinement).  Couples are visited
    nearest-resonance first and pruned against the best energy so far.
    """
    mu = np.asarray(mu, dtype=float)
    if n_modes is not None:
        mu = mu[:n_modes]
    n = mu.size

    def energy(s):
        return 0.5 * s * s + 0.25 * s**4

    couples = [(i, j) for i in range(n) for j in range(n)
               if 1.0 < mu[j] / mu[i] < gamma2_max]
    couples.sort(key=lambda ij: mu[ij[1]] / mu[ij[0]])

    best = None
    for i, j in couples:
        g2 = mu[j] / mu[i]
        lam2 = math.sqrt(mu[i])
        k = 1
        while True:
            s = k * d_step * lam2
            if s > s_max or (best is not None and energy(s) >= best.energy):
                break
            if abs(scaled_monodromy(s, g2, rtol=rtol).trace) > 2.0:
                best = CoupleThreshold(energy=energy(s), delta=k * d_step,
                                       carrier=i, probe=j, ratio=g2, s=s)
                break
            k += 1
    if best is None:
        raise RootNotBracketed(f"no instability below scaled amplitude {s_max}")
    return best


def stable_intervals(kmax=6):
    """Large-amplitude limits of the stable gamma^2 bands."""
    return [(k * (2 * k + 1), (k + 1) * (2 * k + 1)) for k in range(kmax)]


def unstable_intervals(kmax=6):
    """Large-amplitude limits of the resonance tongues in gamma^2."""
    return [(k * (2 * k - 1), k * (2 * k + 1)) for k in range(1, kmax + 1)]


def _interval_test(q, logr):
    """Sufficient stability test from coefficient bounds.

    The equation is stable whenever q = int sqrt(p) over one period sits in
    (k pi + logr/2, (k+1) pi - logr/2) for some integer k >= 0; returns True
    in that case and None (inconclusive) otherwise.
    """
    half = 0.5 * logr
    k = int(q // math.pi)
    for kk in (k - 1, k, k + 1):
        if kk < 0:
            continue
        if kk * math.pi + half < q < (kk + 1) * math.pi - half:
            return True
    return None


def scaled_sufficient_stability(s, gamma2):
    """Coefficient-bound test for xi'' = -gamma2 (1 + F^2) xi."""
    q = math.sqrt(gamma2) * phase_integral(s)
    return _interval_test(q, math.log1p(s * s))


def torsional_sufficient_stability(lam4, kap2, a2, delta):
    """Coefficient-bound test for the twist companion on a rigid carrier."""
    cross = 1.0 + 2.0 * a2
    xs, ws = panel_rule(0.0, 0.5 * math.pi, order=12, max_len=0.2)
    sinsq = np.sin(xs) ** 2
    num = kap2 + cross * delta * delta * sinsq
    den = 2.0 * lam4 + delta * delta + delta * delta * sinsq
    q = 2.0 * math.sqrt(2.0) * float(np.dot(np.sqrt(num / den), ws))
    return _interval_test(q, math.log1p(cross * delta * delta / kap2))
