"""A beam mode coupled to a torsional mode through cables and hangers.

The deck is modeled as a degenerate plate: vertical displacement u plus a
rotation angle theta of the cross sections, pinned at the ends and at the
piers.  Restricting to one longitudinal eigenfunction e (amplitude w) and
one torsional eigenfunction h (amplitude z) gives a two-degree system

    w'' + (lam^4 + 2s) w + (1 + 2A^2) z^2 w + w^3 + Gamma(w, z) = 0
    z'' + (kap^2 + 2s) z + (1 + 2A^2) w^2 z + z^3 + Xi(w, z)    = 0

where A is the L2 overlap of e and h, s >= 0 the hanger elasticity, and
Gamma, Xi are hanger-force projections that vanish in the rigid limit
s = 0.  The module provides these functionals, the period of the pure
vertical motion, the twist linearization (a Hill equation), and the
linear and ramp-detected amplitude thresholds of torsional instability.
"""

import math
from dataclasses import dataclass
from multiprocessing import Pool

import numpy as np

from . import backends, hill
from .beam import beam_spectrum
from .errors import ConfigError, RootNotBracketed
from .galerkin import _level_scan, _worker_count
from .quadrature import panel_rule, span_grid
from .torsion import coupling, torsion_spectrum

_NO_TAB = np.zeros((1, 1))
_NO_IP = np.array([0], dtype=np.int64)


def _sqrtm1(x2):
    """sqrt(1 + x2) - 1, stable for small x2 >= 0."""
    return x2 / (1.0 + np.sqrt(1.0 + x2))


@dataclass(frozen=True)
class HangerModel:
    """Hanger restoring law; elasticity 0 is the rigid (cables-only) case."""

    elasticity: float = 0.0

    def __post_init__(self):
        if self.elasticity < 0.0:
            raise ConfigError("hanger elasticity must be nonnegative")

    def force(self, s):
        """Slightly superlinear spring when extended, gravity when slack."""
        sig = self.elasticity
        if sig == 0.0:
            return np.zeros_like(np.asarray(s, dtype=float))
        s = np.asarray(s, dtype=float)
        return sig * s + _sqrtm1(sig * sig * s * s)

    def potential(self, s):
        """Antiderivative of force, zero at rest."""
        sig = self.elasticity
        s = np.asarray(s, dtype=float)
        if sig == 0.0:
            return np.zeros_like(s)
        x = sig * s
        small = np.abs(x) < 1e-4
        out = np.empty_like(s)
        xs = x[small]
        ss = s[small]
        # series keeps the rigid limit smooth where arcsinh(x)/sig cancels
        out[small] = 0.5 * (sig * ss * ss + xs * xs * ss / 3.0
                            - xs ** 4 * ss / 10.0)
        xb = x[~small]
        sb = s[~small]
        out[~small] = 0.5 * (sig * sb * sb - 2.0 * sb
                             + sb * np.sqrt(1.0 + xb * xb)
                             + np.arcsinh(xb) / sig)
        return out


class ModePair:
    """Assembled (longitudinal, torsional) couple at one pier position."""

    def __init__(self, a, seed=0, twist_index=1, hanger=None,
                 grid_order=12, max_len=0.18):
        self.a = a
        self.seed = seed
        self.hanger = hanger if hanger is not None else HangerModel()
        self.beam = beam_spectrum(a, seed + 1)[seed]
        self.twist = torsion_spectrum(a, twist_index + 1)[twist_index]
        self.lam4 = self.beam.mu
        self.kap2 = float(self.twist.mu)
        amp = coupling(self.beam, self.twist)
        self.a2 = amp * amp
        xs, ws = span_grid(a, order=grid_order, max_len=max_len)
        self.xs = xs
        self.tab = np.vstack([self.beam.profile(xs), self.twist.profile(xs),
                              ws])

    @property
    def elasticity(self):
        return self.hanger.elasticity


def hanger_forces(pair, w, z):
    """Projections (on e and on h) of the net hanger force at state (w, z).

    Identically zero for a rigid model or an odd longitudinal eigenfunction.
    """
    sig = pair.elasticity
    if sig == 0.0:
        return 0.0, 0.0
    ev, hv, wq = pair.tab
    up = sig * (w * ev + z * hv)
    um = sig * (w * ev - z * hv)
    gamma = float(np.dot((_sqrtm1(up * up) + _sqrtm1(um * um)) * ev, wq))
    xi = float(np.dot((np.sqrt(1.0 + up * up) - np.sqrt(1.0 + um * um)) * hv,
                      wq))
    return gamma, xi


def carrier_hanger_force(pair, w):
    """Hanger force projection on the pure vertical motion (z = 0)."""
    sig = pair.elasticity
    if sig == 0.0:
        return np.zeros_like(np.asarray(w, dtype=float))
    w = np.asarray(w, dtype=float)
    ev, hv, wq = pair.tab
    x2 = (sig * np.multiply.outer(w, ev)) ** 2
    return 2.0 * (_sqrtm1(x2) * ev) @ wq


def twist_hanger_gain(pair, w):
    """Linearized twist feedback of the hangers on a vertical state w."""
    sig = pair.elasticity
    w = np.asarray(w, dtype=float)
    ev, hv, wq = pair.tab
    x2 = (sig * np.multiply.outer(w, ev)) ** 2
    core = (ev * hv * hv / np.sqrt(1.0 + x2)) @ wq
    return w * core


def restoring(pair, s):
    """Force on the pure vertical amplitude: strictly increasing in s."""
    sig = pair.elasticity
    s = np.asarray(s, dtype=float)
    return (pair.lam4 + 2.0 * sig) * s + s ** 3 + carrier_hanger_force(pair, s)


def potential(pair, s):
    """Antiderivative of restoring, zero at the origin."""
    sig = pair.elasticity
    s = np.asarray(s, dtype=float)
    base = 0.5 * (pair.lam4 + 2.0 * sig) * s * s + 0.25 * s ** 4
    if sig == 0.0:
        return base
    ev, hv, wq = pair.tab
    c = sig * ev
    x = np.multiply.outer(s, c)
    small = np.abs(x) < 1e-4
    inner = np.empty_like(x)
    sgrid = np.broadcast_to(np.expand_dims(s, -1), x.shape)
    cg = np.broadcast_to(c, x.shape)
    xs = x[small]
    inner[small] = xs * xs * sgrid[small] / 6.0 - xs ** 4 * sgrid[small] / 40.0
    xb = x[~small]
    inner[~small] = (sgrid[~small] * (np.sqrt(1.0 + xb * xb) - 2.0) / 2.0
                     + np.arcsinh(xb) / (2.0 * cg[~small]))
    return base + 2.0 * (inner * ev) @ wq


def slack_period(pair, delta):
    """Period of the vertical motion started from rest at amplitude delta.

    The turning points are delta and the unique negative level-match of the
    potential; the quarter integrals are desingularized by s = end -+ u^2.
    """
    if delta <= 0.0:
        raise ConfigError("amplitude must be positive")
    if pair.elasticity == 0.0:
        return hill.carrier_period(delta, pair.lam4, 1.0)
    g_top = float(potential(pair, delta))
    lo, hi = -delta - 1.0, 0.0
    while float(potential(pair, lo)) < g_top:
        lo -= max(1.0, abs(lo))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(potential(pair, mid)) > g_top:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, abs(lo)):
            break
    gamma = 0.5 * (lo + hi)

    def quarter(end):
        us, ws = panel_rule(0.0, math.sqrt(abs(end)), order=12, max_len=0.1)
        svals = end - np.sign(end) * us * us
        diff = np.maximum(g_top - potential(pair, svals), 1e-300)
        return float(np.dot(2.0 * us / np.sqrt(diff), ws))

    return math.sqrt(2.0) * (quarter(delta) + quarter(gamma))


def rest_energy(pair, delta):
    """Conserved energy of the vertical state released from rest at delta."""
    return float(potential(pair, delta))


def trajectory(pair, y0, ts, rtol=1e-10, atol=1e-12):
    """Integrate the two-mode system; rows are [w, wdot, z, zdot]."""
    sig = pair.elasticity
    if sig == 0.0:
        dpar = np.array([pair.lam4, pair.kap2, pair.a2])
        return backends.integrate(5, dpar, _NO_IP, _NO_TAB, y0, ts,
                                  rtol=rtol, atol=atol)
    dpar = np.array([pair.lam4, pair.kap2, pair.a2, sig])
    return backends.integrate(6, dpar, _NO_IP, pair.tab, y0, ts,
                              rtol=rtol, atol=atol)


def hill_sigma(pair, delta):
    """Period of the twist-equation coefficient on the vertical carrier.

    Rigid hangers: the coefficient is built from w^2, period half the
    carrier's.  Slackening: the gain term is odd in w for even e, so only
    the full period survives; for odd e the gain vanishes and the half
    period returns.
    """
    if pair.elasticity == 0.0:
        return hill.pair_period(delta, pair.lam4)
    full = slack_period(pair, delta)
    return 0.5 * full if pair.beam.parity == "odd" else full


def twist_monodromy(pair, delta, rtol=1e-10, atol=1e-12):
    """Floquet data of the twist linearization at carrier amplitude delta."""
    return hill.torsional_monodromy(pair.lam4, pair.kap2, pair.a2,
                                    pair.elasticity, delta, tab=pair.tab,
                                    sigma=hill_sigma(pair, delta),
                                    rtol=rtol, atol=atol)


def zhukovskii_stable(pair, delta):
    """Period test for twist stability of the rigid pair: sufficient only."""
    if pair.elasticity != 0.0:
        raise ConfigError("period test applies to rigid hangers only")
    t = hill.pair_period(delta, pair.lam4)
    return t * t * (pair.kap2 + (1.0 + 2.0 * pair.a2) * delta * delta) \
        <= math.pi * math.pi


def zhukovskii_bound(pair):
    """Amplitude below which the period test certifies twist stability."""
    gap = pair.lam4 - pair.kap2
    return math.sqrt(0.4 * gap) if gap > 0.0 else 0.0


def linear_amplitude(pair, d_step=0.01, d_max=40.0, refine=1e-6,
                     rtol=1e-9, atol=1e-12):
    """Least amplitude at which the twist linearization loses stability."""
    return hill.first_unstable_delta(
        lambda d: twist_monodromy(pair, d, rtol=rtol, atol=atol),
        d_step=d_step, d_max=d_max, refine=refine)


@dataclass(frozen=True)
class TwistReport:
    """One detected torsional instability."""

    a: float
    elasticity: float
    seed: int
    delta: float
    tau: float
    energy: float
    growth: float


def nonlinear_amplitude(pair, eta=0.1, tol=1e-8, step=0.01, r=0.01,
                        horizon=16.0, en_max=1e4, n_samples=None,
                        rtol=1e-10, atol=1e-12):
    """Ramp the vertical amplitude until the twist seed grows tenfold.

    The detection level starts at r / eta (the twist channel is compared
    with itself, not with the vertical one) and moves exactly as in the
    modal ramp.  Returns a TwistReport or None when en_max stops the ramp.
    """
    if n_samples is None:
        freq = max(math.sqrt(pair.lam4), math.sqrt(pair.kap2))
        n_samples = max(2000, math.ceil(10.0 * horizon * freq / math.pi))
    ts = np.linspace(0.0, horizon, n_samples)
    delta = step * math.floor(r / (eta * eta * step) + 1.0)
    if delta <= r / (eta * eta):
        delta += step
    while True:
        energy = rest_energy(pair, delta)
        if energy > en_max:
            return None
        t_wait = slack_period(pair, delta)
        if 2.0 * t_wait < horizon:
            y0 = np.array([delta, 0.0, r, 0.0])
            traj = trajectory(pair, y0, ts, rtol=rtol, atol=atol)
            hit = _level_scan(ts, np.abs(traj[:, 2:3]), r / eta, eta,
                              t_wait, horizon, tol, 50)
            if hit is not None:
                _, tau = hit
                flo = twist_monodromy(pair, delta)
                return TwistReport(a=pair.a, elasticity=pair.elasticity,
                                   seed=pair.seed, delta=delta, tau=tau,
                                   energy=energy, growth=flo.growth(tau))
        delta += step
        delta = round(delta / step) * step


@dataclass(frozen=True)
class ThresholdRow:
    """Linear and nonlinear thresholds at one (a, elasticity) cell."""

    a: float
    elasticity: float
    delta_lin: float
    energy_lin: float
    lin_seed: int
    report: TwistReport

    @property
    def delta(self):
        return self.report.delta if self.report is not None else math.inf

    @property
    def energy(self):
        return self.report.energy if self.report is not None else math.inf


def torsional_threshold(a, elasticity=0.0, seeds=range(6), twist_index=1,
                        lin_en_max=1e4, **params):
    """Both thresholds at one pier position, minimized over seed modes.

    The linear column takes the smallest unstable amplitude; the nonlinear
    one the smallest ramp-detected energy.  Seeds whose linear scan would
    exceed the energy budget are skipped (they cannot win either column).
    """
    hanger = HangerModel(elasticity)
    best_lin = None
    best_rep = None
    for j in seeds:
        pair = ModePair(a, seed=j, twist_index=twist_index, hanger=hanger)
        d_cap = _budget_amplitude(pair, lin_en_max)
        try:
            d_lin = linear_amplitude(pair, d_max=d_cap)
        except RootNotBracketed:
            d_lin = None
        if d_lin is not None and (best_lin is None or d_lin < best_lin[0]):
            best_lin = (d_lin, rest_energy(pair, d_lin), j)
        rep = nonlinear_amplitude(pair, **params)
        if rep is not None and (best_rep is None
                                or rep.energy < best_rep.energy):
            best_rep = rep
    if best_lin is None:
        raise ConfigError(f"no linearly unstable seed at a={a}")
    return ThresholdRow(a=a, elasticity=elasticity, delta_lin=best_lin[0],
                        energy_lin=best_lin[1], lin_seed=best_lin[2],
                        report=best_rep)


def _budget_amplitude(pair, en_max):
    lo, hi = 0.01, 1.0
    while rest_energy(pair, hi) < en_max:
        hi *= 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if rest_energy(pair, mid) < en_max:
            lo = mid
        else:
            hi = mid
    return hi


def _cell_task(args):
    a, sig, params = args
    return torsional_threshold(a, elasticity=sig, **params)


def threshold_table(a_values, elasticities=(0.0, 0.1, 0.2, 0.5, 1.0),
                    workers=None, **params):
    """Threshold rows over a grid of pier positions and elasticities.

    Cells fan out to a process pool; the returned order is by grid index
    (compound key a then elasticity) regardless of completion order.
    """
    tasks = [(a, sig, params) for a in a_values for sig in elasticities]
    nproc = min(_worker_count(workers), len(tasks))
    if nproc > 1:
        with Pool(processes=nproc) as pool:
            return pool.map(_cell_task, tasks, chunksize=1)
    return [_cell_task(t) for t in tasks]


def multimode_rhs(y, mu, kap2, amat, hanger, beam_tab, twist_tab, weights):
    """Right-hand side of the full truncation, for cross-checks.

    State is [phi (N), psi (K), phidot, psidot] with N longitudinal and K
    torsional amplitudes; amat holds the pairwise overlaps.  The two-mode
    systems are projections of this onto a single couple.
    """
    n = mu.size
    k = kap2.size
    phi = y[:n]
    psi = y[n:n + k]
    out = np.empty_like(y)
    out[:n + k] = y[n + k:]
    square = float(phi @ phi + psi @ psi)
    mixed = float(phi @ (amat @ psi))
    acc_p = -mu * phi - square * phi - 2.0 * mixed * (amat @ psi)
    acc_s = -kap2 * psi - square * psi - 2.0 * mixed * (amat.T @ phi)
    if hanger.elasticity != 0.0:
        uvals = beam_tab @ phi
        tvals = twist_tab @ psi
        fp = hanger.force(uvals + tvals)
        fm = hanger.force(uvals - tvals)
        acc_p = acc_p - beam_tab.T @ (weights * (fp + fm))
        acc_s = acc_s - twist_tab.T @ (weights * (fp - fm))
    out[n + k:n + k + n] = acc_p
    out[n + k + n:] = acc_s
    return out
