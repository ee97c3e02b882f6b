"""Modal truncations of the nonlinear beam equations and threshold ramps.

The displacement is expanded over the first N eigenfunctions of the pier
problem and the PDE collapses to N coupled oscillators.  Four nonlinear
couplings are supported, one active per run:

  bending     phi_n'' = -(1 + g sum s phi^2) s_n phi_n      (nonlocal, curvature)
  l2          phi_n'' = -s_n phi_n - g (sum phi^2) phi_n    (nonlocal, displacement)
  stretching  phi_n'' = -s_n phi_n - g (phi' gram) ...      (nonlocal, slope)
  cubic       phi_n'' = -s_n phi_n - (u^3 projected)        (local restoring)
  linear      phi_n'' = -(s_n + g) phi_n                    (control case)

A prevailing-mode state (one large amplitude, residual seeds elsewhere)
is integrated over a fixed horizon; a residual mode that rises past a
moving threshold while multiplying tenfold in the second half-window
marks the seed amplitude as unstable.  Ramping the amplitude from below
yields per-seed threshold energies and their minimum over seeds.
"""

import math
import os
from dataclasses import dataclass
from multiprocessing import Pool

import numpy as np

from . import backends
from .beam import beam_spectrum
from .errors import ConfigError
from .hill import carrier_monodromy, carrier_period
from .quadrature import span_grid

VARIANTS = ("bending", "l2", "stretching", "cubic", "linear")

_NO_TAB = np.zeros((1, 1))
_NO_IP = np.array([0], dtype=np.int64)


@dataclass(frozen=True)
class NonlinearityKind:
    """Which nonlinear coupling is active, with its coefficient."""

    variant: str
    coefficient: float = 1.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.coefficient < 0.0:
            raise ConfigError("the coupling coefficient must be nonnegative")
        if self.variant == "cubic" and self.coefficient != 1.0:
            raise ConfigError("the local cubic coupling is not tunable")


class ModalBasis:
    """Sampled eigenfunctions and the coupling tensors of a truncation."""

    def __init__(self, a, n_modes=12, grid_order=12, max_len=0.18):
        self.a = a
        self.modes = beam_spectrum(a, n_modes)
        self.n = n_modes
        self.mu = np.array([m.mu for m in self.modes])
        self.lam2 = np.sqrt(self.mu)
        xs, ws = span_grid(a, order=grid_order, max_len=max_len)
        self.xs = xs
        self.ws = ws
        self.emat = np.column_stack([m.profile(xs) for m in self.modes])
        dmat = np.column_stack([m.derivative(xs) for m in self.modes])
        gram = (dmat * ws[:, None]).T @ dmat
        self.slope_gram = 0.5 * (gram + gram.T)
        self.upsilon = np.sqrt(np.diag(self.slope_gram))
        ew = self.emat * ws[:, None]
        quartic = np.einsum("qi,qj,qk,ql->ijkl", ew, self.emat, self.emat,
                            self.emat, optimize=True)
        # symmetrize: quadrature error breaks the exact index symmetry slightly
        quartic = (quartic + quartic.transpose(1, 0, 2, 3)) / 2.0
        quartic = (quartic + quartic.transpose(0, 1, 3, 2)) / 2.0
        quartic = (quartic + quartic.transpose(2, 3, 0, 1)) / 2.0
        self.quartic = quartic

    @property
    def quartic_diag(self):
        """A_n = int e_n^4."""
        n = np.arange(self.n)
        return self.quartic[n, n, n, n]

    def cubic_one(self, n, m):
        """3 int e_n^3 e_m."""
        return 3.0 * self.quartic[n, n, n, m]

    def cubic_two(self, n, m, p):
        """3 int e_n^2 e_m e_p."""
        return 3.0 * self.quartic[n, n, m, p]


def duffing_coefficient(basis, kind):
    """Per-mode cubic coefficient of the single-mode reduction."""
    g = kind.coefficient
    if kind.variant == "bending":
        return g * basis.mu**2
    if kind.variant == "l2":
        return g * np.ones(basis.n)
    if kind.variant == "stretching":
        return g * np.diag(basis.slope_gram) ** 2
    if kind.variant == "cubic":
        return basis.quartic_diag.copy()
    return np.zeros(basis.n)


def seed_energy(basis, kind, j, delta):
    """Energy of the pure single-mode reference at amplitude delta."""
    mu = basis.mu[j]
    if kind.variant == "linear":
        return 0.5 * (mu + kind.coefficient) * delta * delta
    c = duffing_coefficient(basis, kind)[j]
    return 0.5 * mu * delta * delta + 0.25 * c * delta**4


def wagner_time(basis, kind, j, delta):
    """Period of the single-mode reference oscillation at amplitude delta."""
    c = 0.0 if kind.variant == "linear" else duffing_coefficient(basis, kind)[j]
    mu = basis.mu[j] + (kind.coefficient if kind.variant == "linear" else 0.0)
    return carrier_period(delta, mu, c)


def _system_spec(basis, kind):
    """(system id, dpar, ipar, tab, state scale) for the backends."""
    g = kind.coefficient
    scale = math.sqrt(g) if g > 0.0 else 1.0
    if kind.variant == "bending":
        return 1, basis.mu, _NO_IP, _NO_TAB, scale
    if kind.variant == "l2":
        return 2, basis.mu, _NO_IP, _NO_TAB, scale
    if kind.variant == "stretching":
        return 3, basis.mu, _NO_IP, basis.slope_gram, scale
    if kind.variant == "cubic":
        tab = np.vstack([basis.emat, basis.ws[:, None] * basis.emat])
        ipar = np.array([basis.n, basis.emat.shape[0]], dtype=np.int64)
        return 4, basis.mu, ipar, tab, 1.0
    # linear: a zero projection table turns the cubic machinery off
    return 4, basis.mu + g, np.array([basis.n, 1], dtype=np.int64), \
        np.zeros((2, basis.n)), 1.0


def trajectory(basis, kind, y0, ts, rtol=1e-10, atol=1e-12):
    """Integrate the truncated system; rows are states at the sample times.

    A coupling coefficient g != 1 is handled by the exact rescaling
    phi -> sqrt(g) phi, which maps the equations onto their g = 1 form.
    """
    system, dpar, ipar, tab, scale = _system_spec(basis, kind)
    y0 = np.asarray(y0, dtype=float)
    if kind.variant in ("bending", "l2", "stretching"):
        if kind.coefficient == 0.0:
            raise ConfigError("a vanishing nonlocal coefficient is the linear "
                              "variant; request it explicitly")
        out = backends.integrate(system, dpar, ipar, tab, y0 * scale, ts,
                                 rtol=rtol, atol=atol)
        return out / scale if scale != 1.0 else out
    return backends.integrate(system, dpar, ipar, tab, y0, ts,
                              rtol=rtol, atol=atol)


def modal_energy(basis, kind, phi, phidot):
    """Conserved energy of a state (vectorized over leading axes)."""
    phi = np.asarray(phi, dtype=float)
    phidot = np.asarray(phidot, dtype=float)
    g = kind.coefficient
    kin = 0.5 * (phidot * phidot).sum(axis=-1)
    bend2 = (phi * phi * basis.mu).sum(axis=-1)
    en = kin + 0.5 * bend2
    if kind.variant == "bending":
        en = en + 0.25 * g * bend2 * bend2
    elif kind.variant == "l2":
        l2 = (phi * phi).sum(axis=-1)
        en = en + 0.25 * g * l2 * l2
    elif kind.variant == "stretching":
        slope2 = np.einsum("...i,ij,...j->...", phi, basis.slope_gram, phi)
        en = en + 0.25 * g * slope2 * slope2
    elif kind.variant == "cubic":
        quart = np.einsum("ijkl,...i,...j,...k,...l->...", basis.quartic,
                          phi, phi, phi, phi, optimize=True)
        en = en + 0.25 * quart
    else:
        en = en + 0.5 * g * (phi * phi).sum(axis=-1)
    return en


@dataclass(frozen=True)
class InstabilityReport:
    """Outcome of one detected seed instability."""

    seed: int
    companion: int
    delta: float
    tau: float
    wait: float
    energy: float
    growth: float = None


def detect_instability(ts, traj, j, eta=0.1, t_wait=0.0, horizon=None,
                       tol=1e-8, max_updates=50):
    """First residual mode passing the moving-threshold growth test.

    Returns (companion index, tau) or None.  The detection level starts at
    eta times the seed amplitude and is raised to M / eta whenever the
    candidate already carried amplitude M in the first half-window, until
    the tenfold-growth condition holds or the scan stalls.
    """
    n = traj.shape[1] // 2
    phi = np.abs(traj[:, :n])
    others = np.array([k for k in range(n) if k != j])
    level = eta * phi[0, j]
    hit = _level_scan(ts, phi[:, others], level, eta, t_wait,
                      horizon if horizon is not None else ts[-1],
                      tol, max_updates)
    if hit is None:
        return None
    col, tau = hit
    return int(others[col]), tau


def _level_scan(ts, amps, level, eta, t_wait, horizon, tol, max_updates):
    """Moving-threshold detection, one independent threshold per channel.

    A channel that crosses its threshold after a comparably large first
    half-window (a forced rise, not an instability) only raises its own
    bar, so a slow channel cannot mask a genuinely growing one.
    """
    live = (ts > 2.0 * t_wait) & (ts < horizon)
    if not live.any():
        return None
    hits = []
    for col in range(amps.shape[1]):
        series = amps[:, col]
        lev = level
        for _ in range(max_updates):
            rows = np.nonzero(live & (series >= lev))[0]
            if rows.size == 0:
                break
            tau = ts[rows[0]]
            m_half = series[ts <= 0.5 * tau].max()
            if m_half <= 0.0 or lev / m_half > 1.0 / eta - tol:
                hits.append((tau, col))
                break
            new_lev = m_half / eta
            if new_lev <= lev:
                break
            lev = new_lev
    if not hits:
        return None
    tau, col = min(hits)
    return col, tau


def companion_hill(basis, kind, j, k):
    """(q0, cq): linearized stiffness of mode k on the single-mode carrier j."""
    g = kind.coefficient
    if kind.variant == "bending":
        return basis.mu[k], g * basis.mu[k] * basis.mu[j]
    if kind.variant == "l2":
        return basis.mu[k], g
    if kind.variant == "stretching":
        d = basis.slope_gram
        return basis.mu[k], g * (d[j, j] * d[k, k] + 2.0 * d[j, k] ** 2)
    if kind.variant == "cubic":
        return basis.mu[k], 3.0 * basis.quartic[k, k, j, j]
    return basis.mu[k] + g, 0.0


def _n_samples(basis, horizon):
    # resolve the fastest linear period pi / lam^2 with ten samples
    return max(2000, math.ceil(10.0 * horizon * basis.lam2[-1] / math.pi))


def seed_threshold(basis, kind, j, eta=0.1, tol=1e-8, step=0.01, r=0.01,
                   horizon=16.0, en_max=1e6, n_samples=None,
                   rtol=1e-10, atol=1e-12):
    """Ramp the seed amplitude of mode j until instability is detected.

    Returns an InstabilityReport, or None when the energy budget en_max is
    exhausted first (an effectively infinite threshold).
    """
    if n_samples is None:
        n_samples = _n_samples(basis, horizon)
    ts = np.linspace(0.0, horizon, n_samples)
    delta = step * math.floor(r / (eta * eta * step) + 1.0)
    if delta <= r / (eta * eta):
        delta += step
    while True:
        energy = seed_energy(basis, kind, j, delta)
        if energy > en_max:
            return None
        t_wait = wagner_time(basis, kind, j, delta)
        if 2.0 * t_wait < horizon:
            y0 = np.full(2 * basis.n, 0.0)
            y0[:basis.n] = r
            y0[j] = delta
            traj = trajectory(basis, kind, y0, ts, rtol=rtol, atol=atol)
            hit = detect_instability(ts, traj, j, eta=eta, t_wait=t_wait,
                                     horizon=horizon, tol=tol)
            if hit is not None:
                k, tau = hit
                growth = None
                if kind.variant != "linear":
                    q0, cq = companion_hill(basis, kind, j, k)
                    c3 = duffing_coefficient(basis, kind)[j]
                    flo = carrier_monodromy(basis.mu[j], c3, q0, cq, delta)
                    growth = flo.growth(tau)
                return InstabilityReport(seed=j, companion=k, delta=delta,
                                         tau=tau, wait=t_wait, energy=energy,
                                         growth=growth)
        delta += step
        delta = round(delta / step) * step


@dataclass(frozen=True)
class SweepCell:
    """All seed outcomes at one pier position."""

    a: float
    best: InstabilityReport
    seeds: tuple

    @property
    def energy(self):
        return self.best.energy if self.best is not None else math.inf


_BASIS_CACHE = {}


def _cached_basis(a, n_modes):
    key = (a, n_modes)
    if key not in _BASIS_CACHE:
        _BASIS_CACHE[key] = ModalBasis(a, n_modes)
    return _BASIS_CACHE[key]


def _seed_task(args):
    a, n_modes, variant, coefficient, j, params = args
    basis = _cached_basis(a, n_modes)
    kind = NonlinearityKind(variant, coefficient)
    return a, j, seed_threshold(basis, kind, j, **params)


def _worker_count(workers):
    if workers is not None:
        return workers
    env = os.environ.get("PIERBEAM_WORKERS", "").strip()
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def threshold_sweep(a_values, kind, n_modes=12, seeds=None, workers=None,
                    **params):
    """Per-seed ramps over a list of pier positions; min-energy per position.

    Cells are independent; they run on a process pool sized by `workers`,
    the PIERBEAM_WORKERS environment variable, or the CPU count.
    """
    if seeds is None:
        seeds = range(n_modes)
    seeds = list(seeds)
    tasks = [(a, n_modes, kind.variant, kind.coefficient, j, params)
             for a in a_values for j in seeds]
    nproc = min(_worker_count(workers), len(tasks))
    if nproc > 1:
        with Pool(processes=nproc) as pool:
            results = pool.map(_seed_task, tasks, chunksize=1)
    else:
        results = [_seed_task(t) for t in tasks]
    by_a = {}
    for a, j, rep in results:
        by_a.setdefault(a, {})[j] = rep
    cells = []
    for a in a_values:
        reps = by_a[a]
        found = [r for r in reps.values() if r is not None]
        best = min(found, key=lambda r: r.energy) if found else None
        cells.append(SweepCell(a=a, best=best,
                               seeds=tuple(reps[j] for j in seeds)))
    return cells
