"""Timing comparison of the compiled stepping core and the numpy fallback.

Run as `python3 benchmarks/bench_backends.py`.  Each case integrates a
representative system over the standard detection horizon and reports
the median of three wall-time measurements per backend.
"""

import time

import numpy as np

from pierbeam.backends import fallback

try:
    from pierbeam.backends import _core
except ImportError:
    _core = None

from pierbeam.fishbone import HangerModel, ModePair
from pierbeam.galerkin import ModalBasis, NonlinearityKind, _system_spec

_NO_TAB = np.zeros((1, 1))
_NO_IP = np.array([0], dtype=np.int64)


def _cases():
    basis = ModalBasis(0.5)
    yA = np.zeros(24)
    yA[:12] = 0.01
    yA[0] = 4.0
    out = []
    for variant in ("bending", "l2", "stretching", "cubic"):
        system, dpar, ipar, tab, _ = _system_spec(
            basis, NonlinearityKind(variant))
        out.append((variant, system, dpar, ipar, tab, yA))
    pair = ModePair(0.5, seed=0, hanger=HangerModel(0.5))
    yB = np.array([2.0, 0.0, 0.01, 0.0])
    out.append(("rigid pair", 5,
                np.array([pair.lam4, pair.kap2, pair.a2]), _NO_IP, _NO_TAB,
                yB))
    out.append(("slack pair", 6,
                np.array([pair.lam4, pair.kap2, pair.a2, 0.5]), _NO_IP,
                pair.tab, yB))
    out.append(("twist Hill", 9,
                np.array([pair.lam4, pair.kap2, pair.a2, 0.5]), _NO_IP,
                pair.tab, np.array([2.0, 0.0, 1.0, 0.0, 0.0, 1.0])))
    return out


def _run(impl, case, ts):
    _, system, dpar, ipar, tab, y0 = case
    best = float("inf")
    for _ in range(3):
        t0 = time.perf_counter()
        impl.integrate(system, dpar, ipar, tab, y0, ts)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ts = np.linspace(0.0, 16.0, 2001)
    print(f"{'case':<12} {'python':>10} {'compiled':>10} {'speedup':>9}")
    for case in _cases():
        py = _run(fallback, case, ts)
        if _core is None:
            print(f"{case[0]:<12} {py * 1e3:>8.1f}ms {'-':>10} {'-':>9}")
            continue
        cc = _run(_core, case, ts)
        print(f"{case[0]:<12} {py * 1e3:>8.1f}ms {cc * 1e3:>8.1f}ms "
              f"{py / cc:>8.1f}x")
    if _core is None:
        print("compiled core not built; set it up with pip install -e .")


if __name__ == "__main__":
    main()
