"""Batch front end: spectra, charts, and threshold sweeps as flat files.

Each subcommand validates its inputs, computes, and only then writes its
artifacts: a CSV table headed by a '#'-commented parameter block, an
optional JSON-lines report (one object per grid cell), and where it
makes sense a static SVG chart.  A manifest file with `key = value`
lines can stand in for the flags (`pierbeam run sweep.cfg`), which keeps
long parameter sets diffable.

Exit codes: 0 on success (finding an instability is a result, not an
error), 2 for configuration or format problems, 3 for numerical
failures.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import beam, fishbone, galerkin, hill, stationary, svg, torsion
from .errors import (BudgetExceeded, ConfigError, FormatError,
                     RootNotBracketed)

DEFAULT_A_GRID = sorted(
    {(k + 1) / 10 for k in range(9)} | {1 / 3, 14 / 25, 2 / 3})
FISHBONE_A_GRID = (0.5, 0.56, 0.6, 2 / 3, 0.7, 0.8, 0.9)


# ---------------------------------------------------------------------------
# option handling
# ---------------------------------------------------------------------------


def _a_grid(args, default=None):
    listed = getattr(args, "a", None)
    ranged = getattr(args, "a_range", None)
    if listed and ranged:
        raise ConfigError("give either --a values or --a-range, not both")
    if ranged:
        lo, hi, step = ranged
        if step <= 0.0:
            raise ConfigError("--a-range step must be positive")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        listed = [lo + i * step for i in range(max(count, 0))]
        if not listed:
            raise ConfigError("empty pier-position grid")
    if not listed:
        listed = list(default) if default is not None else DEFAULT_A_GRID
    if not listed:
        raise ConfigError("empty pier-position grid")
    for a in listed:
        if not 0.0 < a < 1.0:
            raise ConfigError(f"pier position {a} outside (0, 1)")
    return list(listed)


def _check_ramp(args):
    if not 0.0 < args.eta < 1.0:
        raise ConfigError("eta must lie in (0, 1)")
    if args.step <= 0.0 or args.r <= 0.0:
        raise ConfigError("step and r must be positive")
    if args.T <= 0.0:
        raise ConfigError("the time horizon T must be positive")
    if args.en_max <= 0.0:
        raise ConfigError("EN_max must be positive")


def _fval(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def _csv_text(params, columns, rows):
    lines = [f"# {k} = {v}" for k, v in params.items()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fval(v) for v in row))
    return "\n".join(lines) + "\n"


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _jsonable(v):
    if v is None or isinstance(v, (int, str, bool)):
        return v
    if isinstance(v, float):
        f = float(v)
        return f if math.isfinite(f) else None
    return str(v)


def _write_json(path, objs):
    text = "".join(json.dumps({k: _jsonable(v) for k, v in o.items()},
                              sort_keys=True) + "\n" for o in objs)
    _write(path, text)


def _say(msg):
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _family(mode):
    if mode.smooth:
        return "SmoothSin" if mode.parity == "odd" else "SmoothCos"
    return "PiecewiseOdd" if mode.parity == "odd" else "PiecewiseEven"


def _run_spectrum(args):
    a = None if args.no_piers else args.a
    if a is None and not args.no_piers:
        raise ConfigError("spectrum needs --a or --no-piers")
    if a is not None and not 0.0 < a < 1.0:
        raise ConfigError(f"pier position {a} outside (0, 1)")
    if args.modes < 1:
        raise ConfigError("--modes must be at least 1")
    modes = beam.beam_spectrum(a, args.modes)
    rows, cells = [], []
    for n, m in enumerate(modes):
        side, main, tang = m.zero_counts()
        rows.append((n, m.lam, m.mu, m.parity, _family(m), m.upsilon(),
                     side, main, side, 1 if tang else 0))
        cells.append({"n": n, "lambda": m.lam, "mu": m.mu,
                      "parity": m.parity, "family": _family(m),
                      "upsilon": m.upsilon(), "zeros_left": side,
                      "zeros_center": main, "zeros_right": side,
                      "double_zero_flag": bool(tang)})
    params = {"command": "spectrum",
              "a": "none" if a is None else _fval(a),
              "modes": args.modes}
    _write(args.out, _csv_text(params, (
        "n", "lambda", "mu", "parity", "family", "upsilon", "zeros_left",
        "zeros_center", "zeros_right", "double_zero_flag"), rows))
    if args.json_out:
        _write_json(args.json_out, cells)
    _say(f"spectrum: {len(modes)} modes, mu range "
         f"[{modes[0].mu:.6g}, {modes[-1].mu:.6g}]")
    return 0


def _run_torsion(args):
    if not 0.0 < args.a < 1.0:
        raise ConfigError(f"pier position {args.a} outside (0, 1)")
    if args.modes < 1:
        raise ConfigError("--modes must be at least 1")
    spec = torsion.torsion_spectrum(args.a, args.modes)
    rows, cells = [], []
    for rank, m in enumerate(spec):
        mult = torsion.eigenvalue_multiplicity(args.a, m.kappa)
        rows.append((rank, m.kappa, m.mu, m.family, mult))
        cells.append({"rank": rank, "kappa": str(m.kappa), "mu": str(m.mu),
                      "family": m.family, "multiplicity": mult})
    params = {"command": "torsion", "a": _fval(args.a), "modes": args.modes}
    _write(args.out, _csv_text(
        params, ("rank", "kappa", "mu", "family", "multiplicity"), rows))
    if args.json_out:
        _write_json(args.json_out, cells)
    _say(f"torsion: {len(spec)} modes, mu = "
         + " ".join(str(m.mu) for m in spec))
    return 0


def _parse_load(text):
    parts = text.split(":")
    try:
        if parts[0] == "const" and len(parts) == 2:
            c = float(parts[1])
            return lambda x: np.full_like(np.asarray(x, dtype=float), c)
        if parts[0] == "sin" and len(parts) == 3:
            m, amp = float(parts[1]), float(parts[2])
            return lambda x: amp * np.sin(m * np.asarray(x, dtype=float))
    except ValueError:
        pass
    raise ConfigError(f"unknown load {text!r}; use const:C or sin:M:AMP")


def _run_stationary(args):
    f = _parse_load(args.load)
    if args.gamma < 0.0:
        raise ConfigError("gamma must be nonnegative")
    a_values = _a_grid(args)
    b_values = args.b if args.b else [None]
    rows, cells = [], []
    for a in a_values:
        for b in b_values:
            sol = stationary.pinned_solution(f, a, b, gamma=args.gamma)
            gap = stationary.energy_gap(f, a, b, gamma=args.gamma)
            rows.append((a, b if b is not None else a, sol.alpha, sol.beta,
                         gap))
            cells.append({"a": a, "b": b if b is not None else a,
                          "alpha_f": sol.alpha, "beta_f": sol.beta,
                          "H": gap})
    params = {"command": "stationary", "load": args.load,
              "gamma": _fval(args.gamma),
              "a_grid": " ".join(_fval(a) for a in a_values),
              "b_grid": " ".join(_fval(b) for b in b_values
                                 if b is not None) or "(= a)"}
    _write(args.out, _csv_text(
        params, ("a", "b", "alpha_f", "beta_f", "H"), rows))
    if args.json_out:
        _write_json(args.json_out, cells)
    if args.sample_out:
        if len(a_values) != 1 or len(b_values) != 1:
            raise ConfigError("--sample-out needs a single geometry")
        if args.sample_points < 2:
            raise ConfigError("--sample-points must be at least 2")
        sol = stationary.pinned_solution(f, a_values[0], b_values[0],
                                         gamma=args.gamma)
        xs = np.linspace(-math.pi, math.pi, args.sample_points)
        srows = [(x, sol.derivative(x, 0), sol.derivative(x, 1),
                  sol.derivative(x, 2)) for x in xs]
        sparams = dict(params)
        sparams["command"] = "stationary-sample"
        sparams["points"] = args.sample_points
        _write(args.sample_out, _csv_text(sparams, ("x", "u", "u1", "u2"),
                                          srows))
    hmin = min(rows, key=lambda r: r[4])
    _say(f"stationary: {len(rows)} cells, min H = {hmin[4]:.6g} at "
         f"a={_fval(hmin[0])} b={_fval(hmin[1])}")
    return 0


def _run_hill_chart(args):
    if args.s_max <= 0.0 or args.s_step <= 0.0 or args.ratio_step <= 0.0:
        raise ConfigError("chart steps and bounds must be positive")
    if not 0.0 < args.ratio_min < args.ratio_max:
        raise ConfigError("need 0 < --ratio-min < --ratio-max")
    ns = int(math.floor(args.s_max / args.s_step + 1e-9)) + 1
    nr = int(math.floor((args.ratio_max - args.ratio_min) / args.ratio_step
                        + 1e-9)) + 1
    rows = []
    for i in range(ns):
        s = i * args.s_step
        for k in range(nr):
            ratio = args.ratio_min + k * args.ratio_step
            flo = hill.scaled_monodromy(s, ratio)
            rows.append((s, ratio, flo.trace, 1 if flo.stable else 0))
    params = {"command": "hill-chart", "s_max": _fval(args.s_max),
              "s_step": _fval(args.s_step),
              "ratio_min": _fval(args.ratio_min),
              "ratio_max": _fval(args.ratio_max),
              "ratio_step": _fval(args.ratio_step)}
    text = _csv_text(params, ("delta_lam2", "ratio", "trace", "stable"),
                     rows)
    _write(args.out, text)
    if args.json_out:
        _write_json(args.json_out, [
            {"delta_lam2": s, "ratio": r, "trace": t, "stable": bool(st)}
            for s, r, t, st in rows])
    if args.svg:
        _write(args.svg, svg.render_chart(text))
    unstable = sum(1 for row in rows if row[3] == 0)
    _say(f"hill-chart: {len(rows)} cells, {unstable} unstable")
    return 0


def _run_beam_threshold(args):
    _check_ramp(args)
    if args.modes < 2:
        raise ConfigError("threshold sweeps need at least 2 modes")
    kind = galerkin.NonlinearityKind(args.variant, args.coefficient)
    a_values = _a_grid(args)
    seeds = args.seeds if args.seeds else list(range(args.modes))
    for j in seeds:
        if not 0 <= j < args.modes:
            raise ConfigError(f"seed {j} outside the {args.modes}-mode basis")
    cells = galerkin.threshold_sweep(
        a_values, kind, n_modes=args.modes, seeds=seeds,
        workers=args.workers, eta=args.eta, step=args.step, r=args.r,
        horizon=args.T, en_max=args.en_max)
    params = {"command": "beam-threshold", "variant": args.variant,
              "coefficient": _fval(args.coefficient),
              "a_grid": " ".join(_fval(a) for a in a_values),
              "modes": args.modes,
              "seeds": " ".join(str(j) for j in seeds),
              "eta": _fval(args.eta), "step": _fval(args.step),
              "r": _fval(args.r), "T": _fval(args.T),
              "EN_max": _fval(args.en_max)}
    rows, objs = [], []
    for cell in cells:
        for j, rep in zip(seeds, cell.seeds):
            if rep is None:
                rows.append((cell.a, j, None, None, None, None, None))
                objs.append({"a": cell.a, "j": j, "detected": False})
            else:
                rows.append((cell.a, j, rep.energy, rep.delta,
                             rep.companion, rep.tau, rep.wait))
                objs.append({"a": cell.a, "j": j, "detected": True,
                             "E_j": rep.energy, "delta": rep.delta,
                             "k": rep.companion, "tau": rep.tau,
                             "T_W": rep.wait, "growth": rep.growth})
    text = _csv_text(params, ("a", "j", "E_j", "delta", "k", "tau", "T_W"),
                     rows)
    _write(args.out, text)
    if args.json_out:
        _write_json(args.json_out, objs)
    if args.svg:
        _write(args.svg, svg.render_chart(text))
    found = [c for c in cells if c.best is not None]
    if found:
        top = min(found, key=lambda c: c.energy)
        peak = max(found, key=lambda c: c.energy)
        _say(f"{args.variant}: min E = {top.energy:.6g} at a={_fval(top.a)} "
             f"(seed {top.best.seed} -> mode {top.best.companion}); "
             f"max over grid at a={_fval(peak.a)} (E = {peak.energy:.6g})")
    else:
        _say(f"{args.variant}: no instability within EN_max="
             f"{_fval(args.en_max)}")
    return 0


def _run_fishbone(args):
    _check_ramp(args)
    if args.seed_count < 1:
        raise ConfigError("--seed-count must be at least 1")
    for sig in args.sigma:
        if sig < 0.0:
            raise ConfigError("elasticities must be nonnegative")
    a_values = _a_grid(args, default=FISHBONE_A_GRID)
    table = fishbone.threshold_table(
        a_values, elasticities=args.sigma, workers=args.workers,
        seeds=range(args.seed_count), twist_index=args.twist_index,
        lin_en_max=args.en_max, eta=args.eta, step=args.step, r=args.r,
        horizon=args.T, en_max=args.en_max)
    params = {"command": "fishbone-threshold",
              "a_grid": " ".join(_fval(a) for a in a_values),
              "sigma": " ".join(_fval(s) for s in args.sigma),
              "seed_count": args.seed_count,
              "twist_index": args.twist_index,
              "eta": _fval(args.eta), "step": _fval(args.step),
              "r": _fval(args.r), "T": _fval(args.T),
              "EN_max": _fval(args.en_max)}
    rows, objs = [], []
    for row in table:
        rep = row.report
        rows.append((row.a, row.elasticity, row.delta_lin,
                     rep.delta if rep else None, rep.tau if rep else None,
                     rep.growth if rep else None,
                     rep.seed if rep else None))
        objs.append({"a": row.a, "sigma": row.elasticity,
                     "delta_lin": row.delta_lin,
                     "E_lin": row.energy_lin, "lin_seed": row.lin_seed,
                     "detected": rep is not None,
                     "delta": rep.delta if rep else None,
                     "tau": rep.tau if rep else None,
                     "ER_tau": rep.growth if rep else None,
                     "E": rep.energy if rep else None,
                     "prevailing_mode": rep.seed if rep else None})
    text = _csv_text(params, ("a", "sigma", "delta_lin", "delta", "tau",
                              "ER_tau", "prevailing_mode"), rows)
    _write(args.out, text)
    if args.json_out:
        _write_json(args.json_out, objs)
    if args.svg:
        _write(args.svg, svg.render_chart(text))
    detected = [r for r in table if r.report is not None]
    if detected:
        top = min(detected, key=lambda r: r.energy)
        _say(f"fishbone: min nonlinear E = {top.energy:.6g} at "
             f"a={_fval(top.a)} sigma={_fval(top.elasticity)} "
             f"(mode {top.report.seed})")
    weakest = min(table, key=lambda r: r.delta_lin)
    _say(f"fishbone: min delta_lin = {weakest.delta_lin:.6g} at "
         f"a={_fval(weakest.a)} sigma={_fval(weakest.elasticity)}")
    return 0


# ---------------------------------------------------------------------------
# manifests
# ---------------------------------------------------------------------------

_MANIFEST_FLAGS = {
    "a": ("--a", "list"),
    "a_range": ("--a-range", "list"),
    "b": ("--b", "list"),
    "modes": ("--modes", "one"),
    "seeds": ("--seeds", "list"),
    "seed_count": ("--seed-count", "one"),
    "twist_index": ("--twist-index", "one"),
    "variant": ("--variant", "one"),
    "coefficient": ("--coefficient", "one"),
    "load": ("--load", "one"),
    "gamma": ("--gamma", "one"),
    "eta": ("--eta", "one"),
    "step": ("--step", "one"),
    "r": ("--r", "one"),
    "t": ("--T", "one"),
    "en_max": ("--en-max", "one"),
    "sigma": ("--sigma", "list"),
    "s_max": ("--s-max", "one"),
    "s_step": ("--s-step", "one"),
    "ratio_min": ("--ratio-min", "one"),
    "ratio_max": ("--ratio-max", "one"),
    "ratio_step": ("--ratio-step", "one"),
    "workers": ("--workers", "one"),
    "out": ("--out", "one"),
    "json_out": ("--json-out", "one"),
    "svg": ("--svg", "one"),
    "sample_out": ("--sample-out", "one"),
    "sample_points": ("--sample-points", "one"),
    "no_piers": ("--no-piers", "flag"),
}


def manifest_argv(text):
    """Translate `key = value` manifest lines into a flag vector."""
    command = None
    argv = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"manifest line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        value = value.strip()
        if key == "command":
            command = value
            continue
        if key not in _MANIFEST_FLAGS:
            raise ConfigError(f"manifest line {lineno}: unknown key {key!r}")
        flag, shape = _MANIFEST_FLAGS[key]
        if shape == "flag":
            if value.lower() in ("1", "true", "yes"):
                argv.append(flag)
            elif value.lower() not in ("0", "false", "no"):
                raise ConfigError(f"manifest line {lineno}: {key} must be "
                                  "a boolean")
        elif shape == "list":
            argv.append(flag)
            argv.extend(value.split())
        else:
            argv.extend((flag, value))
    if command is None:
        raise ConfigError("manifest is missing the command key")
    return [command] + argv


def _run_manifest(args):
    try:
        with open(args.manifest) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read manifest: {exc}") from None
    return main(manifest_argv(text))


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_outputs(p, chart=False):
    p.add_argument("--out", default="-", metavar="FILE",
                   help="CSV output path ('-' for stdout)")
    p.add_argument("--json-out", metavar="FILE",
                   help="JSON-lines report, one object per grid cell")
    if chart:
        p.add_argument("--svg", metavar="FILE", help="render a chart")


def _add_grid(p):
    p.add_argument("--a", type=float, nargs="+", metavar="A",
                   help="pier positions (fractions of the half-span)")
    p.add_argument("--a-range", type=float, nargs=3,
                   metavar=("LO", "HI", "STEP"),
                   help="inclusive pier-position range")


def _add_ramp(p):
    p.add_argument("--eta", type=float, default=0.1,
                   help="detection ratio (default 0.1)")
    p.add_argument("--step", type=float, default=0.01,
                   help="amplitude ramp increment (default 0.01)")
    p.add_argument("--r", type=float, default=0.01,
                   help="residual seeding amplitude (default 0.01)")
    p.add_argument("--T", type=float, default=16.0, dest="T",
                   help="integration horizon (default 16)")
    p.add_argument("--en-max", type=float, default=1e4,
                   help="energy budget that ends a ramp (default 1e4)")
    p.add_argument("--workers", type=int, default=None,
                   help="process pool size (default: PIERBEAM_WORKERS "
                        "or the CPU count)")


def build_parser():
    top = argparse.ArgumentParser(
        prog="pierbeam",
        description="Spectra and stability thresholds of beams on two "
                    "symmetric piers.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="beam eigenvalues and mode data")
    p.add_argument("--a", type=float, help="pier position")
    p.add_argument("--no-piers", action="store_true",
                   help="plain hinged beam instead of the pier problem")
    p.add_argument("--modes", type=int, default=12)
    _add_outputs(p)
    p.set_defaults(fn=_run_spectrum)

    p = sub.add_parser("torsion", help="rotational eigenvalues (exact)")
    p.add_argument("--a", type=float, required=True, help="pier position")
    p.add_argument("--modes", type=int, default=10)
    _add_outputs(p)
    p.set_defaults(fn=_run_torsion)

    p = sub.add_parser("stationary", help="pinned equilibria under a load")
    _add_grid(p)
    p.add_argument("--b", type=float, nargs="+", metavar="B",
                   help="left pier positions (default: mirror --a)")
    p.add_argument("--load", required=True,
                   help="load spec: const:C or sin:M:AMP")
    p.add_argument("--gamma", type=float, default=0.0,
                   help="restoring coefficient (default 0)")
    p.add_argument("--sample-out", metavar="FILE",
                   help="sample the solution profile (single geometry)")
    p.add_argument("--sample-points", type=int, default=401)
    _add_outputs(p)
    p.set_defaults(fn=_run_stationary)

    p = sub.add_parser("hill-chart",
                       help="stability grid of the scaled Hill equation")
    p.add_argument("--s-max", type=float, default=4.0,
                   help="largest scaled amplitude (default 4)")
    p.add_argument("--s-step", type=float, default=0.1)
    p.add_argument("--ratio-min", type=float, default=0.1,
                   help="smallest stiffness ratio (default 0.1)")
    p.add_argument("--ratio-max", type=float, default=9.0)
    p.add_argument("--ratio-step", type=float, default=0.1)
    _add_outputs(p, chart=True)
    p.set_defaults(fn=_run_hill_chart)

    p = sub.add_parser("beam-threshold",
                       help="nonlinear threshold sweep for one variant")
    p.add_argument("--variant", required=True,
                   choices=galerkin.VARIANTS)
    p.add_argument("--coefficient", type=float, default=1.0,
                   help="coupling coefficient (default 1)")
    _add_grid(p)
    p.add_argument("--modes", type=int, default=12)
    p.add_argument("--seeds", type=int, nargs="+", metavar="J",
                   help="seed modes to ramp (default: all)")
    _add_ramp(p)
    _add_outputs(p, chart=True)
    p.set_defaults(fn=_run_beam_threshold)

    p = sub.add_parser("fishbone-threshold",
                       help="torsional thresholds of the coupled plate")
    _add_grid(p)
    p.add_argument("--sigma", type=float, nargs="+", default=[0.0],
                   metavar="S", help="hanger elasticities (default: 0)")
    p.add_argument("--seed-count", type=int, default=6,
                   help="how many longitudinal seeds to try (default 6)")
    p.add_argument("--twist-index", type=int, default=1,
                   help="torsional mode rank (default 1)")
    _add_ramp(p)
    _add_outputs(p, chart=True)
    p.set_defaults(fn=_run_fishbone)

    p = sub.add_parser("run", help="execute a key = value manifest")
    p.add_argument("manifest", help="manifest path")
    p.set_defaults(fn=_run_manifest)

    return top


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except (ConfigError, FormatError) as exc:
        print(f"pierbeam: {exc}", file=sys.stderr)
        return 2
    except (RootNotBracketed, BudgetExceeded) as exc:
        print(f"pierbeam: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
