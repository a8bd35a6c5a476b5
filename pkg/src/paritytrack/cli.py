"""Command-line interface: simulate, optimize, formulas, sweep, figures."""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import FILTERS, ancilla_theory, canonical_filter, simplified_scaling, theory
from .ensemble import available_workers, default_horizon, fit_linear, run_ensemble
from .filters import FilterSpec
from .filters.streaming import LinearBayesState
from .optimizer import crude_optimum, optimize
from .projective import ProjectiveConfig, run_idealized
from .trajectory import BitTrajectory, SimConfig, bits_from_flips, block_rng, generate_trajectory, synthesize_signals

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 2, 3
_CLOCK = [time.perf_counter()]
SIM_FILTERS = ("bayes", "wonham", "boxcar", "halfbox", "double", "projective")


class UsageError(Exception):
    pass


class Infeasible(Exception):
    pass


# ---------------------------------------------------------------- parsing


def _float(s):
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}")


def _count(s):
    v = _float(s)
    if v != int(v):
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}")
    return int(v)


def parse_grid(spec: str) -> np.ndarray:
    """``lo:hi:n`` to n log-spaced values."""
    try:
        lo, hi, n = spec.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise UsageError(f"grid must look like lo:hi:n, got {spec!r}")
    if not (0 < lo <= hi) or n < 1:
        raise UsageError(f"bad grid {spec!r}")
    return np.geomspace(lo, hi, n) if n > 1 else np.array([lo])


def _common(p, *, sim=False):
    p.add_argument("--config", help="flat JSON file with the same keys as the flags")
    p.add_argument("--out-dir", default=".", help="directory for output files")
    p.add_argument("--seed", type=_count, default=0)
    if sim:
        p.add_argument("--trials", type=_count, default=10_000)
        p.add_argument("--workers", type=_count, default=None, help="threads (default: available CPUs)")
        p.add_argument("--dt-substep", type=int, choices=(10, 100), default=10, help="dt = tau / N")
        p.add_argument("--n-steps", type=_count, default=None, help="override the trial horizon")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="paritytrack", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="ensemble fidelity curve and linear fit for one filter")
    p.add_argument("--filter", required=True)
    p.add_argument("--mutau", type=_float, required=True)
    p.add_argument("--dt-box", type=_float, default=None)
    p.add_argument("--a", type=_float, default=None)
    p.add_argument("--auto-params", action="store_true")
    _common(p, sim=True)

    p = sub.add_parser("optimize", help="optimal box parameters from the closed forms")
    p.add_argument("--filter", required=True, help="filter name or 'all'")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--mutau", type=_float)
    g.add_argument("--mutau-grid", "--sweep", dest="mutau_grid")
    _common(p)

    p = sub.add_parser("formulas", help="closed-form drops and rates at optimized parameters")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--mutau", type=_float)
    g.add_argument("--mutau-grid", dest="mutau_grid")
    p.add_argument("--format", choices=("csv", "text"), default="text")
    _common(p)

    p = sub.add_parser("sweep", help="simulate several filters across a mu*tau grid")
    p.add_argument("--filters", default="bayes,boxcar,halfbox,double")
    p.add_argument("--mutau-grid", required=True)
    _common(p, sim=True)

    p = sub.add_parser("figures", help="plot-ready data for the standard figures")
    p.add_argument("--which", default="fig2,fig5a,fig5b,fig5c,fig5d")
    p.add_argument("--mutau", type=_float, default=1e-3, help="rate for fig5a")
    p.add_argument("--mutau-grid", default="1e-6:1e-3:13", help="grid for fig5b-d theory lines")
    p.add_argument("--sim-grid", default="1e-4:1e-3:3", help="grid for fig5c-d simulation points")
    p.add_argument("--svg", action="store_true", help="also render SVG (needs matplotlib)")
    _common(p, sim=True)
    return ap


def _apply_config(parser, argv):
    """Parse with JSON config values as defaults so the command line wins."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    ns, _ = pre.parse_known_args(argv)
    if not ns.config or ns.command not in COMMANDS:
        return parser.parse_args(argv)
    try:
        cfg = json.loads(Path(ns.config).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read config {ns.config}: {e}")
    if not isinstance(cfg, dict):
        raise UsageError("config must be a flat JSON object")
    sub = parser._subparsers._group_actions[0].choices[ns.command]
    known = {a.dest for a in sub._actions}
    defaults = {}
    for k, v in cfg.items():
        key = k.lstrip("-").replace("-", "_")
        if key not in known or key == "config":
            raise UsageError(f"unknown config key {k!r} for {ns.command}")
        defaults[key] = v
    sub.set_defaults(**defaults)
    for a in sub._actions:
        if a.dest in defaults:
            a.required = False
    for grp in sub._mutually_exclusive_groups:
        if any(a.dest in defaults for a in grp._group_actions):
            grp.required = False
    return parser.parse_args(argv)


# ---------------------------------------------------------------- outputs


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return v


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _write_json(path: Path, obj):
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def _manifest(out: Path, argv, args, outputs, started, resolved=None):
    snap = {k: v for k, v in vars(args).items() if k != "config"}
    m = {
        "command_line": ["paritytrack", *argv],
        "config": snap,
        "resolved": resolved or {},
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "numpy": np.__version__,
        "started": started,
        "wall_seconds": time.perf_counter() - _CLOCK[0],
        "outputs": sorted(str(p.name) for p in outputs),
    }
    return m


def _tag(x):
    return f"{x:.6g}"


# ---------------------------------------------------------------- simulate


def resolve_params(name, mutau, dt_box=None, a=None, auto=False):
    """Fill box parameters from the optimizer when asked; returns (dt_box, a, optimum or None)."""
    if name in ("bayes", "wonham", "projective"):
        if dt_box is not None or a is not None:
            raise UsageError(f"{name} takes no --dt-box/--a")
        return None, 0.0, None
    opt = None
    if auto:
        opt = optimize(name, mutau)
        if not opt.feasible:
            raise Infeasible(f"no {name} parameters give an initial drop below 0.1 at mutau={mutau:g}")
        dt_box = opt.dt_over_tau if dt_box is None else dt_box
        a = opt.a if a is None else a
    if dt_box is None:
        raise UsageError(f"{name} needs --dt-box or --auto-params")
    if name != "double":
        if a not in (None, 0.0):
            raise UsageError("--a only applies to the double filter")
        a = 0.0
    elif a is None:
        raise UsageError("double needs --a or --auto-params")
    if not dt_box > 0 or not 0 <= a < 1:
        raise UsageError(f"invalid box parameters dt_box={dt_box}, a={a}")
    return float(dt_box), float(a), opt


def simulate_point(name, mutau, *, trials, seed, workers=1, dt_box=None, a=None, auto=False, dt_substep=10, n_steps=None):
    """Run one filter at one rate; returns (curve, fit, summary dict)."""
    name = "projective" if name in ("projective-ideal", "projective") else canonical_filter(name)
    if name not in SIM_FILTERS:
        raise UsageError(f"unknown filter {name!r}")
    if not 0 < mutau < 0.1:
        raise UsageError(f"mutau must lie in (0, 0.1), got {mutau}")
    if trials < 1:
        raise UsageError("--trials must be at least 1")
    dt_box, a, _ = resolve_params(name, mutau, dt_box, a, auto)
    tau = 1.0
    dt = tau / dt_substep
    if n_steps is None:
        n_steps = default_horizon(mutau, dt, tau)
        if dt_box is not None:
            n_steps = max(n_steps, int(math.floor(10 * dt_box / dt)))
    params = {"dt_over_tau": dt_box, "a": a, "dt": dt, "tau": tau, "n_steps": n_steps}
    if name == "projective":
        cfg = ProjectiveConfig(mutau, tau, n_cycles=max(3, int(n_steps * dt // 4.0)), seed=seed)
        res = run_idealized(cfg, trials, workers=workers)
        curve = res.curve
        fit = fit_linear(curve, "projective", window=(cfg.cycle, curve.times[-1]))
        th = ancilla_theory("idealistic", mutau)
        params.update(cycle_over_tau=cfg.cycle, n_cycles=cfg.n_cycles)
        extra = {"failure_events": res.failure_events, "failures_with_fewer_than_two_flips": res.failures_with_fewer_than_two_flips}
    else:
        spec = FilterSpec(name, dt_box, a)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", RuntimeWarning)
            spec.steps_per_box(dt, tau) if spec.is_box else None
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        cfg = SimConfig(mutau, tau, dt, n_steps, seed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            curve = run_ensemble(spec, cfg, trials, workers=workers)
            fit = fit_linear(curve, name, mutau=mutau, dt_box=dt_box)
        th = theory(name, mutau, dt_box, a)
        extra = {}
    summary = {
        "filter": name,
        "mutau": mutau,
        "params": params,
        "n_trials": trials,
        "delta_f_in": fit.delta_f_in,
        "delta_f_in_stderr": fit.delta_f_in_stderr,
        "gamma_tau": fit.gamma,
        "gamma_tau_stderr": fit.gamma_stderr,
        "fit_window": list(fit.fit_window),
        "residual_rms": fit.residual_rms,
        "theory": {"delta_f_in": th.delta_f_in, "gamma_tau": th.gamma_tau},
        **extra,
    }
    return curve, fit, summary


def cmd_simulate(args, argv):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = _dt.datetime.now(_dt.timezone.utc).isoformat()
    workers = args.workers or available_workers()
    curve, fit, summary = simulate_point(
        args.filter, args.mutau, trials=args.trials, seed=args.seed, workers=workers,
        dt_box=args.dt_box, a=args.a, auto=args.auto_params, dt_substep=args.dt_substep, n_steps=args.n_steps,
    )
    stem = f"simulate_{summary['filter']}_mutau{_tag(args.mutau)}_seed{args.seed}"
    csv_path, json_path = out / f"{stem}.csv", out / f"{stem}.json"
    curve.to_csv(csv_path)
    _write_json(json_path, summary)
    m = _manifest(out, argv, args, [csv_path, json_path], started, summary["params"])
    m["workers"] = workers
    _write_json(out / f"{stem}.manifest.json", m)
    print(f"{summary['filter']} mutau={args.mutau:g}: drop={fit.delta_f_in:.4g} gamma_tau={fit.gamma:.4g} -> {csv_path}")
    return EXIT_OK


# ---------------------------------------------------------------- optimize / formulas


def _mutaus(args):
    return np.array([args.mutau]) if args.mutau is not None else parse_grid(args.mutau_grid)


def cmd_optimize(args, argv):
    names = [f for f in FILTERS if f != "bayes"] if args.filter == "all" else [canonical_filter(args.filter)]
    if any(n not in ("boxcar", "halfbox", "double") for n in names):
        raise UsageError("optimize applies to boxcar, halfbox and double")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = _dt.datetime.now(_dt.timezone.utc).isoformat()
    rows, feasible = [], True
    for name in names:
        for mt in _mutaus(args):
            r = optimize(name, float(mt))
            crude = crude_optimum(name, float(mt))
            feasible &= r.feasible
            rows.append([name, float(mt), r.dt_over_tau, r.a, r.t_max, r.theory.delta_f_in, r.theory.gamma_tau, r.feasible,
                         crude["dt_over_tau"], crude["a"]])
    header = ["filter", "mutau", "dt_over_tau", "a", "t_max", "delta_f_in", "gamma_tau", "feasible", "crude_dt_over_tau", "crude_a"]
    path = out / f"optimize_{args.filter}.csv"
    _write_csv(path, header, rows)
    _write_json(out / f"optimize_{args.filter}.manifest.json", _manifest(out, argv, args, [path], started))
    for r in rows:
        print(f"{r[0]:8s} mutau={r[1]:.3g} dt={r[2]:.4g} a={r[3]:.3f} t_max={r[4]:.4g} feasible={r[7]}")
    return EXIT_OK if feasible else EXIT_INFEASIBLE


def formula_rows(mutau):
    rows = []
    for name in FILTERS:
        r = optimize(name, mutau)
        rows.append(["optimized", name, mutau, r.dt_over_tau, r.a, r.theory.delta_f_in, r.theory.gamma_tau])
    for name in FILTERS:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            s = simplified_scaling(name, mutau)
        rows.append(["scaling_law", name, mutau, s.dt_over_tau, s.a, s.delta_f_in, s.gamma_tau])
    for strat in ("idealistic", "pessimistic", "optimistic"):
        t = ancilla_theory(strat, mutau)
        rows.append([f"ancilla_{strat}", "projective", mutau, t.dt_over_tau, None, t.delta_f_in, t.gamma_tau])
    return rows


def cmd_formulas(args, argv):
    header = ["source", "filter", "mutau", "dt_over_tau", "a", "delta_f_in", "gamma_tau"]
    rows = [r for mt in _mutaus(args) for r in formula_rows(float(mt))]
    if args.format == "csv":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    else:
        print(f"{'source':22s} {'filter':10s} {'mutau':>9s} {'dt/tau':>9s} {'a':>6s} {'dF_in':>10s} {'gamma*tau':>10s}")
        for s, f, mt, x, a, d, g in rows:
            xs = f"{x:9.4g}" if x is not None else f"{'-':>9s}"
            as_ = f"{a:6.3f}" if a is not None else f"{'-':>6s}"
            print(f"{s:22s} {f:10s} {mt:9.3g} {xs} {as_} {d:10.4g} {g:10.4g}")
    if args.out_dir != ".":
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "formulas.csv", header, rows)
    return EXIT_OK


# ---------------------------------------------------------------- sweep / figures


def _theory_points(name, mutau):
    if name == "projective":
        t = ancilla_theory("idealistic", mutau)
        return [("theory_full", 4.0, None, t.delta_f_in, t.gamma_tau)]
    r = optimize(name, mutau)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        s = simplified_scaling(name, mutau)
    return [
        ("theory_full", r.dt_over_tau, r.a, r.theory.delta_f_in, r.theory.gamma_tau),
        ("theory_crude", s.dt_over_tau, s.a, s.delta_f_in, s.gamma_tau),
    ]


SWEEP_HEADER = ["source", "filter", "mutau", "dt_over_tau", "a", "delta_f_in", "delta_f_in_stderr", "gamma_tau", "gamma_tau_stderr", "n_trials"]


def _sweep_rows(names, grid, args, workers, trials):
    rows = []
    for name in names:
        for mt in grid:
            mt = float(mt)
            for src, x, a, d, g in _theory_points(name, mt):
                rows.append([src, name, mt, x, a, d, None, g, None, None])
            if trials:
                _, _, s = simulate_point(name, mt, trials=trials, seed=args.seed, workers=workers,
                                         auto=name in ("boxcar", "halfbox", "double"), dt_substep=args.dt_substep,
                                         n_steps=args.n_steps)
                p = s["params"]
                rows.append(["sim", name, mt, p["dt_over_tau"], p["a"], s["delta_f_in"], s["delta_f_in_stderr"],
                             s["gamma_tau"], s["gamma_tau_stderr"], trials])
    return rows


def cmd_sweep(args, argv):
    names = [n.strip() for n in args.filters.split(",") if n.strip()]
    names = ["projective" if n in ("projective-ideal", "projective") else canonical_filter(n) for n in names]
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = _dt.datetime.now(_dt.timezone.utc).isoformat()
    workers = args.workers or available_workers()
    rows = _sweep_rows(names, parse_grid(args.mutau_grid), args, workers, args.trials)
    path = out / "sweep.csv"
    _write_csv(path, SWEEP_HEADER, rows)
    _write_json(out / "sweep.manifest.json", _manifest(out, argv, args, [path], started))
    print(f"wrote {len(rows)} rows -> {path}")
    return EXIT_OK


def _fig2(out, args):
    """Bayesian probabilities on a random trajectory and on one with a fast bit-1/bit-3 pair."""
    mutau = 5e-4
    cfg = SimConfig(mutau, 1.0, 0.1, 3000, args.seed)
    paths = []
    top = generate_trajectory(cfg, block_rng(args.seed, 0))
    flips = np.full((3, 2), cfg.n_steps, dtype=np.int64)
    flips[0, 0], flips[2, 0] = 1000, 1003  # bits 1 and 3 flip 0.3 tau apart at t = 100 tau
    bottom = BitTrajectory(bits_from_flips(flips, cfg.n_steps), cfg)
    for label, traj in (("top", top), ("bottom", bottom)):
        sig = synthesize_signals(traj, block_rng(args.seed, 1))
        st = LinearBayesState(cfg.mu, cfg.tau, cfg.dt)
        codes = traj.codes
        rows = []
        for j in range(cfg.n_steps):
            e = st.step(sig.r12[j], sig.r23[j])
            rows.append([(j + 1) * cfg.dt, int(codes[j]), e, *st.probabilities])
        p = out / f"fig2_{label}.csv"
        _write_csv(p, ["t_over_tau", "true", "estimate"] + [f"p{k}" for k in range(8)], rows)
        paths.append(p)
    return paths


def _fig5a(out, args, workers):
    mutau = args.mutau
    rows = []
    for name in ("bayes", "halfbox", "double", "boxcar", "projective"):
        curve, fit, s = simulate_point(name, mutau, trials=args.trials, seed=args.seed, workers=workers,
                                       auto=name in ("boxcar", "halfbox", "double"), dt_substep=args.dt_substep,
                                       n_steps=args.n_steps)
        for t, f, e in zip(curve.times, curve.f_mean, curve.stderr):
            rows.append(["sim", name, t, f, e])
        th = s["theory"]
        anchor = 0.5 * s["params"]["dt_over_tau"] if s["params"]["dt_over_tau"] else 0.0
        for t in curve.times[1:]:
            rows.append(["theory_full", name, t, 1 - th["delta_f_in"] - th["gamma_tau"] * (t - anchor), None])
    p = out / "fig5a.csv"
    _write_csv(p, ["source", "filter", "t_over_tau", "f", "stderr"], rows)
    return [p]


def _fig5bcd(out, args, which, workers):
    grid = parse_grid(args.mutau_grid)
    names = ("bayes", "boxcar", "halfbox", "double", "projective")
    rows = _sweep_rows(names, grid, args, workers, 0)
    if args.trials and args.sim_grid:
        rows += [r for r in _sweep_rows(names, parse_grid(args.sim_grid), args, workers, args.trials) if r[0] == "sim"]
    paths = []
    cols = {"fig5b": 3, "fig5c": 5, "fig5d": 7}
    for fig in which:
        c = cols[fig]
        sel = [r for r in rows if r[c] is not None and not (fig == "fig5b" and r[1] == "bayes")]
        err = {5: 6, 7: 8}.get(c)
        p = out / f"{fig}.csv"
        _write_csv(p, ["source", "filter", "mutau", "value", "stderr"],
                   [[r[0], r[1], r[2], r[c], r[err] if err else None] for r in sel])
        paths.append(p)
    return paths


def _render_svg(paths):
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("warning: matplotlib not installed, skipping SVG", file=sys.stderr)
        return []
    out = []
    for p in paths:
        with open(p, newline="") as fh:
            rows = list(csv.DictReader(fh))
        fig, ax = plt.subplots(figsize=(6, 4))
        if p.stem.startswith("fig2"):
            t = [float(r["t_over_tau"]) for r in rows]
            for k in range(8):
                ax.plot(t, [float(r[f"p{k}"]) for r in rows], lw=0.8, label=f"{k}")
            ax.plot(t, [int(r["true"]) / 7 for r in rows], "k--", lw=0.8, label="true/7")
            ax.set_xlabel("t / tau")
        else:
            xkey = "t_over_tau" if p.stem == "fig5a" else "mutau"
            ykey = "f" if p.stem == "fig5a" else "value"
            groups = {}
            for r in rows:
                groups.setdefault((r["source"], r["filter"]), []).append((float(r[xkey]), float(r[ykey])))
            for (src, name), pts in groups.items():
                x, y = zip(*pts)
                ax.plot(x, y, "o" if src == "sim" else ("-" if src == "theory_full" else "--"), ms=3, label=f"{name} {src}")
            if xkey == "mutau":
                ax.set_xscale("log")
                ax.set_yscale("log")
            ax.set_xlabel(xkey)
        ax.legend(fontsize=6)
        svg = p.with_suffix(".svg")
        fig.savefig(svg, format="svg", metadata={"Date": None})
        plt.close(fig)
        out.append(svg)
    return out


def cmd_figures(args, argv):
    which = [w.strip() for w in args.which.split(",") if w.strip()]
    bad = set(which) - {"fig2", "fig5a", "fig5b", "fig5c", "fig5d"}
    if bad:
        raise UsageError(f"unknown figures {sorted(bad)}")
    if args.trials < 0:
        raise UsageError("--trials must be non-negative")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = _dt.datetime.now(_dt.timezone.utc).isoformat()
    workers = args.workers or available_workers()
    paths = []
    if "fig2" in which:
        paths += _fig2(out, args)
    if "fig5a" in which and args.trials:
        paths += _fig5a(out, args, workers)
    sub = [w for w in which if w in ("fig5b", "fig5c", "fig5d")]
    if sub:
        paths += _fig5bcd(out, args, sub, workers)
    if args.svg:
        paths += _render_svg([p for p in paths if p.suffix == ".csv"])
    _write_json(out / "figures.manifest.json", _manifest(out, argv, args, paths, started))
    for p in paths:
        print(p)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "formulas": cmd_formulas,
    "sweep": cmd_sweep,
    "figures": cmd_figures,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _CLOCK[0] = time.perf_counter()
    try:
        args = _apply_config(parser, argv)
        return COMMANDS[args.command](args, argv)
    except (UsageError, ValueError) as e:
        print(f"paritytrack: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Infeasible as e:
        print(f"paritytrack: infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
