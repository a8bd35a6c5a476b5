"""Exit criteria at full trial counts.

Every test reports one PASS/FAIL line (collected in the terminal summary).
A criterion whose only failing parts are the known, analysed shortfalls is
marked xfail with the reason; any other failure fails the test.

Deselect with ``-m "not acceptance"``; the whole module takes roughly 20
minutes on one core.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
import pytest
from scipy import special

from paritytrack.analytics import ancilla_theory, bit2_overlap_integral, p2, theory
from paritytrack.cli import main
from paritytrack.code import no_tracking_fidelity, propagate
from paritytrack.ensemble import (
    NO_TRACKING,
    available_workers,
    average_posterior,
    default_horizon,
    fit_linear,
    run_ensemble,
)
from paritytrack.filters import FilterSpec
from paritytrack.filters._kernels import bayes_batch, wonham_batch
from paritytrack.optimizer import crude_optimum, optimize
from paritytrack.projective import ProjectiveConfig, run_idealized
from paritytrack.trajectory import SimConfig, block_rng, generate_batch, synthesize_batch

pytestmark = pytest.mark.acceptance

SEED = 11
MUTAU = 1e-3
WORKERS = available_workers()


def _conclude(report, number, checks, known=()):
    """Report a criterion made of named sub-checks.

    ``checks`` maps a name to (ok, detail).  Failures listed in ``known`` turn
    the test into an xfail; anything else is a hard failure.
    """
    failed = [k for k, (ok, _) in checks.items() if not ok]
    detail = "; ".join(f"{k} {'ok' if ok else 'FAIL'} ({d})" for k, (ok, d) in checks.items())
    report(number, not failed, detail)
    unexpected = [k for k in failed if k not in known]
    assert not unexpected, f"criterion {number}: {detail}"
    if failed:
        pytest.xfail(f"criterion {number}: known shortfall in {', '.join(failed)}")


@dataclass
class Run:
    opt: object
    fit: object
    n_trials: int


_RUNS: dict = {}


def _run(name, mutau, trials):
    key = (name, mutau, trials)
    if key not in _RUNS:
        opt = optimize(name, mutau)
        spec = FilterSpec(name, opt.dt_over_tau, opt.a if name == "double" else 0.0)
        cfg = SimConfig(mu=mutau, n_steps=default_horizon(mutau, 0.1), seed=SEED)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            curve = run_ensemble(spec, cfg, trials, workers=WORKERS)
        fit = fit_linear(curve, name, mutau=mutau, dt_box=opt.dt_over_tau)
        _RUNS[key] = Run(opt, fit, trials)
    return _RUNS[key]


GAMMA_RUNS = {"bayes": (10**6, 0.20), "boxcar": (10**5, 0.15), "halfbox": (10**6, 0.25), "double": (10**6, 0.25)}


def _rel(sim, ref):
    return (sim - ref) / ref


# --------------------------------------------------------------------------- 1


def test_c01_no_tracking_baseline(acceptance_report):
    n = 10**5
    cfg = SimConfig(mu=MUTAU, n_steps=3000, seed=SEED)
    curve = run_ensemble(NO_TRACKING, cfg, n, workers=WORKERS)
    f_th = no_tracking_fidelity(MUTAU, curve.times)
    sigma = np.sqrt(f_th * (1.0 - f_th) / n)
    z = np.abs(curve.f_mean - f_th)[1:] / sigma[1:]
    ok = bool(np.all(z <= 3.0))
    acceptance_report(1, ok, f"{len(z)} points up to mu t = {MUTAU * curve.times[-1]:.2f}, max |z| = {z.max():.2f}")
    assert ok


# --------------------------------------------------------------------------- 2


def test_c02_bayes_wonham_equivalence(acceptance_report):
    n, chunk = 1000, 100
    cfg = SimConfig(mu=MUTAU, n_steps=default_horizon(MUTAU, 0.1), seed=SEED)
    steps = np.arange(cfg.n_steps)
    agree = total = 0
    worst = 0.0
    for b in range(n // chunk):
        rng = block_rng(SEED, b)
        codes = generate_batch(cfg, chunk, rng)
        sig = synthesize_batch(codes, cfg, rng)
        eb = bayes_batch(sig, cfg.mu, cfg.tau, cfg.dt)
        ew, p = wonham_batch(sig, cfg.mu, cfg.tau, cfg.dt, "linear", steps)
        same = eb == ew
        agree += int(same.sum())
        total += same.size
        if not same.all():
            top = np.sort(p[~same], axis=-1)[:, -2:]
            worst = max(worst, float(np.max(1.0 - top[:, 0] / top[:, 1])))
    frac = agree / total
    checks = {
        "agreement": (frac >= 0.999, f"{frac:.6f} of {total} steps"),
        "near_ties": (worst <= 1e-6, f"largest top-two gap {worst:.2e}"),
    }
    _conclude(acceptance_report, 2, checks)


# --------------------------------------------------------------------------- 3


def test_c03_master_equation_recovery(acceptance_report):
    cfg = SimConfig(mu=MUTAU, n_steps=1000, seed=SEED)
    steps = [99, 999]
    mean, err = average_posterior(cfg, 10**4, steps, workers=WORKERS)
    checks = {}
    for i, s in enumerate(steps):
        t = (s + 1) * cfg.dt
        ref = propagate(np.eye(8)[0], MUTAU, t)
        z = np.abs(mean[i] - ref) / err[i]
        checks[f"t={t:g}"] = (bool(np.all(z <= 3.0)), f"max |z| {z.max():.2f}")
    _conclude(acceptance_report, 3, checks)


# --------------------------------------------------------------------------- 4


def test_c04_misidentification_rate(acceptance_report):
    n_boxes = 10**6
    checks = {}
    for x in (2.0, 10.0):
        L = int(round(x / 0.1))
        per_trial = 2 * 200  # two channels, 200 boxes each
        cfg = SimConfig(mu=0.0, n_steps=200 * L, seed=SEED)
        wrong = boxes = 0
        b = 0
        while boxes < n_boxes:
            size = min(256, -(-(n_boxes - boxes) // per_trial))
            rng = block_rng(SEED, b)
            sig = synthesize_batch(np.zeros((size, cfg.n_steps), dtype=np.int8), cfg, rng)
            means = sig.reshape(size, 2, -1, L).mean(axis=-1).ravel()[: n_boxes - boxes]
            wrong += int((means < 0).sum())
            boxes += means.size
            b += 1
        rate = wrong / boxes
        ref = 0.5 * special.erfc(math.sqrt(x / 2.0))
        checks[f"dt={x:g}"] = (abs(_rel(rate, ref)) <= 0.10, f"{rate:.4g} vs {ref:.4g}, {100 * _rel(rate, ref):+.1f}%")
    _conclude(acceptance_report, 4, checks)


# --------------------------------------------------------------------------- 5


def test_c05_integral_cross_checks(acceptance_report):
    xs = (10.0, 15.0, 20.0, 30.0, 50.0, 100.0)
    zero = [abs(_rel(bit2_overlap_integral(0.0, x).quadrature, math.sqrt(1.0 / (math.pi * x)))) for x in xs]
    p2_15 = p2(0.0, 15.0)
    worst, where, n_bad, n_all = 0.0, None, 0, 0
    for x in xs:
        for a in np.linspace(0.0, 0.8, 17):
            q, ap = bit2_overlap_integral(float(a), x)
            d = abs(_rel(ap, q))
            n_all += 1
            n_bad += d > 0.10
            if d > worst:
                worst, where = d, (x, float(a))
    checks = {
        "zero_threshold_integral": (max(zero) <= 0.01, f"max deviation {100 * max(zero):.3f}%"),
        "p2_at_15": (abs(p2_15 - 0.85) <= 0.02, f"{p2_15:.4f}"),
        "exponential_approx": (
            worst <= 0.10,
            f"{n_bad}/{n_all} grid points beyond 10%, worst {100 * worst:.0f}% at dt={where[0]:g}, a={where[1]:.2f}",
        ),
    }
    _conclude(acceptance_report, 5, checks, known=("exponential_approx",))


# --------------------------------------------------------------------------- 6 and 7


@pytest.mark.parametrize("name", list(GAMMA_RUNS))
def test_c06_c07_runs(name):
    trials, _ = GAMMA_RUNS[name]
    run = _run(name, MUTAU, trials)
    assert np.isfinite(run.fit.gamma) and run.fit.gamma > 0


def test_c06_logical_error_rate(acceptance_report):
    checks = {}
    for name, (trials, tol) in GAMMA_RUNS.items():
        run = _run(name, MUTAU, trials)
        ref = run.opt.theory.gamma_tau
        r = _rel(run.fit.gamma, ref)
        checks[name] = (
            abs(r) <= tol,
            f"{run.fit.gamma:.3e}+-{run.fit.gamma_stderr:.1e} vs {ref:.3e}, {100 * r:+.0f}% (tol {100 * tol:.0f}%)",
        )
    _conclude(acceptance_report, 6, checks, known=("halfbox",))


def test_c07_initial_drop(acceptance_report):
    checks = {}
    for name, (trials, _) in GAMMA_RUNS.items():
        run = _run(name, MUTAU, trials)
        ref = run.opt.theory.delta_f_in
        r = _rel(run.fit.delta_f_in, ref)
        checks[name] = (abs(r) <= 0.20, f"{run.fit.delta_f_in:.4g} vs {ref:.4g}, {100 * r:+.1f}%")
    _conclude(acceptance_report, 7, checks)


# --------------------------------------------------------------------------- 8


def test_c08_scaling_ratio(acceptance_report):
    checks = {}
    for name in ("bayes", "halfbox"):
        hi = _run(name, 1e-3, 10**6)
        lo = _run(name, 3e-4, 10**6)
        sim = hi.fit.gamma / lo.fit.gamma
        ref = hi.opt.theory.gamma_tau / lo.opt.theory.gamma_tau
        checks[name] = (abs(_rel(sim, ref)) <= 0.20, f"ratio {sim:.2f} vs {ref:.2f}, {100 * _rel(sim, ref):+.1f}%")
    _conclude(acceptance_report, 8, checks)


# --------------------------------------------------------------------------- 9


def test_c09_optimizer_vs_crude(acceptance_report):
    checks = {}
    for mt in (1e-5, 1e-4, 1e-3):
        for name in ("boxcar", "halfbox"):
            x, c = optimize(name, mt).dt_over_tau, crude_optimum(name, mt)["dt_over_tau"]
            checks[f"{name}@{mt:g}"] = (abs(_rel(x, c)) <= 0.20, f"{x:.2f} vs {c:.2f}")
        a, c = optimize("double", mt).a, crude_optimum("double", mt)["a"]
        checks[f"double_a@{mt:g}"] = (abs(a - c) <= 0.08, f"{a:.3f} vs {c:.3f}")
    _conclude(acceptance_report, 9, checks)


# --------------------------------------------------------------------------- 10


def test_c10_ordering(acceptance_report):
    order = ("bayes", "halfbox", "double", "boxcar")
    bad_theory = []
    for mt in np.geomspace(1e-5, 1e-3, 21):
        g = [optimize(name, float(mt)).theory.gamma_tau for name in order]
        if not all(g[i] <= g[i + 1] for i in range(3)):
            bad_theory.append(f"{mt:.2e}")
    runs = [_run(name, MUTAU, GAMMA_RUNS[name][0]).fit for name in order]
    bad_sim = []
    for lo, hi, a, b in zip(order, order[1:], runs, runs[1:]):
        if a.gamma - b.gamma > 2.0 * math.hypot(a.gamma_stderr, b.gamma_stderr):
            bad_sim.append(f"{lo}>{hi}")
    sim_str = " < ".join(f"{r.gamma:.2e}" for r in runs)
    checks = {
        "theory": (not bad_theory, f"21 rates in [1e-5, 1e-3], violations at {bad_theory or 'none'}"),
        "simulation": (not bad_sim, sim_str),
    }
    _conclude(acceptance_report, 10, checks)


# --------------------------------------------------------------------------- 11


def test_c11_projective_reference(acceptance_report):
    cfg = ProjectiveConfig(MUTAU, n_cycles=48, seed=SEED)
    res = run_idealized(cfg, 10**6, workers=WORKERS)
    fit = fit_linear(res.curve, "projective", window=(cfg.cycle, res.curve.times[-1]))
    ref = 12.0 * MUTAU**2
    assert ancilla_theory("idealistic", MUTAU).gamma_tau == pytest.approx(ref, rel=0.05)
    r = _rel(fit.gamma, ref)
    checks = {
        "gamma": (abs(r) <= 0.25, f"{fit.gamma:.3e}+-{fit.gamma_stderr:.1e} vs {ref:.2e}, {100 * r:+.1f}%"),
        "two_flip_failures": (
            res.failures_with_fewer_than_two_flips == 0,
            f"{res.failure_events} failure events, {res.failures_with_fewer_than_two_flips} with fewer than two flips",
        ),
    }
    _conclude(acceptance_report, 11, checks)


# --------------------------------------------------------------------------- 12


def test_c12_cli_determinism(acceptance_report, tmp_path):
    checks = {}
    for name in ("halfbox", "bayes"):
        blobs = {}
        for workers in (1, 8):
            for rep in range(2):
                out = tmp_path / f"{name}_{workers}_{rep}"
                args = ["simulate", "--filter", name, "--mutau", "1e-3", "--trials", "3000", "--seed", "5"]
                args += ["--workers", str(workers), "--out-dir", str(out)]
                if name == "halfbox":
                    args.append("--auto-params")
                assert main(args) == 0
                blobs[(workers, rep)] = (out / f"simulate_{name}_mutau0.001_seed5.csv").read_bytes()
        same = len(set(blobs.values())) == 1
        checks[name] = (same, "workers 1 and 8, two runs each, byte-identical" if same else "CSV bytes differ")
    _conclude(acceptance_report, 12, checks)
