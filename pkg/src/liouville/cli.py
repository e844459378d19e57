"""Command-line front end: ``liouville steady|sweep|evolve|validate|bench``."""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import core
from .core import (
    DivergenceError,
    LiouvilleError,
    SingularSystemError,
    SpecError,
    StepSizeError,
)
from .modelfile import (
    BUNDLED_MODELS,
    ModelFileError,
    Sweep,
    SweepResult,
    bundled_model,
    emit_csv,
    instantiate,
    load_model,
    spec_at,
)
from .runner import evaluate, observable_columns, run_sweep

EXIT_OK, EXIT_USER, EXIT_NUMERIC = 0, 1, 2

BUILDERS = {"naive": core.build_M_naive, "fast": core.build_M_fast}


class UsageError(Exception):
    pass


def _load(args):
    if args.builtin:
        return bundled_model(args.builtin)
    if args.model:
        return load_model(args.model)
    raise UsageError("one of --model or --builtin is required")


def _write(args, text):
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _grid_text(a):
    return "\n".join("  " + " ".join(f"{v: .10e}" for v in row) for row in a)


def cmd_steady(args):
    model = _load(args)
    spec = instantiate(model, args.x)
    builder = BUILDERS[args.builder]
    rho = core.steady_state(spec, builder=builder)
    M = builder(spec)
    res = core.residual(M, rho)
    diag = core.density_diagnostics(rho)
    if args.json:
        payload = {
            "x": args.x,
            "rho_re": rho.real.tolist(),
            "rho_im": rho.imag.tolist(),
            "trace": diag["trace"].real,
            "residual": res,
            "min_eigenvalue": diag["min_eigenvalue"],
        }
        _write(args, json.dumps(payload, indent=2) + "\n")
    else:
        lines = [
            f"steady state at x = {args.x!r} ({spec.n_levels} levels, {args.builder} builder)",
            "Re(rho):", _grid_text(rho.real),
            "Im(rho):", _grid_text(rho.imag),
            f"trace: {diag['trace'].real:.17g}",
            f"residual: {res:.3e}",
            f"min eigenvalue: {diag['min_eigenvalue']:.3e}",
        ]
        _write(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _parse_sweep(text, name):
    try:
        start, stop, points = text.split(",")
        return Sweep(name, float(start), float(stop), int(points))
    except ValueError:
        raise UsageError(f"--sweep expects FROM,TO,POINTS, got {text!r}") from None


def cmd_sweep(args):
    model = _load(args)
    sweep = model.sweep
    if args.sweep:
        sweep = _parse_sweep(args.sweep, sweep.name if sweep else "x")
    if sweep is None:
        raise UsageError("model has no sweep directive; pass --sweep FROM,TO,POINTS")
    if sweep.points < 1:
        raise UsageError("sweep needs at least 1 point")
    result, failures = run_sweep(model, sweep.grid(), builder=BUILDERS[args.builder])
    _write(args, emit_csv(result))
    if failures:
        pts = ", ".join(f"{x:.6g}" for x, _ in failures)
        print(f"liouville: {len(failures)} of {sweep.points} sweep points failed "
              f"(x = {pts}): {failures[0][1]}", file=sys.stderr)
        return EXIT_USER
    return EXIT_OK


def cmd_evolve(args):
    model = _load(args)
    spec = instantiate(model, args.x)
    N = spec.n_levels
    if not 1 <= args.init_level <= N:
        raise UsageError(f"--init-level must lie in [1, {N}]")
    rate = core.max_rate(spec)
    dt = args.dt if args.dt is not None else core.STEP_GUARD / max(rate, 1e-300)
    rho0 = np.zeros((N, N), dtype=complex)
    rho0[args.init_level - 1, args.init_level - 1] = 1.0
    traj = core.evolve(spec, rho0, args.t_end, dt, builder=BUILDERS[args.builder])
    result = SweepResult("t", observable_columns(model.observe))
    stride = max(1, args.every)
    idx = list(range(0, len(traj), stride))
    if idx[-1] != len(traj) - 1:
        idx.append(len(traj) - 1)
    for k in idx:
        result.add(traj.times[k], evaluate(model.observe, traj.states[k], spec))
    _write(args, emit_csv(result, key="t"))
    return EXIT_OK


def cmd_validate(args):
    model = _load(args)
    N = model.n_levels
    report = core.validate_spec(spec_at(model, args.x))
    if report.ok:
        print(f"ok: {N} levels, all invariants hold at x = {args.x!r}")
        return EXIT_OK
    print(f"{len(report.violations)} violation(s) at x = {args.x!r}:")
    for v in report.violations:
        print(f"  [{v.kind}] {v}")
    return EXIT_USER


def bench(sizes, reps, seed):
    """Median build times of both builders over random closed specs.

    Returns a list of ``(N, naive_seconds, fast_seconds, ratio)``.  Raises
    ``AssertionError`` naming ``(N, seed)`` if the two matrices disagree.
    """
    rows = []
    for N in sizes:
        t_naive, t_fast = [], []
        for r in range(reps):
            s = seed + r
            spec = core.random_spec(N, np.random.default_rng([N, s]))
            t0 = time.perf_counter()
            Mn = core.build_M_naive(spec)
            t1 = time.perf_counter()
            Mf = core.build_M_fast(spec)
            t2 = time.perf_counter()
            t_naive.append(t1 - t0)
            t_fast.append(t2 - t1)
            err = np.max(np.abs(Mn - Mf))
            if not err <= 1e-12:
                raise AssertionError(f"builders disagree at N={N}, seed={s}: {err:.3e}")
        n, f = float(np.median(t_naive)), float(np.median(t_fast))
        rows.append((N, n, f, n / f))
    return rows


def cmd_bench(args):
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--sizes expects comma-separated integers, got {args.sizes!r}") from None
    if not sizes or min(sizes) < 2:
        raise UsageError("--sizes must all be >= 2")
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    try:
        rows = bench(sizes, args.reps, args.seed)
    except AssertionError as exc:
        print(f"liouville: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out:
        text = "N,naive_s,fast_s,ratio\n" + "".join(
            f"{N},{n:.6e},{f:.6e},{r:.4g}\n" for N, n, f, r in rows)
        _write(args, text)
    else:
        print(f"{'N':>4} {'naive [ms]':>12} {'fast [ms]':>12} {'ratio':>10}")
        for N, n, f, r in rows:
            print(f"{N:>4} {n * 1e3:>12.4f} {f * 1e3:>12.4f} {r:>10.1f}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="liouville",
        description="Vectorized Liouville equation solver for N-level atoms.")
    sub = parser.add_subparsers(dest="command", required=True)

    def model_args(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--model", metavar="PATH", help="model description file")
        g.add_argument("--builtin", choices=sorted(BUNDLED_MODELS), help="bundled model")
        p.add_argument("--out", metavar="PATH", help="output file (default stdout)")

    p = sub.add_parser("steady", help="steady state at one value of x")
    model_args(p)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--builder", choices=BUILDERS, default="fast")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("sweep", help="steady states over the sweep grid, as CSV")
    model_args(p)
    p.add_argument("--sweep", metavar="FROM,TO,POINTS",
                   help="override the sweep range (write --sweep=-5,5,21 for a negative start)")
    p.add_argument("--builder", choices=BUILDERS, default="fast")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("evolve", help="time evolution from a single populated level")
    model_args(p)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--t-end", type=float, default=50.0)
    p.add_argument("--dt", type=float, default=None,
                   help="step size (default: the stability bound 0.1/max rate)")
    p.add_argument("--init-level", type=int, default=1,
                   help="level holding all population at t = 0 (default 1)")
    p.add_argument("--every", type=int, default=1, help="write every k-th step")
    p.add_argument("--builder", choices=BUILDERS, default="fast")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("validate", help="check model invariants and closure")
    model_args(p)
    p.add_argument("--x", type=float, default=0.0)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="time the naive and fast builders")
    p.add_argument("--sizes", default="2,3,5,10,15")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SingularSystemError as exc:
        print(f"liouville: {exc}", file=sys.stderr)
        return EXIT_USER
    except StepSizeError as exc:
        print(f"liouville: {exc}", file=sys.stderr)
        return EXIT_USER
    except (ModelFileError, SpecError, UsageError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"liouville: {msg}", file=sys.stderr)
        return EXIT_USER
    except (DivergenceError, LiouvilleError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"liouville: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
