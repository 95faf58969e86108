"""Command-line front end.

    lindpath run      --preset fig1a --out runs/fig1a
    lindpath sweep    --preset fig2c --out runs/fig2c --threads 4
    lindpath converge --config my_run.yaml --out runs/conv
    lindpath verify
    lindpath presets [NAME]

Exit codes: 0 success, 2 invalid input (bad config, memory budget), 3
numerical failure (quadrature, degenerate trace, failed verification).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .adm import MAX_MEMORY_DEPTH, influence_for, run, step_propagators
from .config import PRESETS, RunConfig, dump_config, load_config, preset
from .errors import ConfigurationError, MemoryBudgetError, NumericalError, ValidationError
from .influence import InfluenceTable
from .oracles import PATH_LIMIT, full_path_sum, lindblad_ode_solve
from .timeseries import write_meta

log = logging.getLogger("lindpath")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
CONVERGE_TOLERANCE = 1e-3
DT_RUNGS = 3


def _resolve(args) -> RunConfig:
    if args.config and args.preset:
        raise ValidationError("give either --config or --preset, not both")
    if args.config:
        return load_config(args.config)
    if args.preset:
        return preset(args.preset)
    raise ValidationError("a run needs --config FILE or --preset NAME")


def _out_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ValidationError(f"cannot create output directory {out}: {exc.strerror}") from exc
    return out


def _meta_extra(ts, cfg: RunConfig):
    d = ts.diagnostics
    return {"notes": list(cfg.notes),
            "diagnostics": {"max_trace_drift": float(np.max(d["trace_drift"])),
                            "effective_n_c": d["effective_n_c"],
                            "active_pairs": d["active_pairs"],
                            "peak_tensor_bytes": d["peak_tensor_bytes"]}}


def simulate(cfg: RunConfig, out: Path, cache_dir=None):
    """Run one configuration and write ``trajectory.csv`` and ``meta.json`` into ``out``."""
    model, sim = cfg.build()
    t0 = time.perf_counter()
    ts = run(sim, model, cache_dir=cache_dir)
    log.info("%s: %d steps in %.2f s", out, sim.n_steps, time.perf_counter() - t0)
    ts.to_csv(out / "trajectory.csv")
    write_meta(out / "meta.json", cfg.as_dict(), ts.diagnostics["kernel_key"], _meta_extra(ts, cfg))
    return ts


def cmd_run(args):
    cfg = _resolve(args)
    out = _out_dir(args.out)
    for note in cfg.notes:
        print(f"note: {note}", file=sys.stderr)
    ts = simulate(cfg, out, args.cache_dir)
    print(f"wrote {out / 'trajectory.csv'} ({len(ts)} rows)")
    return EXIT_OK


def _parse_values(text):
    items = [v.strip() for v in text.split(",") if v.strip()]
    try:
        return [float(v) for v in items]
    except ValueError as exc:
        raise ValidationError(f"--values: {exc}") from exc


def _sweep_point(job):
    cfg, out, cache_dir = job
    out.mkdir(parents=True, exist_ok=True)
    ts = simulate(cfg, out, cache_dir)
    return ts.long_time_mean(cfg.observed_state)


def cmd_sweep(args):
    cfg = _resolve(args)
    default = cfg.sweep or {}
    parameter = args.parameter or default.get("parameter")
    if parameter is None:
        raise ValidationError("sweep needs --parameter (no default in the config)")
    values = _parse_values(args.values) if args.values is not None else list(default.get("values", []))
    if parameter != default.get("parameter") and args.values is None:
        values = []
    if not values:
        raise ValidationError("sweep needs a non-empty --values list")
    out = _out_dir(args.out)
    jobs = [(cfg.with_value(parameter, v), out / f"{parameter}_{i:03d}", args.cache_dir)
            for i, v in enumerate(values)]
    # validate everything (including the memory budget) before any work starts
    for job_cfg, _, _ in jobs:
        job_cfg.build()
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            means = list(pool.map(_sweep_point, jobs))
    else:
        means = [_sweep_point(job) for job in jobs]
    with open(out / "sweep_summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", parameter, "long_time_population", "directory"])
        for i, (v, m, job) in enumerate(zip(values, means, jobs)):
            w.writerow([i, repr(float(v)), repr(float(m)), job[1].name])
    print(f"wrote {out / 'sweep_summary.csv'} ({len(values)} points)")
    return EXIT_OK


def _converge_point(job):
    cfg, cache_dir = job
    model, sim = cfg.build()
    try:
        ts = run(sim, model, cache_dir=cache_dir)
    except MemoryBudgetError as exc:
        return None, str(exc)
    return ts, "ok"


def cmd_converge(args):
    cfg = _resolve(args)
    out = _out_dir(args.out)
    dt, n_c = cfg.numerics["dt_ps"], cfg.numerics["n_c"]
    rungs = [("n_c", dt, k) for k in range(max(1, n_c - 2), min(MAX_MEMORY_DEPTH, n_c + 2) + 1)]
    # dt rungs keep n_c, so the retained memory time shrinks with dt (see memory_time_ps)
    rungs += [("dt", dt / 2**k, n_c) for k in range(DT_RUNGS)]
    jobs = [(cfg.with_numerics(dt_ps=r_dt, n_c=r_nc), args.cache_dir) for _, r_dt, r_nc in rungs]
    for job_cfg, _ in jobs:
        job_cfg.build()
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(_converge_point, jobs))
    else:
        results = [_converge_point(job) for job in jobs]

    obs = cfg.observed_state
    rows, prev = [], {}
    for (ladder, r_dt, r_nc), (ts, status) in zip(rungs, results):
        dev = float("nan")
        if ts is not None:
            stride = int(round(dt / r_dt))
            pop = ts.population(obs)[::stride]
            if ladder in prev and prev[ladder] is not None:
                dev = float(np.max(np.abs(pop - prev[ladder])))
            prev[ladder] = pop
            mean = ts.long_time_mean(obs)
        else:
            prev[ladder] = None
            mean = float("nan")
        rows.append({"ladder": ladder, "dt_ps": r_dt, "n_c": r_nc, "memory_time_ps": r_dt * r_nc,
                     "max_deviation_from_previous": dev,
                     "long_time_population": mean, "status": status})

    with open(out / "converge.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})

    def recommend(ladder, key, pick):
        # a rung is converged when the next rung changes the observable by <= tolerance
        rs = [r for r in rows if r["ladder"] == ladder]
        for a, b in zip(rs, rs[1:]):
            if b["max_deviation_from_previous"] <= args.tolerance:
                return a[key]
        done = [r[key] for r in rs if r["status"] == "ok"]
        return pick(done) if done else None

    summary = {"tolerance": args.tolerance, "observable": f"population_{obs}",
               "recommended_n_c": recommend("n_c", "n_c", max),
               "recommended_dt_ps": recommend("dt", "dt_ps", min),
               "config": cfg.as_dict(), "code_version": __version__}
    (out / "converge_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"recommended n_c = {summary['recommended_n_c']}, dt = {summary['recommended_dt_ps']} ps")
    return EXIT_OK


def _check_path_sum(cfg: RunConfig):
    """ADM against literal path enumeration at full memory depth."""
    model, sim = cfg.build()
    N = model.hamiltonian.dim
    depth = min(sim.n_c, 4)
    while depth > 1 and N ** (2 * depth) > min(PATH_LIMIT, 10**6):
        depth -= 1
    sim = type(sim)(sim.dt, depth, depth, sim.initial_state, t0=sim.t0)
    _, inf = influence_for(model, sim)
    if inf is None:
        inf = InfluenceTable(depth, N, np.zeros((depth,) + (N,) * 4), np.ones((depth,) + (N,) * 4))
    got = run(sim, model, influence=inf).states[-1]
    props, _ = step_propagators(model, sim)
    ref = full_path_sum(depth, props, inf, sim.initial_state).entries
    nonzero = np.abs(ref) > 0
    dev = np.abs(got - ref)
    rel = np.max(dev[nonzero] / np.abs(ref[nonzero])) if nonzero.any() else 0.0
    return float(max(rel, np.max(dev[~nonzero], initial=0.0))), 1e-12


def _check_ode(cfg: RunConfig):
    cfg = cfg.with_numerics(dt_ps=0.01, n_c=1,
                            duration_ps=min(cfg.numerics["duration_ps"], 50.0))
    model, sim = cfg.build()
    ts = run(sim, model)
    ref = lindblad_ode_solve(model.hamiltonian, model.channels, sim.initial_state, ts.times)
    return float(np.max(np.abs(ts.states - ref.states))), 1e-4


def cmd_verify(args):
    checks = [("path_sum_gaas_100K", _check_path_sum, preset("fig1d").with_numerics(n_c=4)),
              ("ode_phonon_free", _check_ode, preset("fig1a"))]
    if args.config or args.preset:
        cfg = _resolve(args)
        checks.append(("path_sum_config", _check_path_sum, cfg))
        if not cfg.physics["phonons"]:
            checks.append(("ode_config", _check_ode, cfg))
    failed = 0
    for name, fn, cfg in checks:
        dev, tol = fn(cfg)
        ok = dev <= tol
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} {name}: max deviation {dev:.3e} (tolerance {tol:.0e})")
    return EXIT_OK if not failed else EXIT_NUMERICAL


def cmd_presets(args):
    if args.name:
        cfg = preset(args.name)
        print(f"# {PRESETS[args.name]['description']}")
        print(dump_config(cfg), end="")
        return EXIT_OK
    width = max(map(len, PRESETS))
    for name, spec in PRESETS.items():
        print(f"{name:<{width}}  {spec['description']}")
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run file")
    common.add_argument("--preset", help="named preset (see `lindpath presets`)")
    common.add_argument("--cache-dir", help="kernel cache directory (default: $LINDPATH_CACHE_DIR)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker processes for sweep points and convergence rungs")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="lindpath", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="simulate one configuration")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[common], help="scan one physical parameter")
    p.add_argument("--out", required=True)
    p.add_argument("--parameter", help="field_strength, detuning, temperature or rate")
    p.add_argument("--values", help="comma-separated values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("converge", parents=[common], help="dt and n_c convergence study")
    p.add_argument("--out", required=True)
    p.add_argument("--tolerance", type=float, default=CONVERGE_TOLERANCE)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("verify", parents=[common], help="compare against the reference solvers")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("presets", help="list presets or print one as YAML")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_presets, verbose=False)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except (ValidationError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
