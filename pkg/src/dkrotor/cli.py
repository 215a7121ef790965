"""Command-line front end: run, sweep, portrait, fit, check-antiresonance.

Exit codes: 0 success, 1 configuration error, 2 numerical guard tripped,
3 partial sweep failure.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace

import numpy as np

from . import potentials as pots
from .analysis import AnalysisError, analyze_series, scaling_regression
from .config import ConfigError, RunConfig, config_from_meta, load_config, run_meta
from .pseudoclassical import (
    RescaledParams,
    default_portrait_seeds,
    evolve_ensemble,
    phase_portrait,
    uniform_ensemble,
    write_portrait_csv,
)
from .quantum import (
    AliasingError,
    DoubleKickOperator,
    ballistic_coefficient,
    evolve,
    momentum_eigenstate,
    random_state,
)
from .series import read_csv, write_csv

RESULT_FIELDS = [
    "hash",
    "status",
    "engine",
    "potential",
    "K",
    "M",
    "N",
    "tilde",
    "seed",
    "steps",
    "gamma_ballistic",
    "gamma_ballistic_err",
    "gamma_super",
    "gamma_super_err",
    "t_c",
    "t_s",
    "E_s",
    "D",
    "csv",
    "note",
]


def _atomic_write_csv(series, path):
    tmp = f"{path}.tmp{os.getpid()}"
    write_csv(series, tmp)
    os.replace(tmp, path)


def execute_run(config, out_prefix=None):
    """Run the configured engine(s); returns [(engine, series, path)].

    With engine=both the two series share one recording grid so the curves
    overlay directly; initial conditions are matched by construction (the
    zero-momentum eigenstate against p0 = 0 with uniform angles).
    """
    config.validate()
    steps = config.resolve_steps()
    record_times = config.record_times(steps)
    planck = config.planck()
    potential = config.make_potential()
    engines = ("quantum", "pseudoclassical") if config.engine == "both" else (config.engine,)
    prefix = out_prefix if out_prefix is not None else config.out
    results = []
    for engine in engines:
        if engine == "quantum":
            J = config.resolve_grid()
            state = momentum_eigenstate(J)
            series = evolve(
                state, potential, config.K, planck, steps, record_times=record_times
            )
            series.meta = run_meta(config, engine, steps, J=J)
        else:
            params = RescaledParams.from_planck(config.K, planck)
            ens = uniform_ensemble(
                config.ensemble, seed=config.seed, stratified=config.stratified
            )
            series = evolve_ensemble(
                ens, potential, params, steps, record_times=record_times
            )
            series.meta = run_meta(config, engine, steps)
        path = None
        if prefix:
            path = f"{prefix}.{engine}.csv"
            _atomic_write_csv(series, path)
        results.append((engine, series, path))
    return results


def _point_hash(config):
    payload = repr(sorted(asdict(config).items())).encode()
    return hashlib.sha256(payload).hexdigest()[:16]


def _format_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _report_row(point_hash, status, config, engine, steps, report=None, D=None,
                csv_path=None, note=""):
    row = {
        "hash": point_hash,
        "status": status,
        "engine": engine,
        "potential": config.potential,
        "K": config.K,
        "M": config.M,
        "N": config.N,
        "tilde": config.tilde,
        "seed": config.seed,
        "steps": steps,
        "csv": csv_path or "",
        "note": note,
        "D": D,
    }
    if report is not None:
        for name in (
            "gamma_ballistic",
            "gamma_ballistic_err",
            "gamma_super",
            "gamma_super_err",
            "t_c",
            "t_s",
            "E_s",
        ):
            row[name] = getattr(report, name)
    return {k: row.get(k) for k in RESULT_FIELDS}


def _run_sweep_point(config_dict, outdir):
    """One sweep point: run, analyze, return result rows (one per engine)."""
    config = RunConfig(**config_dict)
    point = _point_hash(config)
    rows = []
    try:
        steps = config.resolve_steps()
        prefix = os.path.join(outdir, f"point_{point}")
        results = execute_run(config, out_prefix=prefix)
        planck = config.planck()
        potential = config.make_potential()
        tags = pots.classify_symmetries(potential)
        D = None
        if pots.predict_regime(tags) == pots.SUPERBALLISTIC or config.potential.startswith("cos"):
            D = ballistic_coefficient(potential, config.K, planck)
        for engine, series, path in results:
            report = analyze_series(series)
            rows.append(
                _report_row(point, "ok", config, engine, steps, report, D, path)
            )
    except AliasingError as exc:
        rows.append(_report_row(point, "failed", config, config.engine, None, note=str(exc)))
    except (ConfigError, AnalysisError, ValueError) as exc:
        rows.append(_report_row(point, "failed", config, config.engine, None, note=str(exc)))
    return rows


def _load_done_points(results_path):
    done = set()
    if os.path.exists(results_path):
        with open(results_path) as fh:
            header = fh.readline().strip().split(",")
            for line in fh:
                cells = line.rstrip("\n").split(",")
                row = dict(zip(header, cells))
                if row.get("status") == "ok":
                    done.add((row["hash"], row["engine"]))
    return done


def execute_sweep(base_config, points, results_path, outdir, workers=None):
    """Run every point, analyze, and append FitReport rows to results_path.

    Points already present with status ok are skipped (content-hash match).
    Failures are recorded per point and do not stop the sweep. Returns the
    number of failed points.
    """
    os.makedirs(outdir, exist_ok=True)
    done = _load_done_points(results_path)
    pending = []
    for overrides in points:
        config = replace(base_config, **overrides)
        config.validate()
        point = _point_hash(config)
        engines = (
            ("quantum", "pseudoclassical") if config.engine == "both" else (config.engine,)
        )
        if all((point, engine) in done for engine in engines):
            continue
        pending.append(asdict(config))

    header_needed = not os.path.exists(results_path)
    failures = 0
    rows_out = []
    if pending:
        max_workers = workers or os.cpu_count() or 1
        if max_workers > 1 and len(pending) > 1:
            with ProcessPoolExecutor(max_workers=max_workers) as pool:
                for rows in pool.map(_run_sweep_point, pending, [outdir] * len(pending)):
                    rows_out.extend(rows)
        else:
            for config_dict in pending:
                rows_out.extend(_run_sweep_point(config_dict, outdir))
    with open(results_path, "a", newline="\n") as fh:
        if header_needed:
            fh.write(",".join(RESULT_FIELDS) + "\n")
        for row in rows_out:
            if row["status"] != "ok":
                failures += 1
            fh.write(",".join(_format_cell(row[k]) for k in RESULT_FIELDS) + "\n")
    return failures


def execute_portrait(config, out_path, steps=2000, seeds=None):
    config.validate()
    planck = config.planck()
    params = RescaledParams.from_planck(config.K, planck)
    potential = config.make_potential()
    if not seeds:
        seeds = default_portrait_seeds()
    orbits = phase_portrait(potential, params, seeds, steps)
    meta = {
        "potential": config.potential,
        "K": config.K,
        "M": config.M,
        "N": config.N,
        "tilde": config.tilde,
        "steps": steps,
        "seeds": len(seeds),
    }
    write_portrait_csv(orbits, out_path, meta=meta)
    return out_path


def execute_check_antiresonance(config, J=4096, n_states=100, tol=1e-10):
    """Measure max ||U psi - psi|| at tilde = 0 over random states.

    Returns (deviation, identity_expected). At the principal resonance the
    operator collapses to the identity exactly when the potential is
    shift-antisymmetric.
    """
    config = replace(config, tilde=0.0)
    planck = config.planck()
    potential = config.make_potential()
    op = DoubleKickOperator(potential, config.K, planck, J)
    deviation = 0.0
    for k in range(n_states):
        psi = random_state(J, seed=config.seed + k).amplitudes
        deviation = max(deviation, float(np.linalg.norm(op.apply(psi) - psi)))
    tags = pots.classify_symmetries(potential)
    expected = tags.shift_antisymmetric and config.M == 1 and config.N == 1
    return deviation, expected


def _add_config_flags(parser):
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config field (repeatable)",
    )
    for name in ("engine", "potential", "steps", "record", "vertices", "out"):
        parser.add_argument(f"--{name}")
    parser.add_argument("--K", type=float)
    parser.add_argument("--g", type=float)
    parser.add_argument("--tilde", type=float)
    parser.add_argument("--M", type=int)
    parser.add_argument("--N", type=int)
    parser.add_argument("--ensemble", type=int)
    parser.add_argument("--grid", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--stratified", action="store_true", default=None)


def _config_from_args(args):
    overrides = list(args.set)
    for name in (
        "engine",
        "potential",
        "steps",
        "record",
        "vertices",
        "out",
        "K",
        "g",
        "tilde",
        "M",
        "N",
        "ensemble",
        "grid",
        "seed",
        "stratified",
    ):
        value = getattr(args, name, None)
        if value is not None:
            overrides.append(f"{name}={value}")
    return load_config(args.config, overrides)


def _parse_grid_list(text, cast=float):
    return [cast(x) for x in text.split(",") if x.strip()]


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="dkrotor",
        description="Double kicked rotor runs, sweeps, portraits, and fits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the configured engine(s), write CSVs")
    _add_config_flags(p_run)

    p_sweep = sub.add_parser("sweep", help="run a parameter grid and fit each point")
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--tilde-grid", help="comma list of detunings")
    p_sweep.add_argument("--k-grid", help="comma list of kick strengths")
    p_sweep.add_argument("--potential-grid", help="comma list of potential names")
    p_sweep.add_argument("--results", required=True, help="results CSV to append to")
    p_sweep.add_argument("--outdir", default="sweep_out", help="per-point CSV directory")
    p_sweep.add_argument("--workers", type=int, default=None)

    p_portrait = sub.add_parser("portrait", help="emit a phase portrait CSV")
    _add_config_flags(p_portrait)
    p_portrait.add_argument("--portrait-steps", type=int, default=2000)
    p_portrait.add_argument(
        "--seeds-list",
        help="semicolon list theta:p;theta:p of initial points (default: built-in set)",
    )
    p_portrait.add_argument("--portrait-out", required=True)

    p_fit = sub.add_parser("fit", help="analyze existing energy-series CSVs")
    p_fit.add_argument("csv", nargs="+")

    p_check = sub.add_parser(
        "check-antiresonance", help="tilde=0 identity test for the configured potential"
    )
    _add_config_flags(p_check)
    p_check.add_argument("--J", type=int, default=4096)
    p_check.add_argument("--states", type=int, default=100)

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except AliasingError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 2


def _dispatch(args):
    if args.command == "run":
        config = _config_from_args(args)
        for engine, series, path in execute_run(config):
            last = series.E[-1]
            where = path or "(not written: set out=PREFIX)"
            print(f"{engine}: {len(series)} records to t={series.t[-1]}, "
                  f"E(end)={last:.6g} -> {where}")
        return 0

    if args.command == "sweep":
        config = _config_from_args(args)
        points = [{}]
        if args.tilde_grid:
            points = [
                {**p, "tilde": v}
                for p in points
                for v in _parse_grid_list(args.tilde_grid)
            ]
        if args.k_grid:
            points = [
                {**p, "K": v} for p in points for v in _parse_grid_list(args.k_grid)
            ]
        if args.potential_grid:
            points = [
                {**p, "potential": v.strip()}
                for p in points
                for v in args.potential_grid.split(",")
            ]
        failures = execute_sweep(config, points, args.results, args.outdir, args.workers)
        print(f"sweep: {len(points)} points, {failures} failures -> {args.results}")
        return 3 if failures else 0

    if args.command == "portrait":
        config = _config_from_args(args)
        if config.engine == "quantum":
            raise ConfigError("portraits need the pseudoclassical engine")
        seeds = None
        if args.seeds_list:
            seeds = []
            for chunk in args.seeds_list.split(";"):
                theta, _, p = chunk.partition(":")
                seeds.append((float(theta), float(p)))
        path = execute_portrait(
            config, args.portrait_out, steps=args.portrait_steps, seeds=seeds
        )
        print(f"portrait -> {path}")
        return 0

    if args.command == "fit":
        reports = []
        for path in args.csv:
            series = read_csv(path)
            report = analyze_series(series)
            print(f"--- {path}")
            print(report.to_text(), end="")
            reports.append(report)
        tildes = {r.meta.get("tilde") for r in reports}
        if len(reports) >= 4 and len(tildes) >= 4:
            try:
                slopes = scaling_regression(reports)
            except AnalysisError:
                slopes = {}
            if slopes:
                print("--- scaling vs tilde")
                for name, (slope, err) in slopes.items():
                    print(f"slope[log {name} / log tilde] = {slope:.4f} +- {err:.4f}")
        return 0

    if args.command == "check-antiresonance":
        config = _config_from_args(args)
        deviation, expected = execute_check_antiresonance(
            config, J=args.J, n_states=args.states
        )
        is_identity = deviation < 1e-10
        label = "identity" if is_identity else "not identity"
        print(
            f"{config.potential} at tilde=0 (M={config.M}, N={config.N}): "
            f"max ||U psi - psi|| = {deviation:.3e} ({label}; "
            f"expected {'identity' if expected else 'not identity'})"
        )
        return 0 if is_identity == expected else 2

    raise ConfigError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
