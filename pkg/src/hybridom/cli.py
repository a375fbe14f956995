"""Command-line entry point: ``hybridom <subcommand> ...``.

Exit codes: 0 success, 1 I/O failure, 2 validation failure, 3 numerical
failure (non-convergence or singular denominator), 4 oracle mismatch.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .exceptions import HybridOMError, ValidationError
from .features import TOL_CPS, TOL_CPT, TOL_CPT_R, analyze
from .oracle import oracle_check
from .params import (
    Linear,
    NoQubit,
    Nonlinear,
    drive_to_dict,
    params_to_dict,
    validate,
)
from .response import sweep
from .steady_state import drive_from_steady, solve_steady

log = logging.getLogger("hybridom")

EXIT_OK, EXIT_IO, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_ORACLE = 0, 1, 2, 3, 4


# -- job resolution -------------------------------------------------------------

def _apply_variant(curve, variant, strength):
    if variant is None:
        return curve
    if variant == "none":
        coupling = NoQubit()
    elif variant == "linear":
        coupling = Linear(g=1.0 if strength is None else strength)
    else:
        coupling = Nonlinear(g_N=1.0)
        if strength is not None:
            curve = replace(curve, drive=replace(curve.drive, G_N=strength))
    return replace(curve, params=replace(curve.params, coupling=coupling))


def load_figure(job: io.SweepJob, strength=None) -> io.Figure:
    if (job.preset is None) == (job.config is None):
        raise ValueError("give exactly one of --preset or --config")
    fig = io.load_preset(job.preset) if job.preset else io.load_config(job.config)
    curves = []
    for c in fig.curves:
        c = _apply_variant(c, job.variant, strength)
        for item in job.overrides:
            key, _, value = item.partition("=")
            c = io.apply_override(c, key.strip(), value.strip())
        curves.append(c)
    return replace(fig, curves=tuple(curves))


def resolve(curve: io.Curve, sideband_approx=False):
    """Validated ``(params, drive)``; solves the steady state in physical mode."""
    params, drive = curve.params, curve.drive
    if curve.derive_from_steady:
        report = validate(params)
        if not report.ok:
            raise ValidationError(report)
        state = solve_steady(params, sideband_approx=sideband_approx)
        drive = drive_from_steady(params, state, drive.eps_L, drive.eps_R, drive.theta)
    report = validate(params, drive)
    for w in report.warnings:
        log.warning("%s: %s", curve.label, w)
    if not report.ok:
        raise ValidationError(report)
    return params, drive


def _grid(job: io.SweepJob, fig: io.Figure, panel: io.Panel):
    xmin = panel.xmin if job.xmin is None else job.xmin
    xmax = panel.xmax if job.xmax is None else job.xmax
    points = fig.points if job.points is None else job.points
    if points < 2 or not xmin < xmax:
        raise ValueError("need points >= 2 and xmin < xmax")
    return np.linspace(xmin, xmax, points)


def _widest_panel(fig, idx):
    panels = [p for p in fig.panels if idx in p.curves]
    return max(panels, key=lambda p: p.xmax - p.xmin)


def _tolerances(job):
    return dict(
        tol_cpt=TOL_CPT if job.tol_cpt is None else job.tol_cpt,
        tol_cpt_r=TOL_CPT_R if job.tol_cpt_r is None else job.tol_cpt_r,
        tol_cps=TOL_CPS if job.tol_cps is None else job.tol_cps,
    )


def _curve_csv_name(name, rank):
    return f"{name}.csv" if rank == 0 else f"{name}_c{rank + 1}.csv"


def run_job(job: io.SweepJob) -> int:
    """Write sweep CSVs, a feature report, plot-data files and a manifest."""
    fig = load_figure(job)
    out = Path(job.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tols = _tolerances(job)
    files, reports, curves_meta = [], [], []

    for rank, idx in enumerate(fig.curve_indices()):
        curve = fig.curves[idx]
        params, drive = resolve(curve)
        grid = _grid(job, fig, _widest_panel(fig, idx))
        res = sweep(params, drive, grid)
        csv_name = _curve_csv_name(fig.name, rank)
        io.write_sweep_csv(res, out / csv_name)
        files.append(csv_name)
        report = analyze(params, drive, grid, **tols)
        reports.append({"curve": rank + 1, "label": curve.label, "csv": csv_name,
                        "report": report.to_dict()})
        curves_meta.append({"curve": rank + 1, "label": curve.label,
                            "system": params_to_dict(params), "drive": drive_to_dict(drive)})

    # one plot file per curve and distinct x range; columns are the panel quantities
    ranges = {}
    for p in fig.panels:
        ranges.setdefault((p.xmin, p.xmax), []).append(p)
    for (xmin, xmax), panels in ranges.items():
        tag = "" if len(ranges) == 1 else "".join(p.name for p in panels)
        for rank, idx in enumerate(fig.curve_indices()):
            if not any(idx in p.curves for p in panels):
                continue
            params, drive = resolve(fig.curves[idx])
            sub_job = replace(job, xmin=None, xmax=None)
            grid = _grid(sub_job, fig, panels[0])
            res = sweep(params, drive, grid)
            cols = {}
            for p in panels:
                if idx in p.curves:
                    for q in p.quantities:
                        cols[q] = res.column(q)
            name = f"{fig.name}{tag}_c{rank + 1}.dat"
            io.write_plot_data(out / name, res.x, cols, comment=fig.curves[idx].label)
            files.append(name)

    feat_name = f"{fig.name}_features.json"
    io.write_json({"schema_version": io.SCHEMA_VERSION, "preset": fig.name, "curves": reports},
                  out / feat_name)
    files.append(feat_name)
    manifest = {
        "schema_version": io.SCHEMA_VERSION,
        "csv_header": io.CSV_HEADER,
        "figure": fig.name,
        "title": fig.title,
        "stated": list(fig.stated),
        "inferred": list(fig.inferred),
        "curves": curves_meta,
        "files": files,
    }
    io.write_json(manifest, out / f"{fig.name}_manifest.json")
    return EXIT_OK


# -- subcommands ------------------------------------------------------------------

def _job_from_args(args) -> io.SweepJob:
    return io.SweepJob(
        preset=getattr(args, "preset", None),
        config=getattr(args, "config", None),
        xmin=getattr(args, "xmin", None),
        xmax=getattr(args, "xmax", None),
        points=getattr(args, "points", None),
        out_dir=getattr(args, "out", None) or ".",
        tol_cpt=getattr(args, "tol_cpt", None),
        tol_cpt_r=getattr(args, "tol_cpt_r", None),
        tol_cps=getattr(args, "tol_cps", None),
        variant=getattr(args, "variant", None),
        overrides=list(getattr(args, "set", None) or []),
    )


def _single_curve(args):
    job = _job_from_args(args)
    fig = load_figure(job, getattr(args, "strength", None))
    order = fig.curve_indices()
    if not 1 <= args.curve <= len(order):
        raise ValueError(f"--curve must be between 1 and {len(order)}")
    idx = order[args.curve - 1]
    return job, fig, idx


def cmd_steady(args):
    _, fig, idx = _single_curve(args)
    params = fig.curves[idx].params
    report = validate(params)
    if not report.ok:
        raise ValidationError(report)
    state = solve_steady(params, tol=args.tol, max_iter=args.max_iter,
                         sideband_approx=args.sideband_approx)
    out = {"schema_version": io.SCHEMA_VERSION}
    out.update(state.to_dict())
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


def cmd_sweep(args):
    job, fig, idx = _single_curve(args)
    params, drive = resolve(fig.curves[idx], args.sideband_approx)
    grid = _grid(job, fig, _widest_panel(fig, idx))
    res = sweep(params, drive, grid)
    path = args.out or f"{fig.name}.csv"
    io.write_sweep_csv(res, path)
    log.info("wrote %d rows to %s", len(res), path)
    return EXIT_OK


def cmd_features(args):
    job, fig, idx = _single_curve(args)
    params, drive = resolve(fig.curves[idx], args.sideband_approx)
    grid = _grid(job, fig, _widest_panel(fig, idx))
    report = analyze(params, drive, grid, **_tolerances(job))
    payload = {"schema_version": io.SCHEMA_VERSION, "preset": fig.name,
               "label": fig.curves[idx].label, "report": report.to_dict()}
    if args.report:
        io.write_json(payload, args.report)
    else:
        print(json.dumps(io._jsonable(payload), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_oracle(args):
    job = _job_from_args(args)
    job.points = None
    fig = load_figure(job, getattr(args, "strength", None))
    panel = fig.panels[0]
    xmin = panel.xmin if args.xmin is None else args.xmin
    xmax = panel.xmax if args.xmax is None else args.xmax
    grid = np.linspace(xmin, xmax, args.points)
    failures = 0
    diff = []
    for rank, idx in enumerate(panel.curves):
        params, drive = resolve(fig.curves[idx])
        params = replace(params, gamma_m=max(params.gamma_m, args.loss_floor),
                         k_d=max(params.k_d, args.loss_floor))
        rows = oracle_check(params, drive, grid, tol=args.tol)
        for r in rows:
            status = "ok" if r.ok else "MISMATCH"
            print(f"{fig.curves[idx].label:24s} x={r.x:+.6f} rel_err={r.rel_error:.3e} {status}")
            failures += not r.ok
        diff.append({"label": fig.curves[idx].label, "gamma_m": params.gamma_m,
                     "k_d": params.k_d, "points": [r.to_dict() for r in rows]})
    if args.json:
        io.write_json({"schema_version": io.SCHEMA_VERSION, "tol": args.tol, "curves": diff},
                      args.json)
    return EXIT_ORACLE if failures else EXIT_OK


def cmd_run(args):
    return run_job(_job_from_args(args))


def cmd_presets(args):
    for name in io.preset_names():
        fig = io.load_preset(name)
        panels = ",".join(p.name for p in fig.panels)
        print(f"{name:6s} panels={panels:4s} curves={len(fig.curves)}  {fig.title}")
    return EXIT_OK


# -- parser -------------------------------------------------------------------------

def _add_source(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="built-in preset, e.g. fig2 or fig10a")
    src.add_argument("--config", help="JSON config file with system/drive/sweep keys")
    p.add_argument("--curve", type=int, default=1, help="curve number within the preset (1-based)")
    p.add_argument("--variant", choices=("none", "linear", "nonlinear"),
                   help="replace the qubit coupling variant")
    p.add_argument("--strength", type=float,
                   help="coupling for --variant: g (linear) or effective G_N (nonlinear)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a field, e.g. drive.G=3 or system.coupling=linear:1")
    p.add_argument("--sideband-approx", action="store_true",
                   help="pin the effective detunings to omega_m in the steady state")


def _add_grid(p):
    p.add_argument("--xmin", type=float)
    p.add_argument("--xmax", type=float)
    p.add_argument("--points", type=int)


def _add_tols(p):
    p.add_argument("--tol-cpt", type=float)
    p.add_argument("--tol-cpt-r", type=float)
    p.add_argument("--tol-cps", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridom", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady", help="solve the mean-field steady state")
    _add_source(p)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=1000)
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("sweep", help="write the probe response on a grid as CSV")
    _add_source(p)
    _add_grid(p)
    p.add_argument("--out", help="CSV path (default <preset>.csv)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("features", help="locate CPT/CPS points and OMIA/OMIT peaks")
    _add_source(p)
    _add_grid(p)
    _add_tols(p)
    p.add_argument("--report", help="JSON output path (default stdout)")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("oracle-check", help="compare closed form with time integration")
    _add_source(p)
    p.add_argument("--xmin", type=float)
    p.add_argument("--xmax", type=float)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--loss-floor", type=float, default=1e-3,
                   help="minimum gamma_m and k_d used for both routes")
    p.add_argument("--json", help="write a machine-readable comparison here")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("run", help="regenerate all data files for a preset")
    _add_source(p)
    _add_grid(p)
    _add_tols(p)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("presets", help="preset registry")
    p.add_argument("action", choices=("list",))
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except HybridOMError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
