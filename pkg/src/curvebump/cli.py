"""Command-line front end: fit bumps, attach confidence regions, run experiments.

Exit codes: 0 success, 2 usage/configuration, 3 data, 4 resource limits.
All output files are written atomically and are byte-identical across
repeated runs with the same inputs and seed.
"""

import argparse
import csv
import json
import math
import sys

import numpy as np

from .curvature import FUNCTIONALS, CurvatureFieldSpec
from .errors import ConfigurationError, DataError, DegenerateSampleError, ResourceLimitError
from .experiments import run_convergence_experiment, run_coverage_experiment
from .inference import (
    LOW_REPLICATE_WARNING_THRESHOLD,
    BootstrapPlan,
    bootstrap_sup_errors,
    confidence_regions,
    margin_eigenvalue,
    margin_gaussian,
    margin_laplacian,
)
from .kde import BandwidthSpec, KernelDensityModel, SampleMatrix, normal_scale_bandwidth, operator_tags
from .levelset import (
    DEFAULT_RESOLUTION,
    GridSpec,
    connected_components,
    default_grid,
    evaluate_field,
    extract_zero_level,
)
from .mixtures import boomerang_mixture, standard_normal_mixture
from ._util import write_atomic

SCHEMA_VERSION = 1

CONFIDENCE_FUNCTIONALS = ("laplacian", "concave", "convex", "hessian-determinant")


# ---------------------------------------------------------------------------
# CSV ingestion

def read_samples(path, columns=None):
    """Load selected numeric columns from a CSV file as a SampleMatrix.

    A header row is auto-detected (first row with any non-numeric cell);
    columns may be selected by header name or by 0-based index.
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = [(i + 1, row) for i, row in enumerate(rows) if row and any(c.strip() for c in row)]
    if not rows:
        raise DegenerateSampleError(f"{path}: CSV contains no data rows")

    header = None
    first = rows[0][1]
    if not all(_is_number(c) for c in first):
        header = [c.strip() for c in first]
        rows = rows[1:]
    if not rows:
        raise DegenerateSampleError(f"{path}: CSV contains no data rows")

    indices = _resolve_columns(columns, header, len(rows[0][1]))
    if len(indices) not in (1, 2, 3):
        raise ConfigurationError(
            f"select 1 to 3 columns (got {len(indices)}); use --columns"
        )

    data = np.empty((len(rows), len(indices)))
    for r, (lineno, row) in enumerate(rows):
        for c, idx in enumerate(indices):
            if idx >= len(row):
                raise DataError(f"{path} line {lineno}: missing column {idx}")
            cell = row[idx].strip()
            try:
                value = float(cell)
            except ValueError:
                raise DataError(
                    f"{path} line {lineno}: cannot parse {cell!r} in column {idx}"
                ) from None
            if not math.isfinite(value):
                raise DataError(
                    f"{path} line {lineno}, column {idx}: non-finite value {cell!r}"
                )
            data[r, c] = value
    if data.shape[0] < 2:
        raise DegenerateSampleError(f"{path}: need at least 2 data rows")
    return SampleMatrix(data)


def _is_number(cell):
    try:
        float(cell.strip())
        return True
    except ValueError:
        return False


def _resolve_columns(columns, header, width):
    if columns is None:
        return list(range(width))
    selected = []
    for token in columns:
        token = token.strip()
        if token.lstrip("-").isdigit():
            idx = int(token)
            if idx < 0 or idx >= width:
                raise ConfigurationError(f"column index {idx} out of range (0..{width - 1})")
            selected.append(idx)
        else:
            if header is None:
                raise ConfigurationError(
                    f"column {token!r} requested by name but the CSV has no header"
                )
            if token not in header:
                raise ConfigurationError(f"column {token!r} not found in header {header}")
            selected.append(header.index(token))
    return selected


# ---------------------------------------------------------------------------
# shared option plumbing

def _add_io_options(parser):
    parser.add_argument("--input", required=True, help="CSV file of point coordinates")
    parser.add_argument(
        "--columns",
        help="comma-separated column names or 0-based indices (default: all columns)",
    )
    parser.add_argument(
        "--functional",
        default="concave",
        choices=FUNCTIONALS,
        help="curvature functional defining the bump",
    )
    parser.add_argument(
        "--bandwidth", default="auto", help="'auto' (normal-scale, r=2) or a positive number"
    )
    parser.add_argument(
        "--grid", default="auto", help="'auto' or comma-separated node counts per axis"
    )
    parser.add_argument(
        "--bounds",
        help="explicit domain as lo1,hi1[,lo2,hi2[,lo3,hi3]] (default: data box + 3h)",
    )
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument("--out", required=True, help="output JSON path")
    parser.add_argument("--svg", help="optional SVG figure path (d <= 2)")


def _parse_columns(arg):
    return None if arg is None else [t for t in arg.split(",") if t.strip()]


def _parse_bandwidth(arg, sample):
    if arg == "auto":
        return normal_scale_bandwidth(sample)
    try:
        h = float(arg)
    except ValueError:
        raise ConfigurationError(f"--bandwidth must be 'auto' or a number, got {arg!r}") from None
    return BandwidthSpec(h=h)


def _parse_resolution(arg, d):
    if arg == "auto":
        return (DEFAULT_RESOLUTION[d],) * d
    try:
        res = tuple(int(t) for t in arg.split(","))
    except ValueError:
        raise ConfigurationError(f"--grid must be 'auto' or node counts, got {arg!r}") from None
    if len(res) == 1 and d > 1:
        res = res * d
    if len(res) != d:
        raise ConfigurationError(f"--grid needs {d} node counts, got {len(res)}")
    return res


def _resolve_grid(args, sample, h):
    d = sample.d
    resolution = _parse_resolution(args.grid, d)
    if args.bounds is None:
        lo, hi = sample.bounding_box()
        return GridSpec(lo - 3.0 * h, hi + 3.0 * h, resolution)
    try:
        vals = [float(t) for t in args.bounds.split(",")]
    except ValueError:
        raise ConfigurationError(f"--bounds must be numbers, got {args.bounds!r}") from None
    if len(vals) != 2 * d:
        raise ConfigurationError(f"--bounds needs {2 * d} numbers for d={d}")
    lower = np.array(vals[0::2])
    upper = np.array(vals[1::2])
    return GridSpec(lower, upper, resolution)


def _grid_json(grid):
    return {
        "lower": grid.lower.tolist(),
        "upper": grid.upper.tolist(),
        "resolution": list(grid.resolution),
    }


def _config_echo(args, extra=None):
    echo = {
        "input": args.input,
        "columns": args.columns,
        "functional": args.functional,
        "bandwidth": args.bandwidth,
        "grid": args.grid,
        "bounds": args.bounds,
        "seed": args.seed,
    }
    if extra:
        echo.update(extra)
    return echo


def _write_json(path, document):
    write_atomic(path, json.dumps(document, indent=2) + "\n")


def _maybe_write_svg(args, field, sample, model, boundaries):
    if not args.svg:
        return
    if field.grid.d > 2:
        print("note: SVG export covers d <= 2; skipping (mesh JSON written)", file=sys.stderr)
        return
    from .svg import render_svg

    density = model.density(sample.points) if field.grid.d == 2 else None
    write_atomic(args.svg, render_svg(field, sample.points, density, boundaries))


# ---------------------------------------------------------------------------
# commands

def cmd_fit(args):
    sample = read_samples(args.input, _parse_columns(args.columns))
    spec = CurvatureFieldSpec(args.functional)
    bandwidth = _parse_bandwidth(args.bandwidth, sample)
    grid = _resolve_grid(args, sample, bandwidth.h)
    model = KernelDensityModel(sample, bandwidth)
    field = evaluate_field(model, spec, grid)
    boundary = extract_zero_level(field)
    components, _ = connected_components(field)

    document = {
        "schema_version": SCHEMA_VERSION,
        "command": "fit",
        "dimension": sample.d,
        "functional": spec.functional,
        "sign_selector": spec.sign_selector,
        "bandwidth": bandwidth.h,
        "bandwidth_mode": bandwidth.mode,
        "grid": _grid_json(grid),
        "components": components,
        "pieces": boundary.to_pieces(),
        "config": _config_echo(args),
    }
    _write_json(args.out, document)
    _maybe_write_svg(args, field, sample, model, [(boundary, "crimson")])
    print(f"fit: {sample.n} points, h={bandwidth.h:.6g}, {components} component(s) -> {args.out}")
    return 0


def cmd_confidence(args):
    spec = CurvatureFieldSpec(args.functional)
    if spec.functional not in CONFIDENCE_FUNCTIONALS:
        raise ConfigurationError(
            f"inference unsupported for this functional: {spec.functional!r} "
            f"(supported: {', '.join(CONFIDENCE_FUNCTIONALS)})"
        )
    sample = read_samples(args.input, _parse_columns(args.columns))
    if spec.functional == "hessian-determinant" and sample.d != 2:
        raise ConfigurationError("hessian-determinant inference requires 2-column data")
    bandwidth = _parse_bandwidth(args.bandwidth, sample)
    grid = _resolve_grid(args, sample, bandwidth.h)
    plan = BootstrapPlan(
        B=args.bootstrap,
        resample_size=args.resample_size,
        alpha=args.alpha,
        seed=args.seed,
    )

    operators = ["laplacian"] if spec.functional == "laplacian" else operator_tags(sample.d)
    errors = bootstrap_sup_errors(sample, bandwidth, grid, plan, operators)
    if spec.functional == "laplacian":
        margin = margin_laplacian(errors["laplacian"], args.alpha)
    elif spec.functional == "hessian-determinant":
        margin = margin_gaussian(errors, args.alpha, bandwidth.h)
    else:
        margin = margin_eigenvalue(errors, args.alpha)

    model = KernelDensityModel(sample, bandwidth)
    field = evaluate_field(model, spec, grid)
    pair = confidence_regions(field, margin)
    boundary = extract_zero_level(field)
    components, _ = connected_components(field)

    warnings = []
    if plan.B < LOW_REPLICATE_WARNING_THRESHOLD:
        warnings.append(f"low replicate count B={plan.B}; margins are unstable")

    document = {
        "schema_version": SCHEMA_VERSION,
        "command": "confidence",
        "dimension": sample.d,
        "functional": spec.functional,
        "sign_selector": spec.sign_selector,
        "bandwidth": bandwidth.h,
        "bandwidth_mode": bandwidth.mode,
        "grid": _grid_json(grid),
        "components": components,
        "pieces": boundary.to_pieces(),
        "zeta": margin.zeta,
        "margin_method": margin.method,
        "alpha": args.alpha,
        "bootstrap_replicates": plan.B,
        "resample_size": plan.resample_size if plan.resample_size is not None else sample.n,
        "warnings": warnings,
        "estimate": {"mask": pair.estimate_mask.ravel().astype(int).tolist()},
        "upper": {
            "pieces": pair.upper_boundary.to_pieces(),
            "mask": pair.upper_mask.ravel().astype(int).tolist(),
        },
        "lower": {
            "pieces": pair.lower_boundary.to_pieces(),
            "mask": pair.lower_mask.ravel().astype(int).tolist(),
        },
        "config": _config_echo(
            args, {"alpha": args.alpha, "bootstrap": args.bootstrap, "resample_size": args.resample_size}
        ),
    }
    _write_json(args.out, document)
    _maybe_write_svg(
        args,
        field,
        sample,
        model,
        [
            (pair.upper_boundary, "steelblue"),
            (boundary, "crimson"),
            (pair.lower_boundary, "navy"),
        ],
    )
    print(
        f"confidence: zeta={margin.zeta:.6g} ({margin.method}, alpha={args.alpha}, "
        f"B={plan.B}) -> {args.out}"
    )
    return 0


def _simulate_model(args):
    if args.model == "boomerang":
        return boomerang_mixture()
    return standard_normal_mixture(args.dim)


def cmd_simulate(args):
    gmm = _simulate_model(args)
    grid = None
    if args.bounds is not None or args.grid != "auto":
        resolution = _parse_resolution(args.grid, gmm.dim)
        if args.bounds is not None:
            vals = [float(t) for t in args.bounds.split(",")]
            if len(vals) != 2 * gmm.dim:
                raise ConfigurationError(f"--bounds needs {2 * gmm.dim} numbers")
            grid = GridSpec(np.array(vals[0::2]), np.array(vals[1::2]), resolution)
        else:
            from .mixtures import mixture_window

            lower, upper = mixture_window(gmm)
            grid = GridSpec(lower, upper, resolution)

    if args.experiment == "convergence":
        n_list = [int(t) for t in args.n_list.split(",")]
        report = run_convergence_experiment(
            gmm, args.functional, n_list, args.reps, args.seed, grid=grid
        )
    else:
        h = None if args.bandwidth == "auto" else float(args.bandwidth)
        zeta_override = None
        if args.zeta_override is not None:
            zeta_override = float(args.zeta_override)
        report = run_coverage_experiment(
            gmm,
            args.functional,
            args.n,
            h,
            args.alpha,
            args.bootstrap,
            args.reps,
            args.seed,
            grid=grid,
            resample_size=args.resample_size,
            zeta_override=zeta_override,
        )

    write_atomic(args.out, report.to_csv())
    if args.json:
        write_atomic(args.json, report.to_json() + "\n")
    print(f"simulate {args.experiment}: {len(report.cells)} cell(s) -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser / entry point

def build_parser():
    parser = argparse.ArgumentParser(
        prog="curvebump",
        description="Find density bumps via curvature features of a kernel estimate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="estimate bump boundaries from CSV data")
    _add_io_options(fit)
    fit.set_defaults(func=cmd_fit)

    conf = sub.add_parser("confidence", help="bootstrap confidence regions for a bump")
    _add_io_options(conf)
    conf.add_argument("--alpha", type=float, default=0.1, help="confidence complement")
    conf.add_argument("--bootstrap", type=int, default=200, help="bootstrap replicates B")
    conf.add_argument("--resample-size", type=int, default=None, help="resample size (default n)")
    conf.set_defaults(func=cmd_confidence)

    sim = sub.add_parser("simulate", help="run a consistency or coverage experiment")
    sim.add_argument(
        "--experiment", required=True, choices=("convergence", "coverage")
    )
    sim.add_argument("--model", default="boomerang", choices=("boomerang", "normal"))
    sim.add_argument("--dim", type=int, default=1, choices=(1, 2, 3))
    sim.add_argument("--functional", default="laplacian", choices=FUNCTIONALS)
    sim.add_argument("--n-list", default="500,2000,8000", help="sample sizes (convergence)")
    sim.add_argument("--n", type=int, default=400, help="sample size (coverage)")
    sim.add_argument("--bandwidth", default="auto", help="'auto' or a fixed h (coverage)")
    sim.add_argument("--alpha", type=float, default=0.1)
    sim.add_argument("--bootstrap", type=int, default=200)
    sim.add_argument("--resample-size", type=int, default=None)
    sim.add_argument("--reps", type=int, default=20)
    sim.add_argument("--zeta-override", default=None, help="fixed margin test hook (e.g. 'inf')")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--grid", default="auto")
    sim.add_argument("--bounds", default=None)
    sim.add_argument("--out", required=True, help="report CSV path")
    sim.add_argument("--json", help="optional report JSON path")
    sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
