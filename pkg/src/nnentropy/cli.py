"""Command-line interface.

Subcommands cover the whole workflow: ``calibrate`` manages the
normalizing constant, ``entropy`` and ``mi`` estimate from CSV samples,
``rate-experiment`` and ``isa`` drive the two studies, and ``diagnostics``
runs the structural checks. Results are printed as JSON (carrying the tool
version and the effective settings); experiment tables are written as
plot-ready CSV.

Input CSV format: UTF-8, comma-separated, one sample per row, all rows the
same width, finite decimal floats, no missing values. A single header line
is auto-detected (any non-numeric cell in the first row).

Exit codes: 0 success; 2 usage error (bad flags or parameter ranges);
3 data error (unreadable input, malformed config or cache); 4 numerical
error (degenerate sample, infeasible histogram).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from ._version import __version__
from .calibration import (
    DEFAULT_N_CAL,
    DEFAULT_REPS,
    GammaCache,
    GammaKey,
    estimate_gamma,
    estimate_record,
)
from .diagnostics import run_diagnostics
from .errors import (
    DataFormatError,
    DegenerateSampleError,
    GammaCacheError,
    HistogramInfeasibleError,
    InsufficientPointsError,
    NNEntropyError,
    OutsideCubeError,
)
from .estimators import EstimatorSettings, renyi_entropy, renyi_mi
from .experiments import (
    PAPER_SCALE_ISA,
    IsaExperimentConfig,
    RateExperimentConfig,
    run_isa_experiment,
    run_rate_experiment,
)
from .points import NeighborSpec, PointSet

__all__ = ["main"]


def _parse_ranks(text: str) -> NeighborSpec:
    try:
        return NeighborSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _parse_gamma(text: str):
    if text == "analytic":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f'gamma must be a number or "analytic", got {text!r}'
        ) from None


def _read_csv(path) -> np.ndarray:
    """Load a sample matrix, tolerating one auto-detected header line."""
    try:
        with open(path, encoding="utf-8", newline="") as handle:
            lines = list(csv.reader(handle))
    except OSError as exc:
        raise DataFormatError(f"{path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError as exc:
        raise DataFormatError(f"{path}: not valid UTF-8 ({exc.reason})") from None

    rows = [(lineno, row) for lineno, row in enumerate(lines, start=1) if row]
    if not rows:
        raise DataFormatError(f"{path}: no data")

    def parse_row(lineno, row, width):
        if width is not None and len(row) != width:
            raise DataFormatError(
                f"{path}: line {lineno}: expected {width} columns, got {len(row)}"
            )
        values = []
        for cell in row:
            try:
                value = float(cell)
            except ValueError:
                raise DataFormatError(
                    f"{path}: line {lineno}: invalid number {cell.strip()!r}"
                ) from None
            if not math.isfinite(value):
                raise DataFormatError(
                    f"{path}: line {lineno}: non-finite value {cell.strip()!r}"
                )
            values.append(value)
        return values

    def looks_like_header(row):
        for cell in row:
            try:
                float(cell)
            except ValueError:
                return True
        return False

    first = rows[0][1]
    data = rows[1:] if looks_like_header(first) else rows
    if not data:
        raise DataFormatError(f"{path}: no data")
    width = len(first)
    parsed = [parse_row(lineno, row, width) for lineno, row in data]
    return np.asarray(parsed, dtype=np.float64)


def _load_json(path, what: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            obj = json.load(handle)
    except OSError as exc:
        raise DataFormatError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON in {what}: {exc}") from None
    if not isinstance(obj, dict):
        raise DataFormatError(f"{path}: {what} must be a JSON object")
    return obj


def _emit(payload: dict, out=None) -> None:
    text = json.dumps(payload, indent=2)
    if out is not None:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text + "\n", encoding="utf-8")
    print(text)


def _settings_from_args(args) -> EstimatorSettings:
    return EstimatorSettings(
        alpha=args.alpha,
        spec=args.S,
        gamma=args.gamma,
        cache=GammaCache(args.cache) if args.cache else None,
        calibration_seed=args.seed,
        workers=args.threads,
    )


def cmd_calibrate(args) -> None:
    if args.alpha is not None:
        if not 0.0 < args.alpha < 1.0:
            raise ValueError(f"alpha must lie strictly in (0, 1), got {args.alpha}")
        p = args.d * (1.0 - args.alpha)
    else:
        p = args.p
    key = GammaKey(d=args.d, p=p, spec=args.S, n_cal=args.n_cal, reps=args.reps)
    if args.cache:
        estimate, _ = GammaCache(args.cache).get_or_compute(
            key, seed=args.seed, workers=args.threads
        )
    else:
        estimate = estimate_gamma(key, seed=args.seed, workers=args.threads)
    _emit(estimate_record(estimate))


def cmd_entropy(args) -> None:
    points = PointSet(_read_csv(args.input))
    report = renyi_entropy(points, _settings_from_args(args))
    _emit({"tool_version": __version__, "input": str(args.input), **report.to_dict()})


def cmd_mi(args) -> None:
    points = PointSet(_read_csv(args.input))
    report = renyi_mi(points, _settings_from_args(args))
    _emit({"tool_version": __version__, "input": str(args.input), **report.to_dict()})


def cmd_rate_experiment(args) -> None:
    config = RateExperimentConfig.from_dict(_load_json(args.config, "rate config"))
    cache = GammaCache(args.cache) if args.cache else None
    result = run_rate_experiment(config, seed=args.seed, cache=cache, workers=args.threads)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    result.write_csv(args.out)
    _emit({"tool_version": __version__, "seed": args.seed, "out": str(args.out), **result.summary()})


def cmd_isa(args) -> None:
    if args.paper_scale:
        config = PAPER_SCALE_ISA
    else:
        config = IsaExperimentConfig.from_dict(_load_json(args.config, "ISA config"))
    cache = GammaCache(args.cache) if args.cache else None
    result = run_isa_experiment(config, seed=args.seed, cache=cache, workers=args.threads)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {"tool_version": __version__, "seed": args.seed, **result.to_dict()}
    (out_dir / "solution.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    result.write_block_norms_csv(out_dir / "block_norms.csv")
    print(json.dumps(payload, indent=2))


def cmd_diagnostics(args) -> None:
    quick = bool(args.quick)
    seed = args.seed
    if args.grid:
        grid = _load_json(args.grid, "diagnostics grid")
        unknown = set(grid) - {"quick", "seed"}
        if unknown:
            raise DataFormatError(f"{args.grid}: unknown grid keys: {sorted(unknown)}")
        if "quick" in grid:
            if not isinstance(grid["quick"], bool):
                raise DataFormatError(f"{args.grid}: 'quick' must be a boolean")
            quick = quick or grid["quick"]
        if "seed" in grid:
            if not isinstance(grid["seed"], int) or isinstance(grid["seed"], bool):
                raise DataFormatError(f"{args.grid}: 'seed' must be an integer")
            if seed is None:
                seed = grid["seed"]
    seed = 0 if seed is None else seed
    summary = run_diagnostics(seed=seed, quick=quick)
    _emit(
        {"tool_version": __version__, "seed": seed, "quick": quick, **summary.to_dict()},
        out=args.out,
    )


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--threads",
        type=int,
        default=-1,
        help="worker cap for neighbor queries (-1: all cores)",
    )

    parser = argparse.ArgumentParser(
        prog="nnentropy",
        description="Entropy and mutual-information estimation from nearest-neighbor graphs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    cal = sub.add_parser(
        "calibrate", parents=[common], help="estimate the normalizing constant gamma"
    )
    cal.add_argument("--d", type=int, required=True, help="sample dimension")
    power = cal.add_mutually_exclusive_group(required=True)
    power.add_argument("--alpha", type=float, help="entropy order in (0, 1); p = d(1-alpha)")
    power.add_argument("--p", type=float, help="graph power directly, 0 < p < d")
    cal.add_argument("--S", type=_parse_ranks, default=NeighborSpec((1, 2, 3)),
                     help="neighbor ranks, e.g. 1,2,3 (default)")
    cal.add_argument("--n-cal", type=int, default=DEFAULT_N_CAL, dest="n_cal",
                     help=f"points per replication (default {DEFAULT_N_CAL})")
    cal.add_argument("--reps", type=int, default=DEFAULT_REPS,
                     help=f"replications (default {DEFAULT_REPS})")
    cal.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    cal.add_argument("--cache", help="gamma cache file (JSON Lines); reused when the key matches")
    cal.set_defaults(func=cmd_calibrate)

    for name, func, description in (
        ("entropy", cmd_entropy, "estimate entropy from a CSV sample"),
        ("mi", cmd_mi, "estimate mutual information from a CSV sample"),
    ):
        est = sub.add_parser(name, parents=[common], help=description)
        est.add_argument("input", help="CSV file, one sample per row")
        est.add_argument("--alpha", type=float, required=True, help="order in (0, 1)")
        est.add_argument("--S", type=_parse_ranks, default=NeighborSpec((1, 2, 3)),
                         help="neighbor ranks, e.g. 1,2,3 (default)")
        est.add_argument("--gamma", type=_parse_gamma, default=None,
                         help='normalizing constant: a number or "analytic" (single-rank S only)')
        est.add_argument("--cache", help="gamma cache file used when --gamma is not given")
        est.add_argument("--seed", type=int, default=0,
                         help="seed for on-the-fly calibration (default 0)")
        est.set_defaults(func=func)

    rate = sub.add_parser(
        "rate-experiment", parents=[common], help="convergence-rate study over a size grid"
    )
    rate.add_argument("--config", required=True, help="experiment config JSON")
    rate.add_argument("--out", required=True, help="output CSV (long format)")
    rate.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    rate.add_argument("--cache", help="gamma cache file")
    rate.set_defaults(func=cmd_rate_experiment)

    isa = sub.add_parser(
        "isa", parents=[common], help="subspace-separation study on mixed wireframe sources"
    )
    source = isa.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", help="experiment config JSON")
    source.add_argument("--paper-scale", action="store_true",
                        help="run the built-in full-size configuration (6 sources, q=18)")
    isa.add_argument("--out-dir", required=True, dest="out_dir",
                     help="directory for solution.json and block_norms.csv")
    isa.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    isa.add_argument("--cache", help="gamma cache file")
    isa.set_defaults(func=cmd_isa)

    diag = sub.add_parser(
        "diagnostics", parents=[common], help="run the structural checks"
    )
    diag.add_argument("--grid", help='grid JSON; keys "quick" and "seed"')
    diag.add_argument("--out", help="also write the report JSON here")
    diag.add_argument("--quick", action="store_true", help="one representative cell per check")
    diag.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    diag.set_defaults(func=cmd_diagnostics)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        args.func(args)
    except (DataFormatError, GammaCacheError, InsufficientPointsError, OutsideCubeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DegenerateSampleError, HistogramInfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (NNEntropyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
