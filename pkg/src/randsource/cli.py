"""Command-line pipeline: forward -> invert -> evaluate -> reproduce.

Every subcommand reads an optional TOML config file; individual flags
override file values, and the ``RANDSOURCE_SEED`` environment variable
supplies the master seed when neither the file nor a flag sets one.  On
success the exit code is 0 and produced paths are printed to stdout; on
failure a machine-readable JSON error object is written to stderr and the
exit code is nonzero.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import traceback
from pathlib import Path

import numpy as np

from . import io
from .campaign import run_campaign
from .config import DEFAULT_SEED_ENV, ExperimentConfig
from .errors import ConfigError
from .estimators import AcousticSourceReconstructor, ElasticSourceReconstructor
from .coefficients import synthesize_grid
from .metrics import (
    ErrorReport,
    EvalGrid,
    evaluate_reconstruction,
    exact_fields,
    relative_h1,
    relative_l2,
)
from .sources import get_source

REPRODUCE_DELTAS = (0.005, 0.01, 0.05, 0.10)
_CONFIG_FLAGS = {
    "model": str,
    "source": str,
    "side": float,
    "delta": float,
    "realizations": int,
    "mesh_cells": int,
    "truncation": int,
    "lambda0": float,
    "xi0": float,
    "k0": float,
    "omega0": float,
    "lame_lambda": float,
    "lame_mu": float,
    "master_seed": int,
    "workers": int,
    "output_dir": str,
}


def _add_config_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--config", type=Path, default=None, help="TOML config file")
    for name, typ in _CONFIG_FLAGS.items():
        flag = "--" + name.replace("_", "-")
        parser.add_argument(flag, type=typ, default=None, dest=name)


def _build_config(args) -> ExperimentConfig:
    """Layer config sources: defaults < env seed < config file < CLI flags."""
    values = {}
    env_seed = os.environ.get(DEFAULT_SEED_ENV)
    if env_seed is not None:
        try:
            values["master_seed"] = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"{DEFAULT_SEED_ENV} must be an integer, got {env_seed!r}") from exc
    if args.config is not None:
        file_config = ExperimentConfig.load(args.config)
        file_values = dataclasses.asdict(file_config)
        defaults = dataclasses.asdict(ExperimentConfig())
        values.update({k: v for k, v in file_values.items() if v != defaults[k]})
    for name in _CONFIG_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            values[name] = value
    return ExperimentConfig.from_dict(values)


def cmd_forward(args) -> int:
    config = _build_config(args)
    measurements = run_campaign(config)
    out = args.out or Path(config.output_dir) / "measurements.csv"
    path = io.write_measurements(measurements, out)
    print(path)
    return 0


def _fit_reconstructor(measurements, truncation):
    if measurements.model == "acoustic":
        estimator = AcousticSourceReconstructor(truncation=truncation)
    else:
        estimator = ElasticSourceReconstructor(truncation=truncation)
    return estimator.fit(measurements)


def cmd_invert(args) -> int:
    measurements = io.read_measurements(args.measurements)
    estimator = _fit_reconstructor(measurements, args.truncation)
    out_dir = Path(args.out_dir)
    meta = dict(measurements.metadata)
    grid = EvalGrid(side=measurements.side, points_per_side=args.grid_points)
    paths = []
    for kind, coeffs in (
        ("mean", estimator.mean_coefficients_),
        ("variance", estimator.variance_coefficients_),
    ):
        paths.append(io.write_coefficients(coeffs, out_dir / f"{kind}_coefficients.csv", meta))
        field = synthesize_grid(coeffs, grid.coords, grid.coords)
        dump_meta = dict(meta)
        dump_meta.update({"kind": kind, "points_per_side": grid.points_per_side})
        paths.append(
            io.write_grid_dump(field, grid.coords, grid.coords, out_dir / f"{kind}_grid.csv", dump_meta)
        )
    for path in paths:
        print(path)
    return 0


def cmd_evaluate(args) -> int:
    field, coords1, coords2, header = io.read_grid_dump(args.grid)
    kind = args.kind or header.get("kind")
    if kind not in ("mean", "variance"):
        raise ConfigError("grid dump does not declare its kind; pass --kind mean|variance")
    model = header.get("model")
    source_name = args.source or header.get("source")
    if not source_name:
        raise ConfigError("grid dump does not declare a source; pass --source NAME")
    source = get_source(source_name, model=model)
    grid = EvalGrid(side=float(header["side"]), points_per_side=len(coords1))
    if not np.allclose(grid.coords, coords1) or not np.allclose(grid.coords, coords2):
        raise ConfigError("grid dump coordinates do not form the standard evaluation grid")
    exact, exact_grad = exact_fields(source, kind, grid)
    report = ErrorReport(
        rel_l2=relative_l2(field.values, exact),
        rel_h1=relative_h1(field.values, field.gradients, exact, exact_grad),
        max_imag_residual=field.max_imag,
        metadata={**header, "kind": kind, "source": source_name},
    )
    out = args.out or Path(args.grid).with_name(f"{kind}_errors.csv")
    path = io.write_error_report(report, out)
    print(path)
    return 0


def cmd_reproduce(args) -> int:
    config = _build_config(args)
    model = "acoustic" if args.table == 1 else "elastic"
    # The scale picks the realization count unless one was set explicitly.
    if config.realizations != ExperimentConfig().realizations:
        realizations = config.realizations
    else:
        realizations = 100_000 if args.scale == "desk" else 1_000_000
    out_dir = Path(args.output_dir or config.output_dir)
    source = get_source(config.source, model=model)
    results = {}
    failures = {}
    for delta in REPRODUCE_DELTAS:
        run_config = dataclasses.replace(
            config, model=model, delta=delta, realizations=realizations
        )
        tag = f"delta_{delta:g}"
        try:
            measurements = run_campaign(run_config, source)
            io.write_measurements(measurements, out_dir / tag / "measurements.csv")
            estimator = _fit_reconstructor(measurements, None)
            meta = dict(measurements.metadata)
            row = {}
            for kind, coeffs in (
                ("mean", estimator.mean_coefficients_),
                ("variance", estimator.variance_coefficients_),
            ):
                io.write_coefficients(coeffs, out_dir / tag / f"{kind}_coefficients.csv", meta)
                report = evaluate_reconstruction(coeffs, source, metadata=meta)
                row[f"rel_l2_{kind}"] = report.rel_l2
                row[f"rel_h1_{kind}"] = report.rel_h1
            results[delta] = row
        except Exception as exc:  # keep earlier deltas; report at the end
            failures[delta] = f"{type(exc).__name__}: {exc}"
    columns = ["metric"] + [f"delta_{d:g}" for d in REPRODUCE_DELTAS]
    metrics = ["rel_l2_mean", "rel_h1_mean", "rel_l2_variance", "rel_h1_variance"]
    rows = []
    for metric in metrics:
        row = [metric]
        for delta in REPRODUCE_DELTAS:
            if delta in results:
                row.append(format(results[delta][metric], ".17g"))
            else:
                row.append("failed")
        rows.append(row)
    table_meta = {
        "model": model,
        "source": source.name,
        "scale": args.scale,
        "realizations": realizations,
        "master_seed": config.master_seed,
        "mesh_cells": config.mesh_cells,
        "config_hash": config.physics_hash(),
    }
    path = io.write_table(rows, columns, out_dir / f"table{args.table}.csv", table_meta)
    print(path)
    if failures:
        print(
            json.dumps({"error": "reproduce incomplete", "failures": failures}),
            file=sys.stderr,
        )
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randsource",
        description="Synthesize far-field statistics of random wave sources and "
        "recover their mean and variance by direct Fourier inversion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_forward = sub.add_parser("forward", help="run a measurement campaign")
    _add_config_arguments(p_forward)
    p_forward.add_argument("--out", type=Path, default=None, help="measurement CSV path")
    p_forward.set_defaults(func=cmd_forward)

    p_invert = sub.add_parser("invert", help="recover coefficients from measurements")
    p_invert.add_argument("--measurements", type=Path, required=True)
    p_invert.add_argument("--truncation", type=int, default=None)
    p_invert.add_argument("--out-dir", type=Path, default=Path("out"))
    p_invert.add_argument("--grid-points", type=int, default=401)
    p_invert.set_defaults(func=cmd_invert)

    p_eval = sub.add_parser("evaluate", help="score a grid dump against a registry source")
    p_eval.add_argument("--grid", type=Path, required=True)
    p_eval.add_argument("--source", type=str, default=None)
    p_eval.add_argument("--kind", choices=("mean", "variance"), default=None)
    p_eval.add_argument("--out", type=Path, default=None)
    p_eval.set_defaults(func=cmd_evaluate)

    p_rep = sub.add_parser("reproduce", help="run all four noise levels end-to-end")
    _add_config_arguments(p_rep)
    p_rep.add_argument("--table", type=int, choices=(1, 2), required=True)
    p_rep.add_argument("--scale", choices=("desk", "paper"), default="desk")
    p_rep.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        payload = {
            "error": str(exc),
            "type": type(exc).__name__,
            "traceback": traceback.format_exc().splitlines()[-3:],
        }
        print(json.dumps(payload), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
