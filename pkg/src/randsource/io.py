"""File formats: measurement sets, coefficient sets, grid dumps, error reports.

All files are UTF-8 CSV.  Every file starts with a ``# key=value`` metadata
block (config hash, seed, realization count, mesh size, truncation, noise
level, ...) followed by one column-header row.  Floats are written with 17
significant digits, which round-trips IEEE doubles exactly, so a replayed
campaign writes byte-identical files.  Measurement files additionally carry a
JSON metadata sidecar (``<name>.meta.json``) holding the full campaign record.

Measurement CSV columns::

    model,mode,l1,l2,freq,dir_x,dir_y,component,stat,wave,re,im,se

``component`` is 0 for scalar data and 1|2 for elastic vector components;
``wave`` is p|s for elastic mean rows (the two wave-type expectations) and
empty otherwise; ``freq`` stores the admissible frequency of the point (an
offset for variance rows, whose baseline k0 / omega0 lives in the metadata);
``se`` is the estimated Monte Carlo standard error of the row's statistic.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .campaign import AcousticMeasurementSet, ElasticMeasurementSet
from .coefficients import CoefficientSet, GridField
from .errors import ConfigError
from .geometry import (
    AdmissiblePoint,
    FourierIndex,
    MODE_ACOUSTIC_MEAN,
    MODE_ACOUSTIC_VARIANCE,
    MODE_ELASTIC_MEAN,
    MODE_ELASTIC_VARIANCE,
)
from .metrics import ErrorReport

__all__ = [
    "write_measurements",
    "read_measurements",
    "write_coefficients",
    "read_coefficients",
    "write_grid_dump",
    "read_grid_dump",
    "write_error_report",
    "read_error_report",
    "write_table",
]

FORMAT_VERSION = "1"

# Keys promoted into the '#' header block of every output file.
_HEADER_KEYS = (
    "config_hash",
    "master_seed",
    "realizations",
    "mesh_cells",
    "truncation",
    "delta",
)


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _header_lines(metadata: Dict[str, Any], extra_keys: Sequence[str] = ()) -> List[str]:
    lines = [f"# randsource file v{FORMAT_VERSION}"]
    for key in (*_HEADER_KEYS, *extra_keys):
        if key in metadata:
            value = metadata[key]
            text = _fmt(value) if isinstance(value, float) else str(value)
            lines.append(f"# {key}={text}")
    return lines


def _write_csv(
    path,
    metadata: Dict[str, Any],
    columns: Sequence[str],
    rows: Iterable[Sequence],
    extra_keys: Sequence[str] = (),
):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in _header_lines(metadata, extra_keys):
            handle.write(line + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)


def _read_csv(path) -> Tuple[Dict[str, str], List[str], List[List[str]]]:
    path = Path(path)
    header_meta: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8", newline="") as handle:
        data_lines = []
        for line in handle:
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    header_meta[key.strip()] = value.strip()
                continue
            data_lines.append(line)
    reader = csv.reader(data_lines)
    rows = [row for row in reader if row]
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    return header_meta, rows[0], rows[1:]


def _sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def _write_sidecar(path, metadata: Dict[str, Any]):
    sidecar = _sidecar_path(path)
    payload = dict(metadata)
    payload["format_version"] = FORMAT_VERSION
    sidecar.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _read_sidecar(path) -> Dict[str, Any]:
    sidecar = _sidecar_path(path)
    if not sidecar.exists():
        raise ConfigError(f"missing metadata sidecar {sidecar}")
    return json.loads(sidecar.read_text(encoding="utf-8"))


def write_measurements(measurements, path) -> Path:
    """Write a measurement set as CSV plus its JSON metadata sidecar."""
    path = Path(path)
    meta = measurements.metadata
    rows: List[Sequence] = []
    if measurements.model == "acoustic":
        for point, value, se in zip(
            measurements.mean_points, measurements.mean_values, measurements.mean_se
        ):
            rows.append(_point_row("acoustic", "mean", point, 0, "E", "", value, se))
        for point, value, se in zip(
            measurements.variance_points,
            measurements.covariance_values,
            measurements.covariance_se,
        ):
            rows.append(_point_row("acoustic", "variance", point, 0, "C", "", value, se))
    else:
        for point, e_p, e_s, se_p, se_s in zip(
            measurements.mean_points,
            measurements.mean_p_values,
            measurements.mean_s_values,
            measurements.mean_p_se,
            measurements.mean_s_se,
        ):
            for comp in (0, 1):
                rows.append(
                    _point_row("elastic", "mean", point, comp + 1, "E", "p", e_p[comp], se_p[comp])
                )
            for comp in (0, 1):
                rows.append(
                    _point_row("elastic", "mean", point, comp + 1, "E", "s", e_s[comp], se_s[comp])
                )
        for point, value, se in zip(
            measurements.variance_points,
            measurements.covariance_values,
            measurements.covariance_se,
        ):
            for comp in (0, 1):
                rows.append(
                    _point_row(
                        "elastic", "variance", point, comp + 1, "C", "", value[comp], se[comp]
                    )
                )
    columns = [
        "model",
        "mode",
        "l1",
        "l2",
        "freq",
        "dir_x",
        "dir_y",
        "component",
        "stat",
        "wave",
        "re",
        "im",
        "se",
    ]
    _write_csv(path, meta, columns, rows)
    _write_sidecar(path, meta)
    return path


def _point_row(model, mode, point: AdmissiblePoint, component, stat, wave, value, se):
    value = complex(value)
    return (
        model,
        mode,
        point.index.l1,
        point.index.l2,
        _fmt(point.frequency),
        _fmt(point.direction[0]),
        _fmt(point.direction[1]),
        component,
        stat,
        wave,
        _fmt(value.real),
        _fmt(value.imag),
        _fmt(se),
    )


_MODE_NAMES = {
    ("acoustic", "mean"): MODE_ACOUSTIC_MEAN,
    ("acoustic", "variance"): MODE_ACOUSTIC_VARIANCE,
    ("elastic", "mean"): MODE_ELASTIC_MEAN,
    ("elastic", "variance"): MODE_ELASTIC_VARIANCE,
}


def read_measurements(path):
    """Read a measurement CSV (and sidecar) back into a measurement set."""
    path = Path(path)
    metadata = _read_sidecar(path)
    _, columns, rows = _read_csv(path)
    col = {name: i for i, name in enumerate(columns)}
    model = metadata.get("model")
    if model not in ("acoustic", "elastic"):
        raise ConfigError(f"{path}: metadata model must be acoustic or elastic, got {model!r}")

    def parse_point(row, mode_name):
        index = FourierIndex(int(row[col["l1"]]), int(row[col["l2"]]))
        freq = float(row[col["freq"]])
        direction = (float(row[col["dir_x"]]), float(row[col["dir_y"]]))
        return AdmissiblePoint(index, freq, direction, mode_name)

    def parse_value(row):
        return complex(float(row[col["re"]]), float(row[col["im"]]))

    if model == "acoustic":
        mean_points, mean_values, mean_se = [], [], []
        var_points, cov_values, cov_se = [], [], []
        for row in rows:
            mode = row[col["mode"]]
            point = parse_point(row, _MODE_NAMES[(model, mode)])
            if mode == "mean":
                mean_points.append(point)
                mean_values.append(parse_value(row))
                mean_se.append(float(row[col["se"]]))
            else:
                var_points.append(point)
                cov_values.append(parse_value(row))
                cov_se.append(float(row[col["se"]]))
        return AcousticMeasurementSet(
            mean_points=mean_points,
            variance_points=var_points,
            mean_values=np.array(mean_values, dtype=complex),
            covariance_values=np.array(cov_values, dtype=complex),
            mean_se=np.array(mean_se),
            covariance_se=np.array(cov_se),
            metadata=metadata,
        ).validate()

    mean_entries: Dict[FourierIndex, Dict[str, Any]] = {}
    mean_order: List[FourierIndex] = []
    var_entries: Dict[FourierIndex, Dict[str, Any]] = {}
    var_order: List[FourierIndex] = []
    for row in rows:
        mode = row[col["mode"]]
        point = parse_point(row, _MODE_NAMES[(model, mode)])
        comp = int(row[col["component"]]) - 1
        if comp not in (0, 1):
            raise ConfigError(f"{path}: elastic rows need component 1 or 2")
        value = parse_value(row)
        se = float(row[col["se"]])
        if mode == "mean":
            entry = mean_entries.get(point.index)
            if entry is None:
                entry = {
                    "point": point,
                    "p": np.zeros(2, complex),
                    "s": np.zeros(2, complex),
                    "p_se": np.zeros(2),
                    "s_se": np.zeros(2),
                }
                mean_entries[point.index] = entry
                mean_order.append(point.index)
            wave = row[col["wave"]]
            if wave not in ("p", "s"):
                raise ConfigError(f"{path}: elastic mean rows need wave p or s")
            entry[wave][comp] = value
            entry[f"{wave}_se"][comp] = se
        else:
            entry = var_entries.get(point.index)
            if entry is None:
                entry = {"point": point, "c": np.zeros(2, complex), "se": np.zeros(2)}
                var_entries[point.index] = entry
                var_order.append(point.index)
            entry["c"][comp] = value
            entry["se"][comp] = se
    return ElasticMeasurementSet(
        mean_points=[mean_entries[i]["point"] for i in mean_order],
        variance_points=[var_entries[i]["point"] for i in var_order],
        mean_p_values=np.array([mean_entries[i]["p"] for i in mean_order]),
        mean_s_values=np.array([mean_entries[i]["s"] for i in mean_order]),
        covariance_values=np.array([var_entries[i]["c"] for i in var_order]),
        mean_p_se=np.array([mean_entries[i]["p_se"] for i in mean_order]),
        mean_s_se=np.array([mean_entries[i]["s_se"] for i in mean_order]),
        covariance_se=np.array([var_entries[i]["se"] for i in var_order]),
        metadata=metadata,
        diagnostics=None,
    ).validate()


def write_coefficients(coeffs: CoefficientSet, path, metadata: Dict[str, Any]) -> Path:
    """Write a coefficient set; set parameters ride in the '#' header block."""
    meta = dict(metadata)
    meta.update(
        {
            "kind": coeffs.kind,
            "order": coeffs.order,
            "side": coeffs.side,
            "components": coeffs.components,
        }
    )
    rows = []
    for index in coeffs.indices():
        value = coeffs.values[index]
        if coeffs.components == 1:
            value = complex(value)
            rows.append((coeffs.kind, index.l1, index.l2, 0, _fmt(value.real), _fmt(value.imag)))
        else:
            for comp in (0, 1):
                rows.append(
                    (
                        coeffs.kind,
                        index.l1,
                        index.l2,
                        comp + 1,
                        _fmt(value[comp].real),
                        _fmt(value[comp].imag),
                    )
                )
    columns = ["kind", "l1", "l2", "component", "re", "im"]
    path = Path(path)
    _write_csv(path, meta, columns, rows, extra_keys=("kind", "order", "side", "components"))
    return path


def read_coefficients(path) -> CoefficientSet:
    header, columns, rows = _read_csv(path)
    for key in ("kind", "order", "side", "components"):
        if key not in header:
            raise ConfigError(f"{path}: missing header key {key}")
    components = int(header["components"])
    order = int(header["order"])
    side = float(header["side"])
    kind = header["kind"]
    col = {name: i for i, name in enumerate(columns)}
    values: Dict[FourierIndex, Any] = {}
    for row in rows:
        index = FourierIndex(int(row[col["l1"]]), int(row[col["l2"]]))
        value = complex(float(row[col["re"]]), float(row[col["im"]]))
        comp = int(row[col["component"]])
        if components == 1:
            values[index] = value
        else:
            vec = values.setdefault(index, np.zeros(2, dtype=complex))
            vec[comp - 1] = value
    return CoefficientSet(kind=kind, order=order, side=side, components=components, values=values)


def write_grid_dump(
    field: GridField,
    coords1: np.ndarray,
    coords2: np.ndarray,
    path,
    metadata: Dict[str, Any],
) -> Path:
    """Write grid values and analytic gradients in fixed row-major order.

    The gradient columns exist so downstream H1 evaluation never has to
    finite-difference the dump.
    """
    meta = dict(metadata)
    meta["max_imag_residual"] = float(field.max_imag)
    scalar = field.values.ndim == 2
    rows = []
    n1, n2 = field.values.shape[0], field.values.shape[1]
    for i in range(n1):
        x1 = _fmt(coords1[i])
        for j in range(n2):
            x2 = _fmt(coords2[j])
            if scalar:
                rows.append(
                    (
                        x1,
                        x2,
                        _fmt(field.values[i, j]),
                        _fmt(field.gradients[i, j, 0]),
                        _fmt(field.gradients[i, j, 1]),
                    )
                )
            else:
                for comp in (0, 1):
                    rows.append(
                        (
                            x1,
                            x2,
                            comp + 1,
                            _fmt(field.values[i, j, comp]),
                            _fmt(field.gradients[i, j, comp, 0]),
                            _fmt(field.gradients[i, j, comp, 1]),
                        )
                    )
    if scalar:
        columns = ["x1", "x2", "value", "dvalue_dx1", "dvalue_dx2"]
    else:
        columns = ["x1", "x2", "component", "value", "dvalue_dx1", "dvalue_dx2"]
    path = Path(path)
    _write_csv(
        path,
        meta,
        columns,
        rows,
        extra_keys=("kind", "model", "source", "side", "points_per_side", "max_imag_residual"),
    )
    return path


def read_grid_dump(path) -> Tuple[GridField, np.ndarray, np.ndarray, Dict[str, str]]:
    """Read a grid dump; returns (field, coords1, coords2, header metadata)."""
    header, columns, rows = _read_csv(path)
    col = {name: i for i, name in enumerate(columns)}
    scalar = "component" not in col
    x1 = np.array([float(r[col["x1"]]) for r in rows])
    x2 = np.array([float(r[col["x2"]]) for r in rows])
    coords1 = np.unique(x1)
    coords2 = np.unique(x2)
    n1, n2 = coords1.size, coords2.size
    if scalar:
        if len(rows) != n1 * n2:
            raise ConfigError(f"{path}: expected {n1 * n2} rows, found {len(rows)}")
        values = np.array([float(r[col["value"]]) for r in rows]).reshape(n1, n2)
        g1 = np.array([float(r[col["dvalue_dx1"]]) for r in rows]).reshape(n1, n2)
        g2 = np.array([float(r[col["dvalue_dx2"]]) for r in rows]).reshape(n1, n2)
        gradients = np.stack([g1, g2], axis=-1)
    else:
        if len(rows) != 2 * n1 * n2:
            raise ConfigError(f"{path}: expected {2 * n1 * n2} rows, found {len(rows)}")
        values = np.empty((n1, n2, 2))
        gradients = np.empty((n1, n2, 2, 2))
        raw_v = np.array([float(r[col["value"]]) for r in rows]).reshape(n1, n2, 2)
        raw_g1 = np.array([float(r[col["dvalue_dx1"]]) for r in rows]).reshape(n1, n2, 2)
        raw_g2 = np.array([float(r[col["dvalue_dx2"]]) for r in rows]).reshape(n1, n2, 2)
        values[:] = raw_v
        gradients[:, :, :, 0] = raw_g1
        gradients[:, :, :, 1] = raw_g2
    field = GridField(
        values=values,
        gradients=gradients,
        max_imag=float(header.get("max_imag_residual", "nan")),
    )
    return field, coords1, coords2, header


def write_error_report(report: ErrorReport, path) -> Path:
    meta = dict(report.metadata)
    columns = ["kind", "rel_l2", "rel_h1", "max_imag_residual"]
    rows = [
        (
            meta.get("kind", ""),
            _fmt(report.rel_l2),
            _fmt(report.rel_h1),
            _fmt(report.max_imag_residual),
        )
    ]
    path = Path(path)
    _write_csv(path, meta, columns, rows, extra_keys=("kind", "model", "source"))
    return path


def read_error_report(path) -> ErrorReport:
    header, columns, rows = _read_csv(path)
    col = {name: i for i, name in enumerate(columns)}
    row = rows[0]
    return ErrorReport(
        rel_l2=float(row[col["rel_l2"]]),
        rel_h1=float(row[col["rel_h1"]]),
        max_imag_residual=float(row[col["max_imag_residual"]]),
        metadata=dict(header),
    )


def write_table(rows: List[Sequence], columns: Sequence[str], path, metadata: Dict[str, Any]) -> Path:
    """Write a small summary table (used by the reproduce pipeline)."""
    path = Path(path)
    _write_csv(path, metadata, columns, rows)
    return path
