"""Evaluation grid and discrete relative L2 / H1 reconstruction errors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

from .coefficients import CoefficientSet, synthesize_grid
from .sources import TestSource
from .validation import check_positive

__all__ = [
    "EvalGrid",
    "ErrorReport",
    "relative_l2",
    "relative_h1",
    "exact_fields",
    "evaluate_reconstruction",
]


@dataclass(frozen=True)
class EvalGrid:
    """Uniform tensor grid over the closed square [-side/2, side/2]^2.

    401 points per side (spacing side/400), corners included.  Flattened
    fields use row-major order with the x1 index outermost.
    """

    side: float = 1.0
    points_per_side: int = 401

    def __post_init__(self):
        check_positive(self.side, "side")
        if self.points_per_side < 2:
            raise ValueError("need at least 2 points per side")

    @property
    def coords(self) -> np.ndarray:
        return np.linspace(-0.5 * self.side, 0.5 * self.side, self.points_per_side)

    @property
    def n_points(self) -> int:
        return self.points_per_side**2

    def points(self) -> np.ndarray:
        """All grid points as an (n^2, 2) array in row-major order."""
        c = self.coords
        x1, x2 = np.meshgrid(c, c, indexing="ij")
        return np.column_stack([x1.ravel(), x2.ravel()])

    def mesh(self):
        """Coordinate arrays (x1, x2) with shape (n, n), x1 index first."""
        c = self.coords
        return np.meshgrid(c, c, indexing="ij")


def relative_l2(reconstructed, exact) -> float:
    """(sum |rec - exact|^2 / sum |exact|^2) ** 0.5 over all grid samples.

    Arrays of any matching shape are accepted; vector fields simply carry an
    extra component axis.  The exact field must not vanish identically.
    """
    rec = np.asarray(reconstructed)
    ex = np.asarray(exact)
    if rec.shape != ex.shape:
        raise ValueError(f"shape mismatch: {rec.shape} vs {ex.shape}")
    denom = float(np.sum(np.abs(ex) ** 2))
    if denom == 0.0:
        raise ValueError("relative error undefined for an identically zero exact field")
    num = float(np.sum(np.abs(rec - ex) ** 2))
    return float(np.sqrt(num / denom))


def relative_h1(reconstructed, grad_reconstructed, exact, grad_exact) -> float:
    """Discrete relative H1 error: gradients enter alongside the field values.

    Gradient arrays carry a trailing axis of length 2; both come from analytic
    differentiation (series term-by-term on one side, closed forms on the
    other), never from finite differences.
    """
    rec = np.asarray(reconstructed)
    ex = np.asarray(exact)
    g_rec = np.asarray(grad_reconstructed)
    g_ex = np.asarray(grad_exact)
    if rec.shape != ex.shape or g_rec.shape != g_ex.shape:
        raise ValueError("shape mismatch between reconstructed and exact fields")
    if g_ex.shape != ex.shape + (2,):
        raise ValueError(f"gradients must have shape {ex.shape + (2,)}, got {g_ex.shape}")
    denom = float(np.sum(np.abs(g_ex) ** 2) + np.sum(np.abs(ex) ** 2))
    if denom == 0.0:
        raise ValueError("relative error undefined for an identically zero exact field")
    num = float(np.sum(np.abs(g_rec - g_ex) ** 2) + np.sum(np.abs(rec - ex) ** 2))
    return float(np.sqrt(num / denom))


@dataclass
class ErrorReport:
    """Relative errors of one reconstruction against a registry source."""

    rel_l2: float
    rel_h1: float
    max_imag_residual: float
    metadata: Dict[str, Any] = field(default_factory=dict)


def exact_fields(source: TestSource, kind: str, grid: EvalGrid):
    """Exact field and analytic gradient of ``source`` sampled on ``grid``.

    Returns (values, gradients); vector sources add a component axis before
    the trailing gradient axis.
    """
    x1, x2 = grid.mesh()
    if kind == "mean":
        fns = source.mean
        grads = source.mean_gradient
    elif kind == "variance":
        fns = source.variance
        grads = source.variance_gradient
    else:
        raise ValueError(f"kind must be 'mean' or 'variance', got {kind!r}")
    if source.model == "acoustic":
        values = np.asarray(fns(x1, x2), dtype=float)
        d1, d2 = grads(x1, x2)
        gradients = np.stack([d1, d2], axis=-1)
    else:
        values = np.stack([np.asarray(f(x1, x2), dtype=float) for f in fns], axis=-1)
        gradients = np.stack(
            [np.stack(g(x1, x2), axis=-1) for g in grads], axis=-2
        )
    return values, gradients


def evaluate_reconstruction(
    coeffs: CoefficientSet,
    source: TestSource,
    grid: EvalGrid | None = None,
    metadata: Dict[str, Any] | None = None,
) -> ErrorReport:
    """Score a coefficient set against the matching exact field of ``source``."""
    if grid is None:
        grid = EvalGrid(side=coeffs.side)
    fld = synthesize_grid(coeffs, grid.coords, grid.coords)
    exact_values, exact_gradients = exact_fields(source, coeffs.kind, grid)
    if fld.values.shape != exact_values.shape:
        raise ValueError(
            f"reconstruction shape {fld.values.shape} does not match source "
            f"shape {exact_values.shape}"
        )
    report = ErrorReport(
        rel_l2=relative_l2(fld.values, exact_values),
        rel_h1=relative_h1(fld.values, fld.gradients, exact_values, exact_gradients),
        max_imag_residual=fld.max_imag,
        metadata=dict(metadata or {}),
    )
    return report
