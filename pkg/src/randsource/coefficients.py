"""Recovered Fourier coefficients and truncated-series synthesis.

A coefficient set holds one complex value (or 2-vector, for elastic sources)
per Fourier index with inf-norm up to the truncation order.  Synthesis takes
the real part of the finite sum: the reconstructed fields are real by
assumption and the imaginary residual is exposed as a diagnostic only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from .errors import MissingChannelsError
from .geometry import FourierIndex, fourier_indices
from .validation import check_points, check_positive

__all__ = [
    "CoefficientSet",
    "synthesize",
    "synthesize_gradient",
    "synthesize_vector",
    "synthesize_vector_gradient",
    "GridField",
    "synthesize_grid",
]

KIND_MEAN = "mean"
KIND_VARIANCE = "variance"


@dataclass
class CoefficientSet:
    """Truncated Fourier representation of a recovered mean or variance field."""

    kind: str
    order: int
    side: float
    components: int
    values: Dict[FourierIndex, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in (KIND_MEAN, KIND_VARIANCE):
            raise ValueError(f"kind must be 'mean' or 'variance', got {self.kind!r}")
        if self.components not in (1, 2):
            raise ValueError(f"components must be 1 or 2, got {self.components}")
        self.order = int(self.order)
        self.side = check_positive(self.side, "side")
        shape = () if self.components == 1 else (2,)
        normalized = {}
        for index, value in self.values.items():
            index = FourierIndex(int(index[0]), int(index[1]))
            arr = np.asarray(value, dtype=complex)
            if arr.shape != shape:
                raise ValueError(
                    f"coefficient at {index} has shape {arr.shape}, expected {shape}"
                )
            normalized[index] = complex(arr) if self.components == 1 else arr
        expected = fourier_indices(self.order)
        missing = [idx for idx in expected if idx not in normalized]
        if missing:
            raise MissingChannelsError(missing, what="coefficients")
        self.values = normalized

    def indices(self) -> list[FourierIndex]:
        """Stored indices in the canonical lexicographic order."""
        return fourier_indices(self.order)

    def value(self, index) -> complex | np.ndarray:
        return self.values[FourierIndex(int(index[0]), int(index[1]))]

    def as_array(self) -> np.ndarray:
        """Dense (2N+1, 2N+1[, 2]) array ordered by (l1, l2)."""
        n = 2 * self.order + 1
        shape = (n, n) if self.components == 1 else (n, n, 2)
        out = np.zeros(shape, dtype=complex)
        for index, value in self.values.items():
            out[index.l1 + self.order, index.l2 + self.order] = value
        return out


def _phase_matrix(coeffs: CoefficientSet, points: np.ndarray) -> np.ndarray:
    ls = np.array(coeffs.indices(), dtype=float)
    phases = (2.0 * math.pi / coeffs.side) * (points @ ls.T)
    return np.exp(1j * phases)


def _stacked_values(coeffs: CoefficientSet) -> np.ndarray:
    vals = [coeffs.values[idx] for idx in coeffs.indices()]
    return np.asarray(vals, dtype=complex)


def synthesize(coeffs: CoefficientSet, x) -> np.ndarray | float:
    """Evaluate the real part of the truncated Fourier series at point(s) x."""
    if coeffs.components != 1:
        raise ValueError("use synthesize_vector for two-component coefficient sets")
    pts = check_points(x)
    values = _phase_matrix(coeffs, pts) @ _stacked_values(coeffs)
    real = values.real
    if np.asarray(x, dtype=float).ndim == 1:
        return float(real[0])
    return real


def synthesize_gradient(coeffs: CoefficientSet, x) -> np.ndarray:
    """Exact gradient of the synthesised field, shape (n, 2) (or (2,) for a point)."""
    if coeffs.components != 1:
        raise ValueError("use synthesize_vector_gradient for two-component sets")
    pts = check_points(x)
    ls = np.array(coeffs.indices(), dtype=float)
    scale = 2.0 * math.pi / coeffs.side
    weights = _stacked_values(coeffs)
    phases = _phase_matrix(coeffs, pts)
    grad = np.empty((pts.shape[0], 2))
    for axis in (0, 1):
        grad[:, axis] = (phases @ (1j * scale * ls[:, axis] * weights)).real
    if np.asarray(x, dtype=float).ndim == 1:
        return grad[0]
    return grad


def synthesize_vector(coeffs: CoefficientSet, x) -> np.ndarray:
    """Componentwise synthesis for vector coefficient sets, shape (n, 2)."""
    if coeffs.components != 2:
        raise ValueError("synthesize_vector requires a two-component coefficient set")
    pts = check_points(x)
    values = _phase_matrix(coeffs, pts) @ _stacked_values(coeffs)
    real = values.real
    if np.asarray(x, dtype=float).ndim == 1:
        return real[0]
    return real


def synthesize_vector_gradient(coeffs: CoefficientSet, x) -> np.ndarray:
    """Gradients of both components, shape (n, 2, 2) indexed [point, comp, axis]."""
    if coeffs.components != 2:
        raise ValueError("synthesize_vector_gradient requires a two-component set")
    pts = check_points(x)
    ls = np.array(coeffs.indices(), dtype=float)
    scale = 2.0 * math.pi / coeffs.side
    weights = _stacked_values(coeffs)
    phases = _phase_matrix(coeffs, pts)
    grad = np.empty((pts.shape[0], 2, 2))
    for axis in (0, 1):
        grad[:, :, axis] = (phases @ (1j * scale * ls[:, axis, None] * weights)).real
    if np.asarray(x, dtype=float).ndim == 1:
        return grad[0]
    return grad


@dataclass(frozen=True)
class GridField:
    """Synthesised field on a tensor grid, with gradients and a diagnostics hook.

    ``values`` has shape (n1, n2) for scalar sets and (n1, n2, 2) for vector
    sets; ``gradients`` appends a trailing axis of length 2 for (d/dx1, d/dx2).
    ``max_imag`` is the largest imaginary residual encountered before taking
    real parts -- zero up to roundoff when the coefficients carry the
    Hermitian symmetry of a real field.
    """

    values: np.ndarray
    gradients: np.ndarray
    max_imag: float


def synthesize_grid(coeffs: CoefficientSet, coords1, coords2) -> GridField:
    """Fast separable synthesis on the tensor grid coords1 x coords2."""
    coords1 = np.asarray(coords1, dtype=float)
    coords2 = np.asarray(coords2, dtype=float)
    dense = coeffs.as_array()
    modes = np.arange(-coeffs.order, coeffs.order + 1, dtype=float)
    scale = 2.0 * math.pi / coeffs.side
    e1 = np.exp(1j * scale * np.outer(coords1, modes))
    e2 = np.exp(1j * scale * np.outer(coords2, modes))
    d_weights = 1j * scale * modes

    def _scalar(matrix):
        fld = e1 @ matrix @ e2.T
        g1 = e1 @ (d_weights[:, None] * matrix) @ e2.T
        g2 = e1 @ (matrix * d_weights[None, :]) @ e2.T
        max_imag = float(np.abs(fld.imag).max())
        grads = np.stack([g1.real, g2.real], axis=-1)
        return fld.real, grads, max_imag

    if coeffs.components == 1:
        values, gradients, max_imag = _scalar(dense)
        return GridField(values=values, gradients=gradients, max_imag=max_imag)

    values = np.empty((coords1.size, coords2.size, 2))
    gradients = np.empty((coords1.size, coords2.size, 2, 2))
    max_imag = 0.0
    for comp in (0, 1):
        vals, grads, resid = _scalar(dense[:, :, comp])
        values[:, :, comp] = vals
        gradients[:, :, comp, :] = grads
        max_imag = max(max_imag, resid)
    return GridField(values=values, gradients=gradients, max_imag=max_imag)
