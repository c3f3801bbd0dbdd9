"""Square source domain, Fourier indexing, and admissible measurement points.

The whole inversion rests on one fact: at specially chosen frequencies and
observation directions, the oscillatory factor of the far-field integral
coincides with a Fourier basis function of the square domain, so a single
far-field statistic exposes a single Fourier coefficient of the unknown
source statistics.  This module enumerates those frequency/direction pairs
for the four data channels (acoustic/elastic x mean/variance) and fixes the
truncation rule that ties the number of recovered modes to the noise level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .validation import check_positive, check_unit_vector

__all__ = [
    "MODE_ACOUSTIC_MEAN",
    "MODE_ACOUSTIC_VARIANCE",
    "MODE_ELASTIC_MEAN",
    "MODE_ELASTIC_VARIANCE",
    "FourierIndex",
    "DomainSpec",
    "AdmissiblePoint",
    "fourier_indices",
    "basis_eval",
    "truncation_order",
    "acoustic_mean_points",
    "acoustic_variance_points",
    "elastic_mean_points",
    "elastic_variance_points",
]

MODE_ACOUSTIC_MEAN = "acoustic-mean"
MODE_ACOUSTIC_VARIANCE = "acoustic-variance"
MODE_ELASTIC_MEAN = "elastic-mean"
MODE_ELASTIC_VARIANCE = "elastic-variance"

MEAN_MODES = frozenset({MODE_ACOUSTIC_MEAN, MODE_ELASTIC_MEAN})
VARIANCE_MODES = frozenset({MODE_ACOUSTIC_VARIANCE, MODE_ELASTIC_VARIANCE})
ALL_MODES = MEAN_MODES | VARIANCE_MODES


class FourierIndex(NamedTuple):
    """Integer lattice index of one Fourier mode on the square domain."""

    l1: int
    l2: int

    @property
    def inf_norm(self) -> int:
        return max(abs(self.l1), abs(self.l2))

    @property
    def norm(self) -> float:
        """Euclidean length of the index."""
        return math.hypot(self.l1, self.l2)

    @property
    def is_zero(self) -> bool:
        return self.l1 == 0 and self.l2 == 0


@dataclass(frozen=True)
class DomainSpec:
    """Open square (-side/2, side/2)^2 assumed to contain the source support."""

    side: float = 1.0

    def __post_init__(self):
        check_positive(self.side, "side")

    @property
    def half(self) -> float:
        return 0.5 * self.side

    @property
    def area(self) -> float:
        return self.side * self.side

    def contains(self, points) -> np.ndarray:
        """Elementwise test whether points lie strictly inside the square."""
        pts = np.asarray(points, dtype=float)
        return (np.abs(pts[..., 0]) < self.half) & (np.abs(pts[..., 1]) < self.half)


@dataclass(frozen=True)
class AdmissiblePoint:
    """One (Fourier index, frequency, observation direction) measurement slot.

    ``frequency`` is a wavenumber for the acoustic channels, an angular
    frequency for the elastic mean channel, and a frequency offset for the
    variance channels (where the zero mode legitimately has offset 0).
    """

    index: FourierIndex
    frequency: float
    direction: np.ndarray
    mode: str

    def __post_init__(self):
        if self.mode not in ALL_MODES:
            raise ValueError(f"unknown measurement mode {self.mode!r}")
        object.__setattr__(self, "direction", check_unit_vector(self.direction))
        freq = float(self.frequency)
        if self.mode in MEAN_MODES:
            if not freq > 0.0:
                raise ValueError(f"mean-channel frequency must be positive, got {freq}")
        elif freq < 0.0:
            raise ValueError(f"variance-channel offset must be nonnegative, got {freq}")
        object.__setattr__(self, "frequency", freq)


def fourier_indices(order: int) -> list[FourierIndex]:
    """All indices with inf-norm at most ``order``, in lexicographic order.

    The order is part of the interface: measurement files and coefficient
    files are written in exactly this enumeration, keeping outputs byte-stable.
    """
    order = int(order)
    if order < 0:
        raise ValueError("order must be nonnegative")
    return [
        FourierIndex(l1, l2)
        for l1 in range(-order, order + 1)
        for l2 in range(-order, order + 1)
    ]


def basis_eval(index, x, side: float = 1.0):
    """Evaluate the Fourier basis function exp(i (2*pi/side) l . x).

    Parameters
    ----------
    index : FourierIndex or (int, int)
    x : array_like, shape (..., 2)
        Evaluation points; a bare ``(x1, x2)`` pair is accepted.
    side : float
        Side length of the square domain.

    Returns
    -------
    complex or ndarray of complex
        Unit-modulus basis values, scalar when ``x`` is a single point.
    """
    side = check_positive(side, "side")
    l1, l2 = int(index[0]), int(index[1])
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError(f"x must have last axis of length 2, got shape {arr.shape}")
    phase = (2.0 * math.pi / side) * (l1 * arr[..., 0] + l2 * arr[..., 1])
    values = np.exp(1j * phase)
    if values.ndim == 0:
        return complex(values)
    return values


def truncation_order(delta: float) -> int:
    """Number of recovered modes per axis direction for noise level ``delta``.

    Returns N = 2*B(delta**-0.5) where B(X) is the largest integer smaller
    than X + 1, i.e. X itself for integer X and ceil(X) otherwise.  The
    distinction matters: plain floor would lose two modes whenever the square
    root is not an integer (e.g. delta = 5% gives N = 10, not 8).

    For delta = 0 the rule degenerates; callers must then pick N themselves.
    """
    delta = float(delta)
    if delta == 0.0:
        raise ValueError("truncation rule degenerates at delta = 0; supply the order explicitly")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    x = 1.0 / math.sqrt(delta)
    nearest = round(x)
    # Snap to integers reached only up to roundoff (e.g. delta = 0.01 -> x = 10).
    if abs(x - nearest) <= 1e-9 * max(nearest, 1):
        bracket = int(nearest)
    else:
        bracket = math.ceil(x)
    return max(2, 2 * bracket)


def _index_direction(index: FourierIndex) -> np.ndarray:
    vec = np.array([index.l1, index.l2], dtype=float) / index.norm
    return vec


def acoustic_mean_points(
    order: int, lambda0: float = 1e-3, side: float = 1.0
) -> list[AdmissiblePoint]:
    """Admissible wavenumber/direction pairs for recovering the source mean.

    For every nonzero index the wavenumber is (2*pi/side)*|l| with direction
    l/|l|, which turns the far-field phase into the matching basis function.
    The zero mode cannot be probed at zero frequency, so it is measured at
    the small detuned wavenumber (2*pi/side)*lambda0 along (1, 0); the
    resulting leakage from neighbouring modes is corrected during inversion.
    """
    order = int(order)
    if order < 1:
        raise ValueError("order must be at least 1")
    side = check_positive(side, "side")
    if not 0.0 < lambda0 < 1.0:
        raise ValueError(f"lambda0 must lie in (0, 1), got {lambda0}")
    scale = 2.0 * math.pi / side
    points = []
    for index in fourier_indices(order):
        if index.is_zero:
            point = AdmissiblePoint(index, scale * lambda0, (1.0, 0.0), MODE_ACOUSTIC_MEAN)
        else:
            point = AdmissiblePoint(
                index, scale * index.norm, _index_direction(index), MODE_ACOUSTIC_MEAN
            )
        points.append(point)
    return points


def acoustic_variance_points(
    order: int, side: float = 1.0, zero_dir: Sequence[float] = (1.0, 0.0)
) -> list[AdmissiblePoint]:
    """Admissible frequency offsets/directions for recovering the variance.

    The variance channel pairs measurements at a small base wavenumber k0 and
    at k0 + offset, so the zero mode needs no detuning: its offset is 0 and
    the observation direction may be any unit vector (``zero_dir``).
    """
    order = int(order)
    if order < 1:
        raise ValueError("order must be at least 1")
    side = check_positive(side, "side")
    zero_dir = check_unit_vector(zero_dir, name="zero_dir")
    scale = 2.0 * math.pi / side
    points = []
    for index in fourier_indices(order):
        if index.is_zero:
            point = AdmissiblePoint(index, 0.0, zero_dir, MODE_ACOUSTIC_VARIANCE)
        else:
            point = AdmissiblePoint(
                index, scale * index.norm, _index_direction(index), MODE_ACOUSTIC_VARIANCE
            )
        points.append(point)
    return points


def elastic_mean_points(
    order: int, xi0: float = 1e-3, side: float = 1.0
) -> list[AdmissiblePoint]:
    """Admissible angular frequencies/directions for the elastic mean channel.

    Identical construction to the acoustic mean case with the wavenumber
    replaced by an angular frequency; the physical measurement frequency for
    wave type p or s is the wave speed times this value, which consumers
    obtain via :func:`randsource.elastic.measurement_frequency`.
    """
    order = int(order)
    if order < 1:
        raise ValueError("order must be at least 1")
    side = check_positive(side, "side")
    if not 0.0 < xi0 < 1.0:
        raise ValueError(f"xi0 must lie in (0, 1), got {xi0}")
    scale = 2.0 * math.pi / side
    points = []
    for index in fourier_indices(order):
        if index.is_zero:
            point = AdmissiblePoint(index, scale * xi0, (1.0, 0.0), MODE_ELASTIC_MEAN)
        else:
            point = AdmissiblePoint(
                index, scale * index.norm, _index_direction(index), MODE_ELASTIC_MEAN
            )
        points.append(point)
    return points


def elastic_variance_points(
    order: int, side: float = 1.0, zero_dir: Sequence[float] = (1.0, 0.0)
) -> list[AdmissiblePoint]:
    """Elastic counterpart of :func:`acoustic_variance_points` (same formulas)."""
    order = int(order)
    if order < 1:
        raise ValueError("order must be at least 1")
    side = check_positive(side, "side")
    zero_dir = check_unit_vector(zero_dir, name="zero_dir")
    scale = 2.0 * math.pi / side
    points = []
    for index in fourier_indices(order):
        if index.is_zero:
            point = AdmissiblePoint(index, 0.0, zero_dir, MODE_ELASTIC_VARIANCE)
        else:
            point = AdmissiblePoint(
                index, scale * index.norm, _index_direction(index), MODE_ELASTIC_VARIANCE
            )
        points.append(point)
    return points
