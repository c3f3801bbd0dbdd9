"""Fourier-coefficient recovery for the scalar (Helmholtz) source statistics.

Each admissible mean measurement equals side^2 * amplitude(k_l) * g_hat_l, so
one division recovers one coefficient of the mean.  The variance coefficients
come from two-frequency covariances: after stripping the amplitude factors,
the covariance of the far field at k0 + tau_l against the far field at k0 is
exactly the Fourier integral of sigma^2 at lattice index l.  The zero mode of
the mean cannot be probed at frequency zero, so it is measured slightly
detuned and the leakage from all other recovered modes is subtracted via a
closed-form overlap integral.
"""

from __future__ import annotations

import math
from typing import Mapping, Optional

from .acoustic import farfield_amplitude
from .campaign import AcousticMeasurementSet
from .coefficients import KIND_MEAN, KIND_VARIANCE, CoefficientSet
from .errors import MissingChannelsError
from .geometry import FourierIndex, fourier_indices
from .validation import check_positive

__all__ = [
    "mean_coefficient",
    "overlap_integral",
    "mean_zero_coefficient",
    "variance_coefficient",
    "recover_mean",
    "recover_variance",
]


def mean_coefficient(e_value, index, wavenumber, side: float = 1.0) -> complex:
    """Mean Fourier coefficient at a nonzero index from one expectation value."""
    index = FourierIndex(int(index[0]), int(index[1]))
    if index.is_zero:
        raise ValueError("the zero mode requires mean_zero_coefficient")
    side = check_positive(side, "side")
    return complex(e_value) / (side * side * farfield_amplitude(wavenumber))


def overlap_integral(index, shift, side: float = 1.0) -> complex:
    """Closed form of the basis overlap against the detuned zero-mode phase.

    Integrates basis function l times the conjugate detuned phase (shift, 0)
    over the square: zero unless l2 == 0, otherwise
    side^2 * sin(pi (l1 - shift)) / (pi (l1 - shift)).
    """
    index = FourierIndex(int(index[0]), int(index[1]))
    if index.is_zero:
        raise ValueError("overlap integral is defined for nonzero indices")
    side = check_positive(side, "side")
    if not 0.0 < shift < 1.0:
        raise ValueError(f"shift must lie in (0, 1), got {shift}")
    if index.l2 != 0:
        return 0.0j
    t = math.pi * (index.l1 - shift)
    return complex(side * side * math.sin(t) / t)


def mean_zero_coefficient(
    e_zero,
    coefficients: Mapping[FourierIndex, complex],
    lambda0: float,
    side: float = 1.0,
) -> complex:
    """Zero-mode mean coefficient from the detuned measurement.

    ``coefficients`` maps the already-recovered nonzero indices to their
    values; the correction sum runs over exactly those, so the truncation tail
    of the source is absorbed into the reconstruction error budget.
    """
    side = check_positive(side, "side")
    if not 0.0 < lambda0 < 1.0:
        raise ValueError(f"lambda0 must lie in (0, 1), got {lambda0}")
    s = math.sin(lambda0 * math.pi)
    if s == 0.0:
        raise ValueError("lambda0 must not be an integer")
    detuned_wavenumber = 2.0 * math.pi / side * lambda0
    correction = 0.0j
    for index, value in coefficients.items():
        index = FourierIndex(int(index[0]), int(index[1]))
        if index.is_zero:
            continue
        correction += complex(value) * overlap_integral(index, lambda0, side)
    bracket = complex(e_zero) / farfield_amplitude(detuned_wavenumber) - correction
    return (lambda0 * math.pi) / (side * side * s) * bracket


def variance_coefficient(c_value, base_wavenumber, offset, side: float = 1.0) -> complex:
    """Variance Fourier coefficient from one raw two-frequency covariance.

    The conjugate amplitude phases cancel, leaving the real normalisation
    8 pi sqrt((k0 + tau) k0) / side^2; an offset of zero reduces this to the
    single-frequency auto-covariance formula for the zero mode.
    """
    k0 = check_positive(base_wavenumber, "base_wavenumber")
    offset = float(offset)
    if offset < 0.0:
        raise ValueError(f"offset must be nonnegative, got {offset}")
    side = check_positive(side, "side")
    norm = 8.0 * math.pi * math.sqrt((k0 + offset) * k0) / (side * side)
    return norm * complex(c_value)


def _resolve_order(available: int, requested: Optional[int]) -> int:
    if requested is None:
        return available
    requested = int(requested)
    if requested < 1 or requested > available:
        raise ValueError(
            f"truncation order {requested} not available (measurements cover up to {available})"
        )
    return requested


def recover_mean(
    measurements: AcousticMeasurementSet, order: Optional[int] = None
) -> CoefficientSet:
    """Recover all mean coefficients up to ``order`` from measured expectations."""
    side = measurements.side
    order = _resolve_order(measurements.order, order)
    lookup = measurements.mean_lookup()
    wanted = fourier_indices(order)
    missing = [idx for idx in wanted if idx not in lookup]
    if missing:
        raise MissingChannelsError(missing, what="mean channels")
    values = {}
    for idx in wanted:
        if idx.is_zero:
            continue
        point, e_value = lookup[idx]
        values[idx] = mean_coefficient(e_value, idx, point.frequency, side)
    _, e_zero = lookup[FourierIndex(0, 0)]
    values[FourierIndex(0, 0)] = mean_zero_coefficient(
        e_zero, values, measurements.lambda0, side
    )
    return CoefficientSet(kind=KIND_MEAN, order=order, side=side, components=1, values=values)


def recover_variance(
    measurements: AcousticMeasurementSet, order: Optional[int] = None
) -> CoefficientSet:
    """Recover all variance coefficients up to ``order`` from covariances."""
    side = measurements.side
    order = _resolve_order(measurements.order, order)
    lookup = measurements.covariance_lookup()
    wanted = fourier_indices(order)
    missing = [idx for idx in wanted if idx not in lookup]
    if missing:
        raise MissingChannelsError(missing, what="covariance channels")
    k0 = measurements.k0
    values = {}
    for idx in wanted:
        point, c_value = lookup[idx]
        values[idx] = variance_coefficient(c_value, k0, point.frequency, side)
    return CoefficientSet(
        kind=KIND_VARIANCE, order=order, side=side, components=1, values=values
    )
