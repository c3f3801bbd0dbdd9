"""Fourier-coefficient recovery for the elastic source statistics.

The compressional and shear projectors sum to the identity, so rescaling each
measured far field by speed^2 / amplitude and adding the two wave types
reproduces the plain oscillatory volume integral of the source.  The mean
coefficients then read off exactly as in the scalar case (componentwise), and
the covariance of two combined, normalised fields at offset frequencies is
the Fourier integral of the variance profile (sigma1^2, sigma2^2), again
componentwise because the noise coupling is diagonal.
"""

from __future__ import annotations

import math
from typing import Mapping, Optional

import numpy as np

from .acoustic import farfield_amplitude
from .campaign import ElasticMeasurementSet
from .coefficients import KIND_MEAN, KIND_VARIANCE, CoefficientSet
from .elastic import LameParams
from .errors import MissingChannelsError
from .geometry import FourierIndex, fourier_indices
from .invert_acoustic import overlap_integral
from .validation import check_positive

__all__ = [
    "mean_coefficient",
    "mean_zero_coefficient",
    "combine_normalized",
    "variance_coefficient",
    "recover_mean",
    "recover_variance",
]


def mean_coefficient(
    e_p, e_s, index, frequency, side: float, lame: LameParams
) -> np.ndarray:
    """Vector mean coefficient at a nonzero index from the p/s expectations.

    Both expectations are measured at their wave type's physical frequency
    c_xi * omega_l, where both wavenumbers equal omega_l, so a single
    amplitude factor serves both channels.
    """
    index = FourierIndex(int(index[0]), int(index[1]))
    if index.is_zero:
        raise ValueError("the zero mode requires mean_zero_coefficient")
    side = check_positive(side, "side")
    amp = farfield_amplitude(frequency)
    combined = lame.c_p**2 * np.asarray(e_p, dtype=complex) + lame.c_s**2 * np.asarray(
        e_s, dtype=complex
    )
    return combined / (amp * side * side)


def mean_zero_coefficient(
    e_p0,
    e_s0,
    coefficients: Mapping[FourierIndex, np.ndarray],
    xi0: float,
    side: float,
    lame: LameParams,
) -> np.ndarray:
    """Zero-mode vector mean coefficient from the detuned measurements.

    Mirrors the scalar zero-mode formula with the combined p/s data in place
    of the single expectation; the leakage correction uses the same closed
    overlap integral, applied componentwise.
    """
    side = check_positive(side, "side")
    if not 0.0 < xi0 < 1.0:
        raise ValueError(f"xi0 must lie in (0, 1), got {xi0}")
    s = math.sin(xi0 * math.pi)
    if s == 0.0:
        raise ValueError("xi0 must not be an integer")
    detuned = 2.0 * math.pi / side * xi0
    amp = farfield_amplitude(detuned)
    combined = lame.c_p**2 * np.asarray(e_p0, dtype=complex) + lame.c_s**2 * np.asarray(
        e_s0, dtype=complex
    )
    bracket = combined / (amp * side * side)
    correction = np.zeros(2, dtype=complex)
    for index, value in coefficients.items():
        index = FourierIndex(int(index[0]), int(index[1]))
        if index.is_zero:
            continue
        correction += np.asarray(value, dtype=complex) * overlap_integral(index, xi0, side)
    bracket = bracket - correction / (side * side)
    return (xi0 * math.pi / s) * bracket


def combine_normalized(u_p, u_s, omega, lame: LameParams) -> np.ndarray:
    """Combined normalised field speed_p^2/amp * u_p + speed_s^2/amp * u_s.

    With both far fields measured at their type's frequency c_xi * omega, the
    projectors and forward prefactors cancel and the result equals the plain
    volume integral of the (random) source at frequency omega.
    """
    omega = check_positive(omega, "omega")
    amp = farfield_amplitude(omega)
    return (
        lame.c_p**2 * np.asarray(u_p, dtype=complex)
        + lame.c_s**2 * np.asarray(u_s, dtype=complex)
    ) / amp


def variance_coefficient(c_value, side: float = 1.0) -> np.ndarray:
    """Vector variance coefficient: componentwise covariance divided by side^2."""
    side = check_positive(side, "side")
    return np.asarray(c_value, dtype=complex) / (side * side)


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
    measurements: ElasticMeasurementSet, order: Optional[int] = None
) -> CoefficientSet:
    """Recover all vector mean coefficients up to ``order``."""
    side = measurements.side
    lame = measurements.lame
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
        point, e_p, e_s = lookup[idx]
        values[idx] = mean_coefficient(e_p, e_s, idx, point.frequency, side, lame)
    _, e_p0, e_s0 = lookup[FourierIndex(0, 0)]
    values[FourierIndex(0, 0)] = mean_zero_coefficient(
        e_p0, e_s0, values, measurements.xi0, side, lame
    )
    return CoefficientSet(kind=KIND_MEAN, order=order, side=side, components=2, values=values)


def recover_variance(
    measurements: ElasticMeasurementSet, order: Optional[int] = None
) -> CoefficientSet:
    """Recover all vector variance coefficients up to ``order``."""
    side = measurements.side
    order = _resolve_order(measurements.order, order)
    lookup = measurements.covariance_lookup()
    wanted = fourier_indices(order)
    missing = [idx for idx in wanted if idx not in lookup]
    if missing:
        raise MissingChannelsError(missing, what="covariance channels")
    values = {}
    for idx in wanted:
        _, c_value = lookup[idx]
        values[idx] = variance_coefficient(c_value, side)
    return CoefficientSet(
        kind=KIND_VARIANCE, order=order, side=side, components=2, values=values
    )
