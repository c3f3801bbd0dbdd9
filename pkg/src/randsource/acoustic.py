"""Far-field model of a white-noise-driven scalar (Helmholtz) source.

One realization of the radiated far field at wavenumber k and direction xhat
is the midpoint-quadrature value of

    amplitude(k) * integral over the square of exp(-i k xhat.y) (g + sigma dW)

with ``amplitude`` the 2-D outgoing-wave far-field prefactor.  The same noise
grid must be reused for every (k, xhat) evaluated within one realization;
the cross-frequency correlation that this induces is exactly what the
variance inversion measures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import MeshMismatchError
from .noise import NoiseGrid, QuadratureMesh, stochastic_integral
from .validation import check_noise_level

__all__ = [
    "ScalarSourceModel",
    "farfield_amplitude",
    "farfield_kernel",
    "deterministic_farfield",
    "realize_farfield",
    "add_noise",
]


@dataclass(frozen=True)
class ScalarSourceModel:
    """Mean and standard-deviation profiles of a random scalar source.

    Both are vectorised callables ``f(x1, x2)``; gradients are optional and
    only needed by evaluation code, never by the forward model.
    """

    mean: Callable
    std: Callable
    mean_gradient: Optional[Callable] = None
    std_gradient: Optional[Callable] = None


def farfield_amplitude(wavenumber):
    """Amplitude factor exp(i pi/4) / sqrt(8 pi k) of the 2-D far-field kernel."""
    k = np.asarray(wavenumber, dtype=float)
    if np.any(k <= 0.0):
        raise ValueError("wavenumber must be positive")
    values = np.exp(1j * np.pi / 4) / np.sqrt(8.0 * np.pi * k)
    if values.ndim == 0:
        return complex(values)
    return values


def farfield_kernel(direction, y, wavenumber):
    """Far-field kernel amplitude(k) * exp(-i k xhat . y) at points ``y``."""
    k = float(wavenumber)
    amp = farfield_amplitude(k)
    d = np.asarray(direction, dtype=float)
    pts = np.asarray(y, dtype=float)
    phase = k * (pts[..., 0] * d[0] + pts[..., 1] * d[1])
    values = amp * np.exp(-1j * phase)
    if values.ndim == 0:
        return complex(values)
    return values


def deterministic_farfield(
    source: ScalarSourceModel,
    wavenumber: float,
    direction,
    mesh: QuadratureMesh,
) -> complex:
    """Noise-free far field: midpoint quadrature of the kernel against the mean."""
    k = float(wavenumber)
    amp = farfield_amplitude(k)
    d = np.asarray(direction, dtype=float)
    g = mesh.sample(source.mean)
    phase = k * (mesh.centers @ d)
    return complex(amp * mesh.cell_area * (np.exp(-1j * phase) @ g))


def realize_farfield(
    source: ScalarSourceModel,
    noise: NoiseGrid,
    wavenumber: float,
    direction,
) -> complex:
    """One far-field sample: deterministic part plus the white-noise response.

    The stochastic term is the Ito sum of the far-field kernel weighted by the
    standard-deviation profile against ``noise``.  Evaluating several
    frequencies against the same ``noise`` yields correlated samples, which is
    required for covariance measurements.
    """
    if noise.dims != 1:
        raise MeshMismatchError("acoustic far field requires scalar noise (dims=1)")
    mesh = noise.mesh
    det = deterministic_farfield(source, wavenumber, direction, mesh)
    k = float(wavenumber)
    d = np.asarray(direction, dtype=float)
    kernel = farfield_amplitude(k) * np.exp(-1j * k * (mesh.centers @ d))
    kernel = kernel * mesh.sample(source.std)
    return det + stochastic_integral(kernel, noise)


def add_noise(value, delta, r1, r2):
    """Perturb measured data: value + delta * r1 * |value| * exp(i pi r2).

    ``r1`` and ``r2`` are uniform draws from [-1, 1]; the perturbation
    magnitude never exceeds delta * |value|.  Broadcasts over arrays.
    """
    delta = check_noise_level(delta)
    if delta == 0.0:
        return value
    return value + delta * np.asarray(r1) * np.abs(value) * np.exp(1j * np.pi * np.asarray(r2))
