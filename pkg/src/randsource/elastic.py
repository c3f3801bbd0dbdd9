"""Compressional and shear far fields of a white-noise-driven elastic source.

The displacement radiated by a random body force splits into a compressional
(p) wave travelling at speed c_p and a shear (s) wave at c_s < c_p.  Their
far-field patterns are projections of one oscillatory volume integral of the
source: the p pattern is parallel to the observation direction, the s pattern
orthogonal to it.  Measuring wave type xi at physical frequency c_xi * omega
makes its wavenumber equal omega, which aligns the phase of both integrals to
the same Fourier lattice and lets the inversion add the two channels back
into a plain Fourier-type integral of the source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .acoustic import farfield_amplitude
from .errors import MeshMismatchError
from .geometry import AdmissiblePoint, MODE_ELASTIC_MEAN, MODE_ELASTIC_VARIANCE
from .noise import NoiseGrid, QuadratureMesh, stochastic_integral
from .validation import check_unit_vector

__all__ = [
    "LameParams",
    "VectorSourceModel",
    "polarization_projectors",
    "measurement_frequency",
    "deterministic_farfields",
    "realize_farfields",
]


@dataclass(frozen=True)
class LameParams:
    """Lame constants of the homogeneous isotropic medium.

    Requires mu > 0 and lam + mu > 0, which makes the compressional speed
    strictly larger than the shear speed.
    """

    lam: float
    mu: float

    def __post_init__(self):
        if not self.mu > 0.0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.lam + self.mu > 0.0:
            raise ValueError(f"lam + mu must be positive, got {self.lam + self.mu}")

    @property
    def c_p(self) -> float:
        return math.sqrt(self.lam + 2.0 * self.mu)

    @property
    def c_s(self) -> float:
        return math.sqrt(self.mu)

    def speed(self, wave: str) -> float:
        if wave == "p":
            return self.c_p
        if wave == "s":
            return self.c_s
        raise ValueError(f"wave type must be 'p' or 's', got {wave!r}")


@dataclass(frozen=True)
class VectorSourceModel:
    """Mean vector (g1, g2) and diagonal std profiles (sigma1, sigma2).

    Components are vectorised callables ``f(x1, x2)``.  The noise acting on
    component i is weighted by sigma_i alone (diagonal coupling), which is
    what allows the variance components to be recovered separately.
    """

    mean: Tuple[Callable, Callable]
    std: Tuple[Callable, Callable]
    mean_gradient: Optional[Tuple[Callable, Callable]] = None
    std_gradient: Optional[Tuple[Callable, Callable]] = None


def polarization_projectors(direction) -> Tuple[np.ndarray, np.ndarray]:
    """Orthogonal projectors (P_p, P_s) onto and across a unit direction.

    P_p = xhat xhat^T picks the compressional polarisation, P_s = I - P_p the
    shear one; they are symmetric, idempotent and sum to the identity.
    """
    d = check_unit_vector(direction)
    p_par = np.outer(d, d)
    p_perp = np.eye(2) - p_par
    return p_par, p_perp


def measurement_frequency(point: AdmissiblePoint, wave: str, lame: LameParams) -> float:
    """Physical frequency at which wave type ``wave`` probes ``point``.

    Returns c_wave * omega for the point's admissible frequency omega; at this
    frequency the wave-type wavenumber equals omega itself, so the far-field
    phase lands exactly on the Fourier lattice of the domain.
    """
    if point.mode not in (MODE_ELASTIC_MEAN, MODE_ELASTIC_VARIANCE):
        raise ValueError(f"expected an elastic admissible point, got mode {point.mode!r}")
    return lame.speed(wave) * point.frequency


def _volume_integral(source, wavenumber, direction, mesh):
    """Midpoint quadrature of exp(-i k xhat.y) g(y) over the square, per component."""
    phase = np.exp(-1j * wavenumber * (mesh.centers @ direction))
    g1 = mesh.sample(source.mean[0])
    g2 = mesh.sample(source.mean[1])
    return mesh.cell_area * np.array([phase @ g1, phase @ g2])


def deterministic_farfields(
    source: VectorSourceModel,
    omega: float,
    direction,
    lame: LameParams,
    mesh: QuadratureMesh,
) -> Tuple[np.ndarray, np.ndarray]:
    """Noise-free compressional and shear far fields at angular frequency omega."""
    omega = float(omega)
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    d = check_unit_vector(direction)
    p_par, p_perp = polarization_projectors(d)
    fields = []
    for speed, projector in ((lame.c_p, p_par), (lame.c_s, p_perp)):
        k = omega / speed
        w = _volume_integral(source, k, d, mesh)
        prefactor = farfield_amplitude(k) * (k * k) / (omega * omega)
        fields.append(prefactor * (projector @ w))
    return fields[0], fields[1]


def realize_farfields(
    source: VectorSourceModel,
    noise: NoiseGrid,
    omega: float,
    direction,
    lame: LameParams,
) -> Tuple[np.ndarray, np.ndarray]:
    """One realization of (u_p, u_s) far fields at angular frequency omega.

    Each wave type adds the Ito sum of its projected, sigma-weighted kernel
    against the shared 2-component noise grid; u_p is parallel to the
    observation direction and u_s orthogonal to it by construction.
    """
    if noise.dims != 2:
        raise MeshMismatchError("elastic far field requires vector noise (dims=2)")
    omega = float(omega)
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    mesh = noise.mesh
    d = check_unit_vector(direction)
    p_par, p_perp = polarization_projectors(d)
    sig1 = mesh.sample(source.std[0])
    sig2 = mesh.sample(source.std[1])
    fields = []
    for speed, projector in ((lame.c_p, p_par), (lame.c_s, p_perp)):
        k = omega / speed
        prefactor = farfield_amplitude(k) * (k * k) / (omega * omega)
        w = _volume_integral(source, k, d, mesh)
        phase = np.exp(-1j * k * (mesh.centers @ d))
        # Kernel matrix per cell: prefactor * P @ diag(sigma1, sigma2) * phase.
        kernel = np.empty((mesh.n_cells, 2, 2), dtype=complex)
        kernel[:, :, 0] = np.multiply.outer(prefactor * phase * sig1, projector[:, 0])
        kernel[:, :, 1] = np.multiply.outer(prefactor * phase * sig2, projector[:, 1])
        fields.append(prefactor * (projector @ w) + stochastic_integral(kernel, noise))
    return fields[0], fields[1]
