"""Discretised white noise on the source domain and the driving stochastic sum.

A Brownian sheet assigns independent Gaussian increments to disjoint cells,
with variance equal to the cell area.  On the fixed midpoint quadrature mesh
this reduces to one i.i.d. Normal(0, cell_area) draw per cell (and per
component for vector-valued sources), and stochastic integrals against the
noise become plain weighted sums of those increments.

Seeding is counter style: the stream of realization ``r`` is derived from
(master_seed, r) alone, so results do not depend on how realizations are
batched or distributed over workers, and extending a run reuses the earlier
draws unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import MeshMismatchError
from .validation import check_positive

__all__ = [
    "STREAM_NOISE",
    "STREAM_MEASUREMENT",
    "QuadratureMesh",
    "NoiseGrid",
    "SeedSpec",
    "sample_noise",
    "stochastic_integral",
]

# Sub-stream labels of one realization: cell increments vs. measurement noise.
STREAM_NOISE = 0
STREAM_MEASUREMENT = 1


@dataclass(frozen=True, eq=False)
class QuadratureMesh:
    """Uniform M x M midpoint mesh of the square (-side/2, side/2)^2."""

    m: int
    side: float
    centers: np.ndarray
    cell_area: float

    @classmethod
    def build(cls, m: int, side: float = 1.0) -> "QuadratureMesh":
        m = int(m)
        if m < 2:
            raise ValueError(f"mesh needs at least 2 cells per side, got {m}")
        side = check_positive(side, "side")
        step = side / m
        coords = (np.arange(m) + 0.5) * step - 0.5 * side
        x1, x2 = np.meshgrid(coords, coords, indexing="ij")
        centers = np.column_stack([x1.ravel(), x2.ravel()])
        centers.setflags(write=False)
        return cls(m=m, side=side, centers=centers, cell_area=step * step)

    @property
    def n_cells(self) -> int:
        return self.m * self.m

    def same_grid(self, other: "QuadratureMesh") -> bool:
        return self.m == other.m and self.side == other.side

    def sample(self, fn: Callable) -> np.ndarray:
        """Evaluate ``fn(x1, x2)`` at all cell centers, broadcasting constants."""
        x1 = self.centers[:, 0]
        x2 = self.centers[:, 1]
        values = np.asarray(fn(x1, x2), dtype=float)
        if values.shape != x1.shape:
            values = np.broadcast_to(values, x1.shape).copy()
        return values


@dataclass(frozen=True)
class SeedSpec:
    """Identifies the random stream of one realization of one experiment."""

    master_seed: int
    realization_index: int = 0

    def generator(self, stream: int = STREAM_NOISE) -> np.random.Generator:
        """Independent generator for (master_seed, realization, stream)."""
        seq = np.random.SeedSequence(
            entropy=int(self.master_seed),
            spawn_key=(int(self.realization_index), int(stream)),
        )
        return np.random.default_rng(seq)


@dataclass(frozen=True, eq=False)
class NoiseGrid:
    """Per-cell Brownian increments of one realization.

    ``increments`` has shape (dims, n_cells); the two components of an
    elastic noise grid are mutually independent sheets.
    """

    mesh: QuadratureMesh
    increments: np.ndarray

    @property
    def dims(self) -> int:
        return self.increments.shape[0]


def sample_noise(mesh: QuadratureMesh, dims: int, seed: SeedSpec) -> NoiseGrid:
    """Draw one white-noise realization on ``mesh``.

    Each increment is Normal(0, cell_area), i.i.d. across cells and across
    the ``dims`` components.  Deterministic given ``seed``.
    """
    if dims not in (1, 2):
        raise ValueError(f"dims must be 1 or 2, got {dims}")
    rng = seed.generator(STREAM_NOISE)
    scale = np.sqrt(mesh.cell_area)
    increments = rng.standard_normal((dims, mesh.n_cells)) * scale
    increments.setflags(write=False)
    return NoiseGrid(mesh=mesh, increments=increments)


def stochastic_integral(kernel_samples, noise: NoiseGrid):
    """Ito-sum discretisation sum_j kernel(y_j) . dW_j against a noise grid.

    ``kernel_samples`` is either a complex (n_cells,) array (scalar kernel,
    scalar noise) or a complex (n_cells, 2, 2) array of matrices acting on
    the 2-vector increments.  Linear in both arguments.
    """
    kernel = np.asarray(kernel_samples)
    n = noise.mesh.n_cells
    if kernel.shape == (n,):
        if noise.dims != 1:
            raise MeshMismatchError("scalar kernel requires scalar noise (dims=1)")
        return complex(kernel @ noise.increments[0])
    if kernel.shape == (n, 2, 2):
        if noise.dims != 2:
            raise MeshMismatchError("matrix kernel requires vector noise (dims=2)")
        return np.einsum("jab,bj->a", kernel, noise.increments)
    raise MeshMismatchError(
        f"kernel shape {kernel.shape} does not match mesh with {n} cells"
    )
