"""Streaming, mergeable estimators for complex means and Hermitian covariances.

Estimators accept samples one at a time or in vectorised batches (batch axis
last) and can be merged with the pooled-comoment correction, so campaigns can
be split into fixed chunks, processed on any number of workers, and reduced
in chunk order with results independent of the worker count.

The covariance is Hermitian, C[u, v] = E[(u - Eu) * conj(v - Ev)], finalised
with the population divisor (count, not count - 1): the consumers operate in
a large-sample regime where the distinction is far below Monte Carlo noise.
The update arithmetic is arranged so that swapping the two input streams
produces the exact complex conjugate, bit for bit.
"""

from __future__ import annotations

import numpy as np

__all__ = ["MeanAccumulator", "CovarianceAccumulator", "merge"]


def _as_complex(sample, shape):
    arr = np.asarray(sample, dtype=complex)
    if arr.shape != shape:
        raise ValueError(f"sample shape {arr.shape} does not match accumulator shape {shape}")
    return arr


def _hermitian_product(du, dv):
    """du * conj(dv) via explicit real arithmetic.

    Spelled out so that swapping the arguments yields the exact bitwise
    conjugate; numpy's vectorised complex multiply may contract with FMA,
    which breaks that symmetry in the last bit.
    """
    du = np.asarray(du)
    dv = np.asarray(dv)
    out = np.empty(np.broadcast(du, dv).shape, dtype=complex)
    out.real = du.real * dv.real + du.imag * dv.imag
    out.imag = du.imag * dv.real - du.real * dv.imag
    return out


class MeanAccumulator:
    """Running complex mean of scalar or array-valued samples.

    Uses the incremental-mean update, which keeps the error relative to the
    exact batch mean at roundoff level for O(1)-magnitude streams.
    """

    def __init__(self, shape=()):
        self.shape = tuple(shape)
        self.count = 0
        self.mean = np.zeros(self.shape, dtype=complex)
        self._sqdev = np.zeros(self.shape, dtype=float)

    def update(self, sample) -> "MeanAccumulator":
        sample = _as_complex(sample, self.shape)
        self.count += 1
        delta = sample - self.mean
        self._sqdev += np.abs(delta) ** 2 * ((self.count - 1) / self.count)
        self.mean = self.mean + delta / self.count
        return self

    def add_batch(self, samples) -> "MeanAccumulator":
        """Fold in samples with the batch axis last, e.g. shape + (n,)."""
        samples = np.asarray(samples, dtype=complex)
        if samples.shape[:-1] != self.shape:
            raise ValueError(
                f"batch shape {samples.shape} does not match accumulator shape {self.shape}"
            )
        n_b = samples.shape[-1]
        if n_b == 0:
            return self
        mean_b = samples.mean(axis=-1)
        sqdev_b = np.sum(np.abs(samples - mean_b[..., None]) ** 2, axis=-1)
        self._fold(n_b, mean_b, sqdev_b)
        return self

    def merge(self, other: "MeanAccumulator") -> "MeanAccumulator":
        """Absorb another accumulator; result matches a single-pass reduction."""
        if other.shape != self.shape:
            raise ValueError(f"cannot merge shapes {self.shape} and {other.shape}")
        if other.count:
            self._fold(other.count, other.mean, other._sqdev)
        return self

    def _fold(self, n_b, mean_b, sqdev_b):
        n_a = self.count
        total = n_a + n_b
        delta = mean_b - self.mean
        self._sqdev = self._sqdev + sqdev_b + np.abs(delta) ** 2 * (n_a * n_b / total)
        self.mean = self.mean + delta * (n_b / total)
        self.count = total

    def finalize(self):
        if self.count == 0:
            raise ValueError("cannot finalize an empty accumulator")
        return self.mean.copy() if self.shape else complex(self.mean)

    def standard_error(self):
        """Estimated standard error of the mean, per component."""
        if self.count == 0:
            raise ValueError("cannot estimate errors without samples")
        variance = self._sqdev / self.count
        se = np.sqrt(variance / self.count)
        return se.copy() if self.shape else float(se)


class CovarianceAccumulator:
    """Running Hermitian covariance of two complex sample streams.

    ``finalize`` returns (1/count) * sum (u - mean_u) * conj(v - mean_v).
    A single sample gives zero covariance and sets the ``degenerate`` flag.
    """

    def __init__(self, shape=()):
        self.shape = tuple(shape)
        self.count = 0
        self.mean_u = np.zeros(self.shape, dtype=complex)
        self.mean_v = np.zeros(self.shape, dtype=complex)
        self.comoment = np.zeros(self.shape, dtype=complex)
        self._prod_sq = np.zeros(self.shape, dtype=float)

    @property
    def degenerate(self) -> bool:
        return self.count == 1

    def update(self, u_sample, v_sample) -> "CovarianceAccumulator":
        u = _as_complex(u_sample, self.shape)
        v = _as_complex(v_sample, self.shape)
        self.count += 1
        du = u - self.mean_u
        dv = v - self.mean_v
        factor = (self.count - 1) / self.count
        product = _hermitian_product(du, dv) * factor
        self.comoment = self.comoment + product
        self._prod_sq += np.abs(product) ** 2
        self.mean_u = self.mean_u + du / self.count
        self.mean_v = self.mean_v + dv / self.count
        return self

    def add_batch(self, u_samples, v_samples) -> "CovarianceAccumulator":
        """Fold in paired samples with the batch axis last."""
        u = np.asarray(u_samples, dtype=complex)
        v = np.asarray(v_samples, dtype=complex)
        if u.shape != v.shape or u.shape[:-1] != self.shape:
            raise ValueError(
                f"batch shapes {u.shape}/{v.shape} do not match accumulator shape {self.shape}"
            )
        n_b = u.shape[-1]
        if n_b == 0:
            return self
        mean_u_b = u.mean(axis=-1)
        mean_v_b = v.mean(axis=-1)
        products = _hermitian_product(u - mean_u_b[..., None], v - mean_v_b[..., None])
        comoment_b = products.sum(axis=-1)
        prod_sq_b = np.sum(np.abs(products) ** 2, axis=-1)
        self._fold(n_b, mean_u_b, mean_v_b, comoment_b, prod_sq_b)
        return self

    def merge(self, other: "CovarianceAccumulator") -> "CovarianceAccumulator":
        if other.shape != self.shape:
            raise ValueError(f"cannot merge shapes {self.shape} and {other.shape}")
        if other.count:
            self._fold(other.count, other.mean_u, other.mean_v, other.comoment, other._prod_sq)
        return self

    def _fold(self, n_b, mean_u_b, mean_v_b, comoment_b, prod_sq_b):
        n_a = self.count
        total = n_a + n_b
        du = mean_u_b - self.mean_u
        dv = mean_v_b - self.mean_v
        self.comoment = (
            self.comoment + comoment_b + _hermitian_product(du, dv) * (n_a * n_b / total)
        )
        self.mean_u = self.mean_u + du * (n_b / total)
        self.mean_v = self.mean_v + dv * (n_b / total)
        self._prod_sq += prod_sq_b
        self.count = total

    def finalize(self):
        if self.count == 0:
            raise ValueError("cannot finalize an empty accumulator")
        value = self.comoment / self.count
        return value.copy() if self.shape else complex(value)

    def standard_error(self):
        """Estimated standard error of the covariance estimate, per component.

        Based on the sample variance of the centred products; with batched
        input the centring uses per-batch means, a negligible perturbation for
        any realistic batch size.
        """
        if self.count == 0:
            raise ValueError("cannot estimate errors without samples")
        value = self.comoment / self.count
        variance = np.maximum(self._prod_sq / self.count - np.abs(value) ** 2, 0.0)
        se = np.sqrt(variance / self.count)
        return se.copy() if self.shape else float(se)


def merge(a, b):
    """Pure functional merge: returns a new accumulator equal to a + b."""
    if type(a) is not type(b):
        raise ValueError(f"cannot merge {type(a).__name__} with {type(b).__name__}")
    out = type(a)(a.shape)
    out.merge(a)
    out.merge(b)
    return out
