"""Monte Carlo measurement campaigns: far-field statistics at admissible points.

One campaign draws R independent noise realizations; each realization is
evaluated at every admissible measurement point with the same noise grid (the
cross-frequency correlation within a realization is the signal the variance
channels measure), perturbed by fresh multiplicative measurement noise per
point, and streamed into mean/covariance accumulators.

Execution layout is fixed independently of the worker count: realizations are
processed in chunks of :data:`CHUNK`, each chunk reduces into its own
accumulators, and chunks merge in index order.  Together with per-realization
seeding this makes the output byte-identical for any number of workers.  BLAS
is pinned to one thread inside the campaign so the chunk reductions themselves
are bit-reproducible; parallelism comes from processing chunks concurrently.

For speed, the far-field samples of a whole chunk are produced by matrix
products against precomputed kernel matrices instead of per-realization calls
to :func:`randsource.acoustic.realize_farfield`; the two paths agree to
roundoff and the equivalence is covered by tests.  The elastic campaign
exploits that at admissible measurement frequencies both wave types share the
same oscillatory volume integral, so each (frequency, direction) row is
integrated once and then projected.  The kernel matrices hold
O((2N+1)^2 * mesh_cells^2) doubles; at the deepest truncation the rule
produces (N = 30 at delta = 0.5%) with the default mesh that is about 1.5 GB
transiently.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from threadpoolctl import threadpool_limits

from .acoustic import ScalarSourceModel, add_noise, farfield_amplitude
from .config import ExperimentConfig
from .elastic import LameParams, VectorSourceModel
from .errors import MissingChannelsError
from .geometry import (
    AdmissiblePoint,
    FourierIndex,
    acoustic_mean_points,
    acoustic_variance_points,
    elastic_mean_points,
    elastic_variance_points,
    fourier_indices,
)
from .noise import STREAM_MEASUREMENT, QuadratureMesh, SeedSpec, sample_noise
from .sources import TestSource, get_source
from .stats import CovarianceAccumulator, MeanAccumulator

__all__ = ["CHUNK", "AcousticMeasurementSet", "ElasticMeasurementSet", "run_campaign"]

# Fixed batching of realizations.  Changing this reorders floating-point
# reductions (and therefore low-order output bits); it is intentionally a
# constant rather than a config knob.
CHUNK = 512


def _common_metadata(config: ExperimentConfig, order: int) -> Dict[str, Any]:
    meta = {
        "model": config.model,
        "source": config.source,
        "realizations": int(config.realizations),
        "delta": float(config.delta),
        "master_seed": int(config.master_seed),
        "mesh_cells": int(config.mesh_cells),
        "side": float(config.side),
        "truncation": int(order),
        "config_hash": config.physics_hash(),
        "degenerate": config.realizations < 2,
    }
    return meta


@dataclass
class AcousticMeasurementSet:
    """Mean and two-frequency covariance statistics of an acoustic campaign.

    ``covariance_values[i]`` pairs the far field at wavenumber k0 + offset_i
    with the far field at k0, both observed along the i-th variance point's
    direction; values are raw (unnormalised) far-field covariances.
    """

    mean_points: List[AdmissiblePoint]
    variance_points: List[AdmissiblePoint]
    mean_values: np.ndarray
    covariance_values: np.ndarray
    mean_se: np.ndarray
    covariance_se: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    model = "acoustic"

    @property
    def side(self) -> float:
        return float(self.metadata["side"])

    @property
    def order(self) -> int:
        return int(self.metadata["truncation"])

    @property
    def lambda0(self) -> float:
        return float(self.metadata["lambda0"])

    @property
    def k0(self) -> float:
        return float(self.metadata["k0"])

    def mean_lookup(self) -> Dict[FourierIndex, Tuple[AdmissiblePoint, complex]]:
        return {
            p.index: (p, complex(v)) for p, v in zip(self.mean_points, self.mean_values)
        }

    def covariance_lookup(self) -> Dict[FourierIndex, Tuple[AdmissiblePoint, complex]]:
        return {
            p.index: (p, complex(v))
            for p, v in zip(self.variance_points, self.covariance_values)
        }

    def validate(self) -> "AcousticMeasurementSet":
        expected = fourier_indices(self.order)
        for points, values, what in (
            (self.mean_points, self.mean_values, "mean channels"),
            (self.variance_points, self.covariance_values, "covariance channels"),
        ):
            seen = [p.index for p in points]
            if len(values) != len(points):
                raise ValueError(f"{what}: {len(values)} values for {len(points)} points")
            missing = set(expected) - set(seen)
            if missing:
                raise MissingChannelsError(missing, what=what)
            if len(seen) != len(set(seen)):
                raise ValueError(f"{what}: duplicated Fourier indices")
            if not np.isfinite(np.asarray(values, dtype=complex)).all():
                raise ValueError(f"{what}: non-finite values")
        return self


@dataclass
class ElasticMeasurementSet:
    """Elastic campaign statistics: per-point p/s mean vectors and combined
    normalised-field covariances (componentwise).

    ``diagnostics``, when present, holds the four raw cross-covariances
    between wave-type pairs at the offset/baseline frequencies, keyed
    'pp', 'ps', 'sp', 'ss'; they are informational only and never serialised.
    """

    mean_points: List[AdmissiblePoint]
    variance_points: List[AdmissiblePoint]
    mean_p_values: np.ndarray
    mean_s_values: np.ndarray
    covariance_values: np.ndarray
    mean_p_se: np.ndarray
    mean_s_se: np.ndarray
    covariance_se: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)
    diagnostics: Optional[Dict[str, np.ndarray]] = None

    model = "elastic"

    @property
    def side(self) -> float:
        return float(self.metadata["side"])

    @property
    def order(self) -> int:
        return int(self.metadata["truncation"])

    @property
    def xi0(self) -> float:
        return float(self.metadata["xi0"])

    @property
    def omega0(self) -> float:
        return float(self.metadata["omega0"])

    @property
    def lame(self) -> LameParams:
        return LameParams(
            lam=float(self.metadata["lame_lambda"]), mu=float(self.metadata["lame_mu"])
        )

    def mean_lookup(
        self,
    ) -> Dict[FourierIndex, Tuple[AdmissiblePoint, np.ndarray, np.ndarray]]:
        return {
            p.index: (p, np.asarray(ep), np.asarray(es))
            for p, ep, es in zip(self.mean_points, self.mean_p_values, self.mean_s_values)
        }

    def covariance_lookup(self) -> Dict[FourierIndex, Tuple[AdmissiblePoint, np.ndarray]]:
        return {
            p.index: (p, np.asarray(v))
            for p, v in zip(self.variance_points, self.covariance_values)
        }

    def validate(self) -> "ElasticMeasurementSet":
        expected = fourier_indices(self.order)
        checks = (
            (self.mean_points, self.mean_p_values, "p mean channels"),
            (self.mean_points, self.mean_s_values, "s mean channels"),
            (self.variance_points, self.covariance_values, "covariance channels"),
        )
        for points, values, what in checks:
            values = np.asarray(values, dtype=complex)
            if values.shape != (len(points), 2):
                raise ValueError(f"{what}: expected shape {(len(points), 2)}, got {values.shape}")
            seen = [p.index for p in points]
            missing = set(expected) - set(seen)
            if missing:
                raise MissingChannelsError(missing, what=what)
            if len(seen) != len(set(seen)):
                raise ValueError(f"{what}: duplicated Fourier indices")
            if not np.isfinite(values).all():
                raise ValueError(f"{what}: non-finite values")
        return self


MeasurementSet = AcousticMeasurementSet | ElasticMeasurementSet


def _resolve_source(config: ExperimentConfig, source):
    if source is None:
        source = get_source(config.source, model=config.model)
    if isinstance(source, TestSource):
        if source.model != config.model:
            raise ValueError(
                f"source {source.name!r} is {source.model}, config wants {config.model}"
            )
        source = source.to_model()
    expected = ScalarSourceModel if config.model == "acoustic" else VectorSourceModel
    if not isinstance(source, expected):
        raise TypeError(f"{config.model} campaign needs a {expected.__name__}")
    return source


def _resolve_workers(config: ExperimentConfig) -> int:
    if config.workers is not None:
        return max(1, int(config.workers))
    return max(1, os.cpu_count() or 1)


def _chunk_starts(total: int) -> range:
    return range(0, total, CHUNK)


def _measurement_uniforms(seed: int, realizations, n_channels: int):
    """Per-realization measurement-noise draws, shape (n_channels, len(chunk)) x2.

    Channel order is fixed and documented on the campaign functions; draws for
    realization r depend only on (seed, r), never on chunk layout.
    """
    n = len(realizations)
    r1 = np.empty((n_channels, n))
    r2 = np.empty((n_channels, n))
    for i, r in enumerate(realizations):
        rng = SeedSpec(seed, r).generator(STREAM_MEASUREMENT)
        draws = rng.uniform(-1.0, 1.0, size=(n_channels, 2))
        r1[:, i] = draws[:, 0]
        r2[:, i] = draws[:, 1]
    return r1, r2


def _run_chunked(starts, process, workers: int):
    """Run ``process`` over chunk starts, yielding results in chunk order."""
    with threadpool_limits(limits=1, user_api="blas"):
        if workers == 1:
            for start in starts:
                yield process(start)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                yield from pool.map(process, starts)


def _run_acoustic(config: ExperimentConfig, source: ScalarSourceModel) -> AcousticMeasurementSet:
    mesh = QuadratureMesh.build(config.mesh_cells, config.side)
    order = config.resolved_truncation()
    mean_pts = acoustic_mean_points(order, config.lambda0, config.side)
    var_pts = acoustic_variance_points(order, config.side)
    n_mean, n_var = len(mean_pts), len(var_pts)
    n_rows = n_mean + 2 * n_var

    # Row layout (also the measurement-noise channel order): mean points,
    # then offset-frequency covariance legs, then baseline legs.
    freqs = np.concatenate(
        [
            [p.frequency for p in mean_pts],
            [config.k0 + p.frequency for p in var_pts],
            np.full(n_var, config.k0),
        ]
    )
    dirs = np.vstack(
        [[p.direction for p in mean_pts]]
        + [[p.direction for p in var_pts]] * 2
    )
    amp = farfield_amplitude(freqs)

    kernel = np.exp(-1j * (freqs[:, None] * (dirs @ mesh.centers.T)))
    g_vals = mesh.sample(source.mean)
    s_vals = mesh.sample(source.std)
    det = amp * (kernel @ g_vals) * mesh.cell_area
    kernel *= s_vals[None, :]
    kernel *= amp[:, None]
    k_re = np.ascontiguousarray(kernel.real)
    k_im = np.ascontiguousarray(kernel.imag)
    del kernel

    seed = int(config.master_seed)
    delta = float(config.delta)
    total = int(config.realizations)

    def process(start: int):
        stop = min(total, start + CHUNK)
        realizations = range(start, stop)
        w = np.empty((mesh.n_cells, len(realizations)))
        for i, r in enumerate(realizations):
            w[:, i] = sample_noise(mesh, 1, SeedSpec(seed, r)).increments[0]
        samples = (k_re @ w) + 1j * (k_im @ w)
        samples += det[:, None]
        if delta > 0.0:
            r1, r2 = _measurement_uniforms(seed, realizations, n_rows)
            samples = add_noise(samples, delta, r1, r2)
        m_acc = MeanAccumulator((n_mean,))
        m_acc.add_batch(samples[:n_mean])
        c_acc = CovarianceAccumulator((n_var,))
        c_acc.add_batch(samples[n_mean : n_mean + n_var], samples[n_mean + n_var :])
        return m_acc, c_acc

    mean_acc = MeanAccumulator((n_mean,))
    cov_acc = CovarianceAccumulator((n_var,))
    for m_acc, c_acc in _run_chunked(_chunk_starts(total), process, _resolve_workers(config)):
        mean_acc.merge(m_acc)
        cov_acc.merge(c_acc)

    metadata = _common_metadata(config, order)
    metadata.update({"lambda0": float(config.lambda0), "k0": float(config.k0)})
    return AcousticMeasurementSet(
        mean_points=mean_pts,
        variance_points=var_pts,
        mean_values=mean_acc.finalize(),
        covariance_values=cov_acc.finalize(),
        mean_se=mean_acc.standard_error(),
        covariance_se=cov_acc.standard_error(),
        metadata=metadata,
    ).validate()


def _run_elastic(
    config: ExperimentConfig, source: VectorSourceModel, diagnostics: bool
) -> ElasticMeasurementSet:
    mesh = QuadratureMesh.build(config.mesh_cells, config.side)
    order = config.resolved_truncation()
    lame = LameParams(lam=config.lame_lambda, mu=config.lame_mu)
    mean_pts = elastic_mean_points(order, config.xi0, config.side)
    var_pts = elastic_variance_points(order, config.side)
    n_mean, n_var = len(mean_pts), len(var_pts)
    n_rows = n_mean + 2 * n_var

    # Row layout: mean points, offset covariance legs, baseline legs.  Each
    # row's frequency is the admissible angular frequency omega; both wave
    # types are measured at c_xi * omega, where their common wavenumber is
    # omega, so one phase integral per row serves p and s.  Measurement-noise
    # channel order within a row: (p comp 1, p comp 2, s comp 1, s comp 2).
    omegas = np.concatenate(
        [
            [p.frequency for p in mean_pts],
            [config.omega0 + p.frequency for p in var_pts],
            np.full(n_var, config.omega0),
        ]
    )
    dirs = np.vstack(
        [[p.direction for p in mean_pts]]
        + [[p.direction for p in var_pts]] * 2
    )
    amp = farfield_amplitude(omegas)
    pref_p = amp / lame.c_p**2
    pref_s = amp / lame.c_s**2
    norm_p = lame.c_p**2 / amp
    norm_s = lame.c_s**2 / amp
    d1 = dirs[:, 0][:, None]
    d2 = dirs[:, 1][:, None]

    kernel = np.exp(-1j * (omegas[:, None] * (dirs @ mesh.centers.T)))
    g1 = mesh.sample(source.mean[0])
    g2 = mesh.sample(source.mean[1])
    det1 = (kernel @ g1) * mesh.cell_area
    det2 = (kernel @ g2) * mesh.cell_area
    s1 = mesh.sample(source.std[0])
    s2 = mesh.sample(source.std[1])
    k1 = kernel * s1[None, :]
    k1_re = np.ascontiguousarray(k1.real)
    k1_im = np.ascontiguousarray(k1.imag)
    del k1
    kernel *= s2[None, :]
    k2_re = np.ascontiguousarray(kernel.real)
    k2_im = np.ascontiguousarray(kernel.imag)
    del kernel

    seed = int(config.master_seed)
    delta = float(config.delta)
    total = int(config.realizations)
    hi = slice(n_mean, n_mean + n_var)
    lo = slice(n_mean + n_var, n_rows)
    pair_keys = ("pp", "ps", "sp", "ss")

    def process(start: int):
        stop = min(total, start + CHUNK)
        realizations = range(start, stop)
        nc = len(realizations)
        w1 = np.empty((mesh.n_cells, nc))
        w2 = np.empty((mesh.n_cells, nc))
        for i, r in enumerate(realizations):
            grid = sample_noise(mesh, 2, SeedSpec(seed, r))
            w1[:, i] = grid.increments[0]
            w2[:, i] = grid.increments[1]
        v1 = (k1_re @ w1) + 1j * (k1_im @ w1)
        v1 += det1[:, None]
        v2 = (k2_re @ w2) + 1j * (k2_im @ w2)
        v2 += det2[:, None]
        along = d1 * v1 + d2 * v2
        par1 = d1 * along
        par2 = d2 * along
        up1 = pref_p[:, None] * par1
        up2 = pref_p[:, None] * par2
        us1 = pref_s[:, None] * (v1 - par1)
        us2 = pref_s[:, None] * (v2 - par2)
        if delta > 0.0:
            r1, r2 = _measurement_uniforms(seed, realizations, 4 * n_rows)
            r1 = r1.reshape(n_rows, 4, nc)
            r2 = r2.reshape(n_rows, 4, nc)
            up1 = add_noise(up1, delta, r1[:, 0], r2[:, 0])
            up2 = add_noise(up2, delta, r1[:, 1], r2[:, 1])
            us1 = add_noise(us1, delta, r1[:, 2], r2[:, 2])
            us2 = add_noise(us2, delta, r1[:, 3], r2[:, 3])
        mp_acc = MeanAccumulator((n_mean, 2))
        mp_acc.add_batch(np.stack([up1[:n_mean], up2[:n_mean]], axis=1))
        ms_acc = MeanAccumulator((n_mean, 2))
        ms_acc.add_batch(np.stack([us1[:n_mean], us2[:n_mean]], axis=1))
        u_hi = np.stack(
            [
                norm_p[hi, None] * up1[hi] + norm_s[hi, None] * us1[hi],
                norm_p[hi, None] * up2[hi] + norm_s[hi, None] * us2[hi],
            ],
            axis=1,
        )
        u_lo = np.stack(
            [
                norm_p[lo, None] * up1[lo] + norm_s[lo, None] * us1[lo],
                norm_p[lo, None] * up2[lo] + norm_s[lo, None] * us2[lo],
            ],
            axis=1,
        )
        c_acc = CovarianceAccumulator((n_var, 2))
        c_acc.add_batch(u_hi, u_lo)
        diag_accs = None
        if diagnostics:
            legs_hi = {
                "p": np.stack([up1[hi], up2[hi]], axis=1),
                "s": np.stack([us1[hi], us2[hi]], axis=1),
            }
            legs_lo = {
                "p": np.stack([up1[lo], up2[lo]], axis=1),
                "s": np.stack([us1[lo], us2[lo]], axis=1),
            }
            diag_accs = {}
            for key in pair_keys:
                acc = CovarianceAccumulator((n_var, 2))
                acc.add_batch(legs_hi[key[0]], legs_lo[key[1]])
                diag_accs[key] = acc
        return mp_acc, ms_acc, c_acc, diag_accs

    mean_p_acc = MeanAccumulator((n_mean, 2))
    mean_s_acc = MeanAccumulator((n_mean, 2))
    cov_acc = CovarianceAccumulator((n_var, 2))
    diag_total = {key: CovarianceAccumulator((n_var, 2)) for key in pair_keys} if diagnostics else None
    for mp_acc, ms_acc, c_acc, diag_accs in _run_chunked(
        _chunk_starts(total), process, _resolve_workers(config)
    ):
        mean_p_acc.merge(mp_acc)
        mean_s_acc.merge(ms_acc)
        cov_acc.merge(c_acc)
        if diagnostics:
            for key in pair_keys:
                diag_total[key].merge(diag_accs[key])

    metadata = _common_metadata(config, order)
    metadata.update(
        {
            "xi0": float(config.xi0),
            "omega0": float(config.omega0),
            "lame_lambda": float(config.lame_lambda),
            "lame_mu": float(config.lame_mu),
        }
    )
    return ElasticMeasurementSet(
        mean_points=mean_pts,
        variance_points=var_pts,
        mean_p_values=mean_p_acc.finalize(),
        mean_s_values=mean_s_acc.finalize(),
        covariance_values=cov_acc.finalize(),
        mean_p_se=mean_p_acc.standard_error(),
        mean_s_se=mean_s_acc.standard_error(),
        covariance_se=cov_acc.standard_error(),
        metadata=metadata,
        diagnostics={key: acc.finalize() for key, acc in diag_total.items()}
        if diagnostics
        else None,
    ).validate()


def run_campaign(config: ExperimentConfig, source=None, diagnostics: bool = False):
    """Run a full measurement campaign and return the assembled statistics.

    Parameters
    ----------
    config : ExperimentConfig
        Validated experiment description; fully determines the output.
    source : optional
        A registry TestSource, a ScalarSourceModel / VectorSourceModel, or
        None to resolve ``config.source`` from the registry.
    diagnostics : bool
        Elastic only: additionally estimate the four raw wave-type pair
        covariances (kept in memory, never serialised).
    """
    config.validate()
    source = _resolve_source(config, source)
    if config.model == "acoustic":
        return _run_acoustic(config, source)
    return _run_elastic(config, source, diagnostics)
