"""Acceptance suite: each test prints one PASS line for its criterion.

Run with ``pytest tests/test_acceptance.py -v -s``.  The Monte Carlo criteria
use pinned seeds; the oracle criteria are deterministic.  The two desk-scale
table reproductions dominate the runtime (a few minutes each).
"""

import hashlib
import time

import numpy as np
import pytest

from randsource import io
from randsource.acoustic import ScalarSourceModel, farfield_amplitude
from randsource.campaign import run_campaign
from randsource.config import ExperimentConfig
from randsource.elastic import LameParams, realize_farfields
from randsource.estimators import AcousticSourceReconstructor, ElasticSourceReconstructor
from randsource.geometry import fourier_indices
from randsource.invert_acoustic import recover_mean, recover_variance
from randsource.invert_elastic import (
    recover_mean as recover_mean_elastic,
    recover_variance as recover_variance_elastic,
)
from randsource.metrics import evaluate_reconstruction, relative_h1, relative_l2
from randsource.noise import QuadratureMesh, SeedSpec, sample_noise
from randsource.sources import get_source

from builders import acoustic_measurements, elastic_measurements
from oracles import fourier_coefficient, oscillatory_integral

ORACLE_ORDER = 10
ORACLE_MESH = 512


def report(number, title, detail=""):
    suffix = f" ({detail})" if detail else ""
    print(f"\n[criterion {number}] PASS - {title}{suffix}")


@pytest.fixture(scope="module")
def acoustic_source():
    return get_source("acoustic-default")


@pytest.fixture(scope="module")
def elastic_source():
    return get_source("elastic-default")


@pytest.fixture(scope="module")
def acoustic_oracle(acoustic_source):
    start = time.perf_counter()
    measurements = acoustic_measurements(
        acoustic_source, order=ORACLE_ORDER, mesh_cells=ORACLE_MESH, quad_m=ORACLE_MESH
    )
    return measurements, time.perf_counter() - start


@pytest.fixture(scope="module")
def elastic_oracle(elastic_source):
    return elastic_measurements(
        elastic_source, order=ORACLE_ORDER, mesh_cells=ORACLE_MESH,
        lame=LameParams(1.0, 1.0), quad_m=ORACLE_MESH,
    )


def test_criterion_1_acoustic_mean_oracle_round_trip(acoustic_source, acoustic_oracle):
    measurements, build_seconds = acoustic_oracle
    start = time.perf_counter()
    coeffs = recover_mean(measurements)
    invert_seconds = time.perf_counter() - start
    worst_nonzero = 0.0
    for index in fourier_indices(ORACLE_ORDER):
        direct = fourier_coefficient(
            acoustic_source.mean, index.l1, index.l2, m=ORACLE_MESH
        )
        err = abs(coeffs.values[index] - direct)
        if index.is_zero:
            zero_err = err
        else:
            worst_nonzero = max(worst_nonzero, err)
    assert worst_nonzero <= 1e-8
    assert zero_err <= 1e-6
    elapsed = build_seconds + invert_seconds
    assert elapsed < 60.0
    report(
        1,
        "acoustic mean oracle round trip",
        f"max nonzero err {worst_nonzero:.2e}, zero-mode err {zero_err:.2e}, {elapsed:.1f}s",
    )


def test_criterion_2_acoustic_variance_oracle_round_trip(acoustic_source, acoustic_oracle):
    measurements, _ = acoustic_oracle
    coeffs = recover_variance(measurements)
    sigma2 = lambda x1, x2: acoustic_source.std(x1, x2) ** 2
    worst = 0.0
    for index in fourier_indices(ORACLE_ORDER):
        direct = fourier_coefficient(sigma2, index.l1, index.l2, m=ORACLE_MESH)
        worst = max(worst, abs(coeffs.values[index] - direct))
    assert worst <= 1e-8
    report(2, "acoustic variance oracle round trip", f"max err {worst:.2e}")


def test_criterion_3_elastic_oracle_round_trip(elastic_source, elastic_oracle):
    mean_coeffs = recover_mean_elastic(elastic_oracle)
    var_coeffs = recover_variance_elastic(elastic_oracle)
    worst_mean = 0.0
    worst_var = 0.0
    for index in fourier_indices(ORACLE_ORDER):
        if index.is_zero:
            continue
        for comp in (0, 1):
            direct_mean = fourier_coefficient(
                elastic_source.mean[comp], index.l1, index.l2, m=ORACLE_MESH
            )
            sigma2 = lambda x1, x2, c=comp: elastic_source.std[c](x1, x2) ** 2
            direct_var = fourier_coefficient(sigma2, index.l1, index.l2, m=ORACLE_MESH)
            worst_mean = max(worst_mean, abs(mean_coeffs.values[index][comp] - direct_mean))
            worst_var = max(worst_var, abs(var_coeffs.values[index][comp] - direct_var))
    assert worst_mean <= 1e-8
    assert worst_var <= 1e-8
    report(
        3,
        "elastic mean/variance oracle round trip",
        f"max mean err {worst_mean:.2e}, max variance err {worst_var:.2e}",
    )


MC_SEED = 414243


def _mc_config(realizations):
    return ExperimentConfig(
        model="acoustic", delta=0.0, truncation=10, realizations=realizations,
        mesh_cells=64, master_seed=MC_SEED, k0=1.0,
    )


def _pure_noise_model(acoustic_source):
    return ScalarSourceModel(mean=lambda x1, x2: 0.0 * x1, std=acoustic_source.std)


@pytest.fixture(scope="module")
def analytic_covariances(acoustic_source):
    sigma2 = lambda x1, x2: acoustic_source.std(x1, x2) ** 2
    from randsource.geometry import acoustic_variance_points

    config = _mc_config(1)
    points = acoustic_variance_points(config.resolved_truncation())
    values = [
        farfield_amplitude(config.k0 + p.frequency)
        * np.conj(farfield_amplitude(config.k0))
        * oscillatory_integral(sigma2, p.frequency * p.direction, m=512)
        for p in points
    ]
    return np.array(values)


def test_criterion_4_channels_within_standard_errors(acoustic_source, analytic_covariances):
    ms = run_campaign(_mc_config(10_000), _pure_noise_model(acoustic_source))
    within = np.abs(ms.covariance_values - analytic_covariances) <= 5 * ms.covariance_se
    fraction = within.mean()
    assert fraction >= 0.95
    report(
        4,
        "Monte Carlo covariance consistency",
        f"{within.sum()}/{within.size} channels within 5 SE",
    )


def test_criterion_4_convergence_rate(acoustic_source, analytic_covariances):
    sizes = [100, 1000, 10_000]
    errors = []
    for realizations in sizes:
        ms = run_campaign(_mc_config(realizations), _pure_noise_model(acoustic_source))
        errors.append(
            np.sqrt(np.mean(np.abs(ms.covariance_values - analytic_covariances) ** 2))
        )
    slope = np.polyfit(np.log10(sizes), np.log10(errors), 1)[0]
    assert -0.65 <= slope <= -0.35
    report(4, "Monte Carlo convergence rate", f"log-log slope {slope:+.3f}")


@pytest.fixture(scope="module")
def acoustic_table_runs(acoustic_source):
    # N = 10 is pinned for both noise levels (it is also what the rule gives
    # at delta = 5%): at N = 8 the variance field has a 15% truncation floor
    # on this metric, which no amount of sampling can beat.
    start = time.perf_counter()
    results = {}
    for delta in (0.05, 0.10):
        config = ExperimentConfig(
            model="acoustic", delta=delta, realizations=100_000, mesh_cells=64,
            master_seed=515253, k0=1.0, truncation=10,
        )
        if delta == 0.05:
            assert config.resolved_truncation() == ExperimentConfig(delta=0.05).resolved_truncation()
        ms = run_campaign(config, acoustic_source)
        estimator = AcousticSourceReconstructor().fit(ms)
        results[delta] = {
            "mean": evaluate_reconstruction(estimator.mean_coefficients_, acoustic_source),
            "variance": evaluate_reconstruction(
                estimator.variance_coefficients_, acoustic_source
            ),
        }
    return results, time.perf_counter() - start


def test_criterion_5_noise_level_five_percent(acoustic_table_runs):
    results, _ = acoustic_table_runs
    mean_l2 = results[0.05]["mean"].rel_l2
    var_l2 = results[0.05]["variance"].rel_l2
    assert mean_l2 <= 0.08
    assert var_l2 <= 0.08
    report(
        5,
        "acoustic desk-scale table, delta = 5%",
        f"rel_l2 mean {mean_l2:.4f}, variance {var_l2:.4f}",
    )


def test_criterion_5_noise_level_ten_percent(acoustic_table_runs):
    results, elapsed = acoustic_table_runs
    mean_l2 = results[0.10]["mean"].rel_l2
    var_l2 = results[0.10]["variance"].rel_l2
    assert mean_l2 <= 0.12
    assert var_l2 <= 0.12
    assert elapsed < 15 * 60
    report(
        5,
        "acoustic desk-scale table, delta = 10%",
        f"rel_l2 mean {mean_l2:.4f}, variance {var_l2:.4f}, both runs {elapsed:.0f}s",
    )


def test_criterion_6_elastic_table(elastic_source):
    config = ExperimentConfig(
        model="elastic", delta=0.05, realizations=100_000, mesh_cells=64,
        master_seed=616263,
    )
    ms = run_campaign(config, elastic_source)
    estimator = ElasticSourceReconstructor().fit(ms)
    mean_l2 = evaluate_reconstruction(estimator.mean_coefficients_, elastic_source).rel_l2
    var_l2 = evaluate_reconstruction(estimator.variance_coefficients_, elastic_source).rel_l2
    assert mean_l2 <= 0.06
    assert var_l2 <= 0.06
    report(
        6,
        "elastic desk-scale table, delta = 5%",
        f"rel_l2 mean {mean_l2:.4f}, variance {var_l2:.4f}",
    )


def test_criterion_7_polarization(elastic_source):
    mesh = QuadratureMesh.build(16)
    lame = LameParams(1.0, 1.0)
    model = elastic_source.to_model()
    rng = np.random.default_rng(717273)
    worst = 0.0
    for r in range(1000):
        angle = rng.uniform(0.0, 2 * np.pi)
        direction = np.array([np.cos(angle), np.sin(angle)])
        omega = rng.uniform(0.5, 2 * np.pi * 10)
        noise = sample_noise(mesh, 2, SeedSpec(707070, r))
        u_p, u_s = realize_farfields(model, noise, omega, direction, lame)
        scale = max(np.linalg.norm(u_p), np.linalg.norm(u_s))
        shear_residual = abs(direction @ u_s)
        perp = np.eye(2) - np.outer(direction, direction)
        comp_residual = np.linalg.norm(perp @ u_p)
        worst = max(worst, shear_residual / scale, comp_residual / scale)
    assert worst <= 1e-12
    report(7, "polarization invariants over 1000 realizations", f"max residual {worst:.2e}")


def test_criterion_8_worker_determinism(acoustic_source, tmp_path):
    digests = []
    for workers in (1, 4, 8):
        config = ExperimentConfig(
            model="acoustic", delta=0.05, truncation=2, realizations=300, mesh_cells=16,
            master_seed=818283, workers=workers,
        )
        ms = run_campaign(config, acoustic_source)
        path = io.write_measurements(ms, tmp_path / f"workers_{workers}.csv")
        digests.append(hashlib.sha256(path.read_bytes()).hexdigest())
    assert len(set(digests)) == 1
    report(8, "byte-identical measurement files for workers {1, 4, 8}", digests[0][:12])


def test_criterion_9_metric_examples():
    rng = np.random.default_rng(919293)
    exact = rng.normal(size=(101, 101))
    grad = rng.normal(size=(101, 101, 2))
    eps = 1e-3
    checks = [
        relative_l2(exact, exact) - 0.0,
        relative_l2(np.zeros_like(exact), exact) - 1.0,
        relative_l2((1 + eps) * exact, exact) - eps,
        relative_h1(exact, grad, exact, grad) - 0.0,
        relative_h1(np.zeros_like(exact), np.zeros_like(grad), exact, grad) - 1.0,
        relative_h1((1 + eps) * exact, (1 + eps) * grad, exact, grad) - eps,
    ]
    worst = max(abs(c) for c in checks)
    assert worst <= 1e-12
    report(9, "metric homogeneity examples", f"max deviation {worst:.2e}")
