"""Builders for synthetic noise-free measurement sets.

These bypass the Monte Carlo campaign: expectations come from deterministic
quadrature of the forward model, covariances from the analytic two-frequency
covariance formula evaluated by dense quadrature.  Inverting them isolates
the coefficient algebra from sampling error.
"""

import numpy as np

from randsource.acoustic import deterministic_farfield, farfield_amplitude
from randsource.campaign import AcousticMeasurementSet, ElasticMeasurementSet
from randsource.elastic import LameParams, deterministic_farfields
from randsource.geometry import (
    acoustic_mean_points,
    acoustic_variance_points,
    elastic_mean_points,
    elastic_variance_points,
)
from randsource.noise import QuadratureMesh

from oracles import oscillatory_integral


def acoustic_measurements(
    source, order, mesh_cells=512, side=1.0, k0=1.0, lambda0=1e-3, quad_m=512
):
    """Noise-free acoustic measurement set for a registry source."""
    mesh = QuadratureMesh.build(mesh_cells, side)
    model = source.to_model()
    mean_pts = acoustic_mean_points(order, lambda0, side)
    var_pts = acoustic_variance_points(order, side)
    mean_values = np.array(
        [
            deterministic_farfield(model, p.frequency, p.direction, mesh)
            for p in mean_pts
        ]
    )
    sigma2 = lambda x1, x2: source.std(x1, x2) ** 2
    cov_values = np.array(
        [
            farfield_amplitude(k0 + p.frequency)
            * np.conj(farfield_amplitude(k0))
            * oscillatory_integral(sigma2, p.frequency * p.direction, side=side, m=quad_m)
            for p in var_pts
        ]
    )
    metadata = {
        "model": "acoustic",
        "source": source.name,
        "realizations": 0,
        "delta": 0.0,
        "master_seed": 0,
        "mesh_cells": mesh_cells,
        "side": side,
        "truncation": order,
        "lambda0": lambda0,
        "k0": k0,
        "degenerate": False,
    }
    return AcousticMeasurementSet(
        mean_points=mean_pts,
        variance_points=var_pts,
        mean_values=mean_values,
        covariance_values=cov_values,
        mean_se=np.zeros(len(mean_pts)),
        covariance_se=np.zeros(len(var_pts)),
        metadata=metadata,
    ).validate()


def elastic_measurements(
    source, order, mesh_cells=512, side=1.0, omega0=1e-3, xi0=1e-3, lame=None, quad_m=512
):
    """Noise-free elastic measurement set: quadrature means, analytic covariances."""
    lame = lame or LameParams(1.0, 1.0)
    mesh = QuadratureMesh.build(mesh_cells, side)
    model = source.to_model()
    mean_pts = elastic_mean_points(order, xi0, side)
    var_pts = elastic_variance_points(order, side)
    e_p = np.empty((len(mean_pts), 2), dtype=complex)
    e_s = np.empty_like(e_p)
    for i, p in enumerate(mean_pts):
        e_p[i] = deterministic_farfields(
            model, lame.c_p * p.frequency, p.direction, lame, mesh
        )[0]
        e_s[i] = deterministic_farfields(
            model, lame.c_s * p.frequency, p.direction, lame, mesh
        )[1]
    # Componentwise covariance of the combined normalised fields: the
    # oscillatory integral of each variance component at the offset.
    cov = np.empty((len(var_pts), 2), dtype=complex)
    for i, p in enumerate(var_pts):
        for comp in (0, 1):
            sigma2 = lambda x1, x2, c=comp: source.std[c](x1, x2) ** 2
            cov[i, comp] = oscillatory_integral(
                sigma2, p.frequency * p.direction, side=side, m=quad_m
            )
    metadata = {
        "model": "elastic",
        "source": source.name,
        "realizations": 0,
        "delta": 0.0,
        "master_seed": 0,
        "mesh_cells": mesh_cells,
        "side": side,
        "truncation": order,
        "xi0": xi0,
        "omega0": omega0,
        "lame_lambda": lame.lam,
        "lame_mu": lame.mu,
        "degenerate": False,
    }
    return ElasticMeasurementSet(
        mean_points=mean_pts,
        variance_points=var_pts,
        mean_p_values=e_p,
        mean_s_values=e_s,
        covariance_values=cov,
        mean_p_se=np.zeros((len(mean_pts), 2)),
        mean_s_se=np.zeros((len(mean_pts), 2)),
        covariance_se=np.zeros((len(var_pts), 2)),
        metadata=metadata,
    ).validate()
