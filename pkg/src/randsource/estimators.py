"""Scikit-learn style reconstructors: fit on far-field statistics, predict fields.

``fit`` consumes a measurement set produced by a campaign (or read back from
disk) and stores the recovered coefficient sets; ``predict_mean`` and
``predict_variance`` evaluate the truncated Fourier reconstructions at
arbitrary (n, 2) point arrays.  Parameter handling follows the scikit-learn
estimator contract (``get_params`` / ``set_params`` / ``clone``), so the
reconstructors compose with standard tooling.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator

from . import invert_acoustic, invert_elastic
from .campaign import AcousticMeasurementSet, ElasticMeasurementSet
from .coefficients import (
    synthesize,
    synthesize_gradient,
    synthesize_vector,
    synthesize_vector_gradient,
)

__all__ = ["AcousticSourceReconstructor", "ElasticSourceReconstructor"]


class AcousticSourceReconstructor(BaseEstimator):
    """Recover the mean and variance of a random scalar source from statistics.

    Parameters
    ----------
    truncation : int or None
        Number of recovered modes per axis direction.  None keeps every mode
        present in the fitted measurement set.

    Attributes
    ----------
    mean_coefficients_, variance_coefficients_ : CoefficientSet
    truncation_ : int
        The order actually used.
    """

    def __init__(self, truncation: Optional[int] = None):
        self.truncation = truncation

    def fit(self, measurements: AcousticMeasurementSet, y=None):
        if not isinstance(measurements, AcousticMeasurementSet):
            raise TypeError("expected an AcousticMeasurementSet")
        measurements.validate()
        self.mean_coefficients_ = invert_acoustic.recover_mean(measurements, self.truncation)
        self.variance_coefficients_ = invert_acoustic.recover_variance(
            measurements, self.truncation
        )
        self.truncation_ = self.mean_coefficients_.order
        self.side_ = measurements.side
        return self

    def _check_fitted(self):
        if not hasattr(self, "mean_coefficients_"):
            raise RuntimeError("reconstructor is not fitted; call fit(measurements) first")

    def predict_mean(self, X) -> np.ndarray:
        """Reconstructed mean at points ``X`` of shape (n, 2)."""
        self._check_fitted()
        return synthesize(self.mean_coefficients_, X)

    def predict_variance(self, X) -> np.ndarray:
        """Reconstructed variance at points ``X`` of shape (n, 2)."""
        self._check_fitted()
        return synthesize(self.variance_coefficients_, X)

    def predict_mean_gradient(self, X) -> np.ndarray:
        self._check_fitted()
        return synthesize_gradient(self.mean_coefficients_, X)

    def predict_variance_gradient(self, X) -> np.ndarray:
        self._check_fitted()
        return synthesize_gradient(self.variance_coefficients_, X)


class ElasticSourceReconstructor(BaseEstimator):
    """Vector counterpart of :class:`AcousticSourceReconstructor`.

    Predictions return (n, 2) arrays: one value per source component.
    """

    def __init__(self, truncation: Optional[int] = None):
        self.truncation = truncation

    def fit(self, measurements: ElasticMeasurementSet, y=None):
        if not isinstance(measurements, ElasticMeasurementSet):
            raise TypeError("expected an ElasticMeasurementSet")
        measurements.validate()
        self.mean_coefficients_ = invert_elastic.recover_mean(measurements, self.truncation)
        self.variance_coefficients_ = invert_elastic.recover_variance(
            measurements, self.truncation
        )
        self.truncation_ = self.mean_coefficients_.order
        self.side_ = measurements.side
        return self

    def _check_fitted(self):
        if not hasattr(self, "mean_coefficients_"):
            raise RuntimeError("reconstructor is not fitted; call fit(measurements) first")

    def predict_mean(self, X) -> np.ndarray:
        self._check_fitted()
        return synthesize_vector(self.mean_coefficients_, X)

    def predict_variance(self, X) -> np.ndarray:
        self._check_fitted()
        return synthesize_vector(self.variance_coefficients_, X)

    def predict_mean_gradient(self, X) -> np.ndarray:
        self._check_fitted()
        return synthesize_vector_gradient(self.mean_coefficients_, X)

    def predict_variance_gradient(self, X) -> np.ndarray:
        self._check_fitted()
        return synthesize_vector_gradient(self.variance_coefficients_, X)
