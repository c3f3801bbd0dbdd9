"""Registry of analytic benchmark sources with closed-form gradients.

Every entry supplies the mean profile, the standard-deviation profile, the
variance (the actual recovery target for the stochastic part), and analytic
gradients of mean and variance for the H1 error metric.  Gradients are exact
derivatives of the closed forms; no finite differencing enters the shipped
evaluation path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .acoustic import ScalarSourceModel
from .elastic import VectorSourceModel

__all__ = ["TestSource", "registry", "get_source"]

ACOUSTIC_DEFAULT = "acoustic-default"
ELASTIC_DEFAULT = "elastic-default"


@dataclass(frozen=True)
class TestSource:
    """One benchmark source; callables are vectorised over ``(x1, x2)`` arrays."""

    name: str
    model: str  # 'acoustic' | 'elastic'
    mean: Callable | Tuple[Callable, Callable]
    std: Callable | Tuple[Callable, Callable]
    variance: Callable | Tuple[Callable, Callable]
    mean_gradient: Callable | Tuple[Callable, Callable]
    variance_gradient: Callable | Tuple[Callable, Callable]

    def to_model(self):
        """Forward-model view (mean/std only) of this source."""
        if self.model == "acoustic":
            return ScalarSourceModel(mean=self.mean, std=self.std)
        return VectorSourceModel(mean=self.mean, std=self.std)


def _bump(x1, x2):
    return np.exp(-200.0 * ((x1 - 0.01) ** 2 + (x2 - 0.12) ** 2))


def _bump_gradient(x1, x2):
    b = _bump(x1, x2)
    return -400.0 * (x1 - 0.01) * b, -400.0 * (x2 - 0.12) * b


def _scalar_mean(x1, x2):
    return _bump(x1, x2) - 100.0 * (x2**2 - x1**2) * np.exp(-90.0 * (x1**2 + x2**2))


def _scalar_mean_gradient(x1, x2):
    db1, db2 = _bump_gradient(x1, x2)
    e = np.exp(-90.0 * (x1**2 + x2**2))
    quad = x2**2 - x1**2
    d1 = db1 + 100.0 * e * x1 * (2.0 + 180.0 * quad)
    d2 = db2 - 100.0 * e * x2 * (2.0 - 180.0 * quad)
    return d1, d2


def _scalar_std(x1, x2):
    return 0.5 * _scalar_mean(x1, x2)


def _scalar_variance(x1, x2):
    return 0.25 * _scalar_mean(x1, x2) ** 2


def _scalar_variance_gradient(x1, x2):
    g = _scalar_mean(x1, x2)
    d1, d2 = _scalar_mean_gradient(x1, x2)
    return 0.5 * g * d1, 0.5 * g * d2


def _vector_mean2(x1, x2):
    return 1500.0 * x1**2 * x2 * np.exp(-50.0 * (x1**2 + x2**2))


def _vector_mean2_gradient(x1, x2):
    e = np.exp(-50.0 * (x1**2 + x2**2))
    d1 = 1500.0 * x1 * x2 * e * (2.0 - 100.0 * x1**2)
    d2 = 1500.0 * x1**2 * e * (1.0 - 100.0 * x2**2)
    return d1, d2


def _vector_std2(x1, x2):
    return 0.5 * _bump(x1, x2)


def _vector_variance2(x1, x2):
    return 0.25 * np.exp(-400.0 * ((x1 - 0.01) ** 2 + (x2 - 0.12) ** 2))


def _vector_variance2_gradient(x1, x2):
    v = _vector_variance2(x1, x2)
    return -800.0 * (x1 - 0.01) * v, -800.0 * (x2 - 0.12) * v


def registry() -> list[TestSource]:
    """All benchmark sources, acoustic first."""
    acoustic = TestSource(
        name=ACOUSTIC_DEFAULT,
        model="acoustic",
        mean=_scalar_mean,
        std=_scalar_std,
        variance=_scalar_variance,
        mean_gradient=_scalar_mean_gradient,
        variance_gradient=_scalar_variance_gradient,
    )
    elastic = TestSource(
        name=ELASTIC_DEFAULT,
        model="elastic",
        mean=(_scalar_mean, _vector_mean2),
        std=(_scalar_std, _vector_std2),
        variance=(_scalar_variance, _vector_variance2),
        mean_gradient=(_scalar_mean_gradient, _vector_mean2_gradient),
        variance_gradient=(_scalar_variance_gradient, _vector_variance2_gradient),
    )
    return [acoustic, elastic]


def get_source(name: str, model: Optional[str] = None) -> TestSource:
    """Look up a registry source by name; ``'default'`` resolves per model."""
    if name == "default":
        if model not in ("acoustic", "elastic"):
            raise KeyError("resolving 'default' requires the model name")
        name = ACOUSTIC_DEFAULT if model == "acoustic" else ELASTIC_DEFAULT
    for source in registry():
        if source.name == name:
            if model is not None and source.model != model:
                raise KeyError(f"source {name!r} has model {source.model!r}, not {model!r}")
            return source
    raise KeyError(f"unknown test source {name!r}")
