"""randsource: random wave-source statistics from multi-frequency far fields.

Forward-simulates far-field patterns of white-noise-driven acoustic and
elastic sources by Monte Carlo, then recovers the source mean and variance
through direct Fourier-coefficient formulas (no iterative solver), and scores
reconstructions with discrete relative L2/H1 norms.
"""

from .acoustic import (
    ScalarSourceModel,
    add_noise,
    deterministic_farfield,
    farfield_amplitude,
    farfield_kernel,
    realize_farfield,
)
from .campaign import (
    AcousticMeasurementSet,
    ElasticMeasurementSet,
    run_campaign,
)
from .coefficients import (
    CoefficientSet,
    GridField,
    synthesize,
    synthesize_grid,
    synthesize_gradient,
    synthesize_vector,
    synthesize_vector_gradient,
)
from .config import ExperimentConfig
from .elastic import (
    LameParams,
    VectorSourceModel,
    deterministic_farfields,
    measurement_frequency,
    polarization_projectors,
    realize_farfields,
)
from .errors import ConfigError, MeshMismatchError, MissingChannelsError
from .estimators import AcousticSourceReconstructor, ElasticSourceReconstructor
from .geometry import (
    AdmissiblePoint,
    DomainSpec,
    FourierIndex,
    acoustic_mean_points,
    acoustic_variance_points,
    basis_eval,
    elastic_mean_points,
    elastic_variance_points,
    fourier_indices,
    truncation_order,
)
from .metrics import ErrorReport, EvalGrid, evaluate_reconstruction, relative_h1, relative_l2
from .noise import NoiseGrid, QuadratureMesh, SeedSpec, sample_noise, stochastic_integral
from .sources import TestSource, get_source, registry
from .stats import CovarianceAccumulator, MeanAccumulator, merge

__version__ = "0.1.0"

__all__ = [
    "AcousticMeasurementSet",
    "AcousticSourceReconstructor",
    "AdmissiblePoint",
    "CoefficientSet",
    "ConfigError",
    "CovarianceAccumulator",
    "DomainSpec",
    "ElasticMeasurementSet",
    "ElasticSourceReconstructor",
    "ErrorReport",
    "EvalGrid",
    "ExperimentConfig",
    "FourierIndex",
    "GridField",
    "LameParams",
    "MeanAccumulator",
    "MeshMismatchError",
    "MissingChannelsError",
    "NoiseGrid",
    "QuadratureMesh",
    "ScalarSourceModel",
    "SeedSpec",
    "TestSource",
    "VectorSourceModel",
    "acoustic_mean_points",
    "acoustic_variance_points",
    "add_noise",
    "basis_eval",
    "deterministic_farfield",
    "deterministic_farfields",
    "elastic_mean_points",
    "elastic_variance_points",
    "evaluate_reconstruction",
    "farfield_amplitude",
    "farfield_kernel",
    "fourier_indices",
    "get_source",
    "measurement_frequency",
    "merge",
    "polarization_projectors",
    "realize_farfield",
    "realize_farfields",
    "registry",
    "relative_h1",
    "relative_l2",
    "run_campaign",
    "sample_noise",
    "stochastic_integral",
    "synthesize",
    "synthesize_grid",
    "synthesize_gradient",
    "synthesize_vector",
    "synthesize_vector_gradient",
    "truncation_order",
]
