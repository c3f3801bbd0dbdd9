"""Experiment configuration: defaults, TOML loading, and the physics hash.

A config fully determines every output byte of a campaign together with the
master seed it contains.  The ``physics_hash`` deliberately excludes fields
that cannot change results (worker count, output locations) so replays on a
different machine layout hash identically.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigError
from .geometry import truncation_order

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised only on older interpreters
    import tomli as tomllib

__all__ = ["ExperimentConfig", "DEFAULT_SEED_ENV"]

DEFAULT_SEED_ENV = "RANDSOURCE_SEED"

# Fields that affect the numbers in the outputs; everything else is execution
# plumbing and stays out of the hash and the metadata sidecars.
_PHYSICS_FIELDS = (
    "model",
    "source",
    "side",
    "delta",
    "realizations",
    "mesh_cells",
    "truncation",
    "lambda0",
    "xi0",
    "k0",
    "omega0",
    "lame_lambda",
    "lame_mu",
    "master_seed",
)


@dataclass
class ExperimentConfig:
    """Everything a forward campaign and the downstream inversion need.

    ``k0`` is the acoustic variance baseline wavenumber, ``omega0`` the
    elastic baseline angular frequency; ``lambda0`` / ``xi0`` set the detuned
    zero-mode measurement of the respective mean channels.
    """

    model: str = "acoustic"
    source: str = "default"
    side: float = 1.0
    delta: float = 0.05
    realizations: int = 100_000
    mesh_cells: int = 64
    truncation: Optional[int] = None
    lambda0: float = 1e-3
    xi0: float = 1e-3
    k0: float = 1.0
    omega0: float = 1e-3
    lame_lambda: float = 1.0
    lame_mu: float = 1.0
    master_seed: int = 1
    workers: Optional[int] = None
    output_dir: str = "out"

    def validate(self) -> "ExperimentConfig":
        if self.model not in ("acoustic", "elastic"):
            raise ConfigError(f"model must be 'acoustic' or 'elastic', got {self.model!r}")
        if not self.side > 0:
            raise ConfigError("side must be positive")
        if not 0.0 <= self.delta < 1.0:
            raise ConfigError("delta must lie in [0, 1)")
        if self.realizations < 1:
            raise ConfigError("realizations must be at least 1")
        if self.mesh_cells < 2:
            raise ConfigError("mesh_cells must be at least 2")
        if self.truncation is not None and self.truncation < 1:
            raise ConfigError("truncation must be at least 1")
        for name in ("lambda0", "xi0"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ConfigError(f"{name} must lie in (0, 1)")
        if not self.k0 > 0:
            raise ConfigError("k0 must be positive")
        if not self.omega0 > 0:
            raise ConfigError("omega0 must be positive")
        if not self.lame_mu > 0 or not self.lame_lambda + self.lame_mu > 0:
            raise ConfigError("Lame constants require mu > 0 and lambda + mu > 0")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be at least 1")
        return self

    def resolved_truncation(self) -> int:
        """Explicit truncation if set, otherwise the noise-level rule."""
        if self.truncation is not None:
            return int(self.truncation)
        if self.delta == 0.0:
            raise ConfigError("delta = 0 requires an explicit truncation order")
        return truncation_order(self.delta)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            config = cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        return config.validate()

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        """Read a TOML config file; keys mirror the dataclass fields."""
        try:
            with open(path, "rb") as handle:
                data = tomllib.load(handle)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid config file {path}: {exc}") from exc
        return cls.from_dict(data)

    def physics_hash(self) -> str:
        """Short digest of the result-determining fields."""
        payload = {name: getattr(self, name) for name in _PHYSICS_FIELDS}
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]
