"""Exception types shared across the package."""

from __future__ import annotations


class MeshMismatchError(ValueError):
    """Raised when a kernel and a noise grid live on different quadrature meshes."""


class MissingChannelsError(ValueError):
    """Raised when a measurement set lacks channels required by the inversion.

    The offending Fourier indices are kept on the ``indices`` attribute so
    callers (and the CLI error path) can report exactly what is absent.
    """

    def __init__(self, indices, what="measurement channels"):
        self.indices = sorted(indices)
        short = ", ".join(f"({l1},{l2})" for l1, l2 in self.indices[:8])
        if len(self.indices) > 8:
            short += f", ... ({len(self.indices)} total)"
        super().__init__(f"missing {what} for Fourier indices: {short}")


class ConfigError(ValueError):
    """Raised for invalid experiment configuration values or files."""
