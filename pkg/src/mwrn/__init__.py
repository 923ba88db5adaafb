"""Simulator and closed-form analytics for L-user multi-way relay networks
with pairwise physical-layer network coding."""

__version__ = "0.1.0"

from .config import ConfigError, SimConfig  # noqa: E402

__all__ = ["ConfigError", "SimConfig", "__version__"]
