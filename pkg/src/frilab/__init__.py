"""Monte Carlo laboratory for finitary random interlacements on Z^d."""

__version__ = "0.1.0"

from ._backend import BACKEND, COMPILED  # noqa: E402

__all__ = ["__version__", "BACKEND", "COMPILED"]
