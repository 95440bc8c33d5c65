"""Sparse superposition codes with least squares decoding: codec, error bounds
for Gaussian and Bernoulli dictionaries, and numeric checks of the lattice-sum
inequalities behind them."""

__version__ = "0.1.0"

from .errors import DomainError, FeasibilityError, ResourceError
from .params import ChannelSpec, CodeSpec, capacity, c_alpha, derive_code_spec

__all__ = [
    "ChannelSpec",
    "CodeSpec",
    "DomainError",
    "FeasibilityError",
    "ResourceError",
    "__version__",
    "c_alpha",
    "capacity",
    "derive_code_spec",
]
