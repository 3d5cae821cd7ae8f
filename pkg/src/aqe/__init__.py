"""Maass forms, L-functions and period identities on the modular surface."""

from .errors import AqeError
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["AqeError", "BACKEND", "__version__"]
