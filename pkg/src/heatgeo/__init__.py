"""Heat-kernel and sub-Riemannian distance numerics on truncated SU(2) products."""

from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
