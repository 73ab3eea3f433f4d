"""Numerical toolkit for Gaussian saturation phenomena.

Computes and verifies the constants and identities tying together generalized
Legendre duality, inverse Brascamp-Lieb functionals, Blaschke-Santalo volume
products, and Bures-Wasserstein barycenters of centered Gaussians.
"""

__version__ = "0.1.0"

from ._kernels import IMPL as kernel_backend  # noqa: F401
