"""Numerical laboratory for spectra of noisy non-normal banded matrices.

Matrix builders (Toeplitz / twisted Toeplitz / bidiagonal), a
self-contained dense complex eigen/SVD/LU core, predicted limit laws and
their log potentials, deterministic-equivalent log determinants,
singular-value rigidity bounds, transfer-matrix Lyapunov spectra, and
pseudospectrum grids.
"""

from . import (
    detequiv,
    limitlaw,
    linalg,
    models,
    rigidity,
    rng,
    spectra,
    transfer,
)

__version__ = "0.1.0"

__all__ = [
    "detequiv",
    "limitlaw",
    "linalg",
    "models",
    "rigidity",
    "rng",
    "spectra",
    "transfer",
    "__version__",
]
