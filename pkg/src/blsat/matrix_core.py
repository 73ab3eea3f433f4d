"""Dense symmetric linear algebra used by every other module.

Matrices at desk scale (dim <= ~256) are kept as plain float64 arrays wrapped
in :class:`SymmetricMatrix`, which symmetrizes exactly on construction.  All
spectral work goes through LAPACK's ``eigh``, which is deterministic for a
fixed input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NotPositiveDefinite, NotPositiveSemidefinite

__all__ = [
    "SymmetricMatrix",
    "SpectralDecomposition",
    "sym_eigen",
    "sqrt_spd",
    "log_det_spd",
    "signature",
    "as_symmetric_array",
]

#: eigenvalues above -PSD_TOL * (1 + ||m||_F) count as nonnegative
PSD_TOL = 1e-10


def as_symmetric_array(m) -> np.ndarray:
    """Coerce a SymmetricMatrix / array-like to an exactly symmetric ndarray."""
    if isinstance(m, SymmetricMatrix):
        return m.array
    a = np.asarray(m, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInput("matrix entries must be finite")
    return 0.5 * (a + a.T)


class SymmetricMatrix:
    """A dense real symmetric matrix; entries are symmetrized on construction."""

    __slots__ = ("array",)

    def __init__(self, entries):
        a = as_symmetric_array(entries)
        if a.shape[0] < 1:
            raise InvalidInput("dimension must be at least 1")
        a.setflags(write=False)
        object.__setattr__(self, "array", a)

    def __setattr__(self, name, value):
        raise AttributeError("SymmetricMatrix is immutable")

    @property
    def dim(self) -> int:
        return self.array.shape[0]

    @classmethod
    def identity(cls, n: int) -> "SymmetricMatrix":
        return cls(np.eye(n))

    @classmethod
    def diagonal(cls, values) -> "SymmetricMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.array))

    def __repr__(self):
        return f"SymmetricMatrix({self.array.tolist()!r})"

    def __eq__(self, other):
        return isinstance(other, SymmetricMatrix) and np.array_equal(
            self.array, other.array
        )

    def __hash__(self):
        return hash(self.array.tobytes())


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues sorted ascending with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def sym_eigen(m) -> SpectralDecomposition:
    """Spectral decomposition of a symmetric matrix (ascending eigenvalues)."""
    a = as_symmetric_array(m)
    w, v = np.linalg.eigh(a)
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v)


def sqrt_spd(m, tol: float = PSD_TOL) -> SymmetricMatrix:
    """Symmetric PSD square root; small negative eigenvalues are clamped to 0.

    Raises :class:`NotPositiveSemidefinite` when an eigenvalue falls below
    ``-tol * (1 + ||m||_F)``.  The clamping matters because several extremal
    configurations sit exactly on the boundary of the PSD cone.
    """
    a = as_symmetric_array(m)
    w, v = np.linalg.eigh(a)
    bound = tol * (1.0 + np.linalg.norm(a))
    if w[0] < -bound:
        raise NotPositiveSemidefinite(
            f"eigenvalue {w[0]:.3e} below tolerance {-bound:.3e}"
        )
    w = np.clip(w, 0.0, None)
    return SymmetricMatrix((v * np.sqrt(w)) @ v.T)


def log_det_spd(m) -> float:
    """log det of a symmetric positive definite matrix, as sum of log eigenvalues."""
    a = as_symmetric_array(m)
    w = np.linalg.eigvalsh(a)
    if w[0] <= 0.0:
        raise NotPositiveDefinite(f"eigenvalue {w[0]:.3e} is not positive")
    return float(np.log(w).sum())


def signature(m, tol: float = PSD_TOL) -> tuple[int, int, int]:
    """Inertia (n_neg, n_zero, n_pos) with zeros counted within ``tol * ||m||_F``."""
    a = as_symmetric_array(m)
    w = np.linalg.eigvalsh(a)
    bound = tol * np.linalg.norm(a)
    n_neg = int(np.sum(w < -bound))
    n_pos = int(np.sum(w > bound))
    return (n_neg, a.shape[0] - n_neg - n_pos, n_pos)


# array-level helpers shared by the Gaussian modules -------------------------


def sqrtm_psd(a: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """PSD square root acting directly on ndarrays."""
    return sqrt_spd(a, tol=tol).array


def inv_sqrtm_pd(a: np.ndarray) -> np.ndarray:
    """Inverse square root of a positive definite ndarray."""
    w, v = np.linalg.eigh(0.5 * (a + a.T))
    if w[0] <= 0.0:
        raise NotPositiveDefinite(f"eigenvalue {w[0]:.3e} is not positive")
    return (v / np.sqrt(w)) @ v.T


def fun_sym(s: np.ndarray, f) -> np.ndarray:
    """Apply a scalar function to a symmetric ndarray through its spectrum."""
    w, v = np.linalg.eigh(0.5 * (s + s.T))
    return (v * f(w)) @ v.T


def dfun_sym_adjoint(s: np.ndarray, g: np.ndarray, f, fprime) -> np.ndarray:
    """Adjoint of the Frechet derivative of a spectral function at ``s``.

    Maps an ambient gradient ``g`` (w.r.t. ``f(s)``) back to a gradient
    w.r.t. ``s`` via the divided-difference kernel of ``f``.
    """
    w, v = np.linalg.eigh(0.5 * (s + s.T))
    fw = f(w)
    num = fw[:, None] - fw[None, :]
    den = w[:, None] - w[None, :]
    small = np.abs(den) < 1e-12 * (1.0 + np.abs(w).max())
    mid = 0.5 * (w[:, None] + w[None, :])
    phi = np.where(small, fprime(mid), num / np.where(small, 1.0, den))
    gh = v.T @ (0.5 * (g + g.T)) @ v
    return v @ (phi * gh) @ v.T


def expm_sym(s: np.ndarray) -> np.ndarray:
    """Matrix exponential of a symmetric ndarray via eigendecomposition."""
    return fun_sym(s, np.exp)


def dexpm_sym_adjoint(s: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Adjoint of the Frechet derivative of ``expm`` at symmetric ``s``."""
    return dfun_sym_adjoint(s, g, np.exp, np.exp)
