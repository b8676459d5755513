"""Dense linear-algebra kernel: SVD, numerical rank, nullspaces, spectra.

Matrices and vectors are plain float64 numpy arrays. ``as_matrix`` and
``as_vector`` are the validation boundary; every public routine here passes
its inputs through one of them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrum, InvalidInput

RANK_TOL = 1e-10


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Return ``M`` as a finite 2-D float64 array or raise ``InvalidInput``."""
    arr = np.asarray(M, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidInput(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} contains NaN or Inf")
    return arr


def as_vector(v, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidInput(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} contains NaN or Inf")
    return arr


@dataclass(frozen=True)
class SingularSpectrum:
    """Descending singular values plus the threshold used to call one zero."""

    values: np.ndarray
    zero_tol: float

    @property
    def num_nonzero(self) -> int:
        return int(np.count_nonzero(self.values > self.zero_tol))

    @property
    def nonzero(self) -> np.ndarray:
        return self.values[self.values > self.zero_tol]

    @property
    def sigma_max(self) -> float:
        return float(self.values[0]) if self.values.size else 0.0

    @property
    def sigma_min_nonzero(self) -> float:
        nz = self.nonzero
        return float(nz[-1]) if nz.size else float("nan")

    @classmethod
    def from_values(cls, values, zero_tol: float) -> "SingularSpectrum":
        vals = np.sort(np.asarray(values, dtype=np.float64))[::-1]
        return cls(values=vals, zero_tol=float(zero_tol))


def relative_zero_tol(shape, sigma_max: float, tol: float = RANK_TOL) -> float:
    """Numerical-rank threshold ``tol * max(m, n) * sigma_max``."""
    return tol * max(shape) * sigma_max if len(shape) and max(shape) else 0.0


def singular_values(M) -> np.ndarray:
    M = as_matrix(M)
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def spectrum(M, tol: float = RANK_TOL, zero_tol: float | None = None) -> SingularSpectrum:
    """Singular spectrum of ``M``; ``zero_tol`` overrides the relative rule."""
    s = singular_values(M)
    if zero_tol is None:
        zero_tol = relative_zero_tol(np.shape(M), s[0] if s.size else 0.0, tol)
    return SingularSpectrum.from_values(s, zero_tol)


def svd(M, tol: float = RANK_TOL):
    """Thin SVD ``M = U @ diag(S.values) @ Vt``.

    Returns ``(U, S, Vt)`` with ``U`` of shape (m, r), ``Vt`` of shape (r, n)
    and ``r = min(m, n)``.
    """
    M = as_matrix(M)
    m, n = M.shape
    if M.size == 0:
        r = min(m, n)
        S = SingularSpectrum.from_values(np.zeros(r), 0.0)
        return np.zeros((m, r)), S, np.zeros((r, n))
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    zero_tol = relative_zero_tol(M.shape, s[0], tol)
    return U, SingularSpectrum(values=s, zero_tol=zero_tol), Vt


def rank(M, tol: float = RANK_TOL) -> int:
    if tol <= 0:
        raise InvalidInput("rank tolerance must be positive")
    M = as_matrix(M)
    s = singular_values(M)
    if s.size == 0:
        return 0
    return int(np.count_nonzero(s > tol * max(M.shape) * s[0]))


def _full_right_factor(M: np.ndarray, tol: float):
    m, n = M.shape
    if m == 0 or n == 0:
        return 0, np.eye(n)
    _, s, Vt = np.linalg.svd(M, full_matrices=True)
    r = int(np.count_nonzero(s > tol * max(M.shape) * s[0]))
    return r, Vt


def nullspace_basis(M, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal rows spanning N(M); shape ``(n - rank(M), n)``."""
    M = as_matrix(M)
    r, Vt = _full_right_factor(M, tol)
    return Vt[r:].copy()


def rowspace_basis(M, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal rows spanning the row space of ``M`` (= N(M) complement)."""
    M = as_matrix(M)
    r, Vt = _full_right_factor(M, tol)
    return Vt[:r].copy()


def condition_number(S: SingularSpectrum) -> float:
    """Largest over smallest nonzero singular value."""
    nz = S.nonzero
    if nz.size == 0:
        raise DegenerateSpectrum("spectrum has no nonzero singular value")
    return float(nz[0] / nz[-1])


def min_norm_solution(M, rhs, tol: float = RANK_TOL) -> np.ndarray:
    """Minimum-norm least-squares solution of ``M x = rhs`` (truncated SVD)."""
    M = as_matrix(M)
    rhs = as_vector(rhs, "rhs")
    m, n = M.shape
    if m == 0 or n == 0:
        return np.zeros(n)
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    r = int(np.count_nonzero(s > tol * max(M.shape) * s[0]))
    return Vt[:r].T @ ((U[:, :r].T @ rhs) / s[:r])
