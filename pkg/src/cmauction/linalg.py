"""Dense numerical kernel: Kronecker products, numerical rank, minimum-norm solves.

All routines are thin, deterministic wrappers around numpy's SVD machinery;
matrices are plain ``numpy.ndarray`` in row-major layout.  Sizes here are
tiny (conditional vectors and their Kronecker powers), so one robust
primitive covers everything.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionOverflow

DEFAULT_CAP = 10**6
RANK_TOL = 1e-9
RESIDUAL_TOL = 1e-8


def _check_cap(n_entries: int, cap: int, what: str) -> None:
    if n_entries > cap:
        raise DimensionOverflow(
            f"{what} would hold {n_entries} entries, exceeding the cap of {cap}"
        )


def kronecker(a, b, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Kronecker product of two vectors or matrices."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("kronecker requires finite entries")
    _check_cap(a.size * b.size, cap, "kronecker product")
    return np.kron(a, b)


def kronecker_power(v, m: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """m-fold Kronecker product of a vector with itself; m=0 gives [1.0].

    Built as a left fold, so index (s_1, ..., s_m) is row-major with s_m
    varying fastest.
    """
    v = np.asarray(v, dtype=float)
    if m < 0:
        raise ValueError("kronecker power requires m >= 0")
    _check_cap(max(v.size, 1) ** m, cap, "kronecker power")
    out = np.ones(1)
    for _ in range(m):
        out = np.kron(out, v)
    return out


def rank(mat, tol: float = RANK_TOL) -> int:
    """Numerical rank: number of singular values above tol * sigma_max."""
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


@dataclass(frozen=True)
class SolveOutcome:
    """Minimum-norm solution of a linear system, or the least-squares residual.

    ``solution`` is None when the residual exceeds the acceptance threshold;
    ``residual`` is the Euclidean norm of A x - b for the returned (or
    best least-squares) x either way.
    """

    solution: np.ndarray | None
    residual: float

    @property
    def ok(self) -> bool:
        return self.solution is not None


def min_norm_solve(
    a, b, tol: float = RESIDUAL_TOL, rank_tol: float = RANK_TOL
) -> SolveOutcome:
    """Solve A x = b, returning the minimum-Euclidean-norm solution.

    Underdetermined systems (the common case for lottery schedules) have an
    affine solution set; the SVD pseudo-inverse picks the unique solution
    orthogonal to the null space.  If even the least-squares minimizer
    leaves a residual above ``tol * (1 + ||b||)``, the system is declared
    unsolvable and the minimizer's residual is reported.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    if a.shape[0] != b.size:
        raise ValueError(f"matrix has {a.shape[0]} rows but rhs has {b.size}")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("min_norm_solve requires finite entries")

    u, s, vt = np.linalg.svd(a, full_matrices=False)
    keep = s > (rank_tol * s[0] if s.size and s[0] > 0 else np.inf)
    coeffs = (u.T @ b)[keep] / s[keep]
    x = vt[keep].T @ coeffs
    residual = float(np.linalg.norm(a @ x - b))
    if residual <= tol * (1.0 + float(np.linalg.norm(b))):
        return SolveOutcome(solution=x, residual=residual)
    return SolveOutcome(solution=None, residual=residual)
