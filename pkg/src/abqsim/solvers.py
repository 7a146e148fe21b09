"""Batched tridiagonal solves for the implicit propagators.

The Crank-Nicolson matrices (1 + i tau H) used here satisfy
|diag| = sqrt(1 + s^2) > s >= |lower| + |upper| elementwise, so the
Thomas algorithm is stable without pivoting.  Factorizations are
precomputed once per run because the Hamiltonians are static.

Layout: a batch of n independent systems of size m is stored as (m, n)
arrays, so the sequential sweep runs over contiguous rows.
"""

from __future__ import annotations

import numpy as np


def _as_batch(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    return a[:, None] if a.ndim == 1 else a


class TridiagonalFactor:
    """Reusable Thomas factorization of a batch of tridiagonal systems.

    lower[i] couples row i to i-1 (lower[0] ignored), upper[i] couples
    row i to i+1 (upper[m-1] ignored).
    """

    def __init__(self, lower, diag, upper):
        lower = _as_batch(lower)
        diag = _as_batch(diag)
        upper = _as_batch(upper)
        if not (lower.shape == diag.shape == upper.shape):
            raise ValueError("lower, diag, upper must share a shape")
        m, n = diag.shape
        if m < 2:
            raise ValueError("need at least two rows")
        self.shape = (m, n)
        self.lower = lower
        self.cp = np.empty_like(diag)
        self.invden = np.empty_like(diag)
        self.invden[0] = 1.0 / diag[0]
        self.cp[0] = upper[0] * self.invden[0]
        for i in range(1, m):
            den = diag[i] - lower[i] * self.cp[i - 1]
            self.invden[i] = 1.0 / den
            self.cp[i] = upper[i] * self.invden[i]
        self._tmp = np.empty(n, dtype=np.complex128)

    def solve(self, rhs: np.ndarray, out: np.ndarray = None) -> np.ndarray:
        """Solve all systems for rhs of shape (m, n); overwrites ``out`` if given."""
        m, _ = self.shape
        if out is None:
            out = np.empty_like(rhs)
        tmp = self._tmp
        np.multiply(rhs[0], self.invden[0], out=out[0])
        for i in range(1, m):
            np.multiply(self.lower[i], out[i - 1], out=tmp)
            np.subtract(rhs[i], tmp, out=out[i])
            out[i] *= self.invden[i]
        for i in range(m - 2, -1, -1):
            np.multiply(self.cp[i], out[i + 1], out=tmp)
            out[i] -= tmp
        return out


def solve_tridiagonal(lower, diag, upper, rhs) -> np.ndarray:
    """One-shot Thomas solve (see TridiagonalFactor for conventions)."""
    single = np.asarray(diag).ndim == 1
    x = TridiagonalFactor(lower, diag, upper).solve(_as_batch(rhs))
    return x[:, 0] if single else x


def tridiagonal_matvec(lower, diag, upper, x) -> np.ndarray:
    """Dense-free A @ x in the same layout; an independent residual check."""
    single = np.asarray(diag).ndim == 1
    lower, diag, upper, x = map(_as_batch, (lower, diag, upper, x))
    y = diag * x
    y[1:] += lower[1:] * x[:-1]
    y[:-1] += upper[:-1] * x[1:]
    return y[:, 0] if single else y
