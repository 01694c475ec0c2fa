"""Dense complex factorizations and solvers, implemented in-repo.

The SVD is a one-sided Jacobi iteration: unitary plane rotations applied on
the right orthogonalize the columns, so U and V stay unitary to machine
precision and singular values come out with high relative accuracy. At desk
scale (dimensions up to a few hundred) the O(n^3)-per-sweep cost is fine.

The solvers (partial-pivot LU, Cholesky) are the plain textbook algorithms;
they exist so the closed-form paths never have to fall back to an external
linear-algebra backend.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import (
    DEFAULT_TOL,
    UNIT_ROUNDOFF,
    ConvergenceError,
    PreconditionError,
    Tolerance,
    dagger,
    eye,
    frobenius,
)

_EPS = 2.0 * UNIT_ROUNDOFF  # machine epsilon for float64


@dataclass(frozen=True)
class SvdFactorization:
    """A = u @ diag(sigma) @ v* with u (m,m) and v (n,n) unitary.

    sigma has length min(m, n), sorted non-increasing; rank counts the
    singular values above cutoff = rank_rel * sigma[0] * max(m, n).
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    rank: int

    @property
    def cutoff_slices(self) -> tuple[np.ndarray, np.ndarray]:
        """(u columns, v columns) spanning the range / co-range of A."""
        return self.u[:, : self.rank], self.v[:, : self.rank]


def _complete_orthonormal(cols: np.ndarray, total: int) -> np.ndarray:
    """Extend orthonormal columns (total x k) to a full unitary (total x total).

    Greedy: repeatedly orthogonalize all remaining coordinate vectors against
    the accepted columns and take the one with the largest residual. The
    largest residual norm is always bounded below by sqrt(deficit/total), so
    the loop cannot stall.
    """
    q = np.array(cols, dtype=np.complex128, copy=True)
    while q.shape[1] < total:
        resid = eye(total) - q @ dagger(q)
        norms = np.sqrt(np.sum(np.abs(resid) ** 2, axis=0))
        best = int(np.argmax(norms))
        col = resid[:, best]
        col = col - q @ (dagger(q) @ col)  # second pass for orthogonality
        col = col / np.sqrt(np.sum(np.abs(col) ** 2))
        q = np.hstack([q, col[:, None]])
    return q


def svd(a: np.ndarray, tol: Tolerance = DEFAULT_TOL, max_sweeps: int = 60) -> SvdFactorization:
    """One-sided Jacobi SVD of a complex matrix.

    Raises ConvergenceError if the cyclic sweeps do not reach the
    Forsythe-Henrici stopping test within max_sweeps.
    """
    a = np.asarray(a, dtype=np.complex128)
    m, n = a.shape
    if m < n:
        f = svd(dagger(a), tol, max_sweeps)
        return SvdFactorization(u=f.v, sigma=f.sigma, v=f.u, rank=f.rank)

    b = a.copy()
    v = eye(n)
    # Columns ground down to far below roundoff noise are frozen at zero;
    # repeated rotations among members of a multiple zero singular value
    # would otherwise shrink them without bound, toward denormal livelock.
    dead_floor = (UNIT_ROUNDOFF * UNIT_ROUNDOFF * frobenius(a)) ** 2
    for _ in range(max_sweeps):
        # Gram matrix refreshed once per sweep, then updated rotation by rotation.
        g = dagger(b) @ b
        dead = np.real(np.diag(g)) <= dead_floor
        if np.any(dead):
            b[:, dead] = 0.0
            g[:, dead] = 0.0
            g[dead, :] = 0.0
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                app = g[p, p].real
                aqq = g[q, q].real
                apq = g[p, q]
                if app <= 0.0 or aqq <= 0.0:
                    continue
                if abs(apq) <= _EPS * np.sqrt(app) * np.sqrt(aqq):
                    continue
                rotated = True
                gam = abs(apq)
                phase = apq / gam
                zeta = (aqq - app) / (2.0 * gam)
                if zeta == 0.0:
                    t = 1.0
                else:
                    t = np.sign(zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                # J = diag(1, conj(phase)) applied after the real rotation;
                # it zeroes the (p,q) Gram entry.
                j = np.array(
                    [[c, s], [-s * np.conj(phase), c * np.conj(phase)]],
                    dtype=np.complex128,
                )
                b[:, [p, q]] = b[:, [p, q]] @ j
                v[:, [p, q]] = v[:, [p, q]] @ j
                g[:, [p, q]] = g[:, [p, q]] @ j
                g[[p, q], :] = dagger(j) @ g[[p, q], :]
                g[p, q] = 0.0
                g[q, p] = 0.0
        if not rotated:
            break
    else:
        raise ConvergenceError(
            f"one-sided Jacobi SVD did not converge within {max_sweeps} sweeps"
        )

    norms = np.sqrt(np.sum(np.abs(b) ** 2, axis=0))
    order = np.argsort(-norms, kind="stable")
    sigma = norms[order]
    b = b[:, order]
    v = v[:, order]

    nonzero = sigma > 0.0
    u_cols = b[:, nonzero] / sigma[nonzero]
    u = _complete_orthonormal(u_cols, m) if u_cols.shape[1] < m else u_cols

    sigma_max = sigma[0] if sigma.size else 0.0
    cutoff = tol.rank_cutoff(sigma_max, m, n)
    rank = int(np.count_nonzero(sigma > cutoff))
    return SvdFactorization(u=u, sigma=sigma, v=v, rank=rank)


def lu_solve(a: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve a @ x = rhs for square a by LU with partial pivoting.

    Raises PreconditionError when a pivot falls below the numerical-zero
    threshold (the matrix is singular at working precision).
    """
    a = np.array(a, dtype=np.complex128, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise PreconditionError("lu_solve needs a square matrix")
    x = np.array(rhs, dtype=np.complex128, copy=True)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[:, None]
    if x.shape[0] != n:
        raise PreconditionError("right-hand side has the wrong number of rows")

    scale = float(np.max(np.abs(a))) if n else 0.0
    tiny = 10.0 * n * UNIT_ROUNDOFF * max(scale, 1e-300)
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[piv, k]) <= tiny:
            raise PreconditionError("matrix is singular at working precision")
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            x[[k, piv]] = x[[piv, k]]
        mult = a[k + 1 :, k] / a[k, k]
        a[k + 1 :, k + 1 :] -= np.outer(mult, a[k, k + 1 :])
        x[k + 1 :] -= np.outer(mult, x[k])
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - a[k, k + 1 :] @ x[k + 1 :]) / a[k, k]
    return x[:, 0] if squeeze else x


def inverse(a: np.ndarray) -> np.ndarray:
    return lu_solve(a, eye(a.shape[0]))


def cholesky_factor(h: np.ndarray) -> np.ndarray | None:
    """Lower Cholesky factor of a Hermitian matrix, or None on breakdown.

    Breakdown (a pivot at or below the relative threshold) is how callers
    detect that the matrix is not positive definite at working precision.
    """
    h = np.array(h, dtype=np.complex128, copy=True)
    n = h.shape[0]
    if h.shape != (n, n):
        raise PreconditionError("cholesky needs a square matrix")
    diag_scale = max(float(np.max(np.abs(np.diag(h).real))), 0.0)
    tiny = 10.0 * n * UNIT_ROUNDOFF * max(diag_scale, 1e-300)
    low = np.zeros_like(h)
    for k in range(n):
        pivot = h[k, k].real - float(np.sum(np.abs(low[k, :k]) ** 2))
        if pivot <= tiny:
            return None
        low[k, k] = np.sqrt(pivot)
        if k + 1 < n:
            rest = h[k + 1 :, k] - low[k + 1 :, :k] @ np.conj(low[k, :k])
            low[k + 1 :, k] = rest / low[k, k]
    return low


def cholesky_solve(low: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve (L L*) x = rhs given the lower factor from cholesky_factor."""
    n = low.shape[0]
    y = np.array(rhs, dtype=np.complex128, copy=True)
    squeeze = y.ndim == 1
    if squeeze:
        y = y[:, None]
    for k in range(n):
        y[k] = (y[k] - low[k, :k] @ y[:k]) / low[k, k]
    up = dagger(low)
    for k in range(n - 1, -1, -1):
        y[k] = (y[k] - up[k, k + 1 :] @ y[k + 1 :]) / up[k, k]
    return y[:, 0] if squeeze else y


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random unitary via modified Gram-Schmidt on a complex Gaussian."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        col = g[:, j]
        for _ in range(2):
            col = col - q[:, :j] @ (dagger(q[:, :j]) @ col)
        q[:, j] = col / np.sqrt(np.sum(np.abs(col) ** 2))
    return q


def hermitian_eigenvalues(h: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, sorted non-increasing.

    Shift-by-norm trick: h + c*I with c = ||h||_F is positive semidefinite,
    where the SVD coincides with the spectral decomposition; subtracting c
    back recovers the eigenvalues. Keeps the package eigensolver-free.
    """
    h = np.asarray(h, dtype=np.complex128)
    n = h.shape[0]
    h = (h + dagger(h)) / 2.0
    c = float(np.sqrt(np.sum(np.abs(h) ** 2)))
    if c == 0.0:
        return np.zeros(n)
    f = svd(h + c * eye(n), tol)
    return f.sigma - c
