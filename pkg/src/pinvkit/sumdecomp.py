"""Pseudoinverses of orthogonal sums and completed matrices.

A family {A_k} whose members have mutually orthogonal ranges and co-ranges
(certified by check_orthogonality) satisfies (sum A_k)^+ = sum A_k^+, and the
sum's pseudoinverse is a {1,3,4}-inverse of every member. The same geometry
yields single-equation characterizations through Gram sums, rank-completion
inversion by null-space dyads, the pair-completion solves, and the
Fill-Fishkind projector formula for rank-additive pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import pinv, projectors
from .linalg import cholesky_factor, cholesky_solve, inverse, lu_solve, random_unitary, svd
from .matrix import (
    DEFAULT_TOL,
    PreconditionError,
    Tolerance,
    VerificationError,
    as_matrix,
    dagger,
    eye,
    frobenius,
)


@dataclass(frozen=True)
class OperatorFamily:
    """An ordered family of same-shape complex matrices, K >= 1."""

    members: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.members) < 1:
            raise PreconditionError("family needs at least one member")
        validated = tuple(as_matrix(m) for m in self.members)
        shape = validated[0].shape
        if any(m.shape != shape for m in validated):
            raise PreconditionError("family members must share one shape")
        object.__setattr__(self, "members", validated)

    def __len__(self) -> int:
        return len(self.members)

    @property
    def shape(self) -> tuple[int, int]:
        return self.members[0].shape

    def total(self) -> np.ndarray:
        return np.sum(self.members, axis=0)

    def deflated(self, k0: int) -> np.ndarray:
        """Sum of all members except the k0-th (zero matrix when K = 1)."""
        rest = [m for k, m in enumerate(self.members) if k != k0]
        return np.sum(rest, axis=0) if rest else np.zeros(self.shape, dtype=np.complex128)


@dataclass(frozen=True)
class OrthogonalityCertificate:
    """Pairwise product norms certifying mutually orthogonal ranges.

    holds is true when both maxima are at most residual_abs * max(1,
    max_k ||A_k||_F^2); worst_pair is the (k', k) index pair attaining the
    larger scaled violation (None for K = 1).
    """

    pairwise_left: float
    pairwise_right: float
    holds: bool
    worst_pair: tuple[int, int] | None


def check_orthogonality(
    fam: OperatorFamily, tol: Tolerance = DEFAULT_TOL
) -> OrthogonalityCertificate:
    """Certify R(A_k) <= N(A_k'*) and R(A_k*) <= N(A_k') for all k != k'.

    Both inclusions are tested in the equivalent product form
    A_k'* A_k = 0 and A_k' A_k* = 0.
    """
    left = right = 0.0
    worst: tuple[int, int] | None = None
    for kp, a_kp in enumerate(fam.members):
        for k, a_k in enumerate(fam.members):
            if k == kp:
                continue
            lhs = frobenius(dagger(a_kp) @ a_k)
            rhs = frobenius(a_kp @ dagger(a_k))
            if worst is None or max(lhs, rhs) > max(left, right):
                worst = (kp, k)
            left = max(left, lhs)
            right = max(right, rhs)
    scale = max(1.0, max(frobenius(m) ** 2 for m in fam.members))
    holds = left <= tol.residual_abs * scale and right <= tol.residual_abs * scale
    return OrthogonalityCertificate(left, right, holds, worst if len(fam) > 1 else None)


def _require_certificate(fam: OperatorFamily, tol: Tolerance) -> None:
    cert = check_orthogonality(fam, tol)
    if not cert.holds:
        kp, k = cert.worst_pair
        raise PreconditionError(
            f"family members {kp} and {k} are not orthogonal "
            f"(left {cert.pairwise_left:.3e}, right {cert.pairwise_right:.3e})"
        )


def pinv_sum(
    fam: OperatorFamily, tol: Tolerance = DEFAULT_TOL
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Pseudoinverse of sum A_k as the sum of member pseudoinverses.

    Requires the orthogonality certificate; refuses with the offending pair
    otherwise. Returns (sum of pinvs, per-member pinvs).
    """
    _require_certificate(fam, tol)
    terms = [pinv(m, tol) for m in fam.members]
    return np.sum(terms, axis=0), terms


def pinv_via_gram_equation(
    fam: OperatorFamily, k0: int, side: str = "left", tol: Tolerance = DEFAULT_TOL
) -> np.ndarray:
    """Member pseudoinverse from a single Gram-sum equation.

    side="left" evaluates (sum A_k* A_k)^+ A_k0*; when the Gram sum is
    numerically positive definite this is one Hermitian solve of
    (sum A_k* A_k) X = A_k0* (the injective-family case). side="right"
    uses A_k0* (sum A_k A_k*)^+ dually.
    """
    _require_certificate(fam, tol)
    if not 0 <= k0 < len(fam):
        raise PreconditionError(f"k0 must index a member, got {k0}")
    a_k0 = fam.members[k0]
    if side == "left":
        gram = np.sum([dagger(m) @ m for m in fam.members], axis=0)
        low = cholesky_factor(gram)
        if low is not None:
            return cholesky_solve(low, dagger(a_k0))
        return pinv(gram, tol) @ dagger(a_k0)
    if side == "right":
        gram = np.sum([m @ dagger(m) for m in fam.members], axis=0)
        low = cholesky_factor(gram)
        if low is not None:
            return dagger(cholesky_solve(low, a_k0))
        return dagger(a_k0) @ pinv(gram, tol)
    raise PreconditionError(f"side must be 'left' or 'right', got {side!r}")


def pinv_invertible_projector_eq(
    fam: OperatorFamily, k0: int, tol: Tolerance = DEFAULT_TOL
) -> np.ndarray:
    """Member pseudoinverse by solving (sum A_k) X = P onto N(deflated sum*).

    Requires a square, numerically invertible family sum. The dual equation
    X (sum A_k) = P_N(deflated sum) is verified as a residual.
    """
    _require_certificate(fam, tol)
    if not 0 <= k0 < len(fam):
        raise PreconditionError(f"k0 must index a member, got {k0}")
    total = fam.total()
    m, n = total.shape
    if m != n:
        raise PreconditionError("family sum must be square")
    if svd(total, tol).rank != n:
        raise PreconditionError("family sum is not invertible at tolerance")
    rest = fam.deflated(k0)
    _, p_null_rest_adj, _, p_null_rest = projectors(rest, tol)
    x = lu_solve(total, p_null_rest_adj)
    scaled = tol.scaled_for(total)
    dual = frobenius(x @ total - p_null_rest)
    if dual > scaled.residual_abs:
        raise VerificationError(
            f"dual projector equation residual {dual:.3e} exceeds {scaled.residual_abs:.3e}"
        )
    return x


@dataclass(frozen=True)
class CompletionData:
    """Orthonormal null-space bases and nonzero weights for rank completion.

    f_basis columns lie in N(A), g_basis columns in N(A*), one weight per
    column pair. Zero columns are allowed (p = 0) for already-full-rank
    matrices.
    """

    f_basis: np.ndarray
    g_basis: np.ndarray
    d: np.ndarray

    def __post_init__(self) -> None:
        f = np.asarray(self.f_basis, dtype=np.complex128)
        g = np.asarray(self.g_basis, dtype=np.complex128)
        d = np.asarray(self.d, dtype=np.complex128).ravel()
        if f.ndim != 2 or g.ndim != 2 or f.shape[1] != g.shape[1] or d.size != f.shape[1]:
            raise PreconditionError("completion bases and weights must have matching counts")
        object.__setattr__(self, "f_basis", f)
        object.__setattr__(self, "g_basis", g)
        object.__setattr__(self, "d", d)

    @property
    def count(self) -> int:
        return self.f_basis.shape[1]


def _validate_completion(a: np.ndarray, comp: CompletionData, tol: Tolerance) -> None:
    p = comp.count
    if p == 0:
        return
    f, g, d = comp.f_basis, comp.g_basis, comp.d
    m, n = a.shape
    if f.shape[0] != n or g.shape[0] != m:
        raise PreconditionError("completion basis dimensions do not match the matrix")
    bound = tol.residual_abs * max(1.0, float(p))
    if frobenius(dagger(f) @ f - eye(p)) > bound:
        raise PreconditionError("f_basis is not orthonormal")
    if frobenius(dagger(g) @ g - eye(p)) > bound:
        raise PreconditionError("g_basis is not orthonormal")
    scaled = tol.scaled_for(a)
    if frobenius(a @ f) > scaled.residual_abs:
        raise PreconditionError("f_basis does not lie in the null space of A")
    if frobenius(dagger(a) @ g) > scaled.residual_abs:
        raise PreconditionError("g_basis does not lie in the null space of A*")
    if np.any(np.abs(d) == 0.0):
        raise PreconditionError("completion weights must be nonzero")


def auto_completion(a: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> CompletionData:
    """Full null-space completion from the SVD, weights d_k = sigma_1.

    The scale-matched weight keeps the completed matrix's conditioning close
    to that of A itself.
    """
    m, n = a.shape
    f = svd(a, tol)
    q = min(m, n)
    p = q - f.rank
    weight = f.sigma[0] if f.rank > 0 else 1.0
    return CompletionData(
        f_basis=f.v[:, f.rank : q],
        g_basis=f.u[:, f.rank : q],
        d=np.full(p, weight, dtype=np.complex128),
    )


def rank_completion_pinv(
    a: np.ndarray,
    comp: CompletionData | None = None,
    tol: Tolerance = DEFAULT_TOL,
    mode: str = "auto",
) -> np.ndarray:
    """Pseudoinverse by completing the null spaces with weighted dyads.

    With M = A + sum_k d_k g_k f_k*, the identity A^+ = M^+ - sum_k (1/d_k)
    f_k g_k* holds for any orthonormal null-space subsets and nonzero
    weights. Modes:

      auto       pick the cheapest applicable branch below
      inverse    square matrix, full completion: one LU inverse of M
      gram-left  m >= n, full completion: Hermitian solve of
                 (A*A + sum |d_k|^2 f_k f_k*) X = M*
      gram-right n >= m, full completion: the mirrored solve
      pinv       any completion: SVD pseudoinverse of M
    """
    a = as_matrix(a)
    m, n = a.shape
    if comp is None:
        comp = auto_completion(a, tol)
    _validate_completion(a, comp, tol)
    f, g, d = comp.f_basis, comp.g_basis, comp.d
    full = comp.count == min(m, n) - svd(a, tol).rank
    dyads_back = (f / d) @ dagger(g)  # sum_k (1/d_k) f_k g_k*
    completed = a + (g * d) @ dagger(f)

    if mode == "auto":
        if not full:
            mode = "pinv"
        elif m == n:
            mode = "inverse"
        else:
            mode = "gram-left" if m > n else "gram-right"

    if mode == "inverse":
        if m != n or not full:
            raise PreconditionError("inverse mode needs a square matrix and full completion")
        return inverse(completed) - dyads_back
    if mode == "gram-left":
        if m < n or not full:
            raise PreconditionError("gram-left mode needs m >= n and full completion")
        gram = dagger(a) @ a + (f * (np.abs(d) ** 2)) @ dagger(f)
        low = cholesky_factor(gram)
        if low is None:
            raise PreconditionError("completed Gram matrix is not positive definite")
        return cholesky_solve(low, dagger(completed)) - dyads_back
    if mode == "gram-right":
        if m > n or not full:
            raise PreconditionError("gram-right mode needs n >= m and full completion")
        gram = a @ dagger(a) + (g * (np.abs(d) ** 2)) @ dagger(g)
        low = cholesky_factor(gram)
        if low is None:
            raise PreconditionError("completed Gram matrix is not positive definite")
        return dagger(cholesky_solve(low, completed)) - dyads_back
    if mode == "pinv":
        return pinv(completed, tol) - dyads_back
    raise PreconditionError(f"unknown rank completion mode {mode!r}")


def completion_pinv_pair(
    a: np.ndarray, b: np.ndarray, mode: str = "auto", tol: Tolerance = DEFAULT_TOL
) -> np.ndarray:
    """Pseudoinverse of A from a single completing partner B.

    Modes:
      gram-left   R(B*) = N(A): solve (A*A + B*B) X = A*
      gram-right  R(B) = N(A*): solve X (AA* + BB*) = A*
      gram        whichever of the two directions applies
      invertible  square, R(B*) = N(A) and R(B) <= N(A*) (or mirrored):
                  A^+ = (A+B)^-1 - B^+, checked against both projector
                  equations (A+B) X = P_N(B*) and X (A+B) = P_N(B)
      auto        invertible if possible, else the applicable gram direction
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise PreconditionError("A and B must have the same shape")
    m, n = a.shape
    scaled = tol.residual_abs * max(1.0, frobenius(a) * frobenius(b))
    fa = svd(a, tol)
    fb = svd(b, tol)
    range_bstar_in_null_a = frobenius(a @ dagger(b)) <= scaled
    range_b_in_null_astar = frobenius(dagger(a) @ b) <= scaled
    fills_null_a = range_bstar_in_null_a and fb.rank == n - fa.rank
    fills_null_astar = range_b_in_null_astar and fb.rank == m - fa.rank

    if mode == "auto":
        if m == n and (
            (fills_null_a and range_b_in_null_astar)
            or (fills_null_astar and range_bstar_in_null_a)
        ):
            mode = "invertible"
        else:
            mode = "gram"
    if mode == "gram":
        if fills_null_a:
            mode = "gram-left"
        elif fills_null_astar:
            mode = "gram-right"
        else:
            raise PreconditionError(
                "B completes neither null space of A: need R(B*) = N(A) or R(B) = N(A*)"
            )

    if mode == "gram-left":
        if not range_bstar_in_null_a:
            raise PreconditionError("R(B*) is not contained in N(A): A B* is not zero")
        if fb.rank != n - fa.rank:
            raise PreconditionError(
                f"R(B*) does not fill N(A): rank(B) = {fb.rank}, need {n - fa.rank}"
            )
        low = cholesky_factor(dagger(a) @ a + dagger(b) @ b)
        if low is None:
            raise PreconditionError("A*A + B*B is not positive definite at tolerance")
        return cholesky_solve(low, dagger(a))
    if mode == "gram-right":
        if not range_b_in_null_astar:
            raise PreconditionError("R(B) is not contained in N(A*): A* B is not zero")
        if fb.rank != m - fa.rank:
            raise PreconditionError(
                f"R(B) does not fill N(A*): rank(B) = {fb.rank}, need {m - fa.rank}"
            )
        low = cholesky_factor(a @ dagger(a) + b @ dagger(b))
        if low is None:
            raise PreconditionError("AA* + BB* is not positive definite at tolerance")
        return dagger(cholesky_solve(low, a))
    if mode == "invertible":
        if m != n:
            raise PreconditionError("invertible mode needs square matrices")
        if not (
            (fills_null_a and range_b_in_null_astar)
            or (fills_null_astar and range_bstar_in_null_a)
        ):
            raise PreconditionError(
                "invertible mode needs R(B*) = N(A) with R(B) <= N(A*), or the mirrored pair"
            )
        x = inverse(a + b) - pinv(b, tol)
        _, p_null_b_adj, _, p_null_b = projectors(b, tol)
        bound = tol.scaled_for(a + b).residual_abs
        left = frobenius((a + b) @ x - p_null_b_adj)
        right = frobenius(x @ (a + b) - p_null_b)
        if max(left, right) > bound:
            raise VerificationError(
                f"projector equation residuals left {left:.3e} / right {right:.3e} "
                f"exceed {bound:.3e}"
            )
        return x
    raise PreconditionError(f"unknown pair completion mode {mode!r}")


def fill_fishkind_pinv(
    a1: np.ndarray, a2: np.ndarray, tol: Tolerance = DEFAULT_TOL
) -> np.ndarray:
    """Pseudoinverse of A1 + A2 for a rank-additive square pair.

    Requires rank(A1 + A2) = rank(A1) + rank(A2). Singular values within a
    factor of 4 of the rank cutoff make the numerical rank ambiguous; such
    ties are rejected rather than guessed.
    """
    a1 = as_matrix(a1)
    a2 = as_matrix(a2)
    if a1.shape != a2.shape or a1.shape[0] != a1.shape[1]:
        raise PreconditionError("Fill-Fishkind needs same-shape square matrices")
    n = a1.shape[0]
    f1, f2, fs = svd(a1, tol), svd(a2, tol), svd(a1 + a2, tol)
    for f in (f1, f2, fs):
        cutoff = tol.rank_cutoff(f.sigma[0] if f.sigma.size else 0.0, n, n)
        if cutoff > 0 and np.any((f.sigma > cutoff / 4.0) & (f.sigma <= cutoff * 4.0)):
            raise PreconditionError(
                "a singular value ties with the rank cutoff; rank additivity undecidable"
            )
    if fs.rank != f1.rank + f2.rank:
        raise PreconditionError(
            f"rank additivity fails: rank(A1+A2) = {fs.rank}, "
            f"rank(A1) + rank(A2) = {f1.rank} + {f2.rank}"
        )
    _, p_null_a1_adj, _, p_null_a1 = projectors(a1, tol, factorization=f1)
    p_range_a2, _, p_range_a2_adj, _ = projectors(a2, tol, factorization=f2)
    left = pinv(p_range_a2_adj @ p_null_a1, tol)
    right = pinv(p_null_a1_adj @ p_range_a2, tol)
    x1 = pinv(a1, tol)
    x2 = pinv(a2, tol)
    return (eye(n) - left) @ x1 @ (eye(n) - right) + left @ x2 @ right


def gen_svd_block_family(
    seed: int, rows: int, cols: int, k: int, ranks=None
) -> OperatorFamily:
    """Seeded family sharing one singular-vector frame with disjoint blocks.

    Each member is V E_k W* where E_k carries positive diagonal values on its
    own index block; disjoint blocks make the orthogonality certificate hold
    by construction.
    """
    if ranks is None:
        ranks = (1,) * k
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != k or any(r < 1 for r in ranks):
        raise PreconditionError("ranks must list one positive rank per member")
    if sum(ranks) > min(rows, cols):
        raise PreconditionError(
            f"rank budget exceeded: sum(ranks) = {sum(ranks)} > min(rows, cols) = {min(rows, cols)}"
        )
    rng = np.random.default_rng(seed)
    v = random_unitary(rng, rows)
    w = random_unitary(rng, cols)
    members = []
    offset = 0
    for r in ranks:
        values = rng.uniform(0.5, 2.0, size=r)
        members.append((v[:, offset : offset + r] * values) @ dagger(w[:, offset : offset + r]))
        offset += r
    return OperatorFamily(tuple(members))


def gen_shared_subspace_triple(
    seed: int, rows: int, cols: int, rank: int
) -> OperatorFamily:
    """Triple (M, M, -M) on one shared singular frame.

    The coefficients (1, 1, -1) make the sum's pseudoinverse equal the sum of
    member pseudoinverses even though all ranges coincide, so the
    orthogonality certificate fails: the certificate is sufficient, not
    necessary.
    """
    if not 1 <= rank <= min(rows, cols):
        raise PreconditionError("rank must lie in [1, min(rows, cols)]")
    rng = np.random.default_rng(seed)
    v = random_unitary(rng, rows)
    w = random_unitary(rng, cols)
    values = rng.uniform(0.5, 2.0, size=rank)
    base = (v[:, :rank] * values) @ dagger(w[:, :rank])
    return OperatorFamily((base, base, -base))


def gen_rank_additive_pair(
    seed: int, n: int, tol: Tolerance = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Seeded random square pair with rank(A1 + A2) = rank(A1) + rank(A2).

    Rejection-sampled: random low-rank factor products are rank-additive for
    almost every draw, so the loop terminates immediately in practice.
    """
    rng = np.random.default_rng(seed)
    for _ in range(100):
        r1 = int(rng.integers(1, n))
        r2 = int(rng.integers(1, n - r1 + 1))

        def low_rank(r):
            g = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
            h = rng.standard_normal((r, n)) + 1j * rng.standard_normal((r, n))
            return g @ h

        a1, a2 = low_rank(r1), low_rank(r2)
        if svd(a1 + a2, tol).rank == svd(a1, tol).rank + svd(a2, tol).rank:
            return a1, a2
    raise PreconditionError("could not sample a rank-additive pair")
