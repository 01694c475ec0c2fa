"""Distance matrices of zero-sum weighted trees and odd wheel graphs.

Both families admit the same trick: the distance matrix D is singular with a
known one-dimensional null space, and adding a rank-one completion on the
null vector yields an invertible matrix whose ordinary inverse is a
{1,3,4}-inverse of D. Subtracting the matching dyad from that inverse gives
the Moore-Penrose inverse in closed form. For wheels the inverse itself is
known entrywise through an integer vector z, checked here exactly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .circulant import circ_materialize, circ_mul
from .core import penrose_residuals
from .linalg import hermitian_eigenvalues, inverse, lu_solve, svd
from .matrix import (
    DEFAULT_TOL,
    PreconditionError,
    Tolerance,
    VerificationError,
    frobenius,
)

__all__ = [
    "TreeMatrices",
    "WheelGraph",
    "gen_zero_sum_tree",
    "tree_build",
    "tree_pinv",
    "tree_shift_inverse",
    "tree_u_and_reconstruction",
    "wheel_build",
    "wheel_pinv",
    "wheel_properties",
    "wheel_z",
    "wheel_z_identities",
]


# --------------------------------------------------------------------------
# weighted trees


@dataclass(frozen=True)
class TreeMatrices:
    """Distance matrix and companions of a weighted tree.

    D[i, j] is the sum of edge weights along the unique i-j path. L is the
    weighted Laplacian with off-diagonal entries -1/w_ij and row sums zero.
    delta holds vertex degrees and tau = 2e - delta. Vertices are 0-based
    here; the edge triples keep their 1-based labels as given.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]
    D: np.ndarray
    L: np.ndarray
    delta: np.ndarray
    tau: np.ndarray

    @property
    def weight_sum(self) -> float:
        return float(sum(w for _, _, w in self.edges))


def _require_zero_sum(tree: TreeMatrices, tol: Tolerance) -> None:
    total = abs(tree.weight_sum)
    scale = sum(abs(w) for _, _, w in tree.edges)
    if total > tol.residual_abs * max(1.0, scale):
        raise PreconditionError(
            f"edge weights sum to {tree.weight_sum:.6g}, not zero; "
            "the closed-form routes need a zero-sum tree"
        )


def tree_build(edges, tol: Tolerance = DEFAULT_TOL) -> TreeMatrices:
    """Build TreeMatrices from (i, j, w) triples with 1-based vertices.

    The edge list must form a spanning tree on vertices 1..n with nonzero
    weights. Weights of either sign are allowed; a zero weight sum is only
    required later, by the pseudoinverse routes.

    Two structural identities are verified on every build: L e = 0 holds by
    construction, and D L = e tau^t - 2I is checked numerically. When the
    weights sum to zero, D tau = 0 is checked as well.
    """
    triples = []
    for entry in edges:
        i, j, w = entry
        i, j, w = int(i), int(j), float(w)
        if i == j:
            raise PreconditionError(f"self-loop at vertex {i}")
        if w == 0.0 or not np.isfinite(w):
            raise PreconditionError(f"edge ({i}, {j}) has weight {w}; need nonzero finite")
        if i < 1 or j < 1:
            raise PreconditionError(f"edge ({i}, {j}) uses a non-positive vertex label")
        triples.append((i, j, w))

    vertices = sorted({i for i, _, _ in triples} | {j for _, j, _ in triples})
    n = len(vertices)
    if n < 2:
        raise PreconditionError("a tree needs at least two vertices")
    if vertices != list(range(1, n + 1)):
        raise PreconditionError(f"vertex labels must be 1..{n}, got {vertices}")
    if len(triples) != n - 1:
        raise PreconditionError(f"a tree on {n} vertices needs {n - 1} edges, got {len(triples)}")

    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    seen_pairs = set()
    for i, j, w in triples:
        pair = (min(i, j), max(i, j))
        if pair in seen_pairs:
            raise PreconditionError(f"duplicate edge between {pair[0]} and {pair[1]}")
        seen_pairs.add(pair)
        adjacency[i - 1].append((j - 1, w))
        adjacency[j - 1].append((i - 1, w))

    # Path sums by BFS from every root. n-1 edges plus full reachability
    # from vertex 0 rules out cycles, so each vertex is settled once.
    d = np.zeros((n, n))
    for root in range(n):
        dist = np.full(n, np.nan)
        dist[root] = 0.0
        queue = deque([root])
        while queue:
            at = queue.popleft()
            for nxt, w in adjacency[at]:
                if np.isnan(dist[nxt]):
                    dist[nxt] = dist[at] + w
                    queue.append(nxt)
        if np.any(np.isnan(dist)):
            raise PreconditionError("edge list is disconnected")
        d[root] = dist

    lap = np.zeros((n, n))
    for i, j, w in triples:
        lap[i - 1, j - 1] -= 1.0 / w
        lap[j - 1, i - 1] -= 1.0 / w
    np.fill_diagonal(lap, -lap.sum(axis=1))

    delta = np.array([len(adjacency[k]) for k in range(n)], dtype=float)
    tau = 2.0 - delta
    tree = TreeMatrices(n=n, edges=tuple(triples), D=d, L=lap, delta=delta, tau=tau)

    scale = max(1.0, frobenius(d) * frobenius(lap))
    ones = np.ones(n)
    dl_residual = frobenius(d @ lap - (np.outer(ones, tau) - 2.0 * np.eye(n)))
    if dl_residual > 1e-10 * scale:
        raise VerificationError(f"D L = e tau^t - 2I failed with residual {dl_residual:.3e}")
    if abs(tree.weight_sum) <= tol.residual_abs * max(1.0, sum(abs(w) for _, _, w in triples)):
        dtau = float(np.max(np.abs(d @ tau)))
        if dtau > 1e-10 * max(1.0, frobenius(d)):
            raise VerificationError(f"D tau = 0 failed with residual {dtau:.3e}")
    return tree


def gen_zero_sum_tree(seed: int, n: int) -> TreeMatrices:
    """Random tree on n >= 3 vertices whose edge weights sum to zero.

    Each vertex v >= 2 attaches to a uniformly chosen earlier vertex. The
    first n-2 weights are drawn from +-[0.5, 2]; the last weight is the
    negated sum, redrawn whenever it lands within 0.05 of zero.
    """
    if n < 3:
        raise PreconditionError("zero-sum weights need at least two edges, so n >= 3")
    rng = np.random.default_rng(seed)
    while True:
        shape = [(int(rng.integers(1, v)), v) for v in range(2, n + 1)]
        weights = rng.uniform(0.5, 2.0, size=n - 2) * rng.choice([-1.0, 1.0], size=n - 2)
        last = -float(weights.sum())
        if abs(last) < 0.05:
            continue
        edges = [(i, j, float(w)) for (i, j), w in zip(shape[:-1], weights)]
        edges.append((shape[-1][0], shape[-1][1], last))
        return tree_build(edges)


def _auto_alpha(tree: TreeMatrices) -> float:
    """Shift weight for the rank-one completion D + alpha tau tau^t.

    Any nonzero alpha gives the same pseudoinverse; 2/(tau^t L tau) makes the
    intermediate inverse best conditioned and matches the closed-form u
    route. Falls back to 1 when tau^t L tau is negligible.
    """
    quad = float(tree.tau @ tree.L @ tree.tau)
    gate = 1e-7 * max(1.0, frobenius(tree.L) * float(tree.tau @ tree.tau))
    if abs(quad) > gate:
        return 2.0 / quad
    return 1.0


def tree_shift_inverse(
    tree: TreeMatrices, alpha: float | None = None, tol: Tolerance = DEFAULT_TOL
) -> np.ndarray:
    """Ordinary inverse of D + alpha tau tau^t for a zero-sum tree.

    This inverse is a {1,3,4}-inverse of D: with M = D + alpha tau tau^t one
    has M^-1 tau = tau/(alpha ||tau||^2), hence D M^-1 = I - tau tau^t/||tau||^2,
    which is symmetric and fixes D from either side. The shifted matrix M
    itself is not such an inverse; taking it for one confuses M with M^-1.
    """
    _require_zero_sum(tree, tol)
    if alpha is None:
        alpha = _auto_alpha(tree)
    alpha = float(alpha)
    if alpha == 0.0:
        raise PreconditionError("alpha must be nonzero")
    m = tree.D + alpha * np.outer(tree.tau, tree.tau)
    return np.real(inverse(m))


def tree_pinv(
    tree: TreeMatrices, alpha: float | None = None, tol: Tolerance = DEFAULT_TOL
) -> np.ndarray:
    """Moore-Penrose inverse of a zero-sum tree distance matrix.

    Two routes are computed and compared: the explicit form
    M^-1 - tau tau^t / (alpha ||tau||^4) with M = D + alpha tau tau^t, and the
    solution of M X = I - tau tau^t/||tau||^2. The result is independent of
    alpha. A singular M (impossible for a genuine zero-sum tree) surfaces as
    a hard error from the solver.
    """
    _require_zero_sum(tree, tol)
    if alpha is None:
        alpha = _auto_alpha(tree)
    alpha = float(alpha)
    if alpha == 0.0:
        raise PreconditionError("alpha must be nonzero")
    tau = tree.tau
    tau_sq = float(tau @ tau)
    m = tree.D + alpha * np.outer(tau, tau)
    explicit = np.real(inverse(m)) - np.outer(tau, tau) / (alpha * tau_sq**2)
    equation = np.real(lu_solve(m, np.eye(tree.n) - np.outer(tau, tau) / tau_sq))
    gap = frobenius(explicit - equation)
    bound = tol.scaled_for(tree.D).residual_abs * max(1.0, frobenius(explicit))
    if gap > bound:
        raise VerificationError(
            f"inverse and equation routes disagree: {gap:.3e} > {bound:.3e}"
        )
    report = penrose_residuals(tree.D, explicit, tol.scaled_for(tree.D))
    if not report.passed:
        name, value = report.worst
        raise VerificationError(f"tree pseudoinverse failed {name} with residual {value:.3e}")
    return explicit


def tree_u_and_reconstruction(
    tree: TreeMatrices, alpha: float | None = None, tol: Tolerance = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Recover u with D^+ = -L/2 + u tau^t + tau u^t and rebuild D^+.

    D^+ e comes from a single linear solve against the shifted matrix, no
    full pseudoinverse needed: D^+ e = M^-1 e - 2 tau/(alpha ||tau||^4), using
    tau^t e = 2. Then u = (D^+ e - (e^t D^+ e / 4) tau) / 2; the minus sign
    is forced by D^+ tau = 0, which pins tau^t u to tau^t L tau/(4 ||tau||^2).
    When tau^t L tau is nonzero the closed form

        u = (L tau / ||tau||^2 - (tau^t L tau / (2 ||tau||^4)) tau) / 2

    is evaluated as well and the two must agree; a mismatch on a valid tree
    is reported as a verification failure rather than reconciled. Finally the
    reconstruction -L/2 + u tau^t + tau u^t is checked against tree_pinv.
    """
    _require_zero_sum(tree, tol)
    if alpha is None:
        alpha = _auto_alpha(tree)
    alpha = float(alpha)
    if alpha == 0.0:
        raise PreconditionError("alpha must be nonzero")
    tau = tree.tau
    tau_sq = float(tau @ tau)
    ones = np.ones(tree.n)
    m = tree.D + alpha * np.outer(tau, tau)
    dpinv_e = np.real(lu_solve(m, ones)) - (2.0 / (alpha * tau_sq**2)) * tau
    u = 0.5 * (dpinv_e - (float(ones @ dpinv_e) / 4.0) * tau)

    quad = float(tau @ tree.L @ tau)
    if abs(quad) > 1e-7 * max(1.0, frobenius(tree.L) * tau_sq):
        closed = 0.5 * (tree.L @ tau / tau_sq - (quad / (2.0 * tau_sq**2)) * tau)
        gap = float(np.max(np.abs(u - closed)))
        if gap > 1e-9 * max(1.0, float(np.max(np.abs(u)))):
            raise VerificationError(
                f"definition and closed-form u disagree by {gap:.3e} on a valid tree"
            )

    rebuilt = -tree.L / 2.0 + np.outer(u, tau) + np.outer(tau, u)
    direct = tree_pinv(tree, alpha, tol)
    gap = frobenius(rebuilt - direct)
    if gap > tol.scaled_for(tree.D).residual_abs * max(1.0, frobenius(direct)):
        raise VerificationError(f"reconstruction differs from tree_pinv by {gap:.3e}")
    return u, rebuilt


# --------------------------------------------------------------------------
# odd wheels


@dataclass(frozen=True)
class WheelGraph:
    """Distance data of the wheel on n vertices, n odd and at least 5.

    Vertex 0 is the hub, vertices 1..n-1 the rim cycle. D has hub row e^t and
    rim block circ(u) with u = (0, 1, 2, ..., 2, 1): rim distances cap at 2
    because any detour through the hub has length 2. a spans the null space
    of D, z24 holds the 24-scaled integer vector describing the inverse of
    D + a a^t, and v is the alternating rim generator with a a^t rim block
    circ(v).
    """

    n: int
    D: np.ndarray
    a: np.ndarray
    z24: np.ndarray
    v: np.ndarray

    @property
    def z(self) -> np.ndarray:
        return self.z24 / 24.0


def _require_odd_wheel(n: int) -> None:
    if n < 5 or n % 2 == 0:
        raise PreconditionError(f"wheel size must be odd and at least 5, got {n}")


def wheel_z(n: int) -> np.ndarray:
    """24-scaled integer z vector of the odd wheel, length n-1.

    Entries follow a three-branch closed form in k with a midpoint case split
    on n mod 4, and the symmetry z24[k] = z24[n-1-k] fills the upper half.
    All branches are integer-valued on the 24 scale, so the arithmetic here
    is exact.
    """
    _require_odd_wheel(n)
    z24 = [0] * (n - 1)
    for k in range((n - 1) // 2):
        if k % 2 == 0:
            z24[k] = 2 * (-6 * (n - 1) * k * k + 6 * (n - 1) ** 2 * k - n**3 + 3 * n**2 + n + 9)
        else:
            z24[k] = 2 * (6 * (n - 1) * k * k - 6 * (n - 1) ** 2 * k + n**3 - 3 * n**2 + 5 * n - 15)
    mid = (n - 1) // 2
    if n % 4 == 1:
        z24[mid] = n**3 - 3 * n**2 + 11 * n + 15
    else:
        z24[mid] = -(n**3) + 3 * n**2 + n - 27
    for k in range(mid + 1, n - 1):
        z24[k] = z24[n - 1 - k]
    return np.array(z24, dtype=np.int64)


def wheel_z_identities(n: int, z24=None) -> dict[str, bool]:
    """Exact integer checks of the z vector identities.

    All checks run on the 24-scaled integers, so every equality is exact.
    Passing an explicit z24 lets a caller probe the checker with a perturbed
    vector; by default the vector comes from wheel_z. Keys:

      sum_zero          e^t z = 0
      parity_sum_even   sum of even-index entries equals 12(n-1)
      parity_sum_odd    sum of odd-index entries equals -12(n-1)
      symmetry          z24[k] == z24[n-1-k]
      recurrence_even   2 z24[k] + z24[k-1] + z24[k+1] = 48(n-1), even k in [2, n-3]
      recurrence_odd    same combination vanishes for odd k in [1, n-3]
      boundary_even     2*sum(even k in [2, n-3]) - z24[1] - z24[n-2] = 24(n-1)(n-2)
      boundary_odd      2*sum(odd k in [1, n-4]) - z24[0] - z24[n-3] = -24(n-1)
      core_product      circ(u + v) z24 = 24((n-1)^2 e_0 - (n-1) e), the rim
                        block row of (D + a a^t) times its inverse

    The core product uses the generator u + v because the rim block of
    D + a a^t is circ(u) + circ(v).
    """
    _require_odd_wheel(n)
    if z24 is None:
        z24 = wheel_z(n)
    z24 = [int(value) for value in np.asarray(z24)]
    m = n - 1
    if len(z24) != m:
        raise PreconditionError(f"z vector must have length {m}, got {len(z24)}")

    even_sum = sum(z24[k] for k in range(0, m, 2))
    odd_sum = sum(z24[k] for k in range(1, m, 2))
    rim = [min(k, m - k, 2) + (-1) ** k for k in range(m)]
    product = circ_mul(rim, z24).tolist()
    expected = [-24 * m] * m
    expected[0] = 24 * (m * m - m)
    report = {
        "sum_zero": sum(z24) == 0,
        "parity_sum_even": even_sum == 12 * m,
        "parity_sum_odd": odd_sum == -12 * m,
        "symmetry": all(z24[k] == z24[m - k] for k in range(1, m)),
        "recurrence_even": all(
            2 * z24[k] + z24[k - 1] + z24[k + 1] == 48 * m for k in range(2, n - 2, 2)
        ),
        "recurrence_odd": all(
            2 * z24[k] + z24[k - 1] + z24[k + 1] == 0 for k in range(1, n - 2, 2)
        ),
        "boundary_even": 2 * sum(z24[k] for k in range(2, n - 2, 2)) - z24[1] - z24[m - 1]
        == 24 * m * (n - 2),
        "boundary_odd": 2 * sum(z24[k] for k in range(1, n - 3, 2)) - z24[0] - z24[m - 2]
        == -24 * m,
        "core_product": product == expected,
    }
    return report


def wheel_build(n: int, tol: Tolerance = DEFAULT_TOL) -> WheelGraph:
    """Construct the wheel distance data and verify its null space.

    Asserts D a = 0 exactly (all entries are small integers, so the float
    products are exact) and rank(D) = n - 1 through the singular value
    factorization.
    """
    _require_odd_wheel(n)
    m = n - 1
    u = np.array([min(k, m - k, 2) for k in range(m)], dtype=float)
    d = np.zeros((n, n))
    d[0, 1:] = 1.0
    d[1:, 0] = 1.0
    d[1:, 1:] = circ_materialize(u).real
    a = np.zeros(n)
    a[1:] = [(-1.0) ** (k + 1) for k in range(m)]
    v = np.array([(-1.0) ** k for k in range(m)])
    if float(np.max(np.abs(d @ a))) != 0.0:
        raise VerificationError("D a = 0 failed in exact integer arithmetic")
    rank = svd(d, tol).rank
    if rank != n - 1:
        raise VerificationError(f"wheel distance matrix has rank {rank}, expected {n - 1}")
    return WheelGraph(n=n, D=d, a=a, z24=wheel_z(n), v=v)


def wheel_pinv(n: int, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form {1,3,4}-inverse and Moore-Penrose inverse of the wheel.

    The completed matrix D + a a^t is invertible with

        (D + a a^t)^-1 = [[-2(n-1)(n-3), (n-1) e^t], [(n-1) e, circ(z)]] / (n-1)^2,

    and this inverse is a {1,3,4}-inverse of D. Subtracting the null-space
    dyad yields the pseudoinverse:

        D^+ = (D + a a^t)^-1 - a a^t / (n-1)^2,

    whose rim block is circ(z - v)/(n-1)^2 since a a^t has rim block circ(v).
    Both claims are verified before returning: the product against D + a a^t
    must be the identity to 1e-10, and D^+ must pass the Penrose residuals.
    """
    wheel = wheel_build(n, tol)
    m = n - 1
    inv134 = np.empty((n, n))
    inv134[0, 0] = -2.0 * (n - 3) / m
    inv134[0, 1:] = 1.0 / m
    inv134[1:, 0] = 1.0 / m
    inv134[1:, 1:] = circ_materialize(wheel.z24.astype(float) / 24.0).real / m**2
    completed = wheel.D + np.outer(wheel.a, wheel.a)
    residual = frobenius(completed @ inv134 - np.eye(n))
    if residual > 1e-10 * max(1.0, frobenius(completed)):
        raise VerificationError(f"(D + a a^t) inverse check failed: residual {residual:.3e}")
    dpinv = inv134 - np.outer(wheel.a, wheel.a) / m**2
    report = penrose_residuals(wheel.D, dpinv, tol.scaled_for(wheel.D))
    if not report.passed:
        name, value = report.worst
        raise VerificationError(f"wheel pseudoinverse failed {name} with residual {value:.3e}")
    return inv134, dpinv


def wheel_properties(n: int, tol: Tolerance = DEFAULT_TOL) -> dict[str, bool]:
    """Structural identities tying the wheel inverse to a Laplacian.

    With M = D + a a^t, P = I - a a^t/(n-1) the projector onto the range of
    D, and w = (5-n, 1, ..., 1)/4:

      eigvector          M^-1 a = a/(n-1), max deviation at most 1e-10
      projector_product  D^+ = M^-1 P
      laplacian_kernel   (recovered L~) e = 0
      laplacian_rank     rank(L~) = n - 2
      laplacian_psd      min eigenvalue of L~ at least -1e-9 ||L~||_F
      pinv_split         D^+ = -L~/2 + (4/(n-1)) w w^t
      shifted_nsd        P (M^-1 - (4/(n-1)) w w^t) P has max eigenvalue
                         at most 1e-9 times its norm scale

    where L~ = -2 (M^-1 - (4/(n-1)) w w^t) P.
    """
    wheel = wheel_build(n, tol)
    inv134, dpinv = wheel_pinv(n, tol)
    m = n - 1
    proj = np.eye(n) - np.outer(wheel.a, wheel.a) / m
    w = np.full(n, 0.25)
    w[0] = (5.0 - n) / 4.0
    shifted = inv134 - (4.0 / m) * np.outer(w, w)
    lap = -2.0 * shifted @ proj
    lap_scale = max(1.0, frobenius(lap))
    lap_eigs = hermitian_eigenvalues(lap, tol)
    projected = proj @ shifted @ proj
    projected_eigs = hermitian_eigenvalues(projected, tol)
    report = {
        "eigvector": float(np.max(np.abs(inv134 @ wheel.a - wheel.a / m))) <= 1e-10,
        "projector_product": frobenius(dpinv - inv134 @ proj)
        <= tol.scaled_for(wheel.D).residual_abs * max(1.0, frobenius(dpinv)),
        "laplacian_kernel": float(np.max(np.abs(lap @ np.ones(n)))) <= 1e-10 * lap_scale,
        "laplacian_rank": int(np.sum(np.abs(lap_eigs) > tol.residual_abs * lap_scale)) == n - 2,
        "laplacian_psd": float(lap_eigs.min()) >= -1e-9 * frobenius(lap),
        "pinv_split": frobenius(dpinv - (-lap / 2.0 + (4.0 / m) * np.outer(w, w)))
        <= tol.scaled_for(wheel.D).residual_abs * max(1.0, frobenius(dpinv)),
        "shifted_nsd": float(projected_eigs.max()) <= 1e-9 * max(1.0, frobenius(projected)),
    }
    return report
