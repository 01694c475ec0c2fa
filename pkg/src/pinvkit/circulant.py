"""Circulant matrices and their closed-form pseudoinverses.

A circulant is stored by its generator, the first row; row i of the
materialized matrix is the generator cyclically shifted right i places.
Equivalently circ(c) = sum_k c[k] Pi^k for the one-step shift matrix Pi.
Diagonalization by the unitary DFT turns every question about circ(c) into
one about its eigenvalue vector, and the closed forms below (two-term,
support splitting, zero-sum shift, block pattern) are checked against that
spectral route.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .matrix import (
    DEFAULT_TOL,
    PreconditionError,
    Tolerance,
    as_vector,
)


@dataclass(frozen=True)
class Circulant:
    """A circulant matrix held as its generator (first row), n >= 2."""

    gen: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "gen", as_vector(self.gen, min_len=2))

    @property
    def n(self) -> int:
        return self.gen.shape[0]

    def materialize(self) -> np.ndarray:
        return circ_materialize(self.gen)

    def transpose(self) -> "Circulant":
        return Circulant(rho(self.gen))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a circulant and the index set of its nonzero ones."""

    values: np.ndarray
    support: tuple[int, ...]


def circ_materialize(gen) -> np.ndarray:
    """Dense matrix with entry (i, j) = gen[(j - i) mod n]."""
    gen = as_vector(gen, min_len=2)
    n = gen.shape[0]
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    out = gen[idx]
    out.flags.writeable = False
    return out


def rho(gen) -> np.ndarray:
    """Generator of the transpose: index 0 fixed, the rest reversed."""
    gen = as_vector(gen, min_len=2)
    return np.roll(gen[::-1], 1)


def shift_power(n: int, l: int) -> np.ndarray:
    """The matrix Pi^l, the l-step cyclic shift; Pi^n = I."""
    if n < 2:
        raise PreconditionError(f"need n >= 2, got {n}")
    if not 0 <= l < n:
        raise PreconditionError(f"need 0 <= l < n, got l = {l}")
    gen = np.zeros(n, dtype=np.complex128)
    gen[l] = 1.0
    return circ_materialize(gen)


def circ_mul(a, b) -> np.ndarray:
    """Generator of circ(a) @ circ(b), the cyclic convolution of a and b.

    Computed with Python scalars so integer generators multiply exactly.
    """
    a_list = a.tolist() if isinstance(a, np.ndarray) else list(a)
    b_list = b.tolist() if isinstance(b, np.ndarray) else list(b)
    n = len(a_list)
    if len(b_list) != n:
        raise PreconditionError(
            f"generator lengths differ: {n} vs {len(b_list)}"
        )
    out = [
        sum(a_list[j] * b_list[(i - j) % n] for j in range(n))
        for i in range(n)
    ]
    return np.asarray(out)


@lru_cache(maxsize=32)
def _fourier_matrix(n: int) -> np.ndarray:
    k = np.arange(n)
    f = np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)
    f.flags.writeable = False
    return f


def circ_spectrum(gen, tol: Tolerance = DEFAULT_TOL) -> Spectrum:
    """Eigenvalues lambda_k = sum_l gen[l] exp(2 pi i k l / n).

    circ(gen) = conj(F) diag(lambda) F for the unitary DFT matrix F. The
    support collects indices with |lambda_k| above residual_abs relative to
    the largest eigenvalue magnitude.
    """
    gen = as_vector(gen, min_len=2)
    n = gen.shape[0]
    values = np.sqrt(n) * (np.conj(_fourier_matrix(n)) @ gen)
    magnitudes = np.abs(values)
    cutoff = tol.residual_abs * float(magnitudes.max(initial=0.0))
    support = tuple(int(i) for i in np.nonzero(magnitudes > cutoff)[0])
    return Spectrum(values, support)


def generator_from_spectrum(values) -> np.ndarray:
    """Inverse transform: gen = (1/sqrt(n)) F @ values."""
    values = as_vector(values, min_len=2)
    n = values.shape[0]
    return (_fourier_matrix(n) @ values) / np.sqrt(n)


def circ_pinv_spectral(gen, tol: Tolerance = DEFAULT_TOL) -> Circulant:
    """Pseudoinverse by inverting the nonzero eigenvalues."""
    spec = circ_spectrum(gen, tol)
    inverted = np.zeros_like(spec.values)
    idx = list(spec.support)
    inverted[idx] = 1.0 / spec.values[idx]
    return Circulant(generator_from_spectrum(inverted))


def _shift_generator(gen: np.ndarray, l: int) -> np.ndarray:
    """Generator of circ(gen) @ Pi^l."""
    # circ(x) Pi^l = sum_k x[k] Pi^(k+l), so the generator rolls right by l
    return np.roll(gen, l % gen.shape[0])


def two_term_pinv(
    alpha: complex,
    beta: complex,
    n: int,
    k_pos: int = 1,
    tol: Tolerance = DEFAULT_TOL,
) -> Circulant:
    """Pseudoinverse of the two-entry circulant with alpha at position k_pos
    (1-based) and beta cyclically next to it.

    The matrix is Pi^(k_pos-1) (alpha I + beta Pi), so the shift law
    (Pi^l C)^+ = C^+ Pi^(n-l) reduces everything to the k_pos = 1 case.
    That matrix is singular exactly when beta^n = (-1)^n alpha^n; the two
    real-coefficient singular families have closed forms:

      alpha = beta, n even: generator ((-1)^k (n^2 - (2k+1) n + 2) / 2
                            - (-1)^k) / (alpha n^2) at index k
      alpha = -beta:        generator (n - 1 - 2k) / (2 n alpha)

    Anything else goes through the spectral route, which also covers the
    remaining complex singular combinations.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    if alpha == 0 or beta == 0:
        raise PreconditionError("two-term generator needs nonzero alpha and beta")
    if n < 2:
        raise PreconditionError(f"need n >= 2, got {n}")
    if not 1 <= k_pos <= n:
        raise PreconditionError(f"need 1 <= k_pos <= n, got {k_pos}")
    l = k_pos - 1
    k = np.arange(n)
    if alpha == beta and n % 2 == 0:
        w = (-1.0) ** k * (n * n - (2 * k + 1) * n + 2)
        v = (-1.0) ** k
        base = (w / 2.0 - v) / (alpha * n * n)
    elif alpha == -beta:
        base = (n - 1.0 - 2.0 * k) / (2.0 * n * alpha)
    else:
        head = np.zeros(n, dtype=np.complex128)
        head[0] = alpha
        head[1] = beta
        base = circ_pinv_spectral(head, tol).gen
    return Circulant(_shift_generator(np.asarray(base, dtype=np.complex128), (n - l) % n))


def support_split_pinv(
    generators, tol: Tolerance = DEFAULT_TOL
) -> tuple[Circulant, bool]:
    """Pseudoinverse of circ(sum c_k) as the sum of the per-term ones.

    Valid when the eigenvalue support of each c_k avoids the support of
    every other member's transpose generator rho(c_k'). Returns the summed
    pseudoinverse generator and whether the supports cover all indices
    (which makes the summed circulant invertible).
    """
    gens = [as_vector(g, min_len=2) for g in generators]
    if not gens:
        raise PreconditionError("need at least one generator")
    n = gens[0].shape[0]
    if any(g.shape[0] != n for g in gens):
        raise PreconditionError("generators must share one length")
    supports = [set(circ_spectrum(g, tol).support) for g in gens]
    transpose_supports = [set(circ_spectrum(rho(g), tol).support) for g in gens]
    for kp in range(len(gens)):
        for k in range(len(gens)):
            if k == kp:
                continue
            collisions = sorted(supports[k] & transpose_supports[kp])
            if collisions:
                raise PreconditionError(
                    f"supports of members {k} and {kp} (transposed) collide "
                    f"at eigenvalue indices {collisions}"
                )
    total = np.zeros(n, dtype=np.complex128)
    for g in gens:
        total = total + circ_pinv_spectral(g, tol).gen
    covered = set().union(*supports)
    return Circulant(total), covered == set(range(n))


def zero_sum_shift_pinv(
    gen, alpha: complex | None = None, tol: Tolerance = DEFAULT_TOL
) -> Circulant:
    """Pseudoinverse through the all-ones dyad split.

    The mean part of the generator and its zero-sum remainder have disjoint
    eigenvalue supports, so they pseudo-invert independently:

      entry sum t != 0: pinv(zero-sum part) + ones/(n t)
      entry sum t == 0: pinv(gen + alpha ones) - ones/(n^2 alpha),
                        any nonzero alpha

    Both return the pseudoinverse of circ(gen) itself.
    """
    gen = as_vector(gen, min_len=2)
    n = gen.shape[0]
    spec = circ_spectrum(gen, tol)
    ones = np.ones(n, dtype=np.complex128)
    total = complex(np.sum(gen))
    if 0 in spec.support:
        # eigenvalue 0 is the entry sum; nonzero here, so split off the mean
        return Circulant(
            circ_pinv_spectral(gen - (total / n) * ones, tol).gen + ones / (n * total)
        )
    if alpha is None or complex(alpha) == 0:
        raise PreconditionError(
            "zero-sum generator needs a nonzero alpha for the shifted route"
        )
    alpha = complex(alpha)
    return Circulant(
        circ_pinv_spectral(gen + alpha * ones, tol).gen - ones / (n * n * alpha)
    )


def block_pattern_generator(k: int, q: int) -> np.ndarray:
    """Integer generator (k, -1 x k) repeated q times; its circulant C
    satisfies C^2 = n C with n = q (k + 1)."""
    if k < 1 or q < 1:
        raise PreconditionError(f"need positive k and q, got k = {k}, q = {q}")
    return np.asarray(([k] + [-1] * k) * q, dtype=np.int64)


def block_pattern_pinv(
    alpha: complex,
    beta: complex,
    k: int,
    q: int,
    tol: Tolerance = DEFAULT_TOL,
) -> Circulant:
    """Pseudoinverse of circ(alpha ones + beta pattern) for the block
    pattern above: (1/(alpha n^2)) ones + (1/(beta n^2)) pattern.

    The pattern's defining identity C^2 = n C is re-verified in exact
    integer arithmetic on every call.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    if alpha == 0 or beta == 0:
        raise PreconditionError("block pattern needs nonzero alpha and beta")
    base = block_pattern_generator(k, q)
    n = base.shape[0]
    if not np.array_equal(circ_mul(base, base), n * base):
        raise PreconditionError("block pattern failed its defining identity")
    ones = np.ones(n, dtype=np.complex128)
    return Circulant(ones / (alpha * n * n) + base / (beta * n * n))


def block_pattern_coefficients(a: complex, b: complex, k: int) -> tuple[complex, complex]:
    """Coefficients (alpha, beta) so that alpha ones + beta pattern equals
    the circulant with value a on the pattern's k-positions and b elsewhere."""
    if k < 1:
        raise PreconditionError(f"need positive k, got {k}")
    a = complex(a)
    b = complex(b)
    return (a + k * b) / (k + 1), (a - b) / (k + 1)
