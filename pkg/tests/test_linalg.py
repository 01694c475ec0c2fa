"""In-repo SVD and solver checks against their stated accuracy bounds."""

import numpy as np
import pytest

from pinvkit.linalg import (
    SvdFactorization,
    cholesky_factor,
    cholesky_solve,
    hermitian_eigenvalues,
    inverse,
    lu_solve,
    random_unitary,
    svd,
)
from pinvkit.matrix import UNIT_ROUNDOFF, PreconditionError, dagger, frobenius


def _random_complex(rng, m, n):
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


def _assert_factorization(a, f: SvdFactorization):
    m, n = a.shape
    q = min(m, n)
    assert f.u.shape == (m, m) and f.v.shape == (n, n) and f.sigma.shape == (q,)
    assert frobenius(dagger(f.u) @ f.u - np.eye(m)) <= 10 * UNIT_ROUNDOFF * m
    assert frobenius(dagger(f.v) @ f.v - np.eye(n)) <= 10 * UNIT_ROUNDOFF * n
    recon = f.u[:, :q] @ np.diag(f.sigma) @ dagger(f.v[:, :q])
    assert frobenius(recon - a) <= 100 * UNIT_ROUNDOFF * frobenius(a) * max(m, n)
    assert np.all(np.diff(f.sigma) <= 0)
    assert np.all(f.sigma >= 0)


def test_svd_identity():
    f = svd(np.eye(3, dtype=complex))
    assert np.allclose(f.sigma, [1, 1, 1]) and f.rank == 3


def test_svd_zero_matrix():
    f = svd(np.zeros((2, 4), dtype=complex))
    assert np.array_equal(f.sigma, [0.0, 0.0]) and f.rank == 0
    _assert_factorization(np.zeros((2, 4), dtype=complex), f)


def test_svd_diagonal_sorted():
    f = svd(np.array([[3.0, 0.0], [0.0, 4.0]], dtype=complex))
    assert np.allclose(f.sigma, [4.0, 3.0]) and f.rank == 2


@pytest.mark.parametrize("seed", range(12))
def test_svd_random_shapes(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 33)), int(rng.integers(1, 33))
    a = _random_complex(rng, m, n)
    f = svd(a)
    _assert_factorization(a, f)
    assert f.rank == min(m, n)


@pytest.mark.parametrize("seed", range(8))
def test_svd_rank_deficient(seed):
    rng = np.random.default_rng(100 + seed)
    m, n = int(rng.integers(3, 20)), int(rng.integers(3, 20))
    r = int(rng.integers(1, min(m, n)))
    a = _random_complex(rng, m, r) @ _random_complex(rng, r, n)
    f = svd(a)
    _assert_factorization(a, f)
    assert f.rank == r


def test_svd_wide_vs_tall_consistency():
    rng = np.random.default_rng(5)
    a = _random_complex(rng, 4, 9)
    fa, fat = svd(a), svd(dagger(a))
    assert np.allclose(fa.sigma, fat.sigma)


def test_svd_1x1():
    f = svd(np.array([[2 - 2j]]))
    assert np.allclose(f.sigma, [abs(2 - 2j)]) and f.rank == 1
    _assert_factorization(np.array([[2 - 2j]]), f)


def test_lu_solve_and_inverse():
    rng = np.random.default_rng(7)
    for _ in range(10):
        n = int(rng.integers(1, 20))
        a = _random_complex(rng, n, n)
        b = _random_complex(rng, n, 3)
        x = lu_solve(a, b)
        assert frobenius(a @ x - b) <= 1e-10 * max(1.0, frobenius(a) * frobenius(x))
        assert frobenius(a @ inverse(a) - np.eye(n)) <= 1e-10 * max(1.0, frobenius(a) ** 2)


def test_lu_solve_vector_rhs():
    a = np.array([[2.0, 0.0], [0.0, 4.0]], dtype=complex)
    x = lu_solve(a, np.array([2.0, 8.0], dtype=complex))
    assert np.allclose(x, [1.0, 2.0])


def test_lu_solve_singular_raises():
    with pytest.raises(PreconditionError):
        lu_solve(np.ones((3, 3), dtype=complex), np.eye(3, dtype=complex))


def test_cholesky_solves_hpd():
    rng = np.random.default_rng(9)
    for _ in range(8):
        n = int(rng.integers(1, 15))
        g = _random_complex(rng, n + 2, n)
        h = dagger(g) @ g
        low = cholesky_factor(h)
        assert low is not None
        b = _random_complex(rng, n, 2)
        x = cholesky_solve(low, b)
        assert frobenius(h @ x - b) <= 1e-9 * max(1.0, frobenius(h) * frobenius(x))


def test_cholesky_breakdown_on_singular():
    g = np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex)  # rank 1, PSD
    assert cholesky_factor(g) is None
    neg = -np.eye(2, dtype=complex)
    assert cholesky_factor(neg) is None


def test_random_unitary_is_unitary():
    rng = np.random.default_rng(13)
    for n in (1, 2, 5, 16):
        q = random_unitary(rng, n)
        assert frobenius(dagger(q) @ q - np.eye(n)) <= 1e-12 * max(1, n)


def test_hermitian_eigenvalues_match_diagonal():
    d = np.diag([3.0, -1.0, 0.0, 2.5]).astype(complex)
    rng = np.random.default_rng(21)
    q = random_unitary(rng, 4)
    h = q @ d @ dagger(q)
    eig = hermitian_eigenvalues(h)
    assert np.allclose(sorted(eig), sorted([3.0, -1.0, 0.0, 2.5]), atol=1e-12)


def test_hermitian_eigenvalues_zero():
    assert np.array_equal(hermitian_eigenvalues(np.zeros((3, 3))), np.zeros(3))
