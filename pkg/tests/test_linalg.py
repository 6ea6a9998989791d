from __future__ import annotations

import mpmath
import numpy as np
import pytest

from hardybound.linalg import (
    FactorizationError,
    NonConvergenceError,
    cholesky,
    cholesky_solve,
    jacobi_eigh,
    round_robin_schedule,
)
from hardybound.xprec import DD

mpmath.mp.dps = 50


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (X + X.conj().T) / 2


def test_round_robin_covers_all_pairs_once():
    for n in (5, 8):
        seen = set()
        for p, q in round_robin_schedule(n):
            assert len(set(p) | set(q)) == 2 * len(p)  # disjoint within a round
            seen |= {tuple(sorted(pq)) for pq in zip(p.tolist(), q.tolist())}
        assert len(seen) == n * (n - 1) // 2


@pytest.mark.parametrize("n", [1, 2, 7, 30])
def test_jacobi_f64_matches_numpy(n):
    A = random_hermitian(n, n)
    res = jacobi_eigh(A, "f64")
    assert np.all(np.diff(res.eigenvalues) <= 0)
    assert np.allclose(res.eigenvalues, np.linalg.eigvalsh(A)[::-1], atol=1e-12)
    V = res.eigenvectors
    assert np.allclose(A @ V, V * res.eigenvalues, atol=1e-11)
    assert np.allclose(V.conj().T @ V, np.eye(n), atol=1e-12)


def test_jacobi_dd_high_relative_accuracy_on_hilbert_matrix():
    n = 10
    H = np.array([[1.0 / (i + j + 1) for j in range(n)] for i in range(n)])
    # the binary64 entries are the input: the oracle diagonalizes exactly those
    Hm = mpmath.matrix(n, n)
    for i in range(n):
        for j in range(n):
            Hm[i, j] = mpmath.mpf(H[i, j])
    want = sorted(mpmath.eigsy(Hm)[0], reverse=True)
    res = jacobi_eigh(H.astype(complex), "dd")
    got = res.eigenvalues
    for k in range(n):
        g = mpmath.mpf(float(got.hi[k])) + mpmath.mpf(float(got.lo[k]))
        # the smallest eigenvalue is ~1e-13; relative accuracy is kept anyway
        assert abs(g - want[k]) / want[k] < 1e-16


def test_jacobi_nonconvergence_reported():
    with pytest.raises(NonConvergenceError):
        jacobi_eigh(random_hermitian(12, 3), "f64", tol=1e-300, max_sweeps=2)


@pytest.mark.parametrize("mode", ["f64", "dd"])
def test_cholesky_solve(mode):
    rng = np.random.default_rng(7)
    X = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    A = X @ X.conj().T + 12 * np.eye(12)
    b = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    L = cholesky(DD.complex(A) if mode == "dd" else A, mode)
    x = cholesky_solve(L, DD.complex(b) if mode == "dd" else b, mode)
    x = x.to_complex() if mode == "dd" else x
    assert np.allclose(x, np.linalg.solve(A, b), rtol=1e-12, atol=1e-13)


def test_cholesky_rejects_indefinite():
    with pytest.raises(FactorizationError):
        cholesky(np.diag([1.0, -1.0]).astype(complex), "f64")
