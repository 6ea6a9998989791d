"""Dense Hermitian kernels generic over the binary64 and double-double modes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .xprec import (
    DDComplex,
    DDReal,
    Mode,
    as_ddcomplex,
    conj_transpose,
    dd_sqrt,
    get_mode,
    matmul,
    quick_two_sum,
    split,
    two_sum,
)


class NonConvergenceError(RuntimeError):
    pass


class FactorizationError(RuntimeError):
    pass


def _hi(x) -> np.ndarray:
    """Leading binary64 part of a real mode array."""
    return x.hi if isinstance(x, DDReal) else np.asarray(x)


def _real_part(x):
    return x.re if isinstance(x, DDComplex) else x.real


def round_robin_schedule(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint index pairs for the n-1 rounds of a parallel Jacobi sweep."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[k], players[m - 1 - k]) for k in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a >= 0 and b >= 0]
        p = np.array([a for a, _ in pairs], dtype=int)
        q = np.array([b for _, b in pairs], dtype=int)
        rounds.append((p, q))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


@dataclass
class JacobiResult:
    eigenvalues: Any  # real mode array, descending
    eigenvectors: Any  # complex mode array, columns
    sweeps: int
    off_norm: float
    matrix_norm: float


def jacobi_eigh(A, mode: Mode | str, tol: float | None = None, max_sweeps: int = 60,
                precondition: bool = True) -> JacobiResult:
    """Eigen-decomposition of a Hermitian matrix by cyclic two-sided Jacobi.

    Rotations of each round act on disjoint index pairs and are applied
    together (round-robin ordering), so a sweep costs n-1 vectorized rounds.
    Stops when the off-diagonal Frobenius norm falls below ``tol·‖A‖_F``.

    In double-double mode the matrix is first rotated by a binary64
    eigenbasis (re-orthonormalized in double-double), which leaves the
    large-eigenvalue part nearly diagonal and saves several sweeps.
    """
    m = get_mode(mode)
    if tol is None:
        tol = 1e-30 if m.is_dd() else 1e-14
    if m.is_dd():
        return _jacobi_dd(as_ddcomplex(A), tol, max_sweeps, precondition)
    return _jacobi_f64(np.array(A, dtype=np.complex128), tol, max_sweeps)


def _check_sweeps(sweeps, max_sweeps, off, norm):
    if sweeps >= max_sweeps:
        raise NonConvergenceError(
            f"Jacobi did not converge in {max_sweeps} sweeps; "
            f"off-diagonal residual {off:.3e} (relative {off / norm:.3e})"
        )


def _off_norm_f64(a2: np.ndarray) -> float:
    a2 = a2.copy()
    np.fill_diagonal(a2, 0.0)
    return float(np.sqrt(a2.sum()))


def _sorted(lam, V, lam_f):
    order = np.lexsort((np.arange(len(lam_f)), -lam_f))
    return lam[order], V[:, order]


# -- binary64 ---------------------------------------------------------------


def _jacobi_f64(A: np.ndarray, tol: float, max_sweeps: int) -> JacobiResult:
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    norm = float(np.linalg.norm(A))
    off = _off_norm_f64(np.abs(A) ** 2)
    sweeps = 0
    rounds = round_robin_schedule(n)
    skip = 0.5 * tol * norm / max(n, 1)
    while off > tol * norm:
        _check_sweeps(sweeps, max_sweeps, off, norm)
        for p, q in rounds:
            _rotate_round_f64(A, V, p, q, skip)
        A = 0.5 * (A + A.conj().T)
        sweeps += 1
        off = _off_norm_f64(np.abs(A) ** 2)
    lam = A.diagonal().real.copy()
    lam, V = _sorted(lam, V, lam)
    return JacobiResult(lam, V, sweeps, off, norm)


def _rotation_f64(app, aqq, apq):
    b = np.abs(apq)
    zero = b == 0.0
    sb = np.where(zero, 1.0, b)
    e = np.where(zero, 1.0, apq / sb)
    zeta = (aqq - app) / (2.0 * sb)
    with np.errstate(over="ignore"):
        t = np.sign(zeta + (zeta == 0)) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
    t = np.where(np.abs(zeta) > 1e150, 0.5 / np.where(zeta == 0, 1.0, zeta), t)
    t = np.where(zero, 0.0, t)
    c = 1.0 / np.sqrt(1.0 + t * t)
    return t, c, e * (t * c), b


def _rotate_round_f64(A, V, p, q, skip):
    apq = A[p, q]
    keep = np.abs(apq) > skip
    if not keep.any():
        return
    p, q, apq = p[keep], q[keep], apq[keep]
    app, aqq = A[p, p].real, A[q, q].real
    t, c, se, b = _rotation_f64(app, aqq, apq)
    cr, ser = c[:, None], se[:, None]
    P, Q = A[p, :], A[q, :]
    A[p, :] = cr * P - ser * Q
    A[q, :] = np.conj(ser) * P + cr * Q
    cc, sec = c[None, :], se[None, :]
    for M in (A, V):
        P, Q = M[:, p], M[:, q]
        M[:, p] = cc * P - np.conj(sec) * Q
        M[:, q] = sec * P + cc * Q
    A[p, q] = 0.0
    A[q, p] = 0.0
    A[p, p] = app - t * b
    A[q, q] = aqq + t * b


# -- double-double ----------------------------------------------------------


def _prep(h, lo):
    sh, sl = split(h)
    return (h, lo, sh, sl)


def _dot_terms(terms):
    """Σ a·b over pre-split double-double operand pairs, as a (hi, lo) pair."""
    s_hi = s_lo = None
    for (ah, al, ahh, ahl), (bh, bl, bhh, bhl) in terms:
        p = ah * bh
        e = ((ahh * bhh - p) + ahh * bhl + ahl * bhh) + ahl * bhl + (ah * bl + al * bh)
        if s_hi is None:
            s_hi, s_lo = p, e
        else:
            s_hi, t = two_sum(s_hi, p)
            s_lo = s_lo + (e + t)
    return quick_two_sum(s_hi, s_lo)


def _rotate_pair(P, Q, c, sr, si):
    """(c·P − s·Q, conj(s)·P + c·Q) with s = sr + i·si on double-double arrays.

    ``P``/``Q`` are (re_hi, re_lo, im_hi, im_lo) tuples; coefficients are
    (hi, lo) pairs broadcasting against them.
    """
    pr, pi = _prep(P[0], P[1]), _prep(P[2], P[3])
    qr, qi = _prep(Q[0], Q[1]), _prep(Q[2], Q[3])
    c, sr, si = _prep(*c), _prep(*sr), _prep(*si)
    msr = tuple(-v for v in sr)
    msi = tuple(-v for v in si)
    npr = _dot_terms([(c, pr), (msr, qr), (si, qi)])
    npi = _dot_terms([(c, pi), (msr, qi), (msi, qr)])
    nqr = _dot_terms([(sr, pr), (si, pi), (c, qr)])
    nqi = _dot_terms([(sr, pi), (msi, pr), (c, qi)])
    return (npr[0], npr[1], npi[0], npi[1]), (nqr[0], nqr[1], nqi[0], nqi[1])


def _dd_orthonormalize(Q: np.ndarray) -> DDComplex:
    """Newton-Schulz steps Q ← Q(3I − Q*Q)/2 in double-double."""
    n = Q.shape[1]
    Qd = as_ddcomplex(Q)
    three = as_ddcomplex(3.0 * np.eye(n))
    for _ in range(2):
        G = matmul(conj_transpose(Qd), Qd)
        Qd = matmul(Qd, three - G) * 0.5
    return Qd


def _jacobi_dd(A: DDComplex, tol: float, max_sweeps: int, precondition: bool) -> JacobiResult:
    n = A.shape[0]
    if precondition and n > 2:
        _, Q = np.linalg.eigh(A.to_complex())
        Qd = _dd_orthonormalize(Q[:, ::-1])
        A = matmul(conj_transpose(Qd), matmul(A, Qd))
        V = Qd
    else:
        V = as_ddcomplex(np.eye(n))
    # W stacks A (rows 0..n-1) over V (rows n..2n-1); columns rotate together
    W = [np.concatenate([x, y]) for x, y in zip(_parts(A), _parts(V))]
    _hermitize_dd(W, n)
    a2 = W[0][:n] ** 2 + W[2][:n] ** 2
    norm = float(np.sqrt(a2.sum()))
    off = _off_norm_f64(a2)
    rounds = round_robin_schedule(n)
    skip = 0.5 * tol * norm / max(n, 1)
    sweeps = 0
    while off > tol * norm:
        _check_sweeps(sweeps, max_sweeps, off, norm)
        for p, q in rounds:
            _rotate_round_dd(W, n, p, q, skip)
        _hermitize_dd(W, n)
        sweeps += 1
        a2 = W[0][:n] ** 2 + W[2][:n] ** 2
        off = _off_norm_f64(a2)
    d = np.arange(n)
    lam = DDReal._raw(W[0][d, d].copy(), W[1][d, d].copy())
    V = DDComplex(DDReal._raw(W[0][n:].copy(), W[1][n:].copy()),
                  DDReal._raw(W[2][n:].copy(), W[3][n:].copy()))
    lam, V = _sorted(lam, V, lam.to_float())
    return JacobiResult(lam, V, sweeps, off, norm)


def _parts(X: DDComplex):
    return (np.array(X.re.hi, dtype=float), np.array(X.re.lo, dtype=float),
            np.array(X.im.hi, dtype=float), np.array(X.im.lo, dtype=float))


def _hermitize_dd(W, n: int) -> None:
    A = DDComplex(DDReal._raw(W[0][:n], W[1][:n]), DDReal._raw(W[2][:n], W[3][:n]))
    H = (A + A.conj().T) * 0.5
    W[0][:n], W[1][:n], W[2][:n], W[3][:n] = H.re.hi, H.re.lo, H.im.hi, H.im.lo
    d = np.arange(n)
    W[2][d, d] = 0.0
    W[3][d, d] = 0.0


def _as_col(x: DDReal):
    return (x.hi[:, None], x.lo[:, None])


def _as_row(x: DDReal):
    return (x.hi[None, :], x.lo[None, :])


def _rotate_round_dd(W, n: int, p: np.ndarray, q: np.ndarray, skip: float) -> None:
    keep = np.hypot(W[0][p, q], W[2][p, q]) > skip
    if not keep.any():
        return
    p, q = p[keep], q[keep]
    app = DDReal._raw(W[0][p, p], W[1][p, p])
    aqq = DDReal._raw(W[0][q, q], W[1][q, q])
    apq = DDComplex(DDReal._raw(W[0][p, q], W[1][p, q]), DDReal._raw(W[2][p, q], W[3][p, q]))
    b = abs(apq)
    e = apq / b
    zeta = (aqq - app) / (b * 2.0)
    zh = zeta.hi
    big = np.abs(zh) > 1e150
    zc = DDReal._raw(np.where(big, 0.0, zeta.hi), np.where(big, 0.0, zeta.lo))
    root = dd_sqrt(zc * zc + 1.0)
    sgn = np.where(zh >= 0, 1.0, -1.0)
    t = 1.0 / (zc + root * sgn)
    if big.any():
        tbig = 0.5 / DDReal._raw(np.where(big, zeta.hi, 1.0), np.where(big, zeta.lo, 0.0))
        t = DDReal._raw(np.where(big, tbig.hi, t.hi), np.where(big, tbig.lo, t.lo))
    c = 1.0 / dd_sqrt(t * t + 1.0)
    s = t * c
    se = e * s
    # rows of A: B = U* A
    P = tuple(x[p, :] for x in W)
    Q = tuple(x[q, :] for x in W)
    newP, newQ = _rotate_pair(P, Q, _as_col(c), _as_col(se.re), _as_col(se.im))
    for x, yp, yq in zip(W, newP, newQ):
        x[p, :] = yp
        x[q, :] = yq
    # columns of the stacked [A; V]: W ← W U
    P = tuple(x[:, p] for x in W)
    Q = tuple(x[:, q] for x in W)
    newP, newQ = _rotate_pair(P, Q, _as_row(c), _as_row(se.re), _as_row(-se.im))
    for x, yp, yq in zip(W, newP, newQ):
        x[:, p] = yp
        x[:, q] = yq
    tb = t * b
    new_pp = app - tb
    new_qq = aqq + tb
    for x in W:
        x[p, q] = 0.0
        x[q, p] = 0.0
    W[0][p, p], W[1][p, p] = new_pp.hi, new_pp.lo
    W[0][q, q], W[1][q, q] = new_qq.hi, new_qq.lo
    W[2][p, p] = W[3][p, p] = 0.0
    W[2][q, q] = W[3][q, q] = 0.0


# --------------------------------------------------------------------------
# Cholesky
# --------------------------------------------------------------------------


def cholesky(A, mode: Mode | str):
    """Lower-triangular L with A = L·L* for Hermitian positive definite A."""
    m = get_mode(mode)
    A = as_ddcomplex(A).copy() if m.is_dd() else np.array(A, dtype=np.complex128)
    n = A.shape[0]
    L = m.zeros((n, n), complex_=True)
    min_pivot = np.inf
    for k in range(n):
        d = _real_part(A[k, k])
        dh = float(_hi(d))
        min_pivot = min(min_pivot, dh)
        if not dh > 0:
            raise FactorizationError(
                f"matrix not positive definite: pivot {k} is {dh:.3e} (smallest pivot {min_pivot:.3e})"
            )
        r = m.sqrt(d)
        L[k, k] = m.complex(r)
        if k + 1 < n:
            col = A[k + 1 :, k] / r
            L[k + 1 :, k] = col
            A[k + 1 :, k + 1 :] = A[k + 1 :, k + 1 :] - col.reshape(-1, 1) * col.conj().reshape(1, -1)
    return L


def cholesky_solve(L, b, mode: Mode | str):
    """Solve L·L*·x = b by forward and back substitution."""
    m = get_mode(mode)
    y = as_ddcomplex(b).copy() if m.is_dd() else np.array(b, dtype=np.complex128)
    n = len(y)
    for k in range(n):
        yk = y[k] / L[k, k]
        y[k] = yk
        if k + 1 < n:
            y[k + 1 :] = y[k + 1 :] - L[k + 1 :, k] * yk
    for k in range(n - 1, -1, -1):
        xk = y[k] / L[k, k]
        y[k] = xk
        if k > 0:
            y[:k] = y[:k] - L[k, :k].conj() * xk
    return y
