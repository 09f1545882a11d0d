"""Exact and modular linear algebra kernels.

Small dense systems over Q use :class:`fractions.Fraction`.  Large integer
matrices go through :func:`rank_mod_p` (blocked elimination over GF(p) with
float64 BLAS for the trailing updates) or :func:`bareiss` (fraction-free
elimination on ``gmpy2.mpz`` object arrays).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import gmpy2
import numpy as np

# float64 products are exact while (block * (p-1)^2) < 2^53
_FLOAT_EXACT = 2**53


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    M = [[Fraction(x) for x in r] for r in rows]
    if not M:
        return M, []
    n_rows, n_cols = len(M), len(M[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        pr = next((i for i in range(r, n_rows) if M[i][c] != 0), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(n_rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return M, pivots


def nullspace(rows: Sequence[Sequence[Fraction]], n_cols: int | None = None) -> list[list[Fraction]]:
    """Basis of ``{x : M x = 0}``, one vector per free column."""
    if n_cols is None:
        n_cols = len(rows[0])
    R, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][f]
        basis.append(v)
    return basis


def rank_fraction(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[1]) if rows else 0


def solve(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    """Unique solution of a square nonsingular system."""
    n = len(A)
    aug = [list(map(Fraction, A[i])) + [Fraction(b[i])] for i in range(n)]
    R, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("singular system")
    return [R[i][n] for i in range(n)]


def inverse(A: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    n = len(A)
    aug = [list(map(Fraction, A[i])) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("singular matrix")
    return [row[n:] for row in R]


@dataclass
class BareissResult:
    rank: int
    pivots: list          # successive Bareiss pivots (mpz)
    swapped: bool         # a row exchange or a skipped column occurred

    def leading_minors(self) -> list:
        """Leading principal minors; only meaningful when ``swapped`` is False."""
        if self.swapped:
            raise ValueError("row exchanges occurred; pivots are not leading minors")
        return list(self.pivots)


_divexact = np.frompyfunc(gmpy2.divexact, 2, 1)


def _to_mpz(A) -> np.ndarray:
    A = np.asarray(A)
    out = np.empty(A.shape, dtype=object)
    flat = A.ravel()
    out.ravel()[:] = [gmpy2.mpz(int(x)) for x in flat]
    return out


def bareiss(A) -> BareissResult:
    """Fraction-free elimination of an integer matrix.

    Without row exchanges the k-th pivot is the k-th leading principal minor,
    so a symmetric matrix is positive definite iff no exchange happens and
    every pivot is positive.  Symmetric input takes a half-storage path that
    falls back to the general one at the first zero pivot.
    """
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError("matrix expected")
    if A.shape[0] == A.shape[1] and A.size and np.array_equal(A, A.T):
        res = _bareiss_symmetric(A)
        if res is not None:
            return res
    return _bareiss_general(A)


def _bareiss_symmetric(A) -> BareissResult | None:
    n = A.shape[0]
    rows = [_to_mpz(A[i, i:]) for i in range(n)]
    prev = gmpy2.mpz(1)
    pivots = []
    for k in range(n):
        rk = rows[k]
        piv = rk[0]
        if piv == 0:
            return None
        pivots.append(piv)
        for i in range(k + 1, n):
            rows[i] = _divexact(piv * rows[i] - rk[i - k] * rk[i - k:], prev)
        prev = piv
    return BareissResult(n, pivots, False)


def _bareiss_general(A) -> BareissResult:
    M = _to_mpz(A)
    n_rows, n_cols = M.shape
    prev = gmpy2.mpz(1)
    pivots = []
    swapped = False
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        nz = [i for i in range(r, n_rows) if M[i, c] != 0]
        if not nz:
            swapped = True
            continue
        if nz[0] != r:
            M[[r, nz[0]]] = M[[nz[0], r]]
            swapped = True
        piv = M[r, c]
        pivots.append(piv)
        if r + 1 < n_rows and c + 1 < n_cols:
            sub = M[r + 1:, c + 1:]
            M[r + 1:, c + 1:] = _divexact(piv * sub - np.outer(M[r + 1:, c], M[r, c + 1:]), prev)
        M[r + 1:, c] = 0
        prev = piv
        r += 1
    return BareissResult(r, pivots, swapped)


def rank_mod_p(A, p: int, block: int = 128) -> int:
    """Rank of an integer matrix reduced mod ``p``.

    Right-looking blocked elimination: each panel of ``block`` columns is
    eliminated one column at a time, and the trailing matrix is updated with
    a single float64 matrix product, exact because every partial sum stays
    below 2^53.
    """
    if block * (p - 1) ** 2 >= _FLOAT_EXACT:
        raise ValueError(f"prime {p} too large for exact float64 updates with block {block}")
    R = np.asarray(A, dtype=np.int64) % p
    rank = 0
    while R.shape[0] and R.shape[1]:
        b = min(block, R.shape[1])
        W = R[:, :b].copy()
        m = W.shape[0]
        L = np.zeros((m, b), dtype=np.int64)
        free = np.ones(m, dtype=bool)
        piv = []
        for c in range(b):
            cand = np.flatnonzero(free & (W[:, c] != 0))
            if cand.size == 0:
                continue
            pr = int(cand[0])
            k = len(piv)
            piv.append(pr)
            free[pr] = False
            L[pr, k] = 1
            rows = np.flatnonzero(free)
            if rows.size:
                f = (W[rows, c] * pow(int(W[pr, c]), p - 2, p)) % p
                L[rows, k] = f
                W[rows] = (W[rows] - (f[:, None] * W[pr]) % p) % p
        k = len(piv)
        rest = R[:, b:]
        if k == 0:
            R = rest
            continue
        rank += k
        rest_rows = np.flatnonzero(free)
        if rest.shape[1] == 0 or rest_rows.size == 0:
            R = rest[rest_rows]
            continue
        piv = np.array(piv)
        Lpp = L[piv, :k]
        U = rest[piv].copy()
        for q in range(1, k):
            U[q] = (U[q] - (Lpp[q, :q] @ U[:q]) % p) % p
        upd = np.fmod(L[rest_rows, :k].astype(np.float64) @ U.astype(np.float64), p).astype(np.int64)
        R = (rest[rest_rows] - upd) % p
    return rank


def rref_mod_p(A, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(p); for moderate sizes."""
    R = np.asarray(A, dtype=np.int64) % p
    n_rows, n_cols = R.shape
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            R[[r, pr]] = R[[pr, r]]
        R[r] = (R[r] * pow(int(R[r, c]), p - 2, p)) % p
        f = R[:, c].copy()
        f[r] = 0
        rows = np.flatnonzero(f)
        if rows.size:
            R[rows] = (R[rows] - (f[rows, None] * R[r]) % p) % p
        pivots.append(c)
        r += 1
    return R, pivots


def nullspace_mod_p(A, p: int) -> np.ndarray:
    """Rows form a basis of ``{x : A x = 0}`` over GF(p)."""
    A = np.asarray(A, dtype=np.int64)
    n_cols = A.shape[1]
    R, pivots = rref_mod_p(A, p)
    free = [c for c in range(n_cols) if c not in set(pivots)]
    N = np.zeros((len(free), n_cols), dtype=np.int64)
    for k, f in enumerate(free):
        N[k, f] = 1
        for i, pc in enumerate(pivots):
            N[k, pc] = (-R[i, f]) % p
    return N
