from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from majorana_u35 import linalg

P = 1048583


def int_matrix(max_side=6, lo=-3, hi=3):
    # Hadamard bound (sqrt(6) * 3) ** 6 < P keeps nonzero minors nonzero mod P
    return st.integers(1, max_side).flatmap(lambda r: st.integers(1, max_side).flatmap(
        lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r)))


def fdet(rows):
    """Determinant by cofactor expansion (independent of elimination)."""
    if not rows:
        return Fraction(1)
    if len(rows) == 1:
        return Fraction(rows[0][0])
    return sum((-1) ** j * Fraction(rows[0][j]) * fdet([r[:j] + r[j + 1:] for r in rows[1:]])
               for j in range(len(rows)))


@given(int_matrix())
def test_rank_agrees(rows):
    A = np.array(rows, dtype=np.int64)
    r = linalg.rank_fraction([[Fraction(v) for v in row] for row in rows])
    assert r == np.linalg.matrix_rank(A.astype(float))
    assert linalg.rank_mod_p(A, P) == r
    assert linalg.bareiss(A).rank == r


@given(int_matrix())
def test_nullspace(rows):
    F = [[Fraction(v) for v in row] for row in rows]
    ns = linalg.nullspace(F, len(rows[0]))
    assert len(ns) == len(rows[0]) - linalg.rank_fraction(F)
    for v in ns:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in F)


@given(int_matrix())
def test_nullspace_mod_p(rows):
    A = np.array(rows, dtype=np.int64)
    ns = linalg.nullspace_mod_p(A, P)
    assert ns.shape[0] == A.shape[1] - linalg.rank_mod_p(A, P)
    if ns.size:
        assert not np.any((A % P) @ ns.T % P)


@given(int_matrix(5, -9, 9))
def test_rank_mod_p_is_lower_bound(rows):
    A = np.array(rows, dtype=np.int64)
    assert linalg.rank_mod_p(A, 7) <= linalg.rank_fraction([[Fraction(v) for v in r] for r in rows])


@settings(max_examples=50)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n),
                                                     min_size=n, max_size=n)))
def test_bareiss_minors(rows):
    A = np.array(rows, dtype=np.int64)
    S = A @ A.T + np.eye(len(rows), dtype=np.int64)     # positive definite
    res = linalg.bareiss(S)
    minors = [fdet([list(map(int, r[:k])) for r in S[:k]]) for k in range(1, len(rows) + 1)]
    assert not res.swapped
    assert [Fraction(int(m)) for m in res.leading_minors()] == minors
    assert all(m > 0 for m in minors)


def test_bareiss_indefinite():
    res = linalg.bareiss(np.array([[0, 1], [1, 0]]))
    assert res.rank == 2 and res.swapped


def test_rank_trivial_cases():
    assert linalg.rank_mod_p(np.zeros((4, 4), dtype=np.int64), P) == 0
    assert linalg.rank_mod_p(np.eye(3, dtype=np.int64), P) == 3
    assert linalg.bareiss(np.eye(3, dtype=np.int64)).rank == 3


def test_blocked_rank_large():
    rng = np.random.default_rng(1)
    B = rng.integers(-5, 6, size=(300, 40))
    A = B @ B.T                       # rank 40, crosses several blocks
    assert linalg.rank_mod_p(A, P, block=32) == 40
    assert linalg.rank_mod_p(A, P, block=128) == 40


def test_solve_and_inverse():
    A = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]]
    x = linalg.solve(A, [Fraction(3), Fraction(5)])
    assert x == [Fraction(4, 5), Fraction(7, 5)]
    inv = linalg.inverse(A)
    assert inv == [[Fraction(3, 5), Fraction(-1, 5)], [Fraction(-1, 5), Fraction(2, 5)]]


def test_rref_mod_p():
    A = np.array([[2, 4, 6], [1, 2, 4]])
    R, piv = linalg.rref_mod_p(A, 7)
    assert piv == [0, 2]
    assert R[0].tolist() == [1, 2, 0] and R[1].tolist() == [0, 0, 1]
