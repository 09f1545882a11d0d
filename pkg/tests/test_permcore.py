import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from majorana_u35.permcore import (CacheError, CapExceeded, NotConjugate, Perm, canonical_conjugator,
                                   canonical_conjugators, centralizer, class_indices, conjugacy_class,
                                   enumerate_group, normalizer, read_cache, subgroup_closure, write_cache)

perm6 = st.permutations(range(6)).map(lambda a: Perm(a))


@pytest.fixture(scope="module")
def S5():
    return enumerate_group([Perm.from_cycles([(0, 1, 2, 3, 4)], 5), Perm.from_cycles([(0, 1)], 5)], cap=200)


def brute(G, pred):
    return [g for g in (G.element(i) for i in range(G.order)) if pred(g)]


# -- Perm ----------------------------------------------------------------------

def test_right_action():
    p = Perm.from_cycles([(0, 1)], 3)
    q = Perm.from_cycles([(1, 2)], 3)
    # apply p first, then q
    assert (p * q)(0) == q(p(0)) == 2


def test_conjugation_convention():
    h = Perm.from_cycles([(0, 1, 2)], 4)
    x = Perm.from_cycles([(0, 3)], 4)
    assert x ** h == h.inverse() * x * h
    assert x ** h == Perm.from_cycles([(1, 3)], 4)


def test_cycles_and_order():
    p = Perm.from_cycles([(0, 1, 2), (3, 4)], 6)
    assert p.order() == 6
    assert p.cycles() == [(0, 1, 2), (3, 4)]
    assert list(p.fixed_points()) == [5]
    assert Perm.identity(4).is_identity()


def test_invalid_images_rejected():
    with pytest.raises(ValueError):
        Perm([0, 0, 1])


@given(perm6, perm6, perm6)
def test_associative(p, q, r):
    assert (p * q) * r == p * (q * r)


@given(perm6, perm6)
def test_inverse_of_product(p, q):
    assert (p * q).inverse() == q.inverse() * p.inverse()
    assert (p * p.inverse()).is_identity()


@given(perm6, st.integers(-7, 7))
def test_powers(p, k):
    assert p ** k * p == p ** (k + 1)


# -- enumeration -------------------------------------------------------------

def test_enumeration_orders(S5):
    assert S5.order == 120
    assert S5.identity().is_identity()
    assert enumerate_group([], cap=10, degree=5).order == 1


def test_cap_exceeded():
    with pytest.raises(CapExceeded):
        enumerate_group([Perm.from_cycles([(0, 1, 2, 3, 4)], 5), Perm.from_cycles([(0, 1)], 5)], cap=100)


def test_index_lookup(S5):
    for i in range(S5.order):
        assert S5.index(S5.element(i)) == i
    assert S5.index(Perm(list(range(5)))) == 0


def test_idempotent_enumeration(S5):
    again = enumerate_group([S5.element(i) for i in range(S5.order)], cap=200)
    assert {g for g in (again.element(i) for i in range(again.order))} == \
        {g for g in (S5.element(i) for i in range(S5.order))}


def test_element_orders(S5):
    orders = S5.element_orders()
    assert np.bincount(orders).tolist() == [0, 1, 25, 20, 30, 24, 20]


# -- classes, centralisers, normalisers ----------------------------------------

@pytest.mark.parametrize("cycles,size", [([], 1), ([(0, 1)], 10), ([(0, 1, 2)], 20), ([(0, 1), (2, 3)], 15),
                                         ([(0, 1, 2, 3, 4)], 24), ([(0, 1, 2), (3, 4)], 20)])
def test_class_sizes(S5, cycles, size):
    g = Perm.from_cycles(cycles, 5)
    cls = conjugacy_class(g, S5)
    assert len(cls) == size
    assert len(cls) * centralizer(g, S5).order == S5.order
    assert {S5.element(int(i)) for i in class_indices(g, S5)} == set(cls)


def test_centralizer_matches_brute_force(S5):
    g = Perm.from_cycles([(0, 1, 2)], 5)
    C = centralizer(g, S5)
    assert {h for h in C} == set(brute(S5, lambda h: h.commutes_with(g)))


def test_normalizer_matches_brute_force(S5):
    H = subgroup_closure([Perm.from_cycles([(0, 1, 2)], 5)])
    N = normalizer(H, S5)
    members = set(H)
    assert N.order == 12
    assert {h for h in N} == set(brute(S5, lambda h: {x ** h for x in members} == members))


def test_canonical_conjugator(S5):
    base = Perm.from_cycles([(0, 1)], 5)
    assert canonical_conjugator(base, base, S5).is_identity()
    for h in conjugacy_class(base, S5):
        g = canonical_conjugator(h, base, S5)
        assert h ** g == base
        first = min(i for i in range(S5.order) if h ** S5.element(i) == base)
        assert S5.index(g) == first
    with pytest.raises(NotConjugate):
        canonical_conjugator(Perm.from_cycles([(0, 1, 2)], 5), base, S5)


def test_canonical_conjugators_bulk(S5):
    base = Perm.from_cycles([(0, 1, 2, 3, 4)], 5)
    targets = class_indices(base, S5)
    got = canonical_conjugators(targets, base, S5)
    for t, g in zip(targets, got):
        assert S5.element(int(t)) ** S5.element(int(g)) == base
        assert int(g) == S5.index(canonical_conjugator(S5.element(int(t)), base, S5))


def test_subgroup_conjugator(S5):
    A = subgroup_closure([Perm.from_cycles([(0, 1, 2)], 5)])
    B = subgroup_closure([Perm.from_cycles([(2, 3, 4)], 5)])
    g = canonical_conjugator(A, B, S5)
    assert {x ** g for x in A} == set(B)


# -- closure with cap ----------------------------------------------------------

def test_closure_sentinel(S5):
    gens = [Perm.from_cycles([(0, 1, 2, 3, 4)], 5), Perm.from_cycles([(0, 1)], 5)]
    H = subgroup_closure(gens, cap=60, ambient=S5)
    assert H.whole and H.order == 120
    assert Perm.from_cycles([(3, 4)], 5) in H
    with pytest.raises(TypeError):
        list(H)


def test_closure_single_involution():
    assert subgroup_closure([Perm.from_cycles([(0, 1)], 5)]).order == 2


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 119), st.integers(0, 119))
def test_capped_closure_agrees(S5, i, j):
    gens = [S5.element(i), S5.element(j)]
    full = subgroup_closure(gens)
    capped = subgroup_closure(gens, cap=60, ambient=S5)
    if full.order > 60:
        # every subgroup of S5 above 60 is S5 itself
        assert capped.whole and full.order == 120
    else:
        assert not capped.whole and set(capped) == set(full)


# -- cache ---------------------------------------------------------------------

def test_cache_round_trip(S5, tmp_path):
    p = tmp_path / "s5.grp"
    digest = write_cache(p, S5)
    back = read_cache(p, degree=5, sha256=digest)
    assert back.order == 120
    assert np.array_equal(back.elements, S5.elements)
    assert back.generators == S5.generators


def test_cache_corruption(S5, tmp_path):
    p = tmp_path / "s5.grp"
    digest = write_cache(p, S5)
    blob = bytearray(p.read_bytes())
    blob[40] ^= 1
    p.write_bytes(bytes(blob))
    with pytest.raises(CacheError):
        read_cache(p, degree=5, sha256=digest)
    p.write_bytes(b"JUNK" + bytes(blob[4:]))
    with pytest.raises(CacheError):
        read_cache(p, degree=5)
    p.write_bytes(bytes(blob[:30]))
    with pytest.raises(CacheError):
        read_cache(p, degree=5)
    with pytest.raises(CacheError):
        read_cache(tmp_path / "missing.grp", degree=5)
