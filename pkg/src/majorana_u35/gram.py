"""Gram matrices of Majorana and 3A-axes of U3(5), their ranks, and the x checks.

Axis positions: involution ``i`` is column ``i`` (0..524) and the order-3
subgroup ``j`` is column ``525 + j``.  Entries are stored scaled by
``SCALE`` so that every known value is an integer; the one unknown inner
product ``x`` is carried by a separate boolean indicator.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

import gmpy2
import numpy as np
import scipy.sparse as sp

from . import linalg
from .hsgraph import vertex_stabilizer
from .nortsak import FormalVector
from .permcore import EnumeratedGroup, Perm, canonical_conjugators, normalizer, subgroup_closure
from .shapes import (GENERATING, T_RHO_ROWS, RHO_SIGMA_ROWS, AxisRegistry, ShapeMap, majorana_inner_product,
                     t_rho_census, rho_sigma_census)

SCALE = 2**8 * 3**4 * 5          # 103680
X_VALUE = Fraction(4, 81)
# three primes just above 2^20; block * (p - 1)^2 stays below 2^53
DEFAULT_PRIMES = (1048583, 1048589, 1048601)


class AxisId(NamedTuple):
    kind: str                # "a" (Majorana) or "u" (3A)
    index: int

    def position(self, n_inv: int = 525) -> int:
        return self.index if self.kind == "a" else n_inv + self.index


def a(i: int) -> AxisId:
    return AxisId("a", int(i))


def u(j: int) -> AxisId:
    return AxisId("u", int(j))


# -- pair labels and assembly --------------------------------------------------

@dataclass
class PairLabels:
    """Pair classes for every pair of axes, transported from one base subgroup."""

    base: int
    product_orders: np.ndarray     # 525 x 525, order of t*s
    t_rho: np.ndarray              # 525 x 1750, row index into T_RHO_ROWS
    rho_sigma: np.ndarray          # 1750 x 1750, row index into RHO_SIGMA_ROWS
    conjugators: np.ndarray        # element index g_j with rho_j ** g_j == rho_base


def pair_labels(reg: AxisRegistry, base: int = 0) -> PairLabels:
    G = reg.G
    n_inv, n3 = reg.n_involutions, reg.n_sub3
    mm = _product_orders(reg)
    c5 = t_rho_census(reg, base).labels
    c6 = rho_sigma_census(reg, base).labels
    rho0 = reg.sub3_generator(base)
    conj = canonical_conjugators(reg.sub3_rep, rho0, G, key=reg.sub3_of)
    tu = np.empty((n_inv, n3), dtype=np.int64)
    uu = np.empty((n3, n3), dtype=np.int64)
    for j in range(n3):
        g = G.element(int(conj[j]))
        tu[:, j] = c5[reg.conjugate_involutions(g)]
        uu[j] = c6[reg.conjugate_sub3(g)]
    return PairLabels(base, mm, tu, uu, conj)


def _scaled(v: Fraction) -> int:
    s = v * SCALE
    if s.denominator != 1:
        raise ValueError(f"{v} is not integral at scale {SCALE}")
    return int(s)


@dataclass
class GramMatrix:
    """``value = (const + x * SCALE * indicator) / SCALE``."""

    const: np.ndarray        # int64, scaled
    indicator: np.ndarray    # bool
    n_inv: int
    axes: tuple = field(default=())

    @property
    def n(self) -> int:
        return self.const.shape[0]

    def entry(self, i: int, j: int) -> tuple[Fraction, bool]:
        return Fraction(int(self.const[i, j]), SCALE), bool(self.indicator[i, j])

    def value(self, i: int, j: int, x: Fraction = X_VALUE) -> Fraction:
        c, ind = self.entry(i, j)
        return c + x if ind else c

    def integral(self, x: Fraction = X_VALUE) -> tuple[np.ndarray, int]:
        """Integer matrix ``K`` and ``s`` with ``K / s`` the Gram at ``x``."""
        x = Fraction(x)
        xs = x * SCALE
        den = xs.denominator
        K = self.const * den
        if self.indicator.any():
            K = K + self.indicator.astype(np.int64) * xs.numerator
        return K, SCALE * den

    def restrict(self, idx) -> "GramMatrix":
        idx = np.asarray(idx)
        return GramMatrix(self.const[np.ix_(idx, idx)], self.indicator[np.ix_(idx, idx)], self.n_inv,
                          tuple(self.axes[i] for i in idx) if self.axes else ())

    def pos(self, axis: AxisId) -> int:
        return axis.position(self.n_inv)

    def pair(self, v: FormalVector, w: FormalVector) -> tuple[Fraction, Fraction]:
        """``(v, w)`` as ``c0 + c1 * x``."""
        c0 = c1 = Fraction(0)
        for ax, cv in v.items():
            i = self.pos(ax)
            for bx, cw in w.items():
                c, ind = self.entry(i, self.pos(bx))
                c0 += cv * cw * c
                if ind:
                    c1 += cv * cw
        return c0, c1


def assemble_gram(G: EnumeratedGroup, shape: ShapeMap, include_3A: bool = True,
                  reg: AxisRegistry | None = None, labels: PairLabels | None = None) -> GramMatrix:
    reg = reg or AxisRegistry(G)
    n_inv = reg.n_involutions
    if labels is None:
        if not include_3A:
            labels = PairLabels(0, _product_orders(reg), None, None, None)
        else:
            labels = pair_labels(reg)
    lut = np.zeros(13, dtype=np.int64)
    for o in range(1, 7):
        lut[o] = _scaled(majorana_inner_product(o, shape))
    if np.any(labels.product_orders > 6):
        raise ValueError("unclassified pair: product order above 6")
    mm = lut[labels.product_orders]
    axes = tuple(a(i) for i in range(n_inv))
    if not include_3A:
        return GramMatrix(mm, np.zeros_like(mm, dtype=bool), n_inv, axes)
    n3 = reg.n_sub3
    v5 = np.array([_scaled(r.value) for r in T_RHO_ROWS], dtype=np.int64)
    v6 = np.array([_scaled(r.value) if r.value is not None else 0 for r in RHO_SIGMA_ROWS], dtype=np.int64)
    tu = v5[labels.t_rho]
    uu = v6[labels.rho_sigma]
    const = np.block([[mm, tu], [tu.T, uu]])
    ind = np.zeros(const.shape, dtype=bool)
    ind[n_inv:, n_inv:] = labels.rho_sigma == GENERATING
    axes = axes + tuple(u(j) for j in range(n3))
    return GramMatrix(const, ind, n_inv, axes)


def _product_orders(reg: AxisRegistry) -> np.ndarray:
    G = reg.G
    inv_rows = G.elements[reg.involutions]
    orders = G.element_orders()
    return np.stack([orders[G.indices(inv_rows[i][inv_rows])] for i in range(reg.n_involutions)])


# -- ranks -----------------------------------------------------------------

def _check_prime(p: int, scale: int):
    if not gmpy2.is_prime(p):
        raise ValueError(f"{p} is not prime")
    if scale % p == 0:
        raise ValueError(f"prime {p} divides an entry denominator")


def rank_mod_p(M: GramMatrix | np.ndarray, p: int, x: Fraction = X_VALUE) -> int:
    if isinstance(M, GramMatrix):
        K, s = M.integral(x)
    else:
        K, s = np.asarray(M, dtype=np.int64), 1
    _check_prime(p, s)
    if K.size == 0:
        return 0
    return linalg.rank_mod_p(K, p)


def rank_exact(M: GramMatrix | np.ndarray, x: Fraction = X_VALUE) -> int:
    K = M.integral(x)[0] if isinstance(M, GramMatrix) else np.asarray(M)
    if K.size == 0:
        return 0
    return linalg.bareiss(K).rank


@dataclass(frozen=True)
class RankCertificate:
    ranks: dict              # prime -> rank
    exact: int | None = None

    @property
    def consensus(self) -> int | None:
        vals = set(self.ranks.values())
        if self.exact is not None:
            vals.add(self.exact)
        return vals.pop() if len(vals) == 1 else None


def certified_rank(M, primes=DEFAULT_PRIMES, exact: bool = False, x: Fraction = X_VALUE) -> RankCertificate:
    ranks = {p: rank_mod_p(M, p, x) for p in primes}
    return RankCertificate(ranks, rank_exact(M, x) if exact else None)


def positive_definite(M: GramMatrix, x: Fraction = X_VALUE) -> tuple[bool, int]:
    """Exact check by leading principal minors; returns (verdict, rank)."""
    res = linalg.bareiss(M.integral(x)[0])
    if res.swapped:
        return False, res.rank
    return all(m > 0 for m in res.leading_minors()), res.rank


# -- Pasechnik relations -------------------------------------------------------

@dataclass(frozen=True)
class Pasechnik:
    subgroups: tuple[int, ...]     # the four order-3 subgroup ids
    involutions: tuple[int, ...]   # the nine involution ids
    vector: FormalVector


def sylow3_subgroups(reg: AxisRegistry) -> list[tuple[int, ...]]:
    """Elementary abelian subgroups of order 9, as sorted tuples of subgroup ids.

    For commuting generators x, y of distinct order-3 subgroups the other
    two cyclic subgroups are generated by xy and xy^2.
    """
    G = reg.G
    threes = np.flatnonzero(G.element_orders() == 3)
    T = G.elements[threes]
    found = set()
    for j in range(reg.n_sub3):
        x = reg.sub3_generator(j)
        comm = threes[np.all(x.images[T] == T[:, x.images], axis=1)]
        for k in np.unique(reg.sub3_of[comm]):
            if k <= j:
                continue
            y = reg.sub3_generator(int(k))
            xy = G.index(x * y)
            xy2 = G.index(x * y * y)
            found.add(tuple(sorted((j, int(k), int(reg.sub3_of[xy]), int(reg.sub3_of[xy2])))))
    return sorted(found)


def pasechnik_vectors(G: EnumeratedGroup, reg: AxisRegistry | None = None) -> list[Pasechnik]:
    reg = reg or AxisRegistry(G)
    inv_rows = G.elements[reg.involutions]
    out = []
    for subs in sylow3_subgroups(reg):
        if len(subs) != 4:
            raise ValueError(f"order-9 subgroup with {len(subs)} cyclic subgroups")
        x, y = reg.sub3_generator(subs[0]), reg.sub3_generator(subs[1])
        ok = np.ones(reg.n_involutions, dtype=bool)
        for g in (x, y):
            ok &= np.all(G.conjugate_rows(g, inv_rows) == g.inverse().images, axis=1)
        invs = tuple(int(i) for i in np.flatnonzero(ok))
        if not invs:
            continue
        if len(invs) != 9:
            raise ValueError(f"3^2:2 with {len(invs)} inverting involutions")
        coeffs = {u(s): 45 for s in subs}
        coeffs.update({a(i): -32 for i in invs})
        out.append(Pasechnik(subs, invs, FormalVector(coeffs)))
    return out


def relation_matrix(rels, n_inv: int, n: int) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for r, rel in enumerate(rels):
        vec = rel.vector if isinstance(rel, Pasechnik) else rel
        for ax, c in vec.items():
            rows.append(r)
            cols.append(ax.position(n_inv))
            vals.append(int(c))
    return sp.csr_matrix((vals, (rows, cols)), shape=(len(rels), n), dtype=np.int64)


class InconsistentSystem(ArithmeticError):
    pass


def relation_pairings(M: GramMatrix, rels) -> tuple[np.ndarray, np.ndarray]:
    """Scaled ``(r, c)`` split as ``A + x * SCALE * B`` for every relation and column."""
    R = relation_matrix(rels, M.n_inv, M.n)
    A = np.asarray(R @ M.const)
    B = np.asarray(R @ M.indicator.astype(np.int64))
    return A, B


def solve_x(M: GramMatrix, rels) -> Fraction:
    if not len(rels):
        raise ValueError("no relations")
    A, B = relation_pairings(M, rels)
    if np.any((B == 0) & (A != 0)):
        raise InconsistentSystem("inconsistent system: a relation pairs nonzero with an x-free column")
    nz = B != 0
    if not nz.any():
        raise InconsistentSystem("x unconstrained")
    An, Bn = A[nz], B[nz]
    # every (A, B) must be proportional to the first; entries stay far below 2^63
    a0, b0 = int(An[0]), int(Bn[0])
    clash = np.flatnonzero(An * b0 != a0 * Bn)
    if clash.size:
        k = int(clash[0])
        raise InconsistentSystem(f"inconsistent system: distinct roots {Fraction(-a0, b0 * SCALE)} and "
                                 f"{Fraction(-int(An[k]), int(Bn[k]) * SCALE)}")
    return Fraction(-a0, b0 * SCALE)


def relations_vanish(M: GramMatrix, rels, x: Fraction = X_VALUE) -> bool:
    A, B = relation_pairings(M, rels)
    xs = x * SCALE
    return bool(np.all(A * xs.denominator + B * xs.numerator == 0))


def gram_norm(M: GramMatrix, vec: FormalVector, x: Fraction = X_VALUE) -> Fraction:
    c0, c1 = M.pair(vec, vec)
    return c0 + c1 * x


# -- A7 restriction --------------------------------------------------------

@dataclass
class A7Report:
    involutions: np.ndarray
    sub3_double: np.ndarray        # subgroups of type 3^2 (internal centraliser order 9)
    sub3_single: np.ndarray        # 3-cycle type (internal centraliser order 36)
    rank: int
    kernel: int
    majorana_rank: int
    rank_with_3cycles: int
    internal_pasechnik: int
    pasechnik_span: int
    pasechnik_in_kernel: bool
    x_free: bool


def a7_restriction_rank(G: EnumeratedGroup, M: GramMatrix, reg: AxisRegistry | None = None,
                        rels: list | None = None, vertex: int = 0, exact: bool = True) -> A7Report:
    reg = reg or AxisRegistry(G)
    stab = vertex_stabilizer(G, vertex)
    if stab.size != 2520:
        raise ValueError(f"vertex stabiliser has order {stab.size}")
    orders = G.element_orders()
    S = G.elements[stab]
    invs = np.sort(reg.inv_id[stab[orders[stab] == 2]])
    threes = stab[orders[stab] == 3]
    subs = np.unique(reg.sub3_of[threes])
    cent = {}
    for j in subs:
        x = reg.sub3_generator(int(j))
        cent[int(j)] = int(np.count_nonzero(np.all(x.images[S] == S[:, x.images], axis=1)))
    double = np.array(sorted(j for j, c in cent.items() if c == 9), dtype=np.int64)
    single = np.array(sorted(j for j, c in cent.items() if c == 36), dtype=np.int64)
    if double.size + single.size != subs.size:
        raise ValueError(f"unexpected internal centraliser orders {sorted(set(cent.values()))}")
    n_inv = M.n_inv
    idx = np.concatenate([invs, n_inv + double])
    sub = M.restrict(idx)
    x_free = not sub.indicator.any()
    r = rank_exact(sub) if exact else rank_mod_p(sub, DEFAULT_PRIMES[0])
    maj = rank_mod_p(M.restrict(invs), DEFAULT_PRIMES[0])
    full_idx = np.concatenate([idx, n_inv + single])
    r_all = rank_mod_p(M.restrict(full_idx), DEFAULT_PRIMES[0])

    # Pasechnik relations of 3^2:2 subgroups inside the stabiliser mix both
    # kinds of order-3 subgroup; eliminate the 3-cycle coordinates
    rels = rels if rels is not None else pasechnik_vectors(G, reg)
    inv_set, all_sub = set(invs.tolist()), set(subs.tolist())
    inside = [p for p in rels if set(p.involutions) <= inv_set and set(p.subgroups) <= all_sub]
    single_pos = {int(j): k for k, j in enumerate(single)}
    col = {int(p): k for k, p in enumerate(idx)}
    span, in_kernel = 0, True
    if inside:
        P3 = [[Fraction(0)] * len(single) for _ in inside]
        P = [[Fraction(0)] * len(idx) for _ in inside]
        for r_i, rel in enumerate(inside):
            for ax, c in rel.vector.items():
                if ax.kind == "u" and ax.index in single_pos:
                    P3[r_i][single_pos[ax.index]] = c
                else:
                    P[r_i][col[ax.position(n_inv)]] = c
        # left kernel of P3: combinations cancelling every 3-cycle coordinate
        T = [list(colv) for colv in zip(*P3)]
        combos = linalg.nullspace(T, len(inside))
        vecs = [[sum(cb[k] * P[k][m] for k in range(len(inside)) if cb[k]) for m in range(len(idx))]
                for cb in combos]
        span = linalg.rank_fraction(vecs) if vecs else 0
        K = sub.integral()[0]
        for v in vecs:
            den = 1
            for c in v:
                den = den * c.denominator // np.gcd(den, c.denominator)
            iv = np.array([int(c * den) for c in v], dtype=object)
            if np.any(K.astype(object) @ iv != 0):
                in_kernel = False
                break
    return A7Report(invs, double, single, r, idx.size - r, maj, r_all, len(inside), span, in_kernel, x_free)


# -- Gamma minus and the V+/V- split ------------------------------------------

@dataclass
class OrbitDecomposition:
    base: int
    normalizer_order: int
    gamma_minus: np.ndarray
    orbits: list                  # arrays of subgroup ids, ordered by least member
    regular: bool
    common_normalising: int       # sigma in Gamma- with an involution normalising both

    def indicator(self, k: int, n_inv: int, n: int) -> np.ndarray:
        f = np.zeros(n, dtype=np.int64)
        f[n_inv + self.orbits[k]] = 1
        return f


def gamma_minus_orbits(rho_id: int, reg: AxisRegistry, labels: PairLabels) -> OrbitDecomposition:
    G = reg.G
    row = labels.rho_sigma[rho_id]
    gm = np.flatnonzero(row == GENERATING)
    N = normalizer(subgroup_closure([reg.sub3_generator(rho_id)]), G)
    acts = [reg.conjugate_sub3(g) for g in N.generators]
    member = np.zeros(reg.n_sub3, dtype=bool)
    member[gm] = True
    label = np.full(reg.n_sub3, -1)
    orbits = []
    for s in gm:
        if label[s] >= 0:
            continue
        orb = [int(s)]
        label[s] = len(orbits)
        for y in orb:
            for act in acts:
                z = int(act[y])
                if not member[z]:
                    raise ValueError("normaliser does not preserve Gamma-")
                if label[z] < 0:
                    label[z] = len(orbits)
                    orb.append(z)
        orbits.append(np.array(sorted(orb), dtype=np.int64))
    regular = all(o.size == N.order for o in orbits)
    # involutions normalising <rho> lie in N; test each against every sigma
    inv_N = [Perm._trusted(r) for r in N.rows if Perm._trusted(r).order() == 2]
    common = 0
    for s in gm:
        sig = reg.sub3_generator(int(s))
        if any(sig ** h in (sig, sig.inverse()) for h in inv_N):
            common += 1
    return OrbitDecomposition(rho_id, N.order, gm, orbits, regular, common)


@dataclass
class VDecomposition:
    """V+(u) and its complement.

    The pairing search runs over the N-orbits under two readings of the
    F-combinations: as vectors (sums of 3A-axes, required Gram-orthogonal
    to V+) and as linear functionals (required to vanish on V+ and to be
    well defined on the span).  Independently, the complement is computed
    from the functionals vanishing on V+: their level sets on Gamma- give a
    second partition into six sets, reported with its own pairing.
    """

    v_plus_rank: dict                 # prime -> rank
    orbit_pairing_vector: tuple | None
    orbit_pairing_functional: tuple | None
    pairings_tried: int
    orbit_sum_complement: list        # rational combos of the orbit sums orthogonal to V+
    complement_rank: int              # rank of the functionals vanishing on V+
    level_sets: list
    level_pairing: tuple | None       # a single pairing serving all three combinations
    level_combinations: list          # realised ((a, b), (c, d)) : L_a + L_b - L_c - L_d
    level_rank: int
    meets: np.ndarray                 # |O_i intersect L_j|

    @property
    def orbit_pairing(self):
        return self.orbit_pairing_vector or self.orbit_pairing_functional


def _pairings(items):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for k, other in enumerate(rest):
        for tail in _pairings(rest[:k] + rest[k + 1:]):
            yield ((first, other),) + tail


def _combos(F, pr):
    (pa, pb), (pc, pd), (pe, pf) = pr
    return [F[pa] + F[pb] - F[pc] - F[pd], -F[pa] - F[pb] + F[pe] + F[pf], F[pc] + F[pd] - F[pe] - F[pf]]


def v_decomposition(od: OrbitDecomposition, M: GramMatrix, primes=DEFAULT_PRIMES,
                    x: Fraction = X_VALUE) -> VDecomposition:
    K, _ = M.integral(x)
    n_inv, n = M.n_inv, M.n
    p = primes[0]
    gm = n_inv + od.gamma_minus
    plus = np.ones(n, dtype=bool)
    plus[gm] = False
    plus_idx = np.flatnonzero(plus)
    ranks = {q: linalg.rank_mod_p(K[np.ix_(plus_idx, plus_idx)], q) for q in primes}

    # functionals vanishing on V+: coefficient vectors on Gamma- killed by the
    # V+ rows, evaluated on the Gamma- axes
    null = linalg.nullspace_mod_p(K[np.ix_(plus_idx, gm)], p)
    values = (K[np.ix_(gm, gm)] @ null.T) % p
    R, piv = linalg.rref_mod_p(values.T, p)
    basis = R[:len(piv)]
    comp_rank = len(piv)

    def realised(w):
        # w (on Gamma-) is a functional vanishing on V+ iff it is in the row space
        return linalg.rank_mod_p(np.vstack([basis, w % p]), p) == comp_rank

    F = [od.indicator(k, n_inv, n) for k in range(len(od.orbits))]
    Kplus = K[plus_idx]
    vec_pr = fun_pr = None
    tried = 0
    for pr in _pairings(list(range(len(F)))):
        tried += 1
        w = _combos(F, pr)
        if vec_pr is None and all(not np.any(Kplus @ v) for v in w):
            vec_pr = pr
        if fun_pr is None and all(realised(v[gm]) for v in w):
            fun_pr = pr
    Y = np.unique(Kplus @ np.stack(F).T, axis=0)
    sums = linalg.nullspace([[Fraction(int(v)) for v in row] for row in Y], len(F))

    # level sets of the complement functionals
    keys = [tuple(int(v) for v in basis[:, i]) for i in range(len(gm))]
    groups: dict = {}
    for i, k in enumerate(keys):
        groups.setdefault(k, []).append(int(od.gamma_minus[i]))
    level = sorted((np.array(v, dtype=np.int64) for v in groups.values()), key=lambda a: a[0])
    L = [np.isin(od.gamma_minus, ls).astype(np.int64) for ls in level]
    level_pr, level_combos, level_rank = None, [], 0
    if len(L) == 6:
        for pr in _pairings(list(range(6))):
            if all(realised(v) for v in _combos(L, pr)):
                level_pr = pr
                break
        # every realised pattern L_a + L_b - L_c - L_d, up to sign
        for plus_pair in itertools.combinations(range(6), 2):
            rest = [k for k in range(6) if k not in plus_pair]
            for minus_pair in itertools.combinations(rest, 2):
                if plus_pair > minus_pair:
                    continue
                w = L[plus_pair[0]] + L[plus_pair[1]] - L[minus_pair[0]] - L[minus_pair[1]]
                if realised(w):
                    level_combos.append((plus_pair, minus_pair))
        if level_combos:
            W = np.stack([L[a] + L[b] - L[c] - L[d] for (a, b), (c, d) in level_combos])
            level_rank = linalg.rank_mod_p(W % p, p)
    meets = np.array([[np.intersect1d(o, ls).size for ls in level] for o in od.orbits], dtype=np.int64)
    return VDecomposition(ranks, vec_pr, fun_pr, tried, sums, comp_rank, level, level_pr, level_combos, level_rank,
                          meets)


# -- linking involution and the closing inner-product check --------------------

class NotFound(LookupError):
    pass


def find_s3_s4_involution(rho: Perm, sigma: Perm, reg: AxisRegistry) -> tuple[int, int]:
    """First involution t (by id) with <rho, t> = S3 and |<sigma, t>| = 24, and the count."""
    G = reg.G
    inv_rows = G.elements[reg.involutions]
    inverts = np.flatnonzero(np.all(G.conjugate_rows(rho, inv_rows) == rho.inverse().images, axis=1))
    hits = []
    for i in inverts:
        H = subgroup_closure([sigma, reg.involution(int(i))], cap=24)
        if not H.whole and H.order == 24:
            hits.append(int(i))
    if not hits:
        raise NotFound("not found")
    return hits[0], len(hits)


@dataclass
class ResurrectionResult:
    x: Fraction
    coefficient: Fraction         # coefficient of x in (alpha1, beta2)
    alpha1: FormalVector
    beta2: FormalVector
    labelling: dict


def _transposition_swapping(H_invs, cent, x_id, y_id, sub_of_point, reg):
    """Transposition-type involution of H swapping the subgroups of two points."""
    G = reg.G
    hits = []
    for t in H_invs:
        if cent[t] != 4:
            continue
        tp = reg.involution(t)
        img = reg.conjugate_sub3(tp, [sub_of_point[x_id], sub_of_point[y_id]])
        if img[0] == sub_of_point[y_id] and img[1] == sub_of_point[x_id]:
            hits.append(t)
    if len(hits) != 1:
        raise ValueError("S4 labelling ambiguous")
    return hits[0]


def resurrection_inner_check(rho_id: int, sigma_id: int, t_id: int, M: GramMatrix,
                             reg: AxisRegistry) -> ResurrectionResult:
    G = reg.G
    t = reg.involution(t_id)
    rho = reg.sub3_generator(rho_id)
    sigma = reg.sub3_generator(sigma_id)
    H = subgroup_closure([sigma, t])
    if H.order != 24:
        raise ValueError("<sigma, t> is not of order 24")
    idx = G.indices(H.rows)
    orders = G.element_orders()[idx]
    H_invs = [int(reg.inv_id[i]) for i in idx[orders == 2]]
    cent = {}
    for i in H_invs:
        h = reg.involution(i)
        cent[i] = int(np.count_nonzero(np.all(h.images[H.rows] == H.rows[:, h.images], axis=1)))
    sylows = sorted({int(reg.sub3_of[i]) for i in idx[orders == 3]})
    if len(sylows) != 4 or cent[t_id] != 4:
        raise ValueError("S4 labelling ambiguous: <sigma, t> is not S4 with t a transposition")
    img = dict(zip(sylows, reg.conjugate_sub3(t, sylows).tolist()))
    swapped = [s for s in sylows if img[s] != s]
    fixed = [s for s in sylows if img[s] == s]
    if len(swapped) != 2 or sigma_id not in swapped:
        raise ValueError("S4 labelling ambiguous: t does not swap sigma")
    si = sigma_id
    sj = img[si]
    sk, sl = fixed
    point = {"i": si, "j": sj, "k": sk, "l": sl}
    tr = {}
    for p, q in itertools.combinations("ijkl", 2):
        tr[p + q] = _transposition_swapping(H_invs, cent, p, q, point, reg)
    if tr["ij"] != t_id:
        raise ValueError("S4 labelling ambiguous: t is not the (ij) transposition")
    dbl = reg.inv_id[G.index(t * reg.involution(tr["kl"]))]
    if dbl < 0 or cent[int(dbl)] != 8:
        raise ValueError("S4 labelling ambiguous: (ij)(kl) is not a double transposition")
    c1, c8, c845, c3245 = Fraction(1), Fraction(1, 8), Fraction(8, 45), Fraction(32, 45)
    alpha = (FormalVector({u(si): c1, u(sj): c1})
             - FormalVector({u(sk): 1, a(t_id): -c845, a(tr["il"]): -c3245, a(tr["jl"]): -c3245}) * c8
             - FormalVector({u(sl): 1, a(t_id): -c845, a(tr["ik"]): -c3245, a(tr["jk"]): -c3245}) * c8
             - FormalVector({a(t_id): Fraction(1, 18)})
             - FormalVector({a(tr["kl"]): 1, a(int(dbl)): -1}) * c845)
    # the S3 = <rho, t>: its other two involutions are t rho and rho t
    others = sorted(int(reg.inv_id[G.index(p)]) for p in (t * rho, rho * t))
    if len(set(others)) != 2 or min(others) < 0:
        raise ValueError("<rho, t> is not S3")
    beta = FormalVector({u(rho_id): 1, a(t_id): -c845, a(others[0]): -c3245, a(others[1]): -c3245})
    c0, cx = M.pair(alpha, beta)
    if cx == 0:
        raise ArithmeticError("degenerate: coefficient of x vanishes")
    labelling = {"u_i": si, "u_j": sj, "u_k": sk, "u_l": sl, "a_(kl)": tr["kl"], "a_(ij)(kl)": int(dbl),
                 **{f"a_({k})": v for k, v in tr.items()}}
    return ResurrectionResult(-c0 / cx, cx, alpha, beta, labelling)


# -- export ----------------------------------------------------------------------

def export_matrix(M: GramMatrix, path, x: Fraction | None = X_VALUE) -> dict:
    """Write the nonzero upper-triangular entries as ``i j value`` lines.

    With ``x`` given, values are the integers of ``M.integral(x)``.  With
    ``x=None`` the constant part is written and the x-indicator goes to a
    sibling ``.x`` file in the same format (value 1).  A JSON manifest is
    written next to the matrix and returned.
    """
    path = Path(path)
    if x is None:
        K, scale = M.const, SCALE
    else:
        K, scale = M.integral(x)

    def dump(A, p):
        iu, ju = np.nonzero(np.triu(A))
        with open(p, "w") as fh:
            fh.writelines(f"{i} {j} {int(A[i, j])}\n" for i, j in zip(iu.tolist(), ju.tolist()))
        return hashlib.sha256(p.read_bytes()).hexdigest()

    manifest = {"dimension": M.n, "involutions": M.n_inv, "scale": int(scale), "symmetric": True,
                "triangle": "upper", "matrix": path.name, "sha256": dump(K, path)}
    if x is None:
        xp = path.with_suffix(path.suffix + ".x")
        manifest.update({"x": "symbolic", "x_indicator": xp.name, "x_sha256": dump(M.indicator.astype(np.int64), xp)})
    else:
        x = Fraction(x)
        manifest["x"] = f"{x.numerator}/{x.denominator}"
    Path(str(path) + ".json").write_text(json.dumps(manifest, sort_keys=True, indent=1))
    return manifest
