"""Involution suborbits, the (t, rho) and (rho, sigma) pair classes, and the shape.

Throughout, ``G`` is an :class:`~majorana_u35.permcore.EnumeratedGroup` for
U3(5).  Involutions are numbered 0..524 and subgroups of order three
0..1749, both in enumeration order of their first element.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from . import nortsak
from .permcore import EnumeratedGroup, Perm, SubgroupHandle, subgroup_closure

CLOSURE_CAP = 2520
NS_CANDIDATES = {2: ("2A", "2B"), 3: ("3A", "3C"), 4: ("4A", "4B"), 5: ("5A",), 6: ("6A",)}


class ShapeError(ValueError):
    pass


class UnexpectedSubgroup(RuntimeError):
    """A pair generated a subgroup whose order no table row accounts for."""


# -- registries ---------------------------------------------------------------

class AxisRegistry:
    """Involutions and order-3 subgroups of ``G`` with stable numbering."""

    def __init__(self, G: EnumeratedGroup):
        self.G = G
        orders = G.element_orders()
        if orders[0] != 1:
            raise ValueError("element 0 must be the identity")
        self.involutions = np.flatnonzero(orders == 2)
        self.inv_id = np.full(G.order, -1, dtype=np.int64)
        self.inv_id[self.involutions] = np.arange(self.involutions.size)

        threes = np.flatnonzero(orders == 3)
        inv = G.inverse_indices()
        first = np.minimum(threes, inv[threes])
        reps = np.unique(first)
        self.sub3_rep = reps                        # element index of the first generator
        self.sub3_of = np.full(G.order, -1, dtype=np.int64)
        pos = np.searchsorted(reps, first)
        self.sub3_of[threes] = pos

    @property
    def n_involutions(self) -> int:
        return int(self.involutions.size)

    @property
    def n_sub3(self) -> int:
        return int(self.sub3_rep.size)

    def involution(self, i: int) -> Perm:
        return self.G.element(int(self.involutions[i]))

    def sub3_generator(self, j: int) -> Perm:
        return self.G.element(int(self.sub3_rep[j]))

    def sub3_handle(self, j: int) -> SubgroupHandle:
        return subgroup_closure([self.sub3_generator(j)])

    def conjugate_involutions(self, g: Perm, ids=None) -> np.ndarray:
        """Involution ids of ``t^g`` for each involution id ``t``."""
        ids = np.arange(self.n_involutions) if ids is None else np.asarray(ids)
        rows = self.G.elements[self.involutions[ids]]
        return self.inv_id[self.G.indices(self.G.act_by_conjugation(g, rows))]

    def conjugate_sub3(self, g: Perm, ids=None) -> np.ndarray:
        """Subgroup ids of ``rho^g`` for each order-3 subgroup id ``rho``."""
        ids = np.arange(self.n_sub3) if ids is None else np.asarray(ids)
        rows = self.G.elements[self.sub3_rep[ids]]
        return self.sub3_of[self.G.indices(self.G.act_by_conjugation(g, rows))]


def _normalises(h: Perm, x: Perm) -> bool:
    y = x ** h
    return y == x or y == x.inverse()


# -- suborbits ---------------------------------------------------------------

@dataclass(frozen=True)
class Suborbit:
    size: int
    product_order: int
    representative: int      # involution id


@dataclass(frozen=True)
class SuborbitTable:
    base: int                # involution id of t0
    suborbits: tuple[Suborbit, ...]

    def sizes(self) -> list[int]:
        return [s.size for s in self.suborbits]

    def pairs(self) -> list[tuple[int, int]]:
        return [(s.size, s.product_order) for s in self.suborbits]

    def product_orders(self) -> set[int]:
        return {s.product_order for s in self.suborbits}


def involution_classes(reg: AxisRegistry) -> int:
    """Number of conjugacy classes into which the involutions fall."""
    G = reg.G
    seen = np.zeros(reg.n_involutions, dtype=bool)
    classes = 0
    for i in range(reg.n_involutions):
        if seen[i]:
            continue
        classes += 1
        cls = reg.inv_id[np.unique(G.indices(G.conjugate_rows(reg.involution(i))))]
        seen[cls] = True
    return classes


def _orbits(n: int, gens_action: list[np.ndarray]) -> list[np.ndarray]:
    label = np.full(n, -1, dtype=np.int64)
    out = []
    for s in range(n):
        if label[s] >= 0:
            continue
        orbit = [s]
        label[s] = len(out)
        for x in orbit:
            for act in gens_action:
                y = int(act[x])
                if label[y] < 0:
                    label[y] = len(out)
                    orbit.append(y)
        out.append(np.array(sorted(orbit)))
    return out


def suborbit_table(G: EnumeratedGroup, reg: AxisRegistry | None = None, base: int = 0) -> SuborbitTable:
    from .permcore import centralizer

    reg = reg or AxisRegistry(G)
    if involution_classes(reg) != 1:
        raise ShapeError("multiple involution classes")
    t0 = reg.involution(base)
    C = centralizer(t0, G)
    acts = [reg.conjugate_involutions(c) for c in C.generators]
    orders = G.element_orders()
    prods = G.elements[reg.involutions][:, t0.images]          # t0 then s
    prod_orders = orders[G.indices(prods)]
    subs = []
    for orb in _orbits(reg.n_involutions, acts):
        po = set(prod_orders[orb].tolist())
        if len(po) != 1:
            raise ShapeError("product order not constant on a suborbit")
        subs.append(Suborbit(int(orb.size), po.pop(), int(orb[0])))
    subs.sort(key=lambda s: (s.product_order, s.representative))
    return SuborbitTable(base, tuple(subs))


def dihedral_count(G: EnumeratedGroup, order: int, reg: AxisRegistry | None = None) -> int:
    """Number of dihedral subgroups of order ``2 * order`` (order >= 3)."""
    reg = reg or AxisRegistry(G)
    tab = suborbit_table(G, reg)
    pairs = sum(s.size for s in tab.suborbits if s.product_order == order)
    # each such subgroup holds `order` involutions and order*(order-1) ordered
    # pairs of them, of which a fraction phi(order)/(order-1) have product of
    # full order; together: order * phi(order) generating ordered pairs
    phi = sum(1 for k in range(1, order + 1) if np.gcd(k, order) == 1)
    total = reg.n_involutions * pairs
    if total % (order * phi):
        raise ShapeError("dihedral pair count not divisible")
    return total // (order * phi)


def d6_count_via_sub3(G: EnumeratedGroup, reg: AxisRegistry | None = None) -> int:
    """D6 subgroups counted as (order-3 subgroups) x (S3 over each) ."""
    reg = reg or AxisRegistry(G)
    rho = reg.sub3_generator(0)
    inverting = sum(1 for i in range(reg.n_involutions)
                    if rho ** reg.involution(i) == rho.inverse())
    return reg.n_sub3 * inverting // 3


# -- pair classes --------------------------------------------------------------

@dataclass(frozen=True)
class PairRow:
    label: str
    subgroup_order: int
    count: int               # printed census size for a fixed rho
    value: Fraction | None   # None stands for the unknown x

    def value_str(self) -> str:
        return "x" if self.value is None else str(self.value)


T_RHO_ROWS = (
    PairRow("C6", 6, 3, Fraction(0)),
    PairRow("S3", 6, 18, Fraction(1, 4)),
    PairRow("A4", 12, 36, Fraction(1, 9)),
    PairRow("S4", 24, 108, Fraction(1, 36)),
    PairRow("GL2(3)", 48, 36, Fraction(1, 36)),
    PairRow("A5", 60, 108, Fraction(1, 18)),
    PairRow("L2(7)", 168, 216, Fraction(1, 24)),
)

RHO_SIGMA_ROWS = (
    PairRow("C3", 3, 1, Fraction(8, 5)),
    PairRow("C3xC3", 9, 12, Fraction(0)),
    PairRow("A4", 12, 36, Fraction(136, 405)),
    PairRow("F21", 21, 144, Fraction(4, 27)),
    PairRow("SL2(3)", 24, 18, Fraction(8, 81)),
    PairRow("C3xA4", 36, 72, Fraction(64, 405)),
    PairRow("A5", 60, 54, Fraction(16, 405)),
    PairRow("SL2(5)", 120, 9, Fraction(16, 405)),
    PairRow("L2(7)+", 168, 108, Fraction(32, 405)),
    PairRow("L2(7)-", 168, 216, Fraction(4, 81)),
    PairRow("A6", 360, 216, Fraction(32, 405)),
    PairRow("A7(3^2,3^2)", 2520, 216, Fraction(8, 81)),
    PairRow("A7(3,3^2)", 2520, 216, Fraction(32, 405)),
    PairRow("U3(5)", 126000, 432, None),
)

T_RHO_INDEX = {r.label: i for i, r in enumerate(T_RHO_ROWS)}
RHO_SIGMA_INDEX = {r.label: i for i, r in enumerate(RHO_SIGMA_ROWS)}
GENERATING = RHO_SIGMA_INDEX["U3(5)"]


@dataclass(frozen=True)
class PairClass:
    row: PairRow
    index: int               # row number in its table
    subgroup_order: int
    tag: str | None = None   # tie-breaker evidence

    @property
    def label(self) -> str:
        return self.row.label


def classify_pair_t_rho(t: Perm, rho: Perm, G: EnumeratedGroup) -> PairClass:
    H = subgroup_closure([t, rho], cap=CLOSURE_CAP, ambient=G)
    n = H.order
    if n == 6:
        label = "C6" if t.commutes_with(rho) else "S3"
        tag = "centralises" if label == "C6" else "inverts"
    else:
        hits = [r.label for r in T_RHO_ROWS if r.subgroup_order == n]
        if len(hits) != 1:
            raise UnexpectedSubgroup(f"<t, rho> has order {n}")
        label, tag = hits[0], None
    i = T_RHO_INDEX[label]
    return PairClass(T_RHO_ROWS[i], i, n, tag)


def _centraliser_order_in(x: Perm, H: SubgroupHandle) -> int:
    R = H.rows
    return int(np.count_nonzero(np.all(x.images[R] == R[:, x.images], axis=1)))


def classify_pair_rho_sigma(rho: Perm, sigma: Perm, G: EnumeratedGroup) -> PairClass:
    """Pair-class row of the order-3 subgroups generated by ``rho`` and ``sigma``.

    The two orders shared by a pair of rows are split as follows.  For
    order 168 the test is whether some involution of H normalises both
    subgroups.  For order 2520 (H is A7) the test is the order of the
    centraliser of each generator inside H, which is 9 for a double
    3-cycle and 36 for a 3-cycle.
    """
    H = subgroup_closure([rho, sigma], cap=CLOSURE_CAP, ambient=G)
    if H.whole:
        i = GENERATING
        return PairClass(RHO_SIGMA_ROWS[i], i, G.order)
    n = H.order
    tag = None
    if n == 168:
        common = any(_normalises(h, rho) and _normalises(h, sigma)
                     for h in H if h.order() == 2)
        label = "L2(7)+" if common else "L2(7)-"
        tag = "common normalising involution" if common else "no common normalising involution"
    elif n == 2520:
        cs = sorted((_centraliser_order_in(rho, H), _centraliser_order_in(sigma, H)))
        if cs == [9, 9]:
            label = "A7(3^2,3^2)"
        elif cs == [9, 36]:
            label = "A7(3,3^2)"
        else:
            raise UnexpectedSubgroup(f"A7 pair with internal centraliser orders {cs}")
        tag = f"centralisers {cs[0]},{cs[1]}"
    else:
        hits = [r.label for r in RHO_SIGMA_ROWS if r.subgroup_order == n]
        if len(hits) != 1:
            raise UnexpectedSubgroup(f"<rho, sigma> has order {n}")
        label = hits[0]
    i = RHO_SIGMA_INDEX[label]
    return PairClass(RHO_SIGMA_ROWS[i], i, n, tag)


@dataclass(frozen=True)
class Census:
    base: int                # order-3 subgroup id of rho
    table: str               # "t_rho" or "rho_sigma"
    labels: np.ndarray       # row index per target id
    tags: tuple

    def counts(self) -> list[int]:
        rows = T_RHO_ROWS if self.table == "t_rho" else RHO_SIGMA_ROWS
        return np.bincount(self.labels, minlength=len(rows)).tolist()

    def to_records(self) -> list[dict]:
        rows = T_RHO_ROWS if self.table == "t_rho" else RHO_SIGMA_ROWS
        counts = self.counts()
        return [{"label": r.label, "subgroup_order": r.subgroup_order, "count": counts[i],
                 "expected": r.count, "inner_product": r.value_str()} for i, r in enumerate(rows)]


def t_rho_census(reg: AxisRegistry, rho_id: int) -> Census:
    rho = reg.sub3_generator(rho_id)
    labels = np.array([classify_pair_t_rho(reg.involution(i), rho, reg.G).index
                       for i in range(reg.n_involutions)], dtype=np.int64)
    return Census(rho_id, "t_rho", labels, ())


def rho_sigma_census(reg: AxisRegistry, rho_id: int) -> Census:
    rho = reg.sub3_generator(rho_id)
    labels = np.empty(reg.n_sub3, dtype=np.int64)
    tags = []
    for j in range(reg.n_sub3):
        pc = classify_pair_rho_sigma(rho, reg.sub3_generator(j), reg.G)
        labels[j] = pc.index
        tags.append(pc.tag)
    return Census(rho_id, "rho_sigma", labels, tuple(tags))


# -- shape -------------------------------------------------------------------

@dataclass(frozen=True)
class ShapeMap:
    types: dict              # product order -> Norton-Sakuma tag

    def __getitem__(self, order: int) -> str:
        return self.types[order]

    def image(self) -> set[str]:
        return set(self.types.values())


def containment_facts() -> dict:
    """``(tag, k) -> tag'`` : in algebra ``tag``, a0 and a_k generate ``tag'``.

    Only proper divisors ``k`` of the rotation order are listed; the values
    are read off the exact algebras.
    """
    facts = {}
    for tag in nortsak.TYPES:
        n = int(tag[0])
        alg = nortsak.build_algebra(tag)
        for k in range(2, n):
            if n % k == 0:
                sub = nortsak.subalgebra_type(alg, k)
                if sub is None:
                    raise ShapeError(f"cannot identify <a0, a{k}> in {tag}")
                facts[(tag, k)] = sub
    return facts


def dihedral_containments(G: EnumeratedGroup, table: SuborbitTable, reg: AxisRegistry | None = None) -> set:
    """Pairs ``(n, m)`` such that the dihedral group of each suborbit with
    product order ``n`` lies in one with product order ``m``."""
    reg = reg or AxisRegistry(G)
    t0 = reg.involution(table.base)
    orders = G.element_orders()
    E = G.elements
    inv_rows = E[reg.involutions]
    rot = G.indices(inv_rows[:, t0.images])        # t0 * r for every involution r
    rot_orders = orders[rot]
    present = sorted(table.product_orders() - {1})
    out = set()
    for n in present:
        reps = [s for s in table.suborbits if s.product_order == n]
        for m in present:
            if m <= n or m % n:
                continue
            cands = rot[rot_orders == m]
            ok_all = True
            for s in reps:
                c = t0 * reg.involution(s.representative)
                targets = {G.index(c), G.index(c.inverse())}
                # powers (t0 r)^(m/n) for the candidate rotations
                pw = E[cands]
                for _ in range(m // n - 1):
                    pw = E[cands][np.arange(cands.size)[:, None], pw]
                hit = np.isin(G.indices(pw), list(targets))
                if not hit.any():
                    ok_all = False
            if ok_all:
                out.add((n, m))
    return out


def solve_shape(suborbits: SuborbitTable, rules: dict | None = None, containments: set | None = None) -> ShapeMap:
    """Enumerate Norton-Sakuma assignments compatible with the containments.

    A dihedral pair of product order ``n`` inside one of order ``m`` forces
    the type at ``n`` to be the subalgebra of the type at ``m`` generated
    by ``a0`` and ``a_{m/n}``.
    """
    rules = containment_facts() if rules is None else rules
    containments = set() if containments is None else containments
    orders = sorted(suborbits.product_orders() - {1})
    if any(o not in NS_CANDIDATES for o in orders):
        raise ShapeError("no consistent shape: product order outside 2..6")
    solutions = []
    for choice in product(*(NS_CANDIDATES[o] for o in orders)):
        shape = dict(zip(orders, choice))
        if all(rules.get((shape[m], m // n)) == shape[n] for n, m in containments):
            solutions.append(shape)
    if not solutions:
        raise ShapeError("no consistent shape")
    if len(solutions) > 1:
        raise ShapeError(f"ambiguous shape: {len(solutions)} solutions")
    return ShapeMap(solutions[0])


def majorana_inner_product(order: int, shape: ShapeMap) -> Fraction:
    if order == 1:
        return Fraction(1)
    if order not in shape.types:
        raise ValueError(f"product order {order} outside the shape")
    return nortsak.pair_inner_product(shape[order])


def shape_of_group(G: EnumeratedGroup, reg: AxisRegistry | None = None) -> ShapeMap:
    reg = reg or AxisRegistry(G)
    tab = suborbit_table(G, reg)
    return solve_shape(tab, containment_facts(), dihedral_containments(G, tab, reg))
