"""The Hoffman-Singleton graph, its automorphism group and U3(5) inside it."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .permcore import EnumeratedGroup, Perm, enumerate_group, subgroup_closure


@dataclass(frozen=True)
class Graph:
    adjacency: np.ndarray
    labels: tuple[int, ...] = field(default=None)

    def __post_init__(self):
        A = np.asarray(self.adjacency, dtype=bool)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("adjacency must be square")
        if np.any(np.diag(A)) or np.any(A != A.T):
            raise ValueError("adjacency must be symmetric without loops")
        A = A.copy()
        A.setflags(write=False)
        object.__setattr__(self, "adjacency", A)
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(range(A.shape[0])))

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        A = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            A[u, v] = A[v, u] = True
        return cls(A)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def edge_count(self) -> int:
        return int(self.adjacency.sum()) // 2

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def neighbours(self, v: int) -> list[int]:
        return np.flatnonzero(self.adjacency[v]).tolist()

    def without_edge(self, u: int, v: int) -> "Graph":
        A = self.adjacency.copy()
        A[u, v] = A[v, u] = False
        return Graph(A, self.labels)

    def girth(self) -> int:
        """Shortest cycle length (0 for a forest), by BFS from each vertex."""
        best = 0
        for s in range(self.n):
            dist = {s: 0}
            parent = {s: -1}
            queue = [s]
            for u in queue:
                for w in self.neighbours(u):
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        parent[w] = u
                        queue.append(w)
                    elif parent[u] != w:
                        c = dist[u] + dist[w] + 1
                        if best == 0 or c < best:
                            best = c
        return best

    def is_automorphism(self, p: Perm) -> bool:
        a = p.images
        return bool(np.array_equal(self.adjacency[np.ix_(a, a)], self.adjacency))

    def to_json(self) -> str:
        adj = {str(self.labels[v]): [self.labels[w] for w in self.neighbours(v)] for v in range(self.n)}
        return json.dumps({"vertices": self.n, "adjacency": adj}, sort_keys=True)


@dataclass(frozen=True)
class SrgCertificate:
    v: int
    k: int
    lam: int
    mu: int
    vertices_ok: bool
    regular_ok: bool
    lambda_ok: bool
    mu_ok: bool
    witness: tuple | None = None

    @property
    def passed(self) -> bool:
        return self.vertices_ok and self.regular_ok and self.lambda_ok and self.mu_ok


def build_hs_graph() -> Graph:
    """Robertson's pentagon/pentagram model.

    P(h, i) is vertex ``5h + i`` and Q(h, j) is ``25 + 5h + j``.
    """
    def P(h, i):
        return 5 * h + i % 5

    def Q(h, j):
        return 25 + 5 * h + j % 5

    edges = []
    for h in range(5):
        for i in range(5):
            edges.append((P(h, i), P(h, i + 1)))
            edges.append((Q(h, i), Q(h, i + 2)))
    for h in range(5):
        for i in range(5):
            for k in range(5):
                edges.append((P(h, i), Q(k, h * k + i)))
    g = Graph.from_edges(50, edges)
    cert = verify_srg(g, 50, 7, 0, 1)
    if not cert.passed:
        raise RuntimeError(f"Hoffman-Singleton construction failed: {cert}")
    return g


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, 5 + i) for i in range(5)]
    return Graph.from_edges(10, outer + inner + spokes)


def verify_srg(g: Graph, v: int, k: int, lam: int, mu: int) -> SrgCertificate:
    A = g.adjacency.astype(np.int64)
    vertices_ok = g.n == v
    deg = A.sum(axis=1)
    regular_ok = bool(np.all(deg == k))
    common = A @ A
    witness = None
    bad_reg = np.flatnonzero(deg != k)
    if bad_reg.size:
        witness = ("degree", int(bad_reg[0]), int(deg[bad_reg[0]]))
    iu = np.triu_indices(g.n, 1)
    adj = g.adjacency[iu]
    cnt = common[iu]
    bad_l = np.flatnonzero(adj & (cnt != lam))
    bad_m = np.flatnonzero(~adj & (cnt != mu))
    if witness is None and bad_l.size:
        i = bad_l[0]
        witness = ("lambda", int(iu[0][i]), int(iu[1][i]), int(cnt[i]))
    if witness is None and bad_m.size:
        i = bad_m[0]
        witness = ("mu", int(iu[0][i]), int(iu[1][i]), int(cnt[i]))
    return SrgCertificate(v, k, lam, mu, vertices_ok, regular_ok, bad_l.size == 0, bad_m.size == 0, witness)


# -- automorphisms ------------------------------------------------------------

def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Search:
    """Backtracking for automorphisms extending a partial vertex map.

    Candidate sets are bitmasks; fixing ``u -> c`` intersects every open
    candidate set with either the neighbourhood or the non-neighbourhood of
    ``c``, according to adjacency with ``u``.  Initial candidates are split
    by degree and by the multiset of neighbour degrees.
    """

    def __init__(self, g: Graph):
        self.n = g.n
        self.nbr = [sum(1 << w for w in g.neighbours(v)) for v in range(g.n)]
        self.full = (1 << g.n) - 1
        deg = g.degrees()
        sig = [(int(deg[v]), tuple(sorted(int(deg[w]) for w in g.neighbours(v)))) for v in range(g.n)]
        classes: dict = {}
        for v, s in enumerate(sig):
            classes[s] = classes.get(s, 0) | (1 << v)
        self.initial = [classes[sig[v]] for v in range(g.n)]

    def restrict(self, cand: dict, u: int, c: int):
        out = {}
        nu = self.nbr[u]
        nc = self.nbr[c]
        notc = self.full ^ nc ^ (1 << c)
        for v, m in cand.items():
            m &= nc if (nu >> v) & 1 else notc
            if not m:
                return None
            out[v] = m
        return out

    def extend(self, partial: dict[int, int]) -> list[int] | None:
        cand = {v: self.initial[v] for v in range(self.n) if v not in partial}
        used = 0
        for u, c in partial.items():
            if not (self.initial[u] >> c) & 1 or (used >> c) & 1:
                return None
            used |= 1 << c
        for u, c in partial.items():
            cand = self.restrict(cand, u, c)
            if cand is None:
                return None
        return self._dfs(dict(partial), cand)

    def _dfs(self, mapping, cand):
        if not cand:
            return [mapping[v] for v in range(self.n)]
        u = min(cand, key=lambda v: (bin(cand[v]).count("1"), v))
        choices = cand.pop(u)
        for c in _bits(choices):
            nxt = self.restrict(cand, u, c)
            if nxt is None:
                continue
            mapping[u] = c
            res = self._dfs(mapping, nxt)
            if res is not None:
                return res
            del mapping[u]
        cand[u] = choices
        return None

    def open_candidates(self, fixed: list[int]) -> dict[int, int]:
        cand = {v: self.initial[v] for v in range(self.n) if v not in fixed}
        for u in fixed:
            cand = self.restrict(cand, u, u)
        return cand


def automorphism_group(g: Graph) -> list[Perm]:
    """Generators of Aut(g), level by level along an adaptively chosen base.

    At each level the pointwise stabiliser of the base so far is searched
    for elements moving the next base point to every candidate not already
    in the orbit of the generators found at this level; together these
    generate the full automorphism group.
    """
    s = _Search(g)
    base: list[int] = []
    gens: list[Perm] = []
    while True:
        cand = s.open_candidates(base)
        movable = {v: m for v, m in cand.items() if m & (m - 1)}
        if not movable:
            break
        b = min(movable, key=lambda v: (bin(movable[v]).count("1"), v))
        orbit = {b}
        level: list[Perm] = []
        for c in _bits(movable[b]):
            if c in orbit:
                continue
            partial = {x: x for x in base}
            partial[b] = c
            img = s.extend(partial)
            if img is None:
                continue
            p = Perm(img)
            level.append(p)
            orbit = _orbit(b, level)
        gens.extend(level)
        base.append(b)
    return gens


def _orbit(point: int, gens: list[Perm]) -> set[int]:
    orbit = {point}
    queue = [point]
    for x in queue:
        for p in gens:
            y = p(x)
            if y not in orbit:
                orbit.add(y)
                queue.append(y)
    return orbit


def derived_subgroup(G: EnumeratedGroup) -> EnumeratedGroup:
    """Normal closure of the commutators of the generators.

    A commutator (or conjugate) joins the generating list only when it lies
    outside the closure so far, which keeps the list short.
    """
    gens = list(G.generators)
    kept: list[Perm] = []
    H = subgroup_closure(kept, ambient=G)

    def offer(c: Perm) -> bool:
        nonlocal H
        if c in H:
            return False
        kept.append(c)
        H = subgroup_closure(kept, ambient=G)
        return True

    for i, a in enumerate(gens):
        for b in gens[i + 1:]:
            offer(a.inverse() * b.inverse() * a * b)
    changed = True
    while changed:
        changed = False
        for g in gens:
            for h in list(kept):
                changed |= offer(h ** g)
    return enumerate_group(kept, cap=G.order, degree=G.degree)


def fixed_subgraph(t: Perm, g: Graph) -> Graph:
    fixed = t.fixed_points()
    A = g.adjacency[np.ix_(fixed, fixed)]
    return Graph(A, tuple(int(v) for v in fixed))


def vertex_stabilizer(G: EnumeratedGroup, v: int = 0) -> np.ndarray:
    """Element indices of the stabiliser of vertex ``v``."""
    return np.flatnonzero(G.elements[:, v] == v)


AUT_HS_ORDER = 252000
U35_ORDER = 126000


def build_groups() -> tuple[Graph, EnumeratedGroup, EnumeratedGroup]:
    """The HS graph, Aut(HS) and U3(5), enumerated from scratch."""
    g = build_hs_graph()
    aut = enumerate_group(automorphism_group(g), cap=AUT_HS_ORDER)
    return g, aut, derived_subgroup(aut)
