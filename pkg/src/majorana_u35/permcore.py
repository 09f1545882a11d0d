"""Permutation arithmetic and exhaustive machinery for small permutation groups.

Everything here works by full enumeration: a group of a few hundred thousand
permutations on 50 points fits comfortably in memory as a ``(N, 50)`` array
of ``uint8`` images, and every class/centralizer/normalizer query is a
vectorised scan over that array.

Conventions
-----------
Permutations act on the right.  ``p * q`` means "apply ``p``, then ``q``",
so ``(p * q)(x) == q(p(x))`` and, as an image array, ``(p * q) == q[p]``.
Conjugation is ``p ** h == h^-1 * p * h``.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Perm",
    "EnumeratedGroup",
    "SubgroupHandle",
    "CapExceeded",
    "NotConjugate",
    "enumerate_group",
    "subgroup_closure",
    "conjugacy_class",
    "centralizer",
    "normalizer",
    "canonical_conjugator",
    "canonical_conjugators",
    "write_cache",
    "read_cache",
    "CacheError",
]

DEFAULT_DEGREE = 50


class CapExceeded(RuntimeError):
    """Raised when a closure grows past the requested cap."""


class NotConjugate(ValueError):
    pass


class CacheError(IOError):
    pass


def _as_images(images, degree=None) -> np.ndarray:
    a = np.asarray(images)
    if a.ndim != 1:
        raise ValueError("a permutation is a 1-d image array")
    n = a.shape[0] if degree is None else degree
    if a.shape[0] != n:
        raise ValueError(f"expected {n} images, got {a.shape[0]}")
    if n > 256:
        raise ValueError("degree above 256 is not supported")
    if a.size and (a.min() < 0 or a.max() >= n):
        raise ValueError("image out of range")
    a = a.astype(np.uint8)
    if np.unique(a).size != n:
        raise ValueError("not a permutation")
    return a


class Perm:
    """An immutable permutation of ``{0, ..., n-1}`` stored as its image array."""

    __slots__ = ("_a", "_b")

    def __init__(self, images, degree=None):
        a = _as_images(images, degree)
        a.setflags(write=False)
        self._a = a
        self._b = a.tobytes()

    @classmethod
    def _trusted(cls, a: np.ndarray) -> "Perm":
        # skips validation; caller guarantees a uint8 bijection
        p = object.__new__(cls)
        a = np.ascontiguousarray(a, dtype=np.uint8)
        a.setflags(write=False)
        p._a = a
        p._b = a.tobytes()
        return p

    @classmethod
    def identity(cls, degree=DEFAULT_DEGREE) -> "Perm":
        return cls._trusted(np.arange(degree, dtype=np.uint8))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], degree=DEFAULT_DEGREE) -> "Perm":
        a = np.arange(degree, dtype=np.int64)
        for cyc in cycles:
            for i, x in enumerate(cyc):
                a[x] = cyc[(i + 1) % len(cyc)]
        return cls(a)

    @property
    def images(self) -> np.ndarray:
        return self._a

    @property
    def degree(self) -> int:
        return self._a.shape[0]

    def __call__(self, x: int) -> int:
        return int(self._a[x])

    def __mul__(self, other: "Perm") -> "Perm":
        return Perm._trusted(other._a[self._a])

    def inverse(self) -> "Perm":
        inv = np.empty_like(self._a)
        inv[self._a] = np.arange(self.degree, dtype=np.uint8)
        return Perm._trusted(inv)

    def __pow__(self, k):
        if isinstance(k, Perm):
            # conjugation p ** h = h^-1 p h
            return Perm._trusted(k._a[self._a[k.inverse()._a]])
        k = int(k)
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = np.arange(self.degree, dtype=np.uint8)
        sq = base._a
        while k:
            if k & 1:
                result = sq[result]
            sq = sq[sq]
            k >>= 1
        return Perm._trusted(result)

    def is_identity(self) -> bool:
        return bool(np.all(self._a == np.arange(self.degree)))

    def order(self) -> int:
        o = 1
        for c in self.cycles():
            o = np.lcm(o, len(c))
        return int(o)

    def cycles(self) -> list[tuple[int, ...]]:
        seen = np.zeros(self.degree, dtype=bool)
        out = []
        for i in range(self.degree):
            if seen[i] or self._a[i] == i:
                seen[i] = True
                continue
            cyc = [i]
            seen[i] = True
            j = int(self._a[i])
            while j != i:
                seen[j] = True
                cyc.append(j)
                j = int(self._a[j])
            out.append(tuple(cyc))
        return out

    def fixed_points(self) -> np.ndarray:
        return np.flatnonzero(self._a == np.arange(self.degree))

    def commutes_with(self, other: "Perm") -> bool:
        return (self * other) == (other * self)

    def __eq__(self, other):
        return isinstance(other, Perm) and self._b == other._b

    def __hash__(self):
        return hash(self._b)

    def __repr__(self):
        cyc = self.cycles()
        if not cyc:
            return "Perm(())"
        return "Perm(" + "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) + ")"


def _closure_rows(gens: np.ndarray, degree: int, cap: int | None) -> np.ndarray | None:
    """Breadth-first closure from the identity.

    Returns the element rows in BFS order (generators applied in their given
    order at every node), or ``None`` as soon as more than ``cap`` elements
    have been found.
    """
    ident = np.arange(degree, dtype=np.uint8)
    if gens.shape[0] == 0:
        return ident[None, :].copy()
    seen = {ident.tobytes()}
    levels = [ident[None, :]]
    frontier = ident[None, :]
    total = 1
    while frontier.shape[0]:
        # cand[f, j] = frontier[f] then gens[j]
        cand = gens[:, frontier].transpose(1, 0, 2).reshape(-1, degree)
        buf = cand.tobytes()
        keep = []
        for i in range(cand.shape[0]):
            b = buf[i * degree:(i + 1) * degree]
            if b not in seen:
                seen.add(b)
                keep.append(i)
                total += 1
                if cap is not None and total > cap:
                    return None
        frontier = cand[keep]
        if frontier.shape[0]:
            levels.append(frontier)
    return np.concatenate(levels)


def _choose_base(rows: np.ndarray) -> np.ndarray:
    """Greedy base: a few points whose images determine every element."""
    n_el, degree = rows.shape
    if n_el == 1:
        return np.zeros(0, dtype=np.int64)
    # points are scored on a row sample; uniqueness is confirmed on all rows
    sample = rows[:: max(1, n_el // 4096)]
    base = []
    codes = np.zeros(sample.shape[0], dtype=np.int64)
    mult = 1
    while True:
        best, best_count, best_codes = None, -1, None
        for pt in range(degree):
            if pt in base:
                continue
            c = codes + sample[:, pt].astype(np.int64) * mult
            cnt = np.unique(c).size
            if cnt > best_count:
                best, best_count, best_codes = pt, cnt, c
            if cnt == sample.shape[0]:
                break
        base.append(best)
        codes = best_codes
        mult *= degree
        if best_count == sample.shape[0]:
            full = rows[:, base].astype(np.int64) @ (degree ** np.arange(len(base), dtype=np.int64))
            if np.unique(full).size == n_el:
                return np.array(base, dtype=np.int64)
        if mult > 2**62 // degree or len(base) == degree:
            raise RuntimeError("could not find a short base for keying")


class EnumeratedGroup:
    """The full element list of a permutation group, with fast lookup.

    ``elements[i]`` is the ``i``-th element in breadth-first order from the
    identity; every "first element" tie-break in the package resolves
    against this ordering.  Lookup keys are the images of a short base, so
    ``indices()`` is a vectorised ``searchsorted`` followed by a full-row
    equality check.
    """

    def __init__(self, elements: np.ndarray, generators: Sequence[Perm] = ()):
        elements = np.ascontiguousarray(elements, dtype=np.uint8)
        elements.setflags(write=False)
        self.elements = elements
        self.generators = tuple(generators)
        self.degree = elements.shape[1]
        self._base = _choose_base(elements)
        self._weights = self.degree ** np.arange(len(self._base), dtype=np.int64)
        keys = self._keys(elements)
        self._sort = np.argsort(keys, kind="stable")
        self._sorted_keys = keys[self._sort]
        self._orders = None
        self._inverse_idx = None

    def _keys(self, rows: np.ndarray) -> np.ndarray:
        if len(self._base) == 0:
            return np.zeros(rows.shape[0], dtype=np.int64)
        return rows[:, self._base].astype(np.int64) @ self._weights

    @property
    def order(self) -> int:
        return self.elements.shape[0]

    def __len__(self):
        return self.order

    def __iter__(self) -> Iterator[Perm]:
        for row in self.elements:
            yield Perm._trusted(row)

    def element(self, i: int) -> Perm:
        return Perm._trusted(self.elements[i])

    def identity(self) -> Perm:
        return Perm.identity(self.degree)

    def indices(self, rows: np.ndarray) -> np.ndarray:
        """Element index of each row, ``-1`` for rows outside the group."""
        rows = np.asarray(rows, dtype=np.uint8).reshape(-1, self.degree)
        keys = self._keys(rows)
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.minimum(pos, self.order - 1)
        idx = self._sort[pos]
        ok = (self._sorted_keys[pos] == keys) & np.all(self.elements[idx] == rows, axis=1)
        return np.where(ok, idx, -1)

    def index(self, g: Perm) -> int:
        i = int(self.indices(g.images[None, :])[0])
        if i < 0:
            raise KeyError(f"{g!r} is not a member")
        return i

    def __contains__(self, g) -> bool:
        if not isinstance(g, Perm) or g.degree != self.degree:
            return False
        return int(self.indices(g.images[None, :])[0]) >= 0

    def inverses(self) -> np.ndarray:
        """All inverse rows, aligned with ``elements``."""
        inv = np.empty_like(self.elements)
        r = np.arange(self.order)[:, None]
        inv[r, self.elements] = np.arange(self.degree, dtype=np.uint8)
        return inv

    def inverse_indices(self) -> np.ndarray:
        if self._inverse_idx is None:
            self._inverse_idx = self.indices(self.inverses())
        return self._inverse_idx

    def element_orders(self) -> np.ndarray:
        if self._orders is None:
            orders = np.zeros(self.order, dtype=np.int64)
            ident = np.arange(self.degree, dtype=np.uint8)
            power = self.elements.copy()
            k = 1
            r = np.arange(self.order)[:, None]
            while True:
                done = (orders == 0) & np.all(power == ident, axis=1)
                orders[done] = k
                if np.all(orders):
                    break
                power = self.elements[r, power]  # power then g: g[power]
                k += 1
            self._orders = orders
        return self._orders

    def conjugate_rows(self, g: Perm, rows: np.ndarray | None = None) -> np.ndarray:
        """``h^-1 g h`` for every ``h`` in ``rows`` (default: all elements)."""
        H = self.elements if rows is None else rows
        Hinv = np.empty_like(H)
        Hinv[np.arange(H.shape[0])[:, None], H] = np.arange(self.degree, dtype=np.uint8)
        # (h^-1 g h)[x] = h[g[h^-1[x]]]
        return np.take_along_axis(H, g.images[Hinv], axis=1)

    def act_by_conjugation(self, h: Perm, rows: np.ndarray) -> np.ndarray:
        """``x^h = h^-1 x h`` for each row ``x``."""
        hinv = h.inverse().images
        return h.images[rows[:, hinv]]

    def __repr__(self):
        return f"EnumeratedGroup(order={self.order}, degree={self.degree})"


@dataclass
class SubgroupHandle:
    """A subgroup given by generators, with its element rows cached.

    ``whole=True`` is the sentinel returned by a capped closure that blew
    past its cap; it stands for the ambient group and carries no rows.
    """

    generators: tuple[Perm, ...]
    rows: np.ndarray | None
    order: int
    whole: bool = False
    _members: set = field(default=None, repr=False)

    def __contains__(self, g: Perm) -> bool:
        if self.whole:
            return True
        if self._members is None:
            self._members = {r.tobytes() for r in self.rows}
        return g.images.tobytes() in self._members

    def __iter__(self) -> Iterator[Perm]:
        if self.rows is None:
            raise TypeError("the whole-group sentinel carries no element list")
        for r in self.rows:
            yield Perm._trusted(r)

    def __len__(self):
        return self.order


def _gen_array(generators: Sequence[Perm], degree: int) -> np.ndarray:
    if not generators:
        return np.zeros((0, degree), dtype=np.uint8)
    return np.stack([g.images for g in generators])


def enumerate_group(generators: Sequence[Perm], cap: int, degree: int | None = None) -> EnumeratedGroup:
    """Close ``generators`` under composition; raise :class:`CapExceeded` past ``cap``."""
    if cap < 1:
        raise ValueError("cap must be positive")
    generators = list(generators)
    if degree is None:
        degree = generators[0].degree if generators else DEFAULT_DEGREE
    rows = _closure_rows(_gen_array(generators, degree), degree, cap)
    if rows is None:
        raise CapExceeded(f"cap exceeded: closure has more than {cap} elements")
    return EnumeratedGroup(rows, generators)


def subgroup_closure(
    generators: Sequence[Perm],
    cap: int | None = None,
    ambient: EnumeratedGroup | None = None,
) -> SubgroupHandle:
    """Closure of ``generators``; past ``cap`` returns the whole-group sentinel.

    The sentinel is only meaningful when every subgroup of ``ambient`` of
    order above ``cap`` is ``ambient`` itself (2520 for U3(5)).
    """
    generators = tuple(generators)
    degree = generators[0].degree if generators else (ambient.degree if ambient else DEFAULT_DEGREE)
    rows = _closure_rows(_gen_array(generators, degree), degree, cap)
    if rows is None:
        return SubgroupHandle(generators, None, ambient.order if ambient is not None else -1, whole=True)
    return SubgroupHandle(generators, rows, rows.shape[0])


def _check_member(g: Perm, G: EnumeratedGroup):
    if g not in G:
        raise ValueError(f"{g!r} is not an element of the group")


def conjugacy_class(g: Perm, G: EnumeratedGroup) -> frozenset[Perm]:
    _check_member(g, G)
    conj = np.unique(G.conjugate_rows(g), axis=0)
    return frozenset(Perm._trusted(r) for r in conj)


def class_indices(g: Perm, G: EnumeratedGroup) -> np.ndarray:
    """Element indices of the class of ``g``, sorted."""
    _check_member(g, G)
    return np.unique(G.indices(G.conjugate_rows(g)))


def _subgroup_from_mask(G: EnumeratedGroup, mask: np.ndarray) -> SubgroupHandle:
    rows = G.elements[mask]
    if rows.shape[0] == G.order:
        return SubgroupHandle(G.generators, rows, G.order)
    return SubgroupHandle(_generating_subset(rows), rows, rows.shape[0])


def _generating_subset(rows: np.ndarray) -> tuple[Perm, ...]:
    """Greedy generators: walk the rows, keep any not yet generated."""
    degree = rows.shape[1]
    gens: list[Perm] = []
    have = {np.arange(degree, dtype=np.uint8).tobytes()}
    target = rows.shape[0]
    for r in rows:
        if len(have) == target:
            break
        if r.tobytes() in have:
            continue
        gens.append(Perm._trusted(r))
        closed = _closure_rows(_gen_array(gens, degree), degree, None)
        have = {c.tobytes() for c in closed}
    return tuple(gens)


def centralizer(g: Perm, G: EnumeratedGroup) -> SubgroupHandle:
    _check_member(g, G)
    E = G.elements
    # h g == g h  <=>  g[h] == h[g]
    mask = np.all(g.images[E] == E[:, g.images], axis=1)
    return _subgroup_from_mask(G, mask)


def _member_mask(G: EnumeratedGroup, H: SubgroupHandle) -> np.ndarray:
    mask = np.zeros(G.order, dtype=bool)
    if H.whole:
        mask[:] = True
        return mask
    idx = G.indices(H.rows)
    if np.any(idx < 0):
        raise ValueError("subgroup is not contained in the group")
    mask[idx] = True
    return mask


def normalizer(H: SubgroupHandle, G: EnumeratedGroup) -> SubgroupHandle:
    inside = _member_mask(G, H)
    if H.whole or H.order == G.order:
        return SubgroupHandle(G.generators, G.elements, G.order)
    keep = np.ones(G.order, dtype=bool)
    for h in H.generators:
        conj_idx = G.indices(G.conjugate_rows(h))
        keep &= (conj_idx >= 0) & inside[np.maximum(conj_idx, 0)]
    return _subgroup_from_mask(G, keep)


def _subgroup_key(G: EnumeratedGroup, rows: np.ndarray) -> bytes:
    return np.sort(G.indices(rows)).tobytes()


def canonical_conjugator(h, base, G: EnumeratedGroup) -> Perm:
    """First ``g`` in enumeration order with ``h ** g == base``.

    ``h`` and ``base`` are both :class:`Perm` or both :class:`SubgroupHandle`.
    """
    if isinstance(h, Perm):
        _check_member(h, G)
        _check_member(base, G)
        conj = G.conjugate_rows(h)
        hit = np.flatnonzero(np.all(conj == base.images, axis=1))
        if hit.size == 0:
            raise NotConjugate("elements are not conjugate")
        return G.element(int(hit[0]))
    if h.order != base.order:
        raise NotConjugate("subgroups of different orders")
    target = _member_mask(G, base)
    ok = np.ones(G.order, dtype=bool)
    for gen in h.generators:
        idx = G.indices(G.conjugate_rows(gen))
        ok &= (idx >= 0) & target[np.maximum(idx, 0)]
    hit = np.flatnonzero(ok)
    if hit.size == 0:
        raise NotConjugate("subgroups are not conjugate")
    return G.element(int(hit[0]))


def canonical_conjugators(targets: np.ndarray, base: Perm, G: EnumeratedGroup, key=None) -> np.ndarray:
    """Bulk :func:`canonical_conjugator` for elements.

    ``targets`` are element indices.  Returns, for each target ``h``, the
    index of the first ``g`` with ``h ** g == base``.  ``key`` optionally
    maps element indices to class labels (e.g. the cyclic subgroup an
    element generates), turning this into conjugation of those labels.
    """
    # g base g^-1 == h  <=>  h ** g == base
    inv = G.inverses()
    img = G.indices(G.conjugate_rows(base, inv))
    if np.any(img < 0):
        raise ValueError("base is not in the group")
    if key is not None:
        img = key[img]
        targets = key[targets]
    uniq, first = np.unique(img, return_index=True)
    pos = np.searchsorted(uniq, targets)
    pos = np.minimum(pos, uniq.size - 1)
    if np.any(uniq[pos] != targets):
        raise NotConjugate("some target is not conjugate to the base")
    return first[pos]


# -- cache file --------------------------------------------------------------

_MAGIC = b"PGRP"
_VERSION = 1
# magic(4) version(u32) count(u64) -> 16 bytes, followed by count rows


def write_cache(path, G: EnumeratedGroup) -> str:
    """Write ``G`` (generators first, then elements) and return its sha256."""
    path = Path(path)
    gens = _gen_array(G.generators, G.degree)
    header = _MAGIC + struct.pack("<IQ", _VERSION, G.order)
    ghead = struct.pack("<I", gens.shape[0])
    blob = header + G.elements.tobytes() + ghead + gens.tobytes()
    path.write_bytes(blob)
    return hashlib.sha256(blob).hexdigest()


def read_cache(path, degree=DEFAULT_DEGREE, sha256: str | None = None) -> EnumeratedGroup:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise CacheError(str(exc)) from exc
    if sha256 is not None and hashlib.sha256(blob).hexdigest() != sha256:
        raise CacheError(f"checksum mismatch for {path}")
    if len(blob) < 16 or blob[:4] != _MAGIC:
        raise CacheError(f"{path} is not a group cache file")
    version, count = struct.unpack("<IQ", blob[4:16])
    if version != _VERSION:
        raise CacheError(f"unsupported cache version {version}")
    end = 16 + count * degree
    if len(blob) < end + 4:
        raise CacheError(f"{path} is truncated")
    rows = np.frombuffer(blob[16:end], dtype=np.uint8).reshape(count, degree)
    (ng,) = struct.unpack("<I", blob[end:end + 4])
    g = np.frombuffer(blob[end + 4:end + 4 + ng * degree], dtype=np.uint8).reshape(ng, degree)
    if g.shape[0] != ng:
        raise CacheError(f"{path} is truncated")
    return EnumeratedGroup(rows.copy(), [Perm._trusted(r.copy()) for r in g])
