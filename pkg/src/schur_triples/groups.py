"""Finite abelian groups given as products of cyclic factors.

Elements are addressed by a mixed-radix canonical index in ``[0, n)``; the
first factor is the most significant digit, so ``Z2^3`` indexes ``(1, 0, 1)``
as ``5``.  This matches numpy's C-order ``ravel_multi_index`` and is used
throughout the package as the interchange format for sets.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

__all__ = [
    "DENSE_CAP",
    "GroupSpecError",
    "GroupSpec",
    "GroupElement",
    "ElementSet",
    "SubgroupHandle",
    "GroupTypeTag",
    "Homomorphism",
    "make_group",
    "parse_group",
    "add",
    "neg",
    "subgroups_of_prime_index",
    "surjections_to_cyclic",
    "iter_surjections",
    "enumerate_subgroups",
    "classify_group_type",
    "max_sumfree_size",
    "is_prime",
    "prime_factors",
]

DENSE_CAP = 1 << 24


class GroupSpecError(ValueError):
    """Raised for malformed group descriptions; ``column`` is 1-based."""

    def __init__(self, message: str, column: int | None = None):
        if column is not None:
            message = f"{message} (column {column})"
        super().__init__(message)
        self.column = column


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` in increasing order."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class GroupSpec:
    """``Z_{m_1} x ... x Z_{m_k}`` with the factor order kept as given."""

    factors: tuple[int, ...]
    cap: int = field(default=DENSE_CAP, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(int(m) for m in self.factors))
        if not self.factors:
            raise GroupSpecError("a group needs at least one cyclic factor")
        for m in self.factors:
            if m < 2:
                raise GroupSpecError(f"cyclic factor order must be >= 2, got {m}")
        if math.prod(self.factors) > self.cap:
            raise GroupSpecError(
                f"group order {math.prod(self.factors)} exceeds dense cap {self.cap}"
            )

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.factors)

    @property
    def name(self) -> str:
        parts = []
        for m, run in itertools.groupby(self.factors):
            k = len(list(run))
            parts.append(f"Z{m}" if k == 1 else f"Z{m}^{k}")
        return "x".join(parts)

    def __str__(self) -> str:
        return self.name

    def is_elementary(self, q: int) -> bool:
        """True for ``Z_q^k``."""
        return all(m == q for m in self.factors)

    def is_cyclic_prime(self) -> bool:
        return self.rank == 1 and is_prime(self.factors[0])

    # -- indexing ---------------------------------------------------------

    def coords(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.order:
            raise ValueError(f"index {index} out of range for {self.name}")
        out = []
        for m in reversed(self.factors):
            index, c = divmod(index, m)
            out.append(c)
        return tuple(reversed(out))

    def index(self, coords: Sequence[int]) -> int:
        if len(coords) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(coords)}")
        idx = 0
        for c, m in zip(coords, self.factors):
            if not 0 <= c < m:
                raise ValueError(f"coordinate {c} out of range for Z{m}")
            idx = idx * m + c
        return idx

    def coords_array(self, indices) -> np.ndarray:
        """``(len(indices), rank)`` coordinate matrix."""
        idx = np.asarray(indices, dtype=np.int64)
        return np.stack(np.unravel_index(idx, self.factors), axis=-1).astype(np.int64)

    def index_array(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        mods = np.asarray(self.factors, dtype=np.int64)
        coords = np.mod(coords, mods)
        return np.ravel_multi_index(tuple(coords.T), self.factors).astype(np.int64)

    def elements(self) -> range:
        return range(self.order)

    def element(self, x: "int | Sequence[int] | GroupElement") -> "GroupElement":
        return GroupElement(self, self._as_index(x))

    def _as_index(self, x) -> int:
        if isinstance(x, GroupElement):
            if x.group != self:
                raise ValueError(f"element of {x.group.name} used in {self.name}")
            return x.index
        if isinstance(x, (tuple, list)):
            return self.index(x)
        x = int(x)
        if not 0 <= x < self.order:
            raise ValueError(f"index {x} out of range for {self.name}")
        return x

    # -- arithmetic on canonical indices ------------------------------------

    def add_idx(self, i: int, j: int) -> int:
        out = 0
        ci, cj = self.coords(i), self.coords(j)
        for a, b, m in zip(ci, cj, self.factors):
            out = out * m + (a + b) % m
        return out

    def neg_idx(self, i: int) -> int:
        out = 0
        for a, m in zip(self.coords(i), self.factors):
            out = out * m + (-a) % m
        return out

    def sub_idx(self, i: int, j: int) -> int:
        return self.add_idx(i, self.neg_idx(j))

    def scale_idx(self, i: int, s: int) -> int:
        out = 0
        for a, m in zip(self.coords(i), self.factors):
            out = out * m + (a * s) % m
        return out

    def add_arrays(self, i, j) -> np.ndarray:
        """Vectorised ``i + j`` on broadcastable index arrays."""
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        if self.rank == 1:
            return (i + j) % self.order
        ci = np.unravel_index(i, self.factors)
        cj = np.unravel_index(j, self.factors)
        summed = tuple((a + b) % m for a, b, m in zip(ci, cj, self.factors))
        return np.ravel_multi_index(summed, self.factors).astype(np.int64)

    def neg_array(self, i) -> np.ndarray:
        i = np.asarray(i, dtype=np.int64)
        if self.rank == 1:
            return (-i) % self.order
        ci = np.unravel_index(i, self.factors)
        neg = tuple((-a) % m for a, m in zip(ci, self.factors))
        return np.ravel_multi_index(neg, self.factors).astype(np.int64)

    def sub_arrays(self, i, j) -> np.ndarray:
        return self.add_arrays(i, self.neg_array(j))

    def scale_array(self, i, s: int) -> np.ndarray:
        i = np.asarray(i, dtype=np.int64)
        ci = np.unravel_index(i, self.factors)
        scaled = tuple((a * s) % m for a, m in zip(ci, self.factors))
        return np.ravel_multi_index(scaled, self.factors).astype(np.int64)

    def addition_table(self) -> np.ndarray:
        """Full ``n x n`` Cayley table; only sensible for small groups."""
        return _addition_table(self)

    def add(self, x, y):
        """``x + y`` for indices, coordinate tuples or :class:`GroupElement`."""
        r = self.add_idx(self._as_index(x), self._as_index(y))
        return self._like(x, r)

    def neg(self, x):
        return self._like(x, self.neg_idx(self._as_index(x)))

    def _like(self, x, index: int):
        if isinstance(x, GroupElement):
            return GroupElement(self, index)
        if isinstance(x, (tuple, list)):
            return self.coords(index)
        return index


@lru_cache(maxsize=64)
def _addition_table(G: GroupSpec) -> np.ndarray:
    if G.order > 4096:
        raise ValueError(f"addition table for order {G.order} is too large")
    idx = np.arange(G.order)
    table = G.add_arrays(idx[:, None], idx[None, :])
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class GroupElement:
    group: GroupSpec
    index: int

    def __post_init__(self) -> None:
        if not 0 <= self.index < self.group.order:
            raise ValueError(f"index {self.index} out of range for {self.group.name}")

    @property
    def coords(self) -> tuple[int, ...]:
        return self.group.coords(self.index)

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return self.group.add(self, other)

    def __neg__(self) -> "GroupElement":
        return self.group.neg(self)

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)


def add(G: GroupSpec, x, y):
    return G.add(x, y)


def neg(G: GroupSpec, x):
    return G.neg(x)


# ---------------------------------------------------------------------------
# Sets


ElementLike = Union[int, Sequence[int], GroupElement]


class ElementSet:
    """Immutable subset of a group stored as a dense membership bitmap."""

    __slots__ = ("group", "_bitmap", "_card", "_key")

    def __init__(self, group: GroupSpec, bitmap):
        bm = np.array(bitmap, dtype=bool, copy=True).reshape(-1)
        if bm.shape[0] != group.order:
            raise ValueError(
                f"bitmap length {bm.shape[0]} does not match group order {group.order}"
            )
        bm.setflags(write=False)
        self.group = group
        self._bitmap = bm
        self._card = int(np.count_nonzero(bm))
        self._key = None

    @classmethod
    def from_indices(cls, group: GroupSpec, indices: Iterable[int]) -> "ElementSet":
        bm = np.zeros(group.order, dtype=bool)
        idx = np.fromiter((int(i) for i in indices), dtype=np.int64)
        if idx.size:
            if idx.min() < 0 or idx.max() >= group.order:
                bad = idx[(idx < 0) | (idx >= group.order)][0]
                raise ValueError(f"element {bad} out of range for {group.name}")
            bm[idx] = True
        return cls(group, bm)

    @classmethod
    def from_coords(cls, group: GroupSpec, coords: Iterable[Sequence[int]]) -> "ElementSet":
        return cls.from_indices(group, (group.index(c) for c in coords))

    @classmethod
    def of(cls, group: GroupSpec, elements: Iterable[ElementLike]) -> "ElementSet":
        return cls.from_indices(group, (group._as_index(x) for x in elements))

    @classmethod
    def empty(cls, group: GroupSpec) -> "ElementSet":
        return cls(group, np.zeros(group.order, dtype=bool))

    @classmethod
    def full(cls, group: GroupSpec) -> "ElementSet":
        return cls(group, np.ones(group.order, dtype=bool))

    @property
    def bitmap(self) -> np.ndarray:
        return self._bitmap

    @property
    def cardinality(self) -> int:
        return self._card

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self._bitmap)

    def __len__(self) -> int:
        return self._card

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices.tolist())

    def __contains__(self, x) -> bool:
        return bool(self._bitmap[self.group._as_index(x)])

    def _check(self, other: "ElementSet") -> None:
        if other.group != self.group:
            raise ValueError(f"sets of {self.group.name} and {other.group.name} mixed")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ElementSet):
            return NotImplemented
        return self.group == other.group and bool(np.array_equal(self._bitmap, other._bitmap))

    def __hash__(self) -> int:
        if self._key is None:
            self._key = hash((self.group, np.packbits(self._bitmap).tobytes()))
        return self._key

    def __repr__(self) -> str:
        shown = self.indices.tolist()
        if len(shown) > 20:
            body = ", ".join(map(str, shown[:20])) + ", ..."
        else:
            body = ", ".join(map(str, shown))
        return f"ElementSet({self.group.name}, {{{body}}})"

    def __or__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.group, self._bitmap | other._bitmap)

    def __and__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.group, self._bitmap & other._bitmap)

    def __sub__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.group, self._bitmap & ~other._bitmap)

    def __le__(self, other: "ElementSet") -> bool:
        self._check(other)
        return not bool(np.any(self._bitmap & ~other._bitmap))

    def complement(self) -> "ElementSet":
        return ElementSet(self.group, ~self._bitmap)

    def with_element(self, x) -> "ElementSet":
        bm = self._bitmap.copy()
        bm[self.group._as_index(x)] = True
        return ElementSet(self.group, bm)

    def without_element(self, x) -> "ElementSet":
        bm = self._bitmap.copy()
        bm[self.group._as_index(x)] = False
        return ElementSet(self.group, bm)

    def image(self, mapping: np.ndarray) -> "ElementSet":
        """Image under an index map given as an array of length ``n``."""
        return ElementSet.from_indices(self.group, np.asarray(mapping)[self.indices])

    def negate(self) -> "ElementSet":
        return ElementSet.from_indices(self.group, self.group.neg_array(self.indices))

    def translate(self, x) -> "ElementSet":
        return ElementSet.from_indices(
            self.group, self.group.add_arrays(self.indices, self.group._as_index(x))
        )

    def scale(self, s: int) -> "ElementSet":
        """Image under multiplication by the integer ``s``."""
        return ElementSet.from_indices(self.group, self.group.scale_array(self.indices, s))


# ---------------------------------------------------------------------------
# Subgroups and homomorphisms


@dataclass(frozen=True)
class SubgroupHandle:
    carrier: ElementSet
    index_in_G: int

    @classmethod
    def from_set(cls, carrier: ElementSet) -> "SubgroupHandle":
        if carrier.cardinality == 0 or carrier.group.order % carrier.cardinality:
            raise ValueError("carrier size must divide the group order")
        return cls(carrier, carrier.group.order // carrier.cardinality)

    @property
    def group(self) -> GroupSpec:
        return self.carrier.group

    @property
    def order(self) -> int:
        return self.carrier.cardinality

    def __contains__(self, x) -> bool:
        return x in self.carrier

    def validate(self) -> None:
        """Raise ``ValueError`` unless the carrier is a subgroup with the stated index."""
        G = self.group
        bm = self.carrier.bitmap
        idx = self.carrier.indices
        if not bm[0]:
            raise ValueError("subgroup must contain zero")
        if not bm[G.neg_array(idx)].all():
            raise ValueError("subgroup not closed under negation")
        if not bm[G.add_arrays(idx[:, None], idx[None, :])].all():
            raise ValueError("subgroup not closed under addition")
        if self.index_in_G * self.order != G.order:
            raise ValueError("index times order differs from the group order")


@dataclass(frozen=True)
class Homomorphism:
    """``G -> Z_m`` sending the generator of factor ``i`` to ``images[i]``."""

    group: GroupSpec
    modulus: int
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.group.rank:
            raise ValueError("one image per cyclic factor is required")
        for g, mi in zip(self.images, self.group.factors):
            if (g * mi) % self.modulus:
                raise ValueError(f"image {g} of a Z{mi} generator is not well defined")

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            return self.apply(x)
        return int(self.apply(np.asarray([self.group._as_index(x)]))[0])

    def apply(self, indices) -> np.ndarray:
        coords = self.group.coords_array(indices)
        return (coords @ np.asarray(self.images, dtype=np.int64)) % self.modulus

    def values(self) -> np.ndarray:
        """Image of every group element, by canonical index."""
        return self.apply(np.arange(self.group.order))

    def is_surjective(self) -> bool:
        return math.gcd(self.modulus, *self.images) == 1

    def preimage(self, residues: Iterable[int]) -> ElementSet:
        wanted = np.zeros(self.modulus, dtype=bool)
        wanted[[r % self.modulus for r in residues]] = True
        return ElementSet(self.group, wanted[self.values()])

    def kernel(self) -> SubgroupHandle:
        return SubgroupHandle.from_set(self.preimage([0]))


def iter_surjections(G: GroupSpec, m: int) -> Iterator[Homomorphism]:
    """Surjections ``G -> Z_m`` in lexicographic order of generator images."""
    choices = []
    for mi in G.factors:
        step = m // math.gcd(m, mi)
        choices.append(range(0, m, step))
    for images in itertools.product(*choices):
        if math.gcd(m, *images) == 1:
            yield Homomorphism(G, m, tuple(images))


def surjections_to_cyclic(G: GroupSpec, m: int) -> list[Homomorphism]:
    if m < 1 or G.exponent % m:
        raise ValueError(f"Z{m} is not a quotient of {G.name}: {m} does not divide the exponent")
    return list(iter_surjections(G, m))


def subgroups_of_prime_index(G: GroupSpec, q: int) -> list[SubgroupHandle]:
    """All subgroups of index ``q`` (kernels of surjections to ``Z_q``)."""
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if G.exponent % q:
        return []
    out = []
    for phi in iter_surjections(G, q):
        # one representative per line of proportional maps
        first = next(g for g in phi.images if g)
        if first != 1:
            continue
        out.append(phi.kernel())
    return out


def _span(G: GroupSpec, members: np.ndarray, x: int) -> np.ndarray:
    """Bitmap of the subgroup generated by ``members`` (a subgroup bitmap) and ``x``."""
    bm = members.copy()
    base = np.flatnonzero(members)
    step = x
    while not bm[step]:
        bm[G.add_arrays(base, step)] = True
        step = G.add_idx(step, x)
    return bm


def enumerate_subgroups(G: GroupSpec, order: int | None = None) -> list[SubgroupHandle]:
    """Every subgroup of ``G`` (optionally only those of a given order).

    Built by repeatedly adjoining one element to already-found subgroups; fine
    for the desk-scale groups the oracle works with.
    """
    if G.order > 4096:
        raise ValueError("subgroup enumeration is limited to groups of order <= 4096")
    trivial = np.zeros(G.order, dtype=bool)
    trivial[0] = True
    seen = {trivial.tobytes(): trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for bm in frontier:
            for x in np.flatnonzero(~bm):
                grown = _span(G, bm, int(x))
                key = grown.tobytes()
                if key not in seen:
                    seen[key] = grown
                    nxt.append(grown)
        frontier = nxt
    subs = [SubgroupHandle.from_set(ElementSet(G, bm)) for bm in seen.values()]
    if order is not None:
        subs = [H for H in subs if H.order == order]
    subs.sort(key=lambda H: (H.order, H.carrier.indices.tolist()))
    return subs


# ---------------------------------------------------------------------------
# Classification


@dataclass(frozen=True)
class GroupTypeTag:
    kind: str  # "I", "II" or "III"
    p: int | None = None
    m: int | None = None

    def __str__(self) -> str:
        if self.kind == "I":
            return f"I({self.p})"
        if self.kind == "III":
            return f"III({self.m})"
        return "II"


def classify_group_type(G: GroupSpec) -> GroupTypeTag:
    primes = prime_factors(G.order)
    type_one = [p for p in primes if p % 3 == 2]
    if type_one:
        return GroupTypeTag("I", p=type_one[0])
    if 3 in primes:
        return GroupTypeTag("II")
    return GroupTypeTag("III", m=G.exponent)


def max_sumfree_size(G: GroupSpec) -> int:
    """Size of the largest sum-free subset of ``G``."""
    n = G.order
    tag = classify_group_type(G)
    if tag.kind == "I":
        num, den = n * (tag.p + 1), 3 * tag.p
    elif tag.kind == "II":
        num, den = n, 3
    else:
        num, den = n * (tag.m - 1), 3 * tag.m
    assert num % den == 0, f"non-integral sum-free size for {G.name}"
    return num // den


# ---------------------------------------------------------------------------
# Construction and parsing


def make_group(orders: Sequence[int], cap: int | None = None) -> GroupSpec:
    orders = [int(m) for m in orders]
    for m in orders:
        if m < 2:
            raise GroupSpecError(f"cyclic factor order must be >= 2, got {m}")
    return GroupSpec(tuple(orders), cap=DENSE_CAP if cap is None else cap)


_ATOM = re.compile(r"z(\d+)(?:\^(\d+))?", re.IGNORECASE)


def parse_group(text: str, cap: int | None = None) -> GroupSpec:
    """Parse ``Z3xZ7``, ``Z2^5``, ``z4xz2^2`` and similar."""
    pos = 0
    orders: list[int] = []
    if not text:
        raise GroupSpecError("empty group spec", 1)
    while True:
        m = _ATOM.match(text, pos)
        if m is None:
            raise GroupSpecError(f"expected 'Z<m>' in {text!r}", pos + 1)
        order = int(m.group(1))
        power = int(m.group(2)) if m.group(2) is not None else 1
        if order < 2:
            raise GroupSpecError(f"cyclic factor order must be >= 2, got {order}", m.start(1) + 1)
        if power < 1:
            raise GroupSpecError("exponent must be >= 1", m.start(2) + 1)
        orders.extend([order] * power)
        pos = m.end()
        if pos == len(text):
            break
        if text[pos] not in "xX":
            raise GroupSpecError(f"expected 'x' between factors in {text!r}", pos + 1)
        pos += 1
    return make_group(orders, cap=cap)
