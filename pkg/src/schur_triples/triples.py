"""Exact Schur-triple counting, sumsets, stabilisers and the Pollard/Kneser checks.

A Schur triple of ``A`` is an ordered ``(x, y, z)`` in ``A^3`` with ``x + y = z``;
``(x, y, z)`` and ``(y, x, z)`` are distinct when ``x != y`` and ``x = y`` is allowed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .groups import ElementSet, GroupSpec, SubgroupHandle, is_prime

__all__ = [
    "count_schur_naive",
    "count_schur_transform",
    "count_schur",
    "cyclic_convolution",
    "schur_delta_add",
    "schur_delta_remove",
    "st_per_element",
    "is_sum_free",
    "RepresentationProfile",
    "representation_profile",
    "PollardReport",
    "pollard_check",
    "ap_differences",
    "sumset",
    "difference_set",
    "stabiliser",
    "KneserReport",
    "kneser_check",
]

FLOAT_ROUNDING_SLACK = 0.25
PAIR_BLOCK = 1 << 20


def count_schur_naive(A: ElementSet) -> int:
    """Count ``(x, y, z)`` with ``x + y = z`` by scanning every pair of ``A``."""
    G = A.group
    bm = A.bitmap
    idx = A.indices
    k = idx.size
    if k == 0:
        return 0
    coords = [c.astype(np.int32) for c in np.unravel_index(idx, G.factors)]
    weights = np.cumprod((1,) + G.factors[:0:-1])[::-1].tolist()
    total = 0
    step = max(1, PAIR_BLOCK // k)
    for lo in range(0, k, step):
        flat = np.zeros((min(step, k - lo), k), dtype=np.int32)
        for c, m, w in zip(coords, G.factors, weights):
            s = c[lo : lo + step, None] + c[None, :]
            s -= m * (s >= m)
            flat += s * w if w != 1 else s
        total += int(np.count_nonzero(bm[flat]))
    return total


def _exact_convolution(f: np.ndarray, g: np.ndarray, G: GroupSpec, subtract: bool) -> np.ndarray:
    # sum of translates of f over the support of g; exact in int64
    out = np.zeros(G.order, dtype=np.int64)
    fi = f.astype(np.int64)
    support = np.flatnonzero(g)
    shifts = G.neg_array(support) if subtract else support
    idx = np.arange(G.order)
    for y, w in zip(shifts, g[support]):
        out[G.add_arrays(idx, y)] += fi * int(w)
    return out


def cyclic_convolution(
    f: np.ndarray, g: np.ndarray, G: GroupSpec, *, subtract: bool = False, use_fft: bool = True
) -> np.ndarray:
    """Exact ``h(z) = sum_{x+y=z} f(x) g(y)`` over ``G`` (``x-y=z`` if ``subtract``).

    ``f`` and ``g`` are non-negative integer arrays indexed canonically.  The
    floating transform result is kept only if every entry rounds with an error
    below 0.25; otherwise the exact translate-sum path is used.
    """
    f = np.asarray(f)
    g = np.asarray(g)
    if use_fft:
        shape = G.factors
        F = np.fft.fftn(f.reshape(shape).astype(np.float64))
        Gh = np.fft.fftn(g.reshape(shape).astype(np.float64))
        if subtract:
            Gh = np.conj(Gh)
        h = np.fft.ifftn(F * Gh).real.reshape(-1)
        rounded = np.rint(h)
        if np.all(np.abs(h - rounded) < FLOAT_ROUNDING_SLACK) and np.all(rounded >= 0):
            return rounded.astype(np.int64)
    return _exact_convolution(f, g, G, subtract)


def count_schur_transform(A: ElementSet, *, use_fft: bool = True) -> int:
    """``sum_{z in A} r_A(z)`` with ``r_A`` the self-convolution of the indicator."""
    if A.cardinality == 0:
        return 0
    ind = A.bitmap.astype(np.int64)
    r = cyclic_convolution(ind, ind, A.group, use_fft=use_fft)
    return int(r[A.bitmap].sum())


def count_schur(A: ElementSet) -> int:
    """Default counter: pair scan for small sets, transform otherwise."""
    if A.cardinality * A.cardinality <= 4 * A.group.order or A.cardinality <= 64:
        return count_schur_naive(A)
    return count_schur_transform(A)


def _triples_through(G: GroupSpec, bm: np.ndarray, idx: np.ndarray, x: int) -> int:
    # triples of the set (bitmap bm, which contains x) having x in some position;
    # inclusion-exclusion over the three positions
    c_first = int(np.count_nonzero(bm[G.add_arrays(x, idx)]))
    c_last = int(np.count_nonzero(bm[G.sub_arrays(x, idx)]))
    both_summands = int(bm[G.add_idx(x, x)])
    zero_in = int(bm[0])
    return 2 * c_first + c_last - both_summands - 2 * zero_in + int(x == 0)


def schur_delta_add(A: ElementSet, x) -> int:
    """``ST(A + {x}) - ST(A)`` for ``x`` not in ``A``; ``O(|A|)``."""
    G = A.group
    x = G._as_index(x)
    if A.bitmap[x]:
        raise ValueError(f"element {x} already in the set")
    bm = A.bitmap.copy()
    bm[x] = True
    return _triples_through(G, bm, np.flatnonzero(bm), x)


def schur_delta_remove(A: ElementSet, x) -> int:
    """``ST(A) - ST(A - {x})`` for ``x`` in ``A``."""
    G = A.group
    x = G._as_index(x)
    if not A.bitmap[x]:
        raise ValueError(f"element {x} not in the set")
    return _triples_through(G, A.bitmap, A.indices, x)


def st_per_element(A: ElementSet, x) -> int:
    """Number of Schur triples of ``A`` in which ``x`` occurs (each triple counted once)."""
    return schur_delta_remove(A, x)


def is_sum_free(A: ElementSet) -> bool:
    return count_schur_naive(A) == 0


# ---------------------------------------------------------------------------
# Representation functions


@dataclass(frozen=True)
class RepresentationProfile:
    """``counts[z]`` = number of ``(x, y)`` in ``A x B`` with ``x + y = z`` (or ``x - y``)."""

    group: GroupSpec
    counts: np.ndarray
    mode: str = "sum"

    def N(self, r: int) -> int:
        """Number of elements with at least ``r`` representations."""
        return int(np.count_nonzero(self.counts >= r))

    def N_within(self, r: int, S: ElementSet) -> int:
        """Elements of ``S`` with at least ``r`` representations."""
        return int(np.count_nonzero((self.counts >= r) & S.bitmap))

    def tail_counts(self) -> list[int]:
        """``[N_1, N_2, ..., N_max]``."""
        top = int(self.counts.max()) if self.counts.size else 0
        return [self.N(r) for r in range(1, top + 1)]

    def support(self) -> ElementSet:
        return ElementSet(self.group, self.counts > 0)


def representation_profile(A: ElementSet, B: ElementSet, mode: str = "sum") -> RepresentationProfile:
    if A.group != B.group:
        raise ValueError("sets from different groups")
    if mode not in ("sum", "difference"):
        raise ValueError(f"mode must be 'sum' or 'difference', got {mode!r}")
    G = A.group
    counts = np.zeros(G.order, dtype=np.int64)
    ia, ib = A.indices, B.indices
    if mode == "difference":
        ib = G.neg_array(ib)
    for y in ib:
        np.add.at(counts, G.add_arrays(ia, y), 1)
    counts.setflags(write=False)
    return RepresentationProfile(G, counts, mode)


def _translates_union(A: ElementSet, shifts: np.ndarray) -> ElementSet:
    G = A.group
    out = np.zeros(G.order, dtype=bool)
    ia = A.indices
    for y in shifts:
        out[G.add_arrays(ia, y)] = True
    return ElementSet(G, out)


def sumset(A: ElementSet, B: ElementSet) -> ElementSet:
    A._check(B)
    if A.cardinality < B.cardinality:
        A, B = B, A
    return _translates_union(A, B.indices)


def difference_set(A: ElementSet, B: ElementSet) -> ElementSet:
    A._check(B)
    return _translates_union(A, A.group.neg_array(B.indices))


def stabiliser(S: ElementSet) -> SubgroupHandle:
    """``{x : S + x = S}``."""
    if S.cardinality == 0:
        raise ValueError("stabiliser of the empty set is not defined here")
    G = S.group
    bm = S.bitmap
    idx = S.indices
    # x must move the first element of S into S
    candidates = G.sub_arrays(idx, idx[0])
    keep = np.zeros(G.order, dtype=bool)
    for x in candidates:
        if bm[G.add_arrays(idx, x)].all():
            keep[x] = True
    return SubgroupHandle.from_set(ElementSet(G, keep))


# ---------------------------------------------------------------------------
# Pollard


@dataclass(frozen=True)
class PollardReport:
    p: int
    r: int
    lhs: int
    rhs: int
    equality: bool
    cases: tuple[str, ...] = field(default=())

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs


@lru_cache(maxsize=1 << 16)
def ap_differences(S: ElementSet) -> frozenset[int]:
    """Common differences ``d`` in ``1..p-1`` for which ``S`` is an arithmetic progression in ``Z_p``."""
    p = S.group.order
    k = S.cardinality
    if k == 0:
        return frozenset()
    out = set()
    steps = np.arange(k)
    for d in range(1, p):
        for start in range(p):
            if S.bitmap[(start + d * steps) % p].all():
                out.add(d)
                break
    return frozenset(out)


def pollard_check(p: int, A: ElementSet, B: ElementSet, r: int) -> PollardReport:
    """Evaluate ``N_1 + ... + N_r >= r * min(p, |A| + |B| - r)`` and the equality cases.

    ``cases`` holds the labels ``"i"``..``"iv"`` of every equality condition
    the pair satisfies, whether or not equality actually holds.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    G = A.group
    if G.factors != (p,) or B.group != G:
        raise ValueError(f"both sets must live in Z{p}")
    a, b = A.cardinality, B.cardinality
    if not 1 <= r <= min(a, b):
        raise ValueError(f"r={r} outside [1, min(|A|, |B|)] = [1, {min(a, b)}]")
    prof = representation_profile(A, B)
    lhs = sum(prof.N(j) for j in range(1, r + 1))
    rhs = r * min(p, a + b - r)
    cases = []
    if min(a, b) == r:
        cases.append("i")
    if a + b >= p + r:
        cases.append("ii")
    if a == b == r + 1:
        neg_a = A.negate()
        if any(neg_a.translate(x) == B for x in range(p)):
            cases.append("iii")
    if ap_differences(A) & ap_differences(B):
        cases.append("iv")
    return PollardReport(p, r, lhs, rhs, lhs == rhs, tuple(cases))


# ---------------------------------------------------------------------------
# Kneser


@dataclass(frozen=True)
class KneserReport:
    applicable: bool
    sumset_size: int
    a_plus_h: int | None = None
    b_plus_h: int | None = None
    h_size: int | None = None
    passed: bool | None = None


def kneser_check(A: ElementSet, B: ElementSet) -> KneserReport:
    """Check ``|A+B| = |A+H| + |B+H| - |H|`` with ``H = Stab(A+B)`` when ``|A+B| <= |A|+|B|-1``."""
    if A.cardinality == 0 or B.cardinality == 0:
        raise ValueError("Kneser's theorem needs non-empty sets")
    S = sumset(A, B)
    if S.cardinality > A.cardinality + B.cardinality - 1:
        return KneserReport(False, S.cardinality)
    H = stabiliser(S)
    ah = sumset(A, H.carrier).cardinality
    bh = sumset(B, H.carrier).cardinality
    ok = S.cardinality == ah + bh - H.order
    return KneserReport(True, S.cardinality, ah, bh, H.order, ok)
