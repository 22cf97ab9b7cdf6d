"""Extremal sets, closed-form lower bounds and the sum-free removal procedure."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .groups import (
    ElementSet,
    GroupSpec,
    Homomorphism,
    classify_group_type,
    is_prime,
    iter_surjections,
    make_group,
)
from .triples import (
    _triples_through,
    count_schur,
    difference_set,
    representation_profile,
    schur_delta_remove,
)

__all__ = [
    "TYPE_I_DELTA",
    "Z3N_DELTA",
    "BoundReport",
    "OrderingTable",
    "SearchFailure",
    "zp_middle_ordering",
    "zp_prefix_set",
    "zp_min_formula",
    "typeI_base",
    "typeI_construction",
    "typeI_bound",
    "z2n_extremal_set",
    "z2n_min_formula",
    "z3n_construction",
    "z3n_bound",
    "z3zp_construction",
    "z3zp_upper_bound",
    "RemovalReport",
    "sumfree_removal",
    "greedy_sum_free_subset",
    "conjectured_z2n_cyclic_ordering",
]

TYPE_I_DELTA = Fraction(1, 82)
Z3N_DELTA = Fraction(1, 1000)


class SearchFailure(RuntimeError):
    """No sum-free subset of the requested size was found."""


@dataclass(frozen=True)
class BoundReport:
    theorem: str
    params: dict[str, Any]
    value: int | Fraction
    applicable: bool = True
    reason: str = ""

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("bound values are non-negative")
        if not self.applicable and not self.reason:
            raise ValueError("an inapplicable bound needs a reason")


@dataclass(frozen=True)
class OrderingTable:
    order: int
    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.elements) != list(range(self.order)):
            raise ValueError("ordering must list every element exactly once")

    def prefix(self, a: int) -> tuple[int, ...]:
        return self.elements[:a]

    def prefix_set(self, G: GroupSpec, a: int) -> ElementSet:
        return ElementSet.from_indices(G, self.prefix(a))


# ---------------------------------------------------------------------------
# Z_p


def _require_odd_prime(p: int) -> None:
    if p == 2 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")


def zp_middle_ordering(p: int) -> OrderingTable:
    """``(p-1)/2, (p-1)/2 + 1, (p-1)/2 - 1, (p-1)/2 + 2, ...``"""
    _require_odd_prime(p)
    mid = (p - 1) // 2
    out = []
    for pos in range(1, p + 1):
        if pos % 2 == 0:
            out.append(mid + pos // 2)
        else:
            out.append(mid - (pos - 1) // 2)
    table = OrderingTable(p, tuple(out))
    for a in range(0, p + 1, 2):
        assert set(table.prefix(a)) == set(range((p + 1 - a) // 2, (p + a - 1) // 2 + 1))
    return table


def zp_prefix_set(p: int, a: int) -> ElementSet:
    return zp_middle_ordering(p).prefix_set(make_group([p]), a)


def zp_min_formula(p: int, a: int) -> BoundReport:
    _require_odd_prime(p)
    if not 0 <= a <= p:
        raise ValueError(f"a={a} outside [0, {p}]")
    if 3 * a <= p + 1:
        value = 0
    else:
        s = 3 * a - p
        value = (s // 2) * ((s + 1) // 2)
    return BoundReport("Zp", {"p": p, "a": a}, value)


# ---------------------------------------------------------------------------
# type I(p)


def typeI_base(G: GroupSpec, p: int) -> tuple[Homomorphism, ElementSet, ElementSet]:
    """``(phi, A_0, pool)``: the first surjection onto ``Z_p``, the sum-free base
    ``phi^-1({k+1..2k+1})`` and the layer ``phi^-1({k})`` for ``p = 3k + 2``."""
    tag = classify_group_type(G)
    if tag.kind != "I" or tag.p != p:
        raise ValueError(f"{G.name} is of type {tag}, not I({p})")
    k = (p - 2) // 3
    phi = next(iter_surjections(G, p))
    return phi, phi.preimage(range(k + 1, 2 * k + 2)), phi.preimage([k])


def typeI_construction(
    G: GroupSpec, p: int, t: int, *, seed: int | None = None, strict: bool = False
) -> ElementSet:
    """``A_0`` together with a ``t``-element sum-free subset of ``phi^-1({k})``.

    With ``strict`` the size is limited to ``t <= 2|G|/(7p)``, the range where a
    sum-free subset is guaranteed to exist; otherwise any ``t`` for which the
    search succeeds is accepted.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    _, base, pool = typeI_base(G, p)
    if strict and 7 * p * t > 2 * G.order:
        raise ValueError(f"t={t} exceeds 2|G|/(7p) = {Fraction(2 * G.order, 7 * p)}")
    extra = greedy_sum_free_subset(pool, t, seed=seed)
    out = base | extra
    assert out.cardinality == G.order * (p + 1) // (3 * p) + t
    return out


def typeI_bound(G: GroupSpec, p: int, t: int, delta: Fraction = TYPE_I_DELTA) -> BoundReport:
    tag = classify_group_type(G)
    if tag.kind != "I" or tag.p != p:
        raise ValueError(f"{G.name} is of type {tag}, not I({p})")
    if t < 0:
        raise ValueError("t must be non-negative")
    n = G.order
    value = 3 * t * n // p + (t * t if p != 2 else 0)
    limit = Fraction(delta) * n / p
    ok = t <= limit
    reason = "" if ok else f"t={t} > delta*|G|/p = {limit}"
    return BoundReport("TypeI", {"group": G.name, "p": p, "t": t, "delta": Fraction(delta)}, value, ok, reason)


# ---------------------------------------------------------------------------
# Z_2^n


def z2n_extremal_set(n: int, a: int) -> ElementSet:
    """Vectors whose binary values are ``2^n - 1, ..., 2^n - a``."""
    N = 1 << n
    if not 1 <= a <= N - 1:
        raise ValueError(f"a={a} outside [1, {N - 1}]")
    return ElementSet.from_indices(make_group([2] * n), range(N - a, N))


def z2n_min_formula(n: int, a: int) -> BoundReport:
    N = 1 << n
    if not 1 <= a <= N - 1:
        raise ValueError(f"a={a} outside [1, {N - 1}]")
    # 2^n - 2^k <= a < 2^n - 2^(k-1), compared after doubling
    k = next(k for k in range(n + 1) if 2 * (N - (1 << k)) <= 2 * a < 2 * N - (1 << k))
    value = (3 * a + (1 << k) - 2 * N) * (N - (1 << k))
    return BoundReport("Z2n", {"n": n, "a": a, "k": k}, value)


# ---------------------------------------------------------------------------
# Z_3^n


def _first_coordinate_layer(G: GroupSpec, value: int) -> ElementSet:
    return ElementSet(G, G.coords_array(np.arange(G.order))[:, 0] == value)


def z3n_construction(n: int, t: int, *, seed: int | None = None) -> ElementSet:
    """``{x_1 = 1}`` together with a ``t``-element sum-free subset of ``{x_1 = 2}``."""
    if n < 1:
        raise ValueError("n must be positive")
    G = make_group([3] * n)
    pool = _first_coordinate_layer(G, 2)
    if not 0 <= t <= pool.cardinality:
        raise ValueError(f"t={t} outside [0, {pool.cardinality}]")
    return _first_coordinate_layer(G, 1) | greedy_sum_free_subset(pool, t, seed=seed)


def z3n_bound(n: int, t: int, delta: Fraction = Z3N_DELTA) -> BoundReport:
    if t < 0:
        raise ValueError("t must be non-negative")
    value = 3 ** (n - 1) * t + t * t
    limit = Fraction(delta) * 3 ** (n - 1)
    ok = t <= limit
    reason = "" if ok else f"t={t} > delta*3^(n-1) = {limit}"
    return BoundReport("Z3n", {"n": n, "t": t, "delta": Fraction(delta)}, value, ok, reason)


# ---------------------------------------------------------------------------
# Z_3 x Z_p


def z3zp_upper_bound(p: int, a: int) -> BoundReport:
    if not p + 1 <= a <= 3 * p:
        raise ValueError(f"a={a} outside [{p + 1}, {3 * p}]")
    return BoundReport("Z3Zp-upper", {"p": p, "a": a}, 21 * (a - p) ** 2)


def z3zp_construction(p: int, a: int) -> ElementSet:
    """``Z_3 x {x_1..x_{b/3}}`` with ``b = 3 ceil(a/3)``, trimmed to ``a`` elements.

    Trimming repeatedly drops the element lying in the most Schur triples
    (lowest index on ties).
    """
    _require_odd_prime(p)
    if not p + 1 <= a <= 3 * p:
        raise ValueError(f"a={a} outside [{p + 1}, {3 * p}]")
    G = make_group([3, p])
    b = 3 * math.ceil(a / 3)
    layer = zp_middle_ordering(p).prefix(b // 3)
    S = ElementSet.from_coords(G, [(c, x) for c in range(3) for x in layer])
    while S.cardinality > a:
        worst = max(S.indices, key=lambda x: (schur_delta_remove(S, x), -x))
        S = S.without_element(int(worst))
    st = count_schur(S)
    assert st <= 21 * (a - p) ** 2, f"ST={st} above 21(a-p)^2 for p={p}, a={a}"
    return S


# ---------------------------------------------------------------------------
# removal


@dataclass(frozen=True)
class RemovalReport:
    eps: Fraction
    size_A: int
    st_A: int
    c_size: int
    overlap_size: int
    removed: int
    preconditions_met: bool
    violations: tuple[str, ...] = field(default=())


def sumfree_removal(A: ElementSet, eps) -> tuple[ElementSet, RemovalReport]:
    """Strip ``A`` down to a sum-free ``B``.

    ``C`` collects the elements of ``A`` with at least ``eps*n`` representations
    ``x = y + z`` inside ``A``; with ``A' = A - C`` the result is
    ``B = A' - (A' - A')``.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    G = A.group
    n = G.order
    st = count_schur(A)
    violations = []
    if A.cardinality < (Fraction(1, 3) + eps) * n:
        violations.append(f"|A|={A.cardinality} < (1/3+eps)n = {(Fraction(1, 3) + eps) * n}")
    if st > eps * eps * n * n / 2:
        violations.append(f"ST(A)={st} > eps^2 n^2/2 = {eps * eps * n * n / 2}")
    # |(x - A) & A| is the number of representations of x as a sum of two elements of A
    reps = representation_profile(A, A).counts
    C = ElementSet(G, A.bitmap & (reps >= eps * n))
    A1 = A - C
    if A1.cardinality:
        D = difference_set(A1, A1)
        overlap = A1 & D
    else:
        overlap = A1
    B = A1 - overlap
    report = RemovalReport(
        eps=eps,
        size_A=A.cardinality,
        st_A=st,
        c_size=C.cardinality,
        overlap_size=overlap.cardinality,
        removed=A.cardinality - B.cardinality,
        preconditions_met=not violations,
        violations=tuple(violations),
    )
    if report.preconditions_met:
        if count_schur(B) != 0:
            raise AssertionError("removal produced a set with Schur triples")
        if report.removed > eps * n:
            raise AssertionError(f"removed {report.removed} > eps*n = {eps * n}")
    return B, report


# ---------------------------------------------------------------------------
# sum-free subsets


EXHAUSTIVE_POOL = 24
NODE_BUDGET = 2_000_000


def greedy_sum_free_subset(
    pool: ElementSet, t: int, *, seed: int | None = None, node_budget: int = NODE_BUDGET
) -> ElementSet:
    """First ``t``-element sum-free subset of ``pool`` in scan order (canonical
    index order, or a seeded shuffle of it), found by greedy search with
    backtracking."""
    if t < 0:
        raise ValueError("t must be non-negative")
    G = pool.group
    order = pool.indices.tolist()
    if seed is not None:
        order = [order[i] for i in np.random.default_rng(seed).permutation(len(order))]
    if t > len(order):
        raise SearchFailure(f"pool has only {len(order)} elements, {t} requested")
    bm = np.zeros(G.order, dtype=bool)
    stack: list[int] = []  # positions in `order` of the chosen elements
    chosen: list[int] = []
    budget = None if len(order) <= EXHAUSTIVE_POOL else node_budget
    nodes = 0
    pos = 0
    while len(stack) < t:
        limit = len(order) - (t - len(stack))
        while pos <= limit:
            nodes += 1
            if budget is not None and nodes > budget:
                raise SearchFailure(f"no sum-free {t}-subset found within {budget} search nodes")
            x = order[pos]
            bm[x] = True
            if _triples_through(G, bm, np.asarray(chosen + [x], dtype=np.int64), x) == 0:
                stack.append(pos)
                chosen.append(x)
                pos += 1
                break
            bm[x] = False
            pos += 1
        else:
            if not stack:
                raise SearchFailure(f"pool contains no sum-free subset with {t} elements")
            last = stack.pop()
            bm[chosen.pop()] = False
            pos = last + 1
    return ElementSet(G, bm)


# ---------------------------------------------------------------------------
# Z_{2^n}


def conjectured_z2n_cyclic_ordering(n: int) -> OrderingTable:
    """Ordering of ``Z_{2^n}`` by ``x -> 2x + 1`` on the first half and ``x -> 2x`` on the second."""
    if n < 0:
        raise ValueError("n must be non-negative")
    seq = [0]
    for _ in range(n):
        seq = [2 * x + 1 for x in seq] + [2 * x for x in seq]
    return OrderingTable(1 << n, tuple(seq))
