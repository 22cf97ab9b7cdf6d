"""Exhaustive and sampled search over subsets of small groups.

``brute_force_min`` walks all ``a``-subsets in revolving-door order, so each
step swaps one element out and one in and the running Schur-triple count is
updated in ``O(a)``.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence

import numpy as np

from .constructions import (
    BoundReport,
    conjectured_z2n_cyclic_ordering,
    z2n_min_formula,
    zp_middle_ordering,
    zp_min_formula,
)
from .groups import ElementSet, GroupSpec, enumerate_subgroups, make_group
from .triples import ap_differences, count_schur_naive, representation_profile

__all__ = [
    "EXHAUSTIVE_CAP",
    "MINIMIZER_CAP",
    "revolving_door",
    "revolving_door_swaps",
    "MinimizationResult",
    "StabilityVerdict",
    "brute_force_min",
    "sampled_min",
    "sampled_lower_bound_falsifier",
    "batch_schur_counts",
    "f_table",
    "largest_sumfree_size",
    "verify_stability_zp",
    "verify_stability_z2n",
    "verify_conjecture_z2n_cyclic",
    "PollardSweep",
    "pollard_sweep",
    "KneserSweep",
    "kneser_sweep",
]

EXHAUSTIVE_CAP = 22
MINIMIZER_CAP = 100_000


# ---------------------------------------------------------------------------
# revolving-door combinations


def revolving_door_swaps(n: int, t: int) -> Iterator[tuple[int, int]]:
    """Swaps ``(out, in)`` taking each ``t``-subset of ``range(n)`` to the next.

    The walk starts from ``{0, ..., t-1}`` and visits every subset once
    (Knuth's Algorithm R).
    """
    if not 0 <= t <= n:
        raise ValueError(f"cannot choose {t} of {n}")
    if t == 0 or t == n:
        return
    c = [0] + list(range(t)) + [n]  # c[1..t], sentinel c[t+1] = n
    while True:
        # R3
        if t % 2:
            if c[1] + 1 < c[2]:
                c[1] += 1
                yield c[1] - 1, c[1]
                continue
            j = 2
            step = 4
        else:
            if c[1] > 0:
                c[1] -= 1
                yield c[1] + 1, c[1]
                continue
            j = 2
            step = 5
        while True:
            if j > t:
                return
            if step == 4:
                # c[j] == c[j-1] + 1
                if c[j] >= j:
                    old = c[j]
                    c[j] = c[j - 1]
                    c[j - 1] = j - 2
                    yield old, j - 2
                    break
                j += 1
                step = 5
            else:
                # c[j-1] == j - 2
                if c[j] + 1 < c[j + 1]:
                    old = c[j - 1]
                    c[j - 1] = c[j]
                    c[j] += 1
                    yield old, c[j]
                    break
                j += 1
                step = 4


def revolving_door(n: int, t: int) -> Iterator[tuple[int, ...]]:
    """Every ``t``-subset of ``range(n)`` (sorted tuples) in revolving-door order."""
    current = set(range(t))
    yield tuple(sorted(current))
    for out, inn in revolving_door_swaps(n, t):
        current.remove(out)
        current.add(inn)
        yield tuple(sorted(current))


# ---------------------------------------------------------------------------
# results


@dataclass
class MinimizationResult:
    group: GroupSpec
    a: int
    f_value: int
    minimizers: list[ElementSet]
    minimizer_count: int
    exhaustive: bool = True
    stats: dict[str, Any] = field(default_factory=dict)

    @property
    def truncated(self) -> bool:
        return self.minimizer_count > len(self.minimizers)


@dataclass
class StabilityVerdict:
    theorem: str
    params: dict[str, Any]
    passed: bool
    applicable: bool = True
    counterexample: ElementSet | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.passed == (self.counterexample is not None):
            if not self.passed:
                raise ValueError("a failed verdict must carry a counterexample")
            raise ValueError("a passed verdict cannot carry a counterexample")


# ---------------------------------------------------------------------------
# exhaustive walk


def _tables(G: GroupSpec) -> tuple[list[list[int]], list[list[int]], list[int]]:
    table = G.addition_table()
    add = table.tolist()
    neg = G.neg_array(np.arange(G.order))
    sub = table[:, neg].tolist()
    dbl = [add[x][x] for x in range(G.order)]
    return add, sub, dbl


def _sweep(
    G: GroupSpec,
    fixed: Sequence[int],
    pool: Sequence[int],
    t: int,
    enumerate_all: bool,
    limit: int,
    audit_at: frozenset[int] = frozenset(),
) -> tuple[int, int, list[tuple[int, ...]], int, int]:
    """Minimise over ``fixed + S`` for ``t``-subsets ``S`` of ``pool``.

    Returns ``(best, count, minimizers, visited, audits)``.
    """
    add, sub, dbl = _tables(G)
    mem = [0] * G.order
    elems = list(fixed) + [pool[i] for i in range(t)]
    for x in elems:
        mem[x] = 1

    def through(x: int) -> int:
        ax, sx = add[x], sub[x]
        c1 = c3 = 0
        for v in elems:
            c1 += mem[ax[v]]
            c3 += mem[sx[v]]
        return 2 * c1 + c3 - mem[dbl[x]] - 2 * mem[0] + (x == 0)

    st = count_schur_naive(ElementSet.from_indices(G, elems))
    best = st
    count = 1
    found = [tuple(sorted(elems))]
    visited = 1
    audits = 0
    slot = {pool[i]: len(fixed) + i for i in range(t)}
    for out_i, in_i in revolving_door_swaps(len(pool), t):
        out, inn = pool[out_i], pool[in_i]
        st -= through(out)
        mem[out] = 0
        pos = slot.pop(out)
        elems[pos] = inn
        slot[inn] = pos
        mem[inn] = 1
        st += through(inn)
        visited += 1
        if visited in audit_at:
            fresh = count_schur_naive(ElementSet.from_indices(G, elems))
            if fresh != st:
                raise AssertionError(f"incremental count {st} != recount {fresh} at step {visited}")
            audits += 1
        if st < best:
            best = st
            count = 1
            found = [tuple(sorted(elems))]
        elif st == best:
            count += 1
            if enumerate_all and len(found) < limit:
                found.append(tuple(sorted(elems)))
    if not enumerate_all:
        found = found[:1]
    return best, count, found, visited, audits


def _shard(args) -> tuple[int, int, list[tuple[int, ...]], int, int]:
    G, s, a, enumerate_all, limit = args
    pool = list(range(s + 1, G.order))
    return _sweep(G, [s], pool, a - 1, enumerate_all, limit)


def brute_force_min(
    G: GroupSpec,
    a: int,
    enumerate_all: bool = False,
    *,
    workers: int = 1,
    cap: int = EXHAUSTIVE_CAP,
    max_minimizers: int = MINIMIZER_CAP,
    audit_checkpoints: int = 0,
    seed: int = 0,
) -> MinimizationResult:
    """Exact ``f_G(a)``; with ``enumerate_all`` also the minimizing sets
    (at most ``max_minimizers`` kept, the exact count always reported)."""
    n = G.order
    if n > cap:
        raise ValueError(f"exhaustive search is capped at order {cap}; use sampled_min for {G.name}")
    if not 0 <= a <= n:
        raise ValueError(f"a={a} outside [0, {n}]")
    start = time.perf_counter()
    total = math.comb(n, a)
    audit_at: frozenset[int] = frozenset()
    if audit_checkpoints:
        rng = np.random.default_rng(seed)
        k = min(audit_checkpoints, total)
        audit_at = frozenset((rng.choice(total, size=k, replace=False) + 1).tolist())

    if workers <= 1 or a == 0 or a == n or audit_checkpoints:
        best, count, found, visited, audits = _sweep(
            G, [], list(range(n)), a, enumerate_all, max_minimizers, audit_at
        )
    else:
        jobs = [(G, s, a, enumerate_all, max_minimizers) for s in range(n - a + 1)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_shard, jobs))
        best = min(p[0] for p in parts)
        count = sum(p[1] for p in parts if p[0] == best)
        found = sorted(f for p in parts if p[0] == best for f in p[2])
        if not enumerate_all:
            found = found[:1]
        found = found[:max_minimizers]
        visited = sum(p[3] for p in parts)
        audits = 0
    assert visited == total, f"walk visited {visited} of {total} subsets"
    minimizers = sorted(found)
    return MinimizationResult(
        group=G,
        a=a,
        f_value=best,
        minimizers=[ElementSet.from_indices(G, m) for m in minimizers],
        minimizer_count=count,
        exhaustive=True,
        stats={
            "subsets": visited,
            "seconds": time.perf_counter() - start,
            "workers": max(workers, 1),
            "audits": audits,
        },
    )


def f_table(G: GroupSpec, *, cap: int = EXHAUSTIVE_CAP, workers: int = 1) -> list[tuple[int, int]]:
    """``[(a, f_G(a)) for a in 0..n]``."""
    rows = [(a, brute_force_min(G, a, cap=cap, workers=workers).f_value) for a in range(G.order + 1)]
    for (_, f0), (_, f1) in zip(rows, rows[1:]):
        assert f1 >= f0, f"f_G not monotone for {G.name}"
    return rows


def largest_sumfree_size(rows: Sequence[tuple[int, int]]) -> int:
    """``a_G``: the last ``a`` with ``f_G(a) = 0``."""
    return max(a for a, f in rows if f == 0)


# ---------------------------------------------------------------------------
# sampling


def batch_schur_counts(G: GroupSpec, subsets: np.ndarray) -> np.ndarray:
    """ST of each row of an ``(m, a)`` array of distinct element indices."""
    subsets = np.asarray(subsets, dtype=np.int64)
    m, a = subsets.shape
    if a == 0:
        return np.zeros(m, dtype=np.int64)
    mem = np.zeros((m, G.order), dtype=bool)
    rows = np.arange(m)[:, None]
    mem[rows, subsets] = True
    out = np.zeros(m, dtype=np.int64)
    for j in range(a):
        sums = G.add_arrays(subsets[:, j : j + 1], subsets)
        out += mem[rows, sums].sum(axis=1)
    return out


def _random_subsets(rng: np.random.Generator, n: int, a: int, m: int) -> np.ndarray:
    return np.argsort(rng.random((m, n)), axis=1)[:, :a]


def sampled_lower_bound_falsifier(
    G: GroupSpec,
    a: int,
    bound: BoundReport | int,
    trials: int,
    seed: int = 0,
    batch: int = 4096,
) -> ElementSet | None:
    """First uniformly sampled ``a``-subset with fewer Schur triples than ``bound``."""
    value = bound.value if isinstance(bound, BoundReport) else bound
    if value <= 0:
        return None
    rng = np.random.default_rng(seed)
    done = 0
    while done < trials:
        m = min(batch, trials - done)
        subs = _random_subsets(rng, G.order, a, m)
        st = batch_schur_counts(G, subs)
        bad = np.flatnonzero(st < value)
        if bad.size:
            return ElementSet.from_indices(G, subs[bad[0]])
        done += m
    return None


def sampled_min(G: GroupSpec, a: int, trials: int, seed: int = 0, batch: int = 4096) -> MinimizationResult:
    """Smallest ST seen over ``trials`` random ``a``-subsets (an upper bound on ``f_G(a)``)."""
    rng = np.random.default_rng(seed)
    best, best_set, done = None, None, 0
    start = time.perf_counter()
    while done < trials:
        m = min(batch, trials - done)
        subs = _random_subsets(rng, G.order, a, m)
        st = batch_schur_counts(G, subs)
        i = int(np.argmin(st))
        if best is None or st[i] < best:
            best, best_set = int(st[i]), subs[i]
        done += m
    found = ElementSet.from_indices(G, best_set if best_set is not None else [])
    return MinimizationResult(
        G, a, int(best or 0), [found], 1, exhaustive=False,
        stats={"subsets": done, "seconds": time.perf_counter() - start, "seed": seed},
    )


# ---------------------------------------------------------------------------
# stability checks


def verify_stability_zp(p: int, a: int) -> StabilityVerdict:
    """Minimizers of ``ST`` among ``a``-subsets of ``Z_p`` are exactly the unit dilates of the middle prefix."""
    params = {"p": p, "a": a}
    if p > 19:
        raise ValueError("exhaustive stability check limited to p <= 19")
    formula = zp_min_formula(p, a).value
    if formula == 0:
        return StabilityVerdict("Zp-stability", params, True, applicable=False,
                                details={"reason": "formula value is 0"})
    G = make_group([p])
    res = brute_force_min(G, a, enumerate_all=True)
    prefix = zp_middle_ordering(p).prefix_set(G, a)
    family = {prefix.scale(xi) for xi in range(1, p)}
    found = set(res.minimizers)
    details = {"f": res.f_value, "formula": formula, "minimizers": res.minimizer_count, "family": len(family)}
    if res.f_value != formula:
        return StabilityVerdict("Zp-stability", params, False, counterexample=res.minimizers[0], details=details)
    extra = sorted(found - family, key=lambda s: s.indices.tolist())
    missing = sorted(family - found, key=lambda s: s.indices.tolist())
    if extra or missing:
        return StabilityVerdict("Zp-stability", params, False,
                                counterexample=(extra or missing)[0], details=details)
    return StabilityVerdict("Zp-stability", params, True, details=details)


def _sum_free_subsets(G: GroupSpec, pool: Sequence[int], size: int) -> Iterator[ElementSet]:
    for combo in itertools.combinations(pool, size):
        S = ElementSet.from_indices(G, combo)
        if count_schur_naive(S) == 0:
            yield S


def verify_stability_z2n(n: int, a: int) -> StabilityVerdict:
    """Every minimizer is ``(G - K) | S`` for a subgroup ``K`` of order ``2^k``
    and sum-free ``S`` inside ``K``, and every such set is a minimizer."""
    if not 1 <= n <= 4:
        raise ValueError("exhaustive check limited to 1 <= n <= 4")
    params = {"n": n, "a": a}
    G = make_group([2] * n)
    formula = z2n_min_formula(n, a)
    k = formula.params["k"]
    res = brute_force_min(G, a, enumerate_all=True)
    subgroups = enumerate_subgroups(G, order=1 << k)
    details: dict[str, Any] = {"k": k, "f": res.f_value, "formula": formula.value,
                               "minimizers": res.minimizer_count, "subgroups": len(subgroups)}
    if res.f_value != formula.value:
        return StabilityVerdict("Z2n-stability", params, False, counterexample=res.minimizers[0], details=details)
    for A in res.minimizers:
        ok = any((K.carrier.complement() <= A) and count_schur_naive(A & K.carrier) == 0 for K in subgroups)
        if not ok:
            return StabilityVerdict("Z2n-stability", params, False, counterexample=A, details=details)
    family = set()
    inner = a - (G.order - (1 << k))
    for K in subgroups:
        outside = K.carrier.complement()
        for S in _sum_free_subsets(G, K.carrier.indices.tolist(), inner):
            family.add(outside | S)
    details["family"] = len(family)
    for A in sorted(family, key=lambda s: s.indices.tolist()):
        if count_schur_naive(A) != res.f_value:
            return StabilityVerdict("Z2n-stability", params, False, counterexample=A, details=details)
    if len(family) != res.minimizer_count:
        missing = sorted(set(res.minimizers) - family, key=lambda s: s.indices.tolist())
        return StabilityVerdict("Z2n-stability", params, False,
                                counterexample=missing[0] if missing else res.minimizers[0], details=details)
    return StabilityVerdict("Z2n-stability", params, True, details=details)


def verify_conjecture_z2n_cyclic(n: int) -> StabilityVerdict:
    """Does every prefix of the recursive ordering of ``Z_{2^n}`` minimise ST?"""
    params = {"n": n}
    if n == 0:
        return StabilityVerdict("Z2n-cyclic-conjecture", params, True, details={"rows": []})
    if n > 4:
        raise ValueError("exhaustive check limited to n <= 4")
    G = make_group([1 << n])
    order = conjectured_z2n_cyclic_ordering(n)
    rows = []
    first_bad = None
    for a in range(G.order + 1):
        prefix = order.prefix_set(G, a)
        st = count_schur_naive(prefix)
        f = brute_force_min(G, a).f_value
        rows.append({"a": a, "prefix_st": st, "f": f, "minimal": st == f})
        if st != f and first_bad is None:
            first_bad = prefix
    return StabilityVerdict("Z2n-cyclic-conjecture", params, first_bad is None,
                            counterexample=first_bad, details={"rows": rows})


# ---------------------------------------------------------------------------
# exhaustive theorem sweeps


@dataclass
class PollardSweep:
    p: int
    checked: int = 0
    equalities: int = 0
    violations: list[tuple[ElementSet, ElementSet, int]] = field(default_factory=list)
    unmatched_equalities: list[tuple[ElementSet, ElementSet, int]] = field(default_factory=list)
    case_without_equality: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations and not self.unmatched_equalities


def _pollard_pair(p: int, A: ElementSet, B: ElementSet, negA_translates: set[ElementSet] | None, sweep: PollardSweep) -> None:
    a, b = A.cardinality, B.cardinality
    prof = representation_profile(A, B).counts
    tails = np.bincount(prof, minlength=min(a, b) + 2)
    # N_r = #{z : r(z) >= r}
    N = tails[::-1].cumsum()[::-1]
    ap = bool(ap_differences(A) & ap_differences(B))
    lhs = 0
    for r in range(1, min(a, b) + 1):
        lhs += int(N[r]) if r < N.size else 0
        rhs = r * min(p, a + b - r)
        sweep.checked += 1
        cases = (min(a, b) == r) or (a + b >= p + r) or ap or (
            a == b == r + 1 and negA_translates is not None and B in negA_translates)
        if lhs < rhs:
            sweep.violations.append((A, B, r))
        elif lhs == rhs:
            sweep.equalities += 1
            if not cases:
                sweep.unmatched_equalities.append((A, B, r))
        elif cases:
            sweep.case_without_equality += 1


def pollard_sweep(p: int, pairs: int | None = None, seed: int = 0) -> PollardSweep:
    """Check Pollard's inequality and its equality cases over all non-empty
    ``A, B`` (or ``pairs`` random ones) and every admissible ``r``."""
    G = make_group([p])
    sweep = PollardSweep(p)
    if pairs is None:
        sets = [ElementSet.from_indices(G, [i for i in range(p) if m >> i & 1]) for m in range(1, 1 << p)]
        it = itertools.product(sets, sets)
    else:
        rng = np.random.default_rng(seed)

        def draw() -> ElementSet:
            while True:
                bm = rng.random(p) < rng.random()
                if bm.any():
                    return ElementSet(G, bm)

        it = ((draw(), draw()) for _ in range(pairs))
    cache: dict[ElementSet, set[ElementSet]] = {}
    for A, B in it:
        if A not in cache:
            negA = A.negate()
            cache[A] = {negA.translate(x) for x in range(p)}
        _pollard_pair(p, A, B, cache[A], sweep)
    return sweep


@dataclass
class KneserSweep:
    group: GroupSpec
    pairs: int
    applicable: int
    failures: list[tuple[ElementSet, ElementSet]]

    @property
    def passed(self) -> bool:
        return not self.failures


def kneser_sweep(G: GroupSpec, max_order: int = 14) -> KneserSweep:
    """Kneser's identity for every pair of non-empty subsets, via bitmask tables."""
    n = G.order
    if n > max_order:
        raise ValueError(f"bitmask sweep limited to order {max_order}")
    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(n)) & 1  # (size, n)
    table = G.addition_table()
    # translate[b][mask] = mask of (set + b)
    translate = np.zeros((n, size), dtype=np.int64)
    for b in range(n):
        weights = np.left_shift(1, table[:, b].astype(np.int64))
        translate[b] = bits @ weights
    popcount = bits.sum(axis=1)
    stab_mask = np.zeros(size, dtype=np.int64)
    for x in range(n):
        stab_mask |= (translate[x] == masks).astype(np.int64) << x
    sub_masks = np.unique(stab_mask[1:])
    sub_id = np.searchsorted(sub_masks, stab_mask)
    # plus_h[h][mask] = |set + H|
    plus_h = np.zeros((len(sub_masks), size), dtype=np.int64)
    for h_i, hm in enumerate(sub_masks):
        acc = np.zeros(size, dtype=np.int64)
        for x in range(n):
            if hm >> x & 1:
                acc |= translate[x]
        plus_h[h_i] = popcount[acc]
    h_size = popcount[sub_masks]

    failures = []
    applicable = 0
    sums = np.zeros(size, dtype=np.int64)
    for A in range(1, size):
        sums[0] = 0
        for j in range(n):
            lo = 1 << j
            sums[lo : 2 * lo] = sums[:lo] | translate[j][A]
        Bm = masks[1:]
        S = sums[1:]
        ok_hyp = popcount[S] <= popcount[A] + popcount[Bm] - 1
        if not ok_hyp.any():
            continue
        Bm, S = Bm[ok_hyp], S[ok_hyp]
        hid = sub_id[S]
        lhs = popcount[S]
        rhs = plus_h[hid, A] + plus_h[hid, Bm] - h_size[hid]
        applicable += int(Bm.size)
        bad = np.flatnonzero(lhs != rhs)
        for i in bad[:10]:
            failures.append((_mask_set(G, A), _mask_set(G, int(Bm[i]))))
    return KneserSweep(G, (size - 1) ** 2, applicable, failures)


def _mask_set(G: GroupSpec, mask: int) -> ElementSet:
    return ElementSet.from_indices(G, [i for i in range(G.order) if mask >> i & 1])
