import itertools
import math

import numpy as np
import pytest

from schur_triples.constructions import z2n_min_formula, z3n_bound
from schur_triples.groups import ElementSet, make_group, parse_group
from schur_triples.oracle import (
    StabilityVerdict,
    batch_schur_counts,
    brute_force_min,
    f_table,
    kneser_sweep,
    largest_sumfree_size,
    pollard_sweep,
    revolving_door,
    revolving_door_swaps,
    sampled_lower_bound_falsifier,
    sampled_min,
    verify_conjecture_z2n_cyclic,
    verify_stability_z2n,
    verify_stability_zp,
)
from schur_triples.triples import count_schur_naive, kneser_check


@pytest.mark.parametrize("n, t", [(n, t) for n in range(0, 9) for t in range(0, n + 1)])
def test_revolving_door_is_a_gray_code(n, t):
    seq = list(revolving_door(n, t))
    assert len(seq) == math.comb(n, t)
    assert len(set(seq)) == len(seq)
    for prev, nxt in zip(seq, seq[1:]):
        assert len(set(prev) ^ set(nxt)) == 2
    state = set(seq[0])
    for (out, inn), nxt in zip(revolving_door_swaps(n, t), seq[1:]):
        assert out in state and inn not in state
        state = (state - {out}) | {inn}
        assert state == set(nxt)


def exhaustive_min(G, a):
    return min(count_schur_naive(ElementSet.from_indices(G, c)) for c in itertools.combinations(range(G.order), a))


@pytest.mark.parametrize("spec", ["Z5", "Z2^2", "Z3", "Z6", "Z2xZ4", "Z9"])
def test_walk_matches_plain_enumeration(spec):
    G = parse_group(spec)
    for a in range(G.order + 1):
        assert brute_force_min(G, a).f_value == exhaustive_min(G, a)


def test_f_table_examples():
    # exhaustive sweep gives f(4) = 12 for Z5
    assert f_table(make_group([5])) == [(0, 0), (1, 0), (2, 0), (3, 4), (4, 12), (5, 25)]
    assert [f for _, f in f_table(parse_group("Z2^2"))] == [0, 0, 0, 6, 16]
    assert [f for _, f in f_table(make_group([3]))] == [0, 0, 2, 9]
    assert largest_sumfree_size(f_table(make_group([7]))) == 2


def test_f_table_z3_squared_record():
    assert [f for _, f in f_table(parse_group("Z3^2"))] == [0, 0, 0, 0, 4, 10, 18, 36, 56, 81]


def test_minimizer_examples():
    res = brute_force_min(make_group([5]), 3, enumerate_all=True)
    assert res.f_value == 4 and ElementSet.from_indices(res.group, [1, 2, 3]) in res.minimizers
    G = parse_group("Z2^2")
    res = brute_force_min(G, 3, enumerate_all=True)
    assert res.f_value == 6 and res.minimizers == [ElementSet.from_indices(G, [1, 2, 3])]
    for c in itertools.combinations(range(4), 3):
        if 0 in c:
            assert count_schur_naive(ElementSet.from_indices(G, c)) >= 7
    assert brute_force_min(make_group([7]), 2).f_value == 0


def test_minimizer_count_is_exact_when_truncated():
    G = make_group([8])
    full = brute_force_min(G, 2, enumerate_all=True)
    cut = brute_force_min(G, 2, enumerate_all=True, max_minimizers=3)
    assert cut.minimizer_count == full.minimizer_count > 3 and len(cut.minimizers) == 3 and cut.truncated


def test_parallel_walk_agrees():
    G = parse_group("Z2xZ7")
    for a in (4, 6, 9):
        serial = brute_force_min(G, a, enumerate_all=True)
        par = brute_force_min(G, a, enumerate_all=True, workers=2)
        assert (par.f_value, par.minimizer_count, par.minimizers) == (
            serial.f_value, serial.minimizer_count, serial.minimizers)


def test_walk_audit_runs():
    res = brute_force_min(parse_group("Z3xZ5"), 7, audit_checkpoints=50, seed=3)
    assert res.stats["audits"] == 50 and res.stats["subsets"] == math.comb(15, 7)


def test_cap_and_range():
    with pytest.raises(ValueError):
        brute_force_min(make_group([23]), 3)
    with pytest.raises(ValueError):
        brute_force_min(make_group([5]), 6)


def test_batch_counts():
    G = parse_group("Z3xZ4")
    rng = np.random.default_rng(0)
    subs = np.argsort(rng.random((50, 12)), axis=1)[:, :5]
    want = [count_schur_naive(ElementSet.from_indices(G, r)) for r in subs]
    assert batch_schur_counts(G, subs).tolist() == want


def test_falsifier_examples():
    G = parse_group("Z3^3")
    assert sampled_lower_bound_falsifier(G, 10, z3n_bound(3, 1), 20_000, seed=1) is None
    assert sampled_lower_bound_falsifier(parse_group("Z2^4"), 9, z2n_min_formula(4, 9), 20_000) is None
    assert sampled_lower_bound_falsifier(G, 10, 0, 10) is None
    bad = sampled_lower_bound_falsifier(make_group([7]), 3, 100, 10)
    assert bad is not None and count_schur_naive(bad) < 100


@pytest.mark.parametrize("spec, a", [("Z11", 6), ("Z2^4", 9), ("Z3^2", 5)])
def test_sampled_min_bounds_exhaustive_from_above(spec, a):
    G = parse_group(spec)
    exact = brute_force_min(G, a).f_value
    approx = sampled_min(G, a, 3000, seed=2)
    assert not approx.exhaustive
    assert approx.f_value >= exact
    assert count_schur_naive(approx.minimizers[0]) == approx.f_value


def test_stability_zp_examples():
    v = verify_stability_zp(7, 4)
    assert v.passed and v.details["minimizers"] == 3 == v.details["family"]
    assert verify_stability_zp(5, 3).passed
    v = verify_stability_zp(7, 2)
    assert v.passed and not v.applicable


def test_stability_z2n_examples():
    v = verify_stability_z2n(3, 5)
    assert v.passed and v.details["k"] == 2
    assert verify_stability_z2n(2, 3).passed and verify_stability_z2n(2, 3).details["k"] == 0
    assert verify_stability_z2n(3, 4).passed


def test_conjecture_examples():
    assert verify_conjecture_z2n_cyclic(0).passed
    for n in (1, 2, 3):
        v = verify_conjecture_z2n_cyclic(n)
        assert len(v.details["rows"]) == 2**n + 1
        assert v.passed == all(r["minimal"] for r in v.details["rows"])


def test_verdict_consistency():
    with pytest.raises(ValueError):
        StabilityVerdict("x", {}, False)
    with pytest.raises(ValueError):
        StabilityVerdict("x", {}, True, counterexample=ElementSet.empty(make_group([3])))


def test_pollard_sweep_small_primes():
    sw = pollard_sweep(3)
    assert sw.passed and sw.checked > 0
    sw = pollard_sweep(5)
    assert sw.passed and not sw.violations and sw.equalities > 0


def test_pollard_sweep_sampled():
    sw = pollard_sweep(11, pairs=300, seed=1)
    assert not sw.violations and sw.checked >= 300


def test_kneser_sweep_matches_direct_check():
    G = parse_group("Z6")
    sw = kneser_sweep(G)
    applicable = 0
    for a in range(1, 64):
        for b in range(1, 64):
            A = ElementSet.from_indices(G, [i for i in range(6) if a >> i & 1])
            B = ElementSet.from_indices(G, [i for i in range(6) if b >> i & 1])
            rep = kneser_check(A, B)
            applicable += rep.applicable
            assert rep.passed is not False
    assert sw.passed and sw.applicable == applicable and sw.pairs == 63 * 63
