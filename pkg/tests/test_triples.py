import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schur_triples.groups import ElementSet, make_group, parse_group
from schur_triples.triples import (
    ap_differences,
    count_schur,
    count_schur_naive,
    count_schur_transform,
    cyclic_convolution,
    difference_set,
    is_sum_free,
    kneser_check,
    pollard_check,
    representation_profile,
    schur_delta_add,
    schur_delta_remove,
    st_per_element,
    stabiliser,
    sumset,
)


def S(spec, *elems):
    return ElementSet.from_indices(parse_group(spec), elems)


def brute_triples(A):
    G = A.group
    return sum(1 for x, y in itertools.product(A, repeat=2) if G.add_idx(x, y) in A)


@pytest.mark.parametrize(
    "A, want",
    [(S("Z5", 0), 1), (S("Z7", 2, 3, 4), 1), (S("Z7", 1, 2, 3), 3), (S("Z2^3", *range(1, 8)), 42), (S("Z9"), 0)],
)
def test_counts(A, want):
    assert count_schur_naive(A) == want
    assert count_schur_transform(A) == want
    assert count_schur_transform(A, use_fft=False) == want
    assert count_schur(A) == want


def test_transform_matches_naive_z9():
    A = S("Z9", 3, 4, 5)
    assert count_schur_transform(A) == count_schur_naive(A) == brute_triples(A)


groups = st.sampled_from(["Z7", "Z12", "Z2^3", "Z3^2", "Z3xZ7", "Z4xZ6", "Z2^2xZ5", "Z16", "Z5^2", "Z64", "Z2^6"])


@st.composite
def element_sets(draw, spec=groups):
    G = parse_group(draw(spec))
    bits = draw(st.lists(st.booleans(), min_size=G.order, max_size=G.order))
    return ElementSet(G, bits)


@given(element_sets())
@settings(max_examples=150, deadline=None)
def test_counting_kernels_agree(A):
    naive = count_schur_naive(A)
    assert naive == brute_triples(A)
    assert count_schur_transform(A) == naive
    assert count_schur_transform(A, use_fft=False) == naive


@given(element_sets(), st.data())
@settings(max_examples=150, deadline=None)
def test_incremental_deltas(A, data):
    G = A.group
    x = data.draw(st.integers(0, G.order - 1))
    if x in A:
        smaller = A.without_element(x)
        d = schur_delta_remove(A, x)
        assert d == count_schur_naive(A) - count_schur_naive(smaller)
        assert schur_delta_add(smaller, x) == d
        assert st_per_element(A, x) == d
    else:
        bigger = A.with_element(x)
        assert schur_delta_add(A, x) == count_schur_naive(bigger) - count_schur_naive(A)


@given(element_sets(st.sampled_from(["Z7", "Z11", "Z13", "Z15", "Z3^2", "Z2^4"])), st.data())
@settings(max_examples=100, deadline=None)
def test_invariance_under_negation_and_automorphisms(A, data):
    G = A.group
    st_a = count_schur_naive(A)
    assert count_schur_naive(A.negate()) == st_a
    if G.rank == 1:
        n = G.order
        u = data.draw(st.sampled_from([u for u in range(1, n) if np.gcd(u, n) == 1]))
        assert count_schur_naive(A.scale(u)) == st_a
    else:
        perm = data.draw(st.permutations(range(G.rank)))
        coords = G.coords_array(A.indices)[:, list(perm)]
        assert count_schur_naive(ElementSet(G, np.isin(np.arange(G.order), G.index_array(coords)))) == st_a


def test_delta_examples():
    assert schur_delta_add(S("Z7", 2, 3), 4) == 1
    assert schur_delta_add(S("Z5"), 0) == 1
    # {1} -> {1,2} gains only (1,1,2)
    assert schur_delta_add(S("Z5", 1), 2) == 1
    with pytest.raises(ValueError):
        schur_delta_add(S("Z5", 1), 1)
    with pytest.raises(ValueError):
        schur_delta_remove(S("Z5", 1), 2)


def test_per_element_examples():
    assert st_per_element(S("Z5", 0), 0) == 1
    assert st_per_element(S("Z7", 2, 3, 4), 3) == 0
    assert st_per_element(S("Z7", 2, 3, 4), 2) == 1


def test_sum_free_examples():
    assert is_sum_free(S("Z10", 1, 3, 5, 7, 9))
    assert not is_sum_free(S("Z7", 2, 3, 4))
    assert is_sum_free(S("Z7"))


def test_large_counts_exact():
    G = make_group([4096])
    A = ElementSet.full(G)
    assert count_schur_transform(A) == 4096**2


def test_convolution_subtract():
    G = make_group([3, 4])
    rng = np.random.default_rng(0)
    f, g = rng.integers(0, 5, 12), rng.integers(0, 5, 12)
    want = np.zeros(12, dtype=np.int64)
    for x, y in itertools.product(range(12), repeat=2):
        want[G.sub_idx(x, y)] += f[x] * g[y]
    assert np.array_equal(cyclic_convolution(f, g, G, subtract=True), want)
    assert np.array_equal(cyclic_convolution(f, g, G, subtract=True, use_fft=False), want)


def test_sumset_examples():
    assert sumset(S("Z4", 0, 1), S("Z4", 0, 1)).indices.tolist() == [0, 1, 2]
    assert difference_set(S("Z6", 0, 2, 4), S("Z6", 0, 2, 4)).indices.tolist() == [0, 2, 4]
    assert sumset(S("Z7", 1, 2, 3), S("Z7", 1, 2, 3)).indices.tolist() == [2, 3, 4, 5, 6]


def test_representation_profile():
    prof = representation_profile(S("Z7", 1, 2, 3), S("Z7", 1, 2, 3))
    assert prof.counts.tolist() == [0, 0, 1, 2, 3, 2, 1]
    assert prof.tail_counts() == [5, 3, 1]
    assert prof.support() == S("Z7", 2, 3, 4, 5, 6)
    diff = representation_profile(S("Z7", 1, 2), S("Z7", 1), mode="difference")
    assert diff.counts.tolist() == [1, 1, 0, 0, 0, 0, 0]


def test_stabiliser_examples():
    assert stabiliser(S("Z6", 0, 2, 4)).carrier == S("Z6", 0, 2, 4)
    assert stabiliser(S("Z5", 1, 2)).carrier == S("Z5", 0)
    assert stabiliser(S("Z2^3", *range(8))).order == 8
    with pytest.raises(ValueError):
        stabiliser(S("Z5"))


def test_pollard_examples():
    rep = pollard_check(7, S("Z7", 1, 2, 3), S("Z7", 1, 2, 3), 2)
    assert (rep.lhs, rep.rhs, rep.equality) == (8, 8, True)
    assert "iv" in rep.cases
    rep = pollard_check(5, S("Z5", 0, 1, 2), S("Z5", 0, 1, 2), 1)
    assert (rep.lhs, rep.rhs, rep.equality) == (5, 5, True)
    assert "iv" in rep.cases
    rep = pollard_check(7, S("Z7", 1, 2, 4), S("Z7", 1, 2, 4), 1)
    assert rep.rhs == 5 and rep.holds
    with pytest.raises(ValueError):
        pollard_check(7, S("Z7", 1), S("Z7", 1), 2)
    with pytest.raises(ValueError):
        pollard_check(6, S("Z6", 1), S("Z6", 1), 1)


def test_ap_detection():
    assert ap_differences(S("Z7", 0, 3, 6)) == frozenset({3, 4})
    assert ap_differences(S("Z7", 0, 1, 3)) == frozenset()
    assert ap_differences(S("Z5", 0, 1)) == frozenset({1, 4})


def test_kneser_examples():
    # |A+B| = 5 = |A| + |B| - 1, so the hypothesis holds and H is all of Z5
    rep = kneser_check(S("Z5", 0, 1, 2), S("Z5", 0, 1, 2))
    assert rep.applicable and rep.passed and rep.h_size == 5
    rep = kneser_check(S("Z7", 0, 1), S("Z7", 0, 3))
    assert not rep.applicable and rep.sumset_size == 4
    rep = kneser_check(S("Z6", 0, 2), S("Z6", 0, 2, 4))
    assert rep.applicable and rep.passed and (rep.a_plus_h, rep.b_plus_h, rep.h_size) == (3, 3, 3)
    with pytest.raises(ValueError):
        kneser_check(S("Z6"), S("Z6", 1))
