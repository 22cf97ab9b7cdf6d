import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schur_triples.groups import (
    ElementSet,
    GroupSpecError,
    Homomorphism,
    SubgroupHandle,
    add,
    classify_group_type,
    enumerate_subgroups,
    make_group,
    max_sumfree_size,
    neg,
    parse_group,
    subgroups_of_prime_index,
    surjections_to_cyclic,
)
from schur_triples.oracle import brute_force_min

small_factors = st.lists(st.integers(2, 6), min_size=1, max_size=3).filter(lambda f: math.prod(f) <= 64)


@pytest.mark.parametrize(
    "orders, name, n",
    [([5], "Z5", 5), ([2, 2, 2], "Z2^3", 8), ([3, 7], "Z3xZ7", 21)],
)
def test_make_group(orders, name, n):
    G = make_group(orders)
    assert G.name == name and G.order == n


def test_scalar_arithmetic_examples():
    assert add(make_group([5]), 3, 4) == 2
    G = make_group([2, 2])
    assert add(G, (1, 0), (1, 1)) == (0, 1)
    assert neg(make_group([7]), 3) == 4


def test_index_is_c_order():
    G = make_group([3, 4])
    assert G.coords(5) == (1, 1)
    assert G.index((2, 3)) == 11
    assert np.array_equal(G.coords_array(np.arange(12)), np.stack(np.unravel_index(np.arange(12), (3, 4)), -1))


@given(small_factors, st.data())
@settings(max_examples=60, deadline=None)
def test_index_round_trip(factors, data):
    G = make_group(factors)
    i = data.draw(st.integers(0, G.order - 1))
    assert G.index(G.coords(i)) == i
    assert G.index_array(G.coords_array([i]))[0] == i


@given(small_factors)
@settings(max_examples=30, deadline=None)
def test_group_axioms(factors):
    G = make_group(factors)
    n = G.order
    T = G.addition_table()
    idx = np.arange(n)
    assert np.array_equal(T, T.T)
    assert np.array_equal(T[0], idx)
    assert np.array_equal(T[idx, G.neg_array(idx)], np.zeros(n, dtype=T.dtype))
    # associativity on every triple
    assert np.array_equal(T[T[:, :, None], idx[None, None, :]], T[idx[:, None, None], T[None, :, :]])
    for x, y in itertools.product(range(min(n, 8)), repeat=2):
        assert G.add_idx(x, y) == T[x, y]
        assert G.sub_idx(x, y) == T[x, G.neg_idx(y)]


def test_group_elements_operate():
    G = make_group([2, 2])
    x, y = G.element((1, 0)), G.element((1, 1))
    assert (x + y).coords == (0, 1)
    assert (x - x).index == 0
    with pytest.raises(ValueError):
        _ = x + make_group([4]).element(1)


@pytest.mark.parametrize(
    "text, factors",
    [("Z5", (5,)), ("z2^3", (2, 2, 2)), ("Z3xZ7", (3, 7)), ("Z4xz2^2", (4, 2, 2)), ("Z2^5", (2,) * 5)],
)
def test_parse_group(text, factors):
    assert parse_group(text).factors == factors


@pytest.mark.parametrize("text, column", [("", 1), ("Q5", 1), ("Z5x", 4), ("Z5+Z3", 3), ("Z1", 2), ("Z3 x Z5", 3)])
def test_parse_group_errors_carry_columns(text, column):
    with pytest.raises(GroupSpecError) as info:
        parse_group(text)
    assert info.value.column == column


def test_dense_cap():
    with pytest.raises(GroupSpecError):
        make_group([2] * 30)
    assert make_group([2] * 30, cap=1 << 31).order == 1 << 30


def test_element_set_algebra():
    G = make_group([7])
    A = ElementSet.from_indices(G, [1, 2, 3])
    B = ElementSet.of(G, [3, 4])
    assert (A | B).indices.tolist() == [1, 2, 3, 4]
    assert (A & B).indices.tolist() == [3]
    assert (A - B).indices.tolist() == [1, 2]
    assert A.negate().indices.tolist() == [4, 5, 6]
    assert A.translate(5).indices.tolist() == [0, 1, 6]
    assert A.scale(2).indices.tolist() == [2, 4, 6]
    assert 2 in A and 5 not in A and len(A) == 3
    assert hash(ElementSet.from_indices(G, [3, 2, 1])) == hash(A.without_element(3).with_element(3))
    with pytest.raises(ValueError):
        ElementSet.from_indices(G, [7])
    with pytest.raises(ValueError):
        _ = A | ElementSet.empty(make_group([5]))


def test_element_set_is_immutable():
    A = ElementSet.from_indices(make_group([5]), [1])
    with pytest.raises(ValueError):
        A.bitmap[0] = True


def test_prime_index_subgroup_examples():
    assert len(subgroups_of_prime_index(make_group([2, 2]), 2)) == 3
    assert all(H.order == 2 for H in subgroups_of_prime_index(make_group([2, 2]), 2))
    (H,) = subgroups_of_prime_index(make_group([9]), 3)
    assert H.carrier.indices.tolist() == [0, 3, 6]
    assert subgroups_of_prime_index(make_group([5]), 2) == []
    with pytest.raises(ValueError):
        subgroups_of_prime_index(make_group([4]), 4)


@pytest.mark.parametrize("q, k", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 2)])
def test_hyperplane_count(q, k):
    subs = subgroups_of_prime_index(make_group([q] * k), q)
    assert len(subs) == (q**k - 1) // (q - 1)
    assert len(set(H.carrier for H in subs)) == len(subs)
    for H in subs:
        H.validate()
        assert H.index_in_G == q


def test_surjection_examples():
    parity = Homomorphism(make_group([10]), 2, (1,))
    assert parity in surjections_to_cyclic(make_group([10]), 2)
    assert Homomorphism(make_group([3, 7]), 3, (1, 0)) in surjections_to_cyclic(make_group([3, 7]), 3)
    assert Homomorphism(make_group([25]), 5, (1,)) in surjections_to_cyclic(make_group([25]), 5)
    with pytest.raises(ValueError):
        surjections_to_cyclic(make_group([9]), 2)


def test_surjections_are_surjective_homomorphisms():
    G = make_group([2, 6])
    for phi in surjections_to_cyclic(G, 6):
        assert phi.is_surjective()
        vals = phi.values()
        assert set(vals.tolist()) == set(range(6))
        T = G.addition_table()
        assert np.array_equal(vals[T], (vals[:, None] + vals[None, :]) % 6)
        phi.kernel().validate()


def test_enumerate_subgroups():
    assert len(enumerate_subgroups(make_group([2, 2, 2]))) == 16
    assert len(enumerate_subgroups(make_group([12]))) == 6  # one per divisor
    assert len(enumerate_subgroups(make_group([3, 3]))) == 6
    for H in enumerate_subgroups(make_group([2, 4])):
        H.validate()


def test_subgroup_handle_rejects_non_subgroups():
    G = make_group([6])
    with pytest.raises(ValueError):
        SubgroupHandle.from_set(ElementSet.from_indices(G, [0, 1, 2, 4])).validate()
    with pytest.raises(ValueError):
        SubgroupHandle.from_set(ElementSet.from_indices(G, [1, 4])).validate()


@pytest.mark.parametrize("spec, tag, size", [("Z10", "I(2)", 5), ("Z9", "II", 3), ("Z7", "III(7)", 2), ("Z25", "I(5)", 10)])
def test_classification(spec, tag, size):
    G = parse_group(spec)
    assert str(classify_group_type(G)) == tag
    assert max_sumfree_size(G) == size


ALL_SMALL = [
    "Z2", "Z3", "Z4", "Z2^2", "Z5", "Z6", "Z7", "Z8", "Z2xZ4", "Z2^3", "Z9", "Z3^2", "Z10",
    "Z11", "Z12", "Z2xZ6", "Z13", "Z14", "Z15", "Z16", "Z2xZ8", "Z4^2", "Z2^2xZ4", "Z2^4",
]


@pytest.mark.parametrize("spec", ALL_SMALL)
def test_max_sumfree_matches_exhaustive(spec):
    G = parse_group(spec)
    want = max_sumfree_size(G)
    assert brute_force_min(G, want).f_value == 0
    assert brute_force_min(G, want + 1).f_value > 0
