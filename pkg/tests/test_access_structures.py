import itertools
import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from sharing.access_structures import (
    AccessStructureBasis,
    CompartmentSpec,
    HierarchicalSpec,
    basis_from_predicate,
    canonical_subset,
    compartment_basis,
    hierarchical_basis,
    is_authorized,
    minimize,
    parse_subset_key,
    reduce_to_basis,
    subset_key,
    threshold_basis,
)
from sharing.errors import AccessStructureError, UnauthorizedSubsetError

LEVELS = ((1, 2), (3, 4), (5, 6))

HIERARCHICAL_BASIS = [
    (1, 2, 3), (1, 2, 4), (1, 2, 5), (1, 2, 6),
    (1, 3, 4), (1, 3, 5), (1, 3, 6), (1, 4, 5), (1, 4, 6),
    (2, 3, 4), (2, 3, 5), (2, 3, 6), (2, 4, 5), (2, 4, 6),
]


def test_threshold_two_of_three():
    basis = threshold_basis(2, 3)
    assert basis.minimal_subsets == ((1, 2), (1, 3), (2, 3))
    assert basis.keys() == ["1,2", "1,3", "2,3"]


@given(st.integers(1, 12).flatmap(lambda n: st.tuples(st.integers(1, n), st.just(n))))
def test_threshold_basis_size_is_binomial(params):
    t_plus_1, n = params
    assert len(threshold_basis(t_plus_1, n)) == math.comb(n, t_plus_1)


@pytest.mark.parametrize("t_plus_1, n", [(0, 3), (4, 3), (1, 0)])
def test_threshold_rejects_bad_parameters(t_plus_1, n):
    with pytest.raises(AccessStructureError):
        threshold_basis(t_plus_1, n)


def test_hierarchical_conjunctive_basis():
    basis = hierarchical_basis(HierarchicalSpec(LEVELS, (1, 2, 3)))
    assert list(basis) == HIERARCHICAL_BASIS
    assert len(basis) == 14


def test_reduce_picks_first_canonical_element():
    basis = hierarchical_basis(HierarchicalSpec(LEVELS, (1, 2, 3)))
    assert reduce_to_basis({2, 3, 4, 5, 6}, basis) == (2, 3, 4)
    assert reduce_to_basis([6, 5, 1, 3], basis) == (1, 3, 5)


def test_reduce_rejects_unauthorized():
    basis = hierarchical_basis(HierarchicalSpec(LEVELS, (1, 2, 3)))
    assert not is_authorized({3, 4, 5, 6}, basis)
    with pytest.raises(UnauthorizedSubsetError):
        reduce_to_basis({3, 4, 5, 6}, basis)


def test_hierarchical_disjunctive_basis():
    spec = HierarchicalSpec(LEVELS, (1, 2, 3), conjunctive=False)
    basis = hierarchical_basis(spec)
    # any single top-level participant suffices
    assert (1,) in basis.minimal_subsets
    assert (2,) in basis.minimal_subsets
    assert (3, 4) in basis.minimal_subsets
    assert (3, 5, 6) in basis.minimal_subsets
    assert basis == basis_from_predicate(spec.predicate(), spec.n)


def test_hierarchical_empty_level_warns():
    spec = HierarchicalSpec(((1, 2), (), (3, 4)), (1, 2, 3))
    basis = hierarchical_basis(spec)
    assert basis.validation_warnings() == ("level 2 is empty",)
    assert basis == basis_from_predicate(spec.predicate(), 4)


@pytest.mark.parametrize(
    "levels, thresholds",
    [
        (((1, 2), (2, 3)), (1, 2)),  # overlapping
        (((1, 2), (3, 4)), (2, 2)),  # not strictly increasing
        (((1, 2), (3, 4)), (0, 2)),  # non-positive
        (((1, 2), (3, 4)), (1,)),    # arity mismatch
    ],
)
def test_hierarchical_rejects_bad_specs(levels, thresholds):
    with pytest.raises(AccessStructureError):
        HierarchicalSpec(levels, thresholds)


def test_hierarchical_unsatisfiable():
    with pytest.raises(AccessStructureError):
        hierarchical_basis(HierarchicalSpec(((1, 2), (3, 4)), (3, 4)))


def test_compartment_basis():
    basis = compartment_basis(CompartmentSpec(LEVELS, (1, 1, 1), 4))
    assert len(basis) == 12
    for subset in basis:
        assert len(subset) == 4
        assert all(set(subset) & set(c) for c in LEVELS)
    assert (1, 2, 3, 5) in basis.minimal_subsets
    assert (1, 3, 5) not in basis.minimal_subsets


@pytest.mark.parametrize(
    "compartments, per_thresholds, overall",
    [
        (((1, 2), ()), (1, 0), 1),       # empty compartment
        (((1, 2), (3, 4)), (3, 1), 4),   # t_1 above |U_1|
        (((1, 2), (3, 4)), (1, 1), 1),   # overall below sum
        (((1, 2), (3, 4)), (1, 1), 5),   # overall above member count
    ],
)
def test_compartment_rejects_bad_specs(compartments, per_thresholds, overall):
    with pytest.raises(AccessStructureError):
        CompartmentSpec(compartments, per_thresholds, overall)


def test_minimize_drops_supersets():
    basis = minimize([(1, 2, 3), (2, 1), (3,), (1, 3)], 3)
    assert basis.minimal_subsets == ((1, 2), (3,))


def test_basis_rejects_non_antichain():
    with pytest.raises(AccessStructureError, match="antichain"):
        AccessStructureBasis(n=3, minimal_subsets=((1, 2), (1, 2, 3)))


def test_basis_rejects_out_of_range_ids():
    with pytest.raises(AccessStructureError):
        AccessStructureBasis(n=3, minimal_subsets=((1, 4),))


def test_basis_sorts_canonically():
    basis = AccessStructureBasis(n=4, minimal_subsets=((3, 4), (2, 1), (1, 3)))
    assert basis.minimal_subsets == ((1, 2), (1, 3), (3, 4))


def test_basis_json():
    basis = threshold_basis(2, 3)
    assert basis.to_json() == "[[1,2],[1,3],[2,3]]"
    assert AccessStructureBasis.from_json(basis.to_json(), 3) == basis
    with pytest.raises(AccessStructureError):
        AccessStructureBasis.from_json("{not json", 3)


def test_subset_keys():
    assert subset_key((1, 3, 5)) == "1,3,5"
    assert parse_subset_key("1,3,5", 5) == (1, 3, 5)
    with pytest.raises(AccessStructureError):
        parse_subset_key("3,1", 5)
    with pytest.raises(AccessStructureError):
        parse_subset_key("1, 3", 5)
    with pytest.raises(AccessStructureError):
        canonical_subset([1, 1], 3)


@st.composite
def hierarchical_specs(draw):
    n = draw(st.integers(2, 7))
    order = draw(st.permutations(range(1, n + 1)))
    m = draw(st.integers(1, min(3, n)))
    cuts = sorted(draw(st.lists(st.integers(1, n - 1), min_size=m - 1, max_size=m - 1, unique=True)))
    bounds = [0] + cuts + [n]
    levels = tuple(tuple(order[a:b]) for a, b in zip(bounds, bounds[1:]))

    thresholds = []
    cumulative = 0
    previous = 0
    for level in levels:
        cumulative += len(level)
        assume(previous + 1 <= cumulative)
        previous = draw(st.integers(previous + 1, cumulative))
        thresholds.append(previous)
    conjunctive = draw(st.booleans())
    return HierarchicalSpec(levels, tuple(thresholds), conjunctive=conjunctive)


@settings(max_examples=60, deadline=None)
@given(hierarchical_specs())
def test_hierarchical_matches_brute_force(spec):
    assert hierarchical_basis(spec) == basis_from_predicate(spec.predicate(), spec.n)


@st.composite
def compartment_specs(draw):
    n = draw(st.integers(2, 7))
    order = draw(st.permutations(range(1, n + 1)))
    m = draw(st.integers(1, min(3, n)))
    cuts = sorted(draw(st.lists(st.integers(1, n - 1), min_size=m - 1, max_size=m - 1, unique=True)))
    bounds = [0] + cuts + [n]
    compartments = tuple(tuple(order[a:b]) for a, b in zip(bounds, bounds[1:]))
    per = tuple(draw(st.integers(0, len(c))) for c in compartments)
    overall = draw(st.integers(max(1, sum(per)), n))
    return CompartmentSpec(compartments, per, overall)


@settings(max_examples=60, deadline=None)
@given(compartment_specs())
def test_compartment_matches_brute_force(spec):
    assert compartment_basis(spec) == basis_from_predicate(spec.predicate(), spec.n)


@settings(max_examples=40, deadline=None)
@given(hierarchical_specs())
def test_authorization_is_monotone_and_minimize_idempotent(spec):
    basis = hierarchical_basis(spec)
    assert minimize(basis, basis.n) == basis

    universe = range(1, basis.n + 1)
    for size in range(1, basis.n + 1):
        for combo in itertools.combinations(universe, size):
            if is_authorized(combo, basis):
                for extra in universe:
                    assert is_authorized(set(combo) | {extra}, basis)
                assert set(reduce_to_basis(combo, basis)) <= set(combo)
