import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import DIM, PAIRS, SPACE_NAMES, cv, real_vectors, vectors
from gbw import CoeffVector, GreedyOrdering, eval_norm, greedy_orderings, greedy_sets, partial_sum, project, truncate
from gbw.greedy_core import is_greedy_set
from oracles import greedy_sets_brute


def v(*vals):
    return CoeffVector.from_list(list(vals), DIM)


def test_greedy_set_examples():
    fam = greedy_sets(v(3, 1, 1), 2)
    assert (fam.mandatory, fam.tie_class, fam.slots) == ((1,), (2, 3), 1)
    assert list(fam.members()) == [(1, 2), (1, 3)]
    assert list(greedy_sets(v(3, 1, 1), 0).members()) == [()]
    fam = greedy_sets(v(5, 4, 3, 3, 3), 3)
    assert (fam.mandatory, fam.tie_class, fam.slots, fam.count) == ((1, 2), (3, 4, 5), 1, 3)
    assert sorted(fam.members()) == greedy_sets_brute({1: 5, 2: 4, 3: 3, 4: 3, 5: 3}, 3, 5)


def test_greedy_sets_pad_with_zero_indices():
    fam = greedy_sets(CoeffVector.from_list([2.0, 1.0], 4), 3)
    assert sorted(fam.members()) == [(1, 2, 3), (1, 2, 4)]


@given(x=vectors(), m=st.integers(0, DIM))
def test_greedy_family_equals_subset_filter(x, m):
    X = cv(x)
    fam = sorted(greedy_sets(X, m).members(cap=10**6))
    assert fam == greedy_sets_brute(x, m, DIM)
    assert all(is_greedy_set(X, L) for L in fam)


@given(x=vectors(min_support=1), m=st.integers(0, 10), c=st.sampled_from([0.25, 3.0, -2.0]))
def test_greedy_sets_scale_invariant(x, m, c):
    X = cv(x)
    assert sorted(greedy_sets(X, m).members(10**6)) == sorted(greedy_sets(X.scale(c), m).members(10**6))


def test_project_and_partial_sum_examples():
    x = v(1, 2, 3)
    assert project(x, [2]) == v(0, 2, 0)
    assert project(x, []) == CoeffVector.zero(DIM)
    assert project(x, [1, 2, 3, 7]) == x
    y = v(1, 3, 2)
    assert partial_sum(y, 1) == v(1)
    assert partial_sum(y, 0) == CoeffVector.zero(DIM)
    assert partial_sum(y, DIM) == y
    with pytest.raises(ValueError):
        partial_sum(y, DIM + 1)


def test_truncation_examples():
    x = v(2, -3, 0.5)
    assert truncate(x, 1) == v(1, -1, 0.5)
    assert truncate(truncate(x, 1), 1) == truncate(x, 1)
    assert truncate(x, 3) == x
    with pytest.raises(ValueError):
        truncate(x, 0)


@pytest.mark.parametrize("name", SPACE_NAMES)
@given(x=real_vectors(), alpha=st.floats(0.01, 12))
def test_truncation_bound_and_idempotence(name, x, alpha):
    space, _ = PAIRS[name]
    X = cv(x)
    T = truncate(X, alpha)
    assert eval_norm(space, T) <= eval_norm(space, X) + 1e-12
    assert truncate(T, alpha) == T
    assert T.sup_norm <= alpha


def test_ordering_examples():
    ords, over = greedy_orderings(v(3, 1, 1), 10)
    assert [o.order for o in ords] == [(1, 2, 3), (1, 3, 2)] and not over
    assert ords[0] == GreedyOrdering.canonical(v(3, 1, 1))
    ords, over = greedy_orderings(v(5, 4, 3), 10)
    assert [o.order for o in ords] == [(1, 2, 3)] and not over
    ords, over = greedy_orderings(v(1, 1, 1), 2)
    assert len(ords) == 2 and over


@given(x=vectors(max_support=5))
def test_orderings_are_valid_and_complete(x):
    X = cv(x)
    ords, over = greedy_orderings(X, 10**4)
    assert not over
    assert len({o.order for o in ords}) == len(ords)
    assert all(o.is_valid_for(X) for o in ords)
    # heads of greedy orderings are greedy sets
    for o in ords:
        for k in range(len(x) + 1):
            assert is_greedy_set(X, o.head(k))


def test_rho_extends_past_support():
    x = CoeffVector.from_dict({2: 5.0, 3: 1.0}, 6)
    o = GreedyOrdering((2, 3))
    assert [o.rho(j, x) for j in range(1, 6)] == [2, 3, 1, 4, 5]
