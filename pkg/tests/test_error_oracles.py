from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import DIM, PAIRS, SPACE_NAMES, cv, vectors
from gbw import CoeffVector, GreedyOrdering, SigmaKind, SpaceSpec, UnsupportedSpace, WeightSeq, gamma, sigma
from gbw.batch import batch_gamma, batch_norm, support_batches
from gbw.error_oracles import gamma_with_witness, sigma_with_witness
from gbw.greedy_core import greedy_orderings
from oracles import Oracle, sigma_best_grid

L1 = SpaceSpec("WeightedL1", DIM, WeightSeq.constant(1.0))
BEST, PROJ, PARTIAL = SigmaKind("Best"), SigmaKind("Proj"), SigmaKind("Partial")


def v(*vals):
    return CoeffVector.from_list(list(vals), DIM)


def test_gamma_examples():
    assert gamma(L1, v(1, 3), 1) == 1
    assert gamma(L1, v(3, 1, 1), 2) == 1
    w121 = SpaceSpec("WeightedL1", DIM, WeightSeq.eventually([1.0, 2.0], 1.0))
    val, L = gamma_with_witness(w121, v(1, 1), 1)
    assert val == 2 and L == (1,)
    assert gamma(L1, v(3, 1), 5) == 0


def test_sigma_examples():
    assert sigma(L1, PROJ, v(3, 1), 1) == 1
    assert sigma(L1, PARTIAL, v(1, 3), 1) == 3
    assert sigma(L1, BEST, v(3, 1), 1) == 1
    x = v(0, 5, 1)
    assert sigma(L1, SigmaKind("LeftDK", GreedyOrdering((2, 3))), x, 1) == 6
    assert sigma_with_witness(L1, PARTIAL, v(5, 1, 1), 2) == (1.0, (1, 2))
    assert sigma_with_witness(L1, PARTIAL, v(1, 5, 1), 1) == (6.0, (1,))


def test_best_matches_coefficient_grid_search():
    from oracles import BruteSpace
    brute = BruteSpace("l1", DIM)
    x = {1: 3.0, 2: 1.0}
    assert sigma_best_grid(brute, x, 1, [0.5, 1.0, 3.0]) == sigma(L1, BEST, cv(x), 1)
    m7, bm7 = PAIRS["schreier_m7"]
    x = {2: 1.0, 3: -0.5, 4: 1.0, 6: 0.5}
    grid = np.linspace(-1.5, 1.5, 13)
    assert sigma_best_grid(bm7, x, 1, grid) >= sigma(m7, BEST, cv(x), 1) - 1e-12
    assert sigma_best_grid(bm7, x, 1, grid) == pytest.approx(sigma(m7, BEST, cv(x), 1))


def test_dk_orderings_must_be_greedy():
    with pytest.raises(ValueError, match="not a greedy ordering"):
        sigma(L1, SigmaKind("LeftDK", GreedyOrdering((3, 2))), v(0, 5, 1), 1)
    with pytest.raises(ValueError):
        SigmaKind("LeftDK")


def test_best_refused_on_uncertified_space(monkeypatch):
    monkeypatch.setattr(SpaceSpec, "suppression_unconditional_one", property(lambda self: False))
    with pytest.raises(UnsupportedSpace, match="coefficient optimization unsupported"):
        sigma(L1, BEST, v(3, 1), 1)


@pytest.mark.parametrize("name", SPACE_NAMES)
@given(x=vectors(), data=st.data())
def test_functionals_match_oracle(name, x, data):
    space, brute = PAIRS[name]
    X, o = cv(x), Oracle(brute, x)
    ords, _ = greedy_orderings(X, 24)
    rho = data.draw(st.sampled_from(ords))
    for m in range(0, 4):
        assert gamma(space, X, m) == pytest.approx(o.gamma(m), abs=1e-9)
        assert sigma(space, PROJ, X, m) == pytest.approx(o.sigma_proj(m), abs=1e-9)
        assert sigma(space, BEST, X, m) == pytest.approx(o.sigma_proj(m), abs=1e-9)
        assert sigma(space, PARTIAL, X, m) == pytest.approx(o.sigma_partial(m), abs=1e-9)
        assert sigma(space, SigmaKind("LeftDK", rho), X, m) == pytest.approx(o.sigma_left(m, rho.order), abs=1e-9)
        assert sigma(space, SigmaKind("RightDK", rho), X, m) == pytest.approx(o.sigma_right(m, rho.order), abs=1e-9)


@pytest.mark.parametrize("name", SPACE_NAMES)
@given(x=vectors(), c=st.sampled_from([-3.0, 0.5, 2.0]))
def test_sigma_chain_monotonicity_homogeneity(name, x, c):
    space, _ = PAIRS[name]
    X = cv(x)
    prev = None
    for m in range(0, 5):
        best, proj, part = (sigma(space, k, X, m) for k in (BEST, PROJ, PARTIAL))
        assert part >= proj - 1e-12 and proj >= best - 1e-12
        assert gamma(space, X, m) >= proj - 1e-12
        if prev is not None:
            assert all(a <= b + 1e-12 for a, b in zip((best, proj, part), prev))
        prev = (best, proj, part)
        assert sigma(space, PROJ, X.scale(c), m) == pytest.approx(abs(c) * proj, rel=1e-12, abs=1e-12)
        assert gamma(space, X.scale(c), m) == pytest.approx(abs(c) * gamma(space, X, m), rel=1e-12, abs=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("name", ("renormed_l1", "schreier_m7", "schreier_em3"))
def test_quasi_greedy_constant_one_exhaustive(name):
    # every greedy remainder of every x with |supp x| <= 8 in [1, 9], moduli {1/2, 1, 2}
    space, _ = PAIRS[name]
    for supp, M in support_batches(9, 8, (0.5, 1.0, 2.0)):
        nx = batch_norm(space, supp, M)
        for k in range(1, len(supp)):
            assert np.all(batch_gamma(space, supp, M, k) <= nx + 1e-12)


def test_family_overflow_is_explicit():
    from gbw import EnumerationOverflow
    x = CoeffVector.indicator(range(1, 21), 20)
    with pytest.raises(EnumerationOverflow):
        gamma(SpaceSpec("WeightedL1", 20, WeightSeq.constant(1.0)), x, 10, cap=100)
