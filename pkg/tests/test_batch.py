import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import DIM, PAIRS, SPACE_NAMES
from gbw import CoeffVector, SigmaKind, eval_norm, gamma, sigma
from gbw.batch import batch_gamma, batch_norm, batch_sigma_partial, batch_sigma_proj, ceil_mul, support_batches


@st.composite
def batches(draw):
    s = draw(st.integers(1, 7))
    supp = tuple(sorted(draw(st.lists(st.integers(1, DIM), min_size=s, max_size=s, unique=True))))
    rows = draw(st.integers(1, 5))
    M = np.array(draw(st.lists(st.lists(st.sampled_from([0.5, 1.0, 1.5, 2.0]), min_size=s, max_size=s),
                               min_size=rows, max_size=rows)))
    return supp, M


@pytest.mark.parametrize("name", SPACE_NAMES)
@given(b=batches(), m=st.integers(0, 4))
def test_batch_matches_scalar(name, b, m):
    space, _ = PAIRS[name]
    supp, M = b
    got = (batch_norm(space, supp, M), batch_gamma(space, supp, M, m),
           batch_sigma_proj(space, supp, M, m), batch_sigma_partial(space, supp, M, m))
    for r, row in enumerate(M):
        x = CoeffVector.from_dict(dict(zip(supp, row)), DIM)
        want = (eval_norm(space, x), gamma(space, x, m), sigma(space, SigmaKind("Proj"), x, m),
                sigma(space, SigmaKind("Partial"), x, m))
        for g, w in zip(got, want):
            assert g[r] == pytest.approx(w, abs=1e-12)


def test_support_batches_counts():
    total = sum(M.shape[0] for _, M in support_batches(5, 3, (-1, 1, 0.5)))
    # C(5,s) supports times 2^s modulus patterns
    assert total == 5 * 2 + 10 * 4 + 10 * 8


def test_ceil_mul():
    assert ceil_mul(2, 3) == 6
    assert ceil_mul(1.1, 10) == 11
    assert ceil_mul(1.5, 3) == 5
