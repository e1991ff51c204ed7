import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from gbw import CoeffVector, SpaceSpec, WeightSeq, named_space  # noqa: E402
from oracles import BruteSpace  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DIM = 12
GRID = (-2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0)


def construction_pairs(dim=DIM):
    """(package space, brute-force twin) for the three constructions plus unweighted l1."""
    return {
        "l1": (named_space("l1", dim), BruteSpace("l1", dim)),
        "renormed_l1": (named_space("renormed_l1", dim), BruteSpace("l1", dim, w=lambda n: 1.0 if n % 2 else 2.0)),
        "schreier_m7": (named_space("schreier_m7", dim), BruteSpace("dyadic", dim)),
        "schreier_em3": (named_space("schreier_em3", dim), BruteSpace("sqrt", dim, w=lambda n: 0.5 if n == 2 else 1.0)),
    }


PAIRS = construction_pairs()
SPACE_NAMES = tuple(PAIRS)


@pytest.fixture(params=SPACE_NAMES)
def space_pair(request):
    return PAIRS[request.param]


@st.composite
def vectors(draw, dim=DIM, max_support=10, grid=GRID, min_support=0):
    k = draw(st.integers(min_support, max_support))
    supp = draw(st.lists(st.integers(1, dim), min_size=k, max_size=k, unique=True))
    vals = draw(st.lists(st.sampled_from(grid), min_size=k, max_size=k))
    return dict(zip(supp, vals))


@st.composite
def real_vectors(draw, dim=DIM, max_support=8):
    x = draw(vectors(dim=dim, max_support=max_support))
    out = {}
    for n in x:
        v = draw(st.floats(-10, 10, allow_nan=False).filter(lambda t: abs(t) > 1e-6))
        out[n] = v
    return out


def cv(x, dim=DIM):
    return CoeffVector.from_dict(x, dim)


__all__ = ["PAIRS", "SPACE_NAMES", "vectors", "real_vectors", "cv", "DIM", "GRID", "SpaceSpec", "WeightSeq"]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
