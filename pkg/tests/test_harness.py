import math

import pytest

from conftest import PAIRS
from gbw import CheckReport, ConstantKind, SearchBudget, SpaceSpec, WeightSeq, check_construction, check_relation
from gbw import evaluate_witness
from gbw.harness import RELATIONS, em3_weight_problems, schreier_gap_ratio

SMALL = SearchBudget(max_support=4, window=6, max_m=2)


def direct_r(k):
    return math.fsum(n ** -0.5 for n in range(1, k + 1)) / math.fsum(1 / n for n in range(1, k + 1))


def test_schreier_gap_matches_direct_sums():
    for k in (1, 2, 4, 7, 16, 33, 64):
        na, nb, r, info = schreier_gap_ratio(k)
        assert r == pytest.approx(direct_r(k), abs=1e-12)
        assert info["A_range"][0] == 2 ** (info["N"] + 1)
    with pytest.raises(ValueError):
        schreier_gap_ratio(64, N=2)


def test_schreier_m7_report():
    rep = check_construction("schreier_m7", {"k_list": [4, 16, 64]}, SearchBudget(max_support=6, window=10))
    assert rep.passed and rep.counterexample is None
    assert [rep.metrics[f"r({k})"] for k in (4, 16, 64)] == sorted(rep.metrics[f"r({k})"] for k in (4, 16, 64))
    rep = check_construction("schreier_m7", {"k_list": [16, 4]})
    assert not rep.passed and "increasing" in rep.counterexample["violation"]


def test_renormed_l1_passes_and_detects_wrong_lambda():
    b = SearchBudget(max_support=5, window=8, max_m=3, coeff_grid=(2, 1, 0.5))
    rep = check_construction("renormed_l1", {}, b)
    assert rep.passed and rep.instances_checked > 0
    bad = check_construction("renormed_l1", {"lam": 1.0}, b)
    assert not bad.passed
    ce = bad.counterexample
    assert ce["gamma"] > ce["sigma_proj"]
    # the payload re-evaluates with the public functions
    from gbw import CoeffVector, SigmaKind, eval_norm, gamma, sigma
    space = SpaceSpec("WeightedL1", 8, WeightSeq.periodic([1.0, 2.0]))
    x = CoeffVector.from_dict(dict(zip(ce["support"], ce["moduli"])), 8)
    assert gamma(space, x, ce["k"]) == pytest.approx(ce["gamma"])
    assert sigma(space, SigmaKind("Proj"), x, ce["m"]) == pytest.approx(ce["sigma_proj"])


def test_em3_report_and_weight_validation():
    rep = check_construction("schreier_em3", {}, SearchBudget(max_support=5, window=9, max_m=2,
                                                              coeff_grid=(1, 0.5)))
    assert rep.passed and rep.metrics["N_w"] == 1
    assert rep.metrics["pslc_unit_ratio"] == 2.0
    assert (rep.metrics["pslc_witness_i"], rep.metrics["pslc_witness_j"]) == (1, 2)
    assert em3_weight_problems(WeightSeq.eventually([1.0, 0.5]), 10) == []
    probs = em3_weight_problems(WeightSeq.eventually([1.0, 1.5]), 10)
    assert any("condition 1" in p for p in probs)
    assert any("condition 3" in p for p in em3_weight_problems(WeightSeq.eventually([0.5, 1.0]), 10))
    assert any("condition 2" in p for p in em3_weight_problems(WeightSeq.periodic([1.0, 0.5]), 10))
    with pytest.raises(ValueError, match="condition 1"):
        check_construction("schreier_em3", {"weights": {"prefix": [1.0, 2.0], "tail": {"constant": 1.0}}})


@pytest.mark.parametrize("name", RELATIONS)
@pytest.mark.parametrize("space_name", ["l1", "renormed_l1", "schreier_m7", "schreier_em3"])
@pytest.mark.parametrize("lam", [1.0, 2.0])
def test_relations_hold(name, space_name, lam):
    space, _ = PAIRS[space_name]
    # at lam = 2 the democracy relation needs 6|A| <= |B|
    budget = SearchBudget(max_support=7, window=8) if name == "ep1_democracy" else SMALL
    rep = check_relation(name, space, budget, lam)
    assert rep.passed, rep.counterexample
    assert rep.instances_checked > 0


def test_transport_relation_on_w21_reaches_two():
    space = SpaceSpec("WeightedL1", 8, WeightSeq.eventually([2.0], 1.0))
    rep = check_relation("m2_transport", space, SearchBudget(max_support=6, window=6), 1.0)
    assert rep.passed
    assert rep.metrics["max_source[SLC->AlmostGreedy]"] == pytest.approx(2.0)
    assert rep.metrics["max_transported[SLC->AlmostGreedy]"] == pytest.approx(2.0)


def test_ep1_example_on_weights_in_one_two():
    space = SpaceSpec("WeightedL1", 24, WeightSeq.periodic([1.0, 2.0]))
    rep = check_relation("ep1_democracy", space, SearchBudget(max_support=7, window=12, max_m=2), 2.0)
    assert rep.passed and rep.instances_checked == 12 * math.comb(12, 6)
    assert rep.metrics["max_democracy_ratio"] <= 1.0


def test_slc_eq_on_l1_is_exactly_one():
    space, _ = PAIRS["l1"]
    rep = check_relation("slc_eq_1slc", space, SMALL, 1.0)
    assert rep.passed


def test_report_json_and_determinism():
    space, _ = PAIRS["schreier_m7"]
    a = check_relation("lemma_l2_democracy", space, SMALL, 1.5).to_json()
    b = check_relation("lemma_l2_democracy", space, SMALL, 1.5).to_json()
    assert a == b and a["passed"] is True and a["counterexample"] is None


def test_report_invariant():
    rep = CheckReport("x")
    assert rep.passed
    rep.fail({"violation": "v"})
    rep.fail({"violation": "w"})
    assert not rep.passed and rep.counterexample == {"violation": "v"}


def test_unknown_names_rejected():
    with pytest.raises(ValueError):
        check_relation("nope", PAIRS["l1"][0])
    with pytest.raises(ValueError):
        check_construction("nope")
