"""Instance-level checks of the norm constructions and of relations between constants.

Every check scans a finite budget and asserts inequalities that hold instance by
instance, so a failure always comes with a concrete, re-checkable payload.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Mapping

import numpy as np

from .batch import (
    batch_gamma,
    batch_sigma_partial,
    batch_sigma_proj,
    ceil_mul,
    support_batches,
)
from .constants import (
    ConstantKind,
    SearchBudget,
    evaluate_witness,
    scan_instances,
    witness_transport,
)
from .error_oracles import BEST, PARTIAL, PROJ, SigmaKind, UnsupportedSpace, sigma
from .greedy_core import greedy_orderings
from .sequence_space import (
    CoeffVector,
    SpaceSpec,
    WeightSeq,
    eval_norm,
    is_power_of_two,
    space_to_json,
)

__all__ = [
    "CheckReport",
    "CONSTRUCTIONS",
    "RELATIONS",
    "check_construction",
    "check_relation",
    "schreier_gap_ratio",
    "em3_weight_problems",
]

TOL = 1e-9

CONSTRUCTIONS = ("renormed_l1", "schreier_m7", "schreier_em3")
RELATIONS = (
    "m2_transport", "m1_transport", "m4_transport", "ep1_democracy", "m6_equivalence",
    "slc_eq_1slc", "lemma_l2_democracy", "omega_psi_forms", "m5_dk_conservative", "m8_reverse",
)


@dataclass
class CheckReport:
    name: str
    instances_checked: int = 0
    passed: bool = True
    counterexample: dict | None = None
    metrics: dict[str, float] = field(default_factory=dict)

    def fail(self, payload: dict):
        """Record the first violation only."""
        if self.passed:
            self.passed = False
            self.counterexample = payload

    def bump(self, key: str, value: float):
        if not math.isnan(value):
            self.metrics[key] = max(self.metrics.get(key, -math.inf), value)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "instances_checked": self.instances_checked,
            "passed": self.passed,
            "counterexample": self.counterexample,
            "metrics": self.metrics,
        }


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return math.nan if num == 0 else math.inf
    return num / den


def _guard_sigma_chain(report: CheckReport, space: SpaceSpec, x: CoeffVector, m: int, where: str):
    """sigma <= projection error <= partial-sum error."""
    s_best, s_proj, s_part = (sigma(space, k, x, m) for k in (BEST, PROJ, PARTIAL))
    if not (s_best <= s_proj + TOL and s_proj <= s_part + TOL):
        report.fail({"guard": "sigma chain", "where": where, "x": x.to_json(), "m": m,
                     "sigma": s_best, "sigma_proj": s_proj, "sigma_partial": s_part})


# -- constructions ---------------------------------------------------------------

def _batch_inequality(report: CheckReport, space: SpaceSpec, budget: SearchBudget, scale_m,
                      partial: bool):
    """gamma_{scale_m(m)}(x) <= sigma_m(x) (projection or partial-sum) on every batch instance."""
    mags = sorted({abs(c) for c in budget.coeff_grid if c != 0})
    worst = 0.0
    for supp, M in support_batches(budget.window, budget.max_support, mags):
        for m in range(0, budget.max_m + 1):
            k = scale_m(m)
            g = batch_gamma(space, supp, M, k)
            sp = batch_sigma_proj(space, supp, M, m)
            sh = batch_sigma_partial(space, supp, M, m)
            rhs = sh if partial else sp
            report.instances_checked += M.shape[0]
            bad = np.flatnonzero(g > rhs + TOL)
            chain = np.flatnonzero(sp > sh + TOL)
            pos = rhs > 0
            if pos.any():
                worst = max(worst, float(np.max(g[pos] / rhs[pos])))
            for rows, what in ((bad, "inequality"), (chain, "sigma chain")):
                if rows.size:
                    r = int(rows[0])
                    report.fail({"violation": what, "support": list(supp), "moduli": M[r].tolist(),
                                 "m": m, "k": k, "gamma": float(g[r]), "sigma_proj": float(sp[r]),
                                 "sigma_partial": float(sh[r])})
    report.metrics["max_gamma_over_sigma"] = worst


def _renormed_l1(params: Mapping, budget: SearchBudget) -> CheckReport:
    weights = WeightSeq.from_json(params.get("weights", {"prefix": [], "tail": {"periodic": [1.0, 2.0]}}))
    dim_cap = max(budget.window, int(params.get("dim_cap", budget.window)))
    space = SpaceSpec("WeightedL1", dim_cap, weights=weights)
    vals = weights.values_upto(dim_cap)
    lam = float(params.get("lam", max(vals) / min(vals)))
    report = CheckReport("renormed_l1")
    report.metrics["lambda"] = lam
    _batch_inequality(report, space, budget, lambda m: ceil_mul(lam, m), partial=False)
    return report


def schreier_gap_ratio(k: int, N: int | None = None) -> tuple[float, float, float, dict]:
    """``(||1_A||, ||1_B||, ratio, sets)`` for the dyadic block ``A`` of size ``k`` and the next ``k`` non-dyadic integers."""
    if k < 1:
        raise ValueError("k must be positive")
    if N is None:
        N = 0
        while 2 ** (N + 1) < k:
            N += 1
    elif 2 ** (N + 1) < k:
        raise ValueError(f"N={N} too small: need 2^(N+1) >= k={k}")
    A = [2 ** (N + i) for i in range(1, k + 1)]
    B, n = [], A[-1] + 1
    while len(B) < k:
        if not is_power_of_two(n):
            B.append(n)
        n += 1
    space = SpaceSpec("SchreierDichotomous", B[-1])
    na = eval_norm(space, CoeffVector.indicator(A, space.dim_cap))
    nb = eval_norm(space, CoeffVector.indicator(B, space.dim_cap))
    return na, nb, na / nb, {"N": N, "A_range": [A[0], A[-1]], "B_range": [B[0], B[-1]]}


def _harm(n: int) -> float:
    return math.fsum(1 / i for i in range(1, n + 1))


def _root(n: int) -> float:
    return math.fsum(1 / math.sqrt(i) for i in range(1, n + 1))


def _m7_pair_bound(lam: float, b: int) -> float:
    """Upper bound on ||1_A||/||1_B|| for A < B with (lam-1) max A + |A| <= |B| = b."""
    j = 0
    while (lam - 1) * 2 ** j + (j + 1) <= b + 1e-12:
        j += 1
    return max(_harm(b), _root(j)) / _harm(math.ceil(b / 2))


def _schreier_m7(params: Mapping, budget: SearchBudget) -> CheckReport:
    report = CheckReport("schreier_m7")
    ks = [int(k) for k in params.get("k_list", (4, 16, 64))]
    prev = -math.inf
    for k in ks:
        na, nb, r, _ = schreier_gap_ratio(k, params.get("N"))
        report.instances_checked += 1
        report.metrics[f"r({k})"] = r
        if not r > prev:
            report.fail({"violation": "r(k) not strictly increasing", "k": k, "r": r, "previous": prev})
        prev = r
    lam = float(params.get("lam", 2.0))
    if lam > 1:
        window = int(params.get("delta_window", budget.window))
        space = SpaceSpec("SchreierDichotomous", window)
        cache: dict[tuple, float] = {}

        def nrm(S):
            if S not in cache:
                cache[S] = eval_norm(space, CoeffVector.indicator(S, window))
            return cache[S]

        worst = 0.0
        for a in range(1, budget.max_support + 1):
            for A in combinations(range(1, window + 1), a):
                right = range(A[-1] + 1, window + 1)
                for b in range(a, budget.max_support - a + 1):
                    if (lam - 1) * A[-1] + a > b + 1e-12:
                        continue
                    bound = _m7_pair_bound(lam, b)
                    for B in combinations(right, b):
                        r = nrm(A) / nrm(B)
                        report.instances_checked += 1
                        worst = max(worst, r)
                        if r > bound + TOL:
                            report.fail({"violation": "max-conservative bound", "A": list(A), "B": list(B),
                                         "ratio": r, "bound": bound})
        report.metrics["max_conservative_ratio"] = worst
        report.metrics["lambda"] = lam
    return report


def em3_weight_problems(weights: WeightSeq, dim_cap: int) -> list[str]:
    """Violated weight conditions of the square-root Schreier construction (empty when valid)."""
    problems = []
    vals = [weights(n) for n in range(1, dim_cap + 1)]
    tail = weights.tail
    if any(not (0 < v <= 1) for v in vals + list(tail)):
        problems.append("condition 1 violated: need 0 < w(n) <= 1 for all n")
    if any(v < 1 for v in tail):
        problems.append("condition 2 violated: {n : w(n) < 1} must be finite (tail must be 1)")
    if not any(vals[i] > vals[j] for i in range(len(vals)) for j in range(i + 1, len(vals))):
        problems.append("condition 3 violated: need some i < j with w(i) > w(j)")
    return problems


def _schreier_em3(params: Mapping, budget: SearchBudget) -> CheckReport:
    weights = WeightSeq.from_json(params.get("weights", {"prefix": [1.0, 0.5], "tail": {"constant": 1.0}}))
    dim_cap = max(budget.window, int(params.get("dim_cap", budget.window)))
    problems = em3_weight_problems(weights, dim_cap)
    if problems:
        raise ValueError("invalid schreier_em3 weights: " + "; ".join(problems))
    space = SpaceSpec("SchreierSqrtWeighted", dim_cap, weights=weights)
    nw = space.n_below_one
    report = CheckReport("schreier_em3")
    report.metrics["N_w"] = nw
    _batch_inequality(report, space, budget, lambda m: (nw + 1) * m, partial=True)
    vals = [weights(n) for n in range(1, dim_cap + 1)]
    i, j = next((i, j) for i in range(len(vals)) for j in range(i + 1, len(vals)) if vals[i] > vals[j])
    wit = {"x": [], "A": [i + 1], "B": [j + 1], "eps": [1], "delta": [1]}
    report.metrics["pslc_unit_ratio"] = evaluate_witness(space, ConstantKind("PSLC"), wit)
    report.metrics["pslc_witness_i"] = i + 1
    report.metrics["pslc_witness_j"] = j + 1
    return report


_CONSTRUCTION_FNS = {"renormed_l1": _renormed_l1, "schreier_m7": _schreier_m7, "schreier_em3": _schreier_em3}


def check_construction(name: str, params: Mapping | None = None, budget: SearchBudget | None = None
                       ) -> CheckReport:
    if name not in _CONSTRUCTION_FNS:
        raise ValueError(f"unknown construction {name!r}; expected one of {CONSTRUCTIONS}")
    return _CONSTRUCTION_FNS[name](params or {}, budget or SearchBudget())


# -- relations ---------------------------------------------------------------------

def _require_cl_one(space: SpaceSpec, name: str):
    if not space.suppression_unconditional_one:
        raise UnsupportedSpace(f"{name} needs a norm certified 1-suppression-unconditional "
                               f"(hence quasi-greedy with constant 1); {space.kind} is not")


def _each(space, kind, budget, fn: Callable[[float, dict], None]):
    """Run ``fn(ratio, witness)`` on every instance with a defined ratio."""

    def visit(num, den, build):
        r = _ratio(num, den)
        if not math.isnan(r):
            fn(r, build())

    scan_instances(space, kind, budget, visit)


def _transport_scan(report, space, budget, src: ConstantKind, dst: ConstantKind, guard: bool):
    label = f"{src.tag}->{dst.tag}"

    def fn(r, w):
        out, rt = witness_transport(space, src, dst, w)
        report.instances_checked += 1
        report.bump(f"max_source[{label}]", r)
        report.bump(f"max_transported[{label}]", rt)
        if math.isnan(rt) or rt < r - TOL:
            report.fail({"violation": f"transport {label}", "source": w, "source_ratio": r,
                         "transported": out, "transported_ratio": rt})
        if guard and "m" in out:
            _guard_sigma_chain(report, space, CoeffVector.from_json(out["x"], space.dim_cap),
                               int(out["m"]), label)

    _each(space, src, budget, fn)


def _rel_transport(pairs):
    def run(report, space, budget, lam):
        _require_cl_one(space, report.name)
        for a, b in pairs:
            _transport_scan(report, space, budget, ConstantKind(a, lam), ConstantKind(b, lam), guard=True)
    return run


def _rel_ep1(report, space, budget, lam):
    cap = space.dim_cap
    W = list(range(1, budget.window + 1))
    nrm = lambda S: eval_norm(space, CoeffVector.indicator(sorted(S), cap))
    c_obs = 0.0
    pairs = []
    for a in range(1, budget.max_support + 1):
        for b in range(math.ceil((lam * lam + lam) * a - 1e-12), budget.max_support - a + 1):
            for A in combinations(W, a):
                for B in combinations(W, b):
                    used = set(A) | set(B)
                    d = ceil_mul(lam, a)
                    D = [n for n in range(1, cap + 1) if n not in used][:d]
                    if len(D) < d:
                        report.metrics["skipped_no_room"] = report.metrics.get("skipped_no_room", 0) + 1
                        continue
                    if not (lam * a <= len(D) + 1e-12 and lam * len(D) <= b + 1e-12):
                        report.fail({"violation": "auxiliary set sizes", "A": list(A), "B": list(B), "D": D})
                    nA, nB, nD = nrm(A), nrm(B), nrm(D)
                    c_obs = max(c_obs, nA / nD, nD / nB)
                    pairs.append((A, B, nA / nB))
                    report.instances_checked += 1
    for A, B, r in pairs:
        report.bump("max_democracy_ratio", r)
        if r > c_obs ** 2 + TOL:
            report.fail({"violation": "democracy bound", "A": list(A), "B": list(B), "ratio": r,
                         "slc_constant_observed": c_obs})
    report.metrics["slc_constant_observed"] = c_obs


def _rel_m6(report, space, budget, lam):
    _require_cl_one(space, report.name)
    cap = space.dim_cap

    def pslc(r, w):
        x = CoeffVector.from_json(w["x"], cap)
        A, B = w["A"], w["B"]
        yB = x + CoeffVector.indicator(B, cap, w["delta"])
        n_yB = eval_norm(space, yB)
        nA = eval_norm(space, CoeffVector.indicator(A, cap))
        nB = eval_norm(space, CoeffVector.indicator(B, cap))
        delta = 0.0 if not A else nA / nB
        report.instances_checked += 1
        report.bump("max_pslc_ratio", r)
        report.bump("max_conservative_ratio", delta)
        checks = {
            "quasi-greedy step": eval_norm(space, x) <= n_yB + TOL,
            "indicator step": nB <= 2 * n_yB + TOL,
            "combined bound": r <= 1 + 2 * delta + TOL,
        }
        for what, ok in checks.items():
            if not ok:
                report.fail({"violation": what, "instance": w, "ratio": r, "delta": delta})

    _each(space, ConstantKind("PSLC", lam), budget, pslc)
    _transport_scan(report, space, budget, ConstantKind("MaxConservative", lam), ConstantKind("PSLC", lam),
                    guard=False)
    _transport_scan(report, space, budget, ConstantKind("PSLC", lam), ConstantKind("PartiallyGreedy", lam),
                    guard=True)


def _rel_slc_eq(report, space, budget, lam):
    cap = space.dim_cap
    signs = budget.signs()

    def fn(r, w):
        A, B = w["A"], w["B"]
        if len(A) >= len(B):
            return
        x = CoeffVector.from_json(w["x"], cap)
        top = max([0] + A + B + list(x.support))
        D = list(range(top + 1, top + 1 + len(B) - len(A)))
        if D and D[-1] > cap:
            report.metrics["skipped_no_room"] = report.metrics.get("skipped_no_room", 0) + 1
            return
        yA = x + CoeffVector.indicator(A, cap, w["eps"])
        base = eval_norm(space, yA)
        padded = max(eval_norm(space, yA + CoeffVector.indicator(D, cap, th))
                     for th in product(signs, repeat=len(D)))
        den = eval_norm(space, x + CoeffVector.indicator(B, cap, w["delta"]))
        r_eq = _ratio(padded, den)
        report.instances_checked += 1
        report.bump("max_ratio_unequal", r)
        report.bump("max_ratio_padded", r_eq)
        if base > padded + TOL or r > r_eq + TOL:
            report.fail({"violation": "padding", "instance": w, "D": D, "ratio": r, "padded_ratio": r_eq})

    _each(space, ConstantKind("SLC", 1.0), budget, fn)


def _rel_lemma_l2(report, space, budget, lam):
    cap = space.dim_cap
    W = list(range(1, budget.window + 1))
    nrm = lambda S: eval_norm(space, CoeffVector.indicator(sorted(S), cap))
    unit = [nrm([n]) for n in W]
    spread = max(unit) / min(unit)  # sup ||e_n|| * sup ||e_n^*|| for a 1-unconditional lattice norm
    v = math.ceil(2 * lam - 1e-12)
    for m in range(1, budget.max_support // 2 + 1):
        for A in combinations(W, m):
            nA = nrm(A)
            if m >= 2 * lam:
                size = math.ceil(m / v)
                parts = [A[i:i + size] for i in range(0, m, size)]
                part_norms = [nrm(p) for p in parts]
            for B in combinations(W, m):
                if len(set(A) | set(B)) > budget.max_support:
                    continue
                nB = nrm(B)
                report.instances_checked += 1
                if m >= 2 * lam:
                    ok = (len(parts) <= v and all(len(p) <= m / lam + 1e-12 for p in parts)
                          and nA <= math.fsum(part_norms) + TOL and nA <= v * max(part_norms) + TOL)
                    report.bump("max_parts_ratio", nA / max(part_norms))
                    what = "partition bound"
                else:
                    ok = nA < 2 * lam * spread * nB + TOL
                    what = "small-set bound"
                if not ok:
                    report.fail({"violation": what, "A": list(A), "B": list(B)})
                report.bump("max_democracy_ratio", nA / nB)


def _rel_omega_psi(report, space, budget, lam):
    for a, b in (("SLC", "OmegaSLC"), ("OmegaSLC", "SLC"), ("PSLC", "PsiPSLC"), ("PsiPSLC", "PSLC")):
        _transport_scan(report, space, budget, ConstantKind(a, lam), ConstantKind(b, lam), guard=False)


def _rel_dk(set_tag, dk_tag):
    def run(report, space, budget, lam):
        _require_cl_one(space, report.name)
        _transport_scan(report, space, budget, ConstantKind(set_tag, lam), ConstantKind(dk_tag, lam), guard=True)
        # enlarging the greedy head never hurts when the quasi-greedy constant is 1
        cap = space.dim_cap
        vals = budget.values()
        for s in range(1, budget.max_support + 1):
            for X in combinations(range(1, budget.window + 1), s):
                for coeffs in product(vals, repeat=s):
                    x = CoeffVector(tuple(zip(X, coeffs)), cap)
                    rhos, over = greedy_orderings(x, budget.ordering_cap)
                    for rho in rhos:
                        for m in range(0, budget.max_m + 1):
                            big = eval_norm(space, x.drop(rho.head(ceil_mul(lam, m))))
                            small = eval_norm(space, x.drop(rho.head(m)))
                            report.instances_checked += 1
                            if big > small + TOL:
                                report.fail({"violation": "head enlargement", "x": x.to_json(),
                                             "ordering": list(rho.order), "m": m})
    return run


_RELATION_FNS = {
    "m2_transport": _rel_transport((("SLC", "AlmostGreedy"), ("AlmostGreedy", "SLC"))),
    "m1_transport": _rel_transport((("SLC", "Greedy"), ("Greedy", "SLC"))),
    "m4_transport": _rel_transport((("PSLC", "PartiallyGreedy"), ("PartiallyGreedy", "PSLC"))),
    "ep1_democracy": _rel_ep1,
    "m6_equivalence": _rel_m6,
    "slc_eq_1slc": _rel_slc_eq,
    "lemma_l2_democracy": _rel_lemma_l2,
    "omega_psi_forms": _rel_omega_psi,
    "m5_dk_conservative": _rel_dk("Conservative", "DKPartial"),
    "m8_reverse": _rel_dk("ReverseConservative", "ReversePartial"),
}


def check_relation(name: str, space: SpaceSpec, budget: SearchBudget | None = None, lam: float = 1.0
                   ) -> CheckReport:
    """Scan ``budget`` and assert the instance-level inequalities behind relation ``name``."""
    if name not in _RELATION_FNS:
        raise ValueError(f"unknown relation check {name!r}; expected one of {RELATIONS}")
    budget = budget or SearchBudget()
    budget.check_space(space)
    report = CheckReport(name)
    _RELATION_FNS[name](report, space, budget, float(lam))
    report.metrics["lambda"] = float(lam)
    if report.counterexample is not None:
        report.counterexample.setdefault("space", space_to_json(space))
    return report
