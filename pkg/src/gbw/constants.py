"""Lower-bound estimators for greedy-type constants.

Each constant is the supremum of a defining ratio over a family of instances.
``estimate_constant`` scans every instance inside a finite :class:`SearchBudget`
and returns the largest ratio seen together with an instance attaining it, so
the value is a certified lower bound for the true constant.

All supported norms depend only on coefficient moduli, so by default the scan
fixes every sign to ``+1`` and uses positive grid magnitudes
(``SearchBudget.sign_reduction``); turning it off enumerates signs literally.
"""
from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass
from itertools import combinations, product
from typing import Callable, Iterator, Mapping, Sequence

from .batch import ceil_mul
from .error_oracles import SigmaKind, gamma_with_witness, sigma_with_witness
from .greedy_core import GreedyOrdering, greedy_orderings
from .sequence_space import (
    CoeffVector,
    EnumerationOverflow,
    SpaceSpec,
    eval_norm,
    sgn,
)

__all__ = [
    "CONSTANT_TAGS",
    "LAMBDA_FREE",
    "ConstantKind",
    "SearchBudget",
    "ConstantEstimate",
    "estimate_constant",
    "scan_instances",
    "evaluate_witness",
    "witness_transport",
    "TRANSPORT_PAIRS",
    "UnsupportedTransport",
]

CONSTANT_TAGS = (
    "SuppUncond", "Uncond", "QuasiGreedy",
    "Democracy", "MaxConservative", "Conservative", "ReverseConservative",
    "SLC", "PSLC", "LSLC", "RSLC",
    "AlmostGreedy", "PartiallyGreedy", "Greedy", "DKPartial", "ReversePartial",
    "OmegaSLC", "PsiPSLC",
)
LAMBDA_FREE = ("SuppUncond", "Uncond", "QuasiGreedy")
SET_KINDS = ("Democracy", "MaxConservative", "Conservative", "ReverseConservative")
SLC_KINDS = ("SLC", "PSLC", "LSLC", "RSLC")
# kinds whose x-part must satisfy ||x||_inf <= 1
BOUNDED_KINDS = SLC_KINDS + ("OmegaSLC", "PsiPSLC")
GREEDY_KINDS = ("AlmostGreedy", "PartiallyGreedy", "Greedy", "DKPartial", "ReversePartial")

TIE_TOL = 1e-12

_DENOM_SIGMA = {"AlmostGreedy": "Proj", "Greedy": "Best", "PartiallyGreedy": "Partial",
                "DKPartial": "LeftDK", "ReversePartial": "RightDK"}


@dataclass(frozen=True)
class ConstantKind:
    tag: str
    lam: float = 1.0

    def __post_init__(self):
        if self.tag not in CONSTANT_TAGS:
            raise ValueError(f"unknown constant kind {self.tag!r}; expected one of {CONSTANT_TAGS}")
        if not (math.isfinite(self.lam) and self.lam >= 1):
            raise ValueError(f"lambda must be a finite real >= 1, got {self.lam}")
        if self.tag in LAMBDA_FREE and self.lam != 1:
            raise ValueError(f"{self.tag} takes no lambda parameter")
        object.__setattr__(self, "lam", float(self.lam))

    def __str__(self) -> str:
        return self.tag if self.tag in LAMBDA_FREE else f"{self.tag}({self.lam:g})"

    @classmethod
    def parse(cls, text: str, lam: float | None = None) -> "ConstantKind":
        """Accepts ``"SLC"``, ``"SLC(2)"`` or a tag plus an explicit lambda."""
        m = re.fullmatch(r"\s*(\w+)\s*(?:\(\s*([0-9.eE+-]+)\s*\))?\s*", text)
        if not m:
            raise ValueError(f"cannot parse constant kind {text!r}")
        inner = float(m.group(2)) if m.group(2) else None
        if inner is not None and lam is not None and inner != lam:
            raise ValueError(f"conflicting lambda values in {text!r} and {lam}")
        val = inner if inner is not None else lam
        return cls(m.group(1), 1.0 if val is None else val)


@dataclass(frozen=True)
class SearchBudget:
    """Finite instance domain.

    ``window`` is the index window ``[1, window]``; ``max_support`` bounds the
    number of distinct indices an instance touches (``supp x`` together with
    every index set of the instance).
    """

    max_support: int = 4
    coeff_grid: tuple[float, ...] = (-1.0, -0.5, 0.5, 1.0)
    window: int = 6
    max_m: int = 3
    ordering_cap: int = 24
    max_instances: int = 5_000_000
    sign_reduction: bool = True

    def __post_init__(self):
        object.__setattr__(self, "coeff_grid", tuple(float(c) for c in self.coeff_grid))
        if self.max_support < 0 or self.window < 1 or self.max_m < 0:
            raise ValueError("budget sizes must be nonnegative (window >= 1)")
        if not any(c != 0 for c in self.coeff_grid):
            raise ValueError("coeff_grid must contain a nonzero value")
        if any(not math.isfinite(c) for c in self.coeff_grid):
            raise ValueError("coeff_grid values must be finite")
        if self.ordering_cap < 1 or self.max_instances < 1:
            raise ValueError("ordering_cap and max_instances must be positive")

    @classmethod
    def standard(cls) -> "SearchBudget":
        return cls()

    def values(self, bounded: bool = False) -> tuple[float, ...]:
        """Nonzero coefficient values scanned for a vector entry."""
        vals = sorted({c for c in self.coeff_grid if c != 0}, key=lambda c: (abs(c), c < 0))
        if bounded and any(abs(c) > 1 for c in vals):
            raise ValueError("coeff_grid must lie in [-1, 1] for kinds with ||x||_inf <= 1")
        if self.sign_reduction:
            vals = sorted({abs(c) for c in vals})
        return tuple(vals)

    def signs(self) -> tuple[int, ...]:
        return (1,) if self.sign_reduction else (1, -1)

    def check_space(self, space: SpaceSpec):
        if self.window > space.dim_cap:
            raise ValueError(f"index window [1, {self.window}] exceeds the section [1, {space.dim_cap}]")

    def to_json(self) -> dict:
        d = asdict(self)
        d["coeff_grid"] = list(self.coeff_grid)
        d["index_window"] = [1, d.pop("window")]
        return d

    @classmethod
    def from_json(cls, data: Mapping) -> "SearchBudget":
        data = dict(data)
        if "index_window" in data:
            lo, hi = data.pop("index_window")
            if lo != 1:
                raise ValueError("index_window must start at 1")
            data["window"] = hi
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValueError(f"unknown budget fields {sorted(unknown)}")
        if "coeff_grid" in data:
            data["coeff_grid"] = tuple(data["coeff_grid"])
        return cls(**data)


@dataclass
class ConstantEstimate:
    kind: ConstantKind
    value: float
    witness: dict
    budget: SearchBudget
    empty: bool = False
    instances: int = 0
    orderings_truncated: bool = False

    def to_json(self) -> dict:
        return {
            "kind": self.kind.tag,
            "lambda": self.kind.lam,
            "value": self.value,
            "witness": self.witness,
            "budget": self.budget.to_json(),
            "empty": self.empty,
            "instances": self.instances,
            "orderings_truncated": self.orderings_truncated,
        }


# -- witness helpers ------------------------------------------------------------

_VEC_FIELDS = ("x", "a", "b")
_SET_FIELDS = ("A", "B", "Lambda", "ordering")
_SIGN_FIELDS = ("eps", "delta")
_KEY_ORDER = ("x", "b", "a", "A", "B", "eps", "delta", "m", "Lambda", "ordering")


def _vec_key(pairs) -> tuple:
    return (tuple(n for n, _ in pairs), tuple((abs(v), v < 0) for _, v in pairs))


def witness_key(w: Mapping) -> tuple:
    """Lexicographic order on (support, coefficients, sets, signs, ...)."""
    out = []
    for f in _KEY_ORDER:
        if f not in w:
            continue
        v = w[f]
        if f in _VEC_FIELDS:
            out.append(_vec_key(v))
        elif f in _SIGN_FIELDS:
            out.append(tuple(s < 0 for s in v))
        elif f in _SET_FIELDS:
            out.append(tuple(v))
        else:
            out.append(v)
    return tuple(out)


class _Best:
    """Running maximum with a lexicographically smallest witness among near-ties."""

    def __init__(self, budget: SearchBudget):
        self.value = -math.inf
        self.witness: dict = {}
        self.key: tuple | None = None
        self.count = 0
        self.limit = budget.max_instances

    def offer(self, num: float, den: float, build: Callable[[], dict]):
        self.count += 1
        if self.count > self.limit:
            raise EnumerationOverflow(f"instance budget exceeded ({self.limit} instances)")
        if den == 0:
            if num == 0:
                return
            ratio = math.inf
        else:
            ratio = num / den
        if ratio > self.value + TIE_TOL:
            self.value = ratio
            self.witness = build()
            self.key = witness_key(self.witness)
        elif ratio >= self.value - TIE_TOL:
            w = build()
            k = witness_key(w)
            if k < self.key:
                self.witness, self.key = w, k
            self.value = max(self.value, ratio)


def _vec(pairs, dim_cap: int) -> CoeffVector:
    return CoeffVector.from_dict({int(n): float(v) for n, v in pairs}, dim_cap)


def _ind(A, signs, dim_cap) -> CoeffVector:
    return CoeffVector(tuple((n, float(s)) for n, s in zip(A, signs)), dim_cap)


def _jv(x: CoeffVector) -> list:
    return x.to_json()


def _size_ok(tag: str, lam: float, A: Sequence[int], b: int) -> bool:
    if tag in ("PSLC", "MaxConservative", "PsiPSLC"):
        mx = A[-1] if A else 0
        return (lam - 1) * mx + len(A) <= b + 1e-12
    return lam * len(A) <= b + 1e-12


def _xs(pool: Sequence[int], max_size: int, vals: Sequence[float], dim_cap: int,
        min_size: int = 0) -> Iterator[CoeffVector]:
    for s in range(min_size, max_size + 1):
        for X in combinations(pool, s):
            for coeffs in product(vals, repeat=s):
                yield CoeffVector(tuple(zip(X, coeffs)), dim_cap)


# -- per-family scans -------------------------------------------------------------

def _scan_sets(space, kind, budget, visit):
    tag, lam = kind.tag, kind.lam
    W = range(1, budget.window + 1)
    S = budget.max_support
    cap = space.dim_cap
    norms: dict[tuple, float] = {}

    def nrm(A):
        if A not in norms:
            norms[A] = eval_norm(space, CoeffVector.indicator(A, cap))
        return norms[A]

    for a in range(0, S + 1):
        for A in combinations(W, a):
            for b in range(0, S + 1):
                if not _size_ok(tag, lam, A, b):
                    continue
                if tag == "Democracy":
                    pool = W
                elif tag == "ReverseConservative":
                    pool = [n for n in W if n < (A[0] if A else math.inf)]
                else:
                    pool = [n for n in W if n > (A[-1] if A else 0)]
                for B in combinations(pool, b):
                    if len(set(A).union(B)) > S:
                        continue
                    visit(nrm(A), nrm(B), lambda A=A, B=B: {"A": list(A), "B": list(B)})


def _scan_slc(space, kind, budget, visit):
    tag, lam = kind.tag, kind.lam
    W = list(range(1, budget.window + 1))
    S = budget.max_support
    cap = space.dim_cap
    vals = budget.values(bounded=True)
    signs = budget.signs()
    for a in range(0, S + 1):
        for A in combinations(W, a):
            lo = A[-1] if A else 0
            hi = A[0] if A else math.inf
            inA = set(A)
            for b in range(0, S - a + 1):
                if not _size_ok(tag, lam, A, b):
                    continue
                if tag in ("PSLC", "LSLC"):
                    poolB = [n for n in W if n > lo]
                elif tag == "RSLC":
                    poolB = [n for n in W if n < hi]
                else:
                    poolB = [n for n in W if n not in inA]
                for B in combinations(poolB, b):
                    used = inA.union(B)
                    poolX = [n for n in W if n not in used and (tag != "PSLC" or n > lo)]
                    eps_all = list(product(signs, repeat=a))
                    delta_all = list(product(signs, repeat=b))
                    for x in _xs(poolX, S - a - b, vals, cap):
                        nums = [(e, eval_norm(space, x + _ind(A, e, cap))) for e in eps_all]
                        dens = [(d, eval_norm(space, x + _ind(B, d, cap))) for d in delta_all]
                        for e, nv in nums:
                            for d, dv in dens:
                                visit(nv, dv, lambda x=x, A=A, B=B, e=e, d=d: {
                                    "x": _jv(x), "A": list(A), "B": list(B),
                                    "eps": list(e), "delta": list(d)})


def _scan_omega(space, kind, budget, visit):
    lam = kind.lam
    W = list(range(1, budget.window + 1))
    S = budget.max_support
    cap = space.dim_cap
    vals = budget.values(bounded=True)
    signs = budget.signs()
    for b in range(0, S + 1):
        for B in combinations(W, b):
            inB = set(B)
            poolX = [n for n in W if n not in inB]
            eps_all = list(product(signs, repeat=b))
            for x in _xs(poolX, S - b, vals, cap):
                nx = eval_norm(space, x)
                for a in range(0, len(x) + 1):
                    if lam * a > b + 1e-12:
                        break
                    for A in combinations(x.support, a):
                        rest = x.drop(A)
                        for e in eps_all:
                            den = eval_norm(space, rest + _ind(B, e, cap))
                            visit(nx, den, lambda x=x, A=A, B=B, e=e: {
                                "x": _jv(x), "A": list(A), "B": list(B), "eps": list(e)})


def _scan_psi(space, kind, budget, visit):
    W = list(range(1, budget.window + 1))
    S = budget.max_support
    cap = space.dim_cap
    vals = budget.values(bounded=True)
    signs = budget.signs()
    for a in range(0, S + 1):
        for A in combinations(W, a):
            lo = A[-1] if A else 0
            right = [n for n in W if n > lo]
            for b in range(0, S - a + 1):
                if not _size_ok("PsiPSLC", kind.lam, A, b):
                    continue
                for B in combinations(right, b):
                    inB = set(B)
                    poolR = [n for n in right if n not in inB]
                    eps_all = list(product(signs, repeat=b))
                    for r in _xs(poolR, S - a - b, vals, cap):
                        for head in product((0.0,) + vals, repeat=a):
                            x = r + CoeffVector(tuple((n, v) for n, v in zip(A, head) if v != 0), cap)
                            nx = eval_norm(space, x)
                            for e in eps_all:
                                den = eval_norm(space, r + _ind(B, e, cap))
                                visit(nx, den, lambda x=x, A=A, B=B, e=e: {
                                    "x": _jv(x), "A": list(A), "B": list(B), "eps": list(e)})


def _scan_vectors(space, kind, budget, visit):
    tag = kind.tag
    W = list(range(1, budget.window + 1))
    cap = space.dim_cap
    vals = budget.values()
    for x in _xs(W, budget.max_support, vals, cap, min_size=1):
        nx = eval_norm(space, x)
        if tag == "SuppUncond":
            for a in range(0, len(x) + 1):
                for A in combinations(x.support, a):
                    visit(eval_norm(space, x.restrict(A)), nx,
                               lambda x=x, A=A: {"x": _jv(x), "A": list(A)})
        elif tag == "Uncond":
            choices = []
            for n, v in x.entries:
                opts = [0.0] + [c for c in vals if abs(c) <= abs(v)]
                choices.append([(n, c) for c in opts])
            for pick in product(*choices):
                a = CoeffVector(tuple(p for p in pick if p[1] != 0), cap)
                visit(eval_norm(space, a), nx, lambda x=x, a=a: {"b": _jv(x), "a": _jv(a)})
        else:  # QuasiGreedy
            for m in range(0, budget.max_m + 1):
                g, L = gamma_with_witness(space, x, m)
                visit(g, nx, lambda x=x, m=m, L=L: {"x": _jv(x), "m": m, "Lambda": list(L)})


def _scan_greedy(space, kind, budget, visit, flags):
    tag, lam = kind.tag, kind.lam
    W = list(range(1, budget.window + 1))
    cap = space.dim_cap
    vals = budget.values()
    dk = tag in ("DKPartial", "ReversePartial")
    for x in _xs(W, budget.max_support, vals, cap, min_size=1):
        if dk:
            orderings, over = greedy_orderings(x, budget.ordering_cap)
            flags["truncated"] |= over
        else:
            orderings = [None]
        for rho in orderings:
            for m in range(0, budget.max_m + 1):
                k = ceil_mul(lam, m)
                if dk:
                    head = rho.head(k)
                    num = eval_norm(space, x.drop(head))
                    L = tuple(sorted(head))
                    sk = SigmaKind(_DENOM_SIGMA[tag], rho)
                else:
                    num, L = gamma_with_witness(space, x, k)
                    sk = SigmaKind(_DENOM_SIGMA[tag])
                den, A = sigma_with_witness(space, sk, x, m)
                extra = {"ordering": list(rho.order)} if dk else {}
                visit(num, den, lambda x=x, m=m, L=L, A=A, extra=extra: {
                    "x": _jv(x), "m": m, "Lambda": list(L), "A": list(A), **extra})


def scan_instances(space: SpaceSpec, kind: ConstantKind, budget: SearchBudget,
                   visit: Callable[[float, float, Callable[[], dict]], None]) -> dict:
    """Call ``visit(numerator, denominator, build_witness)`` on every instance of ``kind``.

    Returns scan flags (currently whether greedy orderings were truncated).
    """
    budget.check_space(space)
    flags = {"truncated": False}
    tag = kind.tag
    if tag in SET_KINDS:
        _scan_sets(space, kind, budget, visit)
    elif tag in SLC_KINDS:
        _scan_slc(space, kind, budget, visit)
    elif tag == "OmegaSLC":
        _scan_omega(space, kind, budget, visit)
    elif tag == "PsiPSLC":
        _scan_psi(space, kind, budget, visit)
    elif tag in LAMBDA_FREE:
        _scan_vectors(space, kind, budget, visit)
    else:
        _scan_greedy(space, kind, budget, visit, flags)
    return flags


def estimate_constant(space: SpaceSpec, kind: ConstantKind, budget: SearchBudget) -> ConstantEstimate:
    """Maximum defining ratio of ``kind`` over every instance in ``budget``.

    Instances with a 0/0 ratio are skipped; a positive numerator over a zero
    denominator yields ``inf``. With no admissible instance the value is 0 and
    ``empty`` is set.
    """
    best = _Best(budget)
    flags = scan_instances(space, kind, budget, best.offer)
    if best.key is None:
        return ConstantEstimate(kind, 0.0, {}, budget, empty=True, instances=best.count,
                                orderings_truncated=flags["truncated"])
    return ConstantEstimate(kind, best.value, best.witness, budget, instances=best.count,
                            orderings_truncated=flags["truncated"])


# -- re-evaluation ----------------------------------------------------------------

def _signs(w: Mapping, name: str, n: int) -> tuple[int, ...]:
    s = tuple(int(v) for v in w.get(name, (1,) * n))
    if len(s) != n or any(v not in (1, -1) for v in s):
        raise ValueError(f"witness field {name!r} must hold {n} signs in {{+1, -1}}")
    return s


def _sets(w: Mapping, *names) -> list[tuple[int, ...]]:
    return [tuple(sorted(int(n) for n in w.get(f, ()))) for f in names]


def _ratio_parts(space: SpaceSpec, kind: ConstantKind, w: Mapping) -> tuple[float, float]:
    """Numerator and denominator of the defining ratio, recomputed from scratch."""
    cap = space.dim_cap
    tag, lam = kind.tag, kind.lam
    if tag in SET_KINDS:
        A, B = _sets(w, "A", "B")
        return (eval_norm(space, CoeffVector.indicator(A, cap)),
                eval_norm(space, CoeffVector.indicator(B, cap)))
    if tag in SLC_KINDS:
        x = _vec(w.get("x", []), cap)
        A, B = _sets(w, "A", "B")
        return (eval_norm(space, x + _ind(A, _signs(w, "eps", len(A)), cap)),
                eval_norm(space, x + _ind(B, _signs(w, "delta", len(B)), cap)))
    if tag in ("OmegaSLC", "PsiPSLC"):
        x = _vec(w.get("x", []), cap)
        A, B = _sets(w, "A", "B")
        return (eval_norm(space, x),
                eval_norm(space, x.drop(A) + _ind(B, _signs(w, "eps", len(B)), cap)))
    if tag == "SuppUncond":
        x = _vec(w["x"], cap)
        (A,) = _sets(w, "A")
        return eval_norm(space, x.restrict(A)), eval_norm(space, x)
    if tag == "Uncond":
        return eval_norm(space, _vec(w["a"], cap)), eval_norm(space, _vec(w["b"], cap))
    x = _vec(w["x"], cap)
    m = int(w["m"])
    if tag == "QuasiGreedy":
        g, _ = gamma_with_witness(space, x, m)
        return g, eval_norm(space, x)
    k = ceil_mul(lam, m)
    if tag in ("DKPartial", "ReversePartial"):
        rho = GreedyOrdering(tuple(int(n) for n in w["ordering"]))
        num = eval_norm(space, x.drop(rho.head(k)))
        den, _ = sigma_with_witness(space, SigmaKind(_DENOM_SIGMA[tag], rho), x, m)
        return num, den
    num, _ = gamma_with_witness(space, x, k)
    den, _ = sigma_with_witness(space, SigmaKind(_DENOM_SIGMA[tag]), x, m)
    return num, den


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return math.inf if num > 0 else math.nan
    return num / den


def evaluate_witness(space: SpaceSpec, kind: ConstantKind, witness: Mapping) -> float:
    """Ratio achieved by ``witness`` for ``kind`` (``nan`` for a 0/0 instance)."""
    return _ratio(*_ratio_parts(space, kind, witness))


# -- witness transport ----------------------------------------------------------

class UnsupportedTransport(ValueError):
    pass


TRANSPORT_PAIRS = (
    ("SLC", "AlmostGreedy"), ("SLC", "Greedy"),
    ("AlmostGreedy", "SLC"), ("Greedy", "SLC"),
    ("PSLC", "PartiallyGreedy"), ("PartiallyGreedy", "PSLC"),
    ("MaxConservative", "PSLC"),
    ("Conservative", "DKPartial"), ("ReverseConservative", "ReversePartial"),
    ("SLC", "OmegaSLC"), ("OmegaSLC", "SLC"),
    ("PSLC", "PsiPSLC"), ("PsiPSLC", "PSLC"),
)


def _best_signs(space: SpaceSpec, base: CoeffVector, A: Sequence[int]) -> tuple[int, ...]:
    """Signs on ``A`` maximizing ``||base + 1_{dA}||`` (first maximizer)."""
    if len(A) > 12:
        raise EnumerationOverflow(f"sign search over {len(A)} indices exceeds 2^12")
    best, arg = -1.0, (1,) * len(A)
    for d in product((1, -1), repeat=len(A)):
        v = eval_norm(space, base + _ind(A, d, space.dim_cap))
        if v > best + TIE_TOL:
            best, arg = v, d
    return arg


def _clipped_instance(space, x: CoeffVector, L, drop, gain, lose):
    """``x'' = (x - P_L x - P_drop x)/alpha`` with ``gain`` added (best signs) and ``lose`` (sgn signs).

    ``alpha`` is the smallest modulus of ``x`` on ``L``.
    """
    cap = space.dim_cap
    alpha = min(abs(x.coeff(n)) for n in L)
    xs = x.drop(set(L) | set(drop)).scale(1 / alpha)
    gain, lose = sorted(gain), sorted(lose)
    d = _best_signs(space, xs, gain)
    e = tuple(sgn(x.coeff(n)) for n in lose)
    return xs, gain, d, lose, e


def _trivial_slc(x: CoeffVector) -> dict:
    xs = x.scale(1 / x.sup_norm) if x else x
    return {"x": _jv(xs), "A": [], "B": [], "eps": [], "delta": []}


def _transport(space, src: str, dst: str, lam: float, w: Mapping) -> dict:
    cap = space.dim_cap
    if (src, dst) in (("SLC", "AlmostGreedy"), ("SLC", "Greedy"), ("PSLC", "PartiallyGreedy")):
        x = _vec(w.get("x", []), cap)
        A, B = _sets(w, "A", "B")
        y = x + _ind(A, _signs(w, "eps", len(A)), cap) + _ind(B, _signs(w, "delta", len(B)), cap)
        if src == "SLC":
            m = len(A)
            pool = B
        else:
            m = A[-1] if A else 0
            D = [n for n in range(1, m + 1) if n not in A]
            y = y + CoeffVector.indicator(D, cap)
            pool = tuple(sorted(set(B) | set(D)))
        k = ceil_mul(lam, m)
        return {"x": _jv(y), "m": m, "Lambda": list(pool[:k])}
    if (src, dst) in (("AlmostGreedy", "SLC"), ("Greedy", "SLC")):
        x = _vec(w["x"], cap)
        m = int(w["m"])
        k = ceil_mul(lam, m)
        if m == 0 or k >= len(x):
            return _trivial_slc(x)
        L = tuple(w["Lambda"]) if w.get("Lambda") else gamma_with_witness(space, x, k)[1]
        _, Bm = sigma_with_witness(space, SigmaKind(_DENOM_SIGMA[src]), x, m)
        xs, gain, d, lose, e = _clipped_instance(space, x, L, Bm, set(Bm) - set(L), set(L) - set(Bm))
        return {"x": _jv(xs), "A": gain, "B": lose, "eps": list(d), "delta": list(e)}
    if (src, dst) == ("PartiallyGreedy", "PSLC"):
        x = _vec(w["x"], cap)
        m = int(w["m"])
        k = ceil_mul(lam, m)
        if m == 0 or k >= len(x):
            return _trivial_slc(x)
        L = tuple(w["Lambda"]) if w.get("Lambda") else gamma_with_witness(space, x, k)[1]
        _, cut = sigma_with_witness(space, SigmaKind("Partial"), x, m)
        n = len(cut)
        Bp = [i for i in range(1, n + 1) if i not in L]
        F = [i for i in L if i > n]
        xs, gain, d, lose, e = _clipped_instance(space, x, L, Bp, Bp, F)
        return {"x": _jv(xs), "A": gain, "B": lose, "eps": list(d), "delta": list(e)}
    if (src, dst) == ("MaxConservative", "PSLC"):
        A, B = _sets(w, "A", "B")
        return {"x": [], "A": list(A), "B": list(B), "eps": [1] * len(A), "delta": [1] * len(B)}
    if (src, dst) in (("Conservative", "DKPartial"), ("ReverseConservative", "ReversePartial")):
        A, B = _sets(w, "A", "B")
        m = len(A)
        E = B[: ceil_mul(lam, m)]
        rest = sorted((set(A) | set(B)) - set(E))
        return {"x": _jv(CoeffVector.indicator(sorted(set(A) | set(B)), cap)), "m": m,
                "ordering": list(E) + rest}
    if (src, dst) in (("SLC", "OmegaSLC"), ("PSLC", "PsiPSLC")):
        x = _vec(w.get("x", []), cap)
        A, B = _sets(w, "A", "B")
        y = x + _ind(A, _signs(w, "eps", len(A)), cap)
        return {"x": _jv(y), "A": list(A), "B": list(B), "eps": list(_signs(w, "delta", len(B)))}
    if (src, dst) in (("OmegaSLC", "SLC"), ("PsiPSLC", "PSLC")):
        x = _vec(w.get("x", []), cap)
        A, B = _sets(w, "A", "B")
        base = x.drop(A)
        d = _best_signs(space, base, A)
        return {"x": _jv(base), "A": list(A), "B": list(B), "eps": list(d),
                "delta": list(_signs(w, "eps", len(B)))}
    raise UnsupportedTransport(f"no transport from {src} to {dst}")


def witness_transport(space: SpaceSpec, from_kind: ConstantKind, to_kind: ConstantKind,
                      witness: Mapping) -> tuple[dict, float]:
    """Map a ``from_kind`` instance to a ``to_kind`` instance; returns ``(witness, ratio)``.

    When the norm is 1-suppression quasi-greedy the returned ratio is at least
    the source ratio.
    """
    if from_kind == to_kind:
        return dict(witness), evaluate_witness(space, to_kind, witness)
    if (from_kind.tag, to_kind.tag) not in TRANSPORT_PAIRS:
        raise UnsupportedTransport(f"no transport from {from_kind} to {to_kind}; supported pairs: "
                                   + ", ".join(f"{a}->{b}" for a, b in TRANSPORT_PAIRS))
    if from_kind.lam != to_kind.lam:
        raise UnsupportedTransport("transport keeps lambda fixed")
    out = _transport(space, from_kind.tag, to_kind.tag, from_kind.lam, witness)
    return out, evaluate_witness(space, to_kind, out)
