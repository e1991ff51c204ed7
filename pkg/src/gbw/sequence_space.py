"""Finite sections of sequence spaces and exact norm evaluation.

A vector is a finitely supported real sequence indexed from 1. A space is one
of four norm constructions on the section ``[1, dim_cap]``:

``WeightedL1``
    ``sum_n w(n) |x_n|``.
``SchreierDichotomous``
    sup over ``F`` with ``min F >= |F|`` of ``sum_i w^F_i |x|_(i)`` where
    ``|x|_(i)`` is the i-th largest modulus on ``F`` and ``w^F_i`` is
    ``1/sqrt(i)`` when every element of ``F`` is a power of two and ``1/i``
    otherwise.
``SchreierSqrtWeighted``
    sup over ``F`` with ``sqrt(min F) >= |F|`` of ``sum_{n in F} w(n) |x_n|``.
``PlainLp``
    ``(sum_n |x_n|^p)^(1/p)``.

All four are lattice norms: the value depends only on ``|x_n|`` and is
monotone in each modulus.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence

__all__ = [
    "CoeffVector",
    "SignVector",
    "WeightSeq",
    "SpaceSpec",
    "EnumerationOverflow",
    "KINDS",
    "SCHREIER_KINDS",
    "sgn",
    "is_power_of_two",
    "enum_cap",
    "eval_norm",
    "eval_norm_enumerated",
    "admissible_sets",
    "is_admissible",
    "space_from_json",
    "space_to_json",
    "named_space",
    "SPACE_REGISTRY",
]

KINDS = ("WeightedL1", "SchreierDichotomous", "SchreierSqrtWeighted", "PlainLp")
SCHREIER_KINDS = ("SchreierDichotomous", "SchreierSqrtWeighted")

NORM_TOL = 1e-9


class EnumerationOverflow(RuntimeError):
    """An exact enumeration would exceed its configured cap."""


def enum_cap() -> int:
    """Global support cap for explicit subset enumeration (``GBW_MAX_ENUM``)."""
    raw = os.environ.get("GBW_MAX_ENUM")
    return int(raw) if raw else 20


def sgn(z: float) -> int:
    # sgn(0) = 1 by convention
    return -1 if z < 0 else 1


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class CoeffVector:
    """Finitely supported coefficient sequence on ``[1, dim_cap]``.

    ``entries`` is a sorted tuple of ``(index, coefficient)`` pairs with every
    coefficient nonzero. Use the constructors rather than building it directly.
    """

    entries: tuple[tuple[int, float], ...]
    dim_cap: int

    def __post_init__(self):
        if self.dim_cap < 1:
            raise ValueError(f"dim_cap must be positive, got {self.dim_cap}")
        prev = 0
        for n, v in self.entries:
            if not isinstance(n, int) or n <= prev:
                raise ValueError("entries must be sorted by strictly increasing integer index")
            if v == 0 or not math.isfinite(v):
                raise ValueError(f"coefficient at {n} must be finite and nonzero, got {v}")
            prev = n
        if self.entries and self.entries[-1][0] > self.dim_cap:
            raise ValueError(f"index {self.entries[-1][0]} exceeds dim_cap {self.dim_cap}")

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, float], dim_cap: int) -> "CoeffVector":
        items = sorted((int(n), float(v)) for n, v in coeffs.items() if v != 0)
        for n, _ in items:
            if n < 1:
                raise ValueError(f"indices start at 1, got {n}")
        return cls(tuple(items), dim_cap)

    @classmethod
    def from_list(cls, values: Sequence[float], dim_cap: int | None = None) -> "CoeffVector":
        """``values[0]`` is the coefficient of ``e_1``."""
        cap = len(values) if dim_cap is None else dim_cap
        return cls.from_dict({i + 1: v for i, v in enumerate(values)}, max(cap, 1))

    @classmethod
    def zero(cls, dim_cap: int) -> "CoeffVector":
        return cls((), dim_cap)

    @classmethod
    def indicator(cls, A: Iterable[int], dim_cap: int, signs=None) -> "CoeffVector":
        """``1_A``, or ``1_{eps A}`` when ``signs`` is given.

        ``signs`` is either a mapping index -> +-1 or a sequence aligned with
        ``sorted(A)``.
        """
        idx = sorted(set(A))
        if signs is None:
            return cls.from_dict({n: 1.0 for n in idx}, dim_cap)
        sv = signs if isinstance(signs, SignVector) else SignVector.coerce(idx, signs)
        return cls.from_dict({n: float(sv[n]) for n in idx}, dim_cap)

    @cached_property
    def _map(self) -> dict[int, float]:
        return dict(self.entries)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def coeff(self, n: int) -> float:
        return self._map.get(n, 0.0)

    __getitem__ = coeff

    @property
    def sup_norm(self) -> float:
        return max((abs(v) for _, v in self.entries), default=0.0)

    def as_dict(self) -> dict[int, float]:
        return dict(self.entries)

    def _check_cap(self, other: "CoeffVector"):
        if other.dim_cap != self.dim_cap:
            raise ValueError(f"dim_cap mismatch: {self.dim_cap} vs {other.dim_cap}")

    def __add__(self, other: "CoeffVector") -> "CoeffVector":
        self._check_cap(other)
        out = dict(self.entries)
        for n, v in other.entries:
            out[n] = out.get(n, 0.0) + v
        return CoeffVector.from_dict(out, self.dim_cap)

    def __sub__(self, other: "CoeffVector") -> "CoeffVector":
        return self + (-other)

    def __neg__(self) -> "CoeffVector":
        return CoeffVector(tuple((n, -v) for n, v in self.entries), self.dim_cap)

    def scale(self, c: float) -> "CoeffVector":
        if c == 0:
            return CoeffVector.zero(self.dim_cap)
        # products can underflow to zero
        return CoeffVector(tuple((n, c * v) for n, v in self.entries if c * v != 0), self.dim_cap)

    def __rmul__(self, c: float) -> "CoeffVector":
        return self.scale(c)

    def restrict(self, A: Iterable[int]) -> "CoeffVector":
        keep = set(A)
        return CoeffVector(tuple(e for e in self.entries if e[0] in keep), self.dim_cap)

    def drop(self, A: Iterable[int]) -> "CoeffVector":
        gone = set(A)
        return CoeffVector(tuple(e for e in self.entries if e[0] not in gone), self.dim_cap)

    def to_json(self) -> list[list]:
        return [[n, v] for n, v in self.entries]

    @classmethod
    def from_json(cls, data, dim_cap: int) -> "CoeffVector":
        """Accepts ``[[n, v], ...]``, ``{"n": v}`` or a dense list starting at e_1."""
        if isinstance(data, Mapping):
            return cls.from_dict({int(k): float(v) for k, v in data.items()}, dim_cap)
        data = list(data)
        if data and isinstance(data[0], (list, tuple)):
            return cls.from_dict({int(n): float(v) for n, v in data}, dim_cap)
        return cls.from_list([float(v) for v in data], dim_cap)


@dataclass(frozen=True)
class SignVector:
    """Signs ``+-1`` on a finite index set."""

    signs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for _, s in self.signs:
            if s not in (1, -1):
                raise ValueError(f"signs must be +1 or -1, got {s}")

    @classmethod
    def coerce(cls, idx: Sequence[int], signs) -> "SignVector":
        if isinstance(signs, Mapping):
            return cls(tuple(sorted((int(n), int(signs[n])) for n in idx)))
        signs = list(signs)
        if len(signs) != len(idx):
            raise ValueError(f"{len(signs)} signs for {len(idx)} indices")
        return cls(tuple(zip(idx, (int(s) for s in signs))))

    @classmethod
    def of(cls, x: CoeffVector, idx: Iterable[int]) -> "SignVector":
        """``(sgn(x_n))`` restricted to ``idx``."""
        return cls(tuple((n, sgn(x.coeff(n))) for n in sorted(idx)))

    def __getitem__(self, n: int) -> int:
        for k, s in self.signs:
            if k == n:
                return s
        raise KeyError(f"sign vector does not cover index {n}")

    def values(self) -> tuple[int, ...]:
        return tuple(s for _, s in self.signs)


@dataclass(frozen=True)
class WeightSeq:
    """Weight sequence given as a finite prefix followed by a tail rule.

    ``tail_kind`` is ``"constant"`` (``tail`` has one value) or ``"periodic"``
    (``tail`` repeats). ``w(1)`` is ``prefix[0]`` when the prefix is nonempty.
    """

    prefix: tuple[float, ...] = ()
    tail_kind: str = "constant"
    tail: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        if self.tail_kind not in ("constant", "periodic"):
            raise ValueError(f"unknown tail rule {self.tail_kind!r}")
        if not self.tail or (self.tail_kind == "constant" and len(self.tail) != 1):
            raise ValueError("constant tail takes exactly one value; periodic tail needs a pattern")

    @classmethod
    def constant(cls, c: float) -> "WeightSeq":
        return cls((), "constant", (float(c),))

    @classmethod
    def periodic(cls, pattern: Sequence[float], prefix: Sequence[float] = ()) -> "WeightSeq":
        return cls(tuple(map(float, prefix)), "periodic", tuple(map(float, pattern)))

    @classmethod
    def eventually(cls, prefix: Sequence[float], c: float = 1.0) -> "WeightSeq":
        return cls(tuple(map(float, prefix)), "constant", (float(c),))

    def __call__(self, n: int) -> float:
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        j = n - len(self.prefix) - 1
        return self.tail[j % len(self.tail)]

    def values_upto(self, dim_cap: int) -> set[float]:
        """Every value taken on ``[1, dim_cap]``."""
        vals = set(self.prefix[:dim_cap])
        if dim_cap > len(self.prefix):
            span = dim_cap - len(self.prefix)
            vals.update(self.tail[: min(span, len(self.tail))])
        return vals

    def to_json(self) -> dict:
        tail = {"constant": self.tail[0]} if self.tail_kind == "constant" else {"periodic": list(self.tail)}
        return {"prefix": list(self.prefix), "tail": tail}

    @classmethod
    def from_json(cls, data: Mapping) -> "WeightSeq":
        prefix = tuple(float(v) for v in data.get("prefix", ()))
        tail = data.get("tail", {"constant": 1.0})
        if "constant" in tail:
            return cls(prefix, "constant", (float(tail["constant"]),))
        if "periodic" in tail:
            return cls(prefix, "periodic", tuple(float(v) for v in tail["periodic"]))
        raise ValueError(f"weights.tail must have a 'constant' or 'periodic' key, got {sorted(tail)}")


@dataclass(frozen=True)
class SpaceSpec:
    """A named norm construction restricted to ``[1, dim_cap]``."""

    kind: str
    dim_cap: int
    weights: WeightSeq | None = None
    p: float = 1.0
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}; expected one of {KINDS}")
        if not isinstance(self.dim_cap, int) or self.dim_cap < 1:
            raise ValueError(f"dim_cap must be a positive integer, got {self.dim_cap!r}")
        if self.kind == "PlainLp" and not (self.p >= 1 and math.isfinite(self.p)):
            raise ValueError(f"PlainLp needs finite p >= 1, got {self.p}")
        if self.kind in ("WeightedL1", "SchreierSqrtWeighted"):
            if self.weights is None:
                raise ValueError(f"{self.kind} requires weights")
            vals = self.weights.values_upto(self.dim_cap)
            bad = [v for v in vals if not (v > 0 and math.isfinite(v))]
            if bad:
                raise ValueError(
                    "semi-normalization violated: weights must satisfy 0 < inf w <= sup w < inf "
                    f"on [1, dim_cap], found {bad[0]!r}"
                )
        if self.kind == "SchreierSqrtWeighted":
            w = self.weights
            if any(v > 1 for v in w.values_upto(self.dim_cap)):
                raise ValueError("SchreierSqrtWeighted weights must satisfy 0 < w(n) <= 1")
            if any(v < 1 for v in w.tail):
                raise ValueError("SchreierSqrtWeighted weights must equal 1 outside a finite set")

    def weight(self, n: int) -> float:
        return self.weights(n) if self.weights is not None else 1.0

    @cached_property
    def n_below_one(self) -> int:
        """``|{n : w(n) < 1}|`` on the section (the ``N_w`` of the sqrt-Schreier space)."""
        if self.weights is None:
            return 0
        return sum(1 for v in self.weights.prefix[: self.dim_cap] if v < 1)

    @property
    def is_schreier(self) -> bool:
        return self.kind in SCHREIER_KINDS

    @property
    def suppression_unconditional_one(self) -> bool:
        # every supported construction is a lattice norm, hence K_s = K_u = 1
        return self.kind in KINDS

    @property
    def label(self) -> str:
        return self.name or self.kind

    def with_dim_cap(self, dim_cap: int) -> "SpaceSpec":
        return SpaceSpec(self.kind, dim_cap, self.weights, self.p, self.name)


def space_to_json(space: SpaceSpec) -> dict:
    return {
        "kind": space.kind,
        "weights": space.weights.to_json() if space.weights is not None else None,
        "dim_cap": space.dim_cap,
        "p": space.p,
    }


def space_from_json(data: Mapping) -> SpaceSpec:
    if not isinstance(data, Mapping):
        raise ValueError("space must be a JSON object")
    missing = [k for k in ("kind", "dim_cap") if k not in data]
    if missing:
        raise ValueError(f"space is missing field(s) {missing}")
    weights = data.get("weights")
    return SpaceSpec(
        kind=data["kind"],
        dim_cap=int(data["dim_cap"]),
        weights=WeightSeq.from_json(weights) if weights else None,
        p=float(data.get("p", 1.0) if data.get("p") is not None else 1.0),
        name=str(data.get("name", "")),
    )


# -- admissible families ------------------------------------------------------

def is_admissible(kind: str, F: Sequence[int]) -> bool:
    if not F:
        return False
    lo = min(F)
    if kind == "SchreierDichotomous":
        return lo >= len(F)
    if kind == "SchreierSqrtWeighted":
        return lo >= len(F) ** 2
    raise ValueError(f"not a Schreier space: {kind}")


def admissible_sets(space: SpaceSpec, support: Iterable[int], cap: int | None = None) -> list[tuple[int, ...]]:
    """All nonempty admissible ``F`` inside ``support``, ordered by size then lexicographically."""
    if not space.is_schreier:
        raise ValueError(f"not a Schreier space: {space.kind}")
    supp = sorted(set(support))
    cap = enum_cap() if cap is None else cap
    if len(supp) > cap:
        raise EnumerationOverflow(f"enumeration overflow: support of size {len(supp)} exceeds cap {cap}")
    return [F for r in range(1, len(supp) + 1) for F in combinations(supp, r) if is_admissible(space.kind, F)]


def _family_weights(F: Sequence[int], k: int) -> list[float]:
    if all(is_power_of_two(n) for n in F):
        return [1 / math.sqrt(i) for i in range(1, k + 1)]
    return [1 / i for i in range(1, k + 1)]


def eval_norm_enumerated(space: SpaceSpec, x: CoeffVector, cap: int | None = None) -> float:
    """Norm by explicit enumeration of admissible sets (Schreier kinds only).

    Refuses supports above the enumeration cap. Within each ``F`` the
    bijection is resolved by pairing decreasing moduli with decreasing weights.
    """
    best = 0.0
    for F in admissible_sets(space, x.support, cap):
        if space.kind == "SchreierDichotomous":
            mods = sorted((abs(x.coeff(n)) for n in F), reverse=True)
            val = sum(a * b for a, b in zip(mods, _family_weights(F, len(F))))
        else:
            val = sum(space.weight(n) * abs(x.coeff(n)) for n in F)
        best = max(best, val)
    return best


# -- fast exact evaluation ----------------------------------------------------

def _norm_weighted_l1(space: SpaceSpec, x: CoeffVector) -> float:
    w = space.weights
    return math.fsum(w(n) * abs(v) for n, v in x.entries)


def _norm_lp(space: SpaceSpec, x: CoeffVector) -> float:
    p = space.p
    if p == 1:
        return math.fsum(abs(v) for _, v in x.entries)
    return math.fsum(abs(v) ** p for _, v in x.entries) ** (1 / p)


def _norm_sqrt_schreier(space: SpaceSpec, x: CoeffVector) -> float:
    # size-j sets may use any j indices n >= j^2; the best take the j largest
    w = space.weights
    vals = [(n, w(n) * abs(v)) for n, v in x.entries]
    best = 0.0
    for j in range(1, len(vals) + 1):
        pool = sorted((v for n, v in vals if n >= j * j), reverse=True)
        if not pool:
            break
        best = max(best, math.fsum(pool[:j]))
    return best


def _sorted_pairing(mods: Sequence[float], weights: Sequence[float]) -> float:
    return math.fsum(a * b for a, b in zip(sorted(mods, reverse=True), weights))


def _norm_dichotomous(space: SpaceSpec, x: CoeffVector) -> float:
    # For each size k: all-powers-of-two sets pair with 1/sqrt(i); sets with a
    # non-power pair with 1/i and must contain at least one non-power index.
    ents = [(n, abs(v), is_power_of_two(n)) for n, v in x.entries]
    s = len(ents)
    root = [1 / math.sqrt(i) for i in range(1, s + 1)]
    harm = [1 / i for i in range(1, s + 1)]
    best = 0.0
    for k in range(1, s + 1):
        pool = [(a, d) for n, a, d in ents if n >= k]
        if len(pool) < k:
            break
        pool.sort(key=lambda t: -t[0])
        dyadic = [a for a, d in pool if d]
        if len(dyadic) >= k:
            best = max(best, _sorted_pairing(dyadic[:k], root))
        if any(not d for _, d in pool[:k]):
            best = max(best, _sorted_pairing([a for a, _ in pool[:k]], harm))
        else:
            other = next((a for a, d in pool if not d), None)
            if other is not None:
                best = max(best, _sorted_pairing([a for a, _ in pool[: k - 1]] + [other], harm))
    return best


_NORMS = {
    "WeightedL1": _norm_weighted_l1,
    "PlainLp": _norm_lp,
    "SchreierSqrtWeighted": _norm_sqrt_schreier,
    "SchreierDichotomous": _norm_dichotomous,
}


def eval_norm(space: SpaceSpec, x: CoeffVector) -> float:
    """Exact norm of ``x`` in ``space``.

    The Schreier suprema are resolved per admissible-set size by picking the
    largest available moduli, which is exact because both norms are monotone
    in every modulus; no subsets are enumerated.
    """
    if x.entries and x.entries[-1][0] > space.dim_cap:
        raise ValueError(f"vector support exceeds the section [1, {space.dim_cap}]")
    if not x.entries:
        return 0.0
    return _NORMS[space.kind](space, x)


# -- named constructions ------------------------------------------------------

SPACE_REGISTRY = {
    "l1": (
        "Unweighted l1: ||x|| = sum_n |x_n|.",
        lambda dim_cap: SpaceSpec("WeightedL1", dim_cap, WeightSeq.constant(1.0), name="l1"),
    ),
    "renormed_l1": (
        "Renormed l1 with bounded weights: ||x|| = sum_n w(n) |x_n|, "
        "0 < inf w < sup w < inf. Default weights repeat (1, 2). "
        "With lam = sup w / inf w the greedy error satisfies "
        "gamma_{ceil(lam m)}(x) <= sigma_m(x).",
        lambda dim_cap: SpaceSpec("WeightedL1", dim_cap, WeightSeq.periodic([1.0, 2.0]), name="renormed_l1"),
    ),
    "schreier_m7": (
        "Modified Schreier space: F = {F : |F| >= 1, min F >= |F|}, D = {2^n : n >= 0}, "
        "w^F_n = 1/sqrt(n) if F is inside D and 1/n otherwise; "
        "||x|| = sup { sum_{n in F} w^F_{s(n)} |x_n| : F in F, s : F -> [1, |F|] a bijection }.",
        lambda dim_cap: SpaceSpec("SchreierDichotomous", dim_cap, name="schreier_m7"),
    ),
    "schreier_em3": (
        "Weighted sqrt-Schreier space: F = {F : sqrt(min F) >= |F|}, "
        "||x||_w = sup_{F in F} sum_{n in F} w(n) |x_n| with 0 < w(n) <= 1, "
        "w(n) < 1 for at most N indices, and w(i) > w(j) for some i < j. "
        "Default weights (1, 1/2, 1, 1, ...), so N = 1.",
        lambda dim_cap: SpaceSpec(
            "SchreierSqrtWeighted", dim_cap, WeightSeq.eventually([1.0, 0.5], 1.0), name="schreier_em3"
        ),
    ),
}


def named_space(name: str, dim_cap: int = 64) -> SpaceSpec:
    try:
        return SPACE_REGISTRY[name][1](dim_cap)
    except KeyError:
        raise KeyError(f"unknown space {name!r}; known: {sorted(SPACE_REGISTRY)}") from None
