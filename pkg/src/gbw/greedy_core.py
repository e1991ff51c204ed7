"""Greedy sets, projections, partial sums, truncation and greedy orderings."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Iterable, Iterator

from .sequence_space import CoeffVector, EnumerationOverflow, sgn

__all__ = [
    "GreedyFamily",
    "GreedyOrdering",
    "FAMILY_CAP",
    "greedy_sets",
    "is_greedy_set",
    "project",
    "partial_sum",
    "truncate",
    "greedy_orderings",
]

FAMILY_CAP = 10_000
# padding a short support with zero indices is only materialized up to this size
_MAX_PAD_POOL = 1_000_000


@dataclass(frozen=True)
class GreedyFamily:
    """All greedy sets of ``x`` of size ``m``.

    A member is ``mandatory`` plus any ``slots``-subset of ``tie_class``.
    ``threshold`` is the modulus shared by the tie class.
    """

    mandatory: tuple[int, ...]
    tie_class: tuple[int, ...]
    slots: int
    m: int
    threshold: float

    @property
    def count(self) -> int:
        return math.comb(len(self.tie_class), self.slots)

    def members(self, cap: int = FAMILY_CAP) -> Iterator[tuple[int, ...]]:
        if self.count > cap:
            raise EnumerationOverflow(f"greedy family has {self.count} members, cap is {cap}")
        base = set(self.mandatory)
        for pick in combinations(self.tie_class, self.slots):
            yield tuple(sorted(base.union(pick)))

    def canonical(self) -> tuple[int, ...]:
        """The member taking the lowest tie indices."""
        return tuple(sorted(set(self.mandatory).union(self.tie_class[: self.slots])))


def greedy_sets(x: CoeffVector, m: int) -> GreedyFamily:
    if m < 0 or m > x.dim_cap:
        raise ValueError(f"m must lie in [0, dim_cap={x.dim_cap}], got {m}")
    supp = x.support
    if m == 0:
        return GreedyFamily((), (), 0, 0, math.inf)
    if m > len(supp):
        # every nonzero index plus any zero-coefficient indices (threshold 0)
        if x.dim_cap - len(supp) > _MAX_PAD_POOL:
            raise EnumerationOverflow(f"padding pool of {x.dim_cap - len(supp)} zero indices is too large")
        used = set(supp)
        zeros = tuple(n for n in range(1, x.dim_cap + 1) if n not in used)
        return GreedyFamily(supp, zeros, m - len(supp), m, 0.0)
    mods = sorted((abs(v) for _, v in x.entries), reverse=True)
    t = mods[m - 1]
    mandatory = tuple(n for n, v in x.entries if abs(v) > t)
    ties = tuple(n for n, v in x.entries if abs(v) == t)
    return GreedyFamily(mandatory, ties, m - len(mandatory), m, t)


def is_greedy_set(x: CoeffVector, L: Iterable[int]) -> bool:
    """``min_{L} |x_n| >= max_{not L} |x_n|`` (definition check, used by tests)."""
    L = set(L)
    inside = min((abs(x.coeff(n)) for n in L), default=math.inf)
    outside = max((abs(v) for n, v in x.entries if n not in L), default=0.0)
    return inside >= outside


def project(x: CoeffVector, A: Iterable[int]) -> CoeffVector:
    return x.restrict(A)


def partial_sum(x: CoeffVector, k: int) -> CoeffVector:
    if k < 0 or k > x.dim_cap:
        raise ValueError(f"k must lie in [0, dim_cap={x.dim_cap}], got {k}")
    return CoeffVector(tuple(e for e in x.entries if e[0] <= k), x.dim_cap)


def truncate(x: CoeffVector, alpha: float) -> CoeffVector:
    """Clip every modulus above ``alpha`` to ``alpha``, keeping the sign."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return CoeffVector(
        tuple((n, sgn(v) * alpha if abs(v) > alpha else v) for n, v in x.entries), x.dim_cap
    )


@dataclass(frozen=True)
class GreedyOrdering:
    """An injective listing of ``supp(x)`` by non-increasing modulus."""

    order: tuple[int, ...]

    def head(self, k: int) -> tuple[int, ...]:
        return self.order[:k]

    def rho(self, j: int, x: CoeffVector) -> int:
        """``rho(j)`` (1-based). Past the support, zero indices follow in ascending order."""
        if j < 1:
            raise ValueError("rho is 1-based")
        if j <= len(self.order):
            return self.order[j - 1]
        used = set(self.order)
        k = j - len(self.order)
        for n in range(1, x.dim_cap + 1):
            if n not in used:
                k -= 1
                if k == 0:
                    return n
        # beyond the section: nothing in [1, dim_cap] lies after it
        return x.dim_cap + k

    def is_valid_for(self, x: CoeffVector) -> bool:
        if len(set(self.order)) != len(self.order) or not set(x.support) <= set(self.order):
            return False
        mods = [abs(x.coeff(n)) for n in self.order]
        return all(a >= b for a, b in zip(mods, mods[1:]))

    @classmethod
    def canonical(cls, x: CoeffVector) -> "GreedyOrdering":
        return cls(tuple(n for n, _ in sorted(x.entries, key=lambda e: (-abs(e[1]), e[0]))))


def _tie_classes(x: CoeffVector) -> list[tuple[int, ...]]:
    classes: dict[float, list[int]] = {}
    for n, v in x.entries:
        classes.setdefault(abs(v), []).append(n)
    return [tuple(classes[a]) for a in sorted(classes, reverse=True)]


def greedy_orderings(x: CoeffVector, cap: int) -> tuple[list[GreedyOrdering], bool]:
    """Orderings differing by permutations inside tie classes.

    Returns ``(orderings, overflow)``; the canonical ordering comes first and
    at most ``cap`` orderings are produced.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    classes = _tie_classes(x)
    total = math.prod(math.factorial(len(c)) for c in classes)
    out = []
    for parts in product(*(permutations(c) for c in classes)):
        if len(out) == cap:
            break
        out.append(GreedyOrdering(tuple(n for part in parts for n in part)))
    return out, total > cap
