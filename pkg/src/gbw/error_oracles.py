"""Exact evaluation of the greedy error and the best-approximation benchmarks.

Every functional is an exact max/min over a finite family of index sets. The
infimum over free coefficients is taken at the projection, which is exact for
1-suppression-unconditional spaces; other spaces are refused.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .greedy_core import FAMILY_CAP, GreedyOrdering, greedy_sets
from .sequence_space import CoeffVector, EnumerationOverflow, SpaceSpec, enum_cap, eval_norm

__all__ = [
    "SigmaKind",
    "SIGMA_TAGS",
    "UnsupportedSpace",
    "gamma",
    "gamma_with_witness",
    "sigma",
    "sigma_with_witness",
    "greedy_remainder",
]

SIGMA_TAGS = ("Best", "Proj", "Partial", "LeftDK", "RightDK")


class UnsupportedSpace(ValueError):
    """The requested computation is not exact on this space."""


@dataclass(frozen=True)
class SigmaKind:
    tag: str
    ordering: GreedyOrdering | None = None

    def __post_init__(self):
        if self.tag not in SIGMA_TAGS:
            raise ValueError(f"unknown sigma kind {self.tag!r}; expected one of {SIGMA_TAGS}")
        needs = self.tag in ("LeftDK", "RightDK")
        if needs != (self.ordering is not None):
            raise ValueError(f"{self.tag}: an ordering is required iff the kind is LeftDK/RightDK")


BEST = SigmaKind("Best")
PROJ = SigmaKind("Proj")
PARTIAL = SigmaKind("Partial")


def _pad_with_zeros(x: CoeffVector, m: int) -> tuple[int, ...]:
    """``supp(x)`` plus the lowest zero indices, ``m`` indices in all."""
    out = list(x.support)
    used = set(out)
    n = 1
    while len(out) < m and n <= x.dim_cap:
        if n not in used:
            out.append(n)
        n += 1
    return tuple(sorted(out))


def gamma_with_witness(space: SpaceSpec, x: CoeffVector, m: int, cap: int = FAMILY_CAP):
    """``(gamma_m(x), Lambda)`` with ``Lambda`` a worst greedy set.

    Among several worst sets the first in lexicographic order is returned.
    """
    if m >= len(x):
        return 0.0, _pad_with_zeros(x, m)
    fam = greedy_sets(x, m)
    best, arg = -1.0, ()
    for L in fam.members(cap):
        val = eval_norm(space, x.drop(L))
        if val > best:
            best, arg = val, L
    return best, arg


def gamma(space: SpaceSpec, x: CoeffVector, m: int, cap: int = FAMILY_CAP) -> float:
    return gamma_with_witness(space, x, m, cap)[0]


def greedy_remainder(space: SpaceSpec, x: CoeffVector, head) -> float:
    """``||x - P_head(x)||`` for a given index set."""
    return eval_norm(space, x.drop(head))


def _check_ordering(x: CoeffVector, ordering: GreedyOrdering):
    if not ordering.is_valid_for(x):
        raise ValueError(f"ordering {ordering.order} is not a greedy ordering of x")


def _remove_best(space: SpaceSpec, x: CoeffVector, pool: tuple[int, ...], m: int):
    """Min of ``||x - P_A x||`` over ``A`` inside ``pool`` with ``|A| <= m``.

    Removing coordinates never increases a lattice norm, so only
    ``|A| = min(m, |pool|)`` is scanned.
    """
    k = min(m, len(pool))
    if k == 0:
        return eval_norm(space, x), ()
    if k == len(pool):
        return eval_norm(space, x.drop(pool)), pool
    if space.kind in ("WeightedL1", "PlainLp"):
        # remove the k largest (weighted) moduli; lowest index first on ties
        scored = sorted(pool, key=lambda n: (-space.weight(n) * abs(x.coeff(n)), n))
        A = tuple(sorted(scored[:k]))
        return eval_norm(space, x.drop(A)), A
    if len(x) > enum_cap():
        raise EnumerationOverflow(f"enumeration overflow: support of size {len(x)} exceeds cap {enum_cap()}")
    best, arg = math.inf, ()
    for A in combinations(pool, k):
        val = eval_norm(space, x.drop(A))
        if val < best:
            best, arg = val, A
    return best, arg


def sigma_with_witness(space: SpaceSpec, kind: SigmaKind, x: CoeffVector, m: int):
    """``(value, A)`` where ``A`` attains the minimum.

    For ``Partial`` the set is ``{1, ..., n}`` for the best cut ``n``.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    tag = kind.tag
    if tag == "Best" and not space.suppression_unconditional_one:
        raise UnsupportedSpace("coefficient optimization unsupported: space is not 1-suppression-unconditional")
    supp = x.support
    if tag in ("Best", "Proj"):
        return _remove_best(space, x, supp, m)
    if tag == "Partial":
        best, cut = math.inf, 0
        last = supp[-1] if supp else 0
        for n in range(0, min(m, x.dim_cap) + 1):
            val = eval_norm(space, x.drop([k for k in supp if k <= n]))
            if val < best:
                best, cut = val, n
            if n >= last:
                break
        return best, tuple(range(1, cut + 1))
    _check_ordering(x, kind.ordering)
    if tag == "LeftDK":
        r = kind.ordering.rho(1, x)
        return _remove_best(space, x, tuple(n for n in supp if n < r), m)
    # RightDK
    if m == 0:
        return eval_norm(space, x), ()
    r = kind.ordering.rho(m, x)
    return _remove_best(space, x, tuple(n for n in supp if n > r), m)


def sigma(space: SpaceSpec, kind: SigmaKind, x: CoeffVector, m: int) -> float:
    return sigma_with_witness(space, kind, x, m)[0]
