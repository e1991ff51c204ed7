"""Vectorized evaluation over many coefficient vectors sharing one support.

A batch is a support ``(n_1 < ... < n_s)`` plus a matrix ``M`` of shape
``(rows, s)`` holding the moduli of each vector on that support. Because all
supported norms are lattice norms, moduli are all that matter.

Column subsets are given as tuples of positions into the support.
"""
from __future__ import annotations

import math
from itertools import combinations, product
from typing import Iterator, Sequence

import numpy as np

from .sequence_space import SpaceSpec, is_power_of_two

__all__ = [
    "support_batches",
    "batch_norm",
    "batch_gamma",
    "batch_sigma_proj",
    "batch_sigma_partial",
    "ceil_mul",
]


def support_batches(window: int, max_support: int, magnitudes: Sequence[float], min_support: int = 1
                    ) -> Iterator[tuple[tuple[int, ...], np.ndarray]]:
    """Every support inside ``[1, window]`` of size up to ``max_support``, with all modulus patterns."""
    mags = sorted(set(abs(float(v)) for v in magnitudes if v != 0))
    for s in range(min_support, max_support + 1):
        grid = np.array(list(product(mags, repeat=s)), dtype=float).reshape(-1, s)
        for supp in combinations(range(1, window + 1), s):
            yield supp, grid


class _Section:
    """Per-support constants for one space."""

    def __init__(self, space: SpaceSpec, support: Sequence[int]):
        self.space = space
        self.idx = np.asarray(support, dtype=np.int64) if support else np.zeros(0, dtype=np.int64)
        self.w = np.array([space.weight(n) for n in support], dtype=float)
        self.dyadic = np.array([is_power_of_two(n) for n in support], dtype=bool)


def _topk_sorted(V: np.ndarray, k: int) -> np.ndarray:
    """Largest ``k`` entries of every row, in decreasing order."""
    return -np.sort(-V, axis=1)[:, :k]


def _norm_cols(sec: _Section, M: np.ndarray, cols: Sequence[int]) -> np.ndarray:
    rows = M.shape[0]
    cols = list(cols)
    if not cols:
        return np.zeros(rows)
    kind = sec.space.kind
    sub = M[:, cols]
    idx = sec.idx[cols]
    if kind == "WeightedL1":
        return sub @ sec.w[cols]
    if kind == "PlainLp":
        p = sec.space.p
        return sub.sum(axis=1) if p == 1 else (sub ** p).sum(axis=1) ** (1 / p)
    if kind == "SchreierSqrtWeighted":
        V = sub * sec.w[cols]
        best = np.zeros(rows)
        for j in range(1, len(cols) + 1):
            mask = idx >= j * j
            if not mask.any():
                break
            best = np.maximum(best, _topk_sorted(V[:, mask], j).sum(axis=1))
        return best
    # SchreierDichotomous
    dy = sec.dyadic[cols]
    s = len(cols)
    root = 1 / np.sqrt(np.arange(1, s + 1))
    harm = 1 / np.arange(1, s + 1)
    best = np.zeros(rows)
    for k in range(1, s + 1):
        pool = idx >= k
        if pool.sum() < k:
            break
        dpool = pool & dy
        if dpool.sum() >= k:
            best = np.maximum(best, _topk_sorted(sub[:, dpool], k) @ root[:k])
        for q in np.flatnonzero(pool & ~dy):
            others = pool.copy()
            others[q] = False
            parts = [sub[:, [q]]]
            if k > 1:
                parts.append(_topk_sorted(sub[:, others], k - 1))
            both = np.concatenate(parts, axis=1)
            best = np.maximum(best, _topk_sorted(both, k) @ harm[:k])
    return best


def batch_norm(space: SpaceSpec, support: Sequence[int], M: np.ndarray, cols: Sequence[int] | None = None
               ) -> np.ndarray:
    sec = _Section(space, support)
    return _norm_cols(sec, M, range(len(support)) if cols is None else cols)


def batch_gamma(space: SpaceSpec, support: Sequence[int], M: np.ndarray, k: int) -> np.ndarray:
    """Worst greedy remainder of size ``k`` for every row."""
    s = len(support)
    rows = M.shape[0]
    if k >= s:
        return np.zeros(rows)
    sec = _Section(space, support)
    out = np.full(rows, -np.inf)
    allcols = set(range(s))
    for L in combinations(range(s), k):
        rest = sorted(allcols.difference(L))
        if L:
            greedy = M[:, list(L)].min(axis=1) >= M[:, rest].max(axis=1)
        else:
            greedy = np.ones(rows, dtype=bool)
        if not greedy.any():
            continue
        val = _norm_cols(sec, M, rest)
        out = np.where(greedy, np.maximum(out, val), out)
    return out


def batch_sigma_proj(space: SpaceSpec, support: Sequence[int], M: np.ndarray, m: int) -> np.ndarray:
    """Smallest projection error with at most ``m`` removed coordinates (also the best m-term error)."""
    s = len(support)
    sec = _Section(space, support)
    k = min(m, s)
    out = np.full(M.shape[0], np.inf)
    allcols = set(range(s))
    for A in combinations(range(s), k):
        out = np.minimum(out, _norm_cols(sec, M, sorted(allcols.difference(A))))
    return out


def batch_sigma_partial(space: SpaceSpec, support: Sequence[int], M: np.ndarray, m: int) -> np.ndarray:
    """Smallest partial-sum error ``min_{n <= m} ||x - S_n x||``."""
    sec = _Section(space, support)
    out = np.full(M.shape[0], np.inf)
    for n in range(0, m + 1):
        cols = [i for i, idx in enumerate(support) if idx > n]
        out = np.minimum(out, _norm_cols(sec, M, cols))
        if not cols:
            break
    return out


def ceil_mul(lam: float, m: int) -> int:
    """``ceil(lam * m)`` robust to binary rounding of ``lam``."""
    return math.ceil(round(lam * m, 9))
