"""Exact minimum-cost perfect matching on dense bipartite costs.

This is the workhorse for the plane-by-plane axial greedy, the bilinear
heuristic's inner steps, lower bounds and the exact oracles.  Forbidden
edges are represented structurally (a mask/set, not huge finite costs), so
infeasibility is detected as the absence of a perfect matching rather than
by a cost threshold.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import linear_sum_assignment

BRUTE_FORCE_MAX_N = 9


class InfeasibleError(Exception):
    """No perfect matching exists once forbidden edges are removed."""


class BipartiteCosts:
    """Dense n x n costs with an optional set/mask of forbidden (j, k) edges."""

    def __init__(self, cost, forbidden=None):
        self.cost = np.asarray(cost, dtype=np.float64)
        if self.cost.ndim != 2 or self.cost.shape[0] != self.cost.shape[1]:
            raise ValueError(f"cost must be square, got shape {self.cost.shape}")
        self.n = self.cost.shape[0]
        if forbidden is None:
            self.forbidden = np.zeros_like(self.cost, dtype=bool)
        elif isinstance(forbidden, np.ndarray):
            if forbidden.shape != self.cost.shape:
                raise ValueError("forbidden mask shape mismatch")
            self.forbidden = forbidden.astype(bool)
        else:
            self.forbidden = np.zeros_like(self.cost, dtype=bool)
            for (j, k) in forbidden:
                self.forbidden[j, k] = True
        allowed = ~self.forbidden
        vals = self.cost[allowed]
        if vals.size and not np.isfinite(vals).all():
            raise ValueError("non-forbidden costs must be finite")
        if vals.size and (vals < 0).any():
            raise ValueError("costs must be nonnegative")

    def forbidden_pairs(self):
        return {(int(j), int(k)) for j, k in np.argwhere(self.forbidden)}


@dataclass
class Matching:
    """A perfect matching j -> assignment[j], with its summed cost."""

    assignment: np.ndarray
    cost: float

    def pairs(self):
        return [(j, int(k)) for j, k in enumerate(self.assignment)]


def solve_assignment(bc: BipartiteCosts) -> Matching:
    """Minimum-cost perfect matching avoiding forbidden edges.

    Backed by scipy's Jonker-Volgenant style solver; forbidden edges enter
    as +inf and a structurally infeasible instance raises InfeasibleError.
    The returned cost is re-validated by direct summation.
    """
    a = bc.cost
    if bc.forbidden.any():
        a = bc.cost.copy()
        a[bc.forbidden] = np.inf
    try:
        rows, cols = linear_sum_assignment(a)
    except ValueError as e:
        if "infeasible" in str(e):
            raise InfeasibleError(f"no perfect matching on n={bc.n} instance") from e
        raise
    assignment = np.empty(bc.n, dtype=np.int64)
    assignment[rows] = cols
    cost = float(bc.cost[np.arange(bc.n), assignment].sum())
    return Matching(assignment=assignment, cost=cost)


@lru_cache(maxsize=16)
def _all_permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64)


def brute_force_assignment(bc: BipartiteCosts) -> Matching:
    """Exhaustive minimum over all n! permutations (test oracle, n <= 9)."""
    if bc.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {bc.n}")
    perms = _all_permutations(bc.n)
    rows = np.arange(bc.n)
    if bc.forbidden.any():
        ok = ~bc.forbidden[rows[None, :], perms].any(axis=1)
        perms = perms[ok]
        if perms.shape[0] == 0:
            raise InfeasibleError(f"no perfect matching on n={bc.n} instance")
    costs = bc.cost[rows[None, :], perms].sum(axis=1)
    best = int(np.argmin(costs))
    return Matching(assignment=perms[best].copy(), cost=float(costs[best]))


def has_perfect_matching(allowed: np.ndarray) -> bool:
    """Max-cardinality feasibility check (augmenting paths) on a bool mask."""
    n = allowed.shape[0]
    match_k = [-1] * n

    def try_row(j, seen):
        for k in range(n):
            if allowed[j, k] and not seen[k]:
                seen[k] = True
                if match_k[k] == -1 or try_row(match_k[k], seen):
                    match_k[k] = j
                    return True
        return False

    matched = 0
    for j in range(n):
        if try_row(j, [False] * n):
            matched += 1
    return matched == n


def expected_parisi(n: int) -> float:
    """Sum_{i=1}^n 1/i^2: the exact expected optimal 2D assignment cost."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return float(sum(1.0 / (i * i) for i in range(1, n + 1)))
