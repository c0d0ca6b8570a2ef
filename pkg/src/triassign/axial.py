"""Axial 3D assignment: one selected cell per line, i.e. a Latin square.

The greedy solver sweeps the planes i = 1..n in order, solving an exact
2D assignment on each plane over the edges not used by earlier planes.
The residual bipartite graph at step i is (n-i+1)-regular, so a perfect
matching always exists and the n matchings tile K_{n,n}: the selected
third coordinates form a Latin square.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .instance import CostTensor
from .matching import BipartiteCosts, solve_assignment

EXACT_MAX_N = 4

# number of Latin squares of order 1..4, used to sanity-check enumeration
LATIN_COUNTS = {1: 1, 2: 2, 3: 12, 4: 576}


@dataclass
class AxialSolution:
    """latin[i][j] = chosen third coordinate for line (i, j)."""

    latin: np.ndarray
    plane_costs: list
    total_cost: float

    def triples(self):
        n = self.latin.shape[0]
        return [(i, j, int(self.latin[i, j])) for i in range(n) for j in range(n)]

    def validate(self):
        n = self.latin.shape[0]
        full = set(range(n))
        for i in range(n):
            if set(int(v) for v in self.latin[i, :]) != full:
                raise AssertionError(f"row {i} of the table is not a permutation")
        for j in range(n):
            if set(int(v) for v in self.latin[:, j]) != full:
                raise AssertionError(f"column {j} of the table is not a permutation")


def greedy_axial(t: CostTensor) -> AxialSolution:
    """Successive plane matchings, each forbidden the edges of all earlier ones."""
    if t.d != 3:
        raise ValueError(f"axial solver requires d=3, got d={t.d}")
    n = t.n
    cube = t.cube()
    used = np.zeros((n, n), dtype=bool)
    latin = np.empty((n, n), dtype=np.int64)
    plane_costs = []
    for i in range(n):
        m = solve_assignment(BipartiteCosts(cube[i], forbidden=used))
        latin[i] = m.assignment
        plane_costs.append(m.cost)
        used[np.arange(n), m.assignment] = True
    sol = AxialSolution(latin=latin, plane_costs=plane_costs,
                        total_cost=float(sum(plane_costs)))
    sol.validate()
    return sol


def axial_lower_bound(t: CostTensor) -> float:
    """Sum of unconstrained per-plane optima: a valid lower bound."""
    if t.d != 3:
        raise ValueError(f"axial bound requires d=3, got d={t.d}")
    cube = t.cube()
    return float(sum(solve_assignment(BipartiteCosts(cube[i])).cost
                     for i in range(t.n)))


def dfm_bound(n: int) -> float:
    """2n * H_n: expectation upper bound for the greedy's total cost.

    Per plane i the residual graph has 2n degree constraints and the uniform
    fractional matching with weight 1/(n-i+1) is feasible, so the expected
    plane optimum is at most 2n/(n-i+1); summing over planes gives 2n*H_n.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return float(sum(2.0 * n / (n - i + 1) for i in range(1, n + 1)))


def enumerate_latin_squares(n: int):
    """Yield all Latin squares of order n as (n, n) int arrays (n <= 4)."""
    if n > EXACT_MAX_N:
        raise ValueError(f"Latin-square enumeration limited to n <= {EXACT_MAX_N}, got {n}")
    cols_used = [set() for _ in range(n)]
    rows = []

    def backtrack(i):
        if i == n:
            yield np.array(rows, dtype=np.int64)
            return
        for perm in itertools.permutations(range(n)):
            if any(perm[j] in cols_used[j] for j in range(n)):
                continue
            rows.append(perm)
            for j in range(n):
                cols_used[j].add(perm[j])
            yield from backtrack(i + 1)
            rows.pop()
            for j in range(n):
                cols_used[j].discard(perm[j])

    yield from backtrack(0)


@lru_cache(maxsize=8)
def _latin_square_array(n: int) -> np.ndarray:
    squares = np.array(list(enumerate_latin_squares(n)), dtype=np.int64)
    assert squares.shape[0] == LATIN_COUNTS[n]
    return squares


def exact_axial(t: CostTensor) -> AxialSolution:
    """Exhaustive minimum over all Latin squares of order n (oracle, n <= 4)."""
    if t.d != 3:
        raise ValueError(f"axial oracle requires d=3, got d={t.d}")
    if t.n > EXACT_MAX_N:
        raise ValueError(f"exact axial limited to n <= {EXACT_MAX_N}, got n={t.n}")
    n = t.n
    cube = t.cube()
    squares = _latin_square_array(n)
    ii = np.arange(n)[:, None]
    jj = np.arange(n)[None, :]
    costs = cube[ii, jj, squares].sum(axis=(1, 2))
    best = int(np.argmin(costs))
    latin = squares[best].copy()
    plane_costs = [float(cube[i, np.arange(n), latin[i]].sum()) for i in range(n)]
    sol = AxialSolution(latin=latin, plane_costs=plane_costs,
                        total_cost=float(costs[best]))
    sol.validate()
    return sol


def zeta2() -> float:
    return math.pi * math.pi / 6.0
