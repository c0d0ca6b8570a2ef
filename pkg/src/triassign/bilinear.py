"""Alternating exact minimization over the two permutation factors.

The planar objective sum_i C[i, y(i), z(i)] is linear in either factor
once the other is fixed, so each half-step is an exact 2D assignment and
the sweep values can only decrease.  Both iterates stay at permutations
(vertices), never fractional points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .instance import CostTensor
from .matching import BipartiteCosts, solve_assignment


@dataclass
class FactorPair:
    y: np.ndarray   # i -> j
    z: np.ndarray   # i -> k
    value: float


@dataclass
class BilinearResult:
    factors: FactorPair
    trace: list = field(default_factory=list)  # objective after each sweep, Z_0 first
    converged: bool = False
    sweeps: int = 0


def objective(t: CostTensor, y, z) -> float:
    n = t.n
    rows = np.arange(n)
    return float(t.cube()[rows, np.asarray(y), np.asarray(z)].sum())


def _check_perm(p, n, name):
    p = np.asarray(p, dtype=np.int64)
    if p.shape != (n,) or set(int(v) for v in p) != set(range(n)):
        raise ValueError(f"{name} must be a permutation of range({n})")
    return p


def bilinear_step_y(t: CostTensor, z, maximize: bool = False) -> np.ndarray:
    """Exact best second-coordinate permutation with the third factor fixed."""
    n = t.n
    z = _check_perm(z, n, "z")
    reduced = t.cube()[np.arange(n)[:, None], np.arange(n)[None, :], z[:, None]]
    if maximize:
        reduced = reduced.max() - reduced
    return solve_assignment(BipartiteCosts(reduced)).assignment


def bilinear_step_z(t: CostTensor, y, maximize: bool = False) -> np.ndarray:
    """Exact best third-coordinate permutation with the second factor fixed."""
    n = t.n
    y = _check_perm(y, n, "y")
    reduced = t.cube()[np.arange(n), y, :]
    if maximize:
        reduced = reduced.max() - reduced
    return solve_assignment(BipartiteCosts(reduced)).assignment


def bilinear_heuristic(t: CostTensor, y0=None, z0=None, max_iters: int = 100,
                       maximize: bool = False) -> BilinearResult:
    """Alternate the two half-steps until the sweep value repeats exactly.

    Exact float equality is the right stopping rule: both iterates select
    from the same finite set of permutation values, so a plateau means a
    fixpoint.  A run that exhausts max_iters comes back non-converged.
    """
    if t.d != 3:
        raise ValueError(f"bilinear heuristic requires d=3, got d={t.d}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    n = t.n
    y = _check_perm(y0 if y0 is not None else np.arange(n), n, "y0")
    z = _check_perm(z0 if z0 is not None else np.arange(n), n, "z0")
    value = objective(t, y, z)
    trace = [value]
    converged = False
    sweeps = 0
    for _ in range(max_iters):
        y = bilinear_step_y(t, z, maximize=maximize)
        z = bilinear_step_z(t, y, maximize=maximize)
        new_value = objective(t, y, z)
        trace.append(new_value)
        sweeps += 1
        if new_value == value:
            converged = True
            break
        value = new_value
    return BilinearResult(factors=FactorPair(y=y, z=z, value=trace[-1]),
                          trace=trace, converged=converged, sweeps=sweeps)


def random_restarts(t: CostTensor, restarts: int, seed: int,
                    max_iters: int = 100) -> BilinearResult:
    """Best of identity start plus seeded random permutation starts."""
    best = bilinear_heuristic(t, max_iters=max_iters)
    rng = np.random.Generator(np.random.Philox(key=np.array(
        [seed & (2**64 - 1), 0x5eed], dtype=np.uint64)))
    for _ in range(restarts):
        y0 = rng.permutation(t.n)
        z0 = rng.permutation(t.n)
        res = bilinear_heuristic(t, y0=y0, z0=z0, max_iters=max_iters)
        if res.factors.value < best.factors.value:
            best = res
    return best
