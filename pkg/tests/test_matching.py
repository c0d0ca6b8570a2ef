import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triassign import instance
from triassign.matching import (BipartiteCosts, InfeasibleError,
                                brute_force_assignment, expected_parisi,
                                has_perfect_matching, solve_assignment)


def _random_costs(n, seed):
    return instance.generate(n, 2, seed).cube()


def test_zero_diagonal():
    cost = np.where(np.eye(3, dtype=bool), 0.0, 1.0)
    m = solve_assignment(BipartiteCosts(cost))
    assert list(m.assignment) == [0, 1, 2]
    assert m.cost == 0.0


def test_two_by_two():
    # enumerate both permutations: 1+1=2 beats 2+3=5
    m = solve_assignment(BipartiteCosts([[1.0, 2.0], [3.0, 1.0]]))
    assert list(m.assignment) == [0, 1]
    assert m.cost == 2.0


def test_matches_brute_force():
    for n in range(2, 8):
        for seed in range(60):
            bc = BipartiteCosts(_random_costs(n, 1000 * n + seed))
            a = solve_assignment(bc)
            b = brute_force_assignment(bc)
            assert math.isclose(a.cost, b.cost, rel_tol=1e-9, abs_tol=1e-12)


def test_matches_brute_force_with_forbidden():
    rng = np.random.default_rng(0)
    for seed in range(120):
        n = int(rng.integers(2, 6))
        bc_cost = _random_costs(n, 7777 + seed)
        mask = rng.random((n, n)) < 0.35
        bc = BipartiteCosts(bc_cost, forbidden=mask)
        feasible = has_perfect_matching(~bc.forbidden)
        if feasible:
            a = solve_assignment(bc)
            b = brute_force_assignment(bc)
            assert math.isclose(a.cost, b.cost, rel_tol=1e-9, abs_tol=1e-12)
            assert not bc.forbidden[np.arange(n), a.assignment].any()
        else:
            with pytest.raises(InfeasibleError):
                solve_assignment(bc)
            with pytest.raises(InfeasibleError):
                brute_force_assignment(bc)


def test_all_forbidden_infeasible():
    bc = BipartiteCosts(np.ones((2, 2)), forbidden={(0, 0), (0, 1), (1, 0), (1, 1)})
    with pytest.raises(InfeasibleError):
        solve_assignment(bc)


def test_forbidden_as_pairs():
    bc = BipartiteCosts([[1.0, 2.0], [3.0, 1.0]], forbidden={(0, 0)})
    m = solve_assignment(bc)
    assert list(m.assignment) == [1, 0]
    assert m.cost == 5.0
    assert bc.forbidden_pairs() == {(0, 0)}


def test_scale_invariance():
    cost = _random_costs(6, 5)
    base = solve_assignment(BipartiteCosts(cost))
    for lam in (0.5, 2.0, 4.0):  # powers of two scale floats exactly
        scaled = solve_assignment(BipartiteCosts(cost * lam))
        assert np.array_equal(base.assignment, scaled.assignment)
        assert scaled.cost == base.cost * lam
    odd = solve_assignment(BipartiteCosts(cost * 3.0))
    assert np.array_equal(base.assignment, odd.assignment)
    assert math.isclose(odd.cost, base.cost * 3.0, rel_tol=1e-12)


def test_brute_force_basics():
    m = brute_force_assignment(BipartiteCosts([[4.0]]))
    assert m.cost == 4.0
    m = brute_force_assignment(BipartiteCosts(np.full((3, 3), 2.5)))
    assert math.isclose(m.cost, 7.5)
    with pytest.raises(ValueError, match="n <= 9"):
        brute_force_assignment(BipartiteCosts(np.ones((10, 10))))


def test_cost_recomputable():
    bc = BipartiteCosts(_random_costs(7, 42))
    m = solve_assignment(bc)
    direct = sum(bc.cost[j, m.assignment[j]] for j in range(7))
    assert math.isclose(m.cost, direct, rel_tol=1e-12)


def test_expected_parisi():
    assert expected_parisi(1) == 1.0
    assert expected_parisi(2) == 1.25
    # monotone convergence to pi^2/6
    prev = 0.0
    for n in (1, 2, 5, 10, 100, 1000):
        val = expected_parisi(n)
        assert val > prev
        prev = val
    assert abs(expected_parisi(10000) - math.pi**2 / 6) < 1.01e-4
    with pytest.raises(ValueError):
        expected_parisi(0)


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        BipartiteCosts(np.ones((2, 3)))
    with pytest.raises(ValueError):
        BipartiteCosts([[1.0, -2.0], [3.0, 1.0]])
    with pytest.raises(ValueError):
        BipartiteCosts([[1.0, math.inf], [3.0, 1.0]])
    # inf allowed when the cell is forbidden anyway
    bc = BipartiteCosts([[1.0, math.inf], [math.inf, 1.0]],
                        forbidden={(0, 1), (1, 0)})
    assert solve_assignment(bc).cost == 2.0


@settings(max_examples=60, deadline=None)
@given(vals=st.lists(st.floats(0.0, 100.0, allow_nan=False, allow_infinity=False),
                     min_size=16, max_size=16))
def test_optimality_property(vals):
    cost = np.array(vals).reshape(4, 4)
    bc = BipartiteCosts(cost)
    got = solve_assignment(bc).cost
    best = min(sum(cost[j, p[j]] for j in range(4))
               for p in itertools.permutations(range(4)))
    assert math.isclose(got, best, rel_tol=1e-9, abs_tol=1e-9)
