import itertools
import math

import numpy as np
import pytest

from triassign import instance
from triassign.planar import (bdapta, brute_force_planar, exact_planar,
                              lower_bound_rowmin, lower_bound_rowmin_streaming,
                              main_phase, make_schedule, greedy_phase)


def test_exact_planar_n2_by_hand():
    t = instance.generate(2, 3, 15)
    c = t.cube()
    best = min(c[0, p[0], q[0]] + c[1, p[1], q[1]]
               for p in itertools.permutations(range(2))
               for q in itertools.permutations(range(2)))
    sol = exact_planar(t)
    assert math.isclose(sol.cost, best, rel_tol=1e-12)
    assert len(sol.triples) == 2


def test_exact_planar_matches_double_brute_force():
    for seed in range(50):
        t = instance.generate(5, 3, 400 + seed)
        assert math.isclose(exact_planar(t).cost, brute_force_planar(t),
                            rel_tol=1e-9)


def test_exact_planar_guard():
    with pytest.raises(ValueError, match="n <= 8"):
        exact_planar(instance.generate(9, 3, 1))


def test_rowmin_single_cell():
    t = instance.generate(1, 3, 5)
    assert lower_bound_rowmin(t) == t.pristine[0]


def test_rowmin_dominated_by_any_solution():
    for seed in range(20):
        t = instance.generate(5, 3, seed)
        assert lower_bound_rowmin(t) <= exact_planar(t).cost + 1e-12


def test_rowmin_streaming_matches_tensor():
    for (n, d) in ((6, 3), (5, 4), (4, 5)):
        for seed in (1, 2):
            t = instance.generate(n, d, seed)
            a = lower_bound_rowmin(t)
            b = lower_bound_rowmin_streaming(n, d, seed)
            assert a == b


def test_rowmin_mean_d3():
    # n slice minima, each the min of n^2 Exp(1) draws, so mean = 1/n
    n, reps = 50, 1000
    vals = np.array([lower_bound_rowmin_streaming(n, 3, 7000 + s)
                     for s in range(reps)])
    se = vals.std(ddof=1) / math.sqrt(reps)
    assert abs(vals.mean() - 1.0 / n) <= 3 * se


def test_bdapta_small_instances_valid_and_dominant():
    for seed in range(30):
        t = instance.generate(6, 3, 500 + seed)
        rep = bdapta(t, 1)
        assert rep.complete
        assert len(rep.triples) == 6
        exact = exact_planar(instance.generate(6, 3, 500 + seed))
        assert rep.true_cost >= exact.cost - 1e-9
        assert rep.true_cost >= lower_bound_rowmin(t) - 1e-9


def test_bdapta_single_cell():
    t = instance.generate(1, 3, 2)
    rep = bdapta(t, 1)
    assert rep.complete
    assert rep.triples == [(0, 0, 0)]
    assert rep.true_cost == t.pristine[0]


def test_bdapta_rejects_bad_args():
    with pytest.raises(ValueError):
        bdapta(instance.generate(3, 4, 1), 1)
    with pytest.raises(ValueError):
        bdapta(instance.generate(8, 3, 1), 0)
    with pytest.raises(ValueError):
        bdapta(instance.generate(8, 3, 1), 1, mode="bogus")


def test_refresh_accounting_small():
    for seed in range(5):
        t = instance.generate(30, 3, 800 + seed)
        rep = bdapta(t, 1, mode="refresh")
        assert rep.complete
        cert = rep.selection_cost_sum + len(rep.triples) * rep.ledger_W
        assert rep.true_cost <= cert + 1e-9
        if rep.escalations_main == 0:
            assert rep.main_bound <= rep.successg_rhs_scheduled() + 1e-9
        assert rep.main_bound <= rep.successg_rhs_actual() + 1e-9
        # phase selection sums cover the surviving triples' selections
        assert rep.bound_cost >= rep.true_cost - 1e-9


def test_main_phase_requires_greedy_state():
    t = instance.generate(20, 3, 1)
    sched = make_schedule(20, 1)
    from triassign.planar import PartialAssignment
    with pytest.raises(ValueError, match="greedy"):
        main_phase(PartialAssignment(20), t, sched, "empirical")


def test_starved_budget_degrades_not_raises():
    t = instance.generate(20, 3, 9)
    rep = bdapta(t, 1, max_escalations=0, budget=1)
    assert not rep.complete
    assert rep.main_aborted or rep.final_aborted
    assert len(rep.triples) < 20


def test_empirical_mode_never_touches_values():
    t = instance.generate(20, 3, 13)
    pristine = t.pristine.copy()
    bdapta(t, 1, mode="empirical")
    assert np.array_equal(t.values, pristine)
    assert t.ledger.epoch == 0


def test_refresh_mode_ledger_epochs():
    t = instance.generate(20, 3, 13)
    rep = bdapta(t, 1, mode="refresh")
    sched = rep.schedule
    # one refresh per executed round plus one per final-phase addition
    assert t.ledger.epoch == rep.rounds_executed + len(rep.final_add_log)
    assert t.ledger.W == pytest.approx(
        sum(sched.w[:rep.rounds_executed]) + len(rep.final_add_log) * sched.wf)
