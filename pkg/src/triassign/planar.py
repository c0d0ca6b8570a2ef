"""Planar 3D assignment: one selected cell per plane (a permutation pair).

The heuristic (``bdapta``) builds a partial assignment in three phases:

* Greedy Phase: for the first n1 first-coordinates, grab the cheapest cell
  among still-unused second/third coordinates.
* Main Phase: rounds shrink the unmatched set geometrically.  Each missing
  first coordinate is inserted via an alternating-path tree of depth 2k:
  the new triple displaces two assigned triples, their first coordinates
  are reassigned (displacing four more), and so on until the displaced
  coordinates are repaired using fresh unused second/third coordinates.
  Every added triple must cost at most the round threshold.
* Final Phase: when fewer than 2^k first coordinates remain, bottom-up
  trees no longer fit; remaining indices are inserted by a top-down
  displacement search of depth <= k that recycles freed coordinates.

In "refresh" mode the tensor is re-randomized at every round start (the
memoryless trick), and all cost accounting flows through the instance
ledger.  In "empirical" mode the tensor is left alone and thresholds are
the cumulative budgets the refresh schedule would have allowed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import instance
from .instance import CostTensor
from .matching import BipartiteCosts, solve_assignment, _all_permutations

EXACT_MAX_N = 8
DOUBLE_ORACLE_MAX_N = 5

# never enumerate fewer than this many candidates per tree level
CANDIDATE_FLOOR = 64

DEFAULT_SEARCH_BUDGET = 50_000

DEFAULT_MAX_ESCALATIONS = 10

# constant in the final-phase threshold w_f = K_F * n^(theta-1) * (ln n)^theta
K_F = 2.0


class StaleTreeError(Exception):
    """An augmenting tree no longer matches the assignment it was built for."""


# ---------------------------------------------------------------------------
# assignment state


class PartialAssignment:
    """Set of triples with per-axis injectivity and unmatched-coordinate sets."""

    def __init__(self, n: int):
        self.n = n
        self.triples = set()
        self.fwd1 = {}   # i -> (j, k)
        self.inv2 = {}   # j -> i
        self.inv3 = {}   # k -> i
        self.unmatched1 = set(range(n))
        self.unmatched2 = set(range(n))
        self.unmatched3 = set(range(n))
        self.sel_value = {}  # triple -> working-array cost when selected

    def __len__(self):
        return len(self.triples)

    @property
    def is_complete(self):
        return len(self.triples) == self.n

    def add(self, i: int, j: int, k: int, value: float):
        if i not in self.unmatched1:
            raise ValueError(f"first coordinate {i} already matched")
        if j not in self.unmatched2:
            raise ValueError(f"second coordinate {j} already matched")
        if k not in self.unmatched3:
            raise ValueError(f"third coordinate {k} already matched")
        tr = (i, j, k)
        self.triples.add(tr)
        self.fwd1[i] = (j, k)
        self.inv2[j] = i
        self.inv3[k] = i
        self.unmatched1.discard(i)
        self.unmatched2.discard(j)
        self.unmatched3.discard(k)
        self.sel_value[tr] = value

    def remove(self, tr) -> float:
        if tr not in self.triples:
            raise ValueError(f"triple {tr} not in assignment")
        i, j, k = tr
        self.triples.discard(tr)
        del self.fwd1[i]
        del self.inv2[j]
        del self.inv3[k]
        self.unmatched1.add(i)
        self.unmatched2.add(j)
        self.unmatched3.add(k)
        return self.sel_value.pop(tr)

    def triple_of_first(self, i):
        j, k = self.fwd1[i]
        return (i, j, k)

    def selection_sum(self) -> float:
        return float(sum(self.sel_value[tr] for tr in self.triples))

    def validate(self):
        seen1, seen2, seen3 = set(), set(), set()
        for (i, j, k) in self.triples:
            for seen, c in ((seen1, i), (seen2, j), (seen3, k)):
                if c in seen:
                    raise AssertionError(f"axis coordinate {c} used twice")
                seen.add(c)
            if self.fwd1.get(i) != (j, k) or self.inv2.get(j) != i or self.inv3.get(k) != i:
                raise AssertionError(f"index maps inconsistent at {(i, j, k)}")
        full = set(range(self.n))
        if self.unmatched1 != full - seen1 or self.unmatched2 != full - seen2 \
                or self.unmatched3 != full - seen3:
            raise AssertionError("unmatched sets inconsistent with triples")
        if set(self.sel_value) != self.triples:
            raise AssertionError("selection-value ledger inconsistent")


# ---------------------------------------------------------------------------
# round schedule


@dataclass
class RoundSchedule:
    """Per-round targets and thresholds for the main phase."""

    n: int
    k: int
    theta: float
    alpha: float
    beta: float
    n1: int
    x1: int
    x: list          # x[t-1] = x_t for t = 1..t0 (all >= 2^k)
    t0: int
    final_target: int  # the would-be x_{t0+1}
    w0: float
    w: list          # w[0] = w0, w[t] = w_t
    W: list          # W[t] = w0 + ... + w_t
    wf: float

    def round_target(self, t: int) -> int:
        """Unmatched-count target after round t (1-based)."""
        return self.x[t] if t < self.t0 else self.final_target


def _int_ceil(v: float) -> int:
    # guard against float dust just above exact integers (e.g. 8**(2/3))
    return int(math.ceil(v - 1e-9))


def _build_schedule(n: int, k: int) -> RoundSchedule:
    theta = 1.0 / (2 ** (k + 1) - 1)
    alpha = 2.0 ** (-2 * k - 2) * (1.0 - math.sqrt(2.0 / 3.0))
    beta = 1.0 - alpha
    ln_n = math.log(n)
    x1 = _int_ceil(n ** (1.0 - theta))
    n1 = n - x1
    min_x = 2 ** k
    xs = []
    t = 1
    while True:
        xt = _int_ceil(beta ** (t - 1) * x1)
        if xt < min_x:
            break
        xs.append(xt)
        t += 1
    t0 = len(xs)
    final_target = _int_ceil(beta ** t0 * x1)
    w0 = 2.0 * n ** (-2.0 * (1.0 - theta)) * ln_n
    w = [w0]
    for xt in xs:
        w.append(2.0 * xt ** (-1.0 - theta) * n ** (theta - 1.0) * ln_n ** theta)
    W = list(np.cumsum(w))
    wf = K_F * n ** (theta - 1.0) * ln_n ** theta
    sched = RoundSchedule(n=n, k=k, theta=theta, alpha=alpha, beta=beta,
                          n1=n1, x1=x1, x=xs, t0=t0, final_target=final_target,
                          w0=w0, w=w, W=W, wf=wf)
    assert 0.0 < theta <= 1.0 / 3.0 and 0.0 < alpha < 1.0
    assert all(xs[i] >= xs[i + 1] for i in range(len(xs) - 1))
    assert all(W[i] <= W[i + 1] for i in range(len(W) - 1))
    return sched


def make_schedule(n: int, k: int) -> RoundSchedule:
    """Round schedule for size n and tree-depth parameter k (requires n >= 8)."""
    if k < 1:
        raise ValueError(f"depth parameter must be >= 1, got k={k}")
    if n < 8:
        raise ValueError(f"schedules degenerate below n=8, got n={n}")
    return _build_schedule(n, k)


# ---------------------------------------------------------------------------
# greedy phase


def greedy_phase(t: CostTensor, sched: RoundSchedule) -> PartialAssignment:
    """Cheapest-cell sweep over the first n1 planes on still-unused coordinates."""
    n = t.n
    cube = t.cube()
    state = PartialAssignment(n)
    J = list(range(n))
    K = list(range(n))
    for i in range(sched.n1):
        sub = cube[i][np.ix_(J, K)]
        flat = int(np.argmin(sub))
        a, b = divmod(flat, len(K))
        j, k = J[a], K[b]
        state.add(i, j, k, float(sub[a, b]))
        J.pop(a)
        K.pop(b)
    return state


# ---------------------------------------------------------------------------
# augmenting trees


@dataclass
class CandidateLevel:
    """First coordinates usable at one level of the bottom-up construction."""

    level: int
    candidates: list      # (min_value, p) pairs, cheapest first, capped
    target_size: float    # nu_l from the doubling recurrence


@dataclass
class AugmentingTree:
    """Rooted alternating tree: even levels added, odd levels deleted."""

    root: tuple
    added: list          # [(triple, value)] in DFS order, root first
    deleted: list        # triples currently in the assignment
    depth: int

    @property
    def added_triples(self):
        return [tr for tr, _ in self.added]


class _Budget:
    __slots__ = ("left",)

    def __init__(self, amount):
        self.left = amount

    def spend(self):
        self.left -= 1
        return self.left >= 0


def _sorted_cheap_pairs(plane_row: np.ndarray, rows, cols, w: float,
                        row_scores=None, col_scores=None):
    """(value, row_coord, col_coord) entries <= w, cheapest first.

    When score arrays are given, ordering is by value plus the scores of the
    chosen row/column (the committed downstream repair cost); the threshold
    still applies to the cell value alone.
    """
    sub = plane_row[np.ix_(rows, cols)]
    hits = np.argwhere(sub <= w)
    if hits.size == 0:
        return []
    vals = sub[hits[:, 0], hits[:, 1]]
    keys = vals
    if row_scores is not None:
        keys = vals + row_scores[hits[:, 0]] + col_scores[hits[:, 1]]
    order = np.lexsort((hits[:, 1], hits[:, 0], keys))[:512]
    return [(float(vals[o]), int(rows[hits[o, 0]]), int(cols[hits[o, 1]]))
            for o in order]


def find_augmenting_tree(state: PartialAssignment, t: CostTensor, i0: int,
                         w: float, k: int,
                         budget: int = DEFAULT_SEARCH_BUDGET):
    """Search for a feasible depth-2k tree inserting first coordinate i0.

    Bottom-up candidate sets of first coordinates are built level by level
    (leaf-capable, then capable of displacing two leaf-capable owners, and
    so on), capped at max(ceil(nu_l), 64) cheapest entries.  One concrete
    tree is then materialized top-down with backtracking so that every
    coordinate appears exactly once outside the sanctioned parent/child
    sharing.  Returns None when the budgeted search finds nothing.
    """
    if i0 not in state.unmatched1:
        raise ValueError(f"first coordinate {i0} is already matched")
    if w <= 0:
        return None
    n = state.n
    need_deleted = 2 ** (k + 1) - 2
    if len(state.triples) < need_deleted:
        return None
    if len(state.unmatched2) < 2 ** k or len(state.unmatched3) < 2 ** k:
        return None

    cube = t.cube()
    um2 = np.array(sorted(state.unmatched2), dtype=np.int64)
    um3 = np.array(sorted(state.unmatched3), dtype=np.int64)
    matched1 = np.array(sorted(state.fwd1), dtype=np.int64)
    x = len(state.unmatched1)

    def owner_arrays(level):
        """Second/third coordinates owned by the level's candidates, plus the
        candidates' cumulative subtree scores (used to order choices by the
        estimated total cost they commit to, not just the local value)."""
        cands = levels[level].candidates
        A = np.array([state.fwd1[p][0] for _, p in cands], dtype=np.int64)
        B = np.array([state.fwd1[p][1] for _, p in cands], dtype=np.int64)
        S = np.array([s for s, _ in cands])
        return A, B, S

    # bottom-up candidate levels 0 .. k-1; a level-l candidate's score is the
    # cheapest cost of a full depth-(2l+1) repair subtree hanging off it
    nu = w * n * x * x / 2.0
    levels = []
    sub = cube[np.ix_(matched1, um2, um3)]
    mins = sub.min(axis=(1, 2))
    levels.append(_make_level(0, matched1, mins, mins <= w, nu))
    if not levels[0].candidates:
        return None
    for l in range(1, k):
        nu = w * n * nu * nu / 2.0
        A, B, S = owner_arrays(l - 1)
        sub = cube[np.ix_(matched1, A, B)]
        scores = np.where(sub <= w, sub + S[None, :, None] + S[None, None, :],
                          np.inf).min(axis=(1, 2))
        levels.append(_make_level(l, matched1, scores, np.isfinite(scores), nu))
        if not levels[l].candidates:
            return None

    axis_sets = {l: owner_arrays(l - 1) for l in range(1, k + 1)}

    U1, U2, U3 = {i0}, set(), set()
    added, deleted = [], []
    budget = _Budget(budget)
    leaf_cache = {}

    def leaf_options(q):
        if q not in leaf_cache:
            leaf_cache[q] = _sorted_cheap_pairs(cube[q], um2, um3, w)
        return leaf_cache[q]

    def delete_owner(coord, axis):
        """Claim the triple owning `coord` on `axis`; None if it conflicts."""
        q = state.inv2[coord] if axis == 2 else state.inv3[coord]
        if q in U1:
            return None
        jq, kq = state.fwd1[q]
        other, other_set = (kq, U3) if axis == 2 else (jq, U2)
        if other in other_set:
            return None
        U1.add(q)
        other_set.add(other)
        deleted.append((q, jq, kq))
        return q

    def undo_delete(coord, axis):
        q, jq, kq = deleted.pop()
        U1.discard(q)
        (U3 if axis == 2 else U2).discard(kq if axis == 2 else jq)

    def solve(todo):
        """Re-add every (first coordinate, level) in todo, with backtracking."""
        if not todo:
            return True
        (q, level), rest = todo[0], todo[1:]
        if not budget.spend():
            return False
        if level == 0:
            for val, xi2, xi3 in leaf_options(q):
                if xi2 in U2 or xi3 in U3:
                    continue
                U2.add(xi2)
                U3.add(xi3)
                added.append(((q, xi2, xi3), val))
                if solve(rest):
                    return True
                added.pop()
                U2.discard(xi2)
                U3.discard(xi3)
            return False
        A, B, S = axis_sets[level]
        for val, a, b in _sorted_cheap_pairs(cube[q], A, B, w, S, S):
            if a in U2 or b in U3:
                continue
            U2.add(a)
            U3.add(b)
            qa = delete_owner(a, 2)
            if qa is None:
                U2.discard(a)
                U3.discard(b)
                continue
            qb = delete_owner(b, 3)
            if qb is None:
                undo_delete(a, 2)
                U2.discard(a)
                U3.discard(b)
                continue
            added.append(((q, a, b), val))
            if solve([(qa, level - 1), (qb, level - 1)] + rest):
                return True
            added.pop()
            undo_delete(b, 3)
            undo_delete(a, 2)
            U2.discard(a)
            U3.discard(b)
        return False

    A, B, S = axis_sets[k]
    for val, j0, k0 in _sorted_cheap_pairs(cube[i0], A, B, w, S, S):
        if not budget.spend():
            return None
        U2.add(j0)
        U3.add(k0)
        qj = delete_owner(j0, 2)
        if qj is None:
            U2.discard(j0)
            U3.discard(k0)
            continue
        qk = delete_owner(k0, 3)
        if qk is None:
            undo_delete(j0, 2)
            U2.discard(j0)
            U3.discard(k0)
            continue
        added.append(((i0, j0, k0), val))
        if solve([(qj, k - 1), (qk, k - 1)]):
            return AugmentingTree(root=(i0, j0, k0), added=list(added),
                                  deleted=list(deleted), depth=2 * k)
        added.pop()
        undo_delete(k0, 3)
        undo_delete(j0, 2)
        U2.discard(j0)
        U3.discard(k0)
    return None


def _make_level(level, matched1, scores, valid, nu):
    hits = np.flatnonzero(valid)
    order = hits[np.lexsort((matched1[hits], scores[hits]))]
    cap = max(_int_ceil(nu), CANDIDATE_FLOOR)
    cands = [(float(scores[o]), int(matched1[o])) for o in order[:cap]]
    return CandidateLevel(level=level, candidates=cands, target_size=nu)


def apply_tree(state: PartialAssignment, tree: AugmentingTree) -> None:
    """Delete the tree's odd-level triples and insert its even-level ones.

    Revalidates against the current assignment and raises StaleTreeError
    (leaving the state untouched) when the tree no longer fits.
    """
    i0 = tree.root[0]
    if i0 not in state.unmatched1:
        raise StaleTreeError(f"root first coordinate {i0} is no longer unmatched")
    for tr in tree.deleted:
        if tr not in state.triples:
            raise StaleTreeError(f"deleted triple {tr} is not in the assignment")
    before = len(state.triples)
    removed_values = [(tr, state.remove(tr)) for tr in tree.deleted]
    inserted = []
    try:
        for (i, j, k), val in tree.added:
            state.add(i, j, k, val)
            inserted.append((i, j, k))
    except ValueError as e:
        for tr in inserted:
            state.remove(tr)
        for (i, j, k), val in removed_values:
            state.add(i, j, k, val)
        raise StaleTreeError(f"tree conflicts with current assignment: {e}") from e
    assert len(state.triples) == before + 1


# ---------------------------------------------------------------------------
# run report


@dataclass
class PlanarRunReport:
    """Everything a single heuristic run is accountable for."""

    n: int
    k: int
    mode: str
    complete: bool = False
    timed_out: bool = False
    main_aborted: bool = False
    final_aborted: bool = False
    escalations_main: int = 0
    escalations_final: int = 0
    rounds_executed: int = 0
    augmentations: int = 0
    greedy_cost: float = 0.0
    main_selection: float = 0.0
    final_selection: float = 0.0
    main_bound: float = 0.0
    final_bound: float = 0.0
    # per augmentation: (round index, threshold used)
    main_aug_log: list = field(default_factory=list)
    # per final addition: (threshold used, ledger W before selection, triples added)
    final_add_log: list = field(default_factory=list)
    triples: list = field(default_factory=list)
    true_cost: float = float("nan")
    selection_cost_sum: float = 0.0
    ledger_W: float = 0.0
    runtime_ms: float = 0.0
    schedule: RoundSchedule = None

    @property
    def escalations(self):
        return self.escalations_main + self.escalations_final

    @property
    def phase_costs(self):
        return [self.greedy_cost, self.main_selection, self.final_selection]

    @property
    def bound_cost(self):
        """Refresh-mode certificate: greedy selections are pre-refresh, so the
        three phase bounds together dominate the pristine cost of the output."""
        return self.greedy_cost + self.main_bound + self.final_bound

    def successg_rhs_scheduled(self) -> float:
        """Paper-schedule main-phase budget: (2^{k+1}-1) sum (x_t - x_{t+1}) W_t."""
        s = self.schedule
        per_tree = 2 ** (self.k + 1) - 1
        total = 0.0
        for t in range(1, s.t0 + 1):
            total += (s.x[t - 1] - s.round_target(t)) * s.W[t]
        return per_tree * total

    def successg_rhs_actual(self) -> float:
        """Same budget but priced at the thresholds actually used (escalations)."""
        s = self.schedule
        per_tree = 2 ** (self.k + 1) - 1
        return per_tree * sum(s.W[t - 1] + w_used for t, w_used in self.main_aug_log)


# ---------------------------------------------------------------------------
# main phase


def _deadline_hit(deadline):
    return deadline is not None and time.monotonic() > deadline


def main_phase(state: PartialAssignment, t: CostTensor, sched: RoundSchedule,
               mode: str, report: PlanarRunReport = None,
               max_escalations: int = DEFAULT_MAX_ESCALATIONS,
               budget: int = DEFAULT_SEARCH_BUDGET, deadline=None) -> None:
    """Run rounds 1..t0, augmenting until each round's unmatched target."""
    _check_mode(mode)
    if report is None:
        report = PlanarRunReport(n=t.n, k=sched.k, mode=mode, schedule=sched)
    if len(state.triples) != t.n - sched.x1:
        raise ValueError("main phase expects the greedy phase's partial assignment")
    k = sched.k
    for rnd in range(1, sched.t0 + 1):
        if _deadline_hit(deadline):
            report.timed_out = True
            return
        report.rounds_executed = rnd
        if mode == "refresh":
            instance.refresh(t, sched.w[rnd - 1])
            base = sched.w[rnd]
        else:
            base = sched.W[rnd - 1] + sched.w[rnd]
        target = sched.round_target(rnd)
        if len(state.triples) < 2 ** (k + 1) - 2:
            # a depth-2k tree deletes 2^{k+1}-2 triples; escalation cannot fix
            # a structurally impossible round, so hand over to the final phase
            report.main_aborted = True
            return
        while len(state.unmatched1) > target:
            i0 = min(state.unmatched1)
            tree = None
            w_used = base
            if mode == "empirical":
                # refine within the round budget: ascending threshold ladder
                # from the scheduled per-triple w_t, so selections stay near
                # the smallest feasible threshold instead of saturating the
                # cumulative budget
                w_try = sched.w[rnd]
                while w_try < base:
                    tree = find_augmenting_tree(state, t, i0, w_try, k,
                                                budget=budget)
                    if tree is not None:
                        w_used = w_try
                        break
                    w_try = min(w_try * 2.0, base)
            esc = 0
            if tree is None:
                w_eff = base
                tree = find_augmenting_tree(state, t, i0, w_eff, k, budget=budget)
                while tree is None and esc < max_escalations:
                    esc += 1
                    w_eff *= 2.0
                    tree = find_augmenting_tree(state, t, i0, w_eff, k,
                                                budget=budget)
                w_used = w_eff
            report.escalations_main += esc
            if tree is None:
                report.main_aborted = True
                return
            W_now = t.ledger.W
            apply_tree(state, tree)
            report.augmentations += 1
            report.main_aug_log.append((rnd, w_used))
            sel = sum(val for _, val in tree.added)
            report.main_selection += sel
            report.main_bound += sel + len(tree.added) * W_now
            if _deadline_hit(deadline):
                report.timed_out = True
                return


def _check_mode(mode: str):
    if mode not in ("refresh", "empirical"):
        raise ValueError(f"mode must be 'refresh' or 'empirical', got {mode!r}")


# ---------------------------------------------------------------------------
# final phase


def final_phase(state: PartialAssignment, t: CostTensor, sched: RoundSchedule,
                mode: str, report: PlanarRunReport = None,
                max_escalations: int = DEFAULT_MAX_ESCALATIONS,
                budget: int = DEFAULT_SEARCH_BUDGET, deadline=None) -> None:
    """Insert each remaining first coordinate by a top-down displacement search.

    A candidate cell (i, y, z) under the threshold may use matched y or z;
    their owner triples are deleted and the displaced first coordinates are
    re-added recursively (depth decreasing, terminal moves must use
    unmatched coordinates).  Deleting an owner frees its other coordinates,
    so the deeper re-adds can recycle them; each successful insertion
    consumes exactly one unmatched coordinate per axis.
    """
    _check_mode(mode)
    if report is None:
        report = PlanarRunReport(n=t.n, k=sched.k, mode=mode, schedule=sched)
    cube = t.cube()
    m = 0
    while state.unmatched1:
        if _deadline_hit(deadline):
            report.timed_out = True
            return
        i = min(state.unmatched1)
        m += 1
        if mode == "refresh":
            instance.refresh(t, sched.wf)
        # per-triple threshold is wf in both modes; ramping up from well
        # below it keeps the accepted move near the smallest feasible
        # threshold, which is what preserves the cost scaling
        base = sched.wf
        W_now = t.ledger.W
        ops = None
        w_used = base
        w_try = base / 64.0
        while w_try < base:
            ops = _final_add(state, cube, i, w_try, sched.k, _Budget(budget))
            if ops is not None:
                w_used = w_try
                break
            w_try = min(w_try * 2.0, base)
        esc = 0
        if ops is None:
            w_eff = base
            ops = _final_add(state, cube, i, w_eff, sched.k, _Budget(budget))
            while ops is None and esc < max_escalations:
                esc += 1
                w_eff *= 2.0
                ops = _final_add(state, cube, i, w_eff, sched.k, _Budget(budget))
            w_used = w_eff
        report.escalations_final += esc
        if ops is None:
            report.final_aborted = True
            return
        sel = sum(val for _, val in ops)
        report.final_selection += sel
        report.final_bound += sel + len(ops) * W_now
        report.final_add_log.append((w_used, W_now, len(ops)))


def _final_add(state: PartialAssignment, cube, i: int, w: float, depth: int,
               budget: _Budget):
    """Insert first coordinate i, mutating state; returns [(triple, value)]
    for the inserted triples, or None (state unchanged) on failure."""
    locked = set()
    journal = []  # ("add"|"remove", triple, value), for transactional rollback

    def do_add(q, y, z, val):
        state.add(q, y, z, val)
        journal.append(("add", (q, y, z), val))
        locked.add((q, y, z))

    def do_remove(tr):
        v = state.remove(tr)
        journal.append(("remove", tr, v))

    def rollback(mark):
        while len(journal) > mark:
            op, tr, v = journal.pop()
            if op == "add":
                state.remove(tr)
                locked.discard(tr)
            else:
                state.add(*tr, v)

    def attempt(q, d):
        if not budget.spend():
            return False
        plane = cube[q]
        hits = np.argwhere(plane <= w)
        if hits.size == 0:
            return False
        vals = plane[hits[:, 0], hits[:, 1]]
        order = np.lexsort((hits[:, 1], hits[:, 0], vals))
        for o in order:
            y, z = int(hits[o, 0]), int(hits[o, 1])
            owners = []
            if y not in state.unmatched2:
                owners.append(state.triple_of_first(state.inv2[y]))
            if z not in state.unmatched3:
                oz = state.triple_of_first(state.inv3[z])
                if not owners or owners[0] != oz:
                    owners.append(oz)
            if owners and d == 0:
                continue
            if any(tr in locked for tr in owners):
                continue
            mark = len(journal)
            displaced = [tr[0] for tr in owners]
            for tr in owners:
                do_remove(tr)
            do_add(q, y, z, float(vals[o]))
            if all(attempt(p, d - 1) for p in displaced):
                return True
            rollback(mark)
        return False

    if attempt(i, depth):
        return [(tr, v) for op, tr, v in journal if op == "add"]
    return None


# ---------------------------------------------------------------------------
# full heuristic run


def bdapta(t: CostTensor, k: int, mode: str = "empirical",
           max_escalations: int = DEFAULT_MAX_ESCALATIONS,
           budget: int = DEFAULT_SEARCH_BUDGET,
           deadline=None) -> PlanarRunReport:
    """Greedy + rounds + final phase; returns the full run report.

    The report carries the pristine-tensor objective, per-phase selection
    and bound costs, escalation counts and the schedule used.  A run whose
    escalations were exhausted ends incomplete (``complete`` False) rather
    than raising.
    """
    if t.d != 3:
        raise ValueError(f"planar heuristic requires d=3, got d={t.d}")
    if k < 1:
        raise ValueError(f"depth parameter must be >= 1, got k={k}")
    _check_mode(mode)
    start = time.perf_counter()
    if t.n == 1:
        report = PlanarRunReport(n=1, k=k, mode=mode, complete=True,
                                 triples=[(0, 0, 0)],
                                 true_cost=float(t.pristine[0]),
                                 selection_cost_sum=float(t.values[0]),
                                 greedy_cost=float(t.values[0]))
        report.runtime_ms = (time.perf_counter() - start) * 1000.0
        return report
    sched = _build_schedule(t.n, k)
    report = PlanarRunReport(n=t.n, k=k, mode=mode, schedule=sched)
    state = greedy_phase(t, sched)
    report.greedy_cost = state.selection_sum()
    main_phase(state, t, sched, mode, report=report,
               max_escalations=max_escalations, budget=budget, deadline=deadline)
    if not report.timed_out:
        final_phase(state, t, sched, mode, report=report,
                    max_escalations=max_escalations, budget=budget,
                    deadline=deadline)
    state.validate()
    report.complete = state.is_complete
    report.triples = sorted(state.triples)
    report.true_cost = instance.true_cost(t, report.triples)
    report.selection_cost_sum = state.selection_sum()
    report.ledger_W = t.ledger.W
    if mode == "refresh" and report.complete:
        # ledger inequality lifted to the output set
        certificate = report.selection_cost_sum + len(report.triples) * t.ledger.W
        assert report.true_cost <= certificate + 1e-9, \
            "refresh accounting violated: pristine cost exceeds the certificate"
    report.runtime_ms = (time.perf_counter() - start) * 1000.0
    return report


# ---------------------------------------------------------------------------
# bounds and oracles


def lower_bound_rowmin(t: CostTensor) -> float:
    """Sum over the first axis of each slice's minimum pristine entry.

    Any feasible planar assignment picks one cell per first-axis slice, so
    this relaxation is a lower bound for every d >= 2.
    """
    slabs = t.pristine.reshape(t.n, -1)
    return float(slabs.min(axis=1).sum())


def lower_bound_rowmin_streaming(n: int, d: int, seed: int,
                                 chunk: int = 1 << 22) -> float:
    """Same bound computed straight from the seed, one slice at a time.

    Reproduces generate(n, d, seed) draw-for-draw without materializing the
    tensor, so it works for d up to 5 at sizes the full array could not.
    """
    gen = instance._stream(seed, 0)
    slab = n ** (d - 1)
    total = 0.0
    for _ in range(n):
        best = math.inf
        left = slab
        while left > 0:
            take = min(left, chunk)
            u = gen.random(take)
            # x = -ln(1-u) is increasing in u, so the slice min comes from u.min()
            best = min(best, float(-np.log1p(-u.min())))
            left -= take
        total += best
    return total


@dataclass
class ExactPlanarSolution:
    triples: list
    cost: float
    perm2: np.ndarray  # i -> j
    perm3: np.ndarray  # i -> k


def exact_planar(t: CostTensor) -> ExactPlanarSolution:
    """Exhaustive planar optimum: enumerate the second-coordinate permutation,
    solve an exact 2D assignment for the third (oracle, n <= 8)."""
    if t.d != 3:
        raise ValueError(f"planar oracle requires d=3, got d={t.d}")
    if t.n > EXACT_MAX_N:
        raise ValueError(f"exact planar limited to n <= {EXACT_MAX_N}, got n={t.n}")
    n = t.n
    cube = t.cube()
    rows = np.arange(n)
    best_cost = math.inf
    best = None
    for perm in _all_permutations(n):
        reduced = cube[rows, perm, :]
        m = solve_assignment(BipartiteCosts(reduced))
        if m.cost < best_cost:
            best_cost = m.cost
            best = (perm.copy(), m.assignment.copy())
    perm2, perm3 = best
    triples = [(int(i), int(perm2[i]), int(perm3[i])) for i in range(n)]
    return ExactPlanarSolution(triples=triples, cost=float(best_cost),
                               perm2=perm2, perm3=perm3)


def brute_force_planar(t: CostTensor) -> float:
    """Second, slower oracle: direct minimum over all permutation pairs."""
    if t.d != 3 or t.n > DOUBLE_ORACLE_MAX_N:
        raise ValueError(f"double brute force limited to d=3, n <= {DOUBLE_ORACLE_MAX_N}")
    n = t.n
    cube = t.cube()
    perms = _all_permutations(n)
    rows = np.arange(n)
    best = math.inf
    for p2 in perms:
        reduced = cube[rows, p2, :]          # (n, n): i -> k costs
        costs = reduced[rows[None, :], perms].sum(axis=1)
        best = min(best, float(costs.min()))
    return best
