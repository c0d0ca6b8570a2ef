"""Solvers, bounds and a benchmark harness for random 3D assignment problems."""

__version__ = "0.1.0"

from .instance import CostTensor, RefreshLedger, generate, refresh, true_cost
from .matching import (BipartiteCosts, InfeasibleError, Matching,
                       brute_force_assignment, expected_parisi, solve_assignment)
from .axial import (AxialSolution, axial_lower_bound, dfm_bound,
                    enumerate_latin_squares, exact_axial, greedy_axial)
from .planar import (AugmentingTree, PartialAssignment, PlanarRunReport,
                     RoundSchedule, StaleTreeError, apply_tree, bdapta,
                     exact_planar, final_phase, find_augmenting_tree,
                     greedy_phase, lower_bound_rowmin,
                     lower_bound_rowmin_streaming, main_phase, make_schedule)
from .bilinear import (BilinearResult, FactorPair, bilinear_heuristic,
                       bilinear_step_y, bilinear_step_z)
