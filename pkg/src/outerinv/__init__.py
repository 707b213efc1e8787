"""Outer generalized inverses A^(2)_{T,S} and their perturbation theory."""

from .errors import *  # noqa: F401,F403
from .geninv import (ExistenceDiagnostics, OuterInverseProblem,
                     OuterInverseSolution, bott_duffin, condition_number,
                     drazin, drazin_index, exists_outer_inverse, group_inverse,
                     moore_penrose, outer_inverse, prescribed_operator,
                     weighted_moore_penrose)
from .harness import (SuiteReport, TrialConfig, TrialRecord,
                      gen_operator_perturbation, gen_problem,
                      gen_subspace_perturbation, run_suite, run_trial)
from .linalg import (nullspace_basis, numerical_rank, range_basis,
                     solve_square, spectral_norm, svd)
from .perturbation import (BoundReport, FormulaResult, HypothesisCheck,
                           PerturbationScenario, check_hypothesis,
                           image_gap_bound, perturb_a, perturb_a_bounds,
                           perturb_full, perturb_full_bounds, perturb_s,
                           perturb_s_bounds, perturb_t, perturb_t_bounds,
                           perturb_ts, perturb_ts_bounds)
from .subspace import (Subspace, delta, dist_point, from_spanning, gap,
                       is_complementary, oblique_projector, orth_projector)

__version__ = "0.1.0"
