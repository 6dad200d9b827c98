"""Fractions of branching worlds as Lebesgue-measure projection factors on rays."""
from .fields import Scalar, ScalarField, scalar_mul, scalar_norm, sample_uniform_scalar_region
from .hilbert import (OrthogonalPartition, StateVector, change_basis, entangle_measure,
                      inner, norm_sq, project, tensor)
from .inference import (Hypothesis, alice_bob_hypotheses, first_down_certainty,
                        half_life_report, misled_fraction, model_compare, update_credence)
from .measure import (FactorEstimate, linear_map_measure_scale, measure_of_region,
                      projection_factor_analytic, projection_factor_mc, pythagorean_check)
from .regions import Annulus, Ball, Box
from .worlds import (BranchTree, FractionTable, FrequencyDistribution, build_branch_tree,
                     gleason_dependence_demo, nbc_distribution, repeat_distribution,
                     tail_fraction, world_fractions)

__version__ = "0.1.0"
