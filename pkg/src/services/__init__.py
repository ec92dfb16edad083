from .errors import DimensionMismatchError, DomainTooLargeError, PrivacyParameterError, RejectionBudgetError
from .exact_arith import RatMatrix, determinant, inverse, solve_linear_system, solve_unique
from .geometry import (
    Constraint,
    ConstraintSet,
    Hypothesis,
    LabeledPoint,
    cdepth_oracle,
    depth,
    general_position_check,
    is_realizable,
    is_realizable_points,
    val,
)
from .dp_core import PrivacyLedger, PrivacyParams, RandomSource, advanced_composition, dp_ratio_audit, exponential_mechanism
from .quasiconcave import DecreasingPointList, DomainElement, build_decreasing_list, enumerate_domain, q_eval
from .optimizer import OptimizerFactory, OptimizerParams, PrivateOptimizer, private_qc_max
from .deep_point import DeepPointRun, deep_point_accounting, find_deep_point, sufficient_size
from .halfspace import LearnerRun, add_noise, learn_halfspace, learn_halfspace_run, learn_halfspace_with_noise
from .experiments import ExperimentConfig, generate_feasibility_instance, generate_labeled_instance, run_trials
from .acceptance import CheckResult, run_acceptance

__all__ = [
    "DimensionMismatchError", "DomainTooLargeError", "PrivacyParameterError", "RejectionBudgetError",
    "RatMatrix", "determinant", "inverse", "solve_linear_system", "solve_unique",
    "Constraint", "ConstraintSet", "Hypothesis", "LabeledPoint", "cdepth_oracle", "depth",
    "general_position_check", "is_realizable", "is_realizable_points", "val",
    "PrivacyLedger", "PrivacyParams", "RandomSource", "advanced_composition", "dp_ratio_audit",
    "exponential_mechanism",
    "DecreasingPointList", "DomainElement", "build_decreasing_list", "enumerate_domain", "q_eval",
    "OptimizerFactory", "OptimizerParams", "PrivateOptimizer", "private_qc_max",
    "DeepPointRun", "deep_point_accounting", "find_deep_point", "sufficient_size",
    "LearnerRun", "add_noise", "learn_halfspace", "learn_halfspace_run", "learn_halfspace_with_noise",
    "ExperimentConfig", "generate_feasibility_instance", "generate_labeled_instance", "run_trials",
    "CheckResult", "run_acceptance",
]
