"""N-player general-sum finite-horizon linear-quadratic games.

Exact Nash gains from the coupled Riccati recursion, exact policy evaluation,
model-based and sample-based natural policy gradient, and the constants of
the linear-convergence analysis.
"""
from .errors import (AlphaNonpositive, CholeskyFailure, Diverged, InvalidSpec, LQGameError,
                     SingularCovariance, SingularPhi)
from .evaluation import PolicyEvaluation, evaluate, natural_gradient, smoothness_identity
from .game import (GameSpec, GaussianInit, JointPolicy, MixtureInit, ModelConstants,
                   ValidationReport, ensure_valid, model_constants, validate_spec)
from .nash import NashSolution, solve_nash
from .npg import (AssumptionReport, NpgTrace, best_response_gap, check_assumptions,
                  normalized_error, npg_step, run_npg)
from .presets import ExperimentPreset, init_ball, make_preset
from .simulation import mc_cost, sample_trajectory
from .zeroth_order import ZoConfig, run_npg_free, zo_estimate

__version__ = "0.1.0"

__all__ = [
    "AlphaNonpositive", "AssumptionReport", "CholeskyFailure", "Diverged", "ExperimentPreset",
    "GameSpec", "GaussianInit", "InvalidSpec", "JointPolicy", "LQGameError", "MixtureInit",
    "ModelConstants", "NashSolution", "NpgTrace", "PolicyEvaluation", "SingularCovariance",
    "SingularPhi", "ValidationReport", "ZoConfig", "best_response_gap", "check_assumptions",
    "ensure_valid", "evaluate", "init_ball", "make_preset", "mc_cost", "model_constants",
    "natural_gradient", "normalized_error", "npg_step", "run_npg", "run_npg_free",
    "sample_trajectory", "smoothness_identity", "solve_nash", "validate_spec", "zo_estimate",
]
