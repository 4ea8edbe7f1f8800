"""Continuous relaxation solver for best subset selection in linear regression."""

from .baselines import BestSubsetTable, exhaustive_best_subset, forward_stepwise
from .errors import CombssError, InputError, NumericalError
from .grad import GradientWorkspace, g_value, grad_f, grad_g, map_w_to_t, objective_f
from .linop import ActiveDesign, LtOperator, WoodburyOperator, cg_solve, solve_Lt
from .metrics import Scores, confusion, prediction_error, scores
from .model import CombssConfig, Dataset, Optimizer, Route, Subset, default_config, validate_dataset
from .optim import FitState, TerminatedBy, adam_step, basic_gd_step, init_state, run_fit, truncate
from .path import PathRecord, SolutionPath, lambda_grid, refit_ols, run_path, threshold
from .simulate import BetaType, SimData, SimSpec, simulate

__all__ = [
    "ActiveDesign",
    "BestSubsetTable",
    "BetaType",
    "CombssConfig",
    "CombssError",
    "Dataset",
    "FitState",
    "GradientWorkspace",
    "InputError",
    "LtOperator",
    "NumericalError",
    "Optimizer",
    "PathRecord",
    "Route",
    "Scores",
    "SimData",
    "SimSpec",
    "SolutionPath",
    "Subset",
    "TerminatedBy",
    "WoodburyOperator",
    "adam_step",
    "basic_gd_step",
    "cg_solve",
    "confusion",
    "default_config",
    "exhaustive_best_subset",
    "forward_stepwise",
    "g_value",
    "grad_f",
    "grad_g",
    "init_state",
    "lambda_grid",
    "map_w_to_t",
    "objective_f",
    "prediction_error",
    "refit_ols",
    "run_fit",
    "run_path",
    "scores",
    "simulate",
    "threshold",
    "truncate",
]
