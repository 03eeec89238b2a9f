"""Constrained Bayesian optimization of DNN split layer and transmit power.

The package models split inference between an edge device and a server
(analytic delay/energy costs over a channel trace), scores configurations
with a synthetic accuracy oracle, and searches the (layer, power) space
with a GP-based hybrid acquisition plus a set of reference baselines.
"""

from .acquisition import AcquisitionWeights, expected_improvement, hybrid_score
from .bundled import default_problem
from .channel import ChannelTrace, gain_at, load_trace, synth_trace
from .config import ConfigError, ExperimentConfig, config_from_dict, load_config
from .gp import GpHyperparams, GpModel, SingularGram, fit, posterior, posterior_mean_grad
from .harness import profile_sweep, run_experiment
from .optimizer import RunConfig, run
from .problem import NoFeasiblePoint, Oracle, Problem, RunRecord
from .regret import RegretCurve, compute_regret
from .system_model import (Budget, CostBreakdown, DeviceSpec, LayerProfile, RadioSpec,
                           ServerSpec, SplitConfig, evaluate_cost)
from .utility import BudgetExhausted, EvalLedger, UtilitySurface, utility

__version__ = "0.1.0"

__all__ = [
    "AcquisitionWeights",
    "Budget",
    "BudgetExhausted",
    "ChannelTrace",
    "ConfigError",
    "CostBreakdown",
    "DeviceSpec",
    "EvalLedger",
    "ExperimentConfig",
    "GpHyperparams",
    "GpModel",
    "LayerProfile",
    "NoFeasiblePoint",
    "Oracle",
    "Problem",
    "RadioSpec",
    "RegretCurve",
    "RunConfig",
    "RunRecord",
    "ServerSpec",
    "SingularGram",
    "SplitConfig",
    "UtilitySurface",
    "compute_regret",
    "config_from_dict",
    "default_problem",
    "evaluate_cost",
    "expected_improvement",
    "fit",
    "gain_at",
    "hybrid_score",
    "load_config",
    "load_trace",
    "posterior",
    "posterior_mean_grad",
    "profile_sweep",
    "run",
    "run_experiment",
    "synth_trace",
    "utility",
]
