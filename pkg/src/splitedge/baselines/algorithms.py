"""Baseline split/power optimizers sharing the charged oracle.

Every function builds its own :class:`~splitedge.problem.Oracle` with the
method's cap, so the evaluation count in the returned record is exactly
the ledger delta.  Unconstrained searches (DIRECT, CMA-ES, random) score
infeasible configurations as zero accuracy; records keep the utility the
oracle actually returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Mapping

import numpy as np

from ..acquisition import AcquisitionWeights
from ..optimizer import RunConfig, bo_loop
from ..problem import NoFeasiblePoint, Oracle, Problem, RunRecord
from ..system_model import SplitConfig
from .cmaes import cma_es_minimize
from .direct import direct_minimize

__all__ = [
    "BaselineSpec",
    "KINDS",
    "DEFAULT_POWER_LEVELS",
    "exhaustive",
    "basic_bo",
    "basic_bo_weights",
    "direct_search",
    "cma_es",
    "random_search",
    "transmit_first",
    "compute_first",
    "run_baseline",
]

KINDS = ("exhaustive", "basic_bo", "direct", "cma_es", "random", "transmit_first",
         "compute_first")
DEFAULT_POWER_LEVELS = 91
PARAMS = {
    "exhaustive": {"power_levels", "powers_w"},
    "basic_bo": set(),
    "direct": {"max_evals", "stall_window"},
    "cma_es": {"pop", "max_evals", "stall", "sigma0"},
    "random": {"n"},
    "transmit_first": {"power_levels"},
    "compute_first": {"power_levels"},
}


@dataclass(frozen=True)
class BaselineSpec:
    """A baseline kind plus its keyword parameters (caps, windows, seeds)."""

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown baseline {self.kind!r}; expected one of {KINDS}")
        extra = set(self.params) - PARAMS[self.kind]
        if extra:
            raise ValueError(f"{self.kind} does not take {sorted(extra)}")
        for key in ("power_levels", "max_evals", "pop", "n", "stall_window", "stall"):
            if key in self.params and self.params[key] is not None and self.params[key] < 1:
                raise ValueError(f"{key} must be positive")
        if self.params.get("pop", 2) < 2:
            raise ValueError("pop must be >= 2")


def _finish(record: RunRecord, oracle: Oracle) -> RunRecord:
    record.evaluations = oracle.count
    return record


def exhaustive(problem: Problem, power_levels: int = DEFAULT_POWER_LEVELS,
               powers_w=None) -> RunRecord:
    """Evaluate every (layer, power) pair once; layers outer, powers ascending."""
    powers = problem.power_grid(power_levels) if powers_w is None else np.asarray(powers_w)
    oracle = Oracle(problem, cap=problem.n_layers * len(powers))
    record = RunRecord("exhaustive")
    for layer in range(1, problem.n_layers + 1):
        for p in powers:
            record.add(oracle(SplitConfig(layer, float(p))))
    return _finish(record, oracle)


def basic_bo_weights(ucb_beta: float = 2.0) -> AcquisitionWeights:
    """EI + beta*UCB with constant unit weight, no gradient or penalty term."""
    return AcquisitionWeights(base_start=1.0, base_end=1.0, grad_start=0.0, grad_end=0.0,
                              penalty=0.0, ucb_beta=ucb_beta)


def basic_bo(problem: Problem, config: RunConfig | None = None) -> RunRecord:
    """Feasibility-agnostic BO: same GP pipeline and budget as the hybrid."""
    config = config or RunConfig()
    config = replace(config, weights=basic_bo_weights(config.weights.ucb_beta))
    return bo_loop(config, problem, name="basic-bo", constraint_aware=False)


def _scored(oracle: Oracle, record: RunRecord, problem: Problem):
    """Negative accuracy of a unit-square point, infeasible counted as 0."""
    def objective(x):
        ev = oracle(problem.to_config(x))
        record.add(ev)
        return -(ev.utility if ev.feasible else 0.0)
    return objective


def direct_search(problem: Problem, max_evals: int = 100, stall_window: int = 20) -> RunRecord:
    oracle = Oracle(problem, cap=max_evals)
    record = RunRecord("direct")
    direct_minimize(_scored(oracle, record, problem), 2, max_evals=max_evals,
                    stall_window=stall_window)
    return _finish(record, oracle)


def cma_es(problem: Problem, pop: int = 10, max_evals: int = 300, stall: int = 20,
           seed: int = 0, sigma0: float = 0.3) -> RunRecord:
    oracle = Oracle(problem, cap=max_evals)
    record = RunRecord("cma-es")
    cma_es_minimize(_scored(oracle, record, problem), 2, pop=pop, max_evals=max_evals,
                    stall_window=stall, sigma0=sigma0, seed=seed)
    return _finish(record, oracle)


def random_search(problem: Problem, n: int = 300, seed: int = 0) -> RunRecord:
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    oracle = Oracle(problem, cap=n)
    record = RunRecord("random")
    for a in rng.uniform(0.0, 1.0, size=(n, 2)):
        record.add(oracle(problem.to_config(a)))
    return _finish(record, oracle)


def _greedy(problem: Problem, name: str, order) -> RunRecord:
    # feasibility comes from the known cost model; only the pick is evaluated
    for config in order:
        if problem.cost(config).feasible:
            oracle = Oracle(problem, cap=1)
            record = RunRecord(name)
            record.add(oracle(config))
            return _finish(record, oracle)
    raise NoFeasiblePoint(f"{name}: no feasible configuration on the power grid")


def transmit_first(problem: Problem, power_levels: int = DEFAULT_POWER_LEVELS) -> RunRecord:
    """Start at P_max and take the deepest feasible layer, lowering power if none.

    Raises
    ------
    NoFeasiblePoint
        If no grid configuration is feasible.
    """
    powers = problem.power_grid(power_levels)[::-1]
    layers = range(problem.n_layers, 0, -1)
    return _greedy(problem, "transmit-first",
                   (SplitConfig(l, float(p)) for p in powers for l in layers))


def compute_first(problem: Problem, power_levels: int = DEFAULT_POWER_LEVELS) -> RunRecord:
    """Start at the deepest layer and take the highest feasible power, backing off layers.

    Raises
    ------
    NoFeasiblePoint
        If no grid configuration is feasible.
    """
    powers = problem.power_grid(power_levels)[::-1]
    layers = range(problem.n_layers, 0, -1)
    return _greedy(problem, "compute-first",
                   (SplitConfig(l, float(p)) for l in layers for p in powers))


def run_baseline(spec: BaselineSpec, problem: Problem, run_config: RunConfig | None = None,
                 seed: int = 0) -> RunRecord:
    """Dispatch ``spec`` on ``problem``; ``seed`` feeds the stochastic kinds."""
    p = dict(spec.params)
    if spec.kind == "exhaustive":
        return exhaustive(problem, **p)
    if spec.kind == "basic_bo":
        cfg = replace(run_config or RunConfig(), seed=seed)
        return basic_bo(problem, cfg)
    if spec.kind == "direct":
        return direct_search(problem, **p)
    if spec.kind == "cma_es":
        return cma_es(problem, seed=seed, **p)
    if spec.kind == "random":
        return random_search(problem, seed=seed, **p)
    if spec.kind == "transmit_first":
        return transmit_first(problem, **p)
    return compute_first(problem, **p)

