"""The constrained Bayesian split/power optimizer.

Loop: fit the GP on everything observed, maximize the scheduled hybrid
acquisition, evaluate the chosen (layer, power) through the charged
oracle, and stop early once the same configuration has been re-selected
``early_stop`` times in a row.  The returned answer is the best feasible
observation, not merely the last selection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import gp
from .acquisition import AcquisitionWeights, incumbent_value, maximize, normalized_time
from .problem import Oracle, Problem, RunRecord

__all__ = ["RunConfig", "grid_shape", "initial_design", "initialize", "run", "bo_loop"]


@dataclass(frozen=True)
class RunConfig:
    """Settings for one optimizer run.

    ``init_jitter`` perturbs each initial grid point by up to that fraction
    of half a grid cell per coordinate, drawn from the seeded PCG64
    stream; 0 gives the exact grid.  ``powers_w`` replaces the default
    acquisition power grid of ``power_levels`` points.
    """

    n_init: int = 5
    budget: int = 20
    early_stop: int = 3
    weights: AcquisitionWeights = field(default_factory=AcquisitionWeights)
    seed: int = 0
    init_jitter: float = 0.5
    power_levels: int = 64
    powers_w: tuple[float, ...] | None = None
    refine: bool = True
    ei_form: str = "standard"

    def __post_init__(self):
        if self.n_init < 1:
            raise ValueError("n_init must be >= 1")
        if self.budget < self.n_init:
            raise ValueError("budget must be >= n_init")
        if self.early_stop < 1:
            raise ValueError("early_stop must be >= 1")
        if not 0.0 <= self.init_jitter <= 1.0:
            raise ValueError("init_jitter must be in [0, 1]")


def grid_shape(n: int) -> tuple[int, int]:
    """(layer columns, power rows) of the initial grid; columns >= rows."""
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    for d in range(int(math.isqrt(n)), 0, -1):
        if n % d == 0 and d > 1:
            return n // d, d
    return cols, rows


def _axis(k: int) -> np.ndarray:
    return np.array([0.5]) if k == 1 else np.linspace(0.0, 1.0, k)


def initial_design(n: int, seed: int = 0, jitter: float = 0.0) -> np.ndarray:
    """``n`` unit-square points ``(power, layer)`` on a near-square grid.

    Uses an exact ``cols x rows`` factorization when ``n`` has one, else a
    ``ceil(sqrt n)``-wide grid truncated in row-major order (power rows
    outer, layer columns inner).
    """
    cols, rows = grid_shape(n)
    layer_axis, power_axis = _axis(cols), _axis(rows)
    pts = np.array([(p, l) for p in power_axis for l in layer_axis])[:n]
    if jitter > 0.0:
        rng = np.random.Generator(np.random.PCG64(seed))
        half = np.array([0.5 / max(rows - 1, 1), 0.5 / max(cols - 1, 1)])
        pts = pts + rng.uniform(-1.0, 1.0, size=pts.shape) * jitter * half
    return np.clip(pts, 0.0, 1.0)


@dataclass
class _State:
    oracle: Oracle
    record: RunRecord
    X: list = field(default_factory=list)
    y: list = field(default_factory=list)
    feasible: list = field(default_factory=list)

    def observe(self, problem: Problem, config):
        ev = self.oracle(config)
        self.record.add(ev)
        self.X.append(problem.to_unit(config))
        self.y.append(ev.utility)
        self.feasible.append(ev.feasible)
        return ev


def initialize(config: RunConfig, problem: Problem, oracle: Oracle,
               record: RunRecord | None = None) -> _State:
    """Evaluate the initial grid through ``oracle``; each point is charged."""
    state = _State(oracle, record or RunRecord("bayes"))
    state.record.n_init = config.n_init
    for a in initial_design(config.n_init, config.seed, config.init_jitter):
        state.observe(problem, problem.to_config(a))
    return state


def bo_loop(config: RunConfig, problem: Problem, *, name: str = "bayes",
            constraint_aware: bool = True) -> RunRecord:
    """Shared GP/acquisition loop.

    ``constraint_aware=False`` takes the incumbent over all observations
    instead of feasible ones only (the feasibility-agnostic variant);
    pair it with zero gradient and penalty weights.
    """
    oracle = Oracle(problem, cap=config.budget)
    state = initialize(config, problem, oracle, RunRecord(name))
    previous = state.record.best_config
    repeats = 0
    model = gp.fit(state.X, state.y)
    powers_w = None if config.powers_w is None else np.asarray(config.powers_w)
    for n in range(config.n_init + 1, config.budget + 1):
        t = normalized_time(n, config.budget, config.n_init)
        if constraint_aware:
            best = incumbent_value(state.y, state.feasible)
        else:
            best = float(np.max(state.y))
        a = maximize(model, config.weights, t, problem, best,
                     power_levels=config.power_levels, powers_w=powers_w,
                     refine=config.refine, task_index=oracle.count, ei_form=config.ei_form)
        chosen = problem.to_config(a)
        state.observe(problem, chosen)
        if chosen == previous:
            repeats += 1
            if repeats >= config.early_stop:
                break
        else:
            previous, repeats = chosen, 0
        model = gp.fit(state.X, state.y)
    state.record.evaluations = oracle.count
    return state.record


def run(config: RunConfig, problem: Problem) -> RunRecord:
    """One full constrained-BO run; see :func:`bo_loop`.

    When nothing feasible was observed, the record's ``status`` is
    ``'no_feasible'`` and ``best_config`` is None.
    """
    return bo_loop(config, problem)


def with_seed(config: RunConfig, seed: int) -> RunConfig:
    return replace(config, seed=seed)
