"""Problem bundle, the charged oracle, and run records shared by all optimizers."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import ChannelTrace, gain_at
from .system_model import (Budget, CostBreakdown, DeviceSpec, LayerProfile, RadioSpec,
                           ServerSpec, SplitConfig, cost_arrays, evaluate_cost)
from .utility import EvalLedger, UtilitySurface, utility

__all__ = [
    "NoFeasiblePoint",
    "Problem",
    "Evaluation",
    "Oracle",
    "IterationRecord",
    "RunRecord",
    "RECORD_COLUMNS",
    "write_record_csv",
    "read_record_csv",
]

CHANNEL_MODES = ("frozen", "advance")


class NoFeasiblePoint(RuntimeError):
    """A run finished without observing any feasible configuration."""


@dataclass(frozen=True)
class Problem:
    """Everything needed to price and score a split configuration.

    ``channel_mode='frozen'`` prices every evaluation with trace frame
    ``frame``; ``'advance'`` moves one frame per oracle call.
    """

    profile: LayerProfile
    device: DeviceSpec
    server: ServerSpec
    radio: RadioSpec
    budget: Budget
    surface: UtilitySurface
    trace: ChannelTrace
    channel_mode: str = "frozen"
    frame: int = 0

    def __post_init__(self):
        if self.surface.n_layers != self.profile.n_layers:
            raise ValueError(f"surface has {self.surface.n_layers} layers, "
                             f"profile has {self.profile.n_layers}")
        if self.channel_mode not in CHANNEL_MODES:
            raise ValueError(f"channel_mode must be one of {CHANNEL_MODES}")

    @property
    def n_layers(self) -> int:
        return self.profile.n_layers

    def gain(self, task_index: int = 0) -> float:
        if self.channel_mode == "frozen":
            return gain_at(self.trace, self.frame)
        return gain_at(self.trace, self.frame + task_index)

    def to_config(self, a) -> SplitConfig:
        """Denormalize ``(power, layer)`` from the unit square; layers round half up."""
        p = min(1.0, max(0.0, float(a[0])))
        l = min(1.0, max(0.0, float(a[1])))
        L = self.n_layers
        layer = int(math.floor(1.0 + l * (L - 1) + 0.5))
        layer = min(L, max(1, layer))
        power = self.device.p_min_w + p * (self.device.p_max_w - self.device.p_min_w)
        return SplitConfig(layer=layer, power_w=power)

    def to_unit(self, config: SplitConfig) -> np.ndarray:
        span = self.device.p_max_w - self.device.p_min_w
        p = (config.power_w - self.device.p_min_w) / span
        l = 0.0 if self.n_layers == 1 else (config.layer - 1) / (self.n_layers - 1)
        return np.array([p, l])

    def layer_unit(self, layers) -> np.ndarray:
        layers = np.asarray(layers, float)
        return np.zeros_like(layers) if self.n_layers == 1 else (layers - 1) / (self.n_layers - 1)

    def power_grid(self, levels: int) -> np.ndarray:
        if levels < 1:
            raise ValueError("need at least one power level")
        if levels == 1:
            return np.array([self.device.p_max_w])
        return np.linspace(self.device.p_min_w, self.device.p_max_w, levels)

    def cost(self, config: SplitConfig, task_index: int = 0) -> CostBreakdown:
        return evaluate_cost(config, self.gain(task_index), self.profile, self.device,
                             self.server, self.radio, self.budget)

    def penalty_arrays(self, layers, powers, task_index: int = 0) -> np.ndarray:
        """Hinge penalty (energy excess + delay excess) for many candidates at once."""
        energy, delay = cost_arrays(layers, powers, self.gain(task_index), self.profile,
                                    self.device, self.server, self.radio)
        with np.errstate(invalid="ignore"):
            pen = np.maximum(0.0, energy - self.budget.e_max_j) + \
                np.maximum(0.0, delay - self.budget.tau_max_s)
        return np.where(np.isnan(pen), np.inf, pen)

    def with_frame(self, frame: int, channel_mode: str | None = None) -> "Problem":
        from dataclasses import replace
        return replace(self, frame=frame, channel_mode=channel_mode or self.channel_mode)


@dataclass(frozen=True)
class Evaluation:
    config: SplitConfig
    utility: float
    cost: CostBreakdown

    @property
    def feasible(self) -> bool:
        return self.cost.feasible


class Oracle:
    """The only place evaluations are counted: prices and scores one config per call."""

    def __init__(self, problem: Problem, cap: int):
        self.problem = problem
        self.ledger = EvalLedger(cap)

    @property
    def count(self) -> int:
        return self.ledger.count

    def task_index(self) -> int:
        return self.ledger.count

    def __call__(self, config: SplitConfig) -> Evaluation:
        config.validate(self.problem.n_layers, self.problem.device.p_min_w,
                        self.problem.device.p_max_w)
        cost = self.problem.cost(config, self.ledger.count)
        u = utility(config, cost, self.problem.surface, self.problem.budget, self.ledger)
        return Evaluation(config, u, cost)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    config: SplitConfig
    utility: float
    feasible: bool
    cost: CostBreakdown
    best_so_far: float


RECORD_COLUMNS = ("iter", "power_w", "layer", "utility", "feasible", "energy_j",
                  "delay_s", "best_so_far")


@dataclass
class RunRecord:
    """Per-evaluation log of one optimizer run plus its best feasible result.

    ``best_so_far`` is the best feasible utility seen up to and including
    each row (0.0 before the first feasible observation).
    """

    algorithm: str
    rows: list[IterationRecord] = field(default_factory=list)
    best_config: SplitConfig | None = None
    best_utility: float | None = None
    best_cost: CostBreakdown | None = None
    evaluations: int = 0
    n_init: int = 0

    def add(self, ev: Evaluation) -> IterationRecord:
        prev = self.rows[-1].best_so_far if self.rows else 0.0
        if ev.feasible and (self.best_utility is None or ev.utility > self.best_utility):
            self.best_config, self.best_utility, self.best_cost = ev.config, ev.utility, ev.cost
        best = max(prev, ev.utility) if ev.feasible else prev
        row = IterationRecord(len(self.rows) + 1, ev.config, ev.utility, ev.feasible,
                              ev.cost, best)
        self.rows.append(row)
        return row

    @property
    def found_feasible(self) -> bool:
        return self.best_config is not None

    @property
    def status(self) -> str:
        return "ok" if self.found_feasible else "no_feasible"

    def require_feasible(self) -> "RunRecord":
        if not self.found_feasible:
            raise NoFeasiblePoint(f"{self.algorithm}: no feasible configuration observed")
        return self

    def convergence_iteration(self, target: float, tol: float = 1e-12) -> int | None:
        """First evaluation index whose best-so-far reaches ``target``."""
        for row in self.rows:
            if row.best_so_far >= target - tol:
                return row.iteration
        return None


def _fmt(x: float) -> str:
    return repr(float(x))


def write_record_csv(record: RunRecord, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_COLUMNS)
        for r in record.rows:
            writer.writerow([r.iteration, _fmt(r.config.power_w), r.config.layer,
                             _fmt(r.utility), int(r.feasible), _fmt(r.cost.energy_j),
                             _fmt(r.cost.delay_s), _fmt(r.best_so_far)])


def read_record_csv(path: str | Path) -> list[dict]:
    """Parse a run CSV back into typed row dicts."""
    out = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            out.append({
                "iter": int(rec["iter"]),
                "power_w": float(rec["power_w"]),
                "layer": int(rec["layer"]),
                "utility": float(rec["utility"]),
                "feasible": bool(int(rec["feasible"])),
                "energy_j": float(rec["energy_j"]),
                "delay_s": float(rec["delay_s"]),
                "best_so_far": float(rec["best_so_far"]),
            })
    return out
