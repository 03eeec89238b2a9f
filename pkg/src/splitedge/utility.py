"""Synthetic accuracy oracle with deadline truncation and call accounting."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .system_model import Budget, CostBreakdown, SplitConfig

__all__ = [
    "BudgetExhausted",
    "UtilitySurface",
    "EvalLedger",
    "skipped_tail_layers",
    "utility",
    "load_surface",
    "write_surface",
]


class BudgetExhausted(RuntimeError):
    """The evaluation ledger reached its cap."""


@dataclass(frozen=True)
class UtilitySurface:
    """Accuracy per split layer when the whole network completes in time.

    ``base_accuracy[i]`` belongs to layer ``i + 1``.  A deadline overrun
    drops tail layers, each costing ``truncation_penalty_per_layer`` of
    accuracy, down to ``floor``.
    """

    base_accuracy: tuple[float, ...]
    truncation_penalty_per_layer: float = 0.03
    floor: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "base_accuracy", tuple(float(a) for a in self.base_accuracy))
        if not self.base_accuracy:
            raise ValueError("surface needs at least one layer")
        if not all(0.0 <= a <= 1.0 for a in self.base_accuracy) or not 0.0 <= self.floor <= 1.0:
            raise ValueError("accuracies must lie in [0, 1]")
        if any(a < self.floor for a in self.base_accuracy):
            raise ValueError("floor exceeds some base accuracy")
        if self.truncation_penalty_per_layer < 0:
            raise ValueError("truncation penalty must be >= 0")

    @property
    def n_layers(self) -> int:
        return len(self.base_accuracy)


class EvalLedger:
    """Counts oracle calls against a hard cap.

    Mutable; one ledger per optimizer run.
    """

    def __init__(self, cap: int):
        if cap < 0:
            raise ValueError("cap must be >= 0")
        self.cap = int(cap)
        self.count = 0

    @property
    def remaining(self) -> int:
        return self.cap - self.count

    def charge(self) -> None:
        if self.count >= self.cap:
            raise BudgetExhausted(f"evaluation cap {self.cap} reached")
        self.count += 1

    def __repr__(self):
        return f"EvalLedger(count={self.count}, cap={self.cap})"


def skipped_tail_layers(delay_s: float, tau_max_s: float, n_layers: int) -> int:
    """Whole tail layers lost when a pipeline of ``delay_s`` is cut at the deadline.

    The overrun fraction ``(delay - tau_max) / delay`` of the L-layer
    pipeline is dropped, rounded up to whole layers.
    """
    if delay_s <= tau_max_s:
        return 0
    if math.isinf(delay_s):
        return n_layers
    frac = (delay_s - tau_max_s) / delay_s
    return min(n_layers, math.ceil(frac * n_layers))


def utility(config: SplitConfig, cost: CostBreakdown, surface: UtilitySurface,
            budget: Budget, ledger: EvalLedger) -> float:
    """One black-box accuracy query; charges ``ledger`` before answering."""
    ledger.charge()
    base = surface.base_accuracy[config.layer - 1]
    if cost.energy_j > budget.e_max_j:
        return surface.floor
    delay = cost.delay_s
    if delay <= budget.tau_max_s:
        return base
    skipped = skipped_tail_layers(delay, budget.tau_max_s, surface.n_layers)
    return max(surface.floor, base - surface.truncation_penalty_per_layer * skipped)


def load_surface(path: str | Path, truncation_penalty_per_layer: float = 0.03,
                 floor: float = 0.01) -> UtilitySurface:
    """Read a ``layer_index,base_accuracy`` CSV (layers 1..L)."""
    acc: dict[int, float] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if set(reader.fieldnames or ()) < {"layer_index", "base_accuracy"}:
            raise ValueError(f"{path}: expected header 'layer_index,base_accuracy'")
        for rec in reader:
            acc[int(rec["layer_index"])] = float(rec["base_accuracy"])
    n = len(acc)
    if sorted(acc) != list(range(1, n + 1)):
        raise ValueError(f"{path}: layer indices must be 1..{n}")
    return UtilitySurface(tuple(acc[i] for i in range(1, n + 1)),
                          truncation_penalty_per_layer, floor)


def write_surface(surface: UtilitySurface, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["layer_index", "base_accuracy"])
        for i, a in enumerate(surface.base_accuracy, start=1):
            writer.writerow([i, repr(a)])
