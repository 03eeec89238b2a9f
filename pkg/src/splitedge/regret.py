"""Regret curves and their log-log decay exponent."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problem import RunRecord

__all__ = ["RegretCurve", "compute_regret", "regret_from_utilities", "fit_exponent"]


@dataclass(frozen=True)
class RegretCurve:
    """Per-iteration regret of one run against a known optimum.

    ``instant[t]`` is ``optimum - u_t`` with infeasible evaluations scored
    as zero utility; ``simple`` tracks the best feasible value so far;
    ``cumulative`` is the running sum of ``instant``.  ``exponent`` is the
    slope of ``log(cumulative[T]/T)`` against ``log T`` for ``T >= start``.
    """

    instant: np.ndarray
    simple: np.ndarray
    cumulative: np.ndarray
    exponent: float
    start: int

    @property
    def mean(self) -> np.ndarray:
        return self.cumulative / np.arange(1, len(self.cumulative) + 1)


def fit_exponent(values, start: int = 1) -> float:
    """Least-squares slope of ``log values[T-1]`` on ``log T`` over ``T >= start``.

    Non-positive values carry no log and are skipped; fewer than two usable
    points give NaN.
    """
    v = np.asarray(values, float)
    T = np.arange(1, len(v) + 1)
    keep = (T >= max(start, 1)) & (v > 0) & np.isfinite(v)
    if keep.sum() < 2:
        return math.nan
    slope, _ = np.polyfit(np.log(T[keep]), np.log(v[keep]), 1)
    return float(slope)


def regret_from_utilities(utilities, feasible, optimum: float, start: int = 1) -> RegretCurve:
    u = np.where(np.asarray(feasible, bool), np.asarray(utilities, float), 0.0)
    if u.size and u.max() > optimum + 1e-12:
        raise ValueError("optimum is below an observed feasible utility")
    instant = optimum - u
    simple = optimum - np.maximum.accumulate(u) if u.size else u
    cumulative = np.cumsum(instant)
    mean = cumulative / np.arange(1, len(u) + 1)
    return RegretCurve(instant, simple, cumulative, fit_exponent(mean, start), start)


def compute_regret(record: RunRecord, optimum: float) -> RegretCurve:
    """Regret of ``record`` against ``optimum``; the fit starts at ``record.n_init``."""
    return regret_from_utilities([r.utility for r in record.rows],
                                 [r.feasible for r in record.rows], optimum,
                                 start=max(record.n_init, 1))
