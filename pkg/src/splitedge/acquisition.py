"""Hybrid acquisition: EI + UCB - gradient-norm penalty - constraint penalty.

Candidates are points ``a = (power, layer)`` of the unit square.  The
constraint penalty is priced with the analytic cost model at the
denormalized, layer-rounded configuration, so scoring never spends an
oracle call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import norm

from .gp import GpModel, posterior, posterior_mean_grad
from .problem import Problem
from .system_model import Budget, CostBreakdown

__all__ = [
    "AcquisitionWeights",
    "expected_improvement",
    "upper_confidence_bound",
    "constraint_penalty",
    "normalized_time",
    "schedule_weights",
    "incumbent_value",
    "hybrid_score",
    "candidate_grid",
    "maximize",
]

EI_FORMS = ("standard", "mean_hinge")


@dataclass(frozen=True)
class AcquisitionWeights:
    base_start: float = 1.0
    base_end: float = 0.1
    grad_start: float = 0.05
    grad_end: float = 0.005
    penalty: float = 10.0
    ucb_beta: float = 2.0

    def __post_init__(self):
        vals = (self.base_start, self.base_end, self.grad_start, self.grad_end,
                self.penalty, self.ucb_beta)
        if any(v < 0 for v in vals):
            raise ValueError("acquisition weights must be >= 0")
        if self.base_end > self.base_start or self.grad_end > self.grad_start:
            raise ValueError("end weights must not exceed start weights")


def expected_improvement(mean, std, best):
    """Closed-form EI of a Gaussian over the incumbent ``best``; vectorized."""
    mean = np.asarray(mean, float)
    std = np.asarray(std, float)
    gap = mean - best
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        z = np.where(std > 0, gap / np.where(std > 0, std, 1.0), 0.0)
        ei = np.where(std > 0, gap * norm.cdf(z) + std * norm.pdf(z), np.maximum(gap, 0.0))
    ei = np.maximum(ei, 0.0)
    return float(ei) if ei.ndim == 0 else ei


def upper_confidence_bound(mean, std, beta):
    out = np.asarray(mean, float) + beta * np.asarray(std, float)
    return float(out) if out.ndim == 0 else out


def constraint_penalty(cost: CostBreakdown, budget: Budget) -> float:
    return cost.energy_excess(budget) + cost.delay_excess(budget)


def normalized_time(n: int, total: int, n_init: int) -> float:
    """Iteration index ``(n - N0) / (T - 1)`` clamped to [0, 1]."""
    if total <= 1:
        raise ValueError("total budget must exceed 1")
    return min(1.0, max(0.0, (n - n_init) / (total - 1)))


def _decay(start: float, end: float, t: float) -> float:
    if start == 0.0:
        return 0.0
    return start * (end / start) ** t


def schedule_weights(weights: AcquisitionWeights, n: int, total: int,
                     n_init: int) -> tuple[float, float]:
    """Exponentially decayed ``(base, grad)`` weights at iteration ``n``."""
    t = normalized_time(n, total, n_init)
    return _decay(weights.base_start, weights.base_end, t), \
        _decay(weights.grad_start, weights.grad_end, t)


def incumbent_value(targets, feasible) -> float:
    """Best feasible observed utility, or the best overall if none is feasible."""
    targets = np.asarray(targets, float)
    feasible = np.asarray(feasible, bool)
    if feasible.any():
        return float(targets[feasible].max())
    return float(targets.max())


def hybrid_score(x, model: GpModel, weights: AcquisitionWeights, t: float, penalty,
                 best: float, ei_form: str = "standard", components: bool = False):
    """Score candidate(s) ``x`` (shape ``(2,)`` or ``(m, 2)``).

    ``penalty`` is the analytic constraint violation at each candidate.
    With ``components=True`` a dict of the individual terms is returned as
    well.
    """
    if ei_form not in EI_FORMS:
        raise ValueError(f"ei_form must be one of {EI_FORMS}")
    x = np.asarray(x, float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    mean, var = posterior(model, X)
    std = np.sqrt(var)
    if ei_form == "standard":
        ei = np.atleast_1d(expected_improvement(mean, std, best))
    else:
        ei = np.maximum(mean - best, 0.0)
    ucb = mean + weights.ucb_beta * std
    grad = np.linalg.norm(np.atleast_2d(posterior_mean_grad(model, X)), axis=1)
    lam_base = _decay(weights.base_start, weights.base_end, t)
    lam_grad = _decay(weights.grad_start, weights.grad_end, t)
    pen = np.broadcast_to(np.asarray(penalty, float), mean.shape)
    if weights.penalty == 0.0:
        pen_term = np.zeros_like(mean)
    else:
        pen_term = np.where(pen == 0.0, 0.0, weights.penalty * pen)
    score = lam_base * ei + lam_base * ucb - lam_grad * grad - pen_term
    if single:
        score = float(score[0])
    if components:
        return score, {"ei": ei, "ucb": ucb, "grad_norm": grad, "penalty": pen,
                       "lambda_base": lam_base, "lambda_grad": lam_grad}
    return score


def candidate_grid(problem: Problem, power_levels: int = 64,
                   powers_w=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Candidate set: every integer layer crossed with a power grid.

    Returns ``(X_unit, layers, powers_w)`` flattened layer-major.
    """
    if powers_w is None:
        powers_w = np.linspace(problem.device.p_min_w, problem.device.p_max_w, power_levels)
    powers_w = np.asarray(powers_w, float)
    layers = np.arange(1, problem.n_layers + 1)
    LL, PP = np.meshgrid(layers, powers_w, indexing="ij")
    span = problem.device.p_max_w - problem.device.p_min_w
    X = np.column_stack([(PP.ravel() - problem.device.p_min_w) / span,
                         problem.layer_unit(LL.ravel())])
    return X, LL.ravel(), PP.ravel()


def _select(scores, penalty, layers, powers, rel_tol=1e-12) -> int:
    top = np.max(scores)
    tol = rel_tol * max(1.0, abs(top))
    tied = np.flatnonzero(scores >= top - tol)
    order = np.lexsort((powers[tied], layers[tied], penalty[tied]))
    return int(tied[order[0]])


def maximize(model: GpModel, weights: AcquisitionWeights, t: float, problem: Problem,
             best: float, *, power_levels: int = 64, powers_w=None, refine: bool = True,
             task_index: int = 0, ei_form: str = "standard") -> np.ndarray:
    """Arg-max of the hybrid score over the candidate grid.

    Ties (within 1e-12 relative) go to the lowest penalty, then the lowest
    layer, then the lowest power.  With ``refine`` the winner's power is
    polished by a bounded 1-D search between its grid neighbours; the
    layer stays on its integer value.  Returns the unit-square point.
    """
    X, layers, powers = candidate_grid(problem, power_levels, powers_w)
    penalty = problem.penalty_arrays(layers, powers, task_index)
    scores = hybrid_score(X, model, weights, t, penalty, best, ei_form)
    k = _select(scores, penalty, layers, powers)
    x_best = X[k].copy()
    if not refine:
        return x_best

    grid_p = np.unique(X[:, 0])
    if len(grid_p) < 2:
        return x_best
    j = int(np.searchsorted(grid_p, x_best[0]))
    lo, hi = grid_p[max(0, j - 1)], grid_p[min(len(grid_p) - 1, j + 1)]
    layer = int(layers[k])
    span = problem.device.p_max_w - problem.device.p_min_w

    def neg_score(p):
        pw = problem.device.p_min_w + p * span
        pen = problem.penalty_arrays([layer], [pw], task_index)
        return -hybrid_score(np.array([[p, x_best[1]]]), model, weights, t, pen, best,
                             ei_form)[0]

    res = minimize_scalar(neg_score, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-6})
    if -res.fun > scores[k] + 1e-12 * max(1.0, abs(scores[k])) and math.isfinite(res.fun):
        x_best[0] = float(res.x)
    return x_best
