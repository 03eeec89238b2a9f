"""A small (mu/mu_w, lambda)-CMA-ES for box-bounded problems.

Follows Hansen's tutorial parameter settings (rank-one plus rank-mu
covariance update, cumulative step-size adaptation).  Candidates are
repaired by clipping into the box before evaluation and the clipped
points drive the update; the mean is clipped as well, so it never leaves
the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = ["CmaResult", "cma_es_minimize"]


@dataclass
class CmaResult:
    x: np.ndarray
    fun: float
    evaluations: int
    generations: int
    history: list[tuple[np.ndarray, float]] = field(default_factory=list)
    means: list[np.ndarray] = field(default_factory=list)
    stopped_by: str = "max_evals"


class _Stop(Exception):
    pass


def cma_es_minimize(func: Callable[[np.ndarray], float], dim: int, *, pop: int = 10,
                    max_evals: int = 300, stall_window: int | None = None,
                    sigma0: float = 0.3, x0=None, lower=0.0, upper=1.0, seed: int = 0,
                    tol: float = 0.0) -> CmaResult:
    """Minimize ``func`` inside the box ``[lower, upper]^dim``.

    Parameters
    ----------
    pop : int
        Offspring per generation (lambda); the best half are recombined.
    max_evals : int
        Hard cap on calls to ``func``; a generation may be cut short.
    stall_window : int, optional
        Stop after this many consecutive calls without beating the
        incumbent by more than ``tol``.
    x0 : array_like, optional
        Initial mean; defaults to the box center.
    seed : int
        Seed of the PCG64 stream used for all sampling.
    """
    if pop < 2:
        raise ValueError("pop must be >= 2")
    if max_evals < 1:
        raise ValueError("max_evals must be >= 1")
    lo = np.broadcast_to(np.asarray(lower, float), (dim,))
    hi = np.broadcast_to(np.asarray(upper, float), (dim,))
    rng = np.random.Generator(np.random.PCG64(seed))

    n = dim
    mu = pop // 2
    w = math.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    w = w / w.sum()
    mueff = 1.0 / np.sum(w * w)
    cc = (4 + mueff / n) / (n + 4 + 2 * mueff / n)
    cs = (mueff + 2) / (n + mueff + 5)
    c1 = 2 / ((n + 1.3) ** 2 + mueff)
    cmu = min(1 - c1, 2 * (mueff - 2 + 1 / mueff) / ((n + 2) ** 2 + mueff))
    damps = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (n + 1)) - 1) + cs
    chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n))

    mean = np.clip((lo + hi) / 2 if x0 is None else np.asarray(x0, float), lo, hi)
    sigma = sigma0 * float(np.max(hi - lo))
    C = np.eye(n)
    pc = np.zeros(n)
    ps = np.zeros(n)

    history: list[tuple[np.ndarray, float]] = []
    means = [mean.copy()]
    best = {"x": None, "f": math.inf, "stall": 0}

    def evaluate(x):
        if len(history) >= max_evals:
            raise _Stop("max_evals")
        f = float(func(x))
        history.append((x.copy(), f))
        if f < best["f"] - tol:
            best.update(x=x.copy(), f=f, stall=0)
        else:
            best["stall"] += 1
            if best["x"] is None:
                best.update(x=x.copy(), f=f)
        if stall_window is not None and best["stall"] >= stall_window:
            raise _Stop("stall")
        return f

    gen = 0
    stopped = "max_evals"
    try:
        while True:
            # eigendecomposition every generation; n is tiny
            C = np.triu(C) + np.triu(C, 1).T
            eigval, B = np.linalg.eigh(C)
            D = np.sqrt(np.maximum(eigval, 1e-20))
            inv_sqrt_C = B @ np.diag(1 / D) @ B.T

            z = rng.standard_normal((pop, n))
            X = np.clip(mean + sigma * (z * D) @ B.T, lo, hi)
            fit = np.array([evaluate(x) for x in X])
            gen += 1

            order = np.argsort(fit, kind="stable")[:mu]
            old = mean
            mean = np.clip(w @ X[order], lo, hi)
            means.append(mean.copy())

            y = (mean - old) / sigma
            ps = (1 - cs) * ps + math.sqrt(cs * (2 - cs) * mueff) * (inv_sqrt_C @ y)
            hsig = np.linalg.norm(ps) / math.sqrt(1 - (1 - cs) ** (2 * gen)) / chi_n \
                < 1.4 + 2 / (n + 1)
            pc = (1 - cc) * pc + hsig * math.sqrt(cc * (2 - cc) * mueff) * y
            Y = (X[order] - old) / sigma
            C = (1 - c1 - cmu) * C \
                + c1 * (np.outer(pc, pc) + (1 - hsig) * cc * (2 - cc) * C) \
                + cmu * (Y.T * w) @ Y
            sigma *= math.exp((cs / damps) * (np.linalg.norm(ps) / chi_n - 1))
            if sigma < 1e-14:
                stopped = "sigma"
                break
    except _Stop as stop:
        stopped = str(stop)
    return CmaResult(x=best["x"], fun=best["f"], evaluations=len(history), generations=gen,
                     history=history, means=means, stopped_by=stopped)
