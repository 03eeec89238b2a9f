"""DIRECT (DIviding RECTangles) global search on the unit hypercube.

Jones, Perttunen & Stuckman's Lipschitzian method without a Lipschitz
constant: rectangles on the lower-right convex hull of (size, value) are
"potentially optimal" and get trisected along their longest sides.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = ["DirectResult", "direct_minimize", "potentially_optimal"]


@dataclass
class DirectResult:
    x: np.ndarray
    fun: float
    evaluations: int
    history: list[tuple[np.ndarray, float]] = field(default_factory=list)
    stopped_by: str = "max_evals"


@dataclass
class _Rect:
    center: np.ndarray
    # side length in units of 3^-k per dimension
    levels: np.ndarray
    value: float

    @property
    def half_diag(self) -> float:
        sides = 3.0 ** (-self.levels.astype(float))
        return 0.5 * float(np.sqrt(np.sum(sides * sides)))


class _Budget(Exception):
    pass


def potentially_optimal(sizes, values, fmin: float, eps: float = 1e-4) -> list[int]:
    """Indices of potentially optimal rectangles.

    For each distinct size only the lowest value competes; among those,
    keep the points on the lower-right convex hull whose supporting line
    also improves on ``fmin`` by at least ``eps * |fmin|``.
    """
    sizes = np.asarray(sizes, float)
    values = np.asarray(values, float)
    best_per_size: dict[float, int] = {}
    for i, (d, f) in enumerate(zip(sizes, values)):
        key = round(d, 12)
        j = best_per_size.get(key)
        if j is None or f < values[j] or (f == values[j] and i < j):
            best_per_size[key] = i
    cand = sorted(best_per_size.values(), key=lambda i: sizes[i])

    # monotone-chain lower hull, small -> large
    hull: list[int] = []
    for i in cand:
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (sizes[b] - sizes[a]) * (values[i] - values[a]) - \
                (values[b] - values[a]) * (sizes[i] - sizes[a])
            # collinear points stay on the hull
            if cross < -1e-12:
                hull.pop()
            else:
                break
        hull.append(i)
    # only the lower-right part, from the smallest-valued rectangle on
    i_min = min(range(len(hull)), key=lambda k: (values[hull[k]], sizes[hull[k]]))
    hull = hull[i_min:]

    chosen = []
    for k, i in enumerate(hull):
        if k + 1 < len(hull):
            j = hull[k + 1]
            slope = (values[j] - values[i]) / (sizes[j] - sizes[i])
            if values[i] - slope * sizes[i] > fmin - eps * abs(fmin):
                continue
        chosen.append(i)
    return chosen


def direct_minimize(func: Callable[[np.ndarray], float], dim: int, max_evals: int = 100,
                    stall_window: int | None = None, eps: float = 1e-4,
                    tol: float = 0.0) -> DirectResult:
    """Minimize ``func`` over ``[0, 1]^dim``.

    The first evaluation is the domain center.  Stops after ``max_evals``
    calls, or after ``stall_window`` consecutive calls that fail to beat
    the incumbent by more than ``tol``.
    """
    if max_evals < 1:
        raise ValueError("max_evals must be >= 1")
    history: list[tuple[np.ndarray, float]] = []
    best = {"x": None, "f": np.inf, "stall": 0}

    def evaluate(x):
        if len(history) >= max_evals:
            raise _Budget("max_evals")
        f = float(func(x))
        history.append((x.copy(), f))
        if f < best["f"] - tol:
            best.update(x=x.copy(), f=f, stall=0)
        else:
            best["stall"] += 1
            if best["x"] is None:
                best.update(x=x.copy(), f=f)
        if stall_window is not None and best["stall"] >= stall_window:
            raise _Budget("stall")
        return f

    stopped = "max_evals"
    rects: list[_Rect] = []
    try:
        c0 = np.full(dim, 0.5)
        rects.append(_Rect(c0, np.zeros(dim, int), evaluate(c0)))
        while True:
            sizes = [r.half_diag for r in rects]
            values = [r.value for r in rects]
            for idx in sorted(potentially_optimal(sizes, values, best["f"], eps)):
                _divide(rects, idx, evaluate)
    except _Budget as stop:
        stopped = str(stop)
    return DirectResult(x=best["x"], fun=best["f"], evaluations=len(history),
                        history=history, stopped_by=stopped)


def _divide(rects: list[_Rect], idx: int, evaluate) -> None:
    rect = rects[idx]
    longest = np.flatnonzero(rect.levels == rect.levels.min())
    delta = 3.0 ** (-(rect.levels.min() + 1))
    samples = {}
    for d in longest:
        e = np.zeros_like(rect.center)
        e[d] = delta
        samples[d] = (rect.center - e, evaluate(rect.center - e),
                      rect.center + e, evaluate(rect.center + e))
    # split first along the dimension with the best sampled value
    order = sorted(longest, key=lambda d: (min(samples[d][1], samples[d][3]), d))
    levels = rect.levels.copy()
    for d in order:
        levels[d] += 1
        lo, flo, hi, fhi = samples[d]
        rects.append(_Rect(lo, levels.copy(), flo))
        rects.append(_Rect(hi, levels.copy(), fhi))
    rect.levels = levels
