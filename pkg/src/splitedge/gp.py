"""Zero-mean Gaussian-process regression with an isotropic Matern 5/2 kernel.

Inputs live on the normalized square ``[0, 1]^2`` as ``(power, layer)``.
Hyperparameters (lengthscale, signal variance) are chosen by maximizing
the log marginal likelihood over a log-spaced grid followed by a few
sweeps of bounded coordinate refinement, which keeps fitting
deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize_scalar

__all__ = [
    "SingularGram",
    "GpHyperparams",
    "GpModel",
    "matern52",
    "kernel_matrix",
    "log_marginal_likelihood",
    "dedupe",
    "fit",
    "posterior",
    "posterior_mean_grad",
    "LENGTHSCALE_BOUNDS",
    "SIGNAL_VAR_BOUNDS",
]

SQRT5 = math.sqrt(5.0)
# capped at half the unit side: longer lengthscales let a few step-like
# observations extrapolate almost linearly and the posterior stops exploring
LENGTHSCALE_BOUNDS = (0.05, 0.5)
SIGNAL_VAR_BOUNDS = (0.01, 4.0)
GRID_SIZE = 20
JITTER = 1e-8
MAX_JITTER = 1e-4
LOG_2PI = math.log(2.0 * math.pi)


class SingularGram(np.linalg.LinAlgError):
    """Gram matrix not positive definite even at the largest jitter."""


@dataclass(frozen=True)
class GpHyperparams:
    lengthscale: float
    signal_var: float
    jitter: float = JITTER

    def __post_init__(self):
        if self.lengthscale <= 0 or self.signal_var <= 0:
            raise ValueError("lengthscale and signal_var must be > 0")
        if not 1e-10 <= self.jitter <= MAX_JITTER:
            raise ValueError(f"jitter {self.jitter} outside [1e-10, {MAX_JITTER}]")


@dataclass(frozen=True, eq=False)
class GpModel:
    inputs: np.ndarray
    targets: np.ndarray
    hyper: GpHyperparams
    factor: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.targets)


def _distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    diff = A[:, None, :] - B[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def _matern_of_r(r, lengthscale: float, signal_var: float):
    s = SQRT5 * np.asarray(r) / lengthscale
    return signal_var * (1.0 + s + s * s / 3.0) * np.exp(-s)


def matern52(x, y, hyper: GpHyperparams) -> float:
    r = float(np.linalg.norm(np.asarray(x, float) - np.asarray(y, float)))
    return float(_matern_of_r(r, hyper.lengthscale, hyper.signal_var))


def kernel_matrix(A, B, hyper: GpHyperparams) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, float))
    B = np.atleast_2d(np.asarray(B, float))
    return _matern_of_r(_distances(A, B), hyper.lengthscale, hyper.signal_var)


def _factorize(K: np.ndarray, jitter: float) -> tuple[np.ndarray, float]:
    """Cholesky of ``K + jitter I``, raising the jitter x10 on failure."""
    n = K.shape[0]
    j = jitter
    while j <= MAX_JITTER * (1 + 1e-9):
        try:
            return cholesky(K + j * np.eye(n), lower=True), j
        except np.linalg.LinAlgError:
            j *= 10.0
    raise SingularGram(f"Gram matrix not positive definite at jitter {MAX_JITTER}")


def log_marginal_likelihood(X, y, hyper: GpHyperparams) -> float:
    X = np.atleast_2d(np.asarray(X, float))
    y = np.asarray(y, float)
    K = kernel_matrix(X, X, hyper)
    try:
        L, _ = _factorize(K, hyper.jitter)
    except SingularGram:
        return -math.inf
    a = cho_solve((L, True), y)
    return float(-0.5 * y @ a - np.sum(np.log(np.diag(L))) - 0.5 * len(y) * LOG_2PI)


def dedupe(X, y) -> tuple[np.ndarray, np.ndarray]:
    """Merge exact duplicate inputs, keeping the latest target, first-seen order."""
    X = np.atleast_2d(np.asarray(X, float))
    y = np.asarray(y, float)
    latest: dict[tuple[float, ...], int] = {}
    order: list[tuple[float, ...]] = []
    for i, row in enumerate(map(tuple, X)):
        if row not in latest:
            order.append(row)
        latest[row] = i
    keep = [latest[row] for row in order]
    return X[keep], y[keep]


def _grid_lml(X, y, lengthscales, signal_vars, jitter) -> np.ndarray:
    """LML over the full (lengthscale, signal_var) grid, one eigh per lengthscale."""
    n = len(y)
    D = _distances(X, X)
    out = np.full((len(lengthscales), len(signal_vars)), -np.inf)
    sv = np.asarray(signal_vars)[:, None]
    for i, ls in enumerate(lengthscales):
        lam, Q = np.linalg.eigh(_matern_of_r(D, ls, 1.0))
        proj2 = (Q.T @ y) ** 2
        ev = sv * lam[None, :] + jitter
        ok = np.all(ev > 0, axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            lml = -0.5 * np.sum(proj2 / ev, axis=1) - 0.5 * np.sum(np.log(ev), axis=1) \
                - 0.5 * n * LOG_2PI
        out[i] = np.where(ok, lml, -np.inf)
    return out


def _build(X, y, hyper: GpHyperparams) -> GpModel:
    K = kernel_matrix(X, X, hyper)
    L, j = _factorize(K, hyper.jitter)
    if j != hyper.jitter:
        hyper = GpHyperparams(hyper.lengthscale, hyper.signal_var, j)
    alpha = cho_solve((L, True), y)
    return GpModel(inputs=X, targets=y, hyper=hyper, factor=L, alpha=alpha)


def fit(X, y, lengthscale_bounds=LENGTHSCALE_BOUNDS, signal_var_bounds=SIGNAL_VAR_BOUNDS,
        grid_size: int = GRID_SIZE, sweeps: int = 2, jitter: float = JITTER) -> GpModel:
    """Fit a GP to ``(X, y)`` by marginal-likelihood maximization.

    Duplicate inputs are merged first (latest target wins).  With a single
    observation the likelihood carries no lengthscale information, so the
    geometric midpoint of both bounds is returned.

    Raises
    ------
    SingularGram
        If the Gram matrix cannot be factorized even at jitter 1e-4.
    """
    X, y = dedupe(X, y)
    if len(y) == 0:
        raise ValueError("need at least one observation")
    if not np.all(np.isfinite(y)):
        raise ValueError("targets must be finite")
    lo_l, hi_l = (math.log(b) for b in lengthscale_bounds)
    lo_s, hi_s = (math.log(b) for b in signal_var_bounds)
    if len(y) == 1:
        hyper = GpHyperparams(math.exp(0.5 * (lo_l + hi_l)), math.exp(0.5 * (lo_s + hi_s)), jitter)
        return _build(X, y, hyper)

    log_ls = np.linspace(lo_l, hi_l, grid_size)
    log_sv = np.linspace(lo_s, hi_s, grid_size)
    grid = _grid_lml(X, y, np.exp(log_ls), np.exp(log_sv), jitter)
    i, k = np.unravel_index(int(np.argmax(grid)), grid.shape)
    best = [float(log_ls[i]), float(log_sv[k])]

    def objective(value, coord):
        trial = list(best)
        trial[coord] = value
        h = GpHyperparams(math.exp(trial[0]), math.exp(trial[1]), jitter)
        return -log_marginal_likelihood(X, y, h)

    best_val = objective(best[0], 0)
    steps = (log_ls[1] - log_ls[0], log_sv[1] - log_sv[0])
    bounds = ((lo_l, hi_l), (lo_s, hi_s))
    for _ in range(sweeps):
        for coord in (0, 1):
            lo = max(bounds[coord][0], best[coord] - steps[coord])
            hi = min(bounds[coord][1], best[coord] + steps[coord])
            res = minimize_scalar(objective, bounds=(lo, hi), args=(coord,),
                                  method="bounded", options={"xatol": 1e-4})
            if res.fun < best_val:
                best[coord] = float(res.x)
                best_val = float(res.fun)
    hyper = GpHyperparams(math.exp(best[0]), math.exp(best[1]), jitter)
    return _build(X, y, hyper)


def posterior(model: GpModel, x) -> tuple:
    """Posterior mean and variance at one point or a batch of points.

    A single point (shape ``(2,)``) returns floats; a batch ``(m, 2)``
    returns two arrays.  Variances are clamped at zero.
    """
    x = np.asarray(x, float)
    single = x.ndim == 1
    Xq = np.atleast_2d(x)
    Ks = kernel_matrix(Xq, model.inputs, model.hyper)
    mean = Ks @ model.alpha
    v = solve_triangular(model.factor, Ks.T, lower=True)
    var = np.maximum(model.hyper.signal_var - np.sum(v * v, axis=0), 0.0)
    if single:
        return float(mean[0]), float(var[0])
    return mean, var


def posterior_mean_grad(model: GpModel, x) -> np.ndarray:
    """Analytic gradient of the posterior mean, shape ``(2,)`` or ``(m, 2)``."""
    x = np.asarray(x, float)
    single = x.ndim == 1
    Xq = np.atleast_2d(x)
    diff = Xq[:, None, :] - model.inputs[None, :, :]
    r = np.sqrt(np.sum(diff * diff, axis=-1))
    ls, sv = model.hyper.lengthscale, model.hyper.signal_var
    s = SQRT5 * r / ls
    # dk/dx = -sv * 5/(3 ls^2) * (1 + s) * exp(-s) * (x - x_i); zero at r = 0
    w = -sv * (5.0 / (3.0 * ls * ls)) * (1.0 + s) * np.exp(-s)
    grad = np.einsum("mn,mnd->md", w * model.alpha[None, :], diff)
    return grad[0] if single else grad
