"""Experiment orchestration: seeded job pool, CSV outputs, profiling sweep.

Output layout of :func:`run_experiment` under ``out_dir``::

    runs/<algo>[_seed<k>].csv      one RunRecord per job (RECORD_COLUMNS)
    summary.csv                    one row per job, SUMMARY_COLUMNS
    regret/<algo>_seed<k>.csv      BO variants only, REGRET_COLUMNS
    regret_summary.csv             fitted exponent per BO run
    regret_mean.csv                per-iteration mean regret across seeds

Files are written from the calling thread in job order, so reruns are
byte-identical regardless of worker scheduling.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .baselines import exhaustive, run_baseline
from .config import ALGORITHMS, ConfigError, ExperimentConfig
from .optimizer import run as run_bayes
from .problem import NoFeasiblePoint, Problem, RunRecord, write_record_csv
from .regret import RegretCurve, compute_regret
from .system_model import SplitConfig, evaluate_cost

__all__ = [
    "SUMMARY_COLUMNS",
    "REGRET_COLUMNS",
    "PROFILE_METRICS",
    "SEEDED",
    "BO_VARIANTS",
    "Job",
    "JobResult",
    "ExperimentResult",
    "worker_count",
    "plan_jobs",
    "run_job",
    "run_jobs",
    "run_experiment",
    "profile_sweep",
    "write_profile_csv",
]

SUMMARY_COLUMNS = ("algorithm", "max_iterations", "split_layer", "power_w", "utility",
                   "energy_j", "delay_s", "seed", "status")
REGRET_COLUMNS = ("iter", "utility", "feasible", "instant", "simple", "cumulative", "mean")
PROFILE_METRICS = ("tau_transmit_s", "tau_device_s", "tau_server_s", "e_compute_j",
                   "e_transmit_j")
SEEDED = ("bayes", "basic-bo", "cma-es", "random")
BO_VARIANTS = ("bayes", "basic-bo")
THREADS_ENV = "SPLITEDGE_THREADS"


@dataclass(frozen=True)
class Job:
    algorithm: str
    seed: int | None = None

    @property
    def stem(self) -> str:
        return self.algorithm if self.seed is None else f"{self.algorithm}_seed{self.seed}"


@dataclass(frozen=True)
class JobResult:
    job: Job
    record: RunRecord | None

    @property
    def status(self) -> str:
        return "no_feasible" if self.record is None else self.record.status


@dataclass(frozen=True)
class ExperimentResult:
    results: tuple[JobResult, ...]
    optimum: float | None
    regret: dict

    @property
    def any_infeasible(self) -> bool:
        return any(r.status != "ok" for r in self.results)


def worker_count(env=None) -> int:
    """Pool size from ``SPLITEDGE_THREADS``, else the CPU count."""
    env = os.environ if env is None else env
    raw = env.get(THREADS_ENV)
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def plan_jobs(algorithms, seeds) -> list[Job]:
    """Jobs in comparison-table order; seed-free methods run once."""
    jobs = []
    for algo in ALGORITHMS:
        if algo not in algorithms:
            continue
        if algo in SEEDED:
            jobs.extend(Job(algo, s) for s in seeds)
        else:
            jobs.append(Job(algo))
    return jobs


def run_job(config: ExperimentConfig, job: Job) -> JobResult:
    kind = ALGORITHMS[job.algorithm]
    seed = 0 if job.seed is None else job.seed
    try:
        if kind is None:
            record = run_bayes(replace(config.run, seed=seed), config.problem)
        else:
            record = run_baseline(config.baseline(kind), config.problem, config.run, seed)
    except NoFeasiblePoint:
        # greedy scans that find nothing produce no record at all
        record = None
    return JobResult(job, record)


def run_jobs(config: ExperimentConfig, jobs, threads: int | None = None) -> list[JobResult]:
    threads = worker_count() if threads is None else threads
    if threads <= 1 or len(jobs) <= 1:
        return [run_job(config, j) for j in jobs]
    with ThreadPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
        return list(pool.map(lambda j: run_job(config, j), jobs))


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def _summary_row(result: JobResult) -> list[str]:
    rec, job = result.record, result.job
    seed = "" if job.seed is None else str(job.seed)
    if rec is None:
        return [job.algorithm, "0", "", "", "", "", "", seed, "no_feasible"]
    if not rec.found_feasible:
        return [job.algorithm, str(rec.evaluations), "", "", "", "", "", seed, rec.status]
    return [job.algorithm, str(rec.evaluations), str(rec.best_config.layer),
            _fmt(rec.best_config.power_w), _fmt(rec.best_utility), _fmt(rec.best_cost.energy_j),
            _fmt(rec.best_cost.delay_s), seed, rec.status]


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _regret_rows(record: RunRecord, curve: RegretCurve):
    for i, row in enumerate(record.rows):
        yield [row.iteration, _fmt(row.utility), int(row.feasible), _fmt(curve.instant[i]),
               _fmt(curve.simple[i]), _fmt(curve.cumulative[i]), _fmt(curve.mean[i])]


def _optimum(config: ExperimentConfig, results) -> float:
    # exhaustive's best, raised to any feasible value a continuous search hit
    # between its grid points
    best = None
    for r in results:
        if r.job.algorithm == "exhaustive" and r.record is not None:
            best = r.record.best_utility
    if best is None:
        spec = config.baseline("exhaustive")
        best = exhaustive(config.problem, **dict(spec.params)).best_utility
    seen = [r.record.best_utility for r in results
            if r.record is not None and r.record.found_feasible]
    return max([0.0 if best is None else best] + seen)


def run_experiment(config: ExperimentConfig, out_dir: str | Path,
                   threads: int | None = None) -> ExperimentResult:
    """Run every (algorithm, seed) job of ``config`` and write the CSV set.

    Regret files are produced only for the BO variants; their optimum is
    the exhaustive-search best on the same problem (or a higher feasible
    value observed off its power grid).

    Raises
    ------
    OSError
        If ``out_dir`` cannot be created or written.
    """
    out = Path(out_dir)
    (out / "runs").mkdir(parents=True, exist_ok=True)
    jobs = plan_jobs(config.algorithms, config.seeds)
    results = run_jobs(config, jobs, threads)

    for r in results:
        if r.record is not None:
            write_record_csv(r.record, out / "runs" / f"{r.job.stem}.csv")
    _write_csv(out / "summary.csv", SUMMARY_COLUMNS, [_summary_row(r) for r in results])

    regret: dict[str, list[RegretCurve]] = {}
    bo = [r for r in results if r.job.algorithm in BO_VARIANTS and r.record is not None]
    optimum = None
    if bo:
        optimum = _optimum(config, results)
        (out / "regret").mkdir(exist_ok=True)
        summary = []
        for r in bo:
            curve = compute_regret(r.record, optimum)
            regret.setdefault(r.job.algorithm, []).append(curve)
            _write_csv(out / "regret" / f"{r.job.stem}.csv", REGRET_COLUMNS,
                       _regret_rows(r.record, curve))
            summary.append([r.job.algorithm, r.job.seed, _fmt(curve.exponent),
                            _fmt(curve.cumulative[-1]), _fmt(curve.simple[-1])])
        _write_csv(out / "regret_summary.csv",
                   ("algorithm", "seed", "exponent", "final_cumulative", "final_simple"), summary)
        _write_csv(out / "regret_mean.csv", ("algorithm", "iter", "runs", "mean_regret",
                                             "mean_cumulative", "mean_simple"),
                   _mean_rows(regret))
    return ExperimentResult(tuple(results), optimum, regret)


def _mean_rows(regret: dict):
    for algo in BO_VARIANTS:
        curves = regret.get(algo, [])
        if not curves:
            continue
        longest = max(len(c.cumulative) for c in curves)
        for t in range(longest):
            have = [c for c in curves if len(c.cumulative) > t]
            yield [algo, t + 1, len(have),
                   _fmt(np.mean([c.mean[t] for c in have])),
                   _fmt(np.mean([c.cumulative[t] for c in have])),
                   _fmt(np.mean([c.simple[t] for c in have]))]


def profile_sweep(problem: Problem, power_w: float | None = None) -> list[dict]:
    """Per-layer mean/min/max of delay and energy terms over every trace frame.

    ``power_w`` defaults to the device maximum.  Returns one dict per layer
    with keys ``layer``, ``name`` and ``<metric>_{mean,min,max}`` for each
    of :data:`PROFILE_METRICS`.
    """
    p = problem.device.p_max_w if power_w is None else float(power_w)
    names = problem.profile.names or tuple(f"layer{i}" for i in range(1, problem.n_layers + 1))
    gains = [10.0 ** (g / 10.0) for g in problem.trace.gains_db]
    rows = []
    for layer in range(1, problem.n_layers + 1):
        cfg = SplitConfig(layer, p)
        vals = {m: [] for m in PROFILE_METRICS}
        for g in gains:
            c = evaluate_cost(cfg, g, problem.profile, problem.device, problem.server,
                              problem.radio, problem.budget)
            vals["tau_transmit_s"].append(c.tau_transmit_s)
            vals["tau_device_s"].append(c.tau_device_s)
            vals["tau_server_s"].append(c.tau_server_s)
            vals["e_compute_j"].append(c.e_compute_j)
            vals["e_transmit_j"].append(c.e_transmit_j)
        row = {"layer": layer, "name": names[layer - 1]}
        for m, v in vals.items():
            arr = np.asarray(v, float)
            row[f"{m}_mean"] = float(np.mean(arr)) if np.all(np.isfinite(arr)) else math.inf
            row[f"{m}_min"] = float(np.min(arr))
            row[f"{m}_max"] = float(np.max(arr))
        rows.append(row)
    return rows


def write_profile_csv(rows: list[dict], path: str | Path) -> None:
    header = ["layer", "name"] + [f"{m}_{s}" for m in PROFILE_METRICS
                                  for s in ("mean", "min", "max")]
    _write_csv(Path(path), header,
               ([r["layer"], r["name"]] + [_fmt(r[h]) for h in header[2:]] for r in rows))
