"""Command line: ``splitedge {run,compare,profile,regret}``.

Exit status is 0 on success, 2 when a run observed no feasible
configuration (outputs are still written), and 1 on configuration, usage
or I/O errors.  ``compare`` treats baseline failures as table entries and
returns 2 only when the Bayesian optimizer itself found nothing feasible.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ALGORITHMS, ConfigError, config_from_dict
from .harness import profile_sweep, run_experiment, worker_count, write_profile_csv

EXIT_OK, EXIT_ERROR, EXIT_NO_FEASIBLE = 0, 1, 2

SYNTH_KEYS = {"n_frames": int, "mean_gain_db": float, "fading_scale_db": float,
              "blockage_prob": float, "blockage_extra_db": float, "seed": int}


def _synth(text: str) -> dict:
    """``key=value,...`` over the synthetic trace parameters."""
    out = {}
    for item in filter(None, text.split(",")):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in SYNTH_KEYS:
            raise ConfigError(f"--synth-channel expects key=value with keys {sorted(SYNTH_KEYS)}")
        try:
            out[key] = SYNTH_KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"--synth-channel {key}: {value!r}") from exc
    out.setdefault("n_frames", 45)
    out.setdefault("mean_gain_db", -101.5)
    return out


def _algos(text: str) -> list[str]:
    algos = [a.strip() for a in text.split(",") if a.strip()]
    bad = [a for a in algos if a not in ALGORITHMS]
    if bad or not algos:
        raise ConfigError(f"unknown --algo {bad}; choose from {','.join(ALGORITHMS)}")
    return algos


class _Parser(argparse.ArgumentParser):
    # argparse's own status 2 would read as "no feasible configuration"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--profile", type=Path, help="layer profile CSV")
    common.add_argument("--surface", type=Path, help="accuracy surface CSV")
    common.add_argument("--trace", type=Path, help="channel trace CSV (frame,gain_db)")
    common.add_argument("--synth-channel", metavar="K=V,...",
                        help="synthesize the trace instead, e.g. "
                             "mean_gain_db=-101.5,fading_scale_db=2,seed=3")
    common.add_argument("--channel-mode", choices=("frozen", "advance"))
    common.add_argument("--out", type=Path, default=Path("results"), help="output directory")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seeds", help="seed range a..b (inclusive) or comma list")

    p = _Parser(prog="splitedge", description="Split-layer and transmit-power "
                                "optimization on a synthetic edge-inference benchmark.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common, seeded], help="run one or more optimizers")
    run.add_argument("--algo", default="bayes", help="comma list, default bayes")
    cmp_ = sub.add_parser("compare", parents=[common, seeded],
                          help="full comparison table with per-run and regret CSVs")
    cmp_.add_argument("--algo", help="comma list, default every algorithm")
    reg = sub.add_parser("regret", parents=[common, seeded],
                         help="regret curves of the BO variants")
    reg.add_argument("--algo", default="bayes,basic-bo")
    prof = sub.add_parser("profile", parents=[common], help="per-layer delay/energy sweep")
    prof.add_argument("--power", type=float, help="transmit power in W (default P_max)")
    return p


def _config(args) -> tuple[dict, Path]:
    data, root = {}, Path.cwd()
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: invalid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        root = args.config.resolve().parent
    for key in ("profile", "surface", "trace"):
        value = getattr(args, key)
        if value is not None:
            data[key] = str(value.resolve())
    if args.trace is not None:
        data.pop("synth_channel", None)
    if args.synth_channel is not None:
        data["synth_channel"] = _synth(args.synth_channel)
    if args.channel_mode is not None:
        data["channel_mode"] = args.channel_mode
    if getattr(args, "seeds", None) is not None:
        data["seeds"] = args.seeds
    if getattr(args, "algo", None) is not None:
        data["algorithms"] = _algos(args.algo)
    return data, root


def _print_summary(result) -> None:
    print(f"{'algorithm':<15}{'seed':>5}{'evals':>7}{'layer':>6}{'power_w':>9}"
          f"{'utility':>9}{'energy_j':>10}{'delay_s':>9}")
    for r in result.results:
        rec = r.record
        seed = "" if r.job.seed is None else r.job.seed
        if rec is None or not rec.found_feasible:
            evals = 0 if rec is None else rec.evaluations
            print(f"{r.job.algorithm:<15}{seed:>5}{evals:>7}   no feasible configuration")
            continue
        c = rec.best_cost
        print(f"{r.job.algorithm:<15}{seed:>5}{rec.evaluations:>7}{rec.best_config.layer:>6}"
              f"{rec.best_config.power_w:>9.3f}{rec.best_utility:>9.4f}{c.energy_j:>10.3f}"
              f"{c.delay_s:>9.3f}")


def _print_regret(result) -> None:
    for algo, curves in result.regret.items():
        exps = np.array([c.exponent for c in curves])
        print(f"{algo}: mean regret exponent {np.nanmean(exps):.3f} over {len(curves)} runs")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        data, root = _config(args)
        if args.command == "profile":
            data.pop("algorithms", None)
            cfg = config_from_dict(data, root)
            rows = profile_sweep(cfg.problem, args.power)
            args.out.mkdir(parents=True, exist_ok=True)
            write_profile_csv(rows, args.out / "profile.csv")
            for r in rows:
                print(f"{r['layer']:>3} {r['name']:<18} tau_t={r['tau_transmit_s_mean']:.4g}s "
                      f"tau_dev={r['tau_device_s_mean']:.4g}s E_c={r['e_compute_j_mean']:.4g}J")
            return EXIT_OK
        if args.command == "compare" and args.algo is None:
            data.setdefault("algorithms", list(ALGORITHMS))
        cfg = config_from_dict(data, root)
        result = run_experiment(cfg, args.out, threads=worker_count())
    except (ConfigError, ValueError) as exc:
        print(f"splitedge: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"splitedge: I/O error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _print_summary(result)
    if args.command == "regret":
        _print_regret(result)
    failed = [r for r in result.results if r.status != "ok"]
    if args.command == "compare":
        failed = [r for r in failed if r.job.algorithm == "bayes"]
    if failed:
        print("splitedge: some runs found no feasible configuration", file=sys.stderr)
        return EXIT_NO_FEASIBLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
