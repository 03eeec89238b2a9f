"""JSON run configuration.

Every key is optional; omitted keys take the bundled defaults.  Schema::

    {
      "profile": "path.csv",            # layer profile, default bundled VGG19 shape
      "surface": "path.csv",            # accuracy surface, default bundled
      "trace": "path.csv",              # channel trace, default bundled outdoor trace
      "synth_channel": {                # replaces "trace" when present
        "n_frames": 45, "mean_gain_db": -101.5, "fading_scale_db": 2.0,
        "blockage_prob": 0.15, "blockage_extra_db": 8.0, "seed": 0
      },
      "channel_mode": "frozen",         # or "advance"
      "frame": 0,
      "truncation_penalty_per_layer": 0.03,
      "floor": 0.01,
      "device": {"freq_hz": .., "kappa": .., "eta": .., "p_min_w": .., "p_max_w": ..},
      "server": {"freq_hz": .., "eta": ..},
      "radio": {"bandwidth_hz": .., "noise_psd_dbm_hz": ..},
      "budget": {"e_max_j": 5.0, "tau_max_s": 5.0},
      "run": {"n_init": 5, "budget": 20, "early_stop": 3, "init_jitter": 0.5,
              "power_levels": 64, "refine": true, "ei_form": "standard",
              "weights": {"base_start": 1.0, "base_end": 0.1, "grad_start": 0.05,
                          "grad_end": 0.005, "penalty": 10.0, "ucb_beta": 2.0}},
      "baselines": {"exhaustive": {"power_levels": 91},
                    "direct": {"max_evals": 100, "stall_window": 20},
                    "cma_es": {"pop": 10, "max_evals": 300, "stall": 20},
                    "random": {"n": 300},
                    "transmit_first": {"power_levels": 91},
                    "compute_first": {"power_levels": 91}},
      "algorithms": ["bayes", "basic-bo", ...],
      "seeds": [0, 1, 2] or "0..9"
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

from . import bundled
from .acquisition import AcquisitionWeights
from .baselines import BaselineSpec
from .channel import ChannelTrace, load_trace, synth_trace
from .optimizer import RunConfig
from .problem import Problem
from .system_model import Budget, DeviceSpec, RadioSpec, ServerSpec, load_profile
from .utility import load_surface

__all__ = [
    "ConfigError",
    "ALGORITHMS",
    "ExperimentConfig",
    "parse_seeds",
    "load_config",
    "config_from_dict",
]

# CLI name -> baseline kind (None for the hybrid optimizer), in comparison-table row order
ALGORITHMS = {
    "bayes": None,
    "basic-bo": "basic_bo",
    "exhaustive": "exhaustive",
    "direct": "direct",
    "cma-es": "cma_es",
    "random": "random",
    "transmit-first": "transmit_first",
    "compute-first": "compute_first",
}

TOP_KEYS = {"profile", "surface", "trace", "synth_channel", "channel_mode", "frame",
            "truncation_penalty_per_layer", "floor", "device", "server", "radio", "budget",
            "run", "baselines", "algorithms", "seeds"}


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    problem: Problem
    run: RunConfig = field(default_factory=RunConfig)
    baselines: Mapping[str, BaselineSpec] = field(default_factory=dict)
    algorithms: tuple[str, ...] = tuple(ALGORITHMS)
    seeds: tuple[int, ...] = tuple(range(10))

    def baseline(self, kind: str) -> BaselineSpec:
        return self.baselines.get(kind) or BaselineSpec(kind)


def parse_seeds(value) -> tuple[int, ...]:
    """``"a..b"`` (inclusive), ``"3"``, ``"1,4,7"`` or a list of ints."""
    try:
        if isinstance(value, int):
            seeds = (value,)
        elif isinstance(value, str):
            if ".." in value:
                a, b = value.split("..")
                seeds = tuple(range(int(a), int(b) + 1))
            else:
                seeds = tuple(int(s) for s in value.split(","))
        else:
            seeds = tuple(int(s) for s in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad seeds {value!r}") from exc
    if not seeds:
        raise ConfigError(f"empty seed range {value!r}")
    if any(s < 0 for s in seeds):
        raise ConfigError("seeds must be non-negative")
    return seeds


def _build(cls, data, base):
    if data is None:
        return base
    if not isinstance(data, Mapping):
        raise ConfigError(f"{cls.__name__} section must be an object")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    try:
        return replace(base, **data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{cls.__name__}: {exc}") from exc


def _trace(data: Mapping[str, Any], root: Path) -> ChannelTrace:
    synth = data.get("synth_channel")
    if synth is not None:
        if not isinstance(synth, Mapping):
            raise ConfigError("synth_channel must be an object")
        try:
            return synth_trace(**synth)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"synth_channel: {exc}") from exc
    path = data.get("trace")
    return load_trace(root / path) if path else load_trace(bundled.data_path(bundled.TRACE_FILE))


def config_from_dict(data: Mapping[str, Any], root: str | Path = ".") -> ExperimentConfig:
    """Build an :class:`ExperimentConfig`; relative paths resolve against ``root``.

    Raises
    ------
    ConfigError
        On unknown keys or invalid values.
    OSError
        When a referenced data file cannot be read.
    """
    if not isinstance(data, Mapping):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    root = Path(root)

    try:
        profile = load_profile(root / data["profile"]) if data.get("profile") else \
            load_profile(bundled.data_path(bundled.PROFILE_FILE))
        penalty = data.get("truncation_penalty_per_layer", 0.03)
        floor = data.get("floor", 0.01)
        surface_path = root / data["surface"] if data.get("surface") else \
            bundled.data_path(bundled.SURFACE_FILE)
        surface = load_surface(surface_path, penalty, floor)
        trace = _trace(data, root)
        problem = Problem(profile=profile,
                          device=_build(DeviceSpec, data.get("device"), bundled.DEFAULT_DEVICE),
                          server=_build(ServerSpec, data.get("server"), bundled.DEFAULT_SERVER),
                          radio=_build(RadioSpec, data.get("radio"), bundled.DEFAULT_RADIO),
                          budget=_build(Budget, data.get("budget"), bundled.DEFAULT_BUDGET),
                          surface=surface, trace=trace,
                          channel_mode=data.get("channel_mode", "frozen"),
                          frame=int(data.get("frame", 0)))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    run_data = dict(data.get("run") or {})
    weights = _build(AcquisitionWeights, run_data.pop("weights", None), AcquisitionWeights())
    if "powers_w" in run_data and run_data["powers_w"] is not None:
        run_data["powers_w"] = tuple(float(p) for p in run_data["powers_w"])
    run = _build(RunConfig, run_data, RunConfig(weights=weights))

    baselines = {}
    for kind, params in (data.get("baselines") or {}).items():
        if not isinstance(params, Mapping):
            raise ConfigError(f"baseline {kind!r} parameters must be an object")
        try:
            baselines[kind] = BaselineSpec(kind, dict(params))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    algorithms = tuple(data.get("algorithms", ALGORITHMS))
    bad = [a for a in algorithms if a not in ALGORITHMS]
    if bad or not algorithms:
        raise ConfigError(f"unknown algorithms {bad}; choose from {list(ALGORITHMS)}")
    seeds = parse_seeds(data.get("seeds", "0..9"))
    return ExperimentConfig(problem, run, baselines, algorithms, seeds)


def load_config(path: str | Path | None) -> ExperimentConfig:
    """Read a JSON config file; ``None`` gives the bundled defaults."""
    if path is None:
        return config_from_dict({})
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(data, root=path.parent)
