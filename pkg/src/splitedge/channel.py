"""Per-task channel power gains: CSV trace replay or synthetic fading.

Synthetic traces use numpy's PCG64 bit generator (``np.random.Generator``
seeded with an integer), so a seed reproduces the same trace on any
platform for a given numpy release.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "ParseError",
    "EmptyTrace",
    "ChannelTrace",
    "db_to_linear",
    "linear_to_db",
    "load_trace",
    "write_trace",
    "synth_trace",
    "gain_at",
]


class ParseError(ValueError):
    pass


class EmptyTrace(ValueError):
    pass


def db_to_linear(gain_db):
    return 10.0 ** (np.asarray(gain_db, dtype=float) / 10.0) if np.ndim(gain_db) \
        else 10.0 ** (float(gain_db) / 10.0)


def linear_to_db(gain_linear):
    return 10.0 * np.log10(gain_linear)


@dataclass(frozen=True)
class ChannelTrace:
    gains_db: tuple[float, ...]
    source: str = "synthetic"
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "gains_db", tuple(float(g) for g in self.gains_db))
        if not self.gains_db:
            raise EmptyTrace("channel trace has no frames")
        if not all(math.isfinite(g) for g in self.gains_db):
            raise ValueError("channel gains must be finite")
        if self.source not in ("file", "synthetic"):
            raise ValueError(f"unknown trace source {self.source!r}")

    def __len__(self) -> int:
        return len(self.gains_db)


def gain_at(trace: ChannelTrace, task_index: int) -> float:
    """Linear power gain for a task; indices wrap around the trace."""
    return 10.0 ** (trace.gains_db[task_index % len(trace.gains_db)] / 10.0)


def load_trace(path: str | Path) -> ChannelTrace:
    """Read a ``frame,gain_db`` CSV; frames must be numbered 0..N-1 in order."""
    gains = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyTrace(f"{path}: empty file")
        if [h.strip() for h in header] != ["frame", "gain_db"]:
            raise ParseError(f"{path}: expected header 'frame,gain_db', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ParseError(f"{path}:{lineno}: expected 2 columns")
            try:
                frame, gain = int(row[0]), float(row[1])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
            if frame != len(gains):
                raise ParseError(f"{path}:{lineno}: frame {frame}, expected {len(gains)}")
            if not math.isfinite(gain):
                raise ParseError(f"{path}:{lineno}: non-finite gain")
            gains.append(gain)
    if not gains:
        raise EmptyTrace(f"{path}: no frames")
    return ChannelTrace(tuple(gains), source="file")


def write_trace(trace: ChannelTrace, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["frame", "gain_db"])
        for i, g in enumerate(trace.gains_db):
            writer.writerow([i, repr(g)])


def synth_trace(n_frames: int, mean_gain_db: float, fading_scale_db: float = 0.0,
                blockage_prob: float = 0.0, blockage_extra_db: float = 0.0,
                seed: int = 0) -> ChannelTrace:
    """Log-normal shadowing around a mean gain with random blockage drops.

    Frame ``i`` is ``mean + N(0, fading_scale_db) - B_i * blockage_extra_db``
    with ``B_i ~ Bernoulli(blockage_prob)``.  All normals are drawn first,
    then all blockage uniforms, so each stream is fixed by the seed.
    """
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    if not 0.0 <= blockage_prob <= 1.0:
        raise ValueError("blockage_prob must be in [0, 1]")
    rng = np.random.Generator(np.random.PCG64(seed))
    fading = rng.standard_normal(n_frames) * fading_scale_db
    blocked = rng.random(n_frames) < blockage_prob
    gains = mean_gain_db + fading - blocked * blockage_extra_db
    return ChannelTrace(tuple(float(g) for g in gains), source="synthetic", seed=seed)
