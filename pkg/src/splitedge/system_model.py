"""Analytic wireless and compute cost model for split inference.

Maps a split configuration (layer index, transmit power) plus a scalar
channel power gain to the device/server compute delays, the uplink
transmission delay and the device-side energies, and decides feasibility
against an energy/delay budget.  Everything here is a pure function.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = [
    "ZeroRate",
    "SplitConfig",
    "LayerProfile",
    "DeviceSpec",
    "ServerSpec",
    "RadioSpec",
    "Budget",
    "CostBreakdown",
    "dbm_per_hz_to_watts_per_hz",
    "achievable_rate",
    "transmission_delay",
    "transmission_energy",
    "local_compute_energy",
    "compute_delays",
    "evaluate_cost",
    "load_profile",
    "write_profile",
]


class ZeroRate(ArithmeticError):
    """The uplink rate is zero, so the activation can never be sent."""


@dataclass(frozen=True)
class SplitConfig:
    """Decision vector: last on-device layer (1-based) and transmit power in W."""

    layer: int
    power_w: float

    def validate(self, n_layers: int, p_min_w: float, p_max_w: float) -> None:
        if not 1 <= self.layer <= n_layers:
            raise ValueError(f"layer {self.layer} outside 1..{n_layers}")
        if not p_min_w <= self.power_w <= p_max_w:
            raise ValueError(
                f"power {self.power_w} W outside [{p_min_w}, {p_max_w}]")


@dataclass(frozen=True)
class LayerProfile:
    """Per-layer compute load (MACs) and output payload size (bits).

    Index ``i`` of ``macs``/``activation_bits`` holds layer ``i + 1``.
    """

    macs: tuple[float, ...]
    activation_bits: tuple[float, ...]
    input_bits: float
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "macs", tuple(float(m) for m in self.macs))
        object.__setattr__(self, "activation_bits",
                           tuple(float(b) for b in self.activation_bits))
        if len(self.macs) < 1 or len(self.macs) != len(self.activation_bits):
            raise ValueError("macs and activation_bits must have equal length >= 1")
        if any(m < 0 for m in self.macs) or any(b <= 0 for b in self.activation_bits):
            raise ValueError("layer loads must be >= 0 and payloads > 0")
        if self.input_bits <= 0:
            raise ValueError("input_bits must be > 0")

    @property
    def n_layers(self) -> int:
        return len(self.macs)

    def payload_bits(self, layer: int) -> float:
        return self.activation_bits[layer - 1]


@dataclass(frozen=True)
class DeviceSpec:
    freq_hz: float = 1.8e9
    kappa: float = 1e-29
    eta: float = 1.0
    p_min_w: float = 0.1
    p_max_w: float = 0.5

    def __post_init__(self):
        if min(self.freq_hz, self.kappa, self.eta, self.p_min_w, self.p_max_w) <= 0:
            raise ValueError("device parameters must be strictly positive")
        if self.p_min_w >= self.p_max_w:
            raise ValueError("p_min_w must be < p_max_w")


@dataclass(frozen=True)
class ServerSpec:
    freq_hz: float = 4.5e9
    eta: float = 1.0

    def __post_init__(self):
        if self.freq_hz <= 0 or self.eta <= 0:
            raise ValueError("server parameters must be strictly positive")


@dataclass(frozen=True)
class RadioSpec:
    bandwidth_hz: float = 240_000 * 256 * 0.8
    noise_psd_dbm_hz: float = -147.0

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be > 0")

    @property
    def noise_power_w(self) -> float:
        """Total in-band noise power N0 * B in watts."""
        return dbm_per_hz_to_watts_per_hz(self.noise_psd_dbm_hz) * self.bandwidth_hz


@dataclass(frozen=True)
class Budget:
    e_max_j: float = 5.0
    tau_max_s: float = 5.0

    def __post_init__(self):
        if self.e_max_j <= 0 or self.tau_max_s <= 0:
            raise ValueError("budgets must be strictly positive")


@dataclass(frozen=True)
class CostBreakdown:
    e_compute_j: float
    e_transmit_j: float
    tau_device_s: float
    tau_transmit_s: float
    tau_server_s: float
    feasible: bool

    @property
    def energy_j(self) -> float:
        return self.e_compute_j + self.e_transmit_j

    @property
    def delay_s(self) -> float:
        return self.tau_device_s + self.tau_transmit_s + self.tau_server_s

    def energy_excess(self, budget: Budget) -> float:
        return max(0.0, self.energy_j - budget.e_max_j)

    def delay_excess(self, budget: Budget) -> float:
        return max(0.0, self.delay_s - budget.tau_max_s)


def dbm_per_hz_to_watts_per_hz(dbm_hz: float) -> float:
    return 10.0 ** ((dbm_hz - 30.0) / 10.0)


def achievable_rate(power_w: float, gain_linear: float, radio: RadioSpec) -> float:
    """Shannon rate ``B log2(1 + P |h|^2 / (N0 B))`` in bits/s."""
    if power_w < 0 or gain_linear < 0:
        raise ValueError("power and gain must be nonnegative")
    received = power_w * gain_linear
    if received == 0.0:
        return 0.0
    return radio.bandwidth_hz * math.log2(1.0 + received / radio.noise_power_w)


def transmission_delay(config: SplitConfig, gain_linear: float,
                       profile: LayerProfile, radio: RadioSpec) -> float:
    rate = achievable_rate(config.power_w, gain_linear, radio)
    if rate <= 0.0:
        raise ZeroRate(f"zero uplink rate at P={config.power_w} W, gain={gain_linear}")
    return profile.payload_bits(config.layer) / rate


def transmission_energy(config: SplitConfig, tau_transmit_s: float) -> float:
    # radiated energy over the airtime
    if tau_transmit_s < 0:
        raise ValueError("tau_transmit_s must be >= 0")
    return config.power_w * tau_transmit_s


def local_compute_energy(config: SplitConfig, profile: LayerProfile,
                         device: DeviceSpec) -> float:
    local = sum(profile.macs[:config.layer])
    return device.kappa * local * device.freq_hz ** 2


def compute_delays(config: SplitConfig, profile: LayerProfile, device: DeviceSpec,
                   server: ServerSpec) -> tuple[float, float]:
    """Return ``(tau_device_s, tau_server_s)`` for the layer split."""
    local = sum(profile.macs[:config.layer])
    remote = sum(profile.macs[config.layer:])
    return (local / (device.freq_hz * device.eta),
            remote / (server.freq_hz * server.eta))


def evaluate_cost(config: SplitConfig, gain_linear: float, profile: LayerProfile,
                  device: DeviceSpec, server: ServerSpec, radio: RadioSpec,
                  budget: Budget) -> CostBreakdown:
    """Assemble the full cost breakdown and the feasibility flag.

    A zero uplink rate is absorbed: the transmission delay is recorded as
    ``inf`` and the configuration is infeasible.
    """
    e_c = local_compute_energy(config, profile, device)
    tau_d, tau_s = compute_delays(config, profile, device, server)
    try:
        tau_t = transmission_delay(config, gain_linear, profile, radio)
    except ZeroRate:
        tau_t = math.inf
    e_t = transmission_energy(config, tau_t) if math.isfinite(tau_t) else math.inf
    if config.power_w == 0.0:
        e_t = 0.0
    feasible = (e_c + e_t <= budget.e_max_j) and (tau_d + tau_t + tau_s <= budget.tau_max_s)
    return CostBreakdown(e_compute_j=e_c, e_transmit_j=e_t, tau_device_s=tau_d,
                         tau_transmit_s=tau_t, tau_server_s=tau_s, feasible=bool(feasible))


def load_profile(path: str | Path) -> LayerProfile:
    """Read a layer profile CSV.

    Header ``layer_index,macs,activation_bits``; an optional trailing
    ``name`` column is kept.  The row with ``layer_index == 0`` carries the
    raw input size in its ``activation_bits`` column; rows 1..L follow.
    """
    rows: dict[int, tuple[float, float, str | None]] = {}
    input_bits = None
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"layer_index", "macs", "activation_bits"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for rec in reader:
            idx = int(rec["layer_index"])
            if idx == 0:
                input_bits = float(rec["activation_bits"])
                continue
            if idx in rows:
                raise ValueError(f"{path}: duplicate layer {idx}")
            rows[idx] = (float(rec["macs"]), float(rec["activation_bits"]), rec.get("name"))
    if input_bits is None:
        raise ValueError(f"{path}: no input row (layer_index 0)")
    n = len(rows)
    if sorted(rows) != list(range(1, n + 1)):
        raise ValueError(f"{path}: layer indices must be 1..{n}")
    ordered = [rows[i] for i in range(1, n + 1)]
    names = tuple(r[2] for r in ordered) if all(r[2] for r in ordered) else None
    return LayerProfile(macs=tuple(r[0] for r in ordered),
                        activation_bits=tuple(r[1] for r in ordered),
                        input_bits=input_bits, names=names)


def write_profile(profile: LayerProfile, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["layer_index", "macs", "activation_bits"]
        if profile.names:
            header.append("name")
        writer.writerow(header)
        first = [0, 0, repr(float(profile.input_bits))]
        writer.writerow(first + (["input"] if profile.names else []))
        for i, (m, b) in enumerate(zip(profile.macs, profile.activation_bits), start=1):
            row = [i, repr(m), repr(b)]
            if profile.names:
                row.append(profile.names[i - 1])
            writer.writerow(row)


def cost_arrays(layers: Sequence[int], powers: np.ndarray, gain_linear: float,
                profile: LayerProfile, device: DeviceSpec, server: ServerSpec,
                radio: RadioSpec) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized total energy and delay over a (layer, power) candidate list.

    ``layers`` and ``powers`` are broadcast elementwise.  Used for scoring
    acquisition candidates; agrees with :func:`evaluate_cost` to rounding.
    """
    layers = np.asarray(layers, dtype=int)
    powers = np.asarray(powers, dtype=float)
    cum = np.concatenate([[0.0], np.cumsum(profile.macs)])
    total = cum[-1]
    local = cum[layers]
    e_c = device.kappa * local * device.freq_hz ** 2
    tau_d = local / (device.freq_hz * device.eta)
    tau_s = (total - local) / (server.freq_hz * server.eta)
    payload = np.asarray(profile.activation_bits)[layers - 1]
    snr = powers * gain_linear / radio.noise_power_w
    rate = radio.bandwidth_hz * np.log2(1.0 + snr)
    with np.errstate(divide="ignore", invalid="ignore"):
        tau_t = np.where(rate > 0, payload / np.where(rate > 0, rate, 1.0), np.inf)
        e_t = np.where(powers > 0, powers * tau_t, 0.0)
    return e_c + e_t, tau_d + tau_t + tau_s
