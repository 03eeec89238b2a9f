"""Random small split benchmarks shared by several test modules."""

from __future__ import annotations

import numpy as np

from splitedge.channel import ChannelTrace
from splitedge.problem import Problem
from splitedge.system_model import (Budget, DeviceSpec, LayerProfile, RadioSpec, ServerSpec,
                                    SplitConfig)
from splitedge.utility import UtilitySurface

RADIO = RadioSpec(bandwidth_hz=240_000 * 256 * 0.8, noise_psd_dbm_hz=-147.0)
DEVICE = DeviceSpec(freq_hz=1.8e9, kappa=1e-29, eta=1.0, p_min_w=0.1, p_max_w=0.5)
SERVER = ServerSpec(freq_hz=4.5e9, eta=10.0)


def small_problem(rng: np.random.Generator, max_layers: int = 10) -> Problem:
    """L <= max_layers, payloads shrinking with depth, one frozen gain near -100 dB."""
    L = int(rng.integers(3, max_layers + 1))
    macs = rng.uniform(1e8, 2.5e9, L)
    bits = np.sort(rng.uniform(2e6, 8e7, L))[::-1]
    profile = LayerProfile(tuple(macs), tuple(bits), input_bits=1.2e8)
    # unimodal in layer, like the bundled surface: random peak, width, plateau
    peak = int(rng.integers(1, L + 1))
    width = float(rng.uniform(1.0, 3.0))
    top, plateau = float(rng.uniform(0.8, 0.95)), float(rng.uniform(0.5, 0.75))
    layers = np.arange(1, L + 1)
    acc = (plateau + (top - plateau) * np.exp(-((layers - peak) / width) ** 2)).round(4)
    surface = UtilitySurface(tuple(acc), 0.03, 0.01)
    gain_db = float(rng.uniform(-102.0, -98.0))
    return Problem(profile, DEVICE, SERVER, RADIO, Budget(5.0, 5.0), surface,
                   ChannelTrace((gain_db,)))


def feasible_small_problem(rng: np.random.Generator, power_levels: int,
                           max_layers: int = 10) -> Problem:
    """Draw until at least one grid configuration is feasible."""
    while True:
        prob = small_problem(rng, max_layers)
        for layer in range(1, prob.n_layers + 1):
            for p in prob.power_grid(power_levels):
                if prob.cost(SplitConfig(layer, float(p))).feasible:
                    return prob


def toy_problem(acc, macs=None, bits=None, gain_db: float = -100.0) -> Problem:
    """Hand-built problem; defaults are cheap enough that everything is feasible."""
    L = len(acc)
    macs = (1e8,) * L if macs is None else tuple(macs)
    bits = (1e6,) * L if bits is None else tuple(bits)
    profile = LayerProfile(macs, bits, input_bits=1e6)
    return Problem(profile, DEVICE, SERVER, RADIO, Budget(5.0, 5.0),
                   UtilitySurface(tuple(acc), 0.03, 0.01), ChannelTrace((gain_db,)))
