"""Bundled benchmark: VGG19-shaped profile, accuracy surface, outdoor-like trace.

The data files under ``splitedge/data`` are generated by the builders
here (``python -m splitedge.bundled`` rewrites them).  Layers follow the
37 modules of the VGG19 feature extractor (conv/ReLU/pool); the
classifier head is folded into the last layer.  Activations are FP32.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .channel import ChannelTrace, load_trace, synth_trace, write_trace
from .problem import Problem
from .system_model import (Budget, DeviceSpec, LayerProfile, RadioSpec, ServerSpec,
                           load_profile, write_profile)
from .utility import UtilitySurface, load_surface, write_surface

__all__ = [
    "OPTIMUM_LAYER",
    "OPTIMUM_ACCURACY",
    "PLATEAU_ACCURACY",
    "vgg19_synthetic_profile",
    "default_surface",
    "default_trace",
    "data_path",
    "default_problem",
    "DEFAULT_DEVICE",
    "DEFAULT_SERVER",
    "DEFAULT_RADIO",
    "DEFAULT_BUDGET",
]

OPTIMUM_LAYER = 7
OPTIMUM_ACCURACY = 0.875
PLATEAU_ACCURACY = 0.84375

VGG19_CFG = (64, 64, "M", 128, 128, "M", 256, 256, 256, 256, "M",
             512, 512, 512, 512, "M", 512, 512, 512, 512, "M")
BITS_PER_VALUE = 32

DEFAULT_DEVICE = DeviceSpec(freq_hz=1.8e9, kappa=1e-29, eta=1.0, p_min_w=0.1, p_max_w=0.5)
# 10 cores at 4.5 GHz
DEFAULT_SERVER = ServerSpec(freq_hz=4.5e9, eta=10.0)
DEFAULT_RADIO = RadioSpec(bandwidth_hz=240_000 * 256 * 0.8, noise_psd_dbm_hz=-147.0)
DEFAULT_BUDGET = Budget(e_max_j=5.0, tau_max_s=5.0)

TRACE_FRAMES = 45
TRACE_MEAN_DB = -101.5


def vgg19_synthetic_profile(resolution: int = 224, channels: int = 3,
                            classes: int = 1000) -> LayerProfile:
    h, c = resolution, channels
    names, macs, bits = [], [], []
    block, idx = 1, 1
    for v in VGG19_CFG:
        if v == "M":
            h //= 2
            names.append(f"pool{block}")
            macs.append(h * h * c * 4)
            bits.append(h * h * c * BITS_PER_VALUE)
            block, idx = block + 1, 1
            continue
        names.append(f"conv{block}_{idx}")
        macs.append(h * h * v * c * 9)
        bits.append(h * h * v * BITS_PER_VALUE)
        c = v
        names.append(f"relu{block}_{idx}")
        macs.append(h * h * c)
        bits.append(h * h * c * BITS_PER_VALUE)
        idx += 1
    # classifier head rides on the last layer: 25088-4096-4096-classes
    flat = h * h * c
    macs[-1] += flat * 4096 + 4096 * 4096 + 4096 * classes
    bits[-1] = classes * BITS_PER_VALUE
    names[-1] = "pool5+classifier"
    return LayerProfile(tuple(float(m) for m in macs), tuple(float(b) for b in bits),
                        input_bits=float(resolution * resolution * channels * BITS_PER_VALUE),
                        names=tuple(names))


def default_surface(n_layers: int = 37, truncation_penalty_per_layer: float = 0.03,
                    floor: float = 0.01) -> UtilitySurface:
    acc = [PLATEAU_ACCURACY] * n_layers
    acc[OPTIMUM_LAYER - 1] = OPTIMUM_ACCURACY
    return UtilitySurface(tuple(acc), truncation_penalty_per_layer, floor)


def default_trace(seed: int = 2025) -> ChannelTrace:
    """45 outdoor-like frames: 2 dB shadowing, 15% blockage costing 8 dB.

    Frame 0 is the unblocked reference at exactly the mean gain, -101.5 dB,
    where layer 7 first becomes feasible at about 0.38 W.
    """
    synth = synth_trace(TRACE_FRAMES - 1, TRACE_MEAN_DB, fading_scale_db=2.0,
                        blockage_prob=0.15, blockage_extra_db=8.0, seed=seed)
    return ChannelTrace((TRACE_MEAN_DB,) + synth.gains_db, source="synthetic", seed=seed)


def data_path(name: str) -> Path:
    return Path(str(resources.files("splitedge") / "data" / name))


PROFILE_FILE = "profiles/vgg19_synthetic.csv"
SURFACE_FILE = "surfaces/vgg19_synthetic.csv"
TRACE_FILE = "traces/outdoor_synthetic.csv"


def default_problem(channel_mode: str = "frozen", frame: int = 0) -> Problem:
    """The bundled benchmark, read from the packaged data files."""
    return Problem(profile=load_profile(data_path(PROFILE_FILE)), device=DEFAULT_DEVICE,
                   server=DEFAULT_SERVER, radio=DEFAULT_RADIO, budget=DEFAULT_BUDGET,
                   surface=load_surface(data_path(SURFACE_FILE)),
                   trace=load_trace(data_path(TRACE_FILE)),
                   channel_mode=channel_mode, frame=frame)


def write_bundled_data(root: str | Path) -> None:
    root = Path(root)
    for sub in ("profiles", "surfaces", "traces"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    write_profile(vgg19_synthetic_profile(), root / PROFILE_FILE)
    write_surface(default_surface(), root / SURFACE_FILE)
    write_trace(default_trace(), root / TRACE_FILE)


if __name__ == "__main__":
    write_bundled_data(Path(__file__).parent / "data")
