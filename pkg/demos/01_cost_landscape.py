"""Where is the bundled benchmark feasible?

Walks the analytic cost model over every (layer, power) pair at the first
trace frame and prints a feasibility map plus the per-layer delay terms.
Run with ``python demos/01_cost_landscape.py``.
"""

# %%
import numpy as np

from splitedge.bundled import default_problem
from splitedge.harness import profile_sweep
from splitedge.system_model import SplitConfig

prob = default_problem()
powers = prob.power_grid(9)
print(f"{prob.n_layers} layers, gain {prob.trace.gains_db[0]:.1f} dB at frame 0")

# %% feasibility map: '#' feasible, '.' over budget
print("layer  " + " ".join(f"{p:4.2f}" for p in powers))
for layer in range(1, 16):
    marks = ["  # " if prob.cost(SplitConfig(layer, float(p))).feasible else "  . " for p in powers]
    acc = prob.surface.base_accuracy[layer - 1]
    print(f"{layer:>5} " + " ".join(marks) + f"   acc {acc}")
deep = [l for l in range(16, prob.n_layers + 1)
        if any(prob.cost(SplitConfig(l, float(p))).feasible for p in powers)]
print(f"feasible layers beyond 15: {deep or 'none'}")

# %% delay breakdown at P_max, averaged over the whole trace
rows = profile_sweep(prob)
for r in rows[:14]:
    total = r["tau_transmit_s_mean"] + r["tau_device_s_mean"] + r["tau_server_s_mean"]
    print(f"{r['layer']:>3} {r['name']:<10} upload {r['tau_transmit_s_mean']:7.3f}s  "
          f"device {r['tau_device_s_mean']:6.3f}s  total {total:7.3f}s  "
          f"E {r['e_compute_j_mean'] + r['e_transmit_j_mean']:.3f} J")

# %% energy never binds here: the worst feasible-delay point is far below 5 J
layers = np.repeat(np.arange(1, prob.n_layers + 1), len(powers))
pw = np.tile(powers, prob.n_layers)
feas = [prob.cost(SplitConfig(int(l), float(p))).feasible for l, p in zip(layers, pw)]
energies = [prob.cost(SplitConfig(int(l), float(p))).energy_j
            for l, p, f in zip(layers, pw, feas) if f]
print(f"max energy among feasible points: {max(energies):.3f} J")
