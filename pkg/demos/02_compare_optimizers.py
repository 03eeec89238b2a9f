"""One pass of every optimizer on the bundled benchmark.

Prints a comparison table (evaluations, split, power, accuracy, energy,
delay) for a single seed.  ``splitedge compare`` does the same over a
seed range and writes CSVs.
"""

# %%
from splitedge.baselines import (basic_bo, cma_es, compute_first, direct_search, exhaustive,
                                 random_search, transmit_first)
from splitedge.bundled import default_problem
from splitedge.optimizer import RunConfig, run

prob = default_problem()
seed = 0
records = [
    run(RunConfig(seed=seed), prob),
    basic_bo(prob, RunConfig(seed=seed)),
    exhaustive(prob),
    direct_search(prob),
    cma_es(prob, seed=seed),
    random_search(prob, seed=seed),
    transmit_first(prob),
    compute_first(prob),
]

# %%
print(f"{'method':<18}{'evals':>6}{'layer':>6}{'power':>7}{'acc':>9}{'E [J]':>8}{'tau [s]':>8}")
for rec in records:
    if not rec.found_feasible:
        print(f"{rec.algorithm:<18}{rec.evaluations:>6}   nothing feasible")
        continue
    c = rec.best_cost
    print(f"{rec.algorithm:<18}{rec.evaluations:>6}{rec.best_config.layer:>6}"
          f"{rec.best_config.power_w:>7.3f}{rec.best_utility:>9.5f}{c.energy_j:>8.3f}"
          f"{c.delay_s:>8.3f}")

# %% how quickly the hybrid got there
hybrid = records[0]
print("best-so-far:", [round(r.best_so_far, 4) for r in hybrid.rows])
print("first hit of 0.875 at evaluation", hybrid.convergence_iteration(0.875))
