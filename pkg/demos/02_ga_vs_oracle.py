"""Solve one small synthetic instance twice: exhaustively and with the GA."""

import time

from hubnet import Constraints, GaConfig, brute_force_solve, generate, make_problem, run_ga

sites, flows = generate(12, 3, seed=1004, profile="peak")
problem = make_problem(sites, flows, Constraints(hub_count_min=2, hub_count_max=4))

t = time.time()
design, best = brute_force_solve(problem)
print(f"oracle: hubs {design.open_hubs}  total {best.total:,.2f}  ({time.time() - t:.2f}s)")

for seed in range(5):
    t = time.time()
    r = run_ga(problem, GaConfig(population_size=100, generations=200, rng_seed=seed))
    gap = 100 * (r.best_cost.total / best.total - 1)
    print(f"GA seed {seed}: hubs {r.best_design.open_hubs}  gap {gap:5.2f}%  "
          f"gens {r.generations_run}  ({time.time() - t:.2f}s)")

# The history holds (best, mean) fitness per generation; the best never rises.
print("best fitness, first 10 generations:", [round(b) for b, _ in r.history[:10]])
