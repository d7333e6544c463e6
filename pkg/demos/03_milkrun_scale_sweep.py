"""Raise the milk-run cost multiplier and watch long spokes disappear.

A tight cluster near Delhi plus three sites near Lucknow, well past the
250 km milk-run reach. Cheap vans make long milk runs attractive at scale 1.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from instances import remote_cluster  # noqa: E402

from hubnet import GaConfig, brute_force_solve, compare_scenarios  # noqa: E402

problem = remote_cluster()
print("scale  hubs                 milkrun_breaches  total")
for scale in [1.0, 2.0, 3.0, 4.0, 5.0]:
    design, cost = brute_force_solve(problem.with_costs(milkrun_scale=scale))
    print(f"{scale:5.1f}  {', '.join(design.open_hubs):20s} {cost.milkrun_breach_count:16d}  {cost.total:,.0f}")

# Same sweep with the GA; each factor is an independent run from the same seed.
for run in compare_scenarios(problem, GaConfig(population_size=40, generations=60), [1.0, 5.0]):
    print(f"GA scale {run.milkrun_scale}: {run.hub_count} hubs, {run.milkrun_breach_count} breaches")
