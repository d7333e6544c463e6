"""Take a solved design and swap in existing hubs that sit close by."""

from hubnet import Constraints, GaConfig, generate, make_problem, rationalize, run_ga

sites, flows = generate(80, 8, seed=3, profile="peak", n_existing=30, n_fixed=2)
problem = make_problem(sites, flows, Constraints(hub_count_min=4, hub_count_max=16, min_inter_hub_km=30))

result = run_ga(problem, GaConfig(population_size=60, generations=80, rng_seed=0))
print("GA picked:", result.best_design.open_hubs)

plan = rationalize(result.best_design, problem, radius_km=50.0)
for rec, kept, km in plan.substitutions:
    print(f"  keep existing {kept} instead of opening {rec} ({km:.1f} km away)")
print("open :", plan.hubs_to_open)
print("close:", plan.hubs_to_close)
print(f"cost {result.best_cost.total:,.0f} -> {plan.final_cost.total:,.0f}")

red = plan.breach_reduction
if red is None:
    print("baseline has no TAT breaches; reduction undefined")
else:
    print(f"TAT breach shipments vs all-existing baseline: {-red:+.2f}%")
