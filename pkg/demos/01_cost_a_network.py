"""Build a small instance by hand, open two hubs and read the cost breakdown."""

import numpy as np

from hubnet import Constraints, FlowRecord, Site, decode, evaluate, make_problem

# %% Five delivery centres around Mumbai and Pune. Volumes are shipments per day.
sites = [
    Site("BOM-A", 19.07, 72.88, 420, 380, is_existing_hub=True),
    Site("BOM-B", 19.20, 72.97, 150, 170),
    Site("PNQ-A", 18.52, 73.86, 300, 260, is_existing_hub=True),
    Site("PNQ-B", 18.60, 73.78, 90, 140),
    Site("NSK-A", 20.00, 73.79, 60, 70),
]
pairs = [
    ("BOM-A", "PNQ-A", 200), ("BOM-A", "NSK-A", 70), ("BOM-A", "BOM-B", 150),
    ("BOM-B", "PNQ-B", 150), ("PNQ-A", "BOM-A", 180), ("PNQ-A", "BOM-B", 120),
    ("PNQ-B", "PNQ-A", 90), ("NSK-A", "BOM-A", 60),
]
flows = [FlowRecord(o, d, v) for o, d, v in pairs]

# make_problem checks that site totals match the flow table
# (outbound = row sums, inbound = column sums), so fix them up first.
out = {s.id: 0.0 for s in sites}
inb = dict(out)
for f in flows:
    out[f.origin_id] += f.shipments
    inb[f.dest_id] += f.shipments
sites = [Site(s.id, s.lat, s.lon, out[s.id], inb[s.id], s.is_existing_hub) for s in sites]

problem = make_problem(sites, flows, Constraints(hub_count_min=1, hub_count_max=3))
print("road km matrix:\n", np.round(problem.distances, 1))

# %% A design is a bit per site. Non-hubs go to their nearest open hub.
bits = np.isin(problem.ids, ["BOM-A", "PNQ-A"])
design = decode(bits, problem)
print("assignment:", design.assignment)
print("hub throughput:", design.hub_throughput)

cost = evaluate(design, problem)
for field, value in cost.as_dict().items():
    shown = f"{value:12.2f}" if isinstance(value, float) else f"{value:12d}"
    print(f"  {field:22s} {shown}")

# %% Compare against a single Mumbai hub.
single = evaluate(decode(np.isin(problem.ids, ["BOM-A"]), problem), problem)
print(f"two hubs {cost.total:.0f} vs one hub {single.total:.0f}")
