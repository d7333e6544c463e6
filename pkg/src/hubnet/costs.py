"""Daily network cost: hub setup, line haul, milk runs and TAT penalty.

Milk runs are costed radially: each spoke DC gets its own round trip to its
hub. Vehicle counts are the ceiling of daily volume over vehicle capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

COST_FIELDS = (
    "hub_floor",
    "hub_handling",
    "hub_sorter",
    "line_haul",
    "milkrun_arrival",
    "milkrun_departure",
    "tat_penalty",
)


@dataclass(frozen=True)
class CostBreakdown:
    hub_floor: float
    hub_handling: float
    hub_sorter: float
    line_haul: float
    milkrun_arrival: float
    milkrun_departure: float
    tat_penalty: float
    total: float
    tat_breach_shipments: float
    milkrun_breach_count: int

    @property
    def hub_setup(self):
        return self.hub_floor + self.hub_handling + self.hub_sorter

    @property
    def milkrun(self):
        return self.milkrun_arrival + self.milkrun_departure

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def hub_setup_cost(design, problem):
    """``(floor, handling, sorter)`` in currency/day."""
    k = problem.costs
    floor = math.fsum(design.areas) * k.rent_per_sqft_day
    handling = math.fsum(design.loads) * k.handling_per_shipment
    tier_costs = k.tier_costs
    sorter = math.fsum(design.units * tier_costs[design.tiers])
    return floor, handling, sorter


def _hub_pair_volumes(design, problem):
    """Inter-hub flow aggregated to (origin hub, dest hub) pairs, g != h."""
    o, d, v = problem.flow_arrays
    hubs = design.hubs
    nh = hubs.size
    rank = np.empty(problem.n, dtype=np.intp)
    rank[hubs] = np.arange(nh)
    site_rank = rank[design.hub_of]
    vol = np.bincount(site_rank[o] * nh + site_rank[d], weights=v, minlength=nh * nh)
    vol = vol.reshape(nh, nh)
    np.fill_diagonal(vol, 0.0)
    gi, hi = np.nonzero(vol)
    return hubs[gi], hubs[hi], vol[gi, hi]


def line_haul_legs(design, problem):
    """``(origin hub idx, dest hub idx, shipments, trucks)`` for every used hub pair."""
    g, h, vol = _hub_pair_volumes(design, problem)
    trucks = np.ceil(vol / problem.costs.truck_capacity)
    return g, h, vol, trucks


def line_haul_cost(design, problem):
    g, h, _, trucks = line_haul_legs(design, problem)
    k = problem.costs
    return math.fsum(trucks * problem.distances[g, h]) * k.truck_cost_per_km


def spoke_distances(design, problem):
    return problem.distances[np.arange(problem.n), design.hub_of]


def milk_run_cost(design, problem):
    """``(arrival, departure)`` scaled by ``milkrun_scale``; hubs contribute zero."""
    k = problem.costs
    spoke = spoke_distances(design, problem)
    # hubs have spoke distance 0 by construction, so they drop out
    per_km = 2.0 * k.van_cost_per_km * k.milkrun_scale
    arrival = math.fsum(np.ceil(problem.outbound / k.van_capacity) * spoke) * per_km
    departure = math.fsum(np.ceil(problem.inbound / k.van_capacity) * spoke) * per_km
    return arrival, departure


def tat_penalty(design, problem):
    """``(penalty currency/day, breached shipments/day)``.

    Promised days come from the direct origin-destination road distance at the
    line-haul reach per day; actual days from the hub-routed path.
    """
    o, d, v = problem.flow_arrays
    if v.size == 0:
        return 0.0, 0.0
    k = problem.costs
    spoke = spoke_distances(design, problem)
    hub_of = design.hub_of
    path = spoke[o] + problem.distances[hub_of[o], hub_of[d]] + spoke[d]
    actual = np.maximum(1.0, np.ceil(path / k.linehaul_km_per_day))
    late = np.maximum(0.0, actual - problem.promised_days)
    late_shipment_days = float(np.sum(v * late))
    breached = float(np.sum(v[late > 0]))
    return late_shipment_days * k.penalty_per_shipment_day, breached


def milkrun_breaches(design, problem):
    """Number of spoke DCs further than ``milkrun_max_km`` from their hub."""
    spoke = spoke_distances(design, problem)
    return int(np.count_nonzero(spoke > problem.costs.milkrun_max_km))


def evaluate(design, problem):
    floor, handling, sorter = hub_setup_cost(design, problem)
    line_haul = line_haul_cost(design, problem)
    arrival, departure = milk_run_cost(design, problem)
    penalty, breached = tat_penalty(design, problem)
    parts = (floor, handling, sorter, line_haul, arrival, departure, penalty)
    return CostBreakdown(
        *parts,
        total=math.fsum(parts),
        tat_breach_shipments=breached,
        milkrun_breach_count=milkrun_breaches(design, problem),
    )
