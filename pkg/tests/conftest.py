import numpy as np
import pytest

from hubnet.model import Constraints, CostParams, FlowRecord, Problem, Site, make_problem
from hubnet.synth import generate


def matrix_problem(ids, distances, flows, constraints=Constraints(), costs=CostParams(),
                   existing=(), fixed=(), coords=None):
    """Problem over an explicit distance matrix; site volumes derived from flows."""
    out = {i: 0.0 for i in ids}
    inb = {i: 0.0 for i in ids}
    for o, d, v in flows:
        out[o] += v
        inb[d] += v
    sites = []
    for k, sid in enumerate(ids):
        lat, lon = coords[k] if coords else (0.0, float(k) * 0.01)
        sites.append(Site(sid, lat, lon, out[sid], inb[sid], sid in existing or sid in fixed, sid in fixed))
    order = np.argsort(ids, kind="stable")
    d = np.asarray(distances, dtype=float)[np.ix_(order, order)]
    sites = tuple(sites[i] for i in order)
    return Problem(sites, tuple(FlowRecord(o, t, float(v)) for o, t, v in flows), d, constraints, costs)


def synthetic(n, clusters, seed, constraints=Constraints(), costs=CostParams(), **kw):
    sites, flows = generate(n, clusters, seed, "peak", **kw)
    return make_problem(sites, flows, constraints, costs)


@pytest.fixture
def golden():
    """Three sites, three flows, hand-costed in test_costs."""
    d = [[0, 100, 300], [100, 0, 250], [300, 250, 0]]
    flows = [("A", "C", 50), ("B", "C", 30), ("C", "A", 20)]
    costs = CostParams(
        area_sqft_per_shipment=0.5, rent_per_sqft_day=2.0, handling_per_shipment=3.0,
        sorter_tiers=((90, 1000), (500, 2500)), truck_capacity=40, truck_cost_per_km=10.0,
        van_capacity=25, van_cost_per_km=2.0, milkrun_scale=1.5, linehaul_km_per_day=130.0,
        milkrun_max_km=80.0, penalty_per_shipment_day=7.0,
    )
    return matrix_problem(["A", "B", "C"], d, flows, costs=costs)


@pytest.fixture
def small_synth():
    return synthetic(10, 3, 11, Constraints(hub_count_min=2, hub_count_max=4))
