import dataclasses

import numpy as np
import pytest

from hubnet.model import Constraints, CostParams, FlowRecord, Problem, Site, make_problem, validate_problem

from conftest import synthetic


def five_sites():
    sites = [
        Site("BLR01", 12.97, 77.59, 30, 20),
        Site("DEL01", 28.61, 77.21, 40, 25, True, True),
        Site("HYD01", 17.38, 78.48, 10, 25),
        Site("MUM01", 19.07, 72.88, 20, 30, True),
        Site("PNQ01", 18.52, 73.85, 0, 0),
    ]
    flows = [
        FlowRecord("BLR01", "DEL01", 10), FlowRecord("BLR01", "MUM01", 20),
        FlowRecord("DEL01", "HYD01", 15), FlowRecord("DEL01", "BLR01", 20), FlowRecord("DEL01", "MUM01", 5),
        FlowRecord("HYD01", "MUM01", 5), FlowRecord("HYD01", "DEL01", 5),
        FlowRecord("MUM01", "HYD01", 10), FlowRecord("MUM01", "DEL01", 10),
    ]
    return sites, flows


def test_well_formed_instance_has_no_violations():
    sites, flows = five_sites()
    assert validate_problem(make_problem(sites, flows, Constraints(hub_count_max=3))) == []


def test_duplicate_site_id():
    sites, flows = five_sites()
    sites.append(Site("DEL01", 28.0, 77.0))
    raw = Problem(tuple(sites), tuple(flows), np.zeros((6, 6)))
    found = [v for v in validate_problem(raw) if v.rule == "duplicate-id"]
    assert len(found) == 1 and "DEL01" in str(found[0])


def test_perturbed_flow_breaks_conservation_for_that_site():
    sites, flows = five_sites()
    flows[0] = dataclasses.replace(flows[0], shipments=flows[0].shipments + 1)  # BLR01 -> DEL01
    # restore DEL01's inbound so only BLR01 is off
    sites[1] = dataclasses.replace(sites[1], inbound_daily=26)
    found = validate_problem(make_problem(sites, flows))
    assert [(v.subject, v.rule) for v in found] == [("BLR01", "flow-conservation-outbound")]


def test_fixed_without_existing():
    sites, flows = five_sites()
    sites[2] = dataclasses.replace(sites[2], is_fixed_hub=True)
    found = validate_problem(make_problem(sites, flows))
    assert [(v.subject, v.rule) for v in found] == [("HYD01", "fixed-not-existing")]


def test_unknown_site_and_duplicate_pair():
    sites, flows = five_sites()
    flows += [FlowRecord("BLR01", "XXX", 1), FlowRecord("MUM01", "DEL01", 0)]
    raw = Problem(tuple(sites), tuple(flows), np.zeros((5, 5)))
    rules = {(v.subject, v.rule) for v in validate_problem(raw)}
    assert ("XXX", "flow-unknown-site") in rules
    assert ("MUM01", "flow-duplicate") in rules


def test_constraint_and_cost_violations():
    sites, flows = five_sites()
    bad_c = Constraints(hub_count_min=3, hub_count_max=2, min_inter_hub_km=-1, volume_multiplier=0.5)
    bad_k = CostParams(sorter_tiers=((100, 10), (50, 20)), van_capacity=0)
    rules = {v.rule for v in validate_problem(make_problem(sites, flows, bad_c, bad_k))}
    assert {"hub-count-max", "min-inter-hub-km", "volume-multiplier", "sorter-tiers", "van_capacity"} <= rules


def test_fixed_hubs_exceeding_max():
    sites, flows = five_sites()
    found = validate_problem(make_problem(sites, flows, Constraints(hub_count_max=0, hub_count_min=0)))
    assert "fixed-hubs-exceed-max" in {v.rule for v in found}


def test_distance_matrix_checks():
    sites, flows = five_sites()
    p = make_problem(sites, flows)
    d = np.array(p.distances)
    d[0, 1] += 5.0
    d[2, 3] = d[3, 2] = 1e6
    found = validate_problem(dataclasses.replace(p, distances=d))
    assert {v.rule for v in found} == {"symmetric", "triangle"}


def test_order_stable_and_pure():
    sites, flows = five_sites()
    sites.append(Site("AAA", 95.0, 0.0, -1, 0))
    raw = Problem(tuple(sites), tuple(flows), np.zeros((6, 6)))
    first = validate_problem(raw)
    assert first == validate_problem(raw)
    assert first == sorted(first)
    assert first[0].subject == "AAA"


def test_sites_sorted_and_multiplier_applied_once():
    sites, flows = five_sites()
    p = make_problem(list(reversed(sites)), flows, Constraints(volume_multiplier=1.5))
    assert p.ids == tuple(sorted(s.id for s in sites))
    blr = p.sites[p.index["BLR01"]]
    # flows 10 -> 15 and 20 -> 30
    assert blr.outbound_daily == 45
    assert validate_problem(p) == []


def test_multiplier_rounds_half_up():
    sites = [Site("a", 0, 0, 1, 0), Site("b", 0, 1, 0, 1)]
    p = make_problem(sites, [FlowRecord("a", "b", 1)], Constraints(volume_multiplier=2.5))
    assert p.flows[0].shipments == 3.0
    assert p.sites[0].outbound_daily == 3.0


def test_synthetic_instance_validates():
    assert validate_problem(synthetic(50, 5, 4)) == []
