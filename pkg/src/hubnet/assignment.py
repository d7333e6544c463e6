"""Decode an open-hub bit vector into a full network design."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


def as_chromosome(bits, n=None):
    """Coerce a bit sequence to a 1-D boolean array."""
    a = np.asarray(bits).astype(bool).ravel()
    if n is not None and a.size != n:
        raise ValueError(f"chromosome has {a.size} bits, expected {n}")
    return a


def chromosome_from_hubs(hub_ids, problem):
    bits = np.zeros(problem.n, dtype=bool)
    for hid in hub_ids:
        try:
            bits[problem.index[hid]] = True
        except KeyError:
            raise KeyError(f"unknown hub id {hid!r}") from None
    return bits


@dataclass(frozen=True, eq=False)
class NetworkDesign:
    """Decoded solution. Array fields are indexed by site position; per-hub
    arrays are aligned with ``hubs`` (sorted site indices of open hubs)."""

    site_ids: tuple
    hubs: np.ndarray
    hub_of: np.ndarray
    loads: np.ndarray
    tiers: np.ndarray
    units: np.ndarray
    areas: np.ndarray

    @property
    def chromosome(self):
        bits = np.zeros(len(self.site_ids), dtype=bool)
        bits[self.hubs] = True
        return bits

    @property
    def open_hubs(self):
        return [self.site_ids[h] for h in self.hubs]

    @cached_property
    def assignment(self):
        ids = self.site_ids
        return {ids[i]: ids[h] for i, h in enumerate(self.hub_of)}

    @property
    def hub_throughput(self):
        return {self.site_ids[h]: float(t) for h, t in zip(self.hubs, self.loads)}

    @property
    def sorter_tier(self):
        return {self.site_ids[h]: (int(t), int(u)) for h, t, u in zip(self.hubs, self.tiers, self.units)}

    @property
    def floor_area(self):
        return {self.site_ids[h]: float(a) for h, a in zip(self.hubs, self.areas)}


def nearest_hub(distances, hubs):
    """Index of the nearest hub for every site, ties to the lowest index.

    Hubs always map to themselves, even when another hub shares their location.
    """
    hubs = np.asarray(hubs, dtype=np.intp)
    if hubs.size == 0:
        raise ValueError("at least one open hub is required")
    pick = np.argmin(distances[:, hubs], axis=1)
    hub_of = hubs[pick]
    hub_of[hubs] = hubs
    return hub_of


def assign_sites(chromosome, problem):
    """Map every site id to the id of its nearest open hub."""
    bits = as_chromosome(chromosome, problem.n)
    hub_of = nearest_hub(problem.distances, np.flatnonzero(bits))
    ids = problem.ids
    return {ids[i]: ids[h] for i, h in enumerate(hub_of)}


def _site_loads(problem):
    return problem.outbound + problem.inbound


def hub_throughputs(assignment, problem):
    """Daily shipments sorted at each hub: inbound plus outbound of its sites.

    Every shipment is sorted twice in the middle mile, once at the origin hub
    and once at the destination hub.
    """
    loads = _site_loads(problem)
    out = {}
    for i, sid in enumerate(problem.ids):
        hub = assignment[sid]
        out[hub] = out.get(hub, 0.0) + float(loads[i])
    return dict(sorted(out.items()))


def size_sorter(throughput, tiers):
    """Pick ``(tier index, unit count)`` for a daily throughput.

    The smallest tier with enough capacity, one unit; above the largest tier,
    enough units of the largest tier.
    """
    caps = [c for c, _ in tiers]
    for i, cap in enumerate(caps):
        if throughput <= cap:
            return i, 1
    return len(caps) - 1, int(math.ceil(throughput / caps[-1]))


def size_sorters(loads, capacities):
    """Vectorised :func:`size_sorter` over an array of throughputs."""
    caps = np.asarray(capacities, dtype=float)
    tiers = np.searchsorted(caps, loads, side="left")
    over = tiers >= caps.size
    units = np.ones(loads.shape, dtype=np.int64)
    tiers = np.where(over, caps.size - 1, tiers)
    units[over] = np.ceil(loads[over] / caps[-1]).astype(np.int64)
    return tiers.astype(np.int64), units


def decode_hubs(hubs, problem):
    hubs = np.unique(np.asarray(hubs, dtype=np.intp))
    hub_of = nearest_hub(problem.distances, hubs)
    per_site = np.bincount(hub_of, weights=_site_loads(problem), minlength=problem.n)
    loads = per_site[hubs]
    tiers, units = size_sorters(loads, problem.costs.tier_capacities)
    areas = problem.costs.area_sqft_per_shipment * loads
    return NetworkDesign(problem.ids, hubs, hub_of, loads, tiers, units, areas)


def decode(chromosome, problem):
    """Compose nearest-hub assignment, hub throughput, sorter sizing and floor area."""
    bits = as_chromosome(chromosome, problem.n)
    return decode_hubs(np.flatnonzero(bits), problem)


def feasibility_violations(chromosome, problem):
    """Business-constraint check for a chromosome; returns a list of messages.

    Checks fixed hubs open, hub count range, inter-hub spacing (pairs of two
    fixed hubs exempt) and the per-hub DC-count and volume floors (fixed hubs
    exempt, since they cannot close).
    """
    bits = as_chromosome(chromosome, problem.n)
    c = problem.constraints
    ids = problem.ids
    fixed = problem.fixed_mask
    msgs = []
    for i in np.flatnonzero(fixed & ~bits):
        msgs.append(f"fixed hub {ids[i]} is closed")
    count = int(bits.sum())
    if not c.hub_count_min <= count <= problem.hub_count_max:
        msgs.append(f"hub count {count} outside [{c.hub_count_min}, {problem.hub_count_max}]")
    hubs = np.flatnonzero(bits)
    for a_pos, a in enumerate(hubs):
        for b in hubs[a_pos + 1:]:
            if fixed[a] and fixed[b]:
                continue
            if problem.distances[a, b] < c.min_inter_hub_km:
                msgs.append(f"hubs {ids[a]} and {ids[b]} are {problem.distances[a, b]:.3f} km apart")
    if hubs.size:
        design = decode_hubs(hubs, problem)
        counts = np.bincount(design.hub_of, minlength=problem.n)
        for h, load in zip(design.hubs, design.loads):
            if fixed[h]:
                continue
            if counts[h] < c.min_dcs_per_hub:
                msgs.append(f"hub {ids[h]} serves {counts[h]} DCs < {c.min_dcs_per_hub}")
            if load < c.min_volume_per_hub:
                msgs.append(f"hub {ids[h]} handles {load:g} < {c.min_volume_per_hub:g} shipments/day")
    return msgs
