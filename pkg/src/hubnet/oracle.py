"""Exhaustive solver for small instances; the reference the GA is checked against."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .assignment import decode_hubs
from .costs import evaluate
from .errors import GuardRefusal, InfeasibleError

MAX_SITES = 20


def _guard(problem):
    if problem.n > MAX_SITES:
        raise GuardRefusal(
            f"exhaustive search refuses {problem.n} sites (limit {MAX_SITES})"
        )


def _candidate_subsets(problem, stats):
    """Yield sorted index tuples that contain every fixed hub, respect the hub
    count range and the spacing rule. Floors are checked after decoding."""
    c = problem.constraints
    d = problem.distances
    fixed = tuple(int(i) for i in np.flatnonzero(problem.fixed_mask))
    fixed_set = set(fixed)
    free = [i for i in range(problem.n) if i not in fixed_set]
    lo = max(c.hub_count_min, len(fixed))
    hi = min(problem.hub_count_max, problem.n)
    for size in range(lo, hi + 1):
        for extra in combinations(free, size - len(fixed)):
            stats["count"] += 1
            hubs = tuple(sorted(fixed + extra))
            spaced = True
            if c.min_inter_hub_km > 0:
                for x, a in enumerate(hubs):
                    for b in hubs[x + 1:]:
                        if a in fixed_set and b in fixed_set:
                            continue
                        if d[a, b] < c.min_inter_hub_km:
                            spaced = False
                            break
                    if not spaced:
                        break
            if not spaced:
                continue
            stats["spacing"] += 1
            yield hubs


def _meets_floors(design, problem):
    c = problem.constraints
    counts = np.bincount(design.hub_of, minlength=problem.n)
    for h, load in zip(design.hubs, design.loads):
        if problem.fixed_mask[h]:
            continue
        if counts[h] < c.min_dcs_per_hub or load < c.min_volume_per_hub:
            return False
    return True


def _feasible_designs(problem, stats):
    for hubs in _candidate_subsets(problem, stats):
        design = decode_hubs(np.array(hubs, dtype=np.intp), problem)
        if _meets_floors(design, problem):
            stats["floors"] += 1
            yield hubs, design


def _binding(stats):
    if stats["count"] == 0:
        return "hub count range / fixed hubs (no subset of admissible size)"
    if stats["spacing"] == 0:
        return "min_inter_hub_km (every admissible subset has hubs too close)"
    return "min_dcs_per_hub / min_volume_per_hub (every spaced subset has an under-filled hub)"


def brute_force_solve(problem):
    """Cheapest feasible design by full enumeration: ``(design, cost)``.

    Ties on total go to the lexicographically smallest list of hub ids.
    """
    _guard(problem)
    stats = {"count": 0, "spacing": 0, "floors": 0}
    best = None
    for hubs, design in _feasible_designs(problem, stats):
        cost = evaluate(design, problem)
        key = (cost.total, design.open_hubs)
        if best is None or key < best[0]:
            best = (key, design, cost)
    if best is None:
        raise InfeasibleError(f"no feasible hub set; binding constraint: {_binding(stats)}")
    return best[1], best[2]


def enumerate_feasible(problem):
    """Number of hub sets that pass every constraint."""
    _guard(problem)
    stats = {"count": 0, "spacing": 0, "floors": 0}
    return sum(1 for _ in _feasible_designs(problem, stats))
