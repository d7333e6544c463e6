"""Planning workflow around a solved design.

Milk-run scale sweeps, rationalisation of a recommended hub set against the
hubs that already exist on the ground, and breach-reduction reporting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .assignment import decode_hubs
from .costs import CostBreakdown, evaluate
from .ga import GaConfig, GaResult, run_ga

DEFAULT_RADIUS_KM = 50.0


@dataclass
class RationalizationPlan:
    final_hubs: list
    substitutions: list  # (recommended id, kept existing id, distance km)
    hubs_to_open: list
    hubs_to_close: list
    final_design: object
    final_cost: CostBreakdown
    baseline_cost: Optional[CostBreakdown]

    @property
    def breach_reduction(self):
        """TAT-breach reduction vs the current network, or None when undefined."""
        if self.baseline_cost is None or self.baseline_cost.tat_breach_shipments <= 0:
            return None
        return breach_reduction(self.baseline_cost, self.final_cost)


def rationalize(design, problem, radius_km=DEFAULT_RADIUS_KM):
    """Swap recommended new hubs for nearby existing hubs, one for one.

    Candidate pairs (recommended non-existing hub, existing hub not already in
    the design) within ``radius_km`` are matched greedily nearest-first, ties by
    recommended id then existing id; each hub takes part in at most one swap.
    The swapped hub set is re-decoded and re-costed, since moving a hub changes
    every cost component.
    """
    d = problem.distances
    existing = problem.existing_mask
    ids = problem.ids
    recommended = set(int(h) for h in design.hubs)
    recommended |= set(int(i) for i in np.flatnonzero(problem.fixed_mask))

    new_hubs = sorted(h for h in recommended if not existing[h])
    spare = [int(e) for e in np.flatnonzero(existing) if int(e) not in recommended]
    pairs = sorted(
        (float(d[r, e]), ids[r], ids[e], r, e)
        for r in new_hubs
        for e in spare
        if d[r, e] <= radius_km
    )
    used_r, used_e = set(), set()
    substitutions = []
    for dist, rid, eid, r, e in pairs:
        if r in used_r or e in used_e:
            continue
        used_r.add(r)
        used_e.add(e)
        substitutions.append((rid, eid, dist))
    substitutions.sort(key=lambda s: s[0])

    final = (recommended - used_r) | used_e
    final_idx = np.array(sorted(final), dtype=np.intp)
    final_design = decode_hubs(final_idx, problem)
    final_cost = evaluate(final_design, problem)

    current = np.flatnonzero(existing)
    baseline = evaluate(decode_hubs(current, problem), problem) if current.size else None

    final_ids = [ids[i] for i in final_idx]
    return RationalizationPlan(
        final_hubs=final_ids,
        substitutions=substitutions,
        hubs_to_open=[ids[i] for i in final_idx if not existing[i]],
        hubs_to_close=[ids[i] for i in current if i not in final],
        final_design=final_design,
        final_cost=final_cost,
        baseline_cost=baseline,
    )


@dataclass
class ScenarioRun:
    milkrun_scale: float
    result: GaResult

    @property
    def hub_count(self):
        return len(self.result.best_design.hubs)

    @property
    def total(self):
        return self.result.best_cost.total

    @property
    def milkrun_breach_count(self):
        return self.result.best_cost.milkrun_breach_count

    @property
    def tat_breach_shipments(self):
        return self.result.best_cost.tat_breach_shipments


def compare_scenarios(problem, config=GaConfig(), scale_factors=(1.0,)):
    """One GA run per milk-run scale factor, all from the same seed."""
    scale_factors = list(scale_factors)
    if not scale_factors:
        raise ValueError("at least one scale factor is required")
    return [
        ScenarioRun(float(s), run_ga(problem.with_costs(milkrun_scale=float(s)), config))
        for s in scale_factors
    ]


def breach_reduction(baseline, candidate):
    """Percentage drop in TAT-breached shipments from ``baseline`` to ``candidate``."""
    base = baseline.tat_breach_shipments
    if base <= 0:
        raise ZeroDivisionError("baseline has no TAT breaches; reduction is undefined")
    return 100.0 * (base - candidate.tat_breach_shipments) / base
