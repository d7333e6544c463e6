"""Domain types for a middle-mile hub network instance, plus validation.

A :class:`Problem` is immutable once built. Sites are kept sorted by id; that
order defines every canonical iteration order downstream (hub tie-breaks,
accumulation order, chromosome bit positions).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import InfeasibleError
from .geo import GeoParams, build_distance_matrix


@dataclass(frozen=True)
class Site:
    id: str
    lat: float
    lon: float
    outbound_daily: float = 0.0
    inbound_daily: float = 0.0
    is_existing_hub: bool = False
    is_fixed_hub: bool = False


@dataclass(frozen=True)
class FlowRecord:
    origin_id: str
    dest_id: str
    shipments: float


@dataclass(frozen=True)
class Constraints:
    """Search-space bounds. ``hub_count_max=None`` means "number of sites"."""

    hub_count_min: int = 1
    hub_count_max: Optional[int] = None
    min_dcs_per_hub: int = 1
    min_volume_per_hub: float = 0.0
    min_inter_hub_km: float = 0.0
    volume_multiplier: float = 1.0


@dataclass(frozen=True)
class CostParams:
    """Daily cost rates. Capital items (sorters, floor) are daily-amortised."""

    area_sqft_per_shipment: float = 0.5
    rent_per_sqft_day: float = 1.0
    handling_per_shipment: float = 2.0
    sorter_tiers: tuple = ((20000, 8000.0), (60000, 18000.0), (150000, 35000.0))
    truck_capacity: float = 4000.0
    truck_cost_per_km: float = 45.0
    van_capacity: float = 500.0
    van_cost_per_km: float = 18.0
    milkrun_scale: float = 1.0
    linehaul_km_per_day: float = 450.0
    milkrun_max_km: float = 250.0
    penalty_per_shipment_day: float = 15.0

    def __post_init__(self):
        object.__setattr__(
            self, "sorter_tiers", tuple((float(c), float(k)) for c, k in self.sorter_tiers)
        )

    @property
    def tier_capacities(self):
        return np.array([c for c, _ in self.sorter_tiers], dtype=float)

    @property
    def tier_costs(self):
        return np.array([k for _, k in self.sorter_tiers], dtype=float)


@dataclass(frozen=True, order=True)
class Violation:
    subject: str
    rule: str
    detail: str = field(compare=False)

    def __str__(self):
        return f"{self.subject}: {self.rule}: {self.detail}"


@dataclass(frozen=True, eq=False)
class Problem:
    sites: tuple
    flows: tuple
    distances: np.ndarray
    constraints: Constraints = Constraints()
    costs: CostParams = CostParams()
    geo: GeoParams = GeoParams()

    @property
    def n(self):
        return len(self.sites)

    @cached_property
    def ids(self):
        return tuple(s.id for s in self.sites)

    @cached_property
    def index(self):
        return {sid: i for i, sid in enumerate(self.ids)}

    @cached_property
    def outbound(self):
        return _frozen(np.array([s.outbound_daily for s in self.sites], dtype=float))

    @cached_property
    def inbound(self):
        return _frozen(np.array([s.inbound_daily for s in self.sites], dtype=float))

    @cached_property
    def fixed_mask(self):
        return _frozen(np.array([s.is_fixed_hub for s in self.sites], dtype=bool))

    @cached_property
    def existing_mask(self):
        return _frozen(np.array([s.is_existing_hub for s in self.sites], dtype=bool))

    @property
    def hub_count_max(self):
        cmax = self.constraints.hub_count_max
        return self.n if cmax is None else cmax

    @cached_property
    def flow_arrays(self):
        """``(origin_idx, dest_idx, shipments)`` for off-diagonal positive flows,
        sorted by (origin, dest) index."""
        recs = [
            (self.index[f.origin_id], self.index[f.dest_id], f.shipments)
            for f in self.flows
            if f.origin_id != f.dest_id and f.shipments > 0
        ]
        recs.sort()
        o = np.array([r[0] for r in recs], dtype=np.intp)
        d = np.array([r[1] for r in recs], dtype=np.intp)
        v = np.array([r[2] for r in recs], dtype=float)
        return _frozen(o), _frozen(d), _frozen(v)

    @cached_property
    def promised_days(self):
        o, d, _ = self.flow_arrays
        direct = self.distances[o, d]
        return _frozen(np.maximum(1.0, np.ceil(direct / self.costs.linehaul_km_per_day)))

    def with_costs(self, **changes):
        """Copy with some :class:`CostParams` fields replaced (distances shared)."""
        return dataclasses.replace(self, costs=dataclasses.replace(self.costs, **changes))

    def with_constraints(self, **changes):
        return dataclasses.replace(
            self, constraints=dataclasses.replace(self.constraints, **changes)
        )


def _frozen(a):
    a.setflags(write=False)
    return a


def _round_half_up(x):
    return float(math.floor(x + 0.5))


def make_problem(sites, flows, constraints=Constraints(), costs=CostParams(), geo=GeoParams()):
    """Build a :class:`Problem`: sort sites, apply the volume multiplier once,
    and compute the road-distance matrix.

    Flows and volumes are scaled by ``constraints.volume_multiplier`` and
    rounded half-up to whole shipments. A site whose raw volume matched its raw
    flow total gets the scaled flow total, so conservation survives rounding.
    """
    sites = sorted(sites, key=lambda s: s.id)
    flows = list(flows)
    m = constraints.volume_multiplier

    raw_out, raw_in = {}, {}
    for f in flows:
        raw_out[f.origin_id] = raw_out.get(f.origin_id, 0.0) + f.shipments
        raw_in[f.dest_id] = raw_in.get(f.dest_id, 0.0) + f.shipments

    scaled_flows = tuple(
        FlowRecord(f.origin_id, f.dest_id, _round_half_up(f.shipments * m)) for f in flows
    )
    new_out, new_in = {}, {}
    for f in scaled_flows:
        new_out[f.origin_id] = new_out.get(f.origin_id, 0.0) + f.shipments
        new_in[f.dest_id] = new_in.get(f.dest_id, 0.0) + f.shipments

    scaled_sites = []
    for s in sites:
        out = (
            new_out.get(s.id, 0.0)
            if raw_out.get(s.id, 0.0) == s.outbound_daily
            else _round_half_up(s.outbound_daily * m)
        )
        inb = (
            new_in.get(s.id, 0.0)
            if raw_in.get(s.id, 0.0) == s.inbound_daily
            else _round_half_up(s.inbound_daily * m)
        )
        scaled_sites.append(dataclasses.replace(s, outbound_daily=out, inbound_daily=inb))

    distances = build_distance_matrix(scaled_sites, geo)
    return Problem(tuple(scaled_sites), scaled_flows, distances, constraints, costs, geo)


def _finite_nonneg(x):
    try:
        return math.isfinite(x) and x >= 0
    except TypeError:
        return False


def validate_problem(problem):
    """Return every broken instance invariant as a sorted list of :class:`Violation`.

    Never raises on bad data; an empty list means the instance is well formed.
    """
    out = []
    add = lambda subject, rule, detail: out.append(Violation(str(subject), rule, detail))

    sites = problem.sites
    seen = {}
    for s in sites:
        seen[s.id] = seen.get(s.id, 0) + 1
    for sid, count in seen.items():
        if count > 1:
            add(sid, "duplicate-id", f"site id {sid!r} appears {count} times")
    for s in sites:
        if not (isinstance(s.lat, (int, float)) and math.isfinite(s.lat) and -90 <= s.lat <= 90):
            add(s.id, "lat-range", f"latitude {s.lat!r} outside [-90, 90]")
        if not (isinstance(s.lon, (int, float)) and math.isfinite(s.lon) and -180 <= s.lon <= 180):
            add(s.id, "lon-range", f"longitude {s.lon!r} outside [-180, 180]")
        for name in ("outbound_daily", "inbound_daily"):
            if not _finite_nonneg(getattr(s, name)):
                add(s.id, "volume-invalid", f"{name}={getattr(s, name)!r} must be finite and >= 0")
        if s.is_fixed_hub and not s.is_existing_hub:
            add(s.id, "fixed-not-existing", "is_fixed_hub set without is_existing_hub")

    known = set(seen)
    pairs = {}
    out_sum, in_sum = {}, {}
    for f in problem.flows:
        label = f"{f.origin_id}->{f.dest_id}"
        ok = True
        for role, sid in (("origin", f.origin_id), ("dest", f.dest_id)):
            if sid not in known:
                add(sid, "flow-unknown-site", f"flow {label} references unknown {role} id {sid!r}")
                ok = False
        if not _finite_nonneg(f.shipments):
            add(f.origin_id, "flow-invalid", f"flow {label} has shipments={f.shipments!r}")
            ok = False
        key = (f.origin_id, f.dest_id)
        pairs[key] = pairs.get(key, 0) + 1
        if ok:
            out_sum[f.origin_id] = out_sum.get(f.origin_id, 0.0) + f.shipments
            in_sum[f.dest_id] = in_sum.get(f.dest_id, 0.0) + f.shipments
    for (o, d), count in pairs.items():
        if count > 1:
            add(o, "flow-duplicate", f"{count} records for pair {o}->{d}")
    for s in sites:
        if seen.get(s.id, 0) != 1:
            continue
        if _finite_nonneg(s.outbound_daily) and out_sum.get(s.id, 0.0) != s.outbound_daily:
            add(s.id, "flow-conservation-outbound",
                f"outgoing flows sum to {out_sum.get(s.id, 0.0):g}, outbound_daily={s.outbound_daily:g}")
        if _finite_nonneg(s.inbound_daily) and in_sum.get(s.id, 0.0) != s.inbound_daily:
            add(s.id, "flow-conservation-inbound",
                f"incoming flows sum to {in_sum.get(s.id, 0.0):g}, inbound_daily={s.inbound_daily:g}")

    _validate_constraints(problem, add)
    _validate_costs(problem.costs, add)
    _validate_distances(problem.distances, len(sites), add)
    return sorted(out)


def _validate_constraints(problem, add):
    c = problem.constraints
    n = len(problem.sites)
    cmax = n if c.hub_count_max is None else c.hub_count_max
    if not (isinstance(c.hub_count_min, int) and c.hub_count_min >= 1):
        add("constraints", "hub-count-min", f"hub_count_min={c.hub_count_min!r} must be an integer >= 1")
    if not (isinstance(cmax, int) and cmax >= c.hub_count_min):
        add("constraints", "hub-count-max", f"hub_count_max={cmax!r} must be >= hub_count_min={c.hub_count_min!r}")
    elif cmax > n:
        add("constraints", "hub-count-max", f"hub_count_max={cmax} exceeds number of sites {n}")
    n_fixed = sum(1 for s in problem.sites if s.is_fixed_hub)
    if isinstance(cmax, int) and n_fixed > cmax:
        add("constraints", "fixed-hubs-exceed-max", f"{n_fixed} fixed hubs exceed hub_count_max={cmax}")
    if not (isinstance(c.min_dcs_per_hub, int) and c.min_dcs_per_hub >= 1):
        add("constraints", "min-dcs-per-hub", f"min_dcs_per_hub={c.min_dcs_per_hub!r} must be an integer >= 1")
    if not _finite_nonneg(c.min_volume_per_hub):
        add("constraints", "min-volume-per-hub", f"min_volume_per_hub={c.min_volume_per_hub!r} must be >= 0")
    if not _finite_nonneg(c.min_inter_hub_km):
        add("constraints", "min-inter-hub-km", f"min_inter_hub_km={c.min_inter_hub_km!r} must be >= 0")
    if not (_finite_nonneg(c.volume_multiplier) and c.volume_multiplier >= 1):
        add("constraints", "volume-multiplier", f"volume_multiplier={c.volume_multiplier!r} must be >= 1")


def _validate_costs(k, add):
    tiers = k.sorter_tiers
    if not tiers:
        add("costs", "sorter-tiers", "sorter_tiers must be non-empty")
    else:
        caps = [c for c, _ in tiers]
        costs = [x for _, x in tiers]
        if not all(_finite_nonneg(x) for x in caps + costs) or caps[0] <= 0:
            add("costs", "sorter-tiers", "tier capacities must be > 0 and costs finite >= 0")
        if any(b <= a for a, b in zip(caps, caps[1:])) or any(b <= a for a, b in zip(costs, costs[1:])):
            add("costs", "sorter-tiers", "tier capacities and costs must be strictly increasing")
    for name in ("area_sqft_per_shipment", "rent_per_sqft_day", "handling_per_shipment",
                 "truck_cost_per_km", "van_cost_per_km", "milkrun_scale", "penalty_per_shipment_day"):
        if not _finite_nonneg(getattr(k, name)):
            add("costs", name, f"{name}={getattr(k, name)!r} must be finite and >= 0")
    for name in ("truck_capacity", "van_capacity", "linehaul_km_per_day", "milkrun_max_km"):
        v = getattr(k, name)
        if not (_finite_nonneg(v) and v > 0):
            add("costs", name, f"{name}={v!r} must be finite and > 0")


# full O(n^3) triangle scan up to this size; beyond it, a fixed stride of pivots
_TRIANGLE_FULL_N = 1500


def _validate_distances(d, n, add):
    d = np.asarray(d, dtype=float)
    if d.shape != (n, n):
        add("distances", "shape", f"matrix shape {d.shape} != ({n}, {n})")
        return
    if n == 0:
        return
    if not np.all(np.isfinite(d)) or np.any(d < 0):
        add("distances", "non-negative", "entries must be finite and >= 0")
        return
    if np.any(np.diag(d) != 0):
        add("distances", "zero-diagonal", "diagonal entries must be 0")
    if not np.array_equal(d, d.T):
        add("distances", "symmetric", "matrix must be symmetric")
    pivots = range(n) if n <= _TRIANGLE_FULL_N else range(0, n, max(1, n // 200))
    for k in pivots:
        via = d[:, k, None] + d[None, k, :]
        bad = d > 1.01 * via + 1e-6
        if bad.any():
            i, j = np.argwhere(bad)[0]
            add("distances", "triangle",
                f"d[{i}][{j}]={d[i, j]:g} exceeds 1% slack over path via {k} ({via[i, j]:g})")
            break


def check_constraints_satisfiable(problem):
    """Raise :class:`~hubnet.errors.InfeasibleError` for constraint sets no design can meet."""
    c = problem.constraints
    n_fixed = int(problem.fixed_mask.sum())
    if problem.n == 0:
        raise InfeasibleError("instance has no sites")
    if c.hub_count_min > problem.n:
        raise InfeasibleError(f"hub_count_min={c.hub_count_min} exceeds number of sites {problem.n}")
    if problem.hub_count_max < c.hub_count_min:
        raise InfeasibleError("hub_count_max < hub_count_min")
    if n_fixed > problem.hub_count_max:
        raise InfeasibleError(f"{n_fixed} fixed hubs exceed hub_count_max={problem.hub_count_max}")
