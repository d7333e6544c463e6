"""CSV ingestion and deterministic report files.

Report bodies never contain timestamps or host details; those go to
``meta.json`` only, so report files can be compared byte for byte.
"""

from __future__ import annotations

import csv
import json
import math
import os
from pathlib import Path

import numpy as np

from .assignment import chromosome_from_hubs
from .config import Settings, load_config
from .costs import line_haul_legs, spoke_distances
from .errors import InputError, ValidationError
from .model import FlowRecord, Problem, Site, make_problem, validate_problem

SITES_HEADER = ["id", "lat", "lon", "outbound_daily", "inbound_daily", "is_existing_hub", "is_fixed_hub"]
FLOWS_HEADER = ["origin_id", "dest_id", "shipments"]


def _rows(path, header):
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first != header:
            raise InputError(f"{path}:1: header must be {','.join(header)!r}, got {','.join(first or [])!r}")
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise InputError(f"{path}:{reader.line_num}: expected {len(header)} fields, got {len(row)}")
            yield reader.line_num, row


def _number(text, path, line, name):
    try:
        return float(text)
    except ValueError:
        raise InputError(f"{path}:{line}: {name} {text!r} is not a number") from None


def _flag(text, path, line, name):
    if text not in ("0", "1"):
        raise InputError(f"{path}:{line}: {name} must be 0 or 1, got {text!r}")
    return text == "1"


def read_sites(path):
    sites = []
    for line, row in _rows(path, SITES_HEADER):
        sid, lat, lon, out, inb, existing, fixed = row
        if not sid:
            raise InputError(f"{path}:{line}: empty site id")
        sites.append(Site(
            sid,
            _number(lat, path, line, "lat"),
            _number(lon, path, line, "lon"),
            _number(out, path, line, "outbound_daily"),
            _number(inb, path, line, "inbound_daily"),
            _flag(existing, path, line, "is_existing_hub"),
            _flag(fixed, path, line, "is_fixed_hub"),
        ))
    return sites


def read_flows(path, known_ids=None):
    flows = []
    unknown = []
    for line, (o, d, v) in _rows(path, FLOWS_HEADER):
        if known_ids is not None:
            for sid in (o, d):
                if sid not in known_ids:
                    unknown.append(f"{path}:{line}: unknown site id {sid!r}")
        flows.append(FlowRecord(o, d, _number(v, path, line, "shipments")))
    if unknown:
        raise InputError("\n".join(unknown))
    return flows


def load_inputs(sites_path, flows_path, config=None):
    """Read, build and validate a :class:`Problem`.

    ``config`` is a path, a :class:`Settings`, or None for defaults. Raises
    :class:`InputError` (parse problems) or :class:`ValidationError` (every
    broken invariant listed).
    """
    settings = config if isinstance(config, Settings) else load_config(config)
    sites = read_sites(sites_path)
    flows = read_flows(flows_path, {s.id for s in sites})
    # site/flow checks first: coordinates must be valid before distances exist
    n = len(sites)
    provisional = Problem(tuple(sorted(sites, key=lambda s: s.id)), tuple(flows), np.zeros((n, n)),
                          settings.constraints, settings.costs, settings.geo)
    violations = validate_problem(provisional)
    if violations:
        raise ValidationError(violations)
    problem = make_problem(sites, flows, settings.constraints, settings.costs, settings.geo)
    violations = validate_problem(problem)
    if violations:
        raise ValidationError(violations)
    return problem


def write_sites(path, sites):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SITES_HEADER)
        for s in sites:
            w.writerow([s.id, repr(float(s.lat)), repr(float(s.lon)), _num(s.outbound_daily),
                        _num(s.inbound_daily), int(s.is_existing_hub), int(s.is_fixed_hub)])


def write_flows(path, flows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FLOWS_HEADER)
        for f in flows:
            w.writerow([f.origin_id, f.dest_id, _num(f.shipments)])


def _num(x):
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


# ---------------------------------------------------------------- reports


def fmt(x):
    """Round a float to 9 significant digits for report output."""
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.9g}")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    return obj


def dump_json(path, obj):
    text = json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def design_payload(design, cost, problem, *, solver, feasible=True, history=(), generations_run=0,
                   rng_seed=None):
    hubs = []
    for h, load, tier, units, area in zip(design.hubs, design.loads, design.tiers, design.units, design.areas):
        hubs.append({
            "id": problem.ids[h],
            "throughput": load,
            "sorter_tier": int(tier),
            "sorter_units": int(units),
            "sorter_capacity": problem.costs.sorter_tiers[tier][0],
            "floor_area_sqft": area,
        })
    return {
        "solver": solver,
        "feasible": bool(feasible),
        "rng_seed": rng_seed,
        "milkrun_scale": problem.costs.milkrun_scale,
        "open_hubs": hubs,
        "hub_count": len(hubs),
        "assignment": design.assignment,
        "cost": cost.as_dict(),
        "breaches": {
            "milkrun_breach_count": cost.milkrun_breach_count,
            "tat_breach_shipments": cost.tat_breach_shipments,
        },
        "history": [list(h) for h in history],
        "generations_run": generations_run,
    }


def write_assignment_csv(path, design, problem):
    spoke = spoke_distances(design, problem)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["site_id", "hub_id", "distance_km"])
        for i, h in enumerate(design.hub_of):
            w.writerow([problem.ids[i], problem.ids[h], f"{spoke[i]:.9g}"])


def geojson_payload(design, problem):
    """Hub points, hub-to-DC spoke lines and line-haul lines weighted by trucks."""
    sites = problem.sites
    pt = lambda i: [sites[i].lon, sites[i].lat]
    spoke = spoke_distances(design, problem)
    features = []
    for h, load, tier, units in zip(design.hubs, design.loads, design.tiers, design.units):
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": pt(h)},
            "properties": {"kind": "hub", "id": sites[h].id, "throughput": load,
                           "sorter_tier": int(tier), "sorter_units": int(units),
                           "existing": sites[h].is_existing_hub, "fixed": sites[h].is_fixed_hub},
        })
    for i, h in enumerate(design.hub_of):
        if i == h:
            continue
        features.append({
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": [pt(h), pt(i)]},
            "properties": {"kind": "spoke", "hub": sites[h].id, "site": sites[i].id,
                           "distance_km": spoke[i],
                           "breach": bool(spoke[i] > problem.costs.milkrun_max_km)},
        })
    for g, h, vol, trucks in zip(*line_haul_legs(design, problem)):
        features.append({
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": [pt(g), pt(h)]},
            "properties": {"kind": "line_haul", "from": sites[g].id, "to": sites[h].id,
                           "shipments": vol, "trucks": int(trucks)},
        })
    return {"type": "FeatureCollection", "features": features}


def ensure_dir(out_dir):
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create output directory {out_dir}: {exc}") from None
    if not os.access(out_dir, os.W_OK):
        raise InputError(f"output directory {out_dir} is not writable")
    return Path(out_dir)


def write_reports(out_dir, problem, design, cost, *, solver, feasible=True, history=(),
                  generations_run=0, rng_seed=None, meta=None):
    """Write ``design.json``, ``assignment.csv``, ``network.geojson`` and ``meta.json``."""
    out = ensure_dir(out_dir)
    try:
        dump_json(out / "design.json", design_payload(
            design, cost, problem, solver=solver, feasible=feasible, history=history,
            generations_run=generations_run, rng_seed=rng_seed))
        write_assignment_csv(out / "assignment.csv", design, problem)
        dump_json(out / "network.geojson", geojson_payload(design, problem))
        if meta is not None:
            (out / "meta.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write reports to {out}: {exc}") from None
    return out


def read_design_hubs(path):
    """Hub ids listed in a ``design.json``."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return [h["id"] for h in data["open_hubs"]]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read hub list from {path}: {exc}") from None


def plan_payload(plan, radius_km):
    return {
        "radius_km": radius_km,
        "final_hubs": plan.final_hubs,
        "hub_count": len(plan.final_hubs),
        "substitutions": [
            {"recommended": r, "kept_existing": e, "distance_km": dist} for r, e, dist in plan.substitutions
        ],
        "hubs_to_open": plan.hubs_to_open,
        "hubs_to_close": plan.hubs_to_close,
        "final_cost": plan.final_cost.as_dict(),
        "baseline_cost": plan.baseline_cost.as_dict() if plan.baseline_cost else None,
        "breach_reduction_pct": plan.breach_reduction,
        "final_assignment": plan.final_design.assignment,
    }


def hubs_chromosome(hub_ids, problem):
    try:
        return chromosome_from_hubs(hub_ids, problem)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
