"""Seeded synthetic instances: clustered sites, power-law volumes, gravity flows."""

from __future__ import annotations

import math

import numpy as np

from .geo import GeoParams, build_distance_matrix
from .model import FlowRecord, Site

INDIA_BBOX = (8.0, 32.0, 70.0, 90.0)  # lat_min, lat_max, lon_min, lon_max
KM_PER_DEG_LAT = 111.195


def _largest_remainder(row, total):
    """Integer vector summing exactly to ``total`` with minimal per-entry rounding."""
    base = np.floor(row)
    short = int(total - base.sum())
    if short > 0:
        frac = row - base
        # stable sort: equal remainders go to the lower index first
        base[np.argsort(-frac, kind="stable")[:short]] += 1
    return base


def gravity_flows(outbound, inbound, distances, exponent=1.0, max_iter=100, tol=1e-10, min_km=1.0):
    """Doubly constrained gravity matrix fitted by iterative proportional fitting.

    Returns integer flows with row sums exactly ``outbound`` (largest-remainder
    rounding per row). Column sums match ``inbound`` up to rounding. The
    diagonal is zero.
    """
    n = len(outbound)
    out = np.asarray(outbound, dtype=float)
    inb = np.asarray(inbound, dtype=float)
    if n < 2 or out.sum() == 0:
        return np.zeros((n, n))
    friction = np.maximum(distances, min_km) ** -exponent
    np.fill_diagonal(friction, 0.0)
    t = out[:, None] * inb[None, :] * friction
    for _ in range(max_iter):
        rs = t.sum(axis=1)
        t *= np.divide(out, rs, out=np.zeros(n), where=rs > 0)[:, None]
        cs = t.sum(axis=0)
        t *= np.divide(inb, cs, out=np.zeros(n), where=cs > 0)[None, :]
        rs = t.sum(axis=1)
        if np.max(np.abs(rs - out)) <= tol * max(1.0, out.max()):
            break
    rs = t.sum(axis=1)
    t *= np.divide(out, rs, out=np.zeros(n), where=rs > 0)[:, None]
    return np.array([_largest_remainder(t[i], out[i]) for i in range(n)])


def generate(
    n_sites,
    n_clusters,
    seed,
    profile="average",
    *,
    bbox=INDIA_BBOX,
    spread_km=60.0,
    pareto_shape=1.3,
    base_volume=30.0,
    gravity_exponent=1.0,
    festive_factor=2.75,
    n_existing=None,
    n_fixed=0,
    geo=GeoParams(),
):
    """Generate ``(sites, flows)`` for a synthetic middle-mile network.

    Cluster centres are uniform over ``bbox``; sites scatter around them with a
    normal spread of ``spread_km``. Site size follows a Pareto law so a few
    metro-scale sites dominate. The largest site of each cluster (or the
    ``n_existing`` largest overall) is flagged as an existing hub and the
    ``n_fixed`` largest of those as fixed. ``profile="peak"`` multiplies volumes
    by ``festive_factor``.

    Outbound volumes are exact row totals of the integer flow matrix; inbound
    volumes are its column totals, so flow conservation holds by construction.
    """
    if not n_sites >= n_clusters >= 1:
        raise ValueError("need n_sites >= n_clusters >= 1")
    if profile not in ("average", "peak"):
        raise ValueError(f"profile must be 'average' or 'peak', got {profile!r}")
    rng = np.random.default_rng(seed)
    lat0, lat1, lon0, lon1 = bbox
    centers = np.column_stack([rng.uniform(lat0, lat1, n_clusters), rng.uniform(lon0, lon1, n_clusters)])
    cluster = np.concatenate([np.arange(n_clusters), rng.integers(0, n_clusters, n_sites - n_clusters)])
    offs = rng.normal(0.0, spread_km, size=(n_sites, 2))
    offs[:n_clusters] = 0.0
    lat = centers[cluster, 0] + offs[:, 0] / KM_PER_DEG_LAT
    lat = np.clip(lat, -89.0, 89.0)
    lon = centers[cluster, 1] + offs[:, 1] / (KM_PER_DEG_LAT * np.cos(np.radians(lat)))
    lon = (lon + 180.0) % 360.0 - 180.0
    lat, lon = np.round(lat, 6), np.round(lon, 6)

    size = rng.pareto(pareto_shape, n_sites) + 1.0
    scale = base_volume * (festive_factor if profile == "peak" else 1.0)
    out_target = np.floor(scale * size * rng.uniform(0.7, 1.3, n_sites) + 0.5)
    in_target = scale * size * rng.uniform(0.7, 1.3, n_sites)
    in_target *= out_target.sum() / in_target.sum()

    width = max(4, len(str(n_sites - 1)))
    ids = [f"S{i:0{width}d}" for i in range(n_sites)]
    proto = [Site(ids[i], float(lat[i]), float(lon[i])) for i in range(n_sites)]
    if n_sites == 1:
        out_target[:] = 0.0
    dist = build_distance_matrix(proto, geo)
    flows = gravity_flows(out_target, in_target, dist, gravity_exponent)
    outbound = flows.sum(axis=1)
    inbound = flows.sum(axis=0)

    total = outbound + inbound
    if n_existing is None:
        existing = []
        for k in range(n_clusters):
            members = np.flatnonzero(cluster == k)
            existing.append(int(members[np.lexsort((members, -total[members]))[0]]))
    else:
        existing = list(np.lexsort((np.arange(n_sites), -total))[:n_existing])
    existing = sorted(existing, key=lambda i: (-total[i], i))
    fixed = set(existing[:n_fixed])
    existing = set(existing)

    sites = [
        Site(ids[i], float(lat[i]), float(lon[i]), float(outbound[i]), float(inbound[i]),
             i in existing, i in fixed)
        for i in range(n_sites)
    ]
    o_idx, d_idx = np.nonzero(flows)
    flow_recs = [FlowRecord(ids[o], ids[d], float(flows[o, d])) for o, d in zip(o_idx, d_idx)]
    return sites, flow_recs


def top_decile_share(sites):
    """Share of total volume carried by the largest 10% of sites."""
    vols = np.sort([s.outbound_daily + s.inbound_daily for s in sites])[::-1]
    k = max(1, math.ceil(0.1 * len(vols)))
    total = vols.sum()
    return float(vols[:k].sum() / total) if total > 0 else 0.0
