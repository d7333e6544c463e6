"""Great-circle distances scaled to approximate road kilometres."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, GeoDomainError

EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class GeoParams:
    earth_radius_km: float = EARTH_RADIUS_KM
    road_circuity: float = 1.3

    def __post_init__(self):
        if not self.road_circuity >= 1.0:
            raise ConfigError(f"road_circuity must be >= 1, got {self.road_circuity}")
        if not self.earth_radius_km > 0:
            raise ConfigError(f"earth_radius_km must be > 0, got {self.earth_radius_km}")


def _check_coord(lat, lon, label=None):
    where = f" (site {label})" if label is not None else ""
    if not (math.isfinite(lat) and -90.0 <= lat <= 90.0):
        raise GeoDomainError(f"latitude {lat!r} outside [-90, 90]{where}")
    if not (math.isfinite(lon) and -180.0 <= lon <= 180.0):
        raise GeoDomainError(f"longitude {lon!r} outside [-180, 180]{where}")


def haversine_km(a, b, radius_km=EARTH_RADIUS_KM):
    """Great-circle distance between two ``(lat, lon)`` points in degrees."""
    (lat1, lon1), (lat2, lon2) = a, b
    _check_coord(lat1, lon1)
    _check_coord(lat2, lon2)
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2.0 * radius_km * math.asin(math.sqrt(min(1.0, h)))


def road_km(a, b, params=GeoParams()):
    return haversine_km(a, b, params.earth_radius_km) * params.road_circuity


def build_distance_matrix(sites, params=GeoParams()):
    """Dense symmetric road-distance matrix (km) over ``sites`` in the given order.

    Entries are computed vectorised over the upper triangle and mirrored, so the
    result is exactly symmetric with a zero diagonal.
    """
    sites = list(sites)
    for s in sites:
        _check_coord(s.lat, s.lon, s.id)
    n = len(sites)
    if n == 0:
        return np.zeros((0, 0))
    lat = np.radians(np.array([s.lat for s in sites], dtype=float))
    lon = np.radians(np.array([s.lon for s in sites], dtype=float))
    dp = lat[None, :] - lat[:, None]
    dl = lon[None, :] - lon[:, None]
    cos_lat = np.cos(lat)
    h = np.sin(dp / 2) ** 2 + np.outer(cos_lat, cos_lat) * np.sin(dl / 2) ** 2
    np.minimum(h, 1.0, out=h)
    d = 2.0 * params.earth_radius_km * np.arcsin(np.sqrt(h)) * params.road_circuity
    upper = np.triu(d, 1)
    out = upper + upper.T
    out.setflags(write=False)
    return out
