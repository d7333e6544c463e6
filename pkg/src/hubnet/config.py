"""Flat ``key = value`` configuration files.

Every field of :class:`Constraints`, :class:`CostParams`, :class:`GeoParams`
and :class:`GaConfig` is a key; anything else is rejected so that typos fail
loudly. Lines starting with ``#`` (and trailing ``# ...``) are comments.

Value syntax:

* numbers in plain decimal notation (``1e6`` also accepted)
* ``sorter_tiers = 20000:8000, 60000:18000, 150000:35000`` (capacity:cost/day)
* ``hub_count_max = auto`` means "number of sites"
* ``mutation_rate_per_bit = auto`` means ``1 / number of sites``
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .errors import ConfigError
from .ga import GaConfig
from .geo import GeoParams
from .model import Constraints, CostParams

SECTIONS = {
    "constraints": Constraints,
    "costs": CostParams,
    "geo": GeoParams,
    "ga": GaConfig,
}

AUTO_KEYS = {"hub_count_max", "mutation_rate_per_bit"}
INT_KEYS = {
    "hub_count_min", "hub_count_max", "min_dcs_per_hub",
    "population_size", "generations", "tournament_size", "elite_count",
    "rng_seed", "stall_generations", "workers",
}


@dataclass(frozen=True)
class Settings:
    constraints: Constraints = field(default_factory=Constraints)
    costs: CostParams = field(default_factory=CostParams)
    geo: GeoParams = field(default_factory=GeoParams)
    ga: GaConfig = field(default_factory=GaConfig)

    def replace(self, section, **changes):
        return dataclasses.replace(self, **{section: dataclasses.replace(getattr(self, section), **changes)})


def _key_table():
    table = {}
    for section, cls in SECTIONS.items():
        for f in dataclasses.fields(cls):
            table[f.name] = (section, f)
    return table


KEYS = _key_table()


def _parse_tiers(text):
    tiers = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        cap, sep, cost = chunk.partition(":")
        if not sep:
            raise ValueError(f"tier {chunk!r} must look like capacity:cost")
        tiers.append((float(cap), float(cost)))
    if not tiers:
        raise ValueError("sorter_tiers is empty")
    return tuple(tiers)


def _parse_int(text):
    try:
        return int(text)
    except ValueError:
        value = float(text)
    if value != int(value):
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


def parse_value(key, text):
    text = text.strip()
    if key in AUTO_KEYS and text.lower() in ("auto", "none"):
        return None
    if key == "sorter_tiers":
        return _parse_tiers(text)
    if key in INT_KEYS:
        return _parse_int(text)
    return float(text)


def parse_config(text, source="<config>"):
    """Parse config text into :class:`Settings`."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        if key not in KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = parse_value(key, value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from None
    grouped = {name: {} for name in SECTIONS}
    for key, value in values.items():
        grouped[KEYS[key][0]][key] = value
    try:
        return Settings(**{name: cls(**grouped[name]) for name, cls in SECTIONS.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path):
    if path is None:
        return Settings()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(path))


def _format_value(value):
    if value is None:
        return "auto"
    if isinstance(value, tuple):
        return ", ".join(f"{c!r}:{k!r}" for c, k in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_config(settings=Settings()):
    """Render settings as a config file; with no argument, the documented defaults."""
    lines = ["# hubnet configuration (key = value)"]
    for name in SECTIONS:
        obj = getattr(settings, name)
        lines.append("")
        lines.append(f"# --- {name} ---")
        for f in dataclasses.fields(obj):
            lines.append(f"{f.name} = {_format_value(getattr(obj, f.name))}")
    return "\n".join(lines) + "\n"
