"""Run configuration: one TOML document covering every stage, with strict
unknown-key rejection so sweep configs stay reproducible artifacts.

Sections and defaults:

    [paths]    counties, popgrid, launches, flights_low, flights_high, regions
    [forecast] alpha=0.6 beta=0.05 target_year=2030 default_total=273
    [cluster]  m=5 seed=42 standardize=false
    [hazard]   buffer_deg=5.0 azimuth_step_deg=1.0 pop_threshold=10000
               range_km_cap=2000.0 samples_per_edge=8
    [reroute]  unit_cost_usd=293.0 closure_hours=24.0 objective="delta_v"
    [earth]    mu=398600.4418 radius_km=6378.137 omega=7.2921159e-5
    [plan]     capacity_per_year=52 min_separation_miles=300.0
               use_conflict_reformulation=false node_limit (unset = none)
"""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .astro import EarthConstants
from .hazard import HazardConfig, RerouteConfig

__all__ = [
    "ConfigError",
    "PathsConfig",
    "ForecastConfig",
    "ClusterConfig",
    "PlanConfig",
    "RunConfig",
    "load_config",
]


class ConfigError(ValueError):
    """Bad or unknown configuration content."""


@dataclass(frozen=True)
class PathsConfig:
    counties: str = "counties.csv"
    popgrid: str = "popgrid.csv"
    launches: str = "launches.csv"
    flights_low: str = "flights_low.csv"
    flights_high: str = "flights_high.csv"
    regions: str = "regions.csv"


@dataclass(frozen=True)
class ForecastConfig:
    alpha: float = 0.6
    beta: float = 0.05
    target_year: int = 2030
    default_total: int = 273


@dataclass(frozen=True)
class ClusterConfig:
    m: int = 5
    seed: int = 42
    standardize: bool = False


@dataclass(frozen=True)
class PlanConfig:
    capacity_per_year: int = 52
    min_separation_miles: float = 300.0
    use_conflict_reformulation: bool = False
    node_limit: int | None = None
    big_m: float | None = None


@dataclass(frozen=True)
class RunConfig:
    base_dir: Path = Path(".")
    paths: PathsConfig = field(default_factory=PathsConfig)
    forecast: ForecastConfig = field(default_factory=ForecastConfig)
    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    hazard: HazardConfig = field(default_factory=HazardConfig)
    reroute: RerouteConfig = field(default_factory=RerouteConfig)
    earth: EarthConstants = field(default_factory=EarthConstants)
    plan: PlanConfig = field(default_factory=PlanConfig)

    def resolve(self, name: str) -> Path:
        """Dataset path relative to the config file's directory."""
        return self.base_dir / getattr(self.paths, name)


_SECTIONS = {
    "paths": PathsConfig,
    "forecast": ForecastConfig,
    "cluster": ClusterConfig,
    "hazard": HazardConfig,
    "reroute": RerouteConfig,
    "earth": EarthConstants,
    "plan": PlanConfig,
}


def _build_section(cls, table: dict, section: str):
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(table) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {sorted(unknown)}")
    try:
        return cls(**table)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value in [{section}]: {exc}") from exc


def load_config(path: str | Path) -> RunConfig:
    """Load a TOML config file; every key must be a documented one."""
    path = Path(path)
    with open(path, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: not valid TOML: {exc}") from exc
    unknown = set(doc) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"{path}: unknown section(s): {sorted(unknown)}")
    kwargs = {"base_dir": path.parent}
    for section, cls in _SECTIONS.items():
        table = doc.get(section, {})
        if not isinstance(table, dict):
            raise ConfigError(f"{path}: [{section}] must be a table")
        kwargs[section] = _build_section(cls, table, section)
    return RunConfig(**kwargs)
