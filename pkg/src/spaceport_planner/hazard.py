"""Hazard-wedge feasibility scanning and air-traffic exposure costs.

For each candidate county we sweep the full azimuth circle, build a debris
hazard wedge per azimuth, and keep the azimuths whose wedge population stays
under a threshold.  Wedges reach to the far edge of the population grid
(capped), which truncates exposure at the grid boundary.  Flight exposure
prices the closure of the wedge airspace per launch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .astro import EarthConstants, EARTH, cheapest_azimuth
from .geo import GeoPolygon, build_wedge, contains_many, great_circle_distance, initial_bearing
from .ingest import CountyRecord, FlightTrack, PopulationCell, PopulationGridBounds
from .missions import MissionType

__all__ = [
    "HazardConfig",
    "RerouteConfig",
    "FeasibleAzimuthSet",
    "ExposureReport",
    "wedge_range_km",
    "scan_feasible_azimuths",
    "population_in_wedge",
    "flights_in_wedge",
    "select_azimuth",
    "reroute_cost",
]


@dataclass(frozen=True)
class HazardConfig:
    buffer_deg: float = 5.0
    azimuth_step_deg: float = 1.0
    pop_threshold: int = 10_000  # placeholder bound, not a certified safety figure
    range_km_cap: float = 2000.0
    samples_per_edge: int = 8

    def __post_init__(self) -> None:
        if self.azimuth_step_deg <= 0 or (360.0 / self.azimuth_step_deg) % 1.0 != 0.0:
            raise ValueError(f"azimuth step must divide 360: {self.azimuth_step_deg}")
        if self.pop_threshold < 0:
            raise ValueError(f"population threshold negative: {self.pop_threshold}")
        if self.range_km_cap <= 0:
            raise ValueError(f"range cap must be positive: {self.range_km_cap}")


@dataclass(frozen=True)
class RerouteConfig:
    unit_cost_usd: float = 293.0
    closure_hours: float = 24.0
    # azimuth used per (county, mission): minimize insertion delta-v, or
    # minimize the rerouting bill instead
    objective: str = "delta_v"

    def __post_init__(self) -> None:
        if self.unit_cost_usd < 0 or not 0 < self.closure_hours <= 24.0:
            raise ValueError("bad reroute config")
        if self.objective not in ("delta_v", "reroute"):
            raise ValueError(f"unknown azimuth objective: {self.objective}")


@dataclass(frozen=True)
class FeasibleAzimuthSet:
    fips: str
    buffer_deg: float
    azimuths: tuple[float, ...]  # sorted, in [0, 360)

    def __post_init__(self) -> None:
        if any(not 0.0 <= a < 360.0 for a in self.azimuths):
            raise ValueError("azimuth out of [0, 360)")
        if any(b <= a for a, b in zip(self.azimuths, self.azimuths[1:])):
            raise ValueError("azimuths must be strictly increasing")

    @property
    def empty(self) -> bool:
        return len(self.azimuths) == 0


@dataclass(frozen=True)
class ExposureReport:
    fips: str
    azimuth_deg: float
    population_exposed: int
    flights_per_day: int
    reroute_cost_per_launch_usd: float


def wedge_range_km(
    centroid, bounds: PopulationGridBounds, config: HazardConfig
) -> float:
    """Wedge reach: to the farthest grid-bounds corner, capped for tractability."""
    return min(config.range_km_cap, bounds.farthest_corner_km(centroid))


def population_in_wedge(wedge: GeoPolygon, cells: list[PopulationCell]) -> int:
    """Total population of cells whose centers fall inside the wedge."""
    if not cells:
        return 0
    lats = np.array([c.center.lat for c in cells])
    lons = np.array([c.center.lon for c in cells])
    inside = contains_many(wedge, lats, lons)
    return int(sum(c.population for c, hit in zip(cells, inside) if hit))


def flights_in_wedge(wedge: GeoPolygon, tracks: list[FlightTrack]) -> int:
    """Distinct flights with at least one track sample inside the wedge."""
    if not tracks:
        return 0
    lats = np.concatenate([[p.lat for _, p in t.samples] for t in tracks])
    lons = np.concatenate([[p.lon for _, p in t.samples] for t in tracks])
    track_ids = np.concatenate([[k] * len(t.samples) for k, t in enumerate(tracks)])
    inside = contains_many(wedge, lats, lons)
    return int(len(np.unique(track_ids[inside])))


def _circular_diff(a: np.ndarray, b: float) -> np.ndarray:
    return np.abs((a - b + 180.0) % 360.0 - 180.0)


def scan_feasible_azimuths(
    county: CountyRecord,
    cells: list[PopulationCell],
    bounds: PopulationGridBounds,
    config: HazardConfig,
) -> FeasibleAzimuthSet:
    """Keep every azimuth whose hazard wedge stays under the population threshold.

    Cells are prefiltered by range and bearing: the wedge polygon lies inside
    the ideal spherical cone (geodesic edges have constant initial bearing
    from the apex), so a cone test with a small slack is a safe superset, and
    the exact polygon test then runs on the few surviving cells.
    """
    origin = county.centroid
    range_km = wedge_range_km(origin, bounds, config)
    dists = np.array([great_circle_distance(origin, c.center) for c in cells])
    bearings = np.array([initial_bearing(origin, c.center) for c in cells])
    pops = np.array([c.population for c in cells])

    feasible: list[float] = []
    steps = int(round(360.0 / config.azimuth_step_deg))
    for k in range(steps):
        psi = k * config.azimuth_step_deg
        near = (dists <= range_km + 1e-6) & (
            _circular_diff(bearings, psi) <= config.buffer_deg + 0.5
        )
        if pops[near].sum() <= config.pop_threshold:
            # cheap bound: even the full cone stays under the threshold
            feasible.append(psi)
            continue
        candidates = [c for c, hit in zip(cells, near) if hit]
        wedge = build_wedge(origin, psi, config.buffer_deg, range_km, config.samples_per_edge)
        if population_in_wedge(wedge, candidates) <= config.pop_threshold:
            feasible.append(psi)
    return FeasibleAzimuthSet(county.fips, config.buffer_deg, tuple(feasible))


def select_azimuth(
    county: CountyRecord,
    mission: MissionType,
    feasible: FeasibleAzimuthSet,
    reroute_cfg: RerouteConfig,
    tracks: list[FlightTrack] | None = None,
    bounds: PopulationGridBounds | None = None,
    hazard_cfg: HazardConfig | None = None,
    consts: EarthConstants = EARTH,
) -> float:
    """Choose the launch azimuth used for a (county, mission) pair.

    Default: the feasible azimuth with minimum total insertion delta-v.  With
    objective="reroute" the azimuth minimizing the rerouting bill wins
    instead (delta-v breaks ties).
    """
    if feasible.empty:
        raise ValueError(f"county {county.fips} has no feasible azimuths")
    if reroute_cfg.objective == "delta_v" or tracks is None:
        psi, _ = cheapest_azimuth(
            county.centroid.lat,
            list(feasible.azimuths),
            mission.orbit_radius_km,
            mission.inclination_deg,
            consts,
        )
        return psi
    assert bounds is not None and hazard_cfg is not None
    range_km = wedge_range_km(county.centroid, bounds, hazard_cfg)
    best: tuple[float, float, float] | None = None  # (flights, dv, psi)
    for psi in feasible.azimuths:
        wedge = build_wedge(
            county.centroid, psi, feasible.buffer_deg, range_km, hazard_cfg.samples_per_edge
        )
        flights = flights_in_wedge(wedge, tracks)
        _, res = cheapest_azimuth(
            county.centroid.lat, [psi], mission.orbit_radius_km, mission.inclination_deg, consts
        )
        key = (flights, res.total, psi)
        if best is None or key < best:
            best = key
    return best[2]


def reroute_cost(
    county: CountyRecord,
    mission: MissionType,
    azimuth_deg: float,
    feasible: FeasibleAzimuthSet,
    tracks: list[FlightTrack],
    bounds: PopulationGridBounds,
    hazard_cfg: HazardConfig,
    reroute_cfg: RerouteConfig,
    cells: list[PopulationCell] | None = None,
) -> ExposureReport:
    """Price one launch of `mission` from `county` at `azimuth_deg`.

    Cost = flights/day in the wedge x closure fraction of the day x unit cost.
    """
    if azimuth_deg not in feasible.azimuths:
        raise ValueError(
            f"azimuth {azimuth_deg} is not feasible for county {county.fips}"
        )
    range_km = wedge_range_km(county.centroid, bounds, hazard_cfg)
    wedge = build_wedge(
        county.centroid, azimuth_deg, feasible.buffer_deg, range_km, hazard_cfg.samples_per_edge
    )
    flights = flights_in_wedge(wedge, tracks)
    cost = flights * (reroute_cfg.closure_hours / 24.0) * reroute_cfg.unit_cost_usd
    return ExposureReport(
        fips=county.fips,
        azimuth_deg=azimuth_deg,
        population_exposed=population_in_wedge(wedge, cells) if cells else 0,
        flights_per_day=flights,
        reroute_cost_per_launch_usd=cost,
    )
