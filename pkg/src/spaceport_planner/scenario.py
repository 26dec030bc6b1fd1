"""Experiment grid orchestration: hazard sizes x traffic levels x cost
weightings, with cached feasibility scans and deterministic reports.

Dollar figures are reported only for cost components that natively carry
dollars (rerouting, operation proxy); launch costs stay in km/s and
normalized form.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .astro import EarthConstants, EARTH
from .geo import build_wedge, polygon_to_geojson
from .hazard import (
    FeasibleAzimuthSet,
    HazardConfig,
    RerouteConfig,
    scan_feasible_azimuths,
    wedge_range_km,
)
from .ingest import CountyRecord, FlightTrack, PopulationCell, PopulationGridBounds
from .missions import MissionType
from .model import (
    ModelInfeasibleError,
    ScenarioWeights,
    build_cost_bundle,
    build_model,
)
from .solve import PlanSolution, solve

__all__ = [
    "Configuration",
    "SweepInputs",
    "SweepRow",
    "SweepReport",
    "ScanCache",
    "scenario_weights",
    "run_sweep",
    "regional_rollup",
    "write_report",
]

HAZARD_SIZES = (5.0, 7.5, 10.0)
TRAFFIC_TAGS = ("low", "high")
SCENARIO_TAGS = ("S1", "S2", "S3", "S4")

_SCENARIO_WEIGHTS = {
    "S1": ScenarioWeights(1.0, 1.0, 1.0, 1.0),
    "S2": ScenarioWeights(1.0, 1.0, 10.0, 1.0),
    "S3": ScenarioWeights(1.0, 1.0, 1.0, 10.0),
    "S4": ScenarioWeights(10.0, 10.0, 1.0, 1.0),
}


def scenario_weights(tag: str) -> ScenarioWeights:
    """Cost weighting per scenario tag (transport, operation, launch, reroute)."""
    try:
        return _SCENARIO_WEIGHTS[tag]
    except KeyError:
        raise ValueError(f"unknown scenario tag: {tag!r} (expected one of {SCENARIO_TAGS})")


@dataclass(frozen=True)
class Configuration:
    buffer_deg: float
    traffic: str
    scenario: str

    def __post_init__(self) -> None:
        if self.traffic not in TRAFFIC_TAGS:
            raise ValueError(f"unknown traffic tag: {self.traffic!r}")
        scenario_weights(self.scenario)

    @property
    def label(self) -> str:
        return f"xi{self.buffer_deg:g}_{self.traffic}_{self.scenario}"


def full_grid() -> list[Configuration]:
    return [
        Configuration(xi, traffic, scen)
        for xi in HAZARD_SIZES
        for traffic in TRAFFIC_TAGS
        for scen in SCENARIO_TAGS
    ]


@dataclass
class SweepInputs:
    counties: list[CountyRecord]
    cells: list[PopulationCell]
    bounds: PopulationGridBounds
    tracks: dict[str, list[FlightTrack]]  # keyed by traffic tag
    missions: list[MissionType]
    region_map: dict[str, str] | None = None

    def dataset_key(self) -> str:
        """Content hash of the geography inputs, for scan caching."""
        h = hashlib.sha256()
        for c in self.counties:
            h.update(f"{c.fips},{c.centroid.lat},{c.centroid.lon}".encode())
        for cell in self.cells:
            h.update(f"{cell.center.lat},{cell.center.lon},{cell.population}".encode())
        return h.hexdigest()[:16]


@dataclass
class ScanCache:
    """Feasibility scans keyed by (dataset hash, buffer angle)."""

    entries: dict[tuple[str, float], dict[str, FeasibleAzimuthSet]] = field(default_factory=dict)
    hits: int = 0
    misses: int = 0

    def get(
        self, inputs: SweepInputs, hazard_cfg: HazardConfig
    ) -> dict[str, FeasibleAzimuthSet]:
        key = (inputs.dataset_key(), hazard_cfg.buffer_deg)
        if key in self.entries:
            self.hits += 1
            return self.entries[key]
        self.misses += 1
        sets = {
            c.fips: scan_feasible_azimuths(c, inputs.cells, inputs.bounds, hazard_cfg)
            for c in inputs.counties
        }
        self.entries[key] = sets
        return sets


@dataclass
class SweepRow:
    config: Configuration
    solution: PlanSolution | None
    error: str | None = None
    reroute_usd_per_year: float = 0.0
    operation_usd_total: float = 0.0
    rollup: dict[int, dict[str, float]] = field(default_factory=dict)
    overlays: dict | None = None  # GeoJSON FeatureCollection of selected wedges


@dataclass
class SweepReport:
    rows: list[SweepRow]
    cache_hits: int = 0
    cache_misses: int = 0


def regional_rollup(
    solution: PlanSolution,
    region_map: dict[str, str],
    n_missions: int,
) -> dict[int, dict[str, float]]:
    """Percent of each mission type's allocation served per region.

    Shares for a mission type sum to 100 (types with zero allocation report
    all-zero shares).  Raises on a selected county missing from the map.
    """
    regions = sorted(set(region_map.values()))
    shares: dict[int, dict[str, float]] = {}
    for j in range(n_missions):
        totals = {r: 0.0 for r in regions}
        for idx, fips in zip(solution.selected_idx, solution.selected_fips):
            if fips not in region_map:
                raise KeyError(f"county {fips} missing from the region map")
            totals[region_map[fips]] += float(solution.allocation[idx, j])
        grand = sum(totals.values())
        shares[j] = {
            r: (100.0 * v / grand if grand > 0 else 0.0) for r, v in totals.items()
        }
    return shares


def run_sweep(
    inputs: SweepInputs,
    grid: list[Configuration],
    base_hazard: HazardConfig = HazardConfig(),
    base_reroute: RerouteConfig = RerouteConfig(),
    capacity: int = 52,
    site_count: int | None = None,
    min_separation_miles: float = 300.0,
    use_conflict_reformulation: bool = True,
    consts: EarthConstants = EARTH,
    cache: ScanCache | None = None,
) -> SweepReport:
    """One solved plan per configuration; infeasible configurations are
    recorded and the sweep continues."""
    if cache is None:
        cache = ScanCache()
    bundles: dict[tuple[float, str], object] = {}
    rows: list[SweepRow] = []
    for config in grid:
        hazard_cfg = HazardConfig(
            buffer_deg=config.buffer_deg,
            azimuth_step_deg=base_hazard.azimuth_step_deg,
            pop_threshold=base_hazard.pop_threshold,
            range_km_cap=base_hazard.range_km_cap,
            samples_per_edge=base_hazard.samples_per_edge,
        )
        try:
            bundle_key = (config.buffer_deg, config.traffic)
            if bundle_key not in bundles:
                sets = cache.get(inputs, hazard_cfg)
                live = [c for c in inputs.counties if not sets[c.fips].empty]
                if not live:
                    raise ModelInfeasibleError("no county has a feasible launch azimuth")
                bundles[bundle_key] = (
                    live,
                    build_cost_bundle(
                        live,
                        inputs.missions,
                        sets,
                        inputs.tracks[config.traffic],
                        inputs.bounds,
                        hazard_cfg,
                        base_reroute,
                        inputs.cells,
                        consts,
                    ),
                )
            live, bundle = bundles[bundle_key]
            model = build_model(
                bundle,
                inputs.missions,
                scenario_weights(config.scenario),
                live,
                capacity=capacity,
                site_count=site_count,
                min_separation_miles=min_separation_miles,
                use_conflict_reformulation=use_conflict_reformulation,
            )
            solution = solve(model)
        except ModelInfeasibleError as exc:
            rows.append(SweepRow(config=config, solution=None, error=str(exc)))
            continue
        reroute_usd = solution.breakdown["reroute"]["raw"]
        operation_usd = solution.breakdown["operation"]["raw"]
        rollup = (
            regional_rollup(solution, inputs.region_map, len(inputs.missions))
            if inputs.region_map
            else {}
        )
        row = SweepRow(
            config=config,
            solution=solution,
            reroute_usd_per_year=reroute_usd,
            operation_usd_total=operation_usd,
            rollup=rollup,
        )
        row.overlays = _wedge_overlays(inputs, row, hazard_cfg, bundle)
        rows.append(row)
    return SweepReport(rows=rows, cache_hits=cache.hits, cache_misses=cache.misses)


def report_csv(report: SweepReport) -> str:
    """One CSV row per configuration (deterministic rendering)."""
    lines = [
        "buffer_deg,traffic,scenario,status,objective,selected,"
        "reroute_usd_per_year,operation_usd_total"
    ]
    for row in report.rows:
        if row.solution is None:
            lines.append(
                f"{row.config.buffer_deg:g},{row.config.traffic},{row.config.scenario},"
                f"infeasible,,,,"
            )
            continue
        sel = ";".join(row.solution.selected_fips)
        lines.append(
            f"{row.config.buffer_deg:g},{row.config.traffic},{row.config.scenario},"
            f"optimal,{row.solution.objective:.9f},{sel},"
            f"{row.reroute_usd_per_year:.2f},{row.operation_usd_total:.2f}"
        )
    return "\n".join(lines) + "\n"


def _wedge_overlays(
    inputs: SweepInputs, row: SweepRow, hazard_cfg: HazardConfig, bundle
) -> dict:
    features = []
    counties_by_fips = {c.fips: c for c in inputs.counties}
    sol = row.solution
    for idx, fips in zip(sol.selected_idx, sol.selected_fips):
        county = counties_by_fips[fips]
        azimuths = sorted(
            {float(bundle.chosen_azimuth[idx, j]) for j in range(len(inputs.missions))}
        )
        range_km = wedge_range_km(county.centroid, inputs.bounds, hazard_cfg)
        for psi in azimuths:
            wedge = build_wedge(
                county.centroid, psi, hazard_cfg.buffer_deg, range_km, hazard_cfg.samples_per_edge
            )
            features.append(
                {
                    "type": "Feature",
                    "properties": {"fips": fips, "azimuth_deg": psi},
                    "geometry": polygon_to_geojson(wedge),
                }
            )
    return {"type": "FeatureCollection", "features": features}


def write_report(report: SweepReport, out_dir: str | Path) -> None:
    """Write sweep.csv plus per-configuration plan JSON documents.

    Output is byte-identical across reruns on unchanged inputs: keys are
    sorted and no timestamps are embedded.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.csv").write_text(report_csv(report))
    for row in report.rows:
        doc: dict = {
            "configuration": {
                "buffer_deg": row.config.buffer_deg,
                "traffic": row.config.traffic,
                "scenario": row.config.scenario,
            }
        }
        if row.solution is None:
            doc["status"] = "infeasible"
            doc["error"] = row.error
        else:
            doc["status"] = "optimal"
            doc["plan"] = row.solution.to_dict()
            if row.rollup:
                doc["regional_shares_pct"] = {
                    str(j + 1): shares for j, shares in sorted(row.rollup.items())
                }
        path = out / f"plan_{row.config.label}.json"
        path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
        if row.overlays is not None:
            (out / f"wedges_{row.config.label}.geojson").write_text(
                json.dumps(row.overlays, sort_keys=True) + "\n"
            )
