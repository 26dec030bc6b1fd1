"""Shared fixtures: bundled fixture paths, random SPFLP instances, and a tiny
hand-written dataset for fast end-to-end CLI runs."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from spaceport_planner.geo import GeoPoint
from spaceport_planner.ingest import CountyRecord
from spaceport_planner.missions import MissionType
from spaceport_planner.model import (
    CostMatrixBundle,
    ScenarioWeights,
    SpflpModel,
    build_model,
)

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURE_DIR = REPO_ROOT / "data" / "fixtures"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    assert FIXTURE_DIR.is_dir(), "bundled fixtures missing; run scripts/make_fixtures.py"
    return FIXTURE_DIR


def random_spflp_instance(seed: int, use_conflict: bool = False) -> SpflpModel:
    """Random small instance: N <= 12 counties, m = 5 missions, K <= 3 sites,
    random feasibility masks and separation distance."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(6, 13))
    m = 5
    k = int(rng.integers(2, 4))

    counties = [
        CountyRecord(
            fips=f"{10000 + i}",
            name=f"Test County {i}",
            state="XX",
            centroid=GeoPoint(float(rng.uniform(25.0, 35.0)), float(rng.uniform(-95.0, -85.0))),
            mean_commute_minutes=float(rng.uniform(10.0, 50.0)),
            median_house_value_usd=float(rng.uniform(1e5, 4e5)),
        )
        for i in range(n)
    ]

    feasible = rng.random((n, m)) < 0.85
    for i in range(n):
        if not feasible[i].any():
            feasible[i, rng.integers(m)] = True
    for j in range(m):
        if not feasible[:, j].any():
            feasible[rng.integers(n), j] = True

    bundle = CostMatrixBundle(
        fips=tuple(c.fips for c in counties),
        transport_raw=np.array([c.mean_commute_minutes for c in counties]),
        operation_raw=np.array([c.median_house_value_usd for c in counties]),
        launch_raw=rng.uniform(7.0, 12.0, (n, m)),
        reroute_raw=rng.uniform(0.0, 5e4, (n, m)),
        feasible_pair=feasible,
    )

    demands = rng.integers(1, 6, m)
    capacity = int(math.ceil(demands.sum() / k)) + int(rng.integers(0, 4))
    missions = [
        MissionType(
            index=j,
            orbit_radius_km=float(rng.uniform(6700.0, 7700.0)),
            inclination_deg=float(rng.uniform(0.0, 100.0)),
            weight=1.0 / m,
            demand=int(demands[j]),
        )
        for j in range(m)
    ]
    weights = ScenarioWeights(*(float(w) for w in rng.uniform(0.5, 5.0, 4)))
    return build_model(
        bundle,
        missions,
        weights,
        counties,
        capacity=capacity,
        site_count=k,
        min_separation_miles=float(rng.uniform(30.0, 250.0)),
        use_conflict_reformulation=use_conflict,
    )


def write_tiny_dataset(out: Path) -> Path:
    """Four offshore counties west of a small populated patch; everything is
    small enough that the full CLI pipeline (including the enumeration
    oracle) runs in a couple of seconds."""
    out.mkdir(parents=True, exist_ok=True)

    lines = ["fips,name,state,lat,lon,mean_commute_minutes,median_house_value_usd"]
    for i, lat in enumerate((1.0, 3.0, 5.0, 7.0)):
        lines.append(f"8000{i},Tiny County {i},TT,{lat},0.5,{20 + 5 * i},{150000 + 20000 * i}")
    (out / "counties.csv").write_text("\n".join(lines) + "\n")

    (out / "regions.csv").write_text(
        "fips,region\n80000,South\n80001,South\n80002,North\n80003,North\n"
    )

    lines = ["# cell_size_deg=1.0", "lat,lon,population"]
    for r in range(8):
        for c in range(8):
            pop = 50000 if c >= 4 else 0  # east half of the patch is populated
            lines.append(f"{r + 0.5},{c + 0.5},{pop}")
    (out / "popgrid.csv").write_text("\n".join(lines) + "\n")

    lines = ["date,semi_major_axis_km,inclination_deg"]
    counts = [2, 2, 3, 3, 4, 4, 5, 5, 6, 6]
    for year, count in zip(range(2014, 2024), counts):
        for k in range(count):
            sma, inc = (6700.0, 50.0) if k % 2 == 0 else (7200.0, 97.0)
            lines.append(f"{year}-0{1 + k % 9}-15,{sma + 10 * k},{inc + 0.1 * k}")
    (out / "launches.csv").write_text("\n".join(lines) + "\n")

    for tag, n_flights in (("low", 3), ("high", 6)):
        lines = ["flight_id,timestamp_utc,lat,lon"]
        for f in range(n_flights):
            for s in range(6):
                lat = 0.5 + f * 1.3 + 0.1 * s
                lon = -2.0 + 0.8 * s  # crosses the western waters
                lines.append(f"T{f:03d},2023-05-01T0{s}:00:00,{lat:.3f},{lon:.3f}")
        (out / f"flights_{tag}.csv").write_text("\n".join(lines) + "\n")

    (out / "config.toml").write_text(
        "[paths]\n"
        'counties = "counties.csv"\n'
        'popgrid = "popgrid.csv"\n'
        'launches = "launches.csv"\n'
        'flights_low = "flights_low.csv"\n'
        'flights_high = "flights_high.csv"\n'
        'regions = "regions.csv"\n'
        "\n[cluster]\nm = 2\n"
        "\n[plan]\ncapacity_per_year = 3\nmin_separation_miles = 100.0\n"
    )
    return out


@pytest.fixture()
def tiny_dataset(tmp_path: Path) -> Path:
    return write_tiny_dataset(tmp_path / "tiny")
