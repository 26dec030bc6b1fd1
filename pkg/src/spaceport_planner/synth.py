"""Deterministic synthetic datasets for tests and bundled fixtures.

The synthetic world is a rectangular continent (populated cells) surrounded
by empty ocean, with candidate counties strung along its west, south (gulf),
and east shores.  Launch histories are drawn around five representative
orbit regimes, and flight tracks are straight-line paths criss-crossing the
continent and its coastal waters.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geo import GeoPoint
from .ingest import CountyRecord, PopulationCell

__all__ = [
    "SynthWorld",
    "ORBIT_PROFILE_CENTERS",
    "ORBIT_PROFILE_WEIGHTS",
    "make_counties",
    "make_population_grid",
    "make_launches",
    "make_flight_rows",
    "region_of",
    "write_fixture_tree",
]

# (semi-major axis km, inclination deg) centers and mix weights for the
# synthetic launch history
ORBIT_PROFILE_CENTERS = np.array(
    [
        [6694.72, 54.34],
        [6990.01, 43.30],
        [7187.32, 97.78],
        [6893.20, 95.91],
        [7649.00, 75.46],
    ]
)
ORBIT_PROFILE_WEIGHTS = np.array([0.42, 0.06, 0.18, 0.31, 0.03])
ORBIT_PROFILE_SIGMA = (20.0, 1.0)  # km, degrees


@dataclass(frozen=True)
class SynthWorld:
    """Geometry of the synthetic continent."""

    grid_min_lat: float = 15.0
    grid_min_lon: float = -110.0
    cell_size_deg: float = 0.8
    grid_cells_per_side: int = 50
    land_min_lat: float = 22.0
    land_max_lat: float = 48.0
    land_min_lon: float = -104.0
    land_max_lon: float = -76.0

    @property
    def grid_max_lat(self) -> float:
        return self.grid_min_lat + self.cell_size_deg * self.grid_cells_per_side

    @property
    def grid_max_lon(self) -> float:
        return self.grid_min_lon + self.cell_size_deg * self.grid_cells_per_side


WORLD = SynthWorld()


def make_counties(world: SynthWorld = WORLD, seed: int = 7) -> list[CountyRecord]:
    """30 coastal counties: 12 west, 6 gulf, 12 east, all just offshore of land."""
    rng = np.random.default_rng(seed)
    counties: list[CountyRecord] = []

    def add(fips: str, name: str, state: str, lat: float, lon: float) -> None:
        counties.append(
            CountyRecord(
                fips=fips,
                name=name,
                state=state,
                centroid=GeoPoint(lat, lon),
                mean_commute_minutes=float(np.round(rng.uniform(12.0, 45.0), 1)),
                median_house_value_usd=float(np.round(rng.uniform(80_000, 450_000), 0)),
            )
        )

    west_lats = np.linspace(world.land_min_lat + 1.0, world.land_max_lat - 1.0, 12)
    for k, lat in enumerate(west_lats):
        add(f"90{k:03d}", f"West County {k + 1:02d}", "XW", float(lat), world.land_min_lon - 1.2)
    gulf_lons = np.linspace(world.land_min_lon + 4.0, world.land_max_lon - 4.0, 6)
    for k, lon in enumerate(gulf_lons):
        add(f"91{k:03d}", f"Gulf County {k + 1:02d}", "XG", world.land_min_lat - 1.2, float(lon))
    east_lats = np.linspace(world.land_min_lat + 1.0, world.land_max_lat - 1.0, 12)
    for k, lat in enumerate(east_lats):
        add(f"92{k:03d}", f"East County {k + 1:02d}", "XE", float(lat), world.land_max_lon + 1.2)
    return counties


def region_of(county: CountyRecord) -> str:
    return {"XW": "West", "XG": "Gulf", "XE": "East"}[county.state]


def make_population_grid(world: SynthWorld = WORLD, seed: int = 11) -> list[PopulationCell]:
    """Grid cells with population only over the land rectangle."""
    rng = np.random.default_rng(seed)
    cells: list[PopulationCell] = []
    for r in range(world.grid_cells_per_side):
        for c in range(world.grid_cells_per_side):
            lat = world.grid_min_lat + (r + 0.5) * world.cell_size_deg
            lon = world.grid_min_lon + (c + 0.5) * world.cell_size_deg
            on_land = (
                world.land_min_lat <= lat <= world.land_max_lat
                and world.land_min_lon <= lon <= world.land_max_lon
            )
            pop = int(rng.integers(2_000, 60_000)) if on_land else 0
            cells.append(PopulationCell(GeoPoint(lat, lon), pop))
    return cells


def make_launches(
    n: int = 1000,
    seed: int = 13,
    first_year: int = 1989,
    last_year: int = 2023,
) -> list[tuple[dt.date, float, float]]:
    """Synthetic launch history with a rising annual trend.

    Returns (date, semi-major axis km, inclination deg) rows sorted by date.
    """
    rng = np.random.default_rng(seed)
    years = np.arange(first_year, last_year + 1)
    year_weights = np.linspace(1.0, 4.0, len(years))
    year_weights /= year_weights.sum()
    rows = []
    for _ in range(n):
        profile = rng.choice(len(ORBIT_PROFILE_WEIGHTS), p=ORBIT_PROFILE_WEIGHTS)
        a = float(rng.normal(ORBIT_PROFILE_CENTERS[profile, 0], ORBIT_PROFILE_SIGMA[0]))
        inc = float(np.clip(rng.normal(ORBIT_PROFILE_CENTERS[profile, 1], ORBIT_PROFILE_SIGMA[1]), 0.0, 180.0))
        year = int(rng.choice(years, p=year_weights))
        day = dt.date(year, 1, 1) + dt.timedelta(days=int(rng.integers(0, 365)))
        rows.append((day, round(a, 2), round(inc, 2)))
    rows.sort(key=lambda r: r[0])
    return rows


def make_flight_rows(
    n_flights: int,
    seed: int,
    world: SynthWorld = WORLD,
    samples_per_flight: int = 24,
    day: dt.date = dt.date(2022, 2, 12),
) -> list[tuple[str, str, float, float]]:
    """Straight-line flight tracks over the continent and coastal waters.

    Returns long-format (flight_id, timestamp, lat, lon) rows.
    """
    rng = np.random.default_rng(seed)
    rows: list[tuple[str, str, float, float]] = []
    lat_lo, lat_hi = world.grid_min_lat + 1.0, world.grid_max_lat - 1.0
    lon_lo, lon_hi = world.grid_min_lon + 1.0, world.grid_max_lon - 1.0
    for f in range(n_flights):
        fid = f"F{f + 1:05d}"
        lat0, lat1 = rng.uniform(lat_lo, lat_hi, 2)
        lon0, lon1 = rng.uniform(lon_lo, lon_hi, 2)
        start = dt.datetime.combine(day, dt.time(0, 0)) + dt.timedelta(
            minutes=int(rng.integers(0, 1200))
        )
        for s in range(samples_per_flight):
            t = s / (samples_per_flight - 1)
            ts = start + dt.timedelta(minutes=5 * s)
            rows.append(
                (
                    fid,
                    ts.isoformat(),
                    round(lat0 + t * (lat1 - lat0), 4),
                    round(lon0 + t * (lon1 - lon0), 4),
                )
            )
    return rows


def write_fixture_tree(out_dir: str | Path, world: SynthWorld = WORLD) -> None:
    """Write the complete fixture dataset (CSV files plus a config.toml)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    counties = make_counties(world)
    with open(out / "counties.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["fips", "name", "state", "lat", "lon", "mean_commute_minutes", "median_house_value_usd"])
        for c in counties:
            w.writerow(
                [
                    c.fips,
                    c.name,
                    c.state,
                    f"{c.centroid.lat:.4f}",
                    f"{c.centroid.lon:.4f}",
                    c.mean_commute_minutes,
                    int(c.median_house_value_usd),
                ]
            )

    with open(out / "regions.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["fips", "region"])
        for c in counties:
            w.writerow([c.fips, region_of(c)])

    cells = make_population_grid(world)
    with open(out / "popgrid.csv", "w", newline="") as fh:
        fh.write(f"# cell_size_deg={world.cell_size_deg}\n")
        w = csv.writer(fh)
        w.writerow(["lat", "lon", "population"])
        for cell in cells:
            w.writerow([f"{cell.center.lat:.4f}", f"{cell.center.lon:.4f}", cell.population])

    with open(out / "launches.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["date", "semi_major_axis_km", "inclination_deg"])
        for day, a, inc in make_launches():
            w.writerow([day.isoformat(), a, inc])

    for tag, n_flights, seed, day in (
        ("low", 150, 17, dt.date(2022, 2, 12)),
        ("high", 300, 19, dt.date(2022, 11, 24)),
    ):
        with open(out / f"flights_{tag}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["flight_id", "timestamp_utc", "lat", "lon"])
            for row in make_flight_rows(n_flights, seed, world, day=day):
                w.writerow(row)

    (out / "config.toml").write_text(
        "[paths]\n"
        'counties = "counties.csv"\n'
        'popgrid = "popgrid.csv"\n'
        'launches = "launches.csv"\n'
        'flights_low = "flights_low.csv"\n'
        'flights_high = "flights_high.csv"\n'
        'regions = "regions.csv"\n'
        "\n"
        "[plan]\n"
        "# the synthetic world runs at a smaller launch cadence than a real\n"
        "# weekly-capacity spaceport; capacity 7 keeps six sites in play\n"
        "capacity_per_year = 7\n"
    )
