"""CSV loaders for the four input datasets: counties, population grid,
historical launches, and flight tracks.

Schemas (headers are mandatory and checked):

* counties.csv:  fips,name,state,lat,lon,mean_commute_minutes,median_house_value_usd
* popgrid.csv:   a sidecar first line ``# cell_size_deg=<float>`` then
                 lat,lon,population
* launches.csv:  date,semi_major_axis_km,inclination_deg  (ISO dates)
* flights.csv:   flight_id,timestamp_utc,lat,lon  (long format, one sample
                 per row, samples of one flight contiguous and time-ordered)

Loaders validate and abort on the first malformed row; they never repair.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .geo import GeoPoint, great_circle_distance

__all__ = [
    "IngestError",
    "CountyRecord",
    "PopulationCell",
    "PopulationGridBounds",
    "LaunchRecord",
    "FlightTrack",
    "load_counties",
    "load_population_grid",
    "load_launch_history",
    "load_flight_tracks",
    "annual_launch_series",
]

DEFAULT_TRACK_SPACING_KM = 10.0


class IngestError(ValueError):
    """Malformed input data; message carries file, row number, and field."""


@dataclass(frozen=True)
class CountyRecord:
    fips: str
    name: str
    state: str
    centroid: GeoPoint
    mean_commute_minutes: float
    median_house_value_usd: float


@dataclass(frozen=True)
class PopulationCell:
    center: GeoPoint
    population: int


@dataclass(frozen=True)
class PopulationGridBounds:
    min_lat: float
    max_lat: float
    min_lon: float
    max_lon: float

    def __post_init__(self) -> None:
        if self.min_lat >= self.max_lat or self.min_lon >= self.max_lon:
            raise ValueError("degenerate grid bounds")

    def farthest_corner_km(self, p: GeoPoint) -> float:
        """Distance from p to the farthest corner of the bounds."""
        corners = [
            GeoPoint(self.min_lat, self.min_lon),
            GeoPoint(self.min_lat, self.max_lon),
            GeoPoint(self.max_lat, self.min_lon),
            GeoPoint(self.max_lat, self.max_lon),
        ]
        return max(great_circle_distance(p, c) for c in corners)


@dataclass(frozen=True)
class LaunchRecord:
    epoch: dt.date
    semi_major_axis_km: float
    inclination_deg: float


@dataclass(frozen=True)
class FlightTrack:
    flight_id: str
    samples: tuple[tuple[dt.datetime, GeoPoint], ...]


def _rows(path: Path, expected_header: list[str]) -> Iterator[tuple[int, dict[str, str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file, expected header {expected_header}")
        if header != expected_header:
            missing = [c for c in expected_header if c not in header]
            extra = [c for c in header if c not in expected_header]
            raise IngestError(
                f"{path}: header mismatch (missing {missing or 'none'}, unexpected {extra or 'none'})"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected_header):
                raise IngestError(f"{path}:{lineno}: expected {len(expected_header)} fields, got {len(row)}")
            yield lineno, dict(zip(expected_header, row))


def _parse_float(path: Path, lineno: int, field: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise IngestError(f"{path}:{lineno}: field '{field}' is not a number: {raw!r}")


def _parse_point(path: Path, lineno: int, lat_raw: str, lon_raw: str) -> GeoPoint:
    lat = _parse_float(path, lineno, "lat", lat_raw)
    lon = _parse_float(path, lineno, "lon", lon_raw)
    if not -90.0 <= lat <= 90.0:
        raise IngestError(f"{path}:{lineno}: field 'lat' out of range: {lat}")
    if not -180.0 <= lon < 360.0:
        raise IngestError(f"{path}:{lineno}: field 'lon' out of range: {lon}")
    return GeoPoint(lat, lon)


COUNTY_HEADER = ["fips", "name", "state", "lat", "lon", "mean_commute_minutes", "median_house_value_usd"]


def load_counties(path: str | Path) -> list[CountyRecord]:
    path = Path(path)
    records: list[CountyRecord] = []
    seen: dict[str, int] = {}
    for lineno, row in _rows(path, COUNTY_HEADER):
        fips = row["fips"].strip()
        if len(fips) != 5:
            raise IngestError(f"{path}:{lineno}: field 'fips' must be 5 characters: {fips!r}")
        if fips in seen:
            raise IngestError(f"{path}:{lineno}: duplicate fips {fips} (first at line {seen[fips]})")
        seen[fips] = lineno
        commute = _parse_float(path, lineno, "mean_commute_minutes", row["mean_commute_minutes"])
        house = _parse_float(path, lineno, "median_house_value_usd", row["median_house_value_usd"])
        if commute < 0:
            raise IngestError(f"{path}:{lineno}: field 'mean_commute_minutes' negative: {commute}")
        if house < 0:
            raise IngestError(f"{path}:{lineno}: field 'median_house_value_usd' negative: {house}")
        records.append(
            CountyRecord(
                fips=fips,
                name=row["name"],
                state=row["state"],
                centroid=_parse_point(path, lineno, row["lat"], row["lon"]),
                mean_commute_minutes=commute,
                median_house_value_usd=house,
            )
        )
    return records


POPGRID_HEADER = ["lat", "lon", "population"]


def load_population_grid(path: str | Path) -> tuple[list[PopulationCell], PopulationGridBounds]:
    """Load grid cells plus bounds (cell centers expanded by half a cell)."""
    path = Path(path)
    with open(path) as fh:
        first = fh.readline().strip()
    if not first.startswith("# cell_size_deg="):
        raise IngestError(f"{path}: missing '# cell_size_deg=<deg>' sidecar line")
    try:
        cell_size = float(first.split("=", 1)[1])
    except ValueError:
        raise IngestError(f"{path}: bad cell size in sidecar line: {first!r}")
    if cell_size <= 0:
        raise IngestError(f"{path}: cell size must be positive: {cell_size}")

    cells: list[PopulationCell] = []
    with open(path, newline="") as fh:
        fh.readline()  # sidecar
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != POPGRID_HEADER:
            raise IngestError(f"{path}: header mismatch, expected {POPGRID_HEADER}, got {header}")
        for lineno, row in enumerate(reader, start=3):
            if not row:
                continue
            if len(row) != 3:
                raise IngestError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            center = _parse_point(path, lineno, row[0], row[1])
            try:
                population = int(row[2])
            except ValueError:
                raise IngestError(f"{path}:{lineno}: field 'population' is not an integer: {row[2]!r}")
            if population < 0:
                raise IngestError(f"{path}:{lineno}: field 'population' negative: {population}")
            cells.append(PopulationCell(center, population))
    if not cells:
        raise IngestError(f"{path}: population grid has no cells")
    half = cell_size / 2.0
    bounds = PopulationGridBounds(
        min_lat=min(c.center.lat for c in cells) - half,
        max_lat=max(c.center.lat for c in cells) + half,
        min_lon=min(c.center.lon for c in cells) - half,
        max_lon=max(c.center.lon for c in cells) + half,
    )
    return cells, bounds


LAUNCH_HEADER = ["date", "semi_major_axis_km", "inclination_deg"]


def load_launch_history(path: str | Path) -> list[LaunchRecord]:
    path = Path(path)
    records: list[LaunchRecord] = []
    for lineno, row in _rows(path, LAUNCH_HEADER):
        try:
            epoch = dt.date.fromisoformat(row["date"])
        except ValueError:
            raise IngestError(f"{path}:{lineno}: field 'date' is not an ISO date: {row['date']!r}")
        sma = _parse_float(path, lineno, "semi_major_axis_km", row["semi_major_axis_km"])
        inc = _parse_float(path, lineno, "inclination_deg", row["inclination_deg"])
        if sma <= 6378.137:
            raise IngestError(f"{path}:{lineno}: semi-major axis below Earth radius: {sma}")
        if not 0.0 <= inc <= 180.0:
            raise IngestError(f"{path}:{lineno}: inclination out of [0, 180]: {inc}")
        records.append(LaunchRecord(epoch, sma, inc))
    return records


FLIGHT_HEADER = ["flight_id", "timestamp_utc", "lat", "lon"]


def load_flight_tracks(
    path: str | Path, min_spacing_km: float = DEFAULT_TRACK_SPACING_KM
) -> list[FlightTrack]:
    """Load tracks, downsampling to at least `min_spacing_km` between kept samples.

    The first sample of each flight is always kept.  Set min_spacing_km=0 to
    keep every sample.
    """
    path = Path(path)
    tracks: list[FlightTrack] = []
    current_id: str | None = None
    samples: list[tuple[dt.datetime, GeoPoint]] = []
    seen_ids: set[str] = set()

    def flush() -> None:
        if current_id is not None:
            tracks.append(FlightTrack(current_id, tuple(samples)))

    for lineno, row in _rows(path, FLIGHT_HEADER):
        fid = row["flight_id"].strip()
        if not fid:
            raise IngestError(f"{path}:{lineno}: empty flight_id")
        try:
            ts = dt.datetime.fromisoformat(row["timestamp_utc"])
        except ValueError:
            raise IngestError(f"{path}:{lineno}: bad timestamp: {row['timestamp_utc']!r}")
        point = _parse_point(path, lineno, row["lat"], row["lon"])
        if fid != current_id:
            if fid in seen_ids:
                raise IngestError(f"{path}:{lineno}: flight {fid} rows are not contiguous")
            flush()
            seen_ids.add(fid)
            current_id = fid
            samples = [(ts, point)]
            continue
        if ts < samples[-1][0]:
            raise IngestError(f"{path}:{lineno}: timestamps for flight {fid} go backwards")
        if min_spacing_km <= 0 or great_circle_distance(samples[-1][1], point) >= min_spacing_km:
            samples.append((ts, point))
    flush()
    return tracks


def annual_launch_series(records: list[LaunchRecord]) -> list[tuple[int, int]]:
    """Launches per calendar year, zero-filled over the min..max year span."""
    if not records:
        return []
    counts: dict[int, int] = {}
    for r in records:
        counts[r.epoch.year] = counts.get(r.epoch.year, 0) + 1
    years = range(min(counts), max(counts) + 1)
    return [(y, counts.get(y, 0)) for y in years]
