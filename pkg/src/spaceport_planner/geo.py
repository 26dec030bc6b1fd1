"""Spherical-earth geodesy: distances, azimuth rays, hazard wedges, containment.

Everything here is a pure function over immutable values.  The sphere radius
is shared with the astrodynamics constants so distances and rotational
velocities agree.  Point-in-polygon runs in a local gnomonic projection, in
which great-circle arcs map to straight lines, so the geodesic wedge edges
are represented exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .astro import EARTH

EARTH_RADIUS_KM = EARTH.radius_km

__all__ = [
    "GeoPoint",
    "GeoPolygon",
    "great_circle_distance",
    "initial_bearing",
    "project_along_azimuth",
    "build_wedge",
    "contains",
    "contains_many",
    "polygon_to_geojson",
]

KM_PER_MILE = 1.609344


@dataclass(frozen=True)
class GeoPoint:
    """Latitude/longitude in degrees; longitude normalized to [-180, 180)."""

    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat}")
        if not math.isfinite(self.lon):
            raise ValueError(f"longitude not finite: {self.lon}")
        object.__setattr__(self, "lon", (self.lon + 180.0) % 360.0 - 180.0)


@dataclass(frozen=True)
class GeoPolygon:
    """Closed ring of vertices (closure implied, first vertex not repeated)."""

    vertices: tuple[GeoPoint, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        for a, b in zip(self.vertices, self.vertices[1:] + self.vertices[:1]):
            if a == b:
                raise ValueError("consecutive duplicate vertices")


def great_circle_distance(a: GeoPoint, b: GeoPoint, radius_km: float = EARTH_RADIUS_KM) -> float:
    """Haversine distance in kilometers."""
    phi1, phi2 = math.radians(a.lat), math.radians(b.lat)
    dphi = phi2 - phi1
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * radius_km * math.asin(min(1.0, math.sqrt(h)))


def initial_bearing(a: GeoPoint, b: GeoPoint) -> float:
    """Forward azimuth from a to b, degrees clockwise from North in [0, 360)."""
    phi1, phi2 = math.radians(a.lat), math.radians(b.lat)
    dlam = math.radians(b.lon - a.lon)
    y = math.sin(dlam) * math.cos(phi2)
    x = math.cos(phi1) * math.sin(phi2) - math.sin(phi1) * math.cos(phi2) * math.cos(dlam)
    return math.degrees(math.atan2(y, x)) % 360.0


def project_along_azimuth(
    origin: GeoPoint,
    azimuth_deg: float,
    range_km: float,
    radius_km: float = EARTH_RADIUS_KM,
) -> GeoPoint:
    """Destination point by the direct spherical geodesic formula."""
    if range_km < 0:
        raise ValueError(f"range must be non-negative: {range_km}")
    if not 0.0 <= azimuth_deg < 360.0:
        raise ValueError(f"azimuth must be in [0, 360): {azimuth_deg}")
    if range_km == 0.0:
        return origin
    delta = range_km / radius_km
    theta = math.radians(azimuth_deg)
    phi1 = math.radians(origin.lat)
    lam1 = math.radians(origin.lon)
    sin_phi2 = math.sin(phi1) * math.cos(delta) + math.cos(phi1) * math.sin(delta) * math.cos(theta)
    sin_phi2 = max(-1.0, min(1.0, sin_phi2))
    phi2 = math.asin(sin_phi2)
    lam2 = lam1 + math.atan2(
        math.sin(theta) * math.sin(delta) * math.cos(phi1),
        math.cos(delta) - math.sin(phi1) * sin_phi2,
    )
    return GeoPoint(math.degrees(phi2), math.degrees(lam2))


def build_wedge(
    origin: GeoPoint,
    azimuth_deg: float,
    buffer_deg: float,
    range_km: float,
    samples_per_edge: int = 8,
    arc_samples: int | None = None,
) -> GeoPolygon:
    """Hazard wedge: origin, two geodesic edges at azimuth +- buffer, outer arc.

    Vertex count is 2*samples_per_edge + arc_samples - 1: the apex, then
    samples_per_edge - 1 interior points out along the azimuth-buffer edge,
    arc_samples points across the outer arc (corners included), and
    samples_per_edge - 1 points back down the azimuth+buffer edge.
    """
    if buffer_deg <= 0:
        raise ValueError(f"buffer angle must be positive: {buffer_deg}")
    if buffer_deg >= 90.0:
        raise ValueError(f"buffer angle {buffer_deg} deg makes a degenerate wedge")
    if range_km <= 0:
        raise ValueError(f"range must be positive: {range_km}")
    if samples_per_edge < 2:
        raise ValueError(f"need at least 2 samples per edge: {samples_per_edge}")
    if arc_samples is None:
        arc_samples = max(2, int(math.ceil(2.0 * buffer_deg)) + 1)
    if arc_samples < 2:
        raise ValueError(f"need at least 2 arc samples: {arc_samples}")

    left = (azimuth_deg - buffer_deg) % 360.0
    right = (azimuth_deg + buffer_deg) % 360.0
    s = samples_per_edge
    verts: list[GeoPoint] = [origin]
    for k in range(1, s):
        verts.append(project_along_azimuth(origin, left, range_km * k / s))
    for k in range(arc_samples):
        bearing = (left + 2.0 * buffer_deg * k / (arc_samples - 1)) % 360.0
        verts.append(project_along_azimuth(origin, bearing, range_km))
    for k in range(s - 1, 0, -1):
        verts.append(project_along_azimuth(origin, right, range_km * k / s))
    return GeoPolygon(tuple(verts))


def _gnomonic_center(poly: GeoPolygon) -> tuple[float, float, float]:
    """Projection center (unit vector) at the spherical mean of the vertices."""
    x = y = z = 0.0
    for v in poly.vertices:
        phi, lam = math.radians(v.lat), math.radians(v.lon)
        x += math.cos(phi) * math.cos(lam)
        y += math.cos(phi) * math.sin(lam)
        z += math.sin(phi)
    norm = math.sqrt(x * x + y * y + z * z)
    return x / norm, y / norm, z / norm


def _gnomonic_xy(
    center: tuple[float, float, float], lats: np.ndarray, lons: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Project points onto the tangent plane at `center`.

    Returns (x, y, valid); points at or beyond 90 degrees from the center are
    marked invalid (they cannot be inside a sub-quarter-sphere wedge).
    """
    cx, cy, cz = center
    # local east/north basis at the center
    phi_c = math.asin(cz)
    lam_c = math.atan2(cy, cx)
    ex = (-math.sin(lam_c), math.cos(lam_c), 0.0)
    nx = (
        -math.sin(phi_c) * math.cos(lam_c),
        -math.sin(phi_c) * math.sin(lam_c),
        math.cos(phi_c),
    )
    phi = np.radians(lats)
    lam = np.radians(lons)
    px = np.cos(phi) * np.cos(lam)
    py = np.cos(phi) * np.sin(lam)
    pz = np.sin(phi)
    dot = px * cx + py * cy + pz * cz
    valid = dot > 1e-12
    safe = np.where(valid, dot, 1.0)
    x = (px * ex[0] + py * ex[1] + pz * ex[2]) / safe
    y = (px * nx[0] + py * nx[1] + pz * nx[2]) / safe
    return x, y, valid


_EDGE_EPS = 1e-12


def contains_many(poly: GeoPolygon, lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
    """Vectorized membership test; points on an edge count as inside."""
    center = _gnomonic_center(poly)
    vlats = np.array([v.lat for v in poly.vertices])
    vlons = np.array([v.lon for v in poly.vertices])
    vx, vy, _ = _gnomonic_xy(center, vlats, vlons)
    px, py, valid = _gnomonic_xy(center, np.asarray(lats, float), np.asarray(lons, float))

    inside = np.zeros(px.shape, dtype=bool)
    on_edge = np.zeros(px.shape, dtype=bool)
    n = len(vx)
    for i in range(n):
        x1, y1 = vx[i], vy[i]
        x2, y2 = vx[(i + 1) % n], vy[(i + 1) % n]
        # ray-crossing toward +x
        crosses = (y1 > py) != (y2 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_int = x1 + (py - y1) / (y2 - y1) * (x2 - x1)
        inside ^= crosses & (px < x_int)
        # edge-inclusive convention
        dx, dy = x2 - x1, y2 - y1
        seg_len2 = dx * dx + dy * dy
        t = ((px - x1) * dx + (py - y1) * dy) / seg_len2
        t = np.clip(t, 0.0, 1.0)
        dist2 = (x1 + t * dx - px) ** 2 + (y1 + t * dy - py) ** 2
        on_edge |= dist2 <= _EDGE_EPS
    return (inside | on_edge) & valid


def contains(poly: GeoPolygon, p: GeoPoint) -> bool:
    """Membership test for a single point (edge-inclusive)."""
    return bool(contains_many(poly, np.array([p.lat]), np.array([p.lon]))[0])


def polygon_to_geojson(poly: GeoPolygon) -> dict:
    """GeoJSON Polygon with [lon, lat] coordinate order and an explicit closing vertex."""
    ring = [[v.lon, v.lat] for v in poly.vertices]
    ring.append(ring[0])
    return {"type": "Polygon", "coordinates": [ring]}
