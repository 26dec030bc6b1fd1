"""Launch delta-v cost model on a rotating spherical Earth.

A launch from latitude ``phi`` at azimuth ``psi`` buys the rocket a free
velocity contribution from Earth's rotation.  The insertion cost splits into
``dv1`` (getting up to circular orbit speed) and ``dv2`` (a single-impulse
plane change from the inclination actually achieved to the mission target).
All angles cross this API in degrees; radians are internal only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "EarthConstants",
    "LaunchGeometry",
    "InsertionResult",
    "EARTH",
    "circular_orbit_speed",
    "launch_dv",
    "achieved_azimuth",
    "achieved_inclination",
    "plane_change_dv",
    "insertion_cost",
    "cheapest_azimuth",
]


@dataclass(frozen=True)
class EarthConstants:
    """Gravitational parameter (km^3/s^2), radius (km), rotation rate (rad/s)."""

    mu: float = 398600.4418
    radius_km: float = 6378.137
    omega: float = 7.2921159e-5

    def __post_init__(self) -> None:
        if self.mu <= 0 or self.radius_km <= 0 or self.omega <= 0:
            raise ValueError("Earth constants must all be positive")


EARTH = EarthConstants()


@dataclass(frozen=True)
class LaunchGeometry:
    """Launch site latitude and initial launch azimuth, both in degrees."""

    site_latitude_deg: float
    azimuth_deg: float

    def __post_init__(self) -> None:
        if abs(self.site_latitude_deg) > 90.0:
            raise ValueError(f"latitude out of range: {self.site_latitude_deg}")
        if not 0.0 <= self.azimuth_deg < 360.0:
            raise ValueError(f"azimuth must be in [0, 360): {self.azimuth_deg}")


@dataclass(frozen=True)
class InsertionResult:
    """Breakdown of a single orbit-insertion cost, velocities in km/s."""

    dv1: float
    achieved_azimuth_deg: float
    achieved_inclination_deg: float
    dv2: float

    @property
    def total(self) -> float:
        return self.dv1 + self.dv2


def circular_orbit_speed(orbit_radius_km: float, consts: EarthConstants = EARTH) -> float:
    """Speed of a circular orbit of the given radius, sqrt(mu/r), km/s."""
    if orbit_radius_km <= 0:
        raise ValueError(f"orbit radius must be positive: {orbit_radius_km}")
    return math.sqrt(consts.mu / orbit_radius_km)


def launch_dv(
    geom: LaunchGeometry, orbit_radius_km: float, consts: EarthConstants = EARTH
) -> float:
    """Delta-v to reach circular orbit speed from a rotating launch site.

    Neglects gravity and drag losses.  Raises if the orbit speed is below the
    site's rotational surface speed (the quadratic has no positive root).
    """
    phi = math.radians(geom.site_latitude_deg)
    psi = math.radians(geom.azimuth_deg)
    wr_cos_phi = consts.omega * consts.radius_km * math.cos(phi)
    discriminant = consts.mu / orbit_radius_km - wr_cos_phi**2
    if discriminant <= 0:
        raise ValueError(
            "target orbit speed does not exceed surface rotation speed "
            f"(r={orbit_radius_km} km, lat={geom.site_latitude_deg} deg)"
        )
    return -wr_cos_phi * math.sin(psi) + math.sqrt(discriminant)


def achieved_azimuth(
    geom: LaunchGeometry, dv1: float, consts: EarthConstants = EARTH
) -> float:
    """Azimuth of the orbital velocity after launch, degrees in [0, 360).

    The rotational surface velocity adds an eastward component, so the
    achieved azimuth drifts east of the commanded one.  Uses the two-argument
    arctangent for quadrant correctness.
    """
    if dv1 <= 0:
        raise ValueError(f"dv1 must be positive: {dv1}")
    phi = math.radians(geom.site_latitude_deg)
    psi = math.radians(geom.azimuth_deg)
    east = dv1 * math.sin(psi) + consts.omega * consts.radius_km * math.cos(phi)
    north = dv1 * math.cos(psi)
    return math.degrees(math.atan2(east, north)) % 360.0


def achieved_inclination(site_latitude_deg: float, achieved_azimuth_deg: float) -> float:
    """Orbital inclination arccos(cos(phi) sin(psi_l)), degrees in [0, 180]."""
    phi = math.radians(site_latitude_deg)
    psi_l = math.radians(achieved_azimuth_deg)
    c = math.cos(phi) * math.sin(psi_l)
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))


def plane_change_dv(
    achieved_inclination_deg: float,
    target_inclination_deg: float,
    orbit_radius_km: float,
    consts: EarthConstants = EARTH,
) -> float:
    """Single-impulse inclination correction: 2 v_o sin(|di|/2), km/s."""
    for inc in (achieved_inclination_deg, target_inclination_deg):
        if not 0.0 <= inc <= 180.0:
            raise ValueError(f"inclination out of [0, 180]: {inc}")
    delta = abs(achieved_inclination_deg - target_inclination_deg)
    return 2.0 * circular_orbit_speed(orbit_radius_km, consts) * math.sin(math.radians(delta) / 2.0)


def insertion_cost(
    geom: LaunchGeometry,
    orbit_radius_km: float,
    target_inclination_deg: float,
    consts: EarthConstants = EARTH,
) -> InsertionResult:
    """Full insertion cost for one site/azimuth/mission combination."""
    dv1 = launch_dv(geom, orbit_radius_km, consts)
    psi_l = achieved_azimuth(geom, dv1, consts)
    inc_l = achieved_inclination(geom.site_latitude_deg, psi_l)
    dv2 = plane_change_dv(inc_l, target_inclination_deg, orbit_radius_km, consts)
    return InsertionResult(dv1, psi_l, inc_l, dv2)


def cheapest_azimuth(
    site_latitude_deg: float,
    azimuths_deg: list[float],
    orbit_radius_km: float,
    target_inclination_deg: float,
    consts: EarthConstants = EARTH,
) -> tuple[float, InsertionResult]:
    """Pick the azimuth with minimum total delta-v from a candidate list.

    Ties break toward the lowest azimuth (the list is scanned in order).
    """
    if not azimuths_deg:
        raise ValueError("no candidate azimuths")
    best: tuple[float, InsertionResult] | None = None
    for psi in azimuths_deg:
        res = insertion_cost(
            LaunchGeometry(site_latitude_deg, psi), orbit_radius_km, target_inclination_deg, consts
        )
        if best is None or res.total < best[1].total:
            best = (psi, res)
    return best
