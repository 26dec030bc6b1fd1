"""Geodesy unit tests: distances, bearings, wedges, and containment with an
independent spherical-cone oracle."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spaceport_planner.geo import (
    EARTH_RADIUS_KM,
    GeoPoint,
    GeoPolygon,
    KM_PER_MILE,
    build_wedge,
    contains,
    contains_many,
    great_circle_distance,
    initial_bearing,
    polygon_to_geojson,
    project_along_azimuth,
)

NYC = GeoPoint(40.7128, -74.0060)
LA = GeoPoint(34.0522, -118.2437)

latitudes = st.floats(min_value=-85.0, max_value=85.0)
longitudes = st.floats(min_value=-180.0, max_value=179.999)


class TestGeoPoint:
    def test_longitude_normalization(self):
        assert GeoPoint(0.0, 190.0).lon == -170.0
        assert GeoPoint(0.0, -180.0).lon == -180.0
        assert GeoPoint(0.0, 180.0).lon == -180.0
        assert GeoPoint(10.0, 359.0).lon == -1.0

    def test_latitude_out_of_range(self):
        with pytest.raises(ValueError):
            GeoPoint(91.0, 0.0)

    def test_non_finite_longitude(self):
        with pytest.raises(ValueError):
            GeoPoint(0.0, float("nan"))


class TestGeoPolygon:
    def test_too_few_vertices(self):
        with pytest.raises(ValueError):
            GeoPolygon((GeoPoint(0, 0), GeoPoint(1, 1)))

    def test_consecutive_duplicates(self):
        with pytest.raises(ValueError):
            GeoPolygon((GeoPoint(0, 0), GeoPoint(0, 0), GeoPoint(1, 1)))


class TestDistanceAndBearing:
    def test_known_city_pair(self):
        d = great_circle_distance(NYC, LA)
        assert d == pytest.approx(3940.0, rel=0.005)

    def test_zero_distance(self):
        assert great_circle_distance(NYC, NYC) == 0.0

    def test_symmetry(self):
        assert great_circle_distance(NYC, LA) == pytest.approx(
            great_circle_distance(LA, NYC), abs=1e-9
        )

    def test_equator_quarter_circumference(self):
        a, b = GeoPoint(0.0, 0.0), GeoPoint(0.0, 90.0)
        assert great_circle_distance(a, b) == pytest.approx(
            math.pi / 2.0 * EARTH_RADIUS_KM, rel=1e-12
        )

    def test_bearing_cardinal_directions(self):
        origin = GeoPoint(0.0, 0.0)
        assert initial_bearing(origin, GeoPoint(0.0, 1.0)) == pytest.approx(90.0)
        assert initial_bearing(origin, GeoPoint(1.0, 0.0)) == pytest.approx(0.0)
        assert initial_bearing(origin, GeoPoint(-1.0, 0.0)) == pytest.approx(180.0)
        assert initial_bearing(origin, GeoPoint(0.0, -1.0)) == pytest.approx(270.0)

    def test_mile_conversion_constant(self):
        assert KM_PER_MILE == 1.609344


class TestProjectAlongAzimuth:
    @settings(deadline=None, max_examples=100)
    @given(
        lat=latitudes,
        lon=longitudes,
        azimuth=st.floats(min_value=0.0, max_value=359.999),
        range_km=st.floats(min_value=1.0, max_value=3000.0),
    )
    def test_roundtrip_distance_and_bearing(self, lat, lon, azimuth, range_km):
        origin = GeoPoint(lat, lon)
        dest = project_along_azimuth(origin, azimuth, range_km)
        assert great_circle_distance(origin, dest) == pytest.approx(range_km, rel=1e-9)
        # initial bearing to the destination is the commanded azimuth
        diff = abs((initial_bearing(origin, dest) - azimuth + 180.0) % 360.0 - 180.0)
        assert diff < 1e-6

    def test_zero_range_is_identity(self):
        assert project_along_azimuth(NYC, 123.0, 0.0) == NYC

    def test_validation(self):
        with pytest.raises(ValueError):
            project_along_azimuth(NYC, 360.0, 10.0)
        with pytest.raises(ValueError):
            project_along_azimuth(NYC, 10.0, -1.0)


class TestBuildWedge:
    def test_vertex_count_default_arc(self):
        # arc sample count defaults to max(2, ceil(2 * buffer) + 1)
        wedge = build_wedge(NYC, 90.0, 5.0, 500.0, samples_per_edge=8)
        assert len(wedge.vertices) == 2 * 8 + 11 - 1

    def test_vertex_count_explicit_arc(self):
        wedge = build_wedge(NYC, 90.0, 5.0, 500.0, samples_per_edge=4, arc_samples=6)
        assert len(wedge.vertices) == 2 * 4 + 6 - 1

    def test_apex_is_origin(self):
        wedge = build_wedge(NYC, 45.0, 7.5, 800.0)
        assert wedge.vertices[0] == NYC

    def test_far_arc_at_range(self):
        wedge = build_wedge(NYC, 45.0, 7.5, 800.0, samples_per_edge=3, arc_samples=5)
        for v in wedge.vertices[3:8]:  # apex + 2 edge points, then the arc
            assert great_circle_distance(NYC, v) == pytest.approx(800.0, rel=1e-9)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"buffer_deg": 0.0},
            {"buffer_deg": 90.0},
            {"range_km": 0.0},
            {"samples_per_edge": 1},
            {"arc_samples": 1},
        ],
    )
    def test_validation(self, kwargs):
        args = {"buffer_deg": 5.0, "range_km": 100.0, "samples_per_edge": 8}
        args.update(kwargs)
        with pytest.raises(ValueError):
            build_wedge(NYC, 90.0, **args)


class TestContainment:
    def test_point_down_the_axis_inside(self):
        wedge = build_wedge(GeoPoint(30.0, -80.0), 120.0, 5.0, 1000.0)
        p = project_along_azimuth(GeoPoint(30.0, -80.0), 120.0, 500.0)
        assert contains(wedge, p)

    def test_apex_counts_as_inside(self):
        wedge = build_wedge(GeoPoint(30.0, -80.0), 120.0, 5.0, 1000.0)
        assert contains(wedge, GeoPoint(30.0, -80.0))

    def test_opposite_azimuth_outside(self):
        wedge = build_wedge(GeoPoint(30.0, -80.0), 120.0, 5.0, 1000.0)
        p = project_along_azimuth(GeoPoint(30.0, -80.0), 300.0, 500.0)
        assert not contains(wedge, p)

    def test_beyond_range_outside(self):
        wedge = build_wedge(GeoPoint(30.0, -80.0), 120.0, 5.0, 1000.0)
        p = project_along_azimuth(GeoPoint(30.0, -80.0), 120.0, 1100.0)
        assert not contains(wedge, p)

    def test_antipodal_hemisphere_invalid(self):
        wedge = build_wedge(GeoPoint(30.0, -80.0), 120.0, 5.0, 1000.0)
        assert not contains(wedge, GeoPoint(-30.0, 100.0))

    def test_against_cone_oracle(self):
        # [DERIVED] The geodesic wedge edges have constant initial bearing
        # from the apex, so away from the boundary membership must agree
        # with the ideal spherical cone (bearing within buffer, within
        # range).  Points near the boundary are excluded from the oracle.
        rng = np.random.default_rng(5)
        origin = GeoPoint(28.0, -80.5)
        azimuth, buffer_deg, range_km = 110.0, 7.5, 1200.0
        wedge = build_wedge(origin, azimuth, buffer_deg, range_km)

        bearings = rng.uniform(0.0, 360.0, 400)
        dists = rng.uniform(10.0, 1.5 * range_km, 400)
        pts = [project_along_azimuth(origin, b, d) for b, d in zip(bearings, dists)]
        got = contains_many(
            wedge, np.array([p.lat for p in pts]), np.array([p.lon for p in pts])
        )
        for b, d, hit in zip(bearings, dists, got):
            diff = abs((b - azimuth + 180.0) % 360.0 - 180.0)
            if diff <= buffer_deg - 0.5 and d <= 0.95 * range_km:
                assert hit, f"bearing {b}, dist {d} should be inside"
            elif diff >= buffer_deg + 0.5 or d >= 1.05 * range_km:
                assert not hit, f"bearing {b}, dist {d} should be outside"

    def test_single_and_vector_agree(self):
        wedge = build_wedge(GeoPoint(10.0, 10.0), 200.0, 10.0, 700.0)
        rng = np.random.default_rng(9)
        lats = rng.uniform(0.0, 20.0, 50)
        lons = rng.uniform(0.0, 20.0, 50)
        many = contains_many(wedge, lats, lons)
        for lat, lon, hit in zip(lats, lons, many):
            assert contains(wedge, GeoPoint(lat, lon)) == hit


def test_polygon_to_geojson_closes_ring():
    wedge = build_wedge(NYC, 90.0, 5.0, 300.0, samples_per_edge=2, arc_samples=2)
    doc = polygon_to_geojson(wedge)
    assert doc["type"] == "Polygon"
    ring = doc["coordinates"][0]
    assert ring[0] == ring[-1]
    assert len(ring) == len(wedge.vertices) + 1
    assert ring[0] == [NYC.lon, NYC.lat]
