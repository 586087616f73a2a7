import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ringcover.errors import InvalidArgument
from ringcover.geometry import (
    AffineMap2,
    Contact,
    ConvexPolygon,
    Ellipse,
    Location,
    Triangle,
    contact_scale,
    coverage_margin,
    enlarge,
    interiors_disjoint,
    point_location,
    signed_boundary_distance,
)
from ringcover.inscription import reference_polygon

axes = st.tuples(st.floats(0.05, 5.0), st.floats(0.05, 5.0))
angles = st.floats(0.0, math.pi)
coords = st.floats(-10.0, 10.0)


def dense_margin(enlarged, polygon, samples=4000):
    """Oracle: minimum over the polygon boundary of the distance to the ellipse boundary."""
    pts = []
    for p, q in polygon.edges():
        t = np.linspace(0.0, 1.0, samples // len(polygon), endpoint=False)[:, None]
        pts.append(p + t * (q - p))
    pts = np.concatenate(pts)
    bd = enlarged.boundary_points(20000)
    d = np.min(np.linalg.norm(pts[:, None, :] - bd[None, :, :], axis=2), axis=1)
    return float(d.min())


def test_enlarge_unit_disc():
    e = enlarge(Ellipse.disc((0, 0), 1.0), 1.1)
    assert e.same_as(Ellipse.disc((0, 0), 1.1))


def test_enlarge_keeps_center_and_scales_axes():
    e = enlarge(Ellipse.from_axes((3, 0), (2, 1)), 1.5)
    assert np.allclose(e.center, (3, 0))
    assert np.allclose(e.semi_axes, (3, 1.5))


@given(coords, coords, axes, angles)
def test_enlarge_by_one_is_identity(x, y, ab, t):
    e = Ellipse.from_axes((x, y), ab, t)
    assert enlarge(e, 1.0).same_as(e)


def test_enlarge_rejects_nonpositive_factor():
    with pytest.raises(InvalidArgument):
        enlarge(Ellipse.disc((0, 0), 1), 0.0)


def test_point_location_examples():
    disc = Ellipse.disc((0, 0), 1)
    assert point_location(disc, (0, 0)) is Location.INTERIOR
    assert point_location(disc, (1, 0), tol=1e-12) is Location.BOUNDARY
    assert point_location(Ellipse.from_axes((0, 0), (2, 1)), (0, 1.5)) is Location.EXTERIOR


def test_contact_examples():
    a = Ellipse.disc((0, 0), 1)
    assert interiors_disjoint(a, Ellipse.disc((2, 0), 1)) is Contact.TANGENT
    assert interiors_disjoint(a, Ellipse.disc((2.1, 0), 1)) is Contact.DISJOINT
    assert interiors_disjoint(Ellipse.from_axes((0, 0), (2, 1)), Ellipse.disc((2.5, 0), 1)) is Contact.OVERLAP


def test_overlap_example_agrees_with_point_oracle():
    e = Ellipse.from_axes((0, 0), (2, 1))
    d = Ellipse.disc((2.5, 0), 1)
    p = np.array([1.9, 0.0])
    assert e.normalized_radius(p) < 1 and d.normalized_radius(p) < 1


@given(coords, coords, axes, angles, coords, coords, axes, angles)
def test_contact_scale_is_symmetric_and_matches_scaled_tangency(x1, y1, ab1, t1, x2, y2, ab2, t2):
    e1 = Ellipse.from_axes((x1, y1), ab1, t1)
    e2 = Ellipse.from_axes((x2, y2), ab2, t2)
    s = contact_scale(e1, e2)
    assert s == contact_scale(e2, e1)
    if 1e-6 < s < 1e6:
        # Scaled by s both touch: a common boundary point exists, and by s/(1+1e-6) none overlaps.
        assert interiors_disjoint(enlarge(e1, s), enlarge(e2, s), tol=1e-6) is Contact.TANGENT


@given(st.floats(0.1, 3.0), st.floats(0.1, 3.0), st.floats(0.0, 8.0))
def test_contact_scale_of_discs(r1, r2, d):
    s = contact_scale(Ellipse.disc((0, 0), r1), Ellipse.disc((d, 0), r2))
    assert s == pytest.approx(d / (r1 + r2), rel=1e-9, abs=1e-12)


@given(coords, coords, axes, angles, st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=20))
def test_point_location_is_affine_invariant(x, y, ab, t, pts):
    e = Ellipse.from_axes((x, y), ab, t)
    amap = AffineMap2([[2.0, 0.7], [-0.3, 1.1]], [4.0, -1.0])
    moved = e.transformed(amap)
    for u in pts:
        p = e.map(np.array(u))
        assert moved.normalized_radius(amap(p)) == pytest.approx(e.normalized_radius(p), rel=1e-9, abs=1e-12)


def test_coverage_margin_reference_octagon():
    octagon = reference_polygon(4).polygon
    margin = coverage_margin(Ellipse.disc((0, 0), 1.1), octagon)
    assert margin == pytest.approx(1.1 - 1 / math.cos(math.pi / 8), abs=1e-12)
    assert round(margin, 6) == 0.017608
    assert dense_margin(Ellipse.disc((0, 0), 1.1), octagon) == pytest.approx(margin, abs=1e-6)


def test_coverage_margin_negative_when_not_contained():
    square = ConvexPolygon([(-1, -1), (1, -1), (1, 1), (-1, 1)])
    assert coverage_margin(Ellipse.disc((0, 0), 1.2), square) < 0


def test_polygon_rejects_degenerate_input():
    with pytest.raises(InvalidArgument):
        ConvexPolygon([(0, 0), (1, 0)])
    with pytest.raises(InvalidArgument):
        ConvexPolygon([(0, 0), (1, 0), (2, 0)])


@given(axes, angles, st.floats(0.0, 2 * math.pi), st.floats(0.0, 3.0))
def test_signed_distance_matches_sampling(ab, t, phi, r):
    e = Ellipse.from_axes((0.3, -0.2), ab, t)
    p = e.map(np.array([r * math.cos(phi), r * math.sin(phi)]))
    d = signed_boundary_distance(e, p)
    bd = e.boundary_points(50000)
    oracle = float(np.min(np.hypot(*(bd - p).T)))
    assert abs(d) == pytest.approx(oracle, abs=2e-3 * max(ab))
    if abs(r - 1) > 1e-9:
        assert (d > 0) == (r < 1)


def test_triangle_rejects_clockwise_and_degenerate():
    with pytest.raises(InvalidArgument):
        Triangle((0, 0), (0, 1), (1, 0))
    with pytest.raises(InvalidArgument):
        Triangle((0, 0), (1, 0), (2, 0))


def test_triangle_base_and_height():
    t = Triangle((0, 0), (2, 0), (1, 3), designated_base=1)
    assert t.base == ((2.0, 0.0), (1.0, 3.0))
    assert t.apex == (0.0, 0.0)
    assert t.height == pytest.approx(6 / math.hypot(1, 3))


def test_affine_map_from_triangles_roundtrip():
    src = [(0, 0), (1, 0), (0, 1)]
    dst = [(2, 1), (3, 3), (-1, 2)]
    m = AffineMap2.from_triangles(src, dst)
    assert np.allclose(m(np.array(src, dtype=float)), dst)
    assert np.allclose(m.inverse()(np.array(dst, dtype=float)), src)


@given(coords, coords, axes, angles, st.floats(0.2, 5.0), st.floats(0.2, 5.0))
def test_enlargements_compose(x, y, ab, t, l1, l2):
    e = Ellipse.from_axes((x, y), ab, t)
    assert enlarge(enlarge(e, l1), l2).same_as(enlarge(e, l1 * l2), 1e-12)


@given(coords, coords, axes, angles, st.floats(1.0001, 3.0), st.floats(0, 2 * math.pi), st.floats(0, 1))
def test_enlargement_is_monotone(x, y, ab, t, lam, phi, r):
    e = Ellipse.from_axes((x, y), ab, t)
    p = e.map(np.array([r * math.cos(phi), r * math.sin(phi)]))
    assert point_location(enlarge(e, lam), p) is Location.INTERIOR


def test_contact_agrees_with_membership_sampling():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(1000):
        e1 = Ellipse.from_axes(rng.uniform(-1, 1, 2), 10 ** rng.uniform(-1, 0.3, 2), rng.uniform(0, math.pi))
        e2 = Ellipse.from_axes(rng.uniform(-1, 1, 2) * 3, 10 ** rng.uniform(-1, 0.3, 2), rng.uniform(0, math.pi))
        s = contact_scale(e1, e2)
        if 0.97 < s < 1.03:
            continue  # sampling cannot resolve near-tangent pairs
        x0, y0, x1, y1 = e1.bbox()
        pts = np.column_stack([rng.uniform(x0, x1, 10_000), rng.uniform(y0, y1, 10_000)])
        common = np.any((e1.normalized_radius(pts) < 1) & (e2.normalized_radius(pts) < 1))
        assert common == (interiors_disjoint(e1, e2) is Contact.OVERLAP)
        checked += 1
    assert checked > 900
