import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import equilateral, random_triangle
from ringcover.errors import InvalidArgument
from ringcover.geometry import Triangle
from ringcover.inscription import (
    apex_chord_ratio,
    choose_n,
    circumradius,
    mu,
    properly_inscribe,
    reference_polygon,
)


@pytest.mark.parametrize("lam, n", [(1.5, 2), (1.1, 4), (1.01, 12)])
def test_choose_n_examples(lam, n):
    assert choose_n(lam) == n
    assert circumradius(n) < lam <= circumradius(n - 1) or n == 2


@pytest.mark.parametrize("lam", [1.0, 0.9, -2.0])
def test_choose_n_rejects_lambda_at_most_one(lam):
    with pytest.raises(InvalidArgument):
        choose_n(lam)


@given(st.floats(1.0001, 3.0))
def test_choose_n_is_least_fitting(lam):
    n = choose_n(lam)
    assert circumradius(n) < lam
    assert n == 2 or circumradius(n - 1) >= lam


def test_mu_examples():
    assert mu(2) == pytest.approx(0.5)
    assert mu(4) == pytest.approx(0.853553, abs=1e-6)
    values = [mu(n) for n in range(2, 200)]
    assert all(a < b < 1 for a, b in zip(values, values[1:]))


def test_reference_square():
    r = math.sqrt(2)
    want = np.array([(0, r), (-r, 0), (0, -r), (r, 0)])
    assert np.allclose(reference_polygon(2).vertices, want, atol=1e-15)


def test_reference_octagon():
    v = reference_polygon(4).vertices
    assert v[0] == pytest.approx((0, 1.0823922), abs=1e-7)
    ang = np.arctan2(v[:, 1], v[:, 0])
    steps = np.diff(np.unwrap(ang))
    assert np.allclose(steps, math.pi / 4)


@pytest.mark.parametrize("n", [2, 3, 4, 6, 12])
def test_apothem_is_one(n):
    poly = reference_polygon(n).polygon
    for p, q in poly.edges():
        e = q - p
        dist = abs(e[0] * p[1] - e[1] * p[0]) / math.hypot(*e)
        assert dist == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_reference_triangle_inscription_is_identity(n):
    spec = reference_polygon(n)
    tile = properly_inscribe(spec.reference_triangle, spec)
    assert np.allclose(tile.map.linear, np.eye(2), atol=1e-14)
    assert np.allclose(tile.map.translation, 0, atol=1e-14)
    assert np.allclose(tile.polygon.vertices, spec.vertices, atol=1e-14)


def test_equilateral_chord_height():
    spec = reference_polygon(4)
    tri = equilateral()
    tile = properly_inscribe(tri, spec)
    v1, v2 = tile.polygon.vertices[1], tile.polygon.vertices[-1]
    h = math.sqrt(3) / 2
    assert v1[1] == pytest.approx(v2[1], abs=1e-14)
    assert v1[1] / h == pytest.approx((1 + math.cos(math.pi / 4)) / 2, abs=1e-12)
    assert round(v1[1] / h, 6) == 0.853553


@given(st.integers(0, 10**6), st.sampled_from([2, 3, 4, 5, 6, 9]))
def test_proper_inscription_properties(seed, n):
    tri = random_triangle(np.random.default_rng(seed))
    spec = reference_polygon(n)
    tile = properly_inscribe(tri, spec)
    v = tile.polygon.vertices
    diam = tri.diameter
    assert np.allclose(v[n], tri.base_midpoint, atol=1e-12 * diam)
    assert np.allclose(v[0], tri.apex, atol=1e-12 * diam)
    assert all(tri.contains(p, 1e-10 * diam) for p in v)
    assert max(tri.height_of(p) for p in v[1:]) <= mu(n) * tri.height * (1 + 1e-10)
    assert apex_chord_ratio(tile, spec) == pytest.approx((1 - math.cos(math.pi / n)) / 2, rel=1e-10)
    # The ellipse is the image of the incircle: it touches every edge at its midpoint.
    mids = 0.5 * (v + np.roll(v, -1, axis=0))
    assert np.allclose(tile.ellipse.normalized_radius(mids), 1.0, atol=1e-9)
    assert np.all(tile.ellipse.normalized_radius(v) > 1.0)


def test_designated_base_is_respected():
    spec = reference_polygon(3)
    tri = Triangle((0, 0), (3, 0), (1, 2), designated_base=2)
    tile = properly_inscribe(tri, spec)
    assert np.allclose(tile.polygon.vertices[0], (3, 0))
    assert np.allclose(tile.polygon.vertices[3], (0.5, 1.0))
