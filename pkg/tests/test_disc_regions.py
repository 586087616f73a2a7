import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ringcover.discbound.regions import AnnularSector, Crescent, DiscProbe, Square, bite_mask, bites, wrap_angle
from ringcover.geometry import Disc

EPS = 1e-5


def test_point_bite_examples():
    disc = Disc((0, 0), 1.0)
    assert bites(disc, (1 + EPS / 2, 0.0), EPS)
    assert not bites(disc, (1 + 2 * EPS, 0.0), EPS)


def test_square_bite_example():
    assert bites(Disc((0, 0), 1.0), Square((3, 0), 4.0), EPS)
    assert not bites(Disc((0, 0), 1.0), Square((3.1, 0), 4.0), EPS)


def test_wrap_angle():
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi / 2) == pytest.approx(-math.pi / 2)
    assert wrap_angle(2 * math.pi + 0.1) == pytest.approx(0.1)


def _sample(region, rng, count=800):
    """Oracle points spread around ``region`` (polar for sectors, box for squares)."""
    if isinstance(region, Square):
        h = region.side
        return np.asarray(region.center) + rng.uniform(-h, h, size=(count, 2))
    r = rng.uniform(0, 2 * region.r_out, count)
    t = rng.uniform(-math.pi, math.pi, count)
    return np.asarray(region.center) + np.column_stack([r * np.cos(t), r * np.sin(t)])


regions = st.one_of(
    st.builds(Square, st.tuples(st.floats(-2, 2), st.floats(-2, 2)), st.floats(0.1, 3), st.floats(0, math.pi)),
    st.builds(AnnularSector, st.tuples(st.floats(-2, 2), st.floats(-2, 2)), st.floats(0.2, 1.0),
              st.floats(1.05, 1.6), st.floats(-math.pi, math.pi), st.floats(0.05, math.pi / 2)),
)


@given(regions, st.integers(0, 1000))
def test_distance_is_zero_exactly_inside(region, seed):
    pts = _sample(region, np.random.default_rng(seed))
    d = region.distance(pts)
    inside = region.contains(pts)
    assert np.all(d[inside] == 0)
    assert np.all(d[~inside] > 0)
    # Distance is 1-Lipschitz and matches the nearest boundary sample from outside.
    bd = region.boundary_sample(1000)
    near = np.min(np.linalg.norm(pts[~inside][:, None] - bd[None], axis=2), axis=1) if (~inside).any() else []
    assert np.all(d[~inside] <= np.asarray(near) + 1e-9)


@given(regions)
def test_interior_point_and_boundary_inside(region):
    assert region.contains(region.interior_point()[None])[0]
    assert np.all(region.contains(region.boundary_sample(64), 1e-9))


def test_crescent_is_its_sector():
    cr = Crescent(0, (1.0, 2.0), 0.5, 0.3, math.pi / 16, 1 / 16)
    s = cr.sector
    assert (s.r_in, s.r_out, s.half) == (0.5, 0.5 * (1 + 1 / 16), math.pi / 32)
    assert cr.scale == 0.5


def test_bite_mask_matches_single_form():
    rng = np.random.default_rng(3)
    c = rng.uniform(-3, 3, size=(200, 2))
    r = rng.uniform(0.05, 0.5, 200)
    probe = DiscProbe((0.0, 0.0), 1.5)
    mask = bite_mask(c, r, probe, EPS)
    assert mask.tolist() == [bites(Disc(tuple(x), y), probe, EPS) for x, y in zip(c, r)]
    assert np.array_equal(mask, np.hypot(*c.T) - 1.5 <= (1 + EPS) * r)
