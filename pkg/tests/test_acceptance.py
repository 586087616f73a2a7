"""Acceptance criteria A1-A7; each prints one PASS/FAIL line (also gathered in the summary)."""
import math
import time

import numpy as np
import pytest

from conftest import random_triangle
from ringcover import PackingConfig, build_cell, verify_covering, verify_packing
from ringcover.errors import BudgetExceeded
from ringcover.geometry import AffineMap2, Ellipse
from ringcover.inscription import apex_chord_ratio, mu, properly_inscribe, reference_polygon
from ringcover.packer import estimate_tiles
from ringcover.tiler import decay_counts, greedy_trace, predicted_tile_count, tile_until
from ringcover.verify import cell_region
from ringcover.discbound import (
    Constants,
    audit_constants,
    calibrate,
    chase,
    derive_window_constants,
    random_greedy_packing,
)

# Memory guard for the builds: about 200 bytes per tile.
MAX_TILES = 2_000_000


def _floor(x, digits):
    return math.floor(x * 10 ** digits) / 10 ** digits


def test_a1_inscription_ratio_and_height_bound(criterion):
    with criterion("A1", 1.0) as notes:
        rng = np.random.default_rng(1)
        triangles = [random_triangle(rng) for _ in range(100)]
        worst = 0.0
        for n in (2, 3, 4, 6):
            spec = reference_polygon(n)
            want = (1 - math.cos(math.pi / n)) / 2
            for tri in triangles:
                tile = properly_inscribe(tri, spec)
                ratio = apex_chord_ratio(tile, spec)
                assert abs(ratio - want) <= 1e-10 * want
                heights = [tri.height_of(v) for v in tile.polygon.vertices[1:]]
                assert max(heights) <= mu(n) * tri.height * (1 + 1e-10)
                worst = max(worst, abs(ratio - want) / want)
        notes.append(f"400 inscriptions, worst relative ratio error {worst:.1e}")


def _exact_tiling_checks(tri, res, spec):
    total = res.tile_area + res.residual_area
    assert abs(total - tri.area) <= 1e-9 * tri.area
    assert all(tri.height_of(t.apex) <= res.delta * (1 + 1e-9) for t in res.residual)
    tiles = res.tiles
    assert verify_packing([t.ellipse for t in tiles], tol=1e-9).ok
    # Decay counter along the greedy trace.
    _, heights, children = greedy_trace(tri, spec, min(res.count, 400))
    for start in range(0, len(heights), 25):
        counts = decay_counts(heights, children, start, mu(spec.n))
        assert all(b < a for a, b in zip(counts, counts[1:]))


def test_a2_lemma_tiling(criterion):
    with criterion("A2", 30.0) as notes:
        rng = np.random.default_rng(2)
        spec = reference_polygon(4)
        predicted = predicted_tile_count(4, 50.0)
        notes.append(f"{predicted} tiles per triangle")
        start = time.perf_counter()
        for k in range(50):
            tri = random_triangle(rng)
            remaining = 30.0 - (time.perf_counter() - start)
            res = tile_until(tri, tri.height / 50, spec, max_tiles=MAX_TILES, time_budget=remaining)
            _exact_tiling_checks(tri, res, spec)


@pytest.fixture(scope="session")
def cell_11():
    """The lambda = 1.1 cell, or the exception that stopped its construction."""
    start = time.perf_counter()
    try:
        packing = build_cell(PackingConfig(1.1, max_tiles=MAX_TILES), time_budget=120.0)
    except BudgetExceeded as exc:
        return exc, time.perf_counter() - start
    return packing, time.perf_counter() - start


def _require_cell(obj):
    if isinstance(obj, Exception):
        est = estimate_tiles(PackingConfig(1.1))
        raise AssertionError(f"lambda=1.1 cell not built ({obj}); {est} tiles per triangle needed") from obj
    return obj


def _translates(packing):
    c, m, _ = packing.translates(1)
    return [Ellipse(AffineMap2(l, x)) for x, l in zip(c, m)]


def test_a3_end_to_end_packing(criterion, cell_11):
    with criterion("A3", 240.0) as notes:
        for lam in (1.5, 1.1):
            start = time.perf_counter()
            if lam == 1.5:
                packing, seconds = build_cell(PackingConfig(1.5)), 0.0
            else:
                packing, seconds = _require_cell(cell_11[0]), cell_11[1]
            check = verify_packing(_translates(packing), tol=1e-9)
            assert check.ok, f"lambda={lam}: {len(check.offending)} overlapping pairs"
            seconds += time.perf_counter() - start
            assert seconds < 120.0, f"lambda={lam} took {seconds:.1f} s"
            notes.append(f"lambda={lam}: {len(packing)} ellipses, disjoint with neighbours, {seconds:.1f} s")


def test_a4_covering(criterion, cell_11):
    with criterion("A4", 300.0) as notes:
        packing = _require_cell(cell_11[0])
        report = verify_covering(_translates(packing), 1.1, cell_region(packing.lattice), 1e-3)
        notes.append(f"{len(report.uncovered_cells)} uncovered, {len(report.needs_refinement)} needs-refinement")
        assert report.certified and not report.uncovered_cells and not report.needs_refinement


def test_a5_constant_audit(criterion):
    with criterion("A5", 1.0) as notes:
        c = derive_window_constants(Constants.derived_defaults())
        report = audit_constants(c)
        a = report.check("A").value
        b = report.check("B").value
        assert _floor(a, 3) == 1.055
        assert math.sqrt(a) < 1.03
        assert a < 1 + c.beta == 1.0625
        assert _floor(b, 6) == 1.000021
        assert report.passed, report.failed()
        notes.append(f"A = {a:.6f}, sqrt {math.sqrt(a):.6f}, B = {b:.8f}")


def test_a6_chase_on_random_packings(criterion):
    with criterion("A6", 120.0) as notes:
        consts = calibrate(Constants.derived_defaults(), with_eps_max=False)
        labels = {}
        for seed in range(100):
            packing = random_greedy_packing(seed, region=(-3, -3, 3, 3), radius_range=(0.05, 1.0))
            point, trace = chase(packing, consts=consts)
            d = np.hypot(*(packing.centers - point).T)
            assert np.all(d > (1 + packing.eps) * packing.radii)
            assert np.all(np.abs(point) <= 2.0)
            assert trace.shrinks()
            for label in trace.case_labels:
                labels[label] = labels.get(label, 0) + 1
        notes.append("100/100 certified; steps " + ", ".join(f"{k} {v}" for k, v in sorted(labels.items())))


def test_a7_calibration(criterion):
    with criterion("A7", 10.0) as notes:
        c = calibrate()
        assert c.eps_max >= 1e-5
        assert c.arc_prime > 0
        assert c.r_prime_max < c.r_big
        notes.append(f"eps_max {c.eps_max:.6e}, arc_prime {c.arc_prime:.6g}, r_prime_max {c.r_prime_max:.6g}")
