import math
import time
from contextlib import contextmanager

import numpy as np
import pytest
from hypothesis import settings

from ringcover.geometry import Triangle

settings.register_profile("ringcover", deadline=None, max_examples=60)
settings.load_profile("ringcover")

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        status, seconds, note = results[key]
        terminalreporter.write_line(f"{key} {status} ({seconds:.2f} s) {note}")


class Criterion:
    """Records one acceptance criterion as PASS or FAIL, with its runtime and a note."""

    def __init__(self, config):
        self.results = config.stash[_RESULTS]

    @contextmanager
    def __call__(self, key, budget):
        notes = []
        start = time.perf_counter()
        try:
            yield notes
        except BaseException as exc:
            elapsed = time.perf_counter() - start
            reason = f"{type(exc).__name__}: {exc}".splitlines()[0]
            self.results[key] = ("FAIL", elapsed, "; ".join([reason] + notes))
            print(f"{key} FAIL")
            raise
        elapsed = time.perf_counter() - start
        note = "; ".join(notes)
        if elapsed > budget:
            self.results[key] = ("FAIL", elapsed, f"over the {budget:g} s budget; {note}")
            print(f"{key} FAIL")
            pytest.fail(f"{key} took {elapsed:.2f} s, budget {budget:g} s")
        self.results[key] = ("PASS", elapsed, note)
        print(f"{key} PASS")


@pytest.fixture(scope="session")
def criterion(pytestconfig):
    return Criterion(pytestconfig)


def random_triangle(rng, min_angle=0.15):
    """Random counterclockwise triangle with all angles above ``min_angle``."""
    while True:
        pts = rng.uniform(-1.0, 1.0, size=(3, 2))
        e = np.roll(pts, -1, axis=0) - pts
        cross = e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0]
        if cross < 0:
            pts = pts[::-1]
        angles = []
        for k in range(3):
            u = pts[(k + 1) % 3] - pts[k]
            v = pts[(k + 2) % 3] - pts[k]
            angles.append(math.acos(np.clip(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)), -1, 1)))
        if min(angles) > min_angle:
            return Triangle(tuple(pts[0]), tuple(pts[1]), tuple(pts[2]), int(rng.integers(3)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def equilateral(side=1.0):
    return Triangle.with_base((0.0, 0.0), (side, 0.0), (side / 2, side * math.sqrt(3) / 2))
