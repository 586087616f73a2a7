import math

import pytest

from ringcover.discbound.constants import (
    Constants,
    arc_halfwidth,
    audit_constants,
    calibrate,
    check_a_value,
    check_b_value,
    derive_window_constants,
    max_feasible_eps,
    worst_free_arc,
)
from ringcover.errors import CalibrationError, InvalidArgument


@pytest.fixture(scope="module")
def defaults():
    return derive_window_constants(Constants.derived_defaults())


def test_derived_defaults():
    c = Constants.derived_defaults()
    assert c.alpha == math.pi / 16 and c.beta == 1 / 16 and c.eps == 1e-5
    assert c.ring_frac == c.beta / 16
    assert c.r_big == 1 / 8
    assert not c.calibrated


def test_constants_validation():
    with pytest.raises(InvalidArgument):
        Constants.derived_defaults(eps=0.0)
    with pytest.raises(InvalidArgument):
        Constants.derived_defaults(alpha=2.0)
    with pytest.raises(InvalidArgument):
        Constants.derived_defaults(beta=0.5)


def test_check_a_value():
    a = check_a_value(Constants.derived_defaults())
    assert round(a, 5) == 1.05539
    assert math.sqrt(a) == pytest.approx(1.02732, abs=1e-5)
    assert math.sqrt(a) < 1.03 < 1 + 1 / 16


def test_check_b_value():
    b = check_b_value(Constants.derived_defaults())
    assert b == pytest.approx(1 + 0.0015625 * (1 - math.cos(math.pi / 8) - 0.0625), rel=1e-15)
    assert round(b, 7) == 1.0000213
    assert b > (1 + 1e-5) ** 2


def test_check_c(defaults):
    ch = audit_constants(defaults).check("C")
    assert ch.value == pytest.approx(math.sin(math.pi / 32))
    assert round(ch.value, 6) == 0.098017
    assert ch.bound == pytest.approx(1.0625 * 0.125 * math.sin(3 * math.pi / 16))
    assert ch.passed


def test_default_audit_passes(defaults):
    report = audit_constants(defaults)
    assert report.passed, report.failed()
    assert [ch.name for ch in report.checks][:3] == ["A", "A.root", "B"]
    assert len(report.lines()) == len(report.checks)


def test_uncalibrated_audit_fails_window_checks():
    report = audit_constants(Constants.derived_defaults())
    assert set(report.failed()) == {"D", "E"}


def test_window_constants(defaults):
    free = worst_free_arc(defaults)
    assert defaults.arc_prime == pytest.approx(0.9 * free)
    assert 0 < defaults.arc_prime < defaults.alpha
    assert defaults.r_small < defaults.r_prime_max < defaults.r_big


def test_arc_halfwidth_geometry():
    # Law of cosines: a unit disc at distance 1.5 meets the unit circle at +-acos(0.75).
    assert arc_halfwidth(1.0, 1.5, 1.0) == pytest.approx(math.acos(0.75), abs=1e-12)
    assert arc_halfwidth(1.0, 2.0, 1.0) == pytest.approx(0.0, abs=1e-7)
    assert arc_halfwidth(1.0, 5.0, 1.0) == 0.0


def test_large_alpha_is_rejected():
    c = Constants.derived_defaults(alpha=math.pi / 4)
    with pytest.raises(CalibrationError):
        calibrate(c)
    report = audit_constants(derive_window_constants(c))
    assert {"A", "A.root", "E"} <= set(report.failed())
    assert report.check("C").passed and report.check("D").passed


def test_calibrate_defaults():
    c = calibrate()
    assert c.calibrated
    assert c.eps_max >= 1e-5
    # Consistent with check B: the headroom closes just above 1e-5.
    assert check_b_value(Constants.derived_defaults(eps=c.eps_max)) >= (1 + c.eps_max) ** 2 * (1 - 1e-12)


def test_max_feasible_eps_is_tight():
    c = Constants.derived_defaults()
    e = max_feasible_eps(c)
    assert audit_constants(derive_window_constants(Constants.derived_defaults(eps=e))).passed
    over = Constants.derived_defaults(eps=1.01 * e)
    assert not audit_constants(derive_window_constants(over)).passed
