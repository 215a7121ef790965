"""Potential library: turning points, forces, symmetry tags, regimes."""

import numpy as np
import pytest

import dkrotor as dk
from dkrotor.potentials import PotentialError, wrap_angle

GRID = -np.pi + 2 * np.pi * np.arange(4096) / 4096


def test_va_turning_points():
    v = dk.va()
    assert v.evaluate(0.0) == pytest.approx(1.0, abs=1e-15)
    assert v.evaluate(-np.pi) == pytest.approx(-1.0, abs=1e-15)
    assert v.evaluate(np.pi / 2) == pytest.approx(0.0, abs=1e-15)
    # periodic closure: value at +pi equals value at -pi
    assert v.evaluate(np.pi) == pytest.approx(-1.0, abs=1e-12)


def test_vb_vc_extra_turning_points():
    g = 0.5
    assert dk.vb(g).evaluate(-np.pi / 2) == pytest.approx(g, abs=1e-15)
    assert dk.vb(g).evaluate(np.pi / 2) == pytest.approx(-g, abs=1e-15)
    assert dk.vc(g).evaluate(-np.pi / 2) == pytest.approx(g, abs=1e-15)
    assert dk.vc(g).evaluate(np.pi / 2) == pytest.approx(g, abs=1e-15)


def test_vd_closed_form():
    v = dk.vd()
    assert v.evaluate(0.0) == pytest.approx(1.0, abs=1e-15)
    assert v.evaluate(-np.pi) == pytest.approx(-1.0, abs=1e-15)
    # continuity at both kinks
    eps = 1e-9
    assert abs(v.evaluate(-eps) - v.evaluate(eps)) < 1e-8
    assert abs(v.evaluate(np.pi - eps) - v.evaluate(-np.pi + eps)) < 1e-8


def test_force_values():
    va = dk.va()
    assert va.force(np.pi / 2) == pytest.approx(2 / np.pi, rel=1e-15)
    assert va.force(-np.pi / 2) == pytest.approx(-2 / np.pi, rel=1e-15)
    assert dk.cosine(1).force(np.pi / 2) == pytest.approx(1.0, rel=1e-12)


def test_force_right_convention_at_kinks():
    va = dk.va()
    # at the kink theta=0 the force takes the right-segment value
    assert va.force(0.0) == pytest.approx(2 / np.pi, rel=1e-15)
    assert va.force(-np.pi) == pytest.approx(-2 / np.pi, rel=1e-15)
    vd = dk.vd()
    assert vd.force(0.0) == pytest.approx(4 / np.pi, rel=1e-12)


def test_builtin_continuity_at_vertices():
    eps = 1e-12
    for pot in (dk.va(), dk.vb(), dk.vc(), dk.vd()):
        for theta in (-np.pi / 2, 0.0, np.pi / 2):
            gap = abs(pot.evaluate(theta - eps) - pot.evaluate(theta + eps))
            assert gap < 1e-10, f"{pot.name} jumps at {theta}"


def test_shift_antisymmetry_grid():
    shifted = wrap_angle(GRID + np.pi)
    for pot in (dk.va(), dk.vb(), dk.vd()):
        residual = np.abs(pot.evaluate(GRID) + pot.evaluate(shifted))
        assert residual.max() < 1e-12, pot.name
    vc = dk.vc()
    residual = np.abs(vc.evaluate(GRID) + vc.evaluate(shifted))
    assert residual.max() >= 0.5  # violated by at least g at theta = pi/2
    assert abs(vc.evaluate(np.pi / 2) + vc.evaluate(-np.pi / 2)) == pytest.approx(
        1.0, abs=1e-12
    )


@pytest.mark.parametrize(
    "factory,expected",
    [
        (dk.va, (True, True, False)),
        (dk.vb, (True, False, False)),
        (dk.vc, (False, True, False)),
        (dk.vd, (True, False, False)),
        (lambda: dk.cosine(1), (True, True, True)),
        (lambda: dk.cosine(2), (False, True, True)),
    ],
)
def test_classify_symmetries(factory, expected):
    tags = dk.classify_symmetries(factory())
    assert (tags.shift_antisymmetric, tags.reflection_symmetric, tags.kam) == expected


def test_predict_regime_trichotomy():
    assert dk.predict_regime(dk.classify_symmetries(dk.va())) == dk.SUPERBALLISTIC
    assert dk.predict_regime(dk.classify_symmetries(dk.vb())) == dk.SUPERBALLISTIC
    assert dk.predict_regime(dk.classify_symmetries(dk.vc())) == dk.BALLISTIC
    assert dk.predict_regime(dk.classify_symmetries(dk.vd())) == dk.SUPERBALLISTIC
    assert dk.predict_regime(dk.classify_symmetries(dk.cosine(1))) == dk.EXPONENTIAL
    assert dk.predict_regime(dk.classify_symmetries(dk.cosine(2))) == dk.BALLISTIC


def test_g_zero_reduces_to_va():
    va = dk.va()
    for pot in (dk.vb(0.0), dk.vc(0.0)):
        assert np.max(np.abs(pot.evaluate(GRID) - va.evaluate(GRID))) < 1e-12


def test_force_integrates_back_piecewise():
    # within each segment the force is constant, so the segmented trapezoid
    # reproduces the potential difference to rounding
    for pot in (dk.va(), dk.vb(), dk.vc()):
        breaks = pot._breaks
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            theta = np.linspace(lo, hi, 101)
            mid = 0.5 * (theta[:-1] + theta[1:])
            h = np.diff(theta)
            integral = np.cumsum(-pot.force(mid) * h)
            expected = pot.evaluate(theta[1:]) - pot.evaluate(lo)
            # endpoint of the last segment wraps to -pi; skip it
            keep = theta[1:] < np.pi
            assert np.max(np.abs(integral[keep] - expected[keep])) < 1e-13


def test_force_integrates_back_smooth():
    n = 65536
    theta = np.linspace(-np.pi, np.pi, n + 1)
    mid = 0.5 * (theta[:-1] + theta[1:])
    h = np.diff(theta)
    for pot in (dk.cosine(1), dk.cosine(3), dk.vd()):
        integral = np.cumsum(-pot.force(mid) * h)
        expected = pot.evaluate(theta[1:]) - pot.evaluate(-np.pi)
        keep = theta[1:] < np.pi
        assert np.max(np.abs(integral[keep] - expected[keep])) < 1e-8


def test_construction_errors():
    with pytest.raises(PotentialError):
        dk.PiecewiseLinear([(-np.pi, -1.0), (1.0, 0.0), (0.5, 1.0)])  # non-monotone
    with pytest.raises(PotentialError):
        dk.PiecewiseLinear([(0.0, 1.0), (1.0, 0.0)])  # missing -pi vertex
    with pytest.raises(PotentialError):
        dk.PiecewiseLinear([(-np.pi, -1.0)])
    with pytest.raises(PotentialError):
        dk.cosine(0)


def test_by_name():
    assert dk.by_name("va").name == "va"
    assert dk.by_name("vb", g=0.2).evaluate(-np.pi / 2) == pytest.approx(0.2)
    assert dk.by_name("cos:3").harmonic == 3
    custom = dk.by_name("custom", vertices=[(-np.pi, 0.0), (0.0, 1.0)])
    assert custom.evaluate(0.0) == pytest.approx(1.0)
    with pytest.raises(PotentialError):
        dk.by_name("nope")
    with pytest.raises(PotentialError):
        dk.by_name("custom")


def test_wrap_angle_range():
    rng = np.random.default_rng(1)
    x = rng.uniform(-50, 50, size=10_000)
    w = wrap_angle(x)
    assert np.all(w >= -np.pi) and np.all(w < np.pi)
    # wrapping preserves the angle mod 2*pi
    assert np.allclose(np.exp(1j * w), np.exp(1j * x), atol=1e-9)
