import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from mdm.bounds import BoundFamily, bound_f, curve, g_domain, saturation_residual
from mdm.ensembles import Family, mc_average

U, C = BoundFamily.UNIVERSAL, BoundFamily.COVARIANT


def frontier_by_search(g, family):
    """Solve G(theta) = g on [0, pi/4] and return F(theta) there."""
    if family is U:
        G = lambda t: (3 + np.cos(2 * t)) / 6
        F = lambda t: (2 + np.sin(2 * t)) / 3
    else:
        G = lambda t: (2 + np.cos(2 * t)) / 4
        F = lambda t: (3 + np.sin(2 * t)) / 4
    t = brentq(lambda t: G(t) - g, 0.0, np.pi / 4, xtol=1e-15)
    return F(t)


@pytest.mark.parametrize(
    "g, family, f",
    [(2 / 3, U, 2 / 3), (0.5, U, 1.0), (0.5, C, 1.0), (0.75, C, 0.75)],
)
def test_bound_extreme_points(g, family, f):
    assert bound_f(g, family) == pytest.approx(f, abs=1e-12)


def test_bound_interior_values():
    assert frontier_by_search(0.6, U) == pytest.approx(0.9333333333333333, abs=1e-12)
    assert frontier_by_search(0.7, C) == pytest.approx(0.9, abs=1e-12)
    assert bound_f(0.6, U) == pytest.approx(0.9333333333333333, abs=1e-12)
    assert bound_f(0.7, C) == pytest.approx(0.9, abs=1e-12)


@pytest.mark.parametrize("family", [U, C])
def test_bound_matches_search_on_grid(family):
    lo, hi = g_domain(family)
    for g in np.linspace(lo, hi, 50)[1:-1]:
        assert bound_f(g, family) == pytest.approx(frontier_by_search(g, family), abs=1e-10)


@pytest.mark.parametrize("g, family", [(0.49, U), (0.7, U), (0.76, C), (0.2, C)])
def test_bound_domain_error(g, family):
    with pytest.raises(ValueError, match=r"\[0.5"):
        bound_f(g, family)


@pytest.mark.parametrize("family", [U, C])
def test_saturation_on_fine_grid(family):
    res = [saturation_residual(t, family) for t in np.linspace(0, np.pi / 4, 1000)]
    assert max(abs(r) for r in res) <= 1e-12


def test_saturation_examples():
    assert saturation_residual(0.0, U) == pytest.approx(0, abs=1e-12)
    assert saturation_residual(np.pi / 8, U) == pytest.approx(0, abs=1e-12)
    assert saturation_residual(np.pi / 4, C) == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("family", [U, C])
def test_frontier_strictly_decreasing(family):
    lo, hi = g_domain(family)
    g = np.linspace(lo, hi, 400)[1:-1]
    f = np.array([bound_f(x, family) for x in g])
    assert np.all(np.diff(f) < 0)


@pytest.mark.parametrize(
    "family, pts",
    [(U, [(2 / 3, 2 / 3), (0.5, 1.0)]), (C, [(0.75, 0.75), (0.5, 1.0)])],
)
def test_curve_endpoints(family, pts):
    two = curve(family, 2)
    assert [(p.g, p.f) for p in two] == pytest.approx(pts, abs=1e-12)
    many = curve(family, 101)
    assert len(many) == 101
    assert (many[0].g, many[0].f) == pytest.approx(pts[0], abs=1e-12)
    assert (many[-1].g, many[-1].f) == pytest.approx(pts[1], abs=1e-12)
    for p in many:
        assert abs(saturation_residual(p.theta, family)) <= 1e-12


def test_curve_needs_two_points():
    with pytest.raises(ValueError):
        curve(U, 1)


@given(st.floats(0, np.pi / 4), st.integers(0, 1000))
def test_monte_carlo_points_never_beat_bound(theta, seed):
    for family, ens in ((U, Family.UNIVERSAL_HAAR), (C, Family.COVARIANT_EQUATORIAL)):
        pt = mc_average(theta, ens, 2000, np.random.default_rng(seed))
        lo, hi = g_domain(family)
        # the frontier is decreasing, so the most lenient g within 5 sigma is the lowest
        g = min(max(pt.g - 5 * pt.stderr_g, lo), hi)
        assert pt.f <= bound_f(g, family) + 5 * pt.stderr_f + 1e-12
