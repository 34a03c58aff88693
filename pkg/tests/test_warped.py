import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from warpsub import charts
from warpsub.errors import InvalidWarpingError
from warpsub.geometry import ANALYTIC, christoffel, riemann, sectional
from warpsub.warped import build_warped, check_wp_connection, check_wp_curvature

from conftest import entry


def r4_r2():
    m1 = charts.euclidean(4, lambda p: bool(p[0] ** 2 + p[1] ** 2 > 1e-8))
    return build_warped(m1, charts.euclidean(2), charts.radius([0, 1], 4))


@pytest.mark.parametrize("name", ["flat-product", "r4-girth", "polar-plane"])
def test_lemmas_on_catalog_entries(name, rng):
    e = entry(name)
    pts = e.sample_points(6, rng)
    for r in check_wp_connection(e.ws.source, pts, rng, 4) + check_wp_curvature(e.ws.source, pts, rng, 4):
        assert r.tier == ANALYTIC
        assert r.passed, (r.relation_id, r.residual)


def test_lemmas_on_r4_times_r2(rng):
    w = r4_r2()
    pts = [np.array([1.3, 0.2, 0.1, -0.5, 0.4, 0.9]), np.array([-0.8, 1.1, 0.0, 0.3, -1.0, 0.2])]
    reports = check_wp_connection(w, pts, rng) + check_wp_curvature(w, pts, rng)
    assert [r.relation_id for r in reports] == [
        "wp-conn-i", "wp-conn-ii", "wp-conn-iii", "wp-conn-iv",
        "wp-curv-i", "wp-curv-ii", "wp-curv-iii", "wp-curv-iv", "wp-curv-v"]
    assert all(r.passed for r in reports)


def test_lemmas_hold_on_fd_tier(rng):
    m1 = charts.euclidean(1, lambda p: bool(p[0] > 0)).without_derivatives()
    w = build_warped(m1, charts.stereographic_sphere(2).without_derivatives(),
                     charts.coordinate(0, 1))
    pts = [np.array([1.5, 0.2, -0.1])]
    reports = check_wp_connection(w, pts, rng, 3) + check_wp_curvature(w, pts, rng, 3)
    assert all(r.tier == "fd" and r.passed for r in reports)


def test_cone_over_round_sphere_is_flat():
    # dr^2 + r^2 g_{S^2} is the flat metric of R^3
    m1 = charts.euclidean(1, lambda p: bool(p[0] > 0))
    w = build_warped(m1, charts.stereographic_sphere(2), charts.coordinate(0, 1))
    assert np.max(np.abs(riemann(w.combined, [1.4, 0.3, -0.2]))) < 1e-10


def test_warped_sectional_of_mixed_plane():
    # mixed plane curvature is -Hess f(X, X) / f; for f = r on R^4 and X radial it is 0,
    # for X tangential to the circle it is -1/r^2
    w = r4_r2()
    p = np.array([1.5, 0.0, 0.0, 0.0, 0.0, 0.0])
    V = np.array([0, 0, 0, 0, 1.0, 0])
    assert sectional(w.combined, p, [1.0, 0, 0, 0, 0, 0], V) == pytest.approx(0.0, abs=1e-12)
    assert sectional(w.combined, p, [0, 1.0, 0, 0, 0, 0], V) == pytest.approx(-1 / 1.5 ** 2, abs=1e-12)


def test_analytic_metric_derivatives_match_fd():
    w = r4_r2()
    p = np.array([1.3, 0.2, 0.1, -0.5, 0.4, 0.9])
    fdm = w.combined.without_derivatives()
    assert np.max(np.abs(christoffel(w.combined, p) - christoffel(fdm, p))) < 1e-8
    assert np.max(np.abs(riemann(w.combined, p) - riemann(fdm, p))) < 1e-5


def test_nonpositive_warping_rejected():
    m = charts.euclidean(1)
    with pytest.raises(InvalidWarpingError):
        build_warped(m, m, charts.coordinate(0, 1), probe=[np.array([-1.0])])
    w = build_warped(m, m, charts.coordinate(0, 1))
    with pytest.raises(InvalidWarpingError):
        w.combined.metric(np.array([0.0, 1.0]))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.5, 3.0), st.floats(-2, 2), st.floats(-2, 2))
def test_split_join_roundtrip(a, b, c):
    w = r4_r2()
    p = np.array([a, b, c, a * b, b - c, 1.0])
    x1, x2 = w.split(p)
    assert np.array_equal(w.join(x1, x2), p)
    assert np.array_equal(w.lift1(x1) + w.lift2(x2), p)
