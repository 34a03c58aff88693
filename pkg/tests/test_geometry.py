import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from warpsub import charts
from warpsub.errors import ChartBoundaryError, DegeneratePlaneError, NonInvertibleMetricError
from warpsub.geometry import (MetricField, ScalarField, christoffel, cov_deriv_field, grad,
                              hessian, inverse_metric, kulkarni_nomizu, laplacian, ricci,
                              riemann, scalar_curv, sectional, tensor_norm, weyl)

from conftest import entry

coords = st.floats(min_value=-0.8, max_value=0.8, allow_nan=False)


def polar():
    return entry("polar-plane").ws.source.combined


def test_polar_christoffel_closed_form():
    r = 1.7
    G = christoffel(polar(), [r, 0.3])
    assert G[0, 1, 1] == pytest.approx(-r, abs=1e-12)
    assert G[1, 0, 1] == pytest.approx(1.0 / r, abs=1e-12)
    assert G[1, 1, 0] == pytest.approx(1.0 / r, abs=1e-12)
    assert abs(G[0, 0, 0]) + abs(G[1, 1, 1]) + abs(G[0, 0, 1]) < 1e-12


def test_polar_is_flat_on_both_tiers():
    m = polar()
    for p in ([1.3, 0.0], [1.9, -0.7]):
        assert np.max(np.abs(riemann(m, p))) < 1e-8
        assert np.max(np.abs(riemann(m.without_derivatives(), p))) < 1e-4


def test_euclidean_curvature_vanishes():
    m = charts.euclidean(3)
    assert np.all(riemann(m, [0.1, 2.0, -3.0]) == 0.0)


@pytest.mark.parametrize("radius", [1.0, 2.5])
def test_sphere_sectional_curvature(radius):
    m = charts.stereographic_sphere(2, radius)
    p = [0.3, -0.4]
    k = sectional(m, p, [1.0, 0.0], [0.2, 1.0])
    assert k == pytest.approx(1.0 / radius ** 2, abs=1e-6)
    assert sectional(m.without_derivatives(), p, [1.0, 0.0], [0.0, 1.0]) == pytest.approx(
        1.0 / radius ** 2, abs=1e-4)


def test_sphere_angles_curvature_and_ricci():
    m = charts.sphere2_angles()
    p = [1.1, 0.4]
    assert sectional(m, p, [1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(ricci(m, p), m.metric(p), atol=1e-10)
    assert scalar_curv(m, p) == pytest.approx(2.0, abs=1e-10)


def test_three_sphere_is_einstein():
    m = charts.stereographic_sphere(3)
    p = [0.2, 0.1, -0.3]
    assert np.allclose(ricci(m, p), 2.0 * m.metric(p), atol=1e-10)


def test_conformally_flat_closed_form():
    # exp(2 x1) delta: R = exp(2 x1) (P (.) delta) with P = e1 e1^T - delta / 2
    m = charts.exp_conformal(4, [1.0, 0.0, 0.0, 0.0])
    d = np.eye(4)
    P = np.outer(d[0], d[0]) - 0.5 * d
    for p in ([0.3, -0.2, 0.5, 0.1], [-0.4, 0.7, 0.0, -0.6]):
        closed = np.exp(2.0 * p[0]) * kulkarni_nomizu(P, d)
        assert np.max(np.abs(riemann(m, p) - closed)) < 1e-8
        assert np.max(np.abs(riemann(m.without_derivatives(), p) - closed)) < 1e-4
        assert tensor_norm(m, p, weyl(m, p).tensor) < 1e-8
        assert sectional(m, p, d[1], d[2]) == pytest.approx(-np.exp(-2.0 * p[0]), rel=1e-10)


@pytest.mark.parametrize("name", ["flat-product", "r4-girth", "polar-plane", "hopf-fiber",
                                  "r5-sphere-girth"])
def test_analytic_and_fd_paths_agree(name):
    e = entry(name)
    m = e.ws.source.combined
    p = e.sample_points(1, np.random.default_rng(3))[0]
    for fn in (christoffel, riemann):
        a, b = fn(m, p), fn(m.without_derivatives(), p)
        assert np.max(np.abs(a - b)) <= 1e-5 * max(1.0, np.max(np.abs(a)))


@settings(max_examples=25, deadline=None)
@given(st.tuples(coords, coords, coords, coords))
def test_riemann_symmetries(p):
    m = charts.exp_conformal(4, [0.5, -0.3, 0.2, 0.1])
    R = riemann(m, p)
    assert np.allclose(R, -R.transpose(1, 0, 2, 3), atol=1e-10)
    assert np.allclose(R, -R.transpose(0, 1, 3, 2), atol=1e-10)
    assert np.allclose(R, R.transpose(2, 3, 0, 1), atol=1e-10)
    bianchi = R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)
    assert np.max(np.abs(bianchi)) < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.tuples(coords, coords, coords, coords))
def test_weyl_is_trace_free(p):
    m = charts.product(charts.stereographic_sphere(2), charts.euclidean(2))
    W = weyl(m, p).tensor
    gi = inverse_metric(m.metric(p))
    assert np.max(np.abs(np.einsum("il,ijkl->jk", gi, W))) < 1e-10


def test_weyl_trivial_below_dimension_four():
    res = weyl(charts.stereographic_sphere(3), [0.1, 0.2, 0.3])
    assert res.trivial_dimension and not np.any(res.tensor)


@settings(max_examples=25, deadline=None)
@given(st.tuples(coords, coords), st.floats(0.1, 10.0))
def test_sectional_is_scale_invariant(p, s):
    m = charts.stereographic_sphere(2, 1.3)
    X, Y = np.array([1.0, 0.4]), np.array([-0.2, 0.9])
    assert sectional(m, p, s * X, Y) == pytest.approx(sectional(m, p, X, Y), rel=1e-10)


def test_metric_compatibility_of_connection():
    # d_k g_ij = Gamma^l_ki g_lj + Gamma^l_kj g_il
    m = charts.stereographic_sphere(3, 0.7)
    p = np.array([0.2, -0.1, 0.4])
    g, G = m.metric(p), christoffel(m, p)
    rhs = np.einsum("lki,lj->kij", G, g) + np.einsum("lkj,il->kij", G, g)
    assert np.allclose(m.d_metric(p), rhs, atol=1e-12)


def test_log_radius_is_harmonic_in_the_plane():
    m = charts.euclidean(2)
    s = charts.log_radius([0, 1], 2)
    assert laplacian(m, s, [1.2, -0.7]) == pytest.approx(0.0, abs=1e-12)
    r2 = ScalarField(lambda p: float(p @ p))
    assert laplacian(m, r2, [0.3, 0.5]) == pytest.approx(4.0, abs=1e-5)


def test_hessian_of_radius_in_polar_chart():
    m = polar()
    r = charts.coordinate(0, 2)
    H = hessian(m, r, [1.5, 0.2])
    # Hess r = r dtheta^2 in polar coordinates
    assert np.allclose(H, [[0.0, 0.0], [0.0, 1.5]], atol=1e-12)
    assert np.allclose(grad(m, r, [1.5, 0.2]), [1.0, 0.0])


def test_cov_deriv_of_radial_field():
    m = polar()
    p = np.array([1.4, 0.0])
    # the unit radial field is parallel along rays and turns along circles
    out = cov_deriv_field(m, p, [0.0, 1.0], lambda x: np.array([1.0, 0.0]))
    assert np.allclose(out, [0.0, 1.0 / 1.4], atol=1e-10)


def test_errors():
    bad = MetricField(2, lambda p: np.diag([1.0, 0.0]))
    with pytest.raises(NonInvertibleMetricError):
        christoffel(bad, [0.0, 0.0])
    with pytest.raises(ChartBoundaryError):
        christoffel(polar(), [-1.0, 0.0])
    with pytest.raises(ValueError):
        christoffel(polar(), [1.0, 0.0, 0.0])
    with pytest.raises(DegeneratePlaneError):
        sectional(charts.euclidean(2), [0, 0], [1.0, 1.0], [2.0, 2.0])
    edge = charts.euclidean(1, lambda p: bool(p[0] > 0.0))
    with pytest.raises(ChartBoundaryError):
        cov_deriv_field(edge, [1e-9], [1.0], lambda x: np.ones(1))
