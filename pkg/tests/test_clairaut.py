import numpy as np
import pytest

from warpsub import charts
from warpsub.clairaut import (GeodesicTrace, WarpedSubmersion, check_clairaut_conditions,
                              check_geodesic_condition, check_wpsub_tensors, clairaut_conditions_hold,
                              clairaut_trace, clairaut_value, codimension_sum, horizontal_laplacian_psi,
                              integrate_geodesic, pushed_girth_gradient, tension_field, with_clairaut)
from warpsub.geometry import inner, norm
from warpsub.submersion import SmoothMap, identity_map
from warpsub.warped import build_warped

from conftest import entry


def unit(m, p, v):
    v = np.asarray(v, dtype=float)
    return v / norm(m.metric(p), v)


# geodesics

def test_straight_line_is_exact_in_euclidean_space():
    m = charts.euclidean(3)
    p0, v0 = np.array([0.1, -0.2, 0.3]), np.array([1.0, 2.0, -0.5])
    tr = integrate_geodesic(m, p0, v0, 1.0, 1e-2)
    assert np.allclose(tr.points, p0 + tr.times[:, None] * v0, rtol=0, atol=1e-14)
    assert tr.energy_drift == 0.0


def test_polar_geodesic_is_a_straight_line():
    m = entry("polar-plane").ws.source.combined
    p0 = np.array([1.5, 0.2])
    v0 = np.array([-0.3, 0.4])
    tr = integrate_geodesic(m, p0, v0, 1.0, 1e-3)
    # closed form: the Cartesian line through p0 with the same initial velocity
    x0 = p0[0] * np.array([np.cos(p0[1]), np.sin(p0[1])])
    e_r = np.array([np.cos(p0[1]), np.sin(p0[1])])
    e_t = np.array([-np.sin(p0[1]), np.cos(p0[1])])
    vc = v0[0] * e_r + p0[0] * v0[1] * e_t
    err = 0.0
    for t, (r, th) in zip(tr.times, tr.points):
        err = max(err, np.linalg.norm(r * np.array([np.cos(th), np.sin(th)]) - (x0 + t * vc)))
    assert err < 1e-6
    assert tr.energy_drift < 1e-6


def test_great_circle_period():
    m = charts.stereographic_sphere(2)
    p0 = np.array([0.5, 0.0])
    v0 = unit(m, p0, [0.0, 1.0])
    tr = integrate_geodesic(m, p0, v0, 2.0 * np.pi, 2.0 * np.pi / 4000)
    assert np.linalg.norm(tr.points[-1] - p0) < 1e-4
    assert np.linalg.norm(tr.points[len(tr.points) // 2] - p0) > 1.0


def test_trace_truncated_at_chart_boundary():
    m = entry("polar-plane").ws.source.combined
    tr = integrate_geodesic(m, [0.5, 0.0], [-1.0, 0.0], 1.0, 1e-3)
    assert tr.boundary_hit
    assert tr.times[-1] < 0.5
    assert any("boundary" in w for w in tr.warnings)


def test_bad_geodesic_inputs():
    m = charts.euclidean(2)
    with pytest.raises(ValueError):
        integrate_geodesic(m, [0, 0], [0, 0], 1.0, 0.1)
    with pytest.raises(ValueError):
        integrate_geodesic(m, [0, 0], [1, 0], 1.0, 0.0)


def test_csv_roundtrip_is_bit_exact(tmp_path):
    e = entry("r4-girth")
    m = e.ws.source.combined
    p0 = e.sample_points(1, np.random.default_rng(5))[0]
    tr = integrate_geodesic(m, p0, unit(m, p0, np.arange(1.0, 8.0)), 0.05, 1e-3)
    tr = with_clairaut(tr, clairaut_trace(e.ws, tr))
    path = tmp_path / "trace.csv"
    tr.to_csv(path)
    back = GeodesicTrace.from_csv(path)
    for a in ("times", "points", "velocities", "energy", "clairaut_values"):
        assert np.array_equal(getattr(tr, a), getattr(back, a))


# Clairaut law

def test_horizontal_velocity_gives_zero_clairaut_value():
    e = entry("polar-plane")
    m = e.ws.source.combined
    tr = integrate_geodesic(m, [1.5, 0.0], [0.3, 0.2], 1.0, 1e-3)
    st = clairaut_trace(e.ws, tr)
    assert np.all(st.values == 0.0) and st.drift == 0.0


def test_clairaut_law_on_r4_girth_and_violation_on_control():
    rng = np.random.default_rng(8)
    good, bad = entry("r4-girth"), entry("non-clairaut-control")
    m = good.ws.source.combined
    p0 = good.sample_points(1, rng)[0]
    v0 = unit(m, p0, rng.standard_normal(7))
    tr = integrate_geodesic(m, p0, v0, 1.0, 1e-3)
    assert clairaut_trace(good.ws, tr).drift < 1e-4
    assert clairaut_trace(bad.ws, tr).drift > 1e-2
    assert tr.energy_drift < 1e-6


def test_clairaut_value_of_null_velocity_is_nan():
    e = entry("r4-girth")
    p = e.sample_points(1, np.random.default_rng(1))[0]
    assert np.isnan(clairaut_value(e.ws, p, np.zeros(7)))


def test_conditions_trivial_on_flat_product():
    e = entry("flat-product")
    reps = check_clairaut_conditions(e.ws, e.sample_points(3, np.random.default_rng(0)))
    assert [r.residual for r in reps] == [0.0, 0.0, 0.0]


def curved_second_fibers():
    """Cone-type entry whose second factor map has circle fibers."""
    r1 = charts.euclidean(1, lambda p: bool(p[0] > 0))
    m2 = charts.euclidean(2, lambda p: bool(p @ p > 1e-8))
    src = build_warped(r1, m2, charts.coordinate(0, 1))
    tgt = build_warped(r1, r1, charts.coordinate(0, 1))
    phi2 = SmoothMap(m2, r1, lambda x: np.array([np.hypot(*x)]),
                     lambda x: (x / np.hypot(*x)).reshape(1, 2))
    return WarpedSubmersion(src, tgt, identity_map(r1), phi2, charts.log_radius([0], 3))


def test_curved_second_fibers_break_condition_iii_and_the_law():
    ws = curved_second_fibers()
    pts = [np.array([1.5, 0.8, 0.3]), np.array([1.2, -0.4, 0.9])]
    reps = {r.relation_id: r for r in check_clairaut_conditions(ws, pts)}
    assert reps["clairaut-i"].passed and reps["clairaut-ii"].passed
    assert not reps["clairaut-iii"].passed
    m = ws.source.combined
    p0 = pts[0]
    tr = integrate_geodesic(m, p0, unit(m, p0, [0.3, 0.5, -0.4]), 1.0, 1e-3)
    assert clairaut_trace(ws, tr).drift > 1e-2


@pytest.mark.parametrize("name", ["flat-product", "r4-girth", "polar-plane", "hopf-fiber",
                                  "non-clairaut-control", "r5-sphere-girth"])
def test_conditions_match_the_law(name):
    e = entry(name)
    rng = np.random.default_rng(21)
    m = e.ws.source.combined
    hold = clairaut_conditions_hold(check_clairaut_conditions(e.ws, e.sample_points(5, rng)))
    p0 = e.sample_points(1, rng)[0]
    tr = integrate_geodesic(m, p0, unit(m, p0, rng.standard_normal(m.dim)), 1.0, 1e-3)
    assert hold == e.is_clairaut
    assert (clairaut_trace(e.ws, tr).drift < 1e-4) == hold


# geodesic condition

def test_geodesic_condition_on_true_geodesics():
    for name in ("r4-girth", "hopf-fiber"):
        e = entry(name)
        m = e.ws.source.combined
        rng = np.random.default_rng(4)
        p0 = e.sample_points(1, rng)[0]
        tr = integrate_geodesic(m, p0, unit(m, p0, rng.standard_normal(m.dim)), 0.3, 1e-3)
        for r in check_geodesic_condition(e.ws, tr):
            assert r.residual < 1e-3, (name, r.relation_id, r.residual)


def _manual_trace(points, velocities, dt):
    n = len(points)
    return GeodesicTrace(dt * np.arange(n), np.array(points), np.array(velocities),
                         np.ones(n), np.full(n, np.nan))


def test_geodesic_condition_rejects_a_circle():
    ws = entry("flat-product").ws
    t = np.linspace(0, 1, 101)
    pts = [[np.cos(s), np.sin(s), 0.0, 0.0] for s in t]
    vel = [[-np.sin(s), np.cos(s), 0.0, 0.0] for s in t]
    h, v = check_geodesic_condition(ws, _manual_trace(pts, vel, t[1]))
    assert h.residual == pytest.approx(1.0, abs=1e-3)


def test_geodesic_condition_zero_on_a_line():
    ws = entry("flat-product").ws
    t = np.linspace(0, 1, 11)
    d = np.array([0.2, -0.5, 0.1, 0.7])
    h, v = check_geodesic_condition(ws, _manual_trace([s * d for s in t], [d] * 11, t[1]))
    assert h.residual < 1e-14 and v.residual < 1e-14


# block tensors

@pytest.mark.parametrize("name", ["flat-product", "r4-girth", "hopf-fiber", "r5-sphere-girth"])
def test_wpsub_tensor_clauses(name, rng):
    e = entry(name)
    reps = check_wpsub_tensors(e.ws, e.sample_points(3, rng), rng, 3)
    assert len(reps) == 11
    assert all(r.passed for r in reps), [(r.relation_id, r.residual) for r in reps if not r.passed]


def test_wpsub_clauses_exact_on_trivial_warping(rng):
    e = entry("flat-product")
    reps = check_wpsub_tensors(e.ws, e.sample_points(2, rng), rng, 2)
    assert max(r.residual for r in reps) == 0.0


# harmonicity and the horizontal Laplacian

def test_identity_blocks_are_harmonic():
    for name in ("flat-product", "polar-plane"):
        e = entry(name)
        p = e.sample_points(1, np.random.default_rng(2))[0]
        assert np.max(np.abs(tension_field(e.ws, p))) < 1e-6
        assert codimension_sum(e.ws) == 0


@pytest.mark.parametrize("name", ["r4-girth", "hopf-fiber", "r5-sphere-girth"])
def test_tension_equals_plus_k_pushed_gradient(name):
    e = entry(name)
    ws = e.ws
    k = codimension_sum(ws)
    for p in e.sample_points(3, np.random.default_rng(6)):
        tau = tension_field(ws, p)
        dpsi = pushed_girth_gradient(ws, p)
        assert np.linalg.norm(dpsi) > 0.1
        assert np.allclose(tau, k * dpsi, atol=1e-6)


@pytest.mark.parametrize("name", ["r4-girth", "hopf-fiber", "r5-sphere-girth"])
def test_tension_with_negative_coefficient_does_not_hold(name):
    e = entry(name)
    p = e.sample_points(1, np.random.default_rng(6))[0]
    tau = tension_field(e.ws, p)
    rhs = -codimension_sum(e.ws) * pushed_girth_gradient(e.ws, p)
    assert np.linalg.norm(tau - rhs) > 0.1


def test_horizontal_laplacian_of_constant_girth():
    e = entry("flat-product")
    assert horizontal_laplacian_psi(e.ws, np.zeros(4)) == (0.0, 0.0)


@pytest.mark.parametrize("name,full,hor", [
    ("polar-plane", 0.0, -1.0),
    ("r4-girth", 3.0, -1.0),
    ("hopf-fiber", 2.0, -1.0),
])
def test_laplacian_closed_forms(name, full, hor):
    # psi = ln r: Delta psi and the H1 trace, in units of 1/r^2
    e = entry(name)
    for p in e.sample_points(3, np.random.default_rng(9)):
        r2 = p[0] ** 2 + (p[1] ** 2 if name == "r4-girth" else 0.0)
        lap, lap_h = horizontal_laplacian_psi(e.ws, p)
        assert lap == pytest.approx(full / r2, abs=1e-9)
        assert lap_h == pytest.approx(hor / r2, abs=1e-9)
