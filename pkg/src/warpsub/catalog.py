"""Built-in warped-product submersions used by the verification suite.

Each entry carries its sampling box, explicit fiber charts where the fibers
are known in closed form, and the status every report row is expected to
take on it.  Entries are built on demand and need no I/O.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import charts
from .clairaut import WPSUB_IDS, WarpedSubmersion
from .geometry import MetricField
from .results import FAIL, PASS, SKIP
from .submersion import SmoothMap, identity_map
from .verifier import REGISTRY, FiberChart
from .warped import build_warped

# every row of a verification report, in output order
ROW_IDS = (
    ("wp-conn-i", "wp-conn-ii", "wp-conn-iii", "wp-conn-iv",
     "wp-curv-i", "wp-curv-ii", "wp-curv-iii", "wp-curv-iv", "wp-curv-v")
    + WPSUB_IDS
    + ("submersion-phi1", "submersion-phi2", "compatibility",
       "clairaut-i", "clairaut-ii", "clairaut-iii", "clairaut-law", "energy-conservation",
       "geodesic-condition-h", "geodesic-condition-v", "clairaut-equivalence")
    + REGISTRY
    + ("einstein", "kulkarni", "weyl", "kulkarni-weyl-consistency", "subharmonicity",
       "divergence-identity", "h-laplacian", "harmonic-tension", "harmonic-tension-signed")
)

# rows that assume the Clairaut conditions; they SKIP on entries violating them
CLAIRAUT_ROWS = REGISTRY + ("h-laplacian", "harmonic-tension", "harmonic-tension-signed")

SAMPLE_MARGIN = 1e-2


@dataclass(frozen=True)
class CatalogEntry:
    """A named warped-product submersion with its test metadata.

    ``box`` is a pair ``(lo, hi)`` of corner arrays in the combined chart.
    ``expected`` maps every id of ``ROW_IDS`` to PASS, FAIL or SKIP.
    """

    name: str
    ws: WarpedSubmersion
    box: tuple
    is_clairaut: bool
    expected: dict
    fiber_charts: dict = field(default_factory=dict)
    leaf_charts: Optional[dict] = None
    notes: str = ""

    @property
    def dim(self):
        return self.ws.source.dim

    def sample_points(self, count, rng):
        """Uniform points in the box shrunk by ``SAMPLE_MARGIN`` on each side."""
        lo, hi = (np.asarray(b, dtype=float) for b in self.box)
        lo, hi = lo + SAMPLE_MARGIN * (hi - lo), hi - SAMPLE_MARGIN * (hi - lo)
        return [lo + (hi - lo) * rng.random(lo.size) for _ in range(count)]


def _positive(i=0):
    return lambda p: bool(p[i] > 0.0)


def _structural_skips(ws, fiber_charts):
    """Rows that cannot be evaluated on ``ws`` for dimensional reasons."""
    m1, n1, m2, n2 = ws.dims
    size = {"V1": m1 - n1, "H1": n1, "V2": m2 - n2, "H2": n2}
    out = set()
    from .verifier import CURV_RELATIONS, _empty_blocks, _fiber_missing

    for rid, (names, needs, _, _) in CURV_RELATIONS.items():
        if _empty_blocks(ws, names) or _fiber_missing(needs, fiber_charts):
            out.add(rid)
    planes = {"sec-phi-1": ("V1", "V1", 1), "sec-phi-2": ("V2", "V2", 2),
              "sec-phi-3": ("H1", "H1", 0), "sec-phi-4": ("H2", "H2", 0),
              "sec-phi-5": ("V1", "H1", 0), "sec-phi-6": ("V2", "H2", 0)}
    for rid, (a, b, fib) in planes.items():
        if (a == b and size[a] < 2) or min(size[a], size[b]) == 0 or (fib and fib not in fiber_charts):
            out.add(rid)
    for k, blk in enumerate(("V1", "V2", "H1", "H2"), start=1):
        if size[blk] == 0 or (k <= 2 and k not in fiber_charts):
            out.add(f"ric-phi-{k}")
    if m1 + m2 < 4:
        out |= {"kulkarni", "weyl", "kulkarni-weyl-consistency"}
    return out


def _expected(ws, fiber_charts, clairaut=True, overrides=None):
    exp = {rid: PASS for rid in ROW_IDS}
    for rid in _structural_skips(ws, fiber_charts):
        exp[rid] = SKIP
    if not clairaut:
        for rid in CLAIRAUT_ROWS:
            exp[rid] = SKIP
    exp.update(overrides or {})
    return exp


# entries

def flat_product():
    r2 = charts.euclidean(2)
    src = build_warped(r2, r2, charts.constant(1.0, 2), "R2 x R2")
    ws = WarpedSubmersion(src, src, identity_map(r2), identity_map(r2), charts.constant(0.0, 4),
                          "flat-product")
    exp = _expected(ws, {}, overrides={"divergence-identity": PASS})
    return CatalogEntry("flat-product", ws, (-np.ones(4), np.ones(4)), True, exp,
                        notes="flat product with identity blocks and constant girth")


def _circle_chart(i, j, size):
    """Fiber chart of ``x -> |(x_i, x_j)|``: the circle through the point."""
    def param(x):
        r = np.hypot(x[i], x[j])
        base = np.array(x, dtype=float)

        def F(s):
            q = base.copy()
            q[i], q[j] = r * np.cos(s[0]), r * np.sin(s[0])
            return q

        def DF(s):
            d = np.zeros((size, 1))
            d[i, 0], d[j, 0] = -r * np.sin(s[0]), r * np.cos(s[0])
            return d

        return np.arctan2(x[j], x[i]), F, DF
    return param


def _coordinate_chart(indices, size):
    """Fiber chart of a coordinate projection: the affine slice through the point."""
    idx = list(indices)

    def param(x):
        base = np.array(x, dtype=float)

        def F(s):
            q = base.copy()
            q[idx] = s
            return q

        D = np.zeros((size, len(idx)))
        D[idx, range(len(idx))] = 1.0
        return base[idx], F, lambda s: D
    return param


def _r4_girth(name, psi_scale):
    m1 = charts.euclidean(4, lambda p: bool(p[0] ** 2 + p[1] ** 2 > 1e-8), "R^4")
    m2 = charts.euclidean(3, name="R^3")
    f = charts.radius([0, 1], 4)
    src = build_warped(m1, m2, f, "R^4 x_r R^3")
    n1 = charts.euclidean(3, _positive(0), "R^3_+")
    n2 = charts.euclidean(2, name="R^2")
    tgt = build_warped(n1, n2, charts.coordinate(0, 3), "R^3 x_y R^2")

    def v1(x):
        return np.array([np.hypot(x[0], x[1]), x[2], x[3]])

    def j1(x):
        r = np.hypot(x[0], x[1])
        return np.array([[x[0] / r, x[1] / r, 0.0, 0.0], [0, 0, 1.0, 0], [0, 0, 0, 1.0]])

    proj = np.array([[1.0, 0, 0], [0, 1.0, 0]])
    phi1 = SmoothMap(m1, n1, v1, j1, "polar radius")
    phi2 = SmoothMap(m2, n2, lambda x: proj @ x, lambda x: proj.copy(), "projection")
    psi = charts.log_radius([0, 1], 7, psi_scale)
    ws = WarpedSubmersion(src, tgt, phi1, phi2, psi, name)
    fibers = {1: FiberChart(1, _circle_chart(0, 1, 4)), 2: FiberChart(2, _coordinate_chart([2], 3))}
    lo = np.array([1.2, -0.6, -1, -1, -1, -1, -1])
    hi = np.array([2.0, 0.6, 1, 1, 1, 1, 1])
    return ws, fibers, (lo, hi)


NOT_CONFORMALLY_FLAT = {"kulkarni": FAIL, "weyl": FAIL}


def r4_girth():
    ws, fibers, box = _r4_girth("r4-girth", 1.0)
    exp = _expected(ws, fibers, overrides={
        **NOT_CONFORMALLY_FLAT, "einstein": FAIL, "divergence-identity": SKIP,
        "h-laplacian": FAIL, "harmonic-tension": FAIL})
    return CatalogEntry("r4-girth", ws, box, True, exp, fibers,
                        notes="radius map on R^4 with circle fibers, girth ln r")


def non_clairaut_control():
    ws, fibers, box = _r4_girth("non-clairaut-control", 2.0)
    exp = _expected(ws, fibers, clairaut=False, overrides={
        **NOT_CONFORMALLY_FLAT, "einstein": FAIL, "divergence-identity": SKIP,
        "clairaut-ii": FAIL, "clairaut-law": FAIL})
    return CatalogEntry("non-clairaut-control", ws, box, False, exp, fibers,
                        notes="r4-girth with the girth doubled; violates the Clairaut conditions")


def polar_plane():
    m1 = charts.euclidean(1, _positive(0), "R_+")
    m2 = charts.euclidean(1, name="theta")
    f = charts.coordinate(0, 1)
    src = build_warped(m1, m2, f, "R_+ x_r S^1")
    ws = WarpedSubmersion(src, src, identity_map(m1), identity_map(m2), charts.log_radius([0], 2),
                          "polar-plane")
    exp = _expected(ws, {}, overrides={"h-laplacian": FAIL})
    return CatalogEntry("polar-plane", ws, (np.array([1.2, -1.0]), np.array([2.0, 1.0])), True, exp,
                        notes="flat plane in polar coordinates with girth ln r")


# Hopf fibration S^3(1) -> S^2(1/2) through stereographic charts

def _inv_stereo3(u):
    s = 1.0 + u @ u
    x = np.append(2.0 * u, u @ u - 1.0) / s
    D = np.zeros((4, 3))
    D[:3] = 2.0 * np.eye(3) / s - 4.0 * np.outer(u, u) / s ** 2
    D[3] = 4.0 * u / s ** 2
    return x, D


def _hopf_unit(x):
    """``S^3 -> S^2(1)`` with its ambient Jacobian."""
    x1, x2, x3, x4 = x
    q = np.array([2.0 * (x1 * x3 + x2 * x4), 2.0 * (x2 * x3 - x1 * x4),
                  x1 ** 2 + x2 ** 2 - x3 ** 2 - x4 ** 2])
    D = 2.0 * np.array([[x3, x4, x1, x2], [-x4, x3, x2, -x1], [x1, x2, -x3, -x4]])
    return q, D


def _stereo2(q):
    d = 1.0 - q[2]
    v = q[:2] / d
    D = np.zeros((2, 3))
    D[:, :2] = np.eye(2) / d
    D[:, 2] = q[:2] / d ** 2
    return v, D


def hopf_value(u):
    return _stereo2(_hopf_unit(_inv_stereo3(u)[0])[0])[0]


def hopf_jacobian(u):
    x, dx = _inv_stereo3(u)
    q, dq = _hopf_unit(x)
    return _stereo2(q)[1] @ dq @ dx


def _stereo3(x):
    d = 1.0 - x[3]
    D = np.zeros((3, 4))
    D[:, :3] = np.eye(3) / d
    D[:, 3] = x[:3] / d ** 2
    return x[:3] / d, D


def _hopf_fiber(x2):
    """Great circle ``t -> cos t x + sin t i x`` through the point, in the chart."""
    x = _inv_stereo3(np.asarray(x2, dtype=float))[0]
    ix = np.array([-x[1], x[0], -x[3], x[2]])

    def F(s):
        return _stereo3(np.cos(s[0]) * x + np.sin(s[0]) * ix)[0]

    def DF(s):
        y = np.cos(s[0]) * x + np.sin(s[0]) * ix
        return (_stereo3(y)[1] @ (-np.sin(s[0]) * x + np.cos(s[0]) * ix)).reshape(3, 1)

    return np.zeros(1), F, DF


def hopf_fiber():
    m1 = charts.euclidean(1, _positive(0), "R_+")
    s3 = charts.stereographic_sphere(3, 1.0)
    f = charts.coordinate(0, 1)
    src = build_warped(m1, s3, f, "R_+ x_r S^3")
    s2 = charts.stereographic_sphere(2, 0.5)
    s2 = MetricField(2, s2.metric_at, s2.d_metric_at, s2.dd_metric_at,
                     lambda v: bool(v @ v < 1e6), s2.name)
    tgt = build_warped(m1, s2, f, "R_+ x_r S^2(1/2)")
    hopf = SmoothMap(s3, s2, hopf_value, hopf_jacobian, "Hopf")
    ws = WarpedSubmersion(src, tgt, identity_map(m1), hopf, charts.log_radius([0], 4), "hopf-fiber")
    fibers = {2: FiberChart(2, _hopf_fiber)}
    exp = _expected(ws, fibers, overrides={
        "curv-phi-08": FAIL, "h-laplacian": FAIL, "harmonic-tension": FAIL})
    lo = np.array([1.6, -0.25, -0.25, -0.25])
    hi = np.array([2.0, 0.25, 0.25, 0.25])
    return CatalogEntry("hopf-fiber", ws, (lo, hi), True, exp, fibers,
                        notes="cone over the Hopf fibration; the source is flat R^4")


def _sphere_angle_chart(x):
    r = float(np.linalg.norm(x))

    def F(s):
        a, t = s
        return r * np.array([np.sin(a) * np.cos(t), np.sin(a) * np.sin(t), np.cos(a)])

    def DF(s):
        a, t = s
        return r * np.array([[np.cos(a) * np.cos(t), -np.sin(a) * np.sin(t)],
                             [np.cos(a) * np.sin(t), np.sin(a) * np.cos(t)],
                             [-np.sin(a), 0.0]])

    return np.array([np.arccos(x[2] / r), np.arctan2(x[1], x[0])]), F, DF


def r5_sphere_girth():
    m1 = charts.euclidean(3, lambda p: bool(p @ p > 1e-8), "R^3")
    m2 = charts.euclidean(2, name="R^2")
    f = charts.radius([0, 1, 2], 3)
    src = build_warped(m1, m2, f, "R^3 x_r R^2")
    n1 = charts.euclidean(1, _positive(0), "R_+")
    n2 = charts.euclidean(0, name="point")
    tgt = build_warped(n1, n2, charts.coordinate(0, 1), "R_+ x point")

    def j1(x):
        return (x / np.linalg.norm(x)).reshape(1, 3)

    phi1 = SmoothMap(m1, n1, lambda x: np.array([np.linalg.norm(x)]), j1, "radius")
    phi2 = SmoothMap(m2, n2, lambda x: np.zeros(0), lambda x: np.zeros((0, 2)), "collapse")
    ws = WarpedSubmersion(src, tgt, phi1, phi2, charts.log_radius([0, 1, 2], 5), "r5-sphere-girth")
    fibers = {1: FiberChart(1, _sphere_angle_chart), 2: FiberChart(2, _coordinate_chart([0, 1], 2))}
    exp = _expected(ws, fibers, overrides={
        **NOT_CONFORMALLY_FLAT, "einstein": FAIL, "divergence-identity": SKIP,
        "curv-phi-02": FAIL, "sec-phi-2": FAIL, "ric-phi-2": FAIL,
        "h-laplacian": FAIL, "harmonic-tension": FAIL})
    lo = np.array([1.0, 0.2, -0.4, -1.0, -1.0])
    hi = np.array([1.6, 0.8, 0.4, 1.0, 1.0])
    return CatalogEntry("r5-sphere-girth", ws, (lo, hi), True, exp, fibers,
                        notes="radius map on R^3 with sphere fibers; second factor collapsed to a point")


BUILDERS = {
    "flat-product": flat_product,
    "r4-girth": r4_girth,
    "polar-plane": polar_plane,
    "hopf-fiber": hopf_fiber,
    "non-clairaut-control": non_clairaut_control,
    "r5-sphere-girth": r5_sphere_girth,
}


def catalog_entries():
    return [build() for build in BUILDERS.values()]


def get_entry(name):
    """Entry by name; KeyError listing the known names otherwise."""
    try:
        return BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown entry {name!r}; known: {', '.join(BUILDERS)}") from None
