"""Curvature identities of Clairaut warped-product submersions and related checks.

Every identity is evaluated at sampled points with random vectors drawn from
the blocks ``V1, H1, V2, H2`` of the joint frame.  The left side always comes
from the curvature tensor of the combined metric.  The right side is assembled
from factor data: intrinsic fiber curvature through explicit fiber charts,
Hessians of ``psi`` and ``f``, the O'Neill tensor ``A``, and the curvature of
the target factors pulled back through ``phi_i*``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import charts, fd
from .clairaut import (WarpedSubmersion, check_clairaut_conditions, clairaut_conditions_hold,
                       horizontal_laplacian_psi)
from .errors import DegeneratePlaneError, DimensionError, HypothesisViolation
from .geometry import (ANALYTIC, FD, MetricField, ScalarField, christoffel, grad, hessian,
                       inner, inverse_metric, laplacian, norm, ricci, riemann, scalar_curv,
                       sectional, tensor_norm, weyl, worse_tier)
from .results import MaxTracker, RelationReport, random_in_span, relative, skipped
from .submersion import _projectors, horizontal_lift, oneill_tensors

DIVERGENCE_TOLERANCE = 1e-3


@dataclass(frozen=True)
class FiberChart:
    """Parametrization of the fiber of ``phi_i`` through a factor point.

    ``param(x_i)`` returns ``(s0, F, DF)``: the parameter of ``x_i``, the map
    from parameters to factor coordinates and its Jacobian.
    """

    factor: int
    param: Callable


# which block each vector name is drawn from
BLOCK = {}
for _n in ("U", "V", "W", "F"):
    BLOCK[_n + "1"], BLOCK[_n + "2"] = "V1", "V2"
for _n in ("X", "Y", "Z", "H"):
    BLOCK[_n + "1"], BLOCK[_n + "2"] = "H1", "H2"
BLOCK.update({"E1": "M1", "E2": "M2", "G2": "M2", "E": "M", "F": "M"})


class PointData:
    """Everything the identities need at one point, computed lazily."""

    def __init__(self, ws: WarpedSubmersion, p, fiber_charts=None):
        w = ws.source
        m = w.combined
        self.ws = ws
        self.p = m.point(p)
        self.x1, self.x2 = w.split(self.p)
        self.g = m.metric(self.p)
        self.gi = inverse_metric(self.g)
        self.R = riemann(m, self.p)
        self.blocks = dict(ws.block_frame(self.p).blocks)
        self.blocks["M1"] = np.vstack([self.blocks["V1"], self.blocks["H1"]])
        self.blocks["M2"] = np.vstack([self.blocks["V2"], self.blocks["H2"]])
        self.blocks["M"] = np.vstack([self.blocks["M1"], self.blocks["M2"]])
        self.dpsi = ws.psi.partials(self.p)
        self.grad_psi = self.gi @ self.dpsi
        self.grad_psi_sq = float(self.dpsi @ self.grad_psi)
        self.hess_psi = hessian(m, ws.psi, self.p)
        self.f = w.f.value(self.x1)
        self.hess_f = hessian(m, charts.embed(w.f, 0, w.dim1, w.dim), self.p)
        self.lap_h1 = float(sum(x @ self.hess_psi @ x for x in self.blocks["H1"]))
        self.fiber_charts = fiber_charts or {}
        self._oneill = None
        self._fiber = {}
        self._target = {}

    # metric helpers
    def ip(self, a, b):
        return inner(self.g, a, b)

    def Rm(self, a, b, c, d):
        return float(np.einsum("ijkl,i,j,k,l->", self.R, a, b, c, d))

    def H_psi(self, a, b):
        return float(a @ self.hess_psi @ b)

    def H_f(self, a, b):
        return float(a @ self.hess_f @ b)

    def d_psi(self, a):
        return float(self.dpsi @ a)

    # O'Neill tensor of the joint map
    @property
    def oneill(self):
        if self._oneill is None:
            self._oneill = oneill_tensors(self.ws.joint, self.p)
        return self._oneill

    def A(self, a, b):
        return self.oneill.A(a, b)

    def gA(self, a, b, c, d):
        """``g(A(a, b), A(c, d))``."""
        return self.ip(self.A(a, b), self.A(c, d))

    def _basic(self, X):
        Xt = self.ws.jacobian(self.p) @ X
        return lambda x: horizontal_lift(self.ws.joint, x, Xt)

    def nabla_A(self, U, X, Y):
        """``nabla_U (A(X, Y))`` with ``X, Y`` extended as basic fields."""
        from .geometry import cov_deriv_field

        Xb, Yb = self._basic(X), self._basic(Y)
        joint = self.ws.joint

        def field(x):
            return oneill_tensors(joint, x).A(Xb(x), Yb(x))

        return cov_deriv_field(self.ws.source.combined, self.p, U, field, fd.H2)

    def div_A(self, block, X, Y):
        return float(sum(self.ip(self.nabla_A(E, X, Y), E) for E in self.blocks[block]))

    # intrinsic geometry of the fibers
    def fiber(self, i):
        """``(R_hat, Ric_hat, coords)`` of the ``phi_i`` fiber, or None without a chart."""
        if i in self._fiber:
            return self._fiber[i]
        chart = self.fiber_charts.get(i)
        if chart is None:
            self._fiber[i] = None
            return None
        w = self.ws.source
        m = w.combined
        block = w.block1 if i == 1 else w.block2
        s0, F, DF = chart.param(self.x1 if i == 1 else self.x2)
        s0 = np.atleast_1d(np.asarray(s0, dtype=float))
        k = s0.size
        base = self.p.copy()

        def embed(s):
            q = base.copy()
            q[block] = F(s)
            return q

        def jac(s):
            D = np.zeros((m.dim, k))
            D[block] = np.asarray(DF(s), dtype=float).reshape(-1, k)
            return D

        def induced(s):
            D = jac(s)
            return D.T @ m.metric(embed(s)) @ D

        mf = MetricField(k, induced, name=f"fiber {i}")
        Rf = riemann(mf, s0)
        Ricf = ricci(mf, s0, Rf)
        D0 = jac(s0)

        def coords(v):
            return np.linalg.lstsq(D0, v, rcond=None)[0]

        self._fiber[i] = (Rf, Ricf, coords)
        return self._fiber[i]

    def R_hat(self, i, a, b, c, d):
        Rf, _, co = self.fiber(i)
        return float(np.einsum("ijkl,i,j,k,l->", Rf, co(a), co(b), co(c), co(d)))

    def Ric_hat(self, i, a, b):
        _, Ricf, co = self.fiber(i)
        return float(co(a) @ Ricf @ co(b))

    # curvature of the target factors pulled back
    def target(self, i):
        if i not in self._target:
            ws = self.ws
            phi = ws.phi1 if i == 1 else ws.phi2
            x = self.x1 if i == 1 else self.x2
            mt = ws.target.m1 if i == 1 else ws.target.m2
            y = phi.value(x)
            Rt = riemann(mt, y)
            Rict = ricci(mt, y, Rt)
            scale = 1.0 if i == 1 else ws.target.f.value(ws.phi1.value(self.x1)) ** 2
            self._target[i] = (scale * Rt, Rict, phi.jacobian(x),
                               ws.source.block1 if i == 1 else ws.source.block2)
        return self._target[i]

    def R_star(self, i, a, b, c, d):
        Rt, _, J, blk = self.target(i)
        return float(np.einsum("ijkl,i,j,k,l->", Rt, J @ a[blk], J @ b[blk], J @ c[blk], J @ d[blk]))

    def Ric_H(self, i, a, b):
        _, Rict, J, blk = self.target(i)
        return float((J @ a[blk]) @ Rict @ (J @ b[blk]))


def _wedge(c, a, b):
    return c.ip(a, a) * c.ip(b, b) - c.ip(a, b) ** 2


# ---------------------------------------------------------------------------
# registry: id -> (vector names, needs, zero relation?, evaluator)
# evaluators return (lhs, [rhs terms], {auxiliary name: (lhs, [terms])})


def _bracket(c, a, b, cc, d):
    """``g(a, d) g(b, cc) - g(a, cc) g(b, d)``."""
    return c.ip(a, d) * c.ip(b, cc) - c.ip(a, cc) * c.ip(b, d)


def _r01(c, v):
    U, V, W, F = v["U1"], v["V1"], v["W1"], v["F1"]
    return c.Rm(U, V, W, F), [c.R_hat(1, U, V, W, F), -c.grad_psi_sq * _bracket(c, U, V, W, F)], {}


def _r02(c, v):
    U, V, W, F = v["U2"], v["V2"], v["W2"], v["F2"]
    lhs, rh, br = c.Rm(U, V, W, F), c.R_hat(2, U, V, W, F), _bracket(c, U, V, W, F)
    return lhs, [rh, -2.0 * c.grad_psi_sq * br], {"factor_one": (lhs, [rh, -c.grad_psi_sq * br])}


def _r03(c, v):
    U, V, W, X = v["U1"], v["V1"], v["W1"], v["X1"]
    return c.Rm(U, V, W, X), [c.ip(U, W) * c.H_psi(V, X), -c.ip(V, W) * c.H_psi(U, X)], {}


def _r05(c, v):
    U, X, Y, V = v["U1"], v["X1"], v["Y1"], v["V1"]
    return c.Rm(U, X, Y, V), [-c.ip(U, V) * c.H_psi(X, Y), -c.d_psi(X) * c.d_psi(Y) * c.ip(U, V),
                              c.ip(c.nabla_A(U, X, Y), V), c.gA(X, V, Y, U)], {}


def _r06(c, v):
    U, X, Y, V = v["U2"], v["X2"], v["Y2"], v["V2"]
    return c.Rm(U, X, Y, V), [c.ip(c.nabla_A(U, X, Y), V), c.gA(X, V, Y, U),
                              -c.grad_psi_sq * c.ip(X, Y) * c.ip(U, V)], {}


def _leaf(c, i, X, Y, Z, H, extra):
    lhs = c.Rm(X, Y, Z, H)
    rs = c.R_star(i, X, Y, Z, H)
    a1, a2, a3 = 2.0 * c.gA(Z, H, X, Y), c.gA(Y, H, X, Z), c.gA(X, H, Y, Z)
    return lhs, [rs, a1, a2, a3] + extra, {"skew_variant": (lhs, [rs, a1, a2, -a3] + extra)}


def _r07(c, v):
    return _leaf(c, 1, v["X1"], v["Y1"], v["Z1"], v["H1"], [])


def _r08(c, v):
    X, Y, Z, H = v["X2"], v["Y2"], v["Z2"], v["H2"]
    return _leaf(c, 2, X, Y, Z, H, [c.grad_psi_sq * (c.ip(X, Z) * c.ip(Y, H) - c.ip(Y, Z) * c.ip(X, H))])


def _r12(c, v):
    U1, U2, V2 = v["U1"], v["U2"], v["V2"]
    second = -c.ip(U2, V2) * c.H_f(U1, V2) / c.f
    return c.Rm(U1, U2, V2, V2), [], {"second_expression": (second, [])}


def _hf(sign, a, b, c2, d2):
    return lambda c, v: (None, [sign * c.H_f(v[a], v[b]) * c.ip(v[c2], v[d2]) / c.f], {})


def _make(ids_args, rhs=None):
    """Relation whose left side is ``R`` on the named vectors."""
    def ev(c, v):
        lhs = c.Rm(*(v[n] for n in ids_args))
        if rhs is None:
            return lhs, [], {}
        return lhs, rhs(c, v), {}
    return ev


CURV_RELATIONS = {
    "curv-phi-01": (("U1", "V1", "W1", "F1"), {"fiber1"}, False, _r01),
    "curv-phi-02": (("U2", "V2", "W2", "F2"), {"fiber2"}, False, _r02),
    "curv-phi-03": (("U1", "V1", "W1", "X1"), set(), False, _r03),
    "curv-phi-04": (("U2", "V2", "W2", "X2"), set(), True, _make(("U2", "V2", "W2", "X2"))),
    "curv-phi-05": (("U1", "X1", "Y1", "V1"), {"A"}, False, _r05),
    "curv-phi-06": (("U2", "X2", "Y2", "V2"), {"A"}, False, _r06),
    "curv-phi-07": (("X1", "Y1", "Z1", "H1"), {"A", "target1"}, False, _r07),
    "curv-phi-08": (("X2", "Y2", "Z2", "H2"), {"A", "target2"}, False, _r08),
    "curv-phi-09": (("U1", "U2", "V1", "V2"), set(), False,
                    _make(("U1", "U2", "V1", "V2"),
                          lambda c, v: [c.ip(v["U1"], v["V1"]) * c.ip(v["U2"], v["V2"]) * c.grad_psi_sq])),
    "curv-phi-10": (("X1", "X2", "Y1", "Y2"), set(), False,
                    _make(("X1", "X2", "Y1", "Y2"),
                          lambda c, v: [c.H_f(v["X1"], v["Y1"]) * c.ip(v["X2"], v["Y2"]) / c.f])),
    "curv-phi-11": (("U1", "U2", "V2", "X1"), set(), False,
                    _make(("U1", "U2", "V2", "X1"),
                          lambda c, v: [-c.H_f(v["U1"], v["X1"]) * c.ip(v["U2"], v["V2"]) / c.f])),
    "curv-phi-12": (("U1", "U2", "V2"), set(), True, _r12),
    "curv-phi-13": (("X1", "U2", "V2", "U1"), set(), False,
                    _make(("X1", "U2", "V2", "U1"),
                          lambda c, v: [-c.H_f(v["X1"], v["U1"]) * c.ip(v["U2"], v["V2"]) / c.f])),
    "curv-phi-14": (("X1", "U2", "V2", "Y1"), set(), False,
                    _make(("X1", "U2", "V2", "Y1"),
                          lambda c, v: [-c.H_f(v["X1"], v["Y1"]) * c.ip(v["U2"], v["V2"]) / c.f])),
    "curv-phi-15": (("U1", "X2", "Y2", "V1"), set(), False,
                    _make(("U1", "X2", "Y2", "V1"),
                          lambda c, v: [-c.ip(v["U1"], v["V1"]) * c.ip(v["X2"], v["Y2"]) * c.grad_psi_sq])),
    "curv-phi-16": (("U1", "X2", "Y2", "X1"), set(), False,
                    _make(("U1", "X2", "Y2", "X1"),
                          lambda c, v: [-c.H_f(v["U1"], v["X1"]) * c.ip(v["X2"], v["Y2"]) / c.f])),
    "curv-phi-17": (("X1", "X2", "Y2", "V1"), set(), False,
                    _make(("X1", "X2", "Y2", "V1"),
                          lambda c, v: [-c.H_f(v["X1"], v["V1"]) * c.ip(v["X2"], v["Y2"]) / c.f])),
    "curv-phi-18": (("X1", "X2", "Y2", "Y1"), set(), False,
                    _make(("X1", "X2", "Y2", "Y1"),
                          lambda c, v: [-c.H_f(v["X1"], v["Y1"]) * c.ip(v["X2"], v["Y2"]) / c.f])),
    "curv-phi-19": (("U1", "U2", "V1", "E1"), set(), True, _make(("U1", "U2", "V1", "E1"))),
    "curv-phi-20": (("U1", "U2", "V1", "X2"), set(), True, _make(("U1", "U2", "V1", "X2"))),
    "curv-phi-21": (("X1", "X2", "Y1", "E1"), set(), True, _make(("X1", "X2", "Y1", "E1"))),
    "curv-phi-22": (("X1", "X2", "Y1", "U2"), set(), True, _make(("X1", "X2", "Y1", "U2"))),
    "curv-phi-23": (("E2", "G2", "E1", "F"), set(), True, _make(("E2", "G2", "E1", "F"))),
    "curv-phi-24": (("U1", "U2", "V2", "X2"), set(), True, _make(("U1", "U2", "V2", "X2"))),
    "curv-phi-25": (("U1", "U2", "Y2", "V2"), set(), True, _make(("U1", "U2", "Y2", "V2"))),
    "curv-phi-26": (("U1", "U2", "Y2", "Y1"), set(), True, _make(("U1", "U2", "Y2", "Y1"))),
    "curv-phi-27": (("U1", "U2", "Y2", "Y2"), set(), True, _make(("U1", "U2", "Y2", "Y2"))),
    "curv-phi-28": (("X1", "U2", "V2", "E2"), set(), True, _make(("X1", "U2", "V2", "E2"))),
    "curv-phi-29": (("X1", "U2", "Y2", "E"), set(), True, _make(("X1", "U2", "Y2", "E"))),
}

SEC_IDS = [f"sec-phi-{k}" for k in range(1, 7)]
RIC_IDS = [f"ric-phi-{k}" for k in range(1, 5)]
REGISTRY = tuple(CURV_RELATIONS) + tuple(SEC_IDS) + tuple(RIC_IDS)
ZERO_RELATIONS = tuple(k for k, row in CURV_RELATIONS.items() if row[2])


def _empty_blocks(ws, names):
    m1, n1, m2, n2 = ws.dims
    size = {"V1": m1 - n1, "H1": n1, "V2": m2 - n2, "H2": n2, "M1": m1, "M2": m2, "M": m1 + m2}
    return sorted({BLOCK.get(n, n) for n in names if size[BLOCK.get(n, n)] == 0})


def _tier_for(ws, needs):
    tiers = [ws.source.combined.curvature_tier, ws.psi.tier, ws.source.f.tier]
    if needs & {"A", "fiber1", "fiber2"}:
        tiers.append(FD)
    if "target1" in needs:
        tiers.append(ws.target.m1.curvature_tier)
    if "target2" in needs:
        tiers.append(ws.target.m2.curvature_tier)
    return worse_tier(*tiers)


def _require_clairaut(ws, samples):
    reports = check_clairaut_conditions(ws, samples)
    if not clairaut_conditions_hold(reports):
        failed = ", ".join(r.relation_id for r in reports if not r.passed)
        raise HypothesisViolation(f"Clairaut conditions fail ({failed})")


def _fiber_missing(needs, fiber_charts):
    for i in (1, 2):
        if f"fiber{i}" in needs and i not in fiber_charts:
            return f"no fiber chart for phi{i}"
    return None


def _draw(rng, c, names):
    return {n: random_in_span(rng, c.g, c.blocks[BLOCK[n]]) for n in names}


def _score(lhs, terms, zero):
    if zero:
        return abs(lhs)
    return relative(lhs - sum(terms), lhs, *terms)


def verify_curv_relations(ws: WarpedSubmersion, samples, vectors_per_sample, rng,
                          fiber_charts=None, check_hypotheses=True, contexts=None):
    """All 29 curvature relations, in registry order.

    Parameters
    ----------
    ws : WarpedSubmersion
        Must satisfy the Clairaut conditions (else HypothesisViolation).
    samples : sequence of points
    vectors_per_sample : int
    rng : numpy Generator
    fiber_charts : dict, optional
        ``{1: FiberChart, 2: FiberChart}``; relations needing a missing chart SKIP.
    contexts : list of PointData, optional
        Precomputed point data for ``samples``.

    Returns
    -------
    list of RelationReport
    """
    fiber_charts = fiber_charts or {}
    if check_hypotheses:
        _require_clairaut(ws, samples)
    ctx = contexts or [PointData(ws, p, fiber_charts) for p in samples]
    out = []
    for rid, (names, needs, zero, ev) in CURV_RELATIONS.items():
        tier = _tier_for(ws, needs)
        empty = _empty_blocks(ws, names)
        reason = (f"vacuous: block {', '.join(empty)} has dimension 0" if empty
                  else _fiber_missing(needs, fiber_charts))
        if reason:
            out.append(skipped(rid, tier, reason))
            continue
        tr = MaxTracker()
        for c in ctx:
            for _ in range(vectors_per_sample):
                v = _draw(rng, c, names)
                lhs, terms, aux = ev(c, v)
                tr.update(_score(lhs, terms, zero), c.p)
                for key, (al, at) in aux.items():
                    tr.note(key, _score(al, at, not at))
        out.append(tr.report(rid, tier))
    return out


def _pair(rng, c, block):
    a = random_in_span(rng, c.g, c.blocks[block])
    b = random_in_span(rng, c.g, c.blocks[block])
    return a, b


def verify_sec_relations(ws: WarpedSubmersion, samples, vectors_per_sample, rng,
                         fiber_charts=None, check_hypotheses=True, contexts=None):
    """The six sectional-curvature identities (ids ``sec-phi-1`` .. ``sec-phi-6``)."""
    fiber_charts = fiber_charts or {}
    if check_hypotheses:
        _require_clairaut(ws, samples)
    ctx = contexts or [PointData(ws, p, fiber_charts) for p in samples]
    m1, n1, m2, n2 = ws.dims
    size = {"V1": m1 - n1, "H1": n1, "V2": m2 - n2, "H2": n2}
    w = ws.source

    def plane(block):
        return size[block] >= 2

    rows = {
        "sec-phi-1": (("V1", "V1"), {"fiber1"}),
        "sec-phi-2": (("V2", "V2"), {"fiber2"}),
        "sec-phi-3": (("H1", "H1"), {"A", "target1"}),
        "sec-phi-4": (("H2", "H2"), {"A", "target2"}),
        "sec-phi-5": (("V1", "H1"), {"A"}),
        "sec-phi-6": (("V2", "H2"), {"A"}),
    }
    out = []
    for rid, (blks, needs) in rows.items():
        tier = _tier_for(ws, needs)
        if blks[0] == blks[1] and not plane(blks[0]):
            out.append(skipped(rid, tier, f"no 2-plane: block {blks[0]} has dimension {size[blks[0]]}"))
            continue
        if blks[0] != blks[1] and min(size[blks[0]], size[blks[1]]) == 0:
            empty = [b for b in blks if size[b] == 0]
            out.append(skipped(rid, tier, f"vacuous: block {', '.join(empty)} has dimension 0"))
            continue
        missing = _fiber_missing(needs, fiber_charts)
        if missing:
            out.append(skipped(rid, tier, missing))
            continue
        tr = MaxTracker()
        for c in ctx:
            for _ in range(vectors_per_sample):
                if blks[0] == blks[1]:
                    a, b = _pair(rng, c, blks[0])
                else:
                    a = random_in_span(rng, c.g, c.blocks[blks[0]])
                    b = random_in_span(rng, c.g, c.blocks[blks[1]])
                lhs = sectional(w.combined, c.p, a, b, c.R)
                area = _wedge(c, a, b)
                if rid == "sec-phi-1":
                    terms = [c.R_hat(1, a, b, b, a) / area, -c.grad_psi_sq]
                    x1 = w.block1
                    mid = sectional(w.m1, c.x1, a[x1], b[x1])
                    tr.note("factor_sectional", relative(lhs - mid, lhs, mid))
                elif rid == "sec-phi-2":
                    terms = [c.R_hat(2, a, b, b, a) / area, -2.0 * c.grad_psi_sq]
                    x2 = w.block2
                    mid = sectional(w.m2, c.x2, a[x2], b[x2]) - c.grad_psi_sq
                    tr.note("factor_sectional", relative(lhs - mid, lhs, mid))
                elif rid in ("sec-phi-3", "sec-phi-4"):
                    i = 1 if rid == "sec-phi-3" else 2
                    Aab = c.A(a, b)
                    terms = [c.R_star(i, a, b, b, a) / area, -3.0 * c.ip(Aab, Aab) / area]
                    if i == 2:
                        terms.append(-c.grad_psi_sq)
                elif rid == "sec-phi-5":
                    U, X = a, b
                    AXU = c.A(X, U)
                    uu, xx = c.ip(U, U), c.ip(X, X)
                    terms = [-uu * (c.H_psi(X, X) + c.d_psi(X) ** 2) / (uu * xx),
                             c.ip(AXU, AXU) / (uu * xx)]
                else:
                    U, X = a, b
                    AXU = c.A(X, U)
                    terms = [c.ip(AXU, AXU) / (c.ip(U, U) * c.ip(X, X)), -c.grad_psi_sq]
                tr.update(relative(lhs - sum(terms), lhs, *terms), c.p)
        out.append(tr.report(rid, tier))
    return out


def verify_ric_relations(ws: WarpedSubmersion, samples, vectors_per_sample, rng,
                         fiber_charts=None, check_hypotheses=True, contexts=None):
    """The four Ricci identities (ids ``ric-phi-1`` .. ``ric-phi-4``).

    ``ric-phi-1`` also records, under ``detail['opposite_sign']``, the residual
    of the same identity with the sign of the bracket
    ``(m1 - n1 + m2)|grad psi|^2 + Delta^{H1} psi`` reversed.
    """
    fiber_charts = fiber_charts or {}
    if check_hypotheses:
        _require_clairaut(ws, samples)
    ctx = contexts or [PointData(ws, p, fiber_charts) for p in samples]
    m1, n1, m2, n2 = ws.dims
    size = {"V1": m1 - n1, "H1": n1, "V2": m2 - n2, "H2": n2}
    w = ws.source
    rows = {
        "ric-phi-1": ("V1", {"fiber1", "A"}),
        "ric-phi-2": ("V2", {"fiber2", "A"}),
        "ric-phi-3": ("H1", {"A", "target1"}),
        "ric-phi-4": ("H2", {"A", "target2"}),
    }
    out = []
    for rid, (blk, needs) in rows.items():
        tier = _tier_for(ws, needs)
        if size[blk] == 0:
            out.append(skipped(rid, tier, f"vacuous: block {blk} has dimension 0"))
            continue
        missing = _fiber_missing(needs, fiber_charts)
        if missing:
            out.append(skipped(rid, tier, missing))
            continue
        tr = MaxTracker()
        for c in ctx:
            ric = ricci(w.combined, c.p, c.R)
            for _ in range(vectors_per_sample):
                a, b = _pair(rng, c, blk)
                lhs = float(a @ ric @ b)
                gab = c.ip(a, b)

                def trace_A(frame_block, swap):
                    rows_ = c.blocks[frame_block]
                    if swap:
                        return sum(c.gA(E, a, E, b) for E in rows_)
                    return sum(c.gA(a, E, b, E) for E in rows_)

                if rid == "ric-phi-1":
                    grad1 = w.lift1(c.grad_psi[w.block1])
                    g1sq = c.ip(grad1, grad1)
                    tr.note("restricted_gradient_norm", abs(g1sq - c.grad_psi_sq))
                    bracket = (m1 - n1 + m2) * g1sq + c.lap_h1
                    base = [c.Ric_hat(1, a, b), trace_A("H1", True)]
                    terms = base + [-bracket * gab]
                    alt = base + [bracket * gab]
                    tr.note("opposite_sign", relative(lhs - sum(alt), lhs, *alt))
                elif rid == "ric-phi-2":
                    terms = [c.Ric_hat(2, a, b), trace_A("H2", True),
                             -(c.lap_h1 + (m1 - n1 + 2 * m2 - n2 - 1) * c.grad_psi_sq) * gab]
                elif rid == "ric-phi-3":
                    terms = [c.Ric_H(1, a, b),
                             -(m2 + m1 - n1) * (c.H_psi(a, b) + c.d_psi(a) * c.d_psi(b)),
                             c.div_A("V1", a, b) if size["V1"] else 0.0,
                             -3.0 * trace_A("H1", False), trace_A("V1", False)]
                else:
                    terms = [c.Ric_H(2, a, b),
                             -((m1 - n1 + m2) * c.grad_psi_sq + c.lap_h1) * gab,
                             c.div_A("V2", a, b) if size["V2"] else 0.0,
                             -3.0 * trace_A("H2", False), trace_A("V2", False)]
                tr.update(relative(lhs - sum(terms), lhs, *terms), c.p)
        out.append(tr.report(rid, tier))
    return out


# ---------------------------------------------------------------------------
# global checks


@dataclass(frozen=True)
class EinsteinResult:
    lam: float
    residual: float
    scal_spread: float
    tier: str


def einstein_residual(m: MetricField, samples) -> EinsteinResult:
    """Best Einstein constant and the largest ``|Ric - lam g|`` relative to ``max(1, |lam|)``."""
    data = []
    for p in samples:
        p = m.point(p)
        R = riemann(m, p)
        ric = ricci(m, p, R)
        data.append((p, ric, scalar_curv(m, p, R)))
    scals = np.array([d[2] for d in data])
    lam = float(np.mean(scals) / m.dim)
    res = 0.0
    for p, ric, _ in data:
        res = max(res, tensor_norm(m, p, ric - lam * m.metric(p)))
    return EinsteinResult(lam, res / max(1.0, abs(lam)), float(np.ptp(scals)), m.curvature_tier)


def _orthonormal(rng, g, k):
    from .submersion import gram_schmidt

    while True:
        E = gram_schmidt(rng.standard_normal((k, g.shape[0])), g)
        if E.shape[0] == k:
            return E


def kulkarni_flatness(m: MetricField, samples, quads_per_sample, rng):
    """Largest ``|sec12 + sec34 - sec14 - sec23|`` over random orthonormal quadruples."""
    if m.dim < 4:
        raise DimensionError("the four-vector criterion needs dimension >= 4")
    worst = 0.0
    for p in samples:
        p = m.point(p)
        R = riemann(m, p)
        g = m.metric(p)
        for _ in range(quads_per_sample):
            e = _orthonormal(rng, g, 4)

            def s(i, j):
                return sectional(m, p, e[i], e[j], R)

            worst = max(worst, abs(s(0, 1) + s(2, 3) - s(0, 3) - s(1, 2)))
    return worst


def weyl_flatness(m: MetricField, samples):
    """Largest metric norm of the Weyl tensor over samples."""
    if m.dim < 4:
        raise DimensionError("Weyl flatness is only meaningful in dimension >= 4")
    return max(tensor_norm(m, p, weyl(m, p).tensor) for p in samples)


def subharmonicity_indicator(ws: WarpedSubmersion, samples):
    """``Delta psi + |grad psi|^2`` at every sample and a sign summary."""
    m = ws.source.combined
    vals = []
    for p in samples:
        p = m.point(p)
        d = ws.psi.partials(p)
        vals.append(laplacian(m, ws.psi, p) + float(d @ inverse_metric(m.metric(p)) @ d))
    vals = np.array(vals)
    if np.all(vals >= 0):
        sign = "nonnegative"
    elif np.all(vals <= 0):
        sign = "nonpositive"
    else:
        sign = "mixed"
    return vals, sign


def weighted_laplacian_oracle(ws: WarpedSubmersion, p):
    """``exp(-psi) Delta exp(psi)``, from values of ``psi`` only."""
    m = ws.source.combined
    e = ScalarField(lambda x: float(np.exp(ws.psi.value(x))))
    return laplacian(m, e, p) / np.exp(ws.psi.value(p))


def divergence_identity(ws: WarpedSubmersion, samples, directions, rng, einstein_tolerance=None):
    """Residual of ``X(Delta^{H1} psi) + 2 Hess psi(X, grad psi) = div^{H1}(Hess psi + dpsi dpsi)(X)``.

    ``X`` ranges over random unit vectors of ``H1``.  Returns a SKIP report if
    the source metric is not Einstein.
    """
    m = ws.source.combined
    e = einstein_residual(m, samples)
    tol = einstein_tolerance if einstein_tolerance is not None else (1e-8 if e.tier == ANALYTIC else 1e-4)
    if e.residual > tol:
        return skipped("divergence-identity", FD,
                       f"source metric is not Einstein (residual {e.residual:.3g})")
    if ws.dims[1] == 0:
        return skipped("divergence-identity", FD, "vacuous: block H1 has dimension 0")

    def lap_h1(x):
        return horizontal_laplacian_psi(ws, x)[1]

    def B(x):
        d = ws.psi.partials(x)
        return hessian(m, ws.psi, x) + np.outer(d, d)

    tr = MaxTracker()
    for p in samples:
        p = m.point(p)
        G = christoffel(m, p)
        dB = fd.partials(B, p, fd.H3)  # [k, i, j]
        B0 = B(p)
        nabla_B = dB - np.einsum("lki,lj->kij", G, B0) - np.einsum("lkj,il->kij", G, B0)
        H1 = ws.block_frame(p).blocks["H1"]
        g = m.metric(p)
        gpsi = grad(m, ws.psi, p)
        hpsi = hessian(m, ws.psi, p)
        for _ in range(directions):
            X = random_in_span(rng, g, H1)
            lhs = float(fd.directional(lap_h1, p, X, fd.H3)) + 2.0 * float(X @ hpsi @ gpsi)
            rhs = float(sum(np.einsum("kij,k,i,j->", nabla_B, E, E, X) for E in H1))
            tr.update(relative(lhs - rhs, lhs, rhs), p)
    return tr.report("divergence-identity", FD, DIVERGENCE_TOLERANCE)
