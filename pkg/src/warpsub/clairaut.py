"""Warped-product submersions, geodesics and the Clairaut law.

A warped-product submersion is a pair ``phi1: M1 -> N1``, ``phi2: M2 -> N2``
acting on ``M1 x_f M2 -> N1 x_rho N2`` with ``f = rho o phi1``.  It is
Clairaut with girth ``psi`` when ``exp(psi(c)) * sin(omega)`` is constant
along every geodesic ``c``, ``omega`` being the angle between the velocity and
its horizontal part.
"""
from __future__ import annotations

import csv
import dataclasses
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import fd
from .errors import ChartBoundaryError, GeometryError
from .geometry import (FD, TOLERANCE, MetricField, ScalarField, christoffel, grad,
                       hessian, inner, inverse_metric, laplacian, norm)
from .results import MaxTracker, RelationReport
from .submersion import (SmoothMap, SubmersionFrame, _projectors, oneill_tensors,
                         split_frame)
from .warped import WarpedProductSpace

GEODESIC_TOLERANCE = 1e-3
DRIFT_TOLERANCE = 1e-4
ENERGY_TOLERANCE = 1e-6


@dataclass(frozen=True)
class WarpedSubmersion:
    """``phi = (phi1, phi2)`` between warped products, with girth ``psi``.

    ``psi`` is a scalar field on the combined source chart.
    """

    source: WarpedProductSpace
    target: WarpedProductSpace
    phi1: SmoothMap
    phi2: SmoothMap
    psi: ScalarField
    name: str = ""

    @property
    def dims(self):
        """``(m1, n1, m2, n2)``."""
        return self.source.dim1, self.target.dim1, self.source.dim2, self.target.dim2

    def value(self, p):
        x1, x2 = self.source.split(p)
        return np.concatenate([self.phi1.value(x1), self.phi2.value(x2)])

    def jacobian(self, p):
        x1, x2 = self.source.split(p)
        n1, m1 = self.target.dim1, self.source.dim1
        J = np.zeros((self.target.dim, self.source.dim))
        J[:n1, :m1] = self.phi1.jacobian(x1)
        J[n1:, m1:] = self.phi2.jacobian(x2)
        return J

    @cached_property
    def joint(self) -> SmoothMap:
        return SmoothMap(self.source.combined, self.target.combined, self.value, self.jacobian,
                         self.name or "joint")

    def vertical_projector(self, p):
        """Block-diagonal projector ``ker phi1_* (+) ker phi2_*`` on the combined chart."""
        x1, x2 = self.source.split(p)
        P = np.zeros((self.source.dim, self.source.dim))
        P[self.source.block1, self.source.block1] = _projectors(self.phi1, x1)[0]
        P[self.source.block2, self.source.block2] = _projectors(self.phi2, x2)[0]
        return P

    def block_frame(self, p) -> SubmersionFrame:
        """Orthonormal frame split into the blocks ``V1, H1, V2, H2``."""
        p = self.source.combined.point(p)
        x1, x2 = self.source.split(p)
        f1 = split_frame(self.phi1, x1)
        f2 = split_frame(self.phi2, x2)
        fv = self.source.f.value(x1)
        n = self.source.dim

        def up1(rows):
            return np.array([self.source.lift1(r) for r in rows]).reshape(len(rows), n)

        def up2(rows):
            return np.array([self.source.lift2(r / fv) for r in rows]).reshape(len(rows), n)

        blocks = {"V1": up1(f1.vertical), "H1": up1(f1.horizontal),
                  "V2": up2(f2.vertical), "H2": up2(f2.horizontal)}
        return SubmersionFrame(p, np.vstack([blocks["V1"], blocks["V2"]]),
                               np.vstack([blocks["H1"], blocks["H2"]]), blocks)

    def compatibility_residual(self, samples):
        """Largest ``|f - rho o phi1|`` over samples."""
        worst = 0.0
        for p in samples:
            x1, _ = self.source.split(p)
            worst = max(worst, abs(self.source.f.value(x1) - self.target.f.value(self.phi1.value(x1))))
        return worst


# geodesics

@dataclass(frozen=True)
class GeodesicTrace:
    """Sampled geodesic with per-step energy ``g(c', c')`` and Clairaut value."""

    times: np.ndarray
    points: np.ndarray
    velocities: np.ndarray
    energy: np.ndarray
    clairaut_values: np.ndarray
    boundary_hit: bool = False
    warnings: tuple = ()

    @property
    def dt(self):
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    @property
    def energy_drift(self):
        e0 = self.energy[0]
        return float(np.max(np.abs(self.energy - e0)) / e0)

    def to_csv(self, path):
        """Write the trace; ``path`` is a file name or an open text stream."""
        if hasattr(path, "write"):
            self._write_rows(path)
            return
        with open(path, "w", newline="") as fh:
            self._write_rows(fh)

    def _write_rows(self, fh):
        m = self.points.shape[1]
        header = (["t"] + [f"x{i + 1}" for i in range(m)] + [f"v{i + 1}" for i in range(m)]
                  + ["energy", "clairaut_value"])
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for k in range(len(self.times)):
            row = np.concatenate([[self.times[k]], self.points[k], self.velocities[k],
                                  [self.energy[k], self.clairaut_values[k]]])
            w.writerow([f"{v:.16e}" for v in row])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], np.array([[float(v) for v in r] for r in rows[1:]])
        m = sum(1 for h in header if h.startswith("x"))
        return cls(body[:, 0], body[:, 1:1 + m], body[:, 1 + m:1 + 2 * m], body[:, -2], body[:, -1])


def integrate_geodesic(space: MetricField, p0, v0, t_end, dt) -> GeodesicTrace:
    """Fixed-step fourth-order Runge-Kutta for ``x'' = -Gamma(x', x')``.

    The trace stops early, with ``boundary_hit`` set, if a stage leaves the
    chart.  A relative energy drift above 1e-3 adds a warning.
    """
    x = space.point(p0)
    v = np.array(v0, dtype=float)
    g0 = space.metric(x)
    if not norm(g0, v) > 0.0:
        raise ValueError("initial velocity must be nonzero")
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    nsteps = int(round(t_end / dt))

    def acc(xx, vv):
        return -np.einsum("kij,i,j->k", christoffel(space, xx), vv, vv)

    xs, vs = [x.copy()], [v.copy()]
    boundary = False
    for _ in range(nsteps):
        try:
            k1x, k1v = v, acc(x, v)
            k2x, k2v = v + 0.5 * dt * k1v, acc(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v)
            k3x, k3v = v + 0.5 * dt * k2v, acc(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v)
            k4x, k4v = v + dt * k3v, acc(x + dt * k3x, v + dt * k3v)
            xn = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            vn = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            if not space.contains(xn):
                raise ChartBoundaryError("geodesic left the chart")
        except GeometryError:
            boundary = True
            break
        x, v = xn, vn
        xs.append(x.copy())
        vs.append(v.copy())
    points = np.array(xs)
    vels = np.array(vs)
    energy = np.array([inner(space.metric(q), w, w) for q, w in zip(points, vels)])
    times = dt * np.arange(len(points))
    notes = []
    if boundary:
        notes.append(f"trace truncated at t={times[-1]:.6g}: chart boundary")
    drift = float(np.max(np.abs(energy - energy[0])) / energy[0])
    if drift > 1e-3:
        notes.append(f"energy drift {drift:.3g} exceeds 1e-3")
        warnings.warn(notes[-1], RuntimeWarning, stacklevel=2)
    return GeodesicTrace(times, points, vels, energy, np.full(len(points), np.nan), boundary,
                         tuple(notes))


@dataclass(frozen=True)
class ClairautStats:
    values: np.ndarray
    drift: float
    invalid_steps: int

    @property
    def passed(self):
        return self.drift < DRIFT_TOLERANCE


def clairaut_value(ws: WarpedSubmersion, x, v):
    """``exp(psi(x)) * sin(omega)`` with ``sin(omega) = |V v| / |v|``; NaN for a null velocity."""
    g = ws.source.combined.metric(x)
    speed = norm(g, v)
    if speed < 1e-12:
        return float("nan")
    return float(np.exp(ws.psi.value(x)) * norm(g, ws.vertical_projector(x) @ v) / speed)


def clairaut_trace(ws: WarpedSubmersion, trace: GeodesicTrace) -> ClairautStats:
    """Clairaut values along a trace and their drift from the initial value.

    The drift is relative when the initial value exceeds 1e-12, else absolute.
    """
    values = np.array([clairaut_value(ws, x, v) for x, v in zip(trace.points, trace.velocities)])
    valid = np.isfinite(values)
    c0 = values[0]
    if not valid.any() or not np.isfinite(c0):
        return ClairautStats(values, float("nan"), int((~valid).sum()))
    dev = np.max(np.abs(values[valid] - c0))
    drift = dev / c0 if c0 > 1e-12 else dev
    return ClairautStats(values, float(drift), int((~valid).sum()))


def with_clairaut(trace: GeodesicTrace, stats: ClairautStats) -> GeodesicTrace:
    return dataclasses.replace(trace, clairaut_values=stats.values)


# the three Clairaut conditions

def check_clairaut_conditions(ws: WarpedSubmersion, samples):
    """Residuals of the three conditions characterizing Clairaut submersions.

    (i) the vertical part of ``grad psi``; (ii) the umbilicity defect of the
    ``phi1`` fibers with mean curvature ``-grad psi`` restricted to ``M1``,
    plus the mismatch between that restriction and ``grad ln f``; (iii) the
    second fundamental form of the ``phi2`` fibers.

    Returns
    -------
    list of RelationReport
        Ids ``clairaut-i``, ``clairaut-ii``, ``clairaut-iii``.
    """
    w = ws.source
    tr = {k: MaxTracker() for k in ("clairaut-i", "clairaut-ii", "clairaut-iii")}
    for p in samples:
        p = w.combined.point(p)
        x1, x2 = w.split(p)
        g = w.combined.metric(p)
        gpsi = grad(w.combined, ws.psi, p)
        tr["clairaut-i"].update(norm(g, ws.vertical_projector(p) @ gpsi), p)

        g1 = w.m1.metric(x1)
        gpsi1 = gpsi[w.block1]
        grad_ln_f = inverse_metric(g1) @ w.f.partials(x1) / w.f.value(x1)
        r2 = norm(g1, gpsi1 - grad_ln_f)
        U = split_frame(ws.phi1, x1).vertical
        if len(U):
            t1 = oneill_tensors(ws.phi1, x1)
            for a in U:
                for b in U:
                    r2 = max(r2, norm(g1, t1.T(a, b) - inner(g1, a, b) * (-gpsi1)) + norm(g1, gpsi1 - grad_ln_f))
        tr["clairaut-ii"].update(r2, p)

        g2 = w.m2.metric(x2)
        U2 = split_frame(ws.phi2, x2).vertical
        r3 = 0.0
        if len(U2):
            t2 = oneill_tensors(ws.phi2, x2)
            r3 = max(norm(g2, t2.T(a, b)) for a in U2 for b in U2)
        tr["clairaut-iii"].update(r3, p)
    return [t.report(k, FD) for k, t in tr.items()]


def clairaut_conditions_hold(reports):
    return all(r.passed for r in reports)


# geodesic condition along a trace

def check_geodesic_condition(ws: WarpedSubmersion, trace: GeodesicTrace):
    """Horizontal and vertical parts of the block-decomposed geodesic equation.

    Along the curve ``c = (alpha, beta)`` with ``alpha' = X1 + U1`` and
    ``beta' = X2 + U2``, the horizontal part is

        H1 nabla1_{alpha'} X1 + A1(X1, U1) + T1(U1, U1)
        + H2 nabla2_{beta'} X2 + A2(X2, U2) + T2(U2, U2)
        + 2 (alpha' f / f) X2 - (|U2|^2 + |X2|^2) grad ln f

    and the vertical part is

        V1 nabla1_{alpha'} U1 + T1(U1, X1) + V2 nabla2_{beta'} U2 + T2(U2, X2)
        + 2 (alpha' f / f) U2.

    Time derivatives come from central differences of the sampled velocity;
    the remaining terms use only factor data.

    Returns
    -------
    list of RelationReport
        Ids ``geodesic-condition-h`` and ``geodesic-condition-v``.
    """
    w = ws.source
    dt = trace.dt
    P1 = [_projectors(ws.phi1, q[w.block1])[0] for q in trace.points]
    P2 = [_projectors(ws.phi2, q[w.block2])[0] for q in trace.points]
    vel1 = trace.velocities[:, w.block1]
    vel2 = trace.velocities[:, w.block2]
    U1 = np.array([P @ v for P, v in zip(P1, vel1)])
    U2 = np.array([P @ v for P, v in zip(P2, vel2)])
    X1, X2 = vel1 - U1, vel2 - U2
    th = MaxTracker()
    tv = MaxTracker()
    for k in range(1, len(trace.times) - 1):
        p = trace.points[k]
        x1, x2 = w.split(p)
        G1, G2 = christoffel(w.m1, x1), christoffel(w.m2, x2)
        o1, o2 = oneill_tensors(ws.phi1, x1), oneill_tensors(ws.phi2, x2)
        a, b = vel1[k], vel2[k]

        def along(series, G, vel):
            return (series[k + 1] - series[k - 1]) / (2.0 * dt) + np.einsum("kij,i,j->k", G, vel, series[k])

        Q1, Q2 = np.eye(w.dim1) - P1[k], np.eye(w.dim2) - P2[k]
        fv = w.f.value(x1)
        rate = w.f.partials(x1) @ a / fv
        grad_ln_f = inverse_metric(w.m1.metric(x1)) @ w.f.partials(x1) / fv
        g = w.combined.metric(p)
        sq2 = inner(g[w.block2, w.block2], b, b)

        h1 = Q1 @ along(X1, G1, a) + o1.A(X1[k], U1[k]) + o1.T(U1[k], U1[k]) - sq2 * (Q1 @ grad_ln_f)
        h2 = Q2 @ along(X2, G2, b) + o2.A(X2[k], U2[k]) + o2.T(U2[k], U2[k]) + 2.0 * rate * X2[k]
        v1 = P1[k] @ along(U1, G1, a) + o1.T(U1[k], X1[k])
        v2 = P2[k] @ along(U2, G2, b) + o2.T(U2[k], X2[k]) + 2.0 * rate * U2[k]
        th.update(norm(g, w.join(h1, h2)), p)
        tv.update(norm(g, w.join(v1, v2)), p)
    return [th.report("geodesic-condition-h", FD, GEODESIC_TOLERANCE),
            tv.report("geodesic-condition-v", FD, GEODESIC_TOLERANCE)]


# harmonicity

def tension_field(ws: WarpedSubmersion, p):
    """Tension field of the joint map in target-chart components.

    ``tau^c = g^{ij} (d_i d_j phi^c - Gamma^k_ij d_k phi^c
    + Gamma'^c_ab d_i phi^a d_j phi^b)``, second partials of the map by
    central differences of its Jacobian.
    """
    m = ws.source.combined
    p = m.point(p)
    gi = inverse_metric(m.metric(p))
    J = ws.jacobian(p)
    ddphi = fd.partials(ws.jacobian, p, fd.H1)  # [i, c, j]
    Gs = christoffel(m, p)
    Gt = christoffel(ws.target.combined, ws.value(p))
    second = (np.einsum("ij,icj->c", gi, ddphi) - np.einsum("ij,kij,ck->c", gi, Gs, J)
              + np.einsum("ij,cab,ai,bj->c", gi, Gt, J, J))
    return second


def codimension_sum(ws: WarpedSubmersion):
    m1, n1, m2, n2 = ws.dims
    return (m1 - n1) + (m2 - n2)


def pushed_girth_gradient(ws: WarpedSubmersion, p):
    """``phi_*(grad psi)`` in target components."""
    return ws.jacobian(p) @ grad(ws.source.combined, ws.psi, p)


def horizontal_laplacian_psi(ws: WarpedSubmersion, p):
    """``(Delta psi, trace of Hess psi over the H1 block)``."""
    m = ws.source.combined
    p = m.point(p)
    H = hessian(m, ws.psi, p)
    rows = ws.block_frame(p).blocks["H1"]
    return laplacian(m, ws.psi, p), float(sum(x @ H @ x for x in rows))


# block decomposition of the O'Neill tensors

WPSUB_IDS = tuple(f"wpsub-{k}" for k in ("i", "ii", "iii", "iv", "v", "vi", "vii", "viii",
                                          "ix", "x", "xi"))


def check_wpsub_tensors(ws: WarpedSubmersion, samples, rng, vectors=4):
    """Residuals of the block formulas for ``T``, ``A`` and horizontal/vertical derivatives.

    Left sides use the O'Neill tensors of the joint map on the combined
    metric; right sides use the factor tensors, ``f`` and the factor
    connections.  Vector fields needed by derivative clauses are extended as
    projections of constant-component fields.  In clause (vii) the second
    equality is read as ``T2(V2, X2) = V2(nabla2_{V2} X2)``.

    Returns
    -------
    list of RelationReport
        Ids ``wpsub-i`` .. ``wpsub-xi``.
    """
    from .geometry import cov_deriv_field
    from .results import random_in_span, relative_vec

    w = ws.source
    m, b1, b2 = w.combined, w.block1, w.block2
    tr = {k: MaxTracker() for k in WPSUB_IDS}
    zero = np.zeros(w.dim)

    def P_of(x):
        return ws.vertical_projector(x)

    def ext(v, vertical):
        return lambda x: (P_of(x) if vertical else np.eye(w.dim) - P_of(x)) @ v

    def ext_f(phi, v, vertical):
        def field(x):
            P = _projectors(phi, x)[0]
            return (P if vertical else np.eye(P.shape[0]) - P) @ v
        return field

    for p in samples:
        p = m.point(p)
        x1, x2 = w.split(p)
        g = m.metric(p)
        P = P_of(p)
        Q = np.eye(w.dim) - P
        o = oneill_tensors(ws.joint, p)
        o1, o2 = oneill_tensors(ws.phi1, x1), oneill_tensors(ws.phi2, x2)
        Q1 = np.eye(w.dim1) - _projectors(ws.phi1, x1)[0]
        Q2 = np.eye(w.dim2) - _projectors(ws.phi2, x2)[0]
        P2 = np.eye(w.dim2) - Q2
        fv = w.f.value(x1)
        df = w.f.partials(x1)
        gl = w.lift1(inverse_metric(w.m1.metric(x1)) @ df / fv)
        bl = ws.block_frame(p).blocks

        def nab(direction, field):
            return cov_deriv_field(m, p, direction, field, fd.H2)

        def res(key, *pairs):
            tr[key].update(max(relative_vec(g, a, c) for a, c in pairs), p)

        for _ in range(vectors):
            U1, V1 = (random_in_span(rng, g, bl["V1"]) for _ in range(2))
            U2, V2 = (random_in_span(rng, g, bl["V2"]) for _ in range(2))
            X1, Y1 = (random_in_span(rng, g, bl["H1"]) for _ in range(2))
            X2, Y2 = (random_in_span(rng, g, bl["H2"]) for _ in range(2))
            L1, L2 = w.lift1, w.lift2

            res("wpsub-i", (o.T(U1, V1), L1(o1.T(U1[b1], V1[b1]))))
            res("wpsub-ii", (o.T(U1, U2), zero))
            res("wpsub-iii", (o.T(U2, V2), L2(o2.T(U2[b2], V2[b2])) - inner(g, U2, V2) * (Q @ gl)))
            n1 = cov_deriv_field(w.m1, x1, V1[b1], ext_f(ws.phi1, X1[b1], False), fd.H2)
            res("wpsub-iv", (o.T(V1, X1), L1(o1.T(V1[b1], X1[b1]))),
                (Q @ nab(V1, ext(X1, False)), L1(Q1 @ n1)))
            rate_v1 = df @ V1[b1] / fv
            res("wpsub-v", (o.T(V1, X2), zero), (P @ nab(X2, ext(V1, True)), zero),
                (o.A(X2, V1), rate_v1 * X2), (Q @ nab(V1, ext(X2, False)), rate_v1 * X2))
            rate_x1 = df @ X1[b1] / fv
            res("wpsub-vi", (o.T(V2, X1), rate_x1 * V2), (P @ nab(X1, ext(V2, True)), rate_x1 * V2),
                (o.A(X1, V2), zero), (Q @ nab(V2, ext(X1, False)), zero))
            n2 = cov_deriv_field(w.m2, x2, V2[b2], ext_f(ws.phi2, X2[b2], False), fd.H2)
            t2 = L2(o2.T(V2[b2], X2[b2]))
            res("wpsub-vii", (o.T(V2, X2), t2), (t2, L2(P2 @ n2)))
            n1 = cov_deriv_field(w.m1, x1, X1[b1], ext_f(ws.phi1, Y1[b1], False), fd.H2)
            res("wpsub-viii", (o.A(X1, Y1), L1(o1.A(X1[b1], Y1[b1]))),
                (Q @ nab(X1, ext(Y1, False)), L1(Q1 @ n1)))
            res("wpsub-ix", (Q @ nab(X1, ext(X2, False)), rate_x1 * X2),
                (Q @ nab(X2, ext(X1, False)), rate_x1 * X2),
                (o.A(X1, X2), zero), (o.A(X2, X1), zero))
            res("wpsub-x", (o.A(X2, Y2), L2(o2.A(X2[b2], Y2[b2]))), (P @ gl, zero))
            n2 = cov_deriv_field(w.m2, x2, X2[b2], ext_f(ws.phi2, Y2[b2], False), fd.H2)
            res("wpsub-xi", (Q @ nab(X2, ext(Y2, False)), L2(Q2 @ n2) - inner(g, X2, Y2) * (Q @ gl)))
    return [tr[k].report(k, FD) for k in WPSUB_IDS]
