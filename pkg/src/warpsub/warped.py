"""Warped products ``M1 x_f M2`` with metric ``g1 + f^2 g2``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidWarpingError
from .geometry import (MetricField, ScalarField, christoffel, hessian, inner,
                       inverse_metric, riemann, worse_tier)
from .results import MaxTracker, random_in_span, relative_vec


@dataclass(frozen=True)
class WarpedProductSpace:
    """Two factor charts, a positive warping function and the combined chart.

    Points of ``combined`` are concatenations ``x1 || x2``.
    """

    m1: MetricField
    m2: MetricField
    f: ScalarField
    combined: MetricField
    name: str = ""

    @property
    def dim1(self):
        return self.m1.dim

    @property
    def dim2(self):
        return self.m2.dim

    @property
    def dim(self):
        return self.m1.dim + self.m2.dim

    @property
    def block1(self):
        return slice(0, self.m1.dim)

    @property
    def block2(self):
        return slice(self.m1.dim, self.dim)

    def split(self, p):
        p = np.asarray(p, dtype=float)
        return p[self.block1], p[self.block2]

    def join(self, x1, x2):
        return np.concatenate([np.asarray(x1, dtype=float), np.asarray(x2, dtype=float)])

    def lift1(self, v1):
        return self.join(v1, np.zeros(self.dim2))

    def lift2(self, v2):
        return self.join(np.zeros(self.dim1), v2)

    def lift1_matrix(self, a):
        out = np.zeros((self.dim, self.dim))
        out[self.block1, self.block1] = a
        return out


def build_warped(m1: MetricField, m2: MetricField, f: ScalarField, name="", probe=()):
    """Assemble ``M1 x_f M2``.

    Analytic derivative evaluators are composed blockwise when both factors
    provide them and ``f`` has analytic partials.  ``probe`` is an optional
    list of first-factor points at which positivity of ``f`` is checked.
    """
    a, b = m1.dim, m2.dim
    n = a + b
    s1, s2 = slice(0, a), slice(a, n)
    for x1 in probe:
        if not f.value(x1) > 0.0:
            raise InvalidWarpingError(f"warping function is {f.value(x1)} at {list(x1)}")

    def warp(x1):
        fv = f.value(x1)
        if not fv > 0.0:
            raise InvalidWarpingError(f"warping function is {fv} at {x1.tolist()}")
        return fv

    def metric(p):
        x1, x2 = p[s1], p[s2]
        g = np.zeros((n, n))
        g[s1, s1] = m1.metric(x1)
        g[s2, s2] = warp(x1) ** 2 * m2.metric(x2)
        return g

    d_metric = dd_metric = None
    if m1.d_metric_at is not None and m2.d_metric_at is not None and f.grad_at is not None:
        def d_metric(p):
            x1, x2 = p[s1], p[s2]
            fv, df = warp(x1), f.partials(x1)
            d = np.zeros((n, n, n))
            d[s1, s1, s1] = m1.d_metric(x1)
            d[s1, s2, s2] = np.einsum("k,ij->kij", 2.0 * fv * df, m2.metric(x2))
            d[s2, s2, s2] = fv ** 2 * m2.d_metric(x2)
            return d

    if d_metric is not None and m1.dd_metric_at is not None and m2.dd_metric_at is not None \
            and f.hess_at is not None:
        def dd_metric(p):
            x1, x2 = p[s1], p[s2]
            fv, df, hf = warp(x1), f.partials(x1), f.second_partials(x1)
            g2, dg2 = m2.metric(x2), m2.d_metric(x2)
            d = np.zeros((n, n, n, n))
            d[s1, s1, s1, s1] = m1.dd_metric_at(x1)
            d[s1, s1, s2, s2] = np.einsum("lk,ij->lkij", 2.0 * (np.outer(df, df) + fv * hf), g2)
            d[s1, s2, s2, s2] = np.einsum("l,kij->lkij", 2.0 * fv * df, dg2)
            d[s2, s1, s2, s2] = np.einsum("k,lij->lkij", 2.0 * fv * df, dg2)
            d[s2, s2, s2, s2] = fv ** 2 * m2.dd_metric_at(x2)
            return d

    def guard(p):
        return m1.contains(p[s1]) and m2.contains(p[s2])

    label = name or f"{m1.name} x_f {m2.name}"
    combined = MetricField(n, metric, d_metric, dd_metric, guard, label)
    return WarpedProductSpace(m1, m2, f, combined, label)


def _factor_data(w, p):
    x1, x2 = w.split(p)
    fv = w.f.value(x1)
    df = w.f.partials(x1)
    grad_ln_f = w.lift1(inverse_metric(w.m1.metric(x1)) @ df / fv)
    return x1, x2, fv, df, grad_ln_f


def check_wp_connection(w: WarpedProductSpace, samples, rng, vectors=8):
    """Residuals of the four connection identities of a warped product.

    Returns
    -------
    list of RelationReport
        Ids ``wp-conn-i`` .. ``wp-conn-iv``.
    """
    names = ["wp-conn-i", "wp-conn-ii", "wp-conn-iii", "wp-conn-iv"]
    trackers = {k: MaxTracker() for k in names}
    tier = worse_tier(w.combined.first_tier, w.m1.first_tier, w.m2.first_tier)
    basis1 = np.eye(w.dim)[w.block1]
    basis2 = np.eye(w.dim)[w.block2]
    for p in samples:
        p = w.combined.point(p)
        g = w.combined.metric(p)
        G = christoffel(w.combined, p)
        x1, x2, fv, df, grad_ln_f = _factor_data(w, p)
        G1 = christoffel(w.m1, x1)
        G2 = christoffel(w.m2, x2)
        for _ in range(vectors):
            E1, F1 = random_in_span(rng, g, basis1), random_in_span(rng, g, basis1)
            E2, F2 = random_in_span(rng, g, basis2), random_in_span(rng, g, basis2)
            e1, f1 = E1[w.block1], F1[w.block1]
            e2, f2 = E2[w.block2], F2[w.block2]

            lhs = np.einsum("kij,i,j->k", G, E1, F1)
            rhs = w.lift1(np.einsum("kij,i,j->k", G1, e1, f1))
            trackers["wp-conn-i"].update(relative_vec(g, lhs, rhs), p)

            rhs = (df @ e1) / fv * E2
            r = max(relative_vec(g, np.einsum("kij,i,j->k", G, E1, E2), rhs),
                    relative_vec(g, np.einsum("kij,i,j->k", G, E2, E1), rhs))
            trackers["wp-conn-ii"].update(r, p)

            nab = np.einsum("kij,i,j->k", G, E2, F2)
            nor = w.lift1(nab[w.block1])
            trackers["wp-conn-iii"].update(
                relative_vec(g, nor, -inner(g, E2, F2) * grad_ln_f), p)

            tan = w.lift2(nab[w.block2])
            rhs = w.lift2(np.einsum("kij,i,j->k", G2, e2, f2))
            trackers["wp-conn-iv"].update(relative_vec(g, tan, rhs), p)
    return [trackers[k].report(k, tier) for k in names]


def _vec(R, gi, X, Y, Z):
    """Components of ``R(X, Y)Z`` from the lowered tensor."""
    return gi @ np.einsum("ijkl,i,j,k->l", R, X, Y, Z)


def check_wp_curvature(w: WarpedProductSpace, samples, rng, vectors=8):
    """Residuals of the five curvature identities of a warped product.

    Returns
    -------
    list of RelationReport
        Ids ``wp-curv-i`` .. ``wp-curv-v``.
    """
    names = ["wp-curv-i", "wp-curv-ii", "wp-curv-iii", "wp-curv-iv", "wp-curv-v"]
    trackers = {k: MaxTracker() for k in names}
    tier = worse_tier(w.combined.curvature_tier, w.m1.curvature_tier,
                      w.m2.curvature_tier, w.f.tier)
    basis1 = np.eye(w.dim)[w.block1]
    basis2 = np.eye(w.dim)[w.block2]
    for p in samples:
        p = w.combined.point(p)
        g = w.combined.metric(p)
        gi = inverse_metric(g)
        R = riemann(w.combined, p)
        x1, x2, fv, df, grad_ln_f = _factor_data(w, p)
        g1i = inverse_metric(w.m1.metric(x1))
        g2i = inverse_metric(w.m2.metric(x2))
        R1 = riemann(w.m1, x1)
        R2 = riemann(w.m2, x2)
        hf = hessian(w.m1, w.f, x1)
        grad_f_sq = df @ g1i @ df
        for _ in range(vectors):
            E1, F1, G1 = (random_in_span(rng, g, basis1) for _ in range(3))
            E2, F2, G2 = (random_in_span(rng, g, basis2) for _ in range(3))
            e1, f1, g1v = E1[w.block1], F1[w.block1], G1[w.block1]
            e2, f2, g2v = E2[w.block2], F2[w.block2], G2[w.block2]

            lhs = _vec(R, gi, E1, F1, G1)
            rhs = w.lift1(g1i @ np.einsum("ijkl,i,j,k->l", R1, e1, f1, g1v))
            trackers["wp-curv-i"].update(relative_vec(g, lhs, rhs), p)

            lhs = _vec(R, gi, E1, F2, F1)
            rhs = (e1 @ hf @ f1) / fv * F2
            trackers["wp-curv-ii"].update(relative_vec(g, lhs, rhs), p)

            zero = np.zeros(w.dim)
            r = max(relative_vec(g, _vec(R, gi, E1, F1, F2), zero),
                    relative_vec(g, _vec(R, gi, F2, G2, E1), zero))
            trackers["wp-curv-iii"].update(r, p)

            lhs = _vec(R, gi, E1, F2, G2)
            rhs = -inner(g, F2, G2) / fv * w.lift1(g1i @ hf @ e1)
            trackers["wp-curv-iv"].update(relative_vec(g, lhs, rhs), p)

            lhs = _vec(R, gi, E2, F2, G2)
            r2 = w.lift2(g2i @ np.einsum("ijkl,i,j,k->l", R2, e2, f2, g2v))
            warp_term = grad_f_sq / fv ** 2 * (inner(g, E2, G2) * F2 - inner(g, F2, G2) * E2)
            trackers["wp-curv-v"].update(relative_vec(g, lhs, r2 + warp_term, r2, warp_term), p)
    return [trackers[k].report(k, tier) for k in names]
