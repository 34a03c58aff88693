"""Pointwise tensor calculus on a single coordinate chart.

Conventions
-----------
Arrays follow coordinate index order.  ``dg[k, i, j]`` is the partial
derivative of ``g_ij`` along ``x_k``; ``Gamma[k, i, j]`` is the connection
coefficient of ``nabla_{d_i} d_j`` along ``d_k``.  The curvature operator is
``R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`` and the
fully lowered tensor is ``R[i, j, k, l] = g(R(d_i, d_j) d_k, d_l)``.  With
this choice ``R(X, Y, Y, X) > 0`` on the round sphere.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import fd
from .errors import ChartBoundaryError, NonInvertibleMetricError

ANALYTIC = "analytic"
FD = "fd"
TOLERANCE = {ANALYTIC: 1e-8, FD: 1e-4}
MAX_CONDITION = 1e12


def worse_tier(*tiers):
    """Finite-difference tier wins over analytic."""
    return FD if FD in tiers else ANALYTIC


@dataclass(frozen=True)
class MetricField:
    """Riemannian metric on a coordinate chart.

    Parameters
    ----------
    dim : int
        Chart dimension.
    metric_at : callable
        Point -> symmetric ``(dim, dim)`` matrix.
    d_metric_at : callable, optional
        Point -> ``(dim, dim, dim)`` array of first partials.
    dd_metric_at : callable, optional
        Point -> ``(dim, dim, dim, dim)`` array, ``[l, k, i, j] = d_l d_k g_ij``.
    domain_guard : callable, optional
        Point -> bool, False where the chart is not valid.
    name : str
        Label used in messages.
    """

    dim: int
    metric_at: Callable
    d_metric_at: Optional[Callable] = None
    dd_metric_at: Optional[Callable] = None
    domain_guard: Optional[Callable] = None
    name: str = ""

    def contains(self, p) -> bool:
        p = np.asarray(p, dtype=float)
        if p.shape != (self.dim,) or not np.all(np.isfinite(p)):
            return False
        return True if self.domain_guard is None else bool(self.domain_guard(p))

    def point(self, p):
        """Validated float copy of ``p``."""
        p = np.array(p, dtype=float)
        if p.shape != (self.dim,):
            raise ValueError(f"point of length {p.size} given for a chart of dimension {self.dim}")
        if not self.contains(p):
            raise ChartBoundaryError(f"point {p.tolist()} outside chart {self.name!r}")
        return p

    def metric(self, p):
        return np.asarray(self.metric_at(np.asarray(p, dtype=float)), dtype=float)

    def d_metric(self, p):
        p = np.asarray(p, dtype=float)
        if self.d_metric_at is not None:
            return np.asarray(self.d_metric_at(p), dtype=float)
        return fd.partials(self.metric, p, fd.H1)

    @property
    def first_tier(self):
        return ANALYTIC if self.d_metric_at is not None else FD

    @property
    def curvature_tier(self):
        return ANALYTIC if self.dd_metric_at is not None else FD

    def without_derivatives(self):
        """Same metric with every analytic derivative dropped."""
        return MetricField(self.dim, self.metric_at, None, None, self.domain_guard,
                           self.name + " [fd]")


@dataclass(frozen=True)
class ScalarField:
    """Smooth function on a chart.

    ``grad_at`` and ``hess_at`` return coordinate partial derivatives
    (the differential and the matrix of second partials), not metric objects.
    """

    value_at: Callable
    grad_at: Optional[Callable] = None
    hess_at: Optional[Callable] = None

    def value(self, p):
        return float(self.value_at(np.asarray(p, dtype=float)))

    def partials(self, p):
        p = np.asarray(p, dtype=float)
        if self.grad_at is not None:
            return np.asarray(self.grad_at(p), dtype=float)
        return fd.partials(self.value, p, fd.H1)

    def second_partials(self, p):
        p = np.asarray(p, dtype=float)
        if self.hess_at is not None:
            return np.asarray(self.hess_at(p), dtype=float)
        if self.grad_at is not None:
            h = fd.partials(self.partials, p, fd.H1)
        else:
            h = fd.second_partials(self.value, p, fd.H2)
        return 0.5 * (h + h.T)

    @property
    def tier(self):
        return ANALYTIC if self.hess_at is not None else FD


def inverse_metric(g):
    """Inverse of a metric matrix with a conditioning check."""
    ev = np.linalg.eigvalsh(g)
    if ev[0] <= 0 or ev[-1] > MAX_CONDITION * ev[0]:
        raise NonInvertibleMetricError(f"metric not invertible (eigenvalues {ev[0]:.3g}..{ev[-1]:.3g})")
    gi = np.linalg.inv(g)
    return 0.5 * (gi + gi.T)


def inner(g, X, Y):
    return float(np.asarray(X) @ g @ np.asarray(Y))


def norm(g, X):
    return float(np.sqrt(max(inner(g, X, X), 0.0)))


def _christoffel_from(gi, dg):
    low = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    return np.einsum("kl,lij->kij", gi, low), low


def christoffel(m: MetricField, p):
    """Levi-Civita connection coefficients ``Gamma[k, i, j]``."""
    p = m.point(p)
    gi = inverse_metric(m.metric(p))
    return _christoffel_from(gi, m.d_metric(p))[0]


def d_christoffel(m: MetricField, p):
    """Partials ``dGamma[l, k, i, j] = d_l Gamma[k, i, j]``."""
    p = m.point(p)
    if m.dd_metric_at is None:
        return fd.partials(lambda x: christoffel(m, x), p, fd.H2)
    g = m.metric(p)
    gi = inverse_metric(g)
    dg = m.d_metric(p)
    ddg = np.asarray(m.dd_metric_at(p), dtype=float)
    _, low = _christoffel_from(gi, dg)
    dgi = -np.einsum("ab,mbc,cd->mad", gi, dg, gi)
    dlow = 0.5 * (np.einsum("mijl->mlij", ddg) + np.einsum("mjil->mlij", ddg) - ddg)
    return np.einsum("mkl,lij->mkij", dgi, low) + np.einsum("kl,mlij->mkij", gi, dlow)


def riemann(m: MetricField, p):
    """Fully lowered curvature tensor ``R[i, j, k, l]``."""
    p = m.point(p)
    G = christoffel(m, p)
    dG = d_christoffel(m, p)
    # up[r, s, a, b] = component r of R(d_a, d_b) d_s
    up = (np.einsum("arbs->rsab", dG) - np.einsum("bras->rsab", dG)
          + np.einsum("ral,lbs->rsab", G, G) - np.einsum("rbl,las->rsab", G, G))
    return np.einsum("lr,rkij->ijkl", m.metric(p), up)


def ricci(m: MetricField, p, R=None):
    """Ricci tensor, trace of slots one and four."""
    p = m.point(p)
    if R is None:
        R = riemann(m, p)
    gi = inverse_metric(m.metric(p))
    ric = np.einsum("il,ijkl->jk", gi, R)
    return 0.5 * (ric + ric.T)


def scalar_curv(m: MetricField, p, R=None):
    p = m.point(p)
    gi = inverse_metric(m.metric(p))
    return float(np.einsum("jk,jk->", gi, ricci(m, p, R)))


def sectional(m: MetricField, p, X, Y, R=None):
    """Sectional curvature of the plane spanned by ``X`` and ``Y``."""
    from .errors import DegeneratePlaneError

    p = m.point(p)
    g = m.metric(p)
    if R is None:
        R = riemann(m, p)
    xx, yy, xy = inner(g, X, X), inner(g, Y, Y), inner(g, X, Y)
    gram = xx * yy - xy * xy
    if gram <= 1e-12 * xx * yy or xx * yy == 0.0:
        raise DegeneratePlaneError("vectors do not span a plane")
    return float(np.einsum("ijkl,i,j,k,l->", R, X, Y, Y, X)) / gram


def kulkarni_nomizu(h, k):
    """Kulkarni-Nomizu product of two symmetric 2-tensors."""
    return (np.einsum("il,jk->ijkl", h, k) + np.einsum("jk,il->ijkl", h, k)
            - np.einsum("ik,jl->ijkl", h, k) - np.einsum("jl,ik->ijkl", h, k))


@dataclass(frozen=True)
class WeylResult:
    """Weyl tensor together with a flag for dimensions where it is trivial."""

    tensor: np.ndarray
    trivial_dimension: bool


def weyl(m: MetricField, p, R=None) -> WeylResult:
    """Conformally invariant, totally trace-free part of the curvature.

    For ``dim <= 3`` a zero array is returned with ``trivial_dimension`` set.
    """
    p = m.point(p)
    n = m.dim
    if n <= 3:
        return WeylResult(np.zeros((n, n, n, n)), True)
    g = m.metric(p)
    if R is None:
        R = riemann(m, p)
    ric = ricci(m, p, R)
    scal = float(np.einsum("jk,jk->", inverse_metric(g), ric))
    schouten = (ric - scal / (2.0 * (n - 1)) * g) / (n - 2)
    return WeylResult(R - kulkarni_nomizu(schouten, g), False)


def tensor_norm(m: MetricField, p, T):
    """Metric norm of a covariant tensor of any order."""
    gi = inverse_metric(m.metric(p))
    raised = T
    for axis in range(T.ndim):
        raised = np.moveaxis(np.tensordot(gi, raised, axes=([1], [axis])), 0, axis)
    return float(np.sqrt(max(np.sum(T * raised), 0.0)))


def grad(m: MetricField, s: ScalarField, p):
    p = m.point(p)
    return inverse_metric(m.metric(p)) @ s.partials(p)


def hessian(m: MetricField, s: ScalarField, p):
    """Covariant Hessian ``d_i d_j s - Gamma^k_ij d_k s``."""
    p = m.point(p)
    h = s.second_partials(p) - np.einsum("kij,k->ij", christoffel(m, p), s.partials(p))
    return 0.5 * (h + h.T)


def laplacian(m: MetricField, s: ScalarField, p):
    p = m.point(p)
    return float(np.einsum("ij,ij->", inverse_metric(m.metric(p)), hessian(m, s, p)))


def cov_deriv_field(m: MetricField, p, direction, field, base=fd.H1):
    """Covariant derivative of a vector field given by its components.

    Parameters
    ----------
    m : MetricField
    p : array_like
        Base point.
    direction : array_like
        Components of the direction ``X`` at ``p``.
    field : callable
        Point -> components of the field ``V``.
    base : float
        Relative step of the central difference.
    """
    p = m.point(p)
    X = np.asarray(direction, dtype=float)
    size = np.max(np.abs(X)) if X.size else 0.0
    if size > 0.0:
        t = base * max(1.0, np.max(np.abs(p))) / size
        for q in (p + t * X, p - t * X):
            if not m.contains(q):
                raise ChartBoundaryError("difference stencil leaves the chart")
    V = np.asarray(field(p), dtype=float)
    return fd.directional(field, p, X, base) + np.einsum("kij,i,j->k", christoffel(m, p), X, V)
