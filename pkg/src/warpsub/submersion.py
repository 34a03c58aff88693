"""Riemannian submersions: frames, O'Neill tensors and fiber geometry.

The O'Neill tensors are evaluated from the vertical projector field
``P(x)``.  For vectors ``E, F`` at ``p`` the extensions are the projections
``P(x)E``, ``(I - P(x))F`` of constant-component fields, so that for example
``nabla_Y (P F) = (D_Y P) F + Gamma(Y, P F)`` with ``D_Y P`` a central
difference.  Both tensors are pointwise, so the choice of extension does not
change the value.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import fd
from .errors import NotASubmersionError
from .geometry import FD, MetricField, christoffel, inner, inverse_metric, norm

RANK_RTOL = 1e-10


@dataclass(frozen=True)
class SmoothMap:
    """Map between two charts, with an optional analytic Jacobian."""

    source: MetricField
    target: MetricField
    value_at: Callable
    jacobian_at: Optional[Callable] = None
    name: str = ""

    def value(self, p):
        return np.asarray(self.value_at(p), dtype=float)

    def jacobian(self, p):
        """``(target.dim, source.dim)`` matrix of partials."""
        if self.jacobian_at is not None:
            return np.asarray(self.jacobian_at(p), dtype=float).reshape(self.target.dim, self.source.dim)
        return fd.partials(self.value, p, fd.H1).reshape(self.source.dim, self.target.dim).T


def identity_map(m: MetricField, target: MetricField = None):
    eye = np.eye(m.dim)
    return SmoothMap(m, target or m, lambda p: np.array(p, dtype=float), lambda p: eye.copy(), "identity")


def linear_map(source, target, matrix, name="linear"):
    M = np.asarray(matrix, dtype=float)
    return SmoothMap(source, target, lambda p: M @ p, lambda p: M.copy(), name)


@dataclass(frozen=True)
class SubmersionFrame:
    """Orthonormal vertical and horizontal bases at a point (rows)."""

    base: np.ndarray
    vertical: np.ndarray
    horizontal: np.ndarray
    blocks: dict = field(default_factory=dict)

    @property
    def all(self):
        return np.vstack([self.vertical, self.horizontal])


def _check_rank(J):
    n, m = J.shape
    if n > m:
        raise NotASubmersionError(f"target dimension {n} exceeds source dimension {m}")
    if n == 0:
        return
    s = np.linalg.svd(J, compute_uv=False)
    if s[-1] < RANK_RTOL * max(s[0], 1e-300):
        raise NotASubmersionError(f"Jacobian rank deficient (singular values {s[0]:.3g}..{s[-1]:.3g})")


def _fix_sign(v):
    tol = 1e-12 * max(np.max(np.abs(v)), 1e-300)
    for c in v:
        if abs(c) > tol:
            return v if c > 0 else -v
    return v


def gram_schmidt(vectors, g):
    """Modified Gram-Schmidt in the inner product ``g``, in row order."""
    out = []
    for v in np.asarray(vectors, dtype=float):
        w = v.copy()
        for _ in range(2):
            for u in out:
                w = w - inner(g, u, w) * u
        n = norm(g, w)
        if n > 1e-12 * max(norm(g, v), 1e-300):
            out.append(_fix_sign(w / n))
    return np.array(out).reshape(len(out), np.asarray(g).shape[0])


def split_frame(phi: SmoothMap, p) -> SubmersionFrame:
    """Orthonormal bases of the kernel of ``phi_*`` and of its complement.

    The kernel basis comes from a complete QR factorization of the transposed
    Jacobian, the horizontal basis from ``g^{-1} J^T``; both are then
    orthonormalized by modified Gram-Schmidt with the first non-negligible
    component made positive.
    """
    p = phi.source.point(p)
    J = phi.jacobian(p)
    _check_rank(J)
    n, m = J.shape
    g = phi.source.metric(p)
    gi = inverse_metric(g)
    Q = np.linalg.qr(J.T, mode="complete")[0] if n else np.eye(m)
    vertical = gram_schmidt(Q[:, n:].T, g)
    horizontal = gram_schmidt((gi @ J.T).T, g)
    return SubmersionFrame(p, vertical, horizontal)


def _projectors(phi, p):
    J = phi.jacobian(p)
    g = phi.source.metric(p)
    gi = inverse_metric(g)
    n, m = J.shape
    if n == 0:
        return np.eye(m), gi, J
    PH = gi @ J.T @ np.linalg.solve(J @ gi @ J.T, J)
    return np.eye(m) - PH, gi, J


def vertical_projector(phi: SmoothMap, p):
    """g-orthogonal projector onto the vertical space (acts on components)."""
    p = phi.source.point(p)
    _check_rank(phi.jacobian(p))
    return _projectors(phi, p)[0]


def horizontal_lift(phi: SmoothMap, p, target_vector):
    """Horizontal vector at ``p`` mapped by ``phi_*`` onto ``target_vector``."""
    J = phi.jacobian(p)
    gi = inverse_metric(phi.source.metric(p))
    return gi @ J.T @ np.linalg.solve(J @ gi @ J.T, np.asarray(target_vector, dtype=float))


@dataclass(frozen=True)
class OneillTensors:
    """Arrays ``T[a, i, j]``, ``A[a, i, j]``: component ``a`` of ``T_{d_i} d_j``."""

    T_array: np.ndarray
    A_array: np.ndarray
    vertical: np.ndarray

    @property
    def horizontal(self):
        return np.eye(self.vertical.shape[0]) - self.vertical

    def T(self, E, F):
        return np.einsum("aij,i,j->a", self.T_array, E, F)

    def A(self, E, F):
        return np.einsum("aij,i,j->a", self.A_array, E, F)


def oneill_tensors(phi: SmoothMap, p) -> OneillTensors:
    """Both O'Neill tensors at ``p`` as component arrays."""
    p = phi.source.point(p)
    _check_rank(phi.jacobian(p))
    P = _projectors(phi, p)[0]
    Q = np.eye(P.shape[0]) - P
    DP = fd.partials(lambda x: _projectors(phi, x)[0], p, fd.H1)  # [k, a, j]
    G = christoffel(phi.source, p)

    dv = np.einsum("ki,kaj->aij", P, DP)
    T = (np.einsum("ab,bij->aij", Q, dv + np.einsum("abc,bi,cj->aij", G, P, P))
         + np.einsum("ab,bij->aij", P, -dv + np.einsum("abc,bi,cj->aij", G, P, Q)))
    dh = np.einsum("ki,kaj->aij", Q, DP)
    A = (np.einsum("ab,bij->aij", P, -dh + np.einsum("abc,bi,cj->aij", G, Q, Q))
         + np.einsum("ab,bij->aij", Q, dh + np.einsum("abc,bi,cj->aij", G, Q, P)))
    return OneillTensors(T, A, P)


def oneill_T(phi: SmoothMap, p, E, F):
    """``T_E F``; always finite-difference tier."""
    return oneill_tensors(phi, p).T(E, F)


def oneill_A(phi: SmoothMap, p, E, F):
    """``A_E F``; always finite-difference tier."""
    return oneill_tensors(phi, p).A(E, F)


@dataclass(frozen=True)
class FiberReport:
    mean_curvature: np.ndarray
    umbilical_residual: float
    geodesic_residual: float
    tier: str = FD


def fiber_report(phi: SmoothMap, p) -> FiberReport:
    """Mean curvature vector of the fiber through ``p`` and shape residuals."""
    p = phi.source.point(p)
    frame = split_frame(phi, p)
    g = phi.source.metric(p)
    k = frame.vertical.shape[0]
    if k == 0:
        return FiberReport(np.zeros(phi.source.dim), 0.0, 0.0)
    ten = oneill_tensors(phi, p)
    U = frame.vertical
    H = sum(ten.T(u, u) for u in U) / k
    umb = geo = 0.0
    for i in range(k):
        for j in range(k):
            t = ten.T(U[i], U[j])
            umb = max(umb, norm(g, t - (1.0 if i == j else 0.0) * H))
            geo = max(geo, norm(g, t))
    return FiberReport(H, umb, geo)


def check_riemannian_submersion(phi: SmoothMap, samples):
    """Largest ``|g(X, Y) - g'(phi_* X, phi_* Y)|`` over horizontal frame pairs."""
    worst = 0.0
    for p in samples:
        frame = split_frame(phi, p)
        J = phi.jacobian(frame.base)
        gt = phi.target.metric(phi.value(frame.base))
        X = frame.horizontal
        g = phi.source.metric(frame.base)
        lhs = X @ g @ X.T
        rhs = (X @ J.T) @ gt @ (J @ X.T)
        if X.size:
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst
