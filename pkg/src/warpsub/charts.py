"""Ready-made metrics and scalar fields with analytic derivatives."""
from __future__ import annotations

import numpy as np

from .geometry import MetricField, ScalarField


def euclidean(n, domain_guard=None, name=None):
    """Flat metric ``delta`` on ``R^n``."""
    eye = np.eye(n)
    zeros3 = np.zeros((n, n, n))
    zeros4 = np.zeros((n, n, n, n))
    return MetricField(n, lambda p: eye.copy(), lambda p: zeros3.copy(),
                       lambda p: zeros4.copy(), domain_guard, name or f"R^{n}")


def conformal(n, w, dw, ddw, domain_guard=None, name="conformal"):
    """Metric ``w(x) * delta`` given ``w`` and its first and second partials."""
    eye = np.eye(n)

    def d_metric(p):
        return np.einsum("k,ij->kij", dw(p), eye)

    def dd_metric(p):
        return np.einsum("lk,ij->lkij", ddw(p), eye)

    return MetricField(n, lambda p: w(p) * eye, d_metric, dd_metric, domain_guard, name)


def exp_conformal(n, a, name="exp-conformal"):
    """Metric ``exp(2 a.x) * delta``; conformally flat but curved."""
    a = np.asarray(a, dtype=float)

    def w(p):
        return np.exp(2.0 * a @ p)

    return conformal(n, w, lambda p: 2.0 * a * w(p), lambda p: 4.0 * np.outer(a, a) * w(p),
                     name=name)


def stereographic_sphere(n, radius=1.0, name=None):
    """Round ``S^n`` of the given radius in the stereographic chart from the north pole.

    The metric is ``4 R^2 / (1 + |u|^2)^2 * delta``.
    """
    c = 4.0 * radius ** 2

    def w(u):
        return c / (1.0 + u @ u) ** 2

    def dw(u):
        return -4.0 * c * u / (1.0 + u @ u) ** 3

    def ddw(u):
        s = 1.0 + u @ u
        return -4.0 * c * np.eye(n) / s ** 3 + 24.0 * c * np.outer(u, u) / s ** 4

    return conformal(n, w, dw, ddw, lambda u: bool(u @ u < 1e6),
                     name or f"S^{n}({radius:g}) stereographic")


def sphere2_angles(name="S^2 angles"):
    """Unit 2-sphere in coordinates ``(phi, theta)``, metric ``diag(1, sin^2 phi)``."""

    def metric(p):
        return np.diag([1.0, np.sin(p[0]) ** 2])

    def d_metric(p):
        out = np.zeros((2, 2, 2))
        out[0, 1, 1] = np.sin(2.0 * p[0])
        return out

    def dd_metric(p):
        out = np.zeros((2, 2, 2, 2))
        out[0, 0, 1, 1] = 2.0 * np.cos(2.0 * p[0])
        return out

    return MetricField(2, metric, d_metric, dd_metric,
                       lambda p: bool(0.0 < p[0] < np.pi and abs(np.sin(p[0])) > 1e-6), name)


def product(ma: MetricField, mb: MetricField, name=None):
    """Riemannian product with block-diagonal metric."""
    a, b = ma.dim, mb.dim
    n = a + b

    def metric(p):
        g = np.zeros((n, n))
        g[:a, :a] = ma.metric(p[:a])
        g[a:, a:] = mb.metric(p[a:])
        return g

    d_metric = dd_metric = None
    if ma.d_metric_at is not None and mb.d_metric_at is not None:
        def d_metric(p):
            d = np.zeros((n, n, n))
            d[:a, :a, :a] = ma.d_metric(p[:a])
            d[a:, a:, a:] = mb.d_metric(p[a:])
            return d
    if ma.dd_metric_at is not None and mb.dd_metric_at is not None:
        def dd_metric(p):
            d = np.zeros((n, n, n, n))
            d[:a, :a, :a, :a] = ma.dd_metric_at(p[:a])
            d[a:, a:, a:, a:] = mb.dd_metric_at(p[a:])
            return d

    def guard(p):
        return ma.contains(p[:a]) and mb.contains(p[a:])

    return MetricField(n, metric, d_metric, dd_metric, guard, name or f"{ma.name} x {mb.name}")


# scalar fields

def constant(c, n):
    return ScalarField(lambda p: float(c), lambda p: np.zeros(n), lambda p: np.zeros((n, n)))


def linear(a, c=0.0):
    a = np.asarray(a, dtype=float)
    n = a.size
    return ScalarField(lambda p: float(a @ p + c), lambda p: a.copy(), lambda p: np.zeros((n, n)))


def coordinate(i, n):
    e = np.zeros(n)
    e[i] = 1.0
    return linear(e)


def radius(indices, n):
    """``sqrt`` of the sum of squares of the selected coordinates."""
    idx = np.asarray(indices)
    mask = np.zeros(n)
    mask[idx] = 1.0

    def value(p):
        return float(np.sqrt(np.sum(p[idx] ** 2)))

    def grad(p):
        return mask * p / value(p)

    def hess(p):
        r = value(p)
        q = mask * p
        return (np.diag(mask) - np.outer(q, q) / r ** 2) / r

    return ScalarField(value, grad, hess)


def log_radius(indices, n, scale=1.0):
    """``scale * ln`` of the radius in the selected coordinates."""
    idx = np.asarray(indices)
    mask = np.zeros(n)
    mask[idx] = 1.0

    def value(p):
        return float(0.5 * scale * np.log(np.sum(p[idx] ** 2)))

    def grad(p):
        q = mask * p
        return scale * q / (q @ q)

    def hess(p):
        q = mask * p
        r2 = q @ q
        return scale * (np.diag(mask) / r2 - 2.0 * np.outer(q, q) / r2 ** 2)

    return ScalarField(value, grad, hess)


def compose_exp(s: ScalarField):
    """``exp(s)`` with derivatives from those of ``s`` (finite differences if ``s`` has none)."""
    def value(p):
        return float(np.exp(s.value(p)))

    def grad(p):
        return value(p) * s.partials(p)

    def hess(p):
        d = s.partials(p)
        return value(p) * (s.second_partials(p) + np.outer(d, d))

    return ScalarField(value, grad, hess)


def embed(s: ScalarField, offset, size, n):
    """Scalar on a factor chart seen as a function on a product chart of dimension ``n``."""
    sl = slice(offset, offset + size)

    def grad(p):
        out = np.zeros(n)
        out[sl] = s.partials(p[sl])
        return out

    def hess(p):
        out = np.zeros((n, n))
        out[sl, sl] = s.second_partials(p[sl])
        return out

    return ScalarField(lambda p: s.value(p[sl]),
                       grad if s.grad_at is not None else None,
                       hess if s.hess_at is not None else None)
