"""Residual bookkeeping shared by every check."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import TOLERANCE, norm

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"

# Relative residuals are divided by max(RELATIVE_FLOOR, largest term), so
# terms of order one or smaller are compared in absolute terms.
RELATIVE_FLOOR = 1.0


@dataclass
class RelationReport:
    """Outcome of one identity checked over many samples.

    ``residual`` is the maximum normalized mismatch; ``worst_point`` is the
    sample where it occurred.  A report with ``skip_reason`` set is SKIP.
    """

    relation_id: str
    residual: float
    tier: str
    samples_used: int
    worst_point: Optional[np.ndarray]
    tolerance: Optional[float] = None
    skip_reason: Optional[str] = None
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tolerance is None:
            self.tolerance = TOLERANCE[self.tier]

    @property
    def status(self):
        if self.skip_reason is not None:
            return SKIP
        if np.isfinite(self.residual) and self.residual <= self.tolerance:
            return PASS
        return FAIL

    @property
    def passed(self):
        return self.status == PASS


def skipped(relation_id, tier, reason):
    return RelationReport(relation_id, float("nan"), tier, 0, None, skip_reason=reason)


def relative(diff, *terms):
    """``|diff|`` scaled by the largest term magnitude, floored."""
    scale = max([RELATIVE_FLOOR] + [abs(float(t)) for t in terms])
    return abs(float(diff)) / scale


def relative_vec(g, lhs, rhs, *terms):
    """Metric norm of ``lhs - rhs`` relative to the largest norm of any term."""
    scales = [norm(g, lhs), norm(g, rhs)] + [norm(g, t) for t in terms]
    return norm(g, np.asarray(lhs) - np.asarray(rhs)) / max([RELATIVE_FLOOR] + scales)


class MaxTracker:
    """Running maximum of a residual together with where it happened."""

    def __init__(self):
        self.value = 0.0
        self.point = None
        self.count = 0
        self.detail = {}

    def update(self, residual, point):
        self.count += 1
        residual = float(residual)
        if not np.isfinite(residual):
            residual = float("inf")
        if self.point is None or residual > self.value:
            self.value = residual
            self.point = np.array(point, dtype=float)

    def note(self, key, value):
        """Keep the running maximum of an auxiliary quantity."""
        self.detail[key] = max(self.detail.get(key, 0.0), float(value))

    def report(self, relation_id, tier, tolerance=None, samples=None):
        return RelationReport(relation_id, self.value, tier,
                              self.count if samples is None else samples,
                              self.point, tolerance, detail=dict(self.detail))


def random_in_span(rng, g, basis):
    """Random g-unit vector in the row span of ``basis`` (zero if empty)."""
    basis = np.asarray(basis, dtype=float)
    if basis.shape[0] == 0:
        return np.zeros(g.shape[0])
    v = rng.standard_normal(basis.shape[0]) @ basis
    n = norm(g, v)
    return v / n if n > 0 else v
