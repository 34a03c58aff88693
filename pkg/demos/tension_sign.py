"""Tension field of a Clairaut warped submersion against k * phi_*(grad psi).

Run with ``python3 demos/tension_sign.py``.
"""
import numpy as np

from warpsub.catalog import get_entry
from warpsub.clairaut import codimension_sum, pushed_girth_gradient, tension_field


def main():
    for name in ("r4-girth", "hopf-fiber", "r5-sphere-girth"):
        entry = get_entry(name)
        k = codimension_sum(entry.ws)
        p = entry.sample_points(1, np.random.default_rng(3))[0]
        tau = tension_field(entry.ws, p)
        grad = pushed_girth_gradient(entry.ws, p)
        plus = np.linalg.norm(tau - k * grad)
        minus = np.linalg.norm(tau + k * grad)
        print(f"{name:16s} k={k}  |tau - k grad| {plus:.1e}  |tau + k grad| {minus:.1e}")


if __name__ == "__main__":
    main()
