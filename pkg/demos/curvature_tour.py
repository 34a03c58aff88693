"""Curvature of each catalog entry at its box centre.

Run with ``python3 demos/curvature_tour.py``.
"""
import numpy as np

from warpsub.catalog import catalog_entries
from warpsub.geometry import ricci, riemann, scalar_curv


def main():
    for entry in catalog_entries():
        m = entry.ws.source.combined
        p = (np.asarray(entry.box[0], float) + np.asarray(entry.box[1], float)) / 2
        print(f"{entry.name:22s} dim {m.dim}  max|R| {np.max(np.abs(riemann(m, p))):.2e}  "
              f"max|Ric| {np.max(np.abs(ricci(m, p))):.2e}  scal {scalar_curv(m, p):+.3e}")


if __name__ == "__main__":
    main()
