"""Clairaut constant along geodesics: a Clairaut entry against the control.

Run with ``python3 demos/clairaut_geodesics.py``.
"""
import numpy as np

from warpsub.catalog import get_entry
from warpsub.clairaut import check_clairaut_conditions, clairaut_conditions_hold
from warpsub.report import run_geodesics


def main(count=10):
    for name in ("r4-girth", "non-clairaut-control"):
        entry = get_entry(name)
        rng = np.random.default_rng(7)
        holds = clairaut_conditions_hold(check_clairaut_conditions(entry.ws, entry.sample_points(10, rng)))
        drifts = np.array([s.drift for _, s in run_geodesics(entry, count, rng)])
        print(f"{name:22s} conditions hold: {holds!s:5s}  "
              f"max drift {np.nanmax(drifts):.2e}  median drift {np.nanmedian(drifts):.2e}")


if __name__ == "__main__":
    main()
