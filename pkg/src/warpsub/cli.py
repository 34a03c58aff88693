"""Command-line interface: ``warpsub verify|geodesic|curvature|list``."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .catalog import BUILDERS, catalog_entries, get_entry
from .clairaut import clairaut_trace, integrate_geodesic, with_clairaut
from .errors import GeometryError
from .geometry import ricci, riemann, scalar_curv, weyl
from .report import DEFAULT_SEED, SEED_ENV, default_seed, dumps, mismatches, verify_entry

FMT = "{:.16e}"


def _csv_floats(text):
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _parser():
    p = argparse.ArgumentParser(prog="warpsub", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run every suite on a catalog entry")
    v.add_argument("--entry", required=True)
    v.add_argument("--seed", type=int, default=None,
                   help=f"random seed (default ${SEED_ENV} or {DEFAULT_SEED})")
    v.add_argument("--samples", type=int, default=25)
    v.add_argument("--vectors", type=int, default=8)
    v.add_argument("--tolerance-tier", choices=["analytic", "fd"], default=None)
    v.add_argument("--out", help="write the JSON report here instead of stdout")

    g = sub.add_parser("geodesic", help="integrate a geodesic and write a CSV trace")
    g.add_argument("--entry", required=True)
    g.add_argument("--p0", type=_csv_floats, required=True)
    g.add_argument("--v0", type=_csv_floats, required=True)
    g.add_argument("--t-end", type=float, required=True)
    g.add_argument("--dt", type=float, default=1e-3)
    g.add_argument("--out", help="CSV path (default stdout)")

    c = sub.add_parser("curvature", help="print a curvature tensor at a point")
    c.add_argument("--entry", required=True)
    c.add_argument("--point", type=_csv_floats, required=True)
    c.add_argument("--tensor", choices=["riemann", "ricci", "weyl", "scalar"], default="riemann")

    sub.add_parser("list", help="list catalog entries")
    return p


def _entry_or_exit(name):
    if name not in BUILDERS:
        print(f"warpsub: unknown entry {name!r}; known: {', '.join(BUILDERS)}", file=sys.stderr)
        raise SystemExit(2)
    return get_entry(name)


def _check_dim(parser, flag, vec, dim):
    if vec.size != dim:
        parser.error(f"{flag} has {vec.size} components; the entry has dimension {dim}")


def main(argv=None):
    parser = _parser()
    args = parser.parse_args(argv)

    if args.command == "list":
        for e in catalog_entries():
            m1, n1, m2, n2 = e.ws.dims
            print(f"{e.name}\tdim={e.dim}\t(m1,n1,m2,n2)=({m1},{n1},{m2},{n2})\t"
                  f"clairaut={'yes' if e.is_clairaut else 'no'}")
        return 0

    entry = _entry_or_exit(args.entry)
    m = entry.ws.source.combined

    if args.command == "verify":
        report = verify_entry(entry, args.seed if args.seed is not None else default_seed(),
                              args.samples, args.vectors, args.tolerance_tier)
        text = dumps(report)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        bad = mismatches(report)
        for r in bad:
            print(f"warpsub: {r['id']}: {r['status']} (expected {r['expected']})", file=sys.stderr)
        return 1 if bad else 0

    if args.command == "geodesic":
        _check_dim(parser, "--p0", args.p0, m.dim)
        _check_dim(parser, "--v0", args.v0, m.dim)
        try:
            trace = integrate_geodesic(m, args.p0, args.v0, args.t_end, args.dt)
        except (GeometryError, ValueError) as ex:
            print(f"warpsub: {ex}", file=sys.stderr)
            return 1
        trace = with_clairaut(trace, clairaut_trace(entry.ws, trace))
        trace.to_csv(args.out or sys.stdout)
        for w in trace.warnings:
            print(f"warpsub: {w}", file=sys.stderr)
        return 0

    _check_dim(parser, "--point", args.point, m.dim)
    try:
        p = m.point(args.point)
        if args.tensor == "riemann":
            out = riemann(m, p)
        elif args.tensor == "ricci":
            out = ricci(m, p)
        elif args.tensor == "weyl":
            out = weyl(m, p).tensor
        else:
            out = np.array([scalar_curv(m, p)])
    except GeometryError as ex:
        print(f"warpsub: {ex}", file=sys.stderr)
        return 1
    print(" ".join(FMT.format(v) for v in np.ravel(out)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
