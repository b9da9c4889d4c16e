"""Command line entry point: ``knotlab sample|project|identify|classify|experiment``."""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import experiment as ex
from .classify import METHODS, build_direction_set, classify
from .diagram import generic_project, kmt_simplify
from .geometry import OpenArc, Polygon3, RngStream, read_ndjson, to_record
from .homfly import build_table, default_table, identify
from .sampling import sample_closed_equilateral, sample_open_arc


def _table(path):
    return build_table(path, verify=False) if path else default_table()


def _out(path):
    if path in (None, "-"):
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="")


def cmd_sample(args):
    root = RngStream(args.seed)
    fh = _out(args.out)
    try:
        for i in range(args.count):
            rng = root.child(i)
            obj = sample_open_arc(args.arc, rng) if args.arc else sample_closed_equilateral(args.n, rng)
            fh.write(to_record(obj) + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_project(args):
    root = RngStream(args.seed)
    for i, (obj, _) in enumerate(read_ndjson(args.infile)):
        if isinstance(obj, OpenArc):
            raise SystemExit("record %d is an arc; project needs closed polygons" % i)
        poly = kmt_simplify(obj) if args.simplify else obj
        print(generic_project(poly, root.child(i)).to_json())


def cmd_identify(args):
    table = _table(args.table)
    root = RngStream(args.seed)
    for i, (obj, _) in enumerate(read_ndjson(args.infile)):
        if not isinstance(obj, Polygon3):
            raise SystemExit("record %d is an arc; identify needs closed polygons" % i)
        print("%d\t%s" % (i, identify(obj, table, root.child(i))))


def cmd_classify(args):
    table = _table(args.table)
    ds = build_direction_set()
    root = RngStream(args.seed)
    fh = _out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["arc_id", "method", "predicted_label", "top_weight", "tie_broken"])
        for i, (obj, extra) in enumerate(read_ndjson(args.infile)):
            if isinstance(obj, Polygon3):
                obj = OpenArc(list(obj.vertices) + [obj.vertices[0]])
            pred = classify(args.method, obj, n=args.n, table=table, rng=root.child(i), ds=ds,
                            closures=args.closures)
            w.writerow([extra.get("arc_id", i), args.method, str(pred.label),
                        "%.6f" % pred.top_weight, int(pred.tie_broken)])
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_experiment(args):
    values = ex.read_config(args.config) if args.config else {}
    cli = {"n": args.n, "hosts_per_knot": args.hosts_per_knot, "labels": args.labels,
           "k_grid": args.k_grid, "starts": args.starts, "closures": args.closures,
           "seed": args.seed, "table": args.table, "workers": args.workers,
           "methods": args.methods, "budget": args.budget}
    values.update({k: v for k, v in cli.items() if v is not None})
    cfg = ex.config_from_mapping(values)
    hosts, records, counts, draws = ex.run_campaign(cfg)
    ex.write_outputs(args.out, cfg, args.kind, hosts, records, counts, draws, fmt=args.format)
    print("%d hosts, %d trials -> %s" % (len(hosts), len(records), Path(args.out)))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="knotlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample random polygons or open arcs as NDJSON")
    p.add_argument("--n", type=int, default=100, help="polygon edge count")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--arc", type=int, default=0, metavar="K", help="sample open K-edge arcs instead")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("project", help="JSON crossing dump of a generic projection")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--simplify", action="store_true", help="run triangle elimination first")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("identify", help="knot type of each polygon in an NDJSON file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--table", default=None)
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("classify", help="classify open arcs")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--n", type=int, default=100, help="closed polygon size for SR/PR")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--table", default=None)
    p.add_argument("--closures", type=int, default=100)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("experiment", help="accuracy / PPV / threshold campaigns")
    p.add_argument("kind", choices=["accuracy", "ppv", "thresholds", "all"])
    p.add_argument("--n", type=int)
    p.add_argument("--hosts-per-knot", type=int)
    p.add_argument("--labels", help="comma separated, e.g. 0_1,+3_1,4_1")
    p.add_argument("--k-grid", help="e.g. 1-5,10:90:10")
    p.add_argument("--starts", type=int, help="subchain starts per host and k")
    p.add_argument("--closures", type=int)
    p.add_argument("--methods", help="comma separated subset of su,pu,sr,pr")
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int, help="maximum polygons drawn while harvesting")
    p.add_argument("--table", default=None)
    p.add_argument("--config", help="key = value file; command line flags win")
    p.add_argument("--workers", type=int)
    p.add_argument("--format", choices=["csv", "gnuplot", "both"], default="csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
