"""Dev-time extraction of prime knot diagrams from the KnotInfo database.

Writes ``src/knotlab/data/prime_knots.tsv`` (PD codes used to build the
shipped table) and ``tests/data/knotinfo_homfly.tsv`` (KnotInfo's own
HOMFLYPT strings, kept only as an independent test oracle).

    pip install database_knotinfo
    python3 tools/extract_knotinfo.py
"""
import argparse
import csv
from pathlib import Path

from database_knotinfo import link_list

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-crossings", type=int, default=9)
    args = ap.parse_args()
    rows = []
    for rec in link_list():
        name = rec["name"]
        if not rec["crossing_number"] or "_" not in name or name == "0_1":
            continue
        c = int(rec["crossing_number"])
        if c > args.max_crossings:
            continue
        rows.append((c, int(name.split("_")[1]), name, rec["symmetry_type"],
                     rec["pd_notation"], rec["homfly_polynomial"]))
    rows.sort()
    with open(ROOT / "src/knotlab/data/prime_knots.tsv", "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["name", "crossing_number", "symmetry", "pd_code"])
        for c, _, name, sym, pd, _h in rows:
            w.writerow([name, c, sym, pd.replace(" ", "")])
    with open(ROOT / "tests/data/knotinfo_homfly.tsv", "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["name", "homfly_v_z"])
        for c, _, name, sym, pd, h in rows:
            w.writerow([name, h.replace(" ", "")])
    print("wrote %d knots" % len(rows))


if __name__ == "__main__":
    main()
