"""Regenerate ``src/knotlab/data/knot_table.tsv`` from the prime PD data.

    python3 tools/make_table.py
"""
import argparse
from pathlib import Path

from knotlab.homfly.table import generate_table, write_table

DATA = Path(__file__).resolve().parents[1] / "src" / "knotlab" / "data"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--primes", default=str(DATA / "prime_knots.tsv"))
    ap.add_argument("--out", default=str(DATA / "knot_table.tsv"))
    args = ap.parse_args()
    rows = generate_table(args.primes)
    write_table(rows, args.out)
    print("wrote %d entries to %s" % (len(rows), args.out))


if __name__ == "__main__":
    main()
