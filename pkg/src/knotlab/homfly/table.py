"""Knot labels, the shipped knot table and polygon identification."""
from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass, field
from functools import total_ordering
from importlib import resources
from pathlib import Path

from . import gauss
from .poly import LaurentPoly2
from .skein import CrossingCapExceeded, homfly_gauss

AMPHICHIRAL = "none"


@total_ordering
@dataclass(frozen=True)
class PrimeFactor:
    name: str  # e.g. "3_1"
    chirality: str = AMPHICHIRAL  # "+", "-" or "none"

    @property
    def crossing_number(self) -> int:
        return int(self.name.split("_")[0])

    @property
    def index(self) -> int:
        return int(self.name.split("_")[1])

    def _key(self):
        return (self.crossing_number, self.index, {"+": 0, "-": 1}.get(self.chirality, 2))

    def __lt__(self, other):
        return self._key() < other._key()

    def mirror(self) -> "PrimeFactor":
        flip = {"+": "-", "-": "+"}.get(self.chirality, self.chirality)
        return PrimeFactor(self.name, flip)

    def __str__(self):
        return ("" if self.chirality == AMPHICHIRAL else self.chirality) + self.name


@dataclass(frozen=True)
class KnotLabel:
    """Knot type as a sorted multiset of prime factors; ``()`` is the unknot."""

    factors: tuple = ()
    unknown: bool = False

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(sorted(self.factors)))
        if self.unknown and self.factors:
            raise ValueError("the unknown label has no factors")

    @classmethod
    def parse(cls, text: str) -> "KnotLabel":
        text = text.strip()
        if text == "unknown":
            return UNKNOWN
        if text in ("0_1", ""):
            return UNKNOT
        out = []
        for part in text.split("#"):
            chir = AMPHICHIRAL
            if part[0] in "+-":
                chir, part = part[0], part[1:]
            c, i = part.split("_")
            if int(c) < 3 or int(i) < 1:
                raise ValueError("bad knot name %r" % part)
            out.append(PrimeFactor("%d_%d" % (int(c), int(i)), chir))
        return cls(tuple(out))

    @property
    def crossing_number(self) -> int:
        return sum(f.crossing_number for f in self.factors)

    @property
    def is_unknot(self) -> bool:
        return not self.factors and not self.unknown

    def mirror(self) -> "KnotLabel":
        if self.unknown:
            return self
        return KnotLabel(tuple(f.mirror() for f in self.factors))

    def __str__(self):
        if self.unknown:
            return "unknown"
        if not self.factors:
            return "0_1"
        return "#".join(str(f) for f in self.factors)

    def __repr__(self):
        return "KnotLabel(%r)" % str(self)

    @property
    def members(self) -> frozenset:
        return frozenset([self])


UNKNOT = KnotLabel(())
UNKNOWN = KnotLabel((), unknown=True)


@dataclass(frozen=True)
class AmbiguousLabel:
    """Several table labels sharing one polynomial; compares as a set."""

    members: frozenset

    def __post_init__(self):
        if len(self.members) < 2:
            raise ValueError("an ambiguous label needs at least two members")

    @property
    def unknown(self) -> bool:
        return False

    @property
    def is_unknot(self) -> bool:
        return False

    def mirror(self) -> "AmbiguousLabel":
        return AmbiguousLabel(frozenset(m.mirror() for m in self.members))

    def __str__(self):
        return "|".join(sorted(str(m) for m in self.members))

    def __repr__(self):
        return "AmbiguousLabel(%r)" % str(self)


def parse_label(text: str):
    """Inverse of ``str`` for :class:`KnotLabel` and :class:`AmbiguousLabel`."""
    parts = text.strip().split("|")
    if len(parts) == 1:
        return KnotLabel.parse(parts[0])
    return AmbiguousLabel(frozenset(KnotLabel.parse(p) for p in parts))


# ------------------------------------------------------------------- table

@dataclass(frozen=True)
class TableEntry:
    label: KnotLabel
    pd_code: tuple
    poly: LaurentPoly2


@dataclass(frozen=True, eq=False)
class KnotTable:
    entries: tuple
    index: dict = field(repr=False)

    @classmethod
    def from_entries(cls, entries) -> "KnotTable":
        entries = tuple(entries)
        names = [str(e.label) for e in entries]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise ValueError("duplicate table names: %s" % ", ".join(dup))
        index: dict = {}
        for e in entries:
            index.setdefault(e.poly, set()).add(e.label)
        return cls(entries, index)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def labels(self) -> list:
        return [e.label for e in self.entries]

    def poly(self, label) -> LaurentPoly2:
        if isinstance(label, str):
            label = KnotLabel.parse(label)
        for e in self.entries:
            if e.label == label:
                return e.poly
        raise KeyError(str(label))

    def lookup(self, poly: LaurentPoly2):
        hits = self.index.get(poly)
        if not hits:
            return UNKNOWN
        if len(hits) == 1:
            return next(iter(hits))
        return AmbiguousLabel(frozenset(hits))

    def label_for(self, label):
        """What :meth:`lookup` returns for a polygon of type ``label``."""
        if isinstance(label, str):
            label = KnotLabel.parse(label)
        return self.lookup(self.poly(label))


TABLE_HEADER = """\
# Knot table: prime knots through 9 crossings (both chiralities), all
# 2-factor connected sums of primes through 7 crossings and 3-factor sums of
# trefoils.  HOMFLYPT convention: a P(L+) - a^-1 P(L-) = z P(L0), P(0_1) = 1.
# Polynomial strings list monomials <c>a^<i>z^<j> sorted by (i, j).
# Chirality "+" marks the version whose pd_code has positive writhe; the
# writhe-zero chiral knot 8_4 takes "+" for the KnotInfo diagram as given.
# pd_code: X[i,j,k,l] counterclockwise from the incoming under-strand.
"""
COLUMNS = ["name", "crossing_number", "chirality", "pd_code", "homfly"]


def _chirality_of(label: KnotLabel) -> str:
    if not label.factors:
        return AMPHICHIRAL
    if len(label.factors) == 1:
        return label.factors[0].chirality
    return "composite"


def connected_sum(words_signs) -> tuple[list, dict]:
    """Gauss code of a connected sum: concatenated one-component codes."""
    word, signs, off = [], {}, 0
    for w, s in words_signs:
        w, s = gauss.relabel([w], s)
        word.extend(p + 2 * off for p in w[0])
        signs.update({x + off: v for x, v in s.items()})
        off += len(s)
    return word, signs


def generate_table(prime_tsv, max_composite_crossings: int = 7):
    """Table rows from the extracted prime PD data (dev-time generator)."""
    primes = {}
    with open(prime_tsv, encoding="utf-8") as fh:
        for rec in csv.DictReader((ln for ln in fh if not ln.startswith("#")), delimiter="\t"):
            word, signs = gauss.from_pd(json.loads(rec["pd_code"]))
            amph = "amphicheiral" in rec["symmetry"]
            w = sum(signs.values())
            versions = {}
            if amph:
                versions[AMPHICHIRAL] = (word, signs)
            else:
                mw, ms = gauss.mirror([word], signs)
                if w >= 0:
                    versions["+"], versions["-"] = (word, signs), (mw[0], ms)
                else:
                    versions["-"], versions["+"] = (word, signs), (mw[0], ms)
            for chir, ws in versions.items():
                primes[PrimeFactor(rec["name"], chir)] = ws
    rows = [(UNKNOT, [], {})]
    for f in sorted(primes):
        rows.append((KnotLabel((f,)),) + tuple(primes[f]))
    small = [f for f in sorted(primes) if f.crossing_number <= max_composite_crossings]
    for pair in itertools.combinations_with_replacement(small, 2):
        rows.append((KnotLabel(pair),) + connected_sum(primes[f] for f in pair))
    trefoils = [f for f in small if f.name == "3_1"]
    for triple in itertools.combinations_with_replacement(trefoils, 3):
        rows.append((KnotLabel(triple),) + connected_sum(primes[f] for f in triple))
    out = []
    for label, word, signs in rows:
        pd = gauss.to_pd(word, signs)
        poly = homfly_gauss([word], signs, cap=None)
        out.append((label, pd, poly))
    return out


def write_table(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(TABLE_HEADER)
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(COLUMNS)
        for label, pd, poly in rows:
            w.writerow([str(label), label.crossing_number, _chirality_of(label),
                        json.dumps(pd, separators=(",", ":")), poly.to_string()])


def build_table(pd_file=None, verify: bool = True) -> KnotTable:
    """Load a table file and recompute every polynomial from its PD code.

    ``verify`` checks the recomputed polynomial against the stored string,
    the writhe sign against the chirality of prime entries and the
    presence of every mirror partner.
    """
    if pd_file is None:
        pd_file = default_table_path()
    entries = []
    with open(pd_file, encoding="utf-8") as fh:
        reader = csv.DictReader((ln for ln in fh if not ln.startswith("#")), delimiter="\t")
        if reader.fieldnames != COLUMNS:
            raise ValueError("table columns must be %s" % COLUMNS)
        for lineno, rec in enumerate(reader, start=2):
            try:
                label = KnotLabel.parse(rec["name"])
                pd = json.loads(rec["pd_code"])
                if int(rec["crossing_number"]) != label.crossing_number:
                    raise ValueError("crossing number mismatch")
                word, signs = gauss.from_pd(pd) if pd else ([], {})
                poly = homfly_gauss([word], signs, cap=None)
            except (ValueError, KeyError, TypeError) as exc:
                raise ValueError("%s: row %d: %s" % (pd_file, lineno, exc)) from exc
            if verify:
                if rec["homfly"] and LaurentPoly2.parse(rec["homfly"]) != poly:
                    raise ValueError("%s: polynomial mismatch for %s" % (pd_file, label))
                if len(label.factors) == 1 and label.factors[0].name != "8_4":
                    w = sum(signs.values())
                    chir = label.factors[0].chirality
                    if (chir == "+" and w <= 0) or (chir == "-" and w >= 0):
                        raise ValueError("writhe %d contradicts chirality of %s" % (w, label))
            entries.append(TableEntry(label, tuple(map(tuple, pd)), poly))
    table = KnotTable.from_entries(entries)
    if verify:
        have = set(table.labels())
        missing = [str(lb) for lb in have if lb.mirror() not in have]
        if missing:
            raise ValueError("mirror partners missing for %s" % ", ".join(sorted(missing)))
    return table


def default_table_path() -> Path:
    return Path(str(resources.files("knotlab") / "data" / "knot_table.tsv"))


_DEFAULT = None


def default_table() -> KnotTable:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = build_table(verify=False)
    return _DEFAULT


# ------------------------------------------------------------ identification

def identify_diagram(diagram, table: KnotTable, cap: int | None = 50):
    comps, signs = diagram.gauss_code()
    try:
        poly = homfly_gauss(comps, signs, cap=cap)
    except CrossingCapExceeded:
        return UNKNOWN
    return table.lookup(poly)


def identify(poly3, table: KnotTable | None = None, rng=None, cap: int | None = 50):
    """Knot type of a closed polygon: simplify, project, HOMFLYPT, look up."""
    from ..diagram import generic_project, kmt_simplify

    table = default_table() if table is None else table
    simple = kmt_simplify(poly3)
    if simple.n <= 5:
        # fewer than six sticks cannot be knotted
        return UNKNOT if UNKNOT in table.index.get(LaurentPoly2(1), ()) else table.lookup(LaurentPoly2(1))
    return identify_diagram(generic_project(simple, rng), table, cap)
