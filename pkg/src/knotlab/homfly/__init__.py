"""HOMFLYPT polynomials, the knot table and knot identification."""
from .poly import LaurentPoly2
from .skein import DEFAULT_CAP, CrossingCapExceeded, SkeinEngine, homfly_gauss, homfly_pd
from .table import (UNKNOT, UNKNOWN, AmbiguousLabel, KnotLabel, KnotTable, PrimeFactor,
                    TableEntry, build_table, default_table, identify, identify_diagram,
                    parse_label)


def poly_mul(p: LaurentPoly2, q: LaurentPoly2) -> LaurentPoly2:
    return p * q


def homfly(diagram, cap: int | None = DEFAULT_CAP) -> LaurentPoly2:
    """HOMFLYPT polynomial of a :class:`~knotlab.diagram.KnotDiagram`."""
    comps, signs = diagram.gauss_code()
    return homfly_gauss(comps, signs, cap=cap)


__all__ = [
    "LaurentPoly2", "poly_mul", "homfly", "homfly_gauss", "homfly_pd", "SkeinEngine",
    "CrossingCapExceeded", "DEFAULT_CAP", "KnotLabel", "AmbiguousLabel", "PrimeFactor",
    "KnotTable", "TableEntry", "UNKNOT", "UNKNOWN", "build_table", "default_table",
    "identify", "identify_diagram", "parse_label",
]
