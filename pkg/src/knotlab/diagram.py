"""Plane projections of closed polygons and triangle-elimination simplification.

Projection along a unit vector ``d`` uses the right-handed frame
``(e1, e2, d)``: the viewer sits at ``+d`` and the strand with the larger
height ``v . d`` passes over.  A crossing is positive when the cross product
(over direction) x (under direction) of the projected edges is positive.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .geometry import GeometryError, Polygon3, as_rng, random_unit_vectors

GENERIC_TOL = 1e-9
MAX_ATTEMPTS = 1000


class ProjectionError(RuntimeError):
    """No generic projection direction was found."""


@dataclass(frozen=True)
class Crossing:
    over_edge: int
    under_edge: int
    over_param: float
    under_param: float
    sign: int

    def __post_init__(self):
        if self.over_edge == self.under_edge:
            raise GeometryError("a crossing needs two distinct edges")
        if not (0 < self.over_param < 1 and 0 < self.under_param < 1):
            raise GeometryError("crossing parameters must be interior")
        if self.sign not in (1, -1):
            raise GeometryError("sign must be +1 or -1")


@dataclass(frozen=True)
class Degenerate:
    """Returned by :func:`project` for a non-generic direction."""

    direction: tuple
    reason: str = "degenerate projection"

    def __bool__(self):
        return False


@dataclass(frozen=True, eq=False)
class KnotDiagram:
    """Crossings of a generic projection, listed in order of first visit."""

    n_edges: int
    crossings: tuple
    projection_dir: tuple
    attempts: int = field(default=1, compare=False)

    def __len__(self):
        return len(self.crossings)

    def passes(self) -> list[tuple[int, bool]]:
        """Traversal order as ``(crossing index, is_over)`` pairs."""
        events = []
        for idx, c in enumerate(self.crossings):
            events.append((c.over_edge + c.over_param, idx, True))
            events.append((c.under_edge + c.under_param, idx, False))
        events.sort()
        return [(idx, over) for _, idx, over in events]

    def gauss_code(self) -> tuple[list, dict]:
        """One-component signed Gauss code (see :mod:`knotlab.homfly.gauss`)."""
        word = [2 * idx + int(over) for idx, over in self.passes()]
        signs = {idx: c.sign for idx, c in enumerate(self.crossings)}
        return [word], signs

    def to_json(self) -> str:
        return json.dumps({
            "n_edges": self.n_edges,
            "projection_dir": list(self.projection_dir),
            "attempts": self.attempts,
            "writhe": writhe(self),
            "crossings": [
                {"over_edge": c.over_edge, "under_edge": c.under_edge,
                 "over_param": c.over_param, "under_param": c.under_param,
                 "sign": c.sign}
                for c in self.crossings
            ],
        }, indent=1)


def _frame(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ref = np.zeros(3)
    ref[np.argmin(np.abs(d))] = 1.0
    e1 = np.cross(d, ref)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    return e1, e2


def project(poly: Polygon3, direction) -> KnotDiagram | Degenerate:
    d = np.asarray(direction, dtype=np.float64)
    d = d / np.linalg.norm(d)
    e1, e2 = _frame(d)
    v = np.asarray(poly.vertices)
    xy = np.ascontiguousarray(np.column_stack([v @ e1, v @ e2]))
    h = np.ascontiguousarray(v @ d)
    rows, status = _kernels.find_crossings(xy, h, GENERIC_TOL)
    if status:
        return Degenerate(tuple(d))
    n = len(v)
    found = []
    for i, j, s, t, hi, hj, _, _ in rows:
        i, j = int(i), int(j)
        ri = xy[(i + 1) % n] - xy[i]
        rj = xy[(j + 1) % n] - xy[j]
        if hi > hj:
            oe, ue, op, up, ro, ru = i, j, s, t, ri, rj
        else:
            oe, ue, op, up, ro, ru = j, i, t, s, rj, ri
        sign = 1 if ro[0] * ru[1] - ro[1] * ru[0] > 0 else -1
        first = min(oe + op, ue + up)
        found.append((first, Crossing(oe, ue, float(op), float(up), sign)))
    found.sort(key=lambda fc: fc[0])
    return KnotDiagram(n, tuple(c for _, c in found), tuple(float(x) for x in d))


def generic_project(poly: Polygon3, rng=None, max_attempts: int = MAX_ATTEMPTS) -> KnotDiagram:
    """Project along fresh uniform random directions until one is generic."""
    rng = as_rng(rng)
    for attempt in range(1, max_attempts + 1):
        d = random_unit_vectors(rng, 1)[0]
        res = project(poly, d)
        if not isinstance(res, Degenerate):
            return KnotDiagram(res.n_edges, res.crossings, res.projection_dir, attempt)
    raise ProjectionError("no generic direction in %d attempts" % max_attempts)


def kmt_simplify(poly: Polygon3, eps: float = 1e-12) -> Polygon3:
    """Triangle elimination: drop vertices whose triangle no other edge meets.

    Sweeps start at index 0 and repeat until a full sweep removes nothing.
    Triangles are closed, so touching counts as blocking.
    """
    v = np.ascontiguousarray(poly.vertices, dtype=np.float64)
    if len(v) <= 3:
        return poly
    keep = _kernels.kmt_reduce(v, eps)
    if len(keep) == len(v):
        return poly
    return Polygon3(v[keep])


def writhe(d: KnotDiagram) -> int:
    return int(sum(c.sign for c in d.crossings))
