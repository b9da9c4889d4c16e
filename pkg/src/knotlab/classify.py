"""Open-arc classifiers SU, PU, SR and PR.

SU and PU close the arc by parallel rays in directions from a fixed,
evenly spread set; SR and PR close it with random equilateral arcs so the
result is a uniform random n-gon containing the arc.  The plural versions
return the most common knot type among their closures.
"""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import SphericalVoronoi

from .geometry import (GeometryError, OpenArc, Polygon3, RngStream, end_to_end,
                       rotation_matrix, support_height)
from .homfly import KnotTable, default_table, identify
from .sampling import glue_closure, sample_closure_arc

METHODS = ("su", "pu", "sr", "pr")
N_DIRECTIONS = 100
PARALLEL_TOL = 1e-9
PERTURB_ANGLE = 1e-6
PERTURB_TRIES = 5
CLOSED_TOL = 1e-9

log = logging.getLogger(__name__)


class DegenerateDirection(GeometryError):
    """Ray direction parallel to an end edge of the arc."""


@dataclass(frozen=True, eq=False)
class DirectionSet:
    dirs: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        d = np.array(self.dirs, dtype=np.float64)
        w = np.array(self.weights, dtype=np.float64)
        if d.ndim != 2 or d.shape[1] != 3 or len(w) != len(d):
            raise ValueError("need one weight per 3D direction")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        d.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "dirs", d)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.dirs)

    @classmethod
    def from_points(cls, points) -> "DirectionSet":
        """Unit vectors weighted by their relative spherical Voronoi cell areas."""
        pts = np.asarray(points, dtype=np.float64)
        pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
        sv = SphericalVoronoi(pts, radius=1.0, center=np.zeros(3))
        areas = sv.calculate_areas()
        w = areas / areas.sum()
        return cls(pts, w / w.sum())

    def rotated(self, rot: np.ndarray) -> "DirectionSet":
        return DirectionSet(self.dirs @ np.asarray(rot).T, self.weights)


def fibonacci_sphere(n: int) -> np.ndarray:
    """Spherical Fibonacci lattice: ``n`` nearly evenly spaced unit vectors."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(1.0 - z * z)
    phi = math.pi * (3.0 - math.sqrt(5.0)) * np.arange(n)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


_DS = None


def build_direction_set(n: int = N_DIRECTIONS) -> DirectionSet:
    global _DS
    if n != N_DIRECTIONS:
        return DirectionSet.from_points(fibonacci_sphere(n))
    if _DS is None:
        _DS = DirectionSet.from_points(fibonacci_sphere(n))
    return _DS


@dataclass(frozen=True)
class KnotDistribution:
    weights: dict
    provenance: str  # "ray-closure" or "random-closure"
    count: int

    def __post_init__(self):
        total = sum(self.weights.values())
        if self.weights and (abs(total - 1.0) > 1e-9 or min(self.weights.values()) < 0):
            raise ValueError("weights must be a probability distribution")

    def top(self) -> float:
        return max(self.weights.values())

    def argmax(self) -> list:
        best = self.top()
        return sorted((lb for lb, w in self.weights.items() if w >= best - 1e-12), key=str)


@dataclass(frozen=True)
class Prediction:
    label: object
    distribution: KnotDistribution = field(repr=False)
    tie_broken: bool = False

    @property
    def top_weight(self) -> float:
        return self.distribution.weights[self.label]


def as_stream(rng) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, np.random.Generator):
        return RngStream(int(rng.integers(2 ** 63)))
    return RngStream(0 if rng is None else int(rng))


def _decide(weights: dict, provenance: str, count: int, rng) -> Prediction:
    total = sum(weights.values())
    dist = KnotDistribution({k: v / total for k, v in weights.items()}, provenance, count)
    best = dist.argmax()
    if len(best) == 1:
        return Prediction(best[0], dist, False)
    return Prediction(best[int(rng.integers(len(best)))], dist, True)


def _closed_polygon(a: OpenArc) -> Polygon3 | None:
    """The polygon itself when ``a`` is a whole closed polygon (k = n)."""
    if a.k >= 3 and end_to_end(a) < CLOSED_TOL:
        return Polygon3(a.vertices[:-1])
    return None


def _whole(a, table, rng, provenance):
    poly = _closed_polygon(a)
    if poly is None:
        return None
    label = identify(poly, table, rng.child(9))
    return Prediction(label, KnotDistribution({label: 1.0}, provenance, 1), False)


def ray_closure(a: OpenArc, w, margin: float = 1.0) -> Polygon3:
    """Close ``a`` by rays along ``w`` from both ends, joined above its hull."""
    w = np.asarray(w, dtype=np.float64)
    v = a.vertices
    for e in (v[1] - v[0], v[-1] - v[-2]):
        if np.linalg.norm(np.cross(e, w)) <= PARALLEL_TOL * np.linalg.norm(e):
            raise DegenerateDirection("ray direction parallel to an end edge")
    h = support_height(v, w) + margin
    p0, p1 = v[0], v[-1]
    q0 = p0 + (h - p0 @ w) * w
    q1 = p1 + (h - p1 @ w) * w
    if np.linalg.norm(q1 - q0) <= PARALLEL_TOL:
        raise DegenerateDirection("rays coincide")
    try:
        return Polygon3(np.vstack([v, q1, q0]))
    except GeometryError as exc:
        raise DegenerateDirection(str(exc)) from exc


def _ray_label(a, w, table, rng):
    """Label of the ray closure along ``w``, perturbing degenerate directions.

    Returns ``None`` when every perturbation is degenerate too.
    """
    d = np.asarray(w, dtype=np.float64)
    for attempt in range(PERTURB_TRIES + 1):
        try:
            poly = ray_closure(a, d)
        except DegenerateDirection:
            axis = rng.standard_normal(3)
            d = rotation_matrix(axis, PERTURB_ANGLE) @ np.asarray(w, dtype=np.float64)
            continue
        return identify(poly, table, rng)
    log.warning("dropping degenerate direction %s after %d perturbations", tuple(w), PERTURB_TRIES)
    return None


def classify_SU(a: OpenArc, ds: DirectionSet | None = None, table: KnotTable | None = None,
                rng=None) -> Prediction:
    """Knot type of one ray closure, direction drawn uniformly from ``ds``."""
    ds = build_direction_set() if ds is None else ds
    table = default_table() if table is None else table
    rng = as_stream(rng)
    done = _whole(a, table, rng, "ray-closure")
    if done is not None:
        return done
    order = rng.child(0).permutation(len(ds))
    for t, idx in enumerate(order):
        label = _ray_label(a, ds.dirs[idx], table, rng.child(1, t))
        if label is not None:
            return Prediction(label, KnotDistribution({label: 1.0}, "ray-closure", 1), False)
    raise DegenerateDirection("every direction is degenerate")


def pu_distribution(a: OpenArc, ds: DirectionSet, table: KnotTable, rng) -> KnotDistribution:
    weights: dict = {}
    used = 0
    for i, (w, wt) in enumerate(zip(ds.dirs, ds.weights)):
        label = _ray_label(a, w, table, rng.child(1, i))
        if label is None:
            continue
        used += 1
        weights[label] = weights.get(label, 0.0) + float(wt)
    if not used:
        raise DegenerateDirection("every direction is degenerate")
    total = sum(weights.values())
    return KnotDistribution({k: v / total for k, v in weights.items()}, "ray-closure", used)


def classify_PU(a: OpenArc, ds: DirectionSet | None = None, table: KnotTable | None = None,
                rng=None) -> Prediction:
    """Voronoi-weighted most common ray-closure type over all of ``ds``."""
    ds = build_direction_set() if ds is None else ds
    table = default_table() if table is None else table
    rng = as_stream(rng)
    done = _whole(a, table, rng, "ray-closure")
    if done is not None:
        return done
    dist = pu_distribution(a, ds, table, rng)
    return _decide(dist.weights, "ray-closure", dist.count, rng.child(0))


def random_closure(a: OpenArc, n: int, rng) -> Polygon3:
    """Uniform random closed equilateral ``n``-gon containing ``a``."""
    if n <= a.k:
        raise ValueError("n must exceed the arc length k=%d" % a.k)
    b = sample_closure_arc(n - a.k, end_to_end(a), rng)
    return glue_closure(a, b, rng)


def classify_SR(a: OpenArc, n: int = 100, table: KnotTable | None = None, rng=None) -> Prediction:
    """Knot type of one random closure to an ``n``-gon."""
    table = default_table() if table is None else table
    rng = as_stream(rng)
    done = _whole(a, table, rng, "random-closure")
    if done is not None:
        return done
    label = identify(random_closure(a, n, rng.child(2, 0)), table, rng.child(1, 0))
    return Prediction(label, KnotDistribution({label: 1.0}, "random-closure", 1), False)


def pr_counts(a: OpenArc, n: int, table: KnotTable, rng, closures: int = 100) -> Counter:
    counts: Counter = Counter()
    for i in range(closures):
        poly = random_closure(a, n, rng.child(2, i))
        counts[identify(poly, table, rng.child(1, i))] += 1
    return counts


def classify_PR(a: OpenArc, n: int = 100, table: KnotTable | None = None, rng=None,
                closures: int = 100) -> Prediction:
    """Most common knot type among ``closures`` random closures."""
    table = default_table() if table is None else table
    rng = as_stream(rng)
    done = _whole(a, table, rng, "random-closure")
    if done is not None:
        return done
    counts = pr_counts(a, n, table, rng, closures)
    return _decide(dict(counts), "random-closure", closures, rng.child(0))


def classify(method: str, a: OpenArc, n: int = 100, table: KnotTable | None = None, rng=None,
             ds: DirectionSet | None = None, closures: int = 100) -> Prediction:
    method = method.lower()
    if method == "su":
        return classify_SU(a, ds, table, rng)
    if method == "pu":
        return classify_PU(a, ds, table, rng)
    if method == "sr":
        return classify_SR(a, n, table, rng)
    if method == "pr":
        return classify_PR(a, n, table, rng, closures)
    raise ValueError("unknown method %r (expected one of %s)" % (method, ", ".join(METHODS)))
