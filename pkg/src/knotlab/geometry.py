"""Vector and polygon primitives shared by the rest of the package.

Points are plain ``float64`` numpy arrays of shape ``(3,)``; point sets are
``(m, 3)`` arrays.  ``OpenArc`` and ``Polygon3`` wrap read-only vertex arrays
and validate edge lengths on construction.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

EDGE_RTOL = 1e-9


class GeometryError(ValueError):
    """Raised when a geometric object violates its invariants."""


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def _edge_lengths(verts: np.ndarray, cyclic: bool) -> np.ndarray:
    if cyclic:
        diff = np.roll(verts, -1, axis=0) - verts
    else:
        diff = np.diff(verts, axis=0)
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


@dataclass(frozen=True, eq=False)
class OpenArc:
    """Open chain of ``k`` unit edges (``k + 1`` vertices)."""

    vertices: np.ndarray

    def __post_init__(self):
        v = _frozen(self.vertices)
        if v.ndim != 2 or v.shape[1] != 3 or len(v) < 2:
            raise GeometryError("an arc needs at least two 3D vertices")
        if not np.all(np.isfinite(v)):
            raise GeometryError("non-finite coordinates")
        lengths = _edge_lengths(v, cyclic=False)
        if np.max(np.abs(lengths - 1.0)) > EDGE_RTOL:
            raise GeometryError("arc edges must have unit length")
        object.__setattr__(self, "vertices", v)

    @property
    def k(self) -> int:
        return len(self.vertices) - 1

    def __len__(self):
        return self.k


@dataclass(frozen=True, eq=False)
class Polygon3:
    """Closed polygon; vertex ``i`` joins vertex ``i + 1`` cyclically.

    ``edge_lengths`` defaults to the measured lengths; pass it explicitly
    (e.g. all ones) to have the vertices checked against it.
    """

    vertices: np.ndarray
    edge_lengths: np.ndarray | None = field(default=None)

    def __post_init__(self):
        v = _frozen(self.vertices)
        if v.ndim != 2 or v.shape[1] != 3 or len(v) < 3:
            raise GeometryError("a polygon needs at least three 3D vertices")
        if not np.all(np.isfinite(v)):
            raise GeometryError("non-finite coordinates")
        measured = _edge_lengths(v, cyclic=True)
        if self.edge_lengths is None:
            lengths = measured
        else:
            lengths = np.asarray(self.edge_lengths, dtype=np.float64)
            if lengths.shape != (len(v),):
                raise GeometryError("edge_lengths must have one entry per vertex")
            if np.any(np.abs(measured - lengths) > EDGE_RTOL * np.maximum(lengths, 1.0)):
                raise GeometryError("vertices do not match the requested edge lengths")
        if np.any(lengths <= 0):
            raise GeometryError("zero-length edge")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "edge_lengths", _frozen(lengths))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def __len__(self):
        return self.n

    @classmethod
    def equilateral(cls, vertices) -> "Polygon3":
        return cls(vertices, np.ones(len(vertices)))

    def mirrored(self, axis: int = 0) -> "Polygon3":
        v = np.array(self.vertices)
        v[:, axis] = -v[:, axis]
        return Polygon3(v, self.edge_lengths)


class RngStream(np.random.Generator):
    """Reproducible random stream keyed by ``(seed, stream_id)``.

    Backed by the counter-based Philox4x64 bit generator, keyed through
    ``numpy.random.SeedSequence(seed, spawn_key=stream_id)``.  ``stream_id``
    may be an int or a tuple of ints; :meth:`child` extends the tuple, so any
    task in a campaign gets its own stream from its key alone, independent of
    scheduling.
    """

    def __init__(self, seed: int, stream_id: int | Sequence[int] = 0):
        key = (int(stream_id),) if np.isscalar(stream_id) else tuple(int(s) for s in stream_id)
        self.seed = int(seed)
        self.stream_id = key
        ss = np.random.SeedSequence(self.seed, spawn_key=key)
        super().__init__(np.random.Philox(ss))

    def child(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id + tuple(int(k) for k in key))

    def __reduce__(self):
        # only the key is pickled; the child restarts at the head of its stream
        return (RngStream, (self.seed, self.stream_id))


def as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return RngStream(0 if rng is None else int(rng))


def end_to_end(arc: OpenArc) -> float:
    """Distance between the first and last vertex of ``arc``."""
    v = arc.vertices
    return float(np.linalg.norm(v[-1] - v[0]))


def _unit_check(w, tol=1e-12) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if abs(np.linalg.norm(w) - 1.0) > tol:
        raise GeometryError("direction must be a unit vector")
    return w


def support_height(points, w) -> float:
    """Height of the supporting plane of ``points`` with outward normal ``w``."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if len(pts) == 0:
        raise GeometryError("support_height of an empty point set")
    w = _unit_check(w)
    return float(np.max(pts @ w))


def rotation_matrix(axis_dir, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix about a unit axis through the origin."""
    u = np.asarray(axis_dir, dtype=np.float64)
    norm = np.linalg.norm(u)
    if norm == 0:
        raise GeometryError("zero rotation axis")
    u = u / norm
    c, s = np.cos(angle), np.sin(angle)
    ux = np.array([[0, -u[2], u[1]], [u[2], 0, -u[0]], [-u[1], u[0], 0]])
    return c * np.eye(3) + s * ux + (1 - c) * np.outer(u, u)


def rotate_about_axis(points, axis_point, axis_dir, angle: float) -> np.ndarray:
    """Rotate ``points`` by ``angle`` about the line through ``axis_point`` along ``axis_dir``."""
    pts = np.asarray(points, dtype=np.float64)
    c = np.asarray(axis_point, dtype=np.float64)
    r = rotation_matrix(axis_dir, angle)
    return (pts - c) @ r.T + c


def random_unit_vectors(rng: np.random.Generator, size: int) -> np.ndarray:
    v = rng.standard_normal((size, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# ---------------------------------------------------------------- NDJSON I/O

def _fmt_vertices(v: np.ndarray) -> str:
    return "[" + ",".join("[%.17g,%.17g,%.17g]" % tuple(p) for p in v) + "]"


def to_record(obj: OpenArc | Polygon3, **extra) -> str:
    """One NDJSON line for a polygon or arc; ``extra`` keys are appended."""
    kind = "arc" if isinstance(obj, OpenArc) else "polygon"
    parts = ['"kind":"%s"' % kind, '"vertices":' + _fmt_vertices(obj.vertices)]
    for key, val in extra.items():
        parts.append("%s:%s" % (json.dumps(key), json.dumps(val)))
    return "{" + ",".join(parts) + "}"


def from_record(line: str | dict) -> tuple[OpenArc | Polygon3, dict]:
    rec = json.loads(line) if isinstance(line, str) else dict(line)
    kind = rec.pop("kind")
    verts = np.array(rec.pop("vertices"), dtype=np.float64)
    if kind == "arc":
        return OpenArc(verts), rec
    if kind == "polygon":
        return Polygon3(verts), rec
    raise GeometryError("unknown record kind %r" % kind)


def write_ndjson(path, objs: Iterable[OpenArc | Polygon3 | tuple]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            if isinstance(obj, tuple):
                obj, extra = obj
            else:
                extra = {}
            fh.write(to_record(obj, **extra) + "\n")


def read_ndjson(path) -> Iterator[tuple[OpenArc | Polygon3, dict]]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield from_record(line)
