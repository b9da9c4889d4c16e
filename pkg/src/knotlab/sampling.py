"""Random equilateral polygons, random arcs, and fixed-length closure arcs.

Closed polygons are drawn with action-angle coordinates: fan diagonals from
vertex 0 are uniform on the moment polytope and the dihedral angles about the
diagonals are independent and uniform on the circle.  A polygon with one edge
of length ``ell`` and ``m`` unit edges is the same construction with a
non-unit edge 0; cutting that edge out leaves a uniformly random ``m``-edge arc
conditioned on end-to-end distance ``ell``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geometry import GeometryError, OpenArc, Polygon3, end_to_end, rotation_matrix

BOUNDARY_TOL = 1e-12
MAX_PROPOSALS = 5_000_000


class EmptyPolytope(GeometryError):
    pass


class InfeasibleClosure(GeometryError):
    pass


@dataclass(frozen=True)
class ActionAngleCoords:
    diagonals: np.ndarray
    dihedrals: np.ndarray


class MomentPolytope:
    """Fan-diagonal polytope of polygons with the given edge lengths.

    Coordinates are the ``n - 3`` diagonals ``d_1..d_{n-3}``, with ``d_0 = e_0``
    and ``d_{n-2} = e_{n-1}`` fixed.  Triangle ``i`` has sides
    ``(d_{i-1}, e_i, d_i)``.
    """

    def __init__(self, edge_lengths):
        e = np.asarray(edge_lengths, dtype=np.float64)
        if e.ndim != 1 or len(e) < 3 or np.any(e <= 0):
            raise GeometryError("need at least three positive edge lengths")
        self.edge_lengths = e
        self.n = len(e)
        self.dim = self.n - 3
        total = e.sum()
        self.empty = bool(np.max(e) > total - np.max(e) + BOUNDARY_TOL)

    def fan(self, diagonals) -> np.ndarray:
        e = self.edge_lengths
        return np.concatenate(([e[0]], np.asarray(diagonals, dtype=np.float64), [e[-1]]))

    def contains(self, diagonals, tol: float = BOUNDARY_TOL) -> bool:
        d = self.fan(diagonals)
        if len(d) != self.n - 1:
            return False
        mid = self.edge_lengths[1:-1]
        steps = np.abs(np.diff(d))
        sums = d[1:] + d[:-1]
        return bool(np.all(steps <= mid + tol) and np.all(sums >= mid - tol))


def _cube_acceptance(widths, target):
    r = len(widths)
    if r == 1:
        return 1.0 if abs(target) <= widths[0] else 0.0
    sigma = math.sqrt(float(np.sum(widths[:-1] ** 2)) / 3.0)
    dens = math.exp(-0.5 * (target / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    return min(1.0, 2 * widths[-1] * dens)


def _simplex_acceptance(widths, total):
    r = len(widths)
    if total <= 0:
        return 0.0
    p = 1.0
    for w in widths:
        if 2 * w < total:
            p *= 1.0 - (1.0 - 2 * w / total) ** (r - 1)
    return p


def _propose(rng, widths, target, mode, batch):
    """Uniform points on ``{s : |s_i| <= w_i, sum(s) = target}`` (before clipping)."""
    r = len(widths)
    if mode == "cube":
        free = rng.uniform(-1.0, 1.0, size=(batch, r - 1)) * widths[:-1]
        last = target - free.sum(axis=1)
        s = np.concatenate([free, last[:, None]], axis=1)
    else:
        sign = 1.0 if mode == "low" else -1.0
        total = sign * target + widths.sum()
        t = rng.dirichlet(np.ones(r), size=batch) * total
        s = sign * (t - widths)
    ok = np.all(np.abs(s) <= widths + BOUNDARY_TOL, axis=1)
    return s[ok]


def _hit_and_run(pt: MomentPolytope, rng, count: int = 1) -> np.ndarray:
    """Fallback sampler for polytopes too thin for rejection."""
    from scipy.optimize import linprog

    e = pt.edge_lengths
    m = pt.dim
    # rows of A d <= b in diagonal coordinates
    rows, rhs = [], []
    for i in range(1, pt.n - 1):
        for sgn in (1.0, -1.0):
            row = np.zeros(m + 2)
            row[i] += sgn
            row[i - 1] -= sgn
            rows.append(row)
            rhs.append(e[i])
        row = np.zeros(m + 2)
        row[i] -= 1.0
        row[i - 1] -= 1.0
        rows.append(row)
        rhs.append(-e[i])
    full = np.array(rows)
    b = np.array(rhs) - full[:, 0] * e[0] - full[:, -1] * e[-1]
    A = full[:, 1:-1]
    norms = np.linalg.norm(A, axis=1)
    res = linprog(np.r_[np.zeros(m), -1.0], A_ub=np.c_[A, norms], b_ub=b,
                  bounds=[(None, None)] * m + [(0, None)], method="highs")
    if not res.success or res.x[-1] <= 0:
        raise EmptyPolytope("moment polytope has empty interior")
    x = res.x[:m]
    burn, thin = 10 * max(m, 1), max(m, 1)
    out = []
    steps = burn + thin * count
    for it in range(steps):
        u = rng.standard_normal(m)
        u /= np.linalg.norm(u)
        au = A @ u
        slack = b - A @ x
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = slack / au
        hi = np.min(ratio[au > 0]) if np.any(au > 0) else np.inf
        lo = np.max(ratio[au < 0]) if np.any(au < 0) else -np.inf
        x = x + rng.uniform(lo, hi) * u
        if it >= burn and (it - burn) % thin == thin - 1:
            out.append(x.copy())
    return np.array(out)


def sample_polytope_uniform(pt: MomentPolytope, rng) -> np.ndarray:
    """Uniform (Lebesgue) point of the moment polytope, as its diagonals.

    Exact rejection sampling in step coordinates ``s_i = d_i - d_{i-1}``:
    proposals are uniform on the slice of the step box with the right sum,
    drawn either from the box directly or from one of its two corner
    simplices (whichever accepts most), then filtered by the remaining
    triangle inequalities ``d_{i-1} + d_i >= e_i``.
    """
    if pt.empty:
        raise EmptyPolytope("edge lengths %s violate the polygon inequality" % (pt.edge_lengths,))
    e = pt.edge_lengths
    widths = e[1:-1]
    target = e[-1] - e[0]
    if pt.dim == 0:
        return np.zeros(0)
    est = {
        "cube": _cube_acceptance(widths, target),
        "low": _simplex_acceptance(widths, target + widths.sum()),
        "high": _simplex_acceptance(widths, widths.sum() - target),
    }
    mode = max(est, key=est.get)
    batch = int(min(4096, max(16, 2.0 / max(est[mode], 1e-9))))
    tried = 0
    while tried < MAX_PROPOSALS:
        s = _propose(rng, widths, target, mode, batch)
        tried += batch
        if len(s) == 0:
            continue
        d = e[0] + np.cumsum(s, axis=1)
        prev = np.concatenate([np.full((len(d), 1), e[0]), d[:, :-1]], axis=1)
        good = np.all(d + prev >= widths - BOUNDARY_TOL, axis=1) & np.all(d >= -BOUNDARY_TOL, axis=1)
        idx = np.flatnonzero(good)
        if len(idx):
            return d[idx[0], :-1].copy()
    return _hit_and_run(pt, rng)[0]


def polygon_from_action_angle(coords: ActionAngleCoords, edge_lengths) -> Polygon3:
    """Closed polygon with the given fan diagonals and dihedral angles."""
    pt = MomentPolytope(edge_lengths)
    diag = np.asarray(coords.diagonals, dtype=np.float64)
    ang = np.asarray(coords.dihedrals, dtype=np.float64)
    if len(diag) != pt.dim or len(ang) != pt.dim:
        raise GeometryError("expected %d diagonals and dihedrals" % pt.dim)
    if not pt.contains(diag):
        raise GeometryError("diagonals violate the moment polytope inequalities")
    verts = _kernels.fan_polygon(pt.fan(diag), ang, pt.edge_lengths)
    return Polygon3(verts, pt.edge_lengths)


def action_angle_of(poly: Polygon3) -> ActionAngleCoords:
    """Measure fan diagonals and dihedral angles (inverse of the construction)."""
    v = poly.vertices - poly.vertices[0]
    n = len(v)
    diag = np.linalg.norm(v[2:n - 1], axis=1)
    normals = np.cross(v[1:n - 1], v[2:n])
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    ang = np.empty(n - 3)
    for i in range(n - 3):
        axis = v[i + 2] / np.linalg.norm(v[i + 2])
        a, b = normals[i], normals[i + 1]
        ang[i] = math.atan2(float(np.dot(np.cross(a, b), axis)), float(np.dot(a, b))) % (2 * math.pi)
    return ActionAngleCoords(diag, ang)


def _sample_polygon(edge_lengths, rng) -> Polygon3:
    pt = MomentPolytope(edge_lengths)
    diag = sample_polytope_uniform(pt, rng)
    ang = rng.uniform(0.0, 2 * math.pi, size=pt.dim)
    verts = _kernels.fan_polygon(pt.fan(diag), ang, pt.edge_lengths)
    return Polygon3(verts, pt.edge_lengths)


def sample_closed_equilateral(n: int, rng) -> Polygon3:
    """Uniformly random closed equilateral ``n``-gon."""
    if n < 3:
        raise ValueError("n must be at least 3")
    return _sample_polygon(np.ones(n), rng)


def sample_open_arc(k: int, rng) -> OpenArc:
    """Random walk of ``k`` unit steps with uniform directions, from the origin."""
    if k < 1:
        raise ValueError("k must be at least 1")
    steps = rng.standard_normal((k, 3))
    steps /= np.linalg.norm(steps, axis=1, keepdims=True)
    return OpenArc(np.vstack([np.zeros(3), np.cumsum(steps, axis=0)]))


def sample_closure_arc(m: int, ell: float, rng) -> OpenArc:
    """Random ``m``-edge unit arc conditioned on end-to-end distance ``ell``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    ell = float(ell)
    if ell < 0 or ell > m + 1e-9:
        raise InfeasibleClosure("no %d-edge arc spans distance %g" % (m, ell))
    if m == 1:
        if abs(ell - 1.0) > 1e-9:
            raise InfeasibleClosure("a single edge spans exactly 1, not %g" % ell)
        return OpenArc([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    ell = min(ell, float(m))
    if ell < BOUNDARY_TOL:
        if m < 3:
            raise InfeasibleClosure("a closed %d-edge loop would be degenerate" % m)
        poly = sample_closed_equilateral(m, rng)
        return OpenArc(np.vstack([poly.vertices, poly.vertices[:1]]))
    lengths = np.ones(m + 1)
    lengths[0] = ell
    if ell > m - BOUNDARY_TOL:
        # fully stretched: the straight arc is the only configuration
        return OpenArc(np.outer(np.arange(m + 1), [1.0, 0.0, 0.0]))
    poly = _sample_polygon(lengths, rng)
    v = poly.vertices
    return OpenArc(np.vstack([v[1:], v[:1]]))


def _align(u, v) -> np.ndarray:
    """Rotation matrix taking unit vector ``u`` to unit vector ``v``."""
    axis = np.cross(u, v)
    s = np.linalg.norm(axis)
    c = float(np.dot(u, v))
    if s < 1e-14:
        if c > 0:
            return np.eye(3)
        perp = np.cross(u, [1.0, 0.0, 0.0])
        if np.linalg.norm(perp) < 1e-6:
            perp = np.cross(u, [0.0, 1.0, 0.0])
        return rotation_matrix(perp, math.pi)
    return rotation_matrix(axis / s, math.atan2(s, c))


def place_closure(a: OpenArc, b: OpenArc, angle: float) -> Polygon3:
    """Closed polygon ``a`` followed by ``b`` run from ``a``'s last vertex back to its first.

    ``b`` is moved rigidly so its endpoints land on ``a``'s, then turned by
    ``angle`` about the line through them.
    """
    ell_a, ell_b = end_to_end(a), end_to_end(b)
    if abs(ell_a - ell_b) > 1e-6:
        raise GeometryError("end-to-end distances differ: %g vs %g" % (ell_a, ell_b))
    if a.k + b.k < 3:
        raise GeometryError("closure would be a doubled edge")
    if ell_a < 1e-12:
        raise GeometryError("arc is closed; nothing to glue")
    av, bv = a.vertices, b.vertices
    start, finish = av[-1], av[0]
    axis = (finish - start) / ell_a
    bdir = (bv[-1] - bv[0]) / ell_b
    rot = rotation_matrix(axis, angle) @ _align(bdir, axis)
    inner = (bv[1:-1] - bv[0]) @ rot.T + start
    verts = np.vstack([av, inner])
    return Polygon3(verts, np.ones(len(verts)))


def glue_closure(a: OpenArc, b: OpenArc, rng) -> Polygon3:
    """Close ``a`` with ``b`` at a uniformly random rotation about the end-to-end axis."""
    return place_closure(a, b, rng.uniform(0.0, 2 * math.pi))
