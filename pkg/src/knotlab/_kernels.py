"""Compiled inner loops (numba).  Callers validate inputs."""
import numpy as np
from numba import njit

_EPS = 1e-12


@njit(cache=True)
def _cross(a, b):
    return np.array([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


@njit(cache=True)
def fan_polygon(fan, angles, edges):
    """Vertices of the polygon with fan lengths ``fan`` and dihedrals ``angles``.

    ``fan[i] = |v_{i+1} - v_0|`` for ``i = 0..n-2`` (so ``fan[0]`` is edge 0
    and ``fan[n-2]`` is edge ``n-1``); ``edges[i] = |v_{i+1} - v_i|``.
    """
    n = len(edges)
    vt = np.zeros((n, 3))
    vt[1, 0] = fan[0]
    normal = np.array([0.0, 0.0, 1.0])
    for i in range(1, n - 1):
        d0 = fan[i - 1]
        d1 = fan[i]
        e = edges[i]
        c = (d0 * d0 + d1 * d1 - e * e) / (2.0 * d0 * d1)
        if c > 1.0:
            c = 1.0
        elif c < -1.0:
            c = -1.0
        s = np.sqrt(1.0 - c * c)
        f1 = vt[i] / np.sqrt(np.sum(vt[i] * vt[i]))
        f2 = _cross(normal, f1)
        f2 = f2 / np.sqrt(np.sum(f2 * f2))
        vt[i + 1] = d1 * (c * f1 + s * f2)
        if i < n - 2:
            axis = vt[i + 1] / d1
            t = angles[i - 1]
            normal = np.cos(t) * normal + np.sin(t) * _cross(axis, normal)
            normal = normal / np.sqrt(np.sum(normal * normal))
    return vt


@njit(cache=True)
def _seg_tri_2d(a, b, p, q, r, eps):
    # closed triangle (p, q, r) against closed segment ab, all in the plane
    def orient(u, v, w):
        return (v[0] - u[0]) * (w[1] - u[1]) - (v[1] - u[1]) * (w[0] - u[0])

    area = orient(p, q, r)
    sgn = 1.0 if area > 0 else -1.0
    for pt in (a, b):
        o1 = sgn * orient(p, q, pt)
        o2 = sgn * orient(q, r, pt)
        o3 = sgn * orient(r, p, pt)
        if o1 >= -eps and o2 >= -eps and o3 >= -eps:
            return True
    tri = (p, q, r)
    for k in range(3):
        c = tri[k]
        d = tri[(k + 1) % 3]
        o1 = orient(a, b, c)
        o2 = orient(a, b, d)
        o3 = orient(c, d, a)
        o4 = orient(c, d, b)
        if ((o1 > eps and o2 < -eps) or (o1 < -eps and o2 > eps)) and \
           ((o3 > eps and o4 < -eps) or (o3 < -eps and o4 > eps)):
            return True
        # touching configurations count as blocking
        if (abs(o1) <= eps or abs(o2) <= eps or abs(o3) <= eps or abs(o4) <= eps):
            if (min(a[0], b[0]) - eps <= max(c[0], d[0]) and min(c[0], d[0]) - eps <= max(a[0], b[0]) and
                    min(a[1], b[1]) - eps <= max(c[1], d[1]) and min(c[1], d[1]) - eps <= max(a[1], b[1])):
                if (abs(o1) <= eps and abs(o2) <= eps) or (o1 * o2 <= eps and o3 * o4 <= eps):
                    return True
    return False


@njit(cache=True)
def segment_hits_triangle(a, b, p, q, r, eps):
    """True if segment ``ab`` meets the closed triangle ``pqr`` (3D)."""
    ux = q[0] - p[0]
    uy = q[1] - p[1]
    uz = q[2] - p[2]
    vx = r[0] - p[0]
    vy = r[1] - p[1]
    vz = r[2] - p[2]
    nx = uy * vz - uz * vy
    ny = uz * vx - ux * vz
    nz = ux * vy - uy * vx
    nn = np.sqrt(nx * nx + ny * ny + nz * nz)
    if nn <= eps:
        return True
    nx /= nn
    ny /= nn
    nz /= nn
    da = nx * (a[0] - p[0]) + ny * (a[1] - p[1]) + nz * (a[2] - p[2])
    db = nx * (b[0] - p[0]) + ny * (b[1] - p[1]) + nz * (b[2] - p[2])
    if (da > eps and db > eps) or (da < -eps and db < -eps):
        return False
    if abs(da) <= eps and abs(db) <= eps:
        ax = 0
        if abs(ny) > abs(nx):
            ax = 1
        if abs(nz) > max(abs(nx), abs(ny)):
            ax = 2
        i0 = (ax + 1) % 3
        i1 = (ax + 2) % 3
        return _seg_tri_2d(np.array([a[i0], a[i1]]), np.array([b[i0], b[i1]]),
                           np.array([p[i0], p[i1]]), np.array([q[i0], q[i1]]),
                           np.array([r[i0], r[i1]]), eps)
    if abs(da - db) <= eps:
        x0 = a[0]
        x1 = a[1]
        x2 = a[2]
    else:
        t = da / (da - db)
        x0 = a[0] + t * (b[0] - a[0])
        x1 = a[1] + t * (b[1] - a[1])
        x2 = a[2] + t * (b[2] - a[2])
    wx = x0 - p[0]
    wy = x1 - p[1]
    wz = x2 - p[2]
    d00 = ux * ux + uy * uy + uz * uz
    d01 = ux * vx + uy * vy + uz * vz
    d11 = vx * vx + vy * vy + vz * vz
    d20 = wx * ux + wy * uy + wz * uz
    d21 = wx * vx + wy * vy + wz * vz
    den = d00 * d11 - d01 * d01
    v = (d11 * d20 - d01 * d21) / den
    w = (d00 * d21 - d01 * d20) / den
    tol = 1e-9
    return v >= -tol and w >= -tol and v + w <= 1.0 + tol


@njit(cache=True)
def kmt_reduce(verts, eps):
    """Indices of the vertices kept by triangle elimination.

    Sweeps the vertices in index order, deleting every vertex whose closed
    triangle with its two live neighbours meets no other live edge; sweeps
    repeat from index 0 until one full sweep deletes nothing.
    """
    n = len(verts)
    nxt = np.empty(n, np.int64)
    prv = np.empty(n, np.int64)
    alive = np.ones(n, np.bool_)
    for i in range(n):
        nxt[i] = (i + 1) % n
        prv[i] = (i - 1) % n
    m = n
    changed = True
    while changed and m > 3:
        changed = False
        for i in range(n):
            if not alive[i] or m <= 3:
                continue
            p = prv[i]
            q = nxt[i]
            P = verts[p]
            I = verts[i]
            Q = verts[q]
            lo0 = min(P[0], I[0], Q[0]) - eps
            lo1 = min(P[1], I[1], Q[1]) - eps
            lo2 = min(P[2], I[2], Q[2]) - eps
            hi0 = max(P[0], I[0], Q[0]) + eps
            hi1 = max(P[1], I[1], Q[1]) + eps
            hi2 = max(P[2], I[2], Q[2]) + eps
            blocked = False
            stop = prv[p]
            u = nxt[q]
            while u != stop:
                w = nxt[u]
                A = verts[u]
                B = verts[w]
                if not (max(A[0], B[0]) < lo0 or min(A[0], B[0]) > hi0 or
                        max(A[1], B[1]) < lo1 or min(A[1], B[1]) > hi1 or
                        max(A[2], B[2]) < lo2 or min(A[2], B[2]) > hi2):
                    if segment_hits_triangle(A, B, P, I, Q, eps):
                        blocked = True
                        break
                u = w
            if not blocked:
                alive[i] = False
                nxt[p] = q
                prv[q] = p
                m -= 1
                changed = True
    out = np.empty(m, np.int64)
    j = 0
    for i in range(n):
        if alive[i]:
            out[j] = i
            j += 1
    return out


@njit(cache=True)
def find_crossings(xy, h, tol):
    """All crossings between non-adjacent edges of a projected closed polygon.

    Returns ``(rows, status)`` where each row is
    ``(edge_i, edge_j, s, t, h_i, h_j, x, y)`` with ``s``/``t`` the positions
    along edges ``i < j``; ``status`` is 0 when generic and 1 when the
    projection is degenerate.
    """
    n = len(xy)
    cap = 64
    rows = np.empty((cap, 8))
    cnt = 0
    lo = np.empty((n, 2))
    hi = np.empty((n, 2))
    for i in range(n):
        j = (i + 1) % n
        dx = xy[j, 0] - xy[i, 0]
        dy = xy[j, 1] - xy[i, 1]
        if dx * dx + dy * dy < tol * tol:
            return rows[:0], 1
        lo[i, 0] = min(xy[i, 0], xy[j, 0])
        lo[i, 1] = min(xy[i, 1], xy[j, 1])
        hi[i, 0] = max(xy[i, 0], xy[j, 0])
        hi[i, 1] = max(xy[i, 1], xy[j, 1])
    for i in range(n - 2):
        i1 = i + 1
        ax = xy[i, 0]
        ay = xy[i, 1]
        rx = xy[i1, 0] - ax
        ry = xy[i1, 1] - ay
        last = n if i > 0 else n - 1
        for j in range(i + 2, last):
            if lo[j, 0] > hi[i, 0] + tol or hi[j, 0] < lo[i, 0] - tol or \
               lo[j, 1] > hi[i, 1] + tol or hi[j, 1] < lo[i, 1] - tol:
                continue
            j1 = (j + 1) % n
            bx = xy[j, 0]
            by = xy[j, 1]
            sx = xy[j1, 0] - bx
            sy = xy[j1, 1] - by
            den = rx * sy - ry * sx
            qx = bx - ax
            qy = by - ay
            lr = np.sqrt(rx * rx + ry * ry)
            ls = np.sqrt(sx * sx + sy * sy)
            if abs(den) <= tol * lr * ls:
                # parallel: degenerate only if the segments overlap on a line
                cr = qx * ry - qy * rx
                if abs(cr) <= tol * lr:
                    t0 = (qx * rx + qy * ry) / (lr * lr)
                    t1 = ((qx + sx) * rx + (qy + sy) * ry) / (lr * lr)
                    if max(t0, t1) >= -tol and min(t0, t1) <= 1 + tol:
                        return rows[:0], 1
                continue
            s = (qx * sy - qy * sx) / den
            t = (qx * ry - qy * rx) / den
            if s < -tol or s > 1 + tol or t < -tol or t > 1 + tol:
                continue
            if s < tol or s > 1 - tol or t < tol or t > 1 - tol:
                return rows[:0], 1
            hs = h[i] + s * (h[i1] - h[i])
            ht = h[j] + t * (h[j1] - h[j])
            if abs(hs - ht) < tol:
                return rows[:0], 1
            if cnt == cap:
                cap *= 2
                new = np.empty((cap, 8))
                new[:cnt] = rows[:cnt]
                rows = new
            rows[cnt, 0] = i
            rows[cnt, 1] = j
            rows[cnt, 2] = s
            rows[cnt, 3] = t
            rows[cnt, 4] = hs
            rows[cnt, 5] = ht
            rows[cnt, 6] = ax + s * rx
            rows[cnt, 7] = ay + s * ry
            cnt += 1
    for a in range(cnt):
        for b in range(a + 1, cnt):
            dx = rows[a, 6] - rows[b, 6]
            dy = rows[a, 7] - rows[b, 7]
            if dx * dx + dy * dy < tol * tol:
                return rows[:0], 1
    return rows[:cnt], 0
