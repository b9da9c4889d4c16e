"""Signed Gauss codes for oriented link diagrams.

A diagram is a list of components, each a list of *passes*, plus a map from
crossing label to sign.  A pass is encoded as ``2 * label + over`` where
``over`` is 1 on the over-strand.  Every crossing occurs exactly twice, once
over and once under.  All moves in this module are planar, so a code built
from a plane projection stays realizable.

Planar structure (faces) follows the PD convention: around a positive
crossing the counterclockwise slot order is ``(under in, over out, under out,
over in)``; around a negative one it is ``(under in, over in, under out,
over out)``.
"""
from __future__ import annotations

import random
from collections import deque

Comps = list  # list[list[int]]


def label(p: int) -> int:
    return p >> 1


def is_over(p: int) -> bool:
    return bool(p & 1)


def crossings(comps) -> set:
    return {p >> 1 for c in comps for p in c}


def ncross(comps) -> int:
    return sum(len(c) for c in comps) // 2


def relabel(comps, signs):
    """Renumber crossings ``0, 1, ...`` in order of first appearance."""
    new = {}
    out = []
    for c in comps:
        row = []
        for p in c:
            x = p >> 1
            if x not in new:
                new[x] = len(new)
            row.append(2 * new[x] | (p & 1))
        out.append(row)
    nsig = [0] * len(new)
    for x, y in new.items():
        nsig[y] = signs[x]
    return out, dict(enumerate(nsig))


def canonical_key(comps, signs) -> tuple:
    new = {}
    rows = []
    for c in comps:
        row = []
        for p in c:
            x = p >> 1
            y = new.get(x)
            if y is None:
                y = new[x] = len(new)
            row.append(2 * y | (p & 1))
        rows.append(tuple(row))
    sig = [0] * len(new)
    for x, y in new.items():
        sig[y] = signs[x]
    return tuple(rows), tuple(sig)


def mirror(comps, signs):
    """Mirror image: swap over and under, negate every sign."""
    return [[p ^ 1 for p in c] for c in comps], {x: -s for x, s in signs.items()}


def validate(comps, signs) -> None:
    seen: dict = {}
    for c in comps:
        for p in c:
            seen.setdefault(p >> 1, []).append(p & 1)
    for x, bits in seen.items():
        if sorted(bits) != [0, 1]:
            raise ValueError("crossing %r must occur once over and once under" % x)
        if signs.get(x) not in (1, -1):
            raise ValueError("crossing %r has no sign" % x)


def remove_crossings(comps, drop) -> list:
    return [[p for p in c if (p >> 1) not in drop] for c in comps]


def _positions(comps) -> dict:
    return {p: (ci, k) for ci, c in enumerate(comps) for k, p in enumerate(c)}


def _find_local_move(comps):
    """Crossings removable by a Reidemeister I or II move, or by lifting."""
    for c in comps:
        n = len(c)
        if n == 0:
            continue
        overs = sum(p & 1 for p in c)
        if overs == n or overs == 0:
            # lies entirely above (or below) the rest: a split unknot
            return {p >> 1 for p in c}
        for k in range(n):
            if c[k] >> 1 == c[(k + 1) % n] >> 1:
                return {c[k] >> 1}
    pos = None
    for ci, c in enumerate(comps):
        n = len(c)
        if n < 2:
            continue
        for k in range(n):
            p, q = c[k], c[(k + 1) % n]
            if (p ^ q) & 1 or p >> 1 == q >> 1:
                continue
            if pos is None:
                pos = _positions(comps)
            cj, a = pos[p ^ 1]
            cl, b = pos[q ^ 1]
            if cj != cl:
                continue
            m = len(comps[cj])
            if (b - a) % m == 1 or (a - b) % m == 1:
                return {p >> 1, q >> 1}
    return None


def reduce_local(comps, signs):
    """Apply R1, R2 and lifting moves until none applies.

    Returns ``(comps, signs, free)`` where ``free`` counts the crossing-free
    components removed (each a split unknot).  At least one component is
    always kept.
    """
    comps = [list(c) for c in comps]
    while True:
        drop = _find_local_move(comps)
        if not drop:
            break
        comps = remove_crossings(comps, drop)
    kept = [c for c in comps if c]
    free = len(comps) - len(kept)
    if not kept:
        kept = [[]]
        free -= 1
    signs = {x: signs[x] for x in crossings(kept)}
    return kept, signs, free


# ----------------------------------------------------------- knot factoring

def _closed_windows(word):
    """Yield ``(start, length)`` of proper cyclic subwords closed under pairing."""
    n = len(word)
    for i in range(n):
        open_ = set()
        for ln in range(1, n - 1):
            x = word[(i + ln - 1) % n] >> 1
            if x in open_:
                open_.remove(x)
            else:
                open_.add(x)
            if not open_ and ln >= 2 and ln % 2 == 0:
                yield i, ln


def remove_nugatory(word: list) -> list:
    """Drop crossings whose two passes split a knot code into closed halves."""
    changed = True
    while changed:
        changed = False
        n = len(word)
        first: dict = {}
        for k, p in enumerate(word):
            first.setdefault(p >> 1, k)
        for k, p in enumerate(word):
            x = p >> 1
            a = first[x]
            if a == k:
                continue
            inner = word[a + 1:k]
            cnt: dict = {}
            for q in inner:
                cnt[q >> 1] = cnt.get(q >> 1, 0) + 1
            if all(v == 2 for v in cnt.values()):
                word = [q for q in word if q >> 1 != x]
                changed = True
                break
        if n == 0:
            break
    return word


def factor_knot(word: list) -> list:
    """Split a knot code into connected-sum factors (each a knot code)."""
    word = remove_nugatory(list(word))
    if len(word) < 6:
        return [word] if word else []
    for i, ln in _closed_windows(word):
        n = len(word)
        inner = [word[(i + t) % n] for t in range(ln)]
        outer = [word[(i + ln + t) % n] for t in range(n - ln)]
        return factor_knot(inner) + factor_knot(outer)
    return [word]


# ------------------------------------------------------------ planar faces

def _slots(comps, signs):
    """Rotation system: crossing -> ccw list of half-edges ``(edge, end)``.

    Edge ``(ci, k)`` runs from pass ``k`` to pass ``k + 1`` of component
    ``ci``; ``end`` is 0 at its tail and 1 at its head.
    """
    under = {}
    over = {}
    for ci, c in enumerate(comps):
        n = len(c)
        for k, p in enumerate(c):
            ends = ((ci, (k - 1) % n), 1), ((ci, k), 0)
            (over if p & 1 else under)[p >> 1] = ends
    rot = {}
    for x, (u_in, u_out) in under.items():
        o_in, o_out = over[x]
        if signs[x] > 0:
            rot[x] = [u_in, o_out, u_out, o_in]
        else:
            rot[x] = [u_in, o_in, u_out, o_out]
    return rot


def trace_faces(rot, edges):
    """Faces of a rotation system, walking with each face on the left.

    ``rot`` maps crossing -> ccw list of half-edges; ``edges`` maps edge id
    to ``(tail crossing, head crossing)``.  Returns ``face_of``: half-edge
    (as the half-edge a walk leaves a crossing by) -> face index, and the
    face count.
    """
    where = {}
    for x, lst in rot.items():
        for s, h in enumerate(lst):
            where[h] = (x, s)
    face_of = {}
    nf = 0
    for h0 in where:
        if h0 in face_of:
            continue
        h = h0
        while h not in face_of:
            face_of[h] = nf
            e, end = h
            other = (e, 1 - end)
            y, t = where[other]
            lst = rot[y]
            h = lst[(t - 1) % len(lst)]
        nf += 1
    return face_of, nf


def _edge_ends(comps):
    out = {}
    for ci, c in enumerate(comps):
        n = len(c)
        for k in range(n):
            out[(ci, k)] = (c[k] >> 1, c[(k + 1) % n] >> 1)
    return out


def is_connected_planar(comps, signs) -> bool:
    """True if the diagram is connected and its faces satisfy Euler's formula."""
    if not any(comps) or any(not c for c in comps):
        return False
    rot = _slots(comps, signs)
    edges = _edge_ends(comps)
    _, nf = trace_faces(rot, edges)
    return len(rot) - len(edges) + nf == 2


def _runs(c, bit):
    """Maximal cyclic runs of passes with over-bit ``bit``: (start, length)."""
    n = len(c)
    if n == 0 or all((p & 1) == bit for p in c):
        return []
    start = next(k for k in range(n) if (c[k] & 1) != bit)
    out = []
    k = 0
    while k < n:
        idx = (start + k) % n
        if (c[idx] & 1) == bit:
            ln = 0
            while (c[(start + k + ln) % n] & 1) == bit:
                ln += 1
            out.append(((start + k) % n, ln))
            k += ln
        else:
            k += 1
    return out


def _reroute_over(comps, signs, ci, start, ln, next_label, allow_equal=False, rng=None):
    """Reroute the over-strand run ``comps[ci][start:start+ln]``.

    Returns ``(comps, signs, free)`` for the rerouted diagram or ``None``
    when the reroute is not shorter (or, with ``allow_equal``, longer) or
    the planar data is unusable.  ``rng`` randomizes the order in which the
    dual graph is explored, which picks among shortest paths.
    """
    c = comps[ci]
    n = len(c)
    if ln + 2 > n:
        return None
    run = [c[(start + t) % n] for t in range(ln)]
    drop = {p >> 1 for p in run}
    u1 = c[(start - 1) % n]
    u2 = c[(start + ln) % n]
    if u1 >> 1 == u2 >> 1 or (u1 >> 1) in drop or (u2 >> 1) in drop:
        return None
    rest = remove_crossings(comps, drop)
    free = sum(1 for cc in rest if not cc)
    keep_idx = [k for k, cc in enumerate(rest) if cc]
    rest = [rest[k] for k in keep_idx]
    ci2 = keep_idx.index(ci)
    sig2 = {x: s for x, s in signs.items() if x not in drop}
    cc = rest[ci2]
    k1 = cc.index(u1)
    if cc[(k1 + 1) % len(cc)] != u2:
        return None
    strand = (ci2, k1)
    rot = _slots(rest, sig2)
    # the strand edge is absent; its two slots become gaps
    x1, x2 = u1 >> 1, u2 >> 1
    r1 = rot[x1]
    f1 = r1.index((strand, 0))
    r2 = rot[x2]
    f2 = r2.index((strand, 1))
    start_h = r1[(f1 - 1) % 4]
    end_h = r2[(f2 - 1) % 4]
    if x1 == x2:
        return None
    del r1[f1]
    del r2[f2]
    edges = _edge_ends(rest)
    del edges[strand]
    face_of, nf = trace_faces(rot, edges)
    if len(rot) - len(edges) + nf != 2:
        return None
    fa, fb = face_of[start_h], face_of[end_h]
    adj: dict = {}
    elist = list(edges)
    if rng is not None:
        rng.shuffle(elist)
    for e in elist:
        left = face_of[(e, 0)]
        right = face_of[(e, 1)]
        if left != right:
            adj.setdefault(left, []).append((right, e, 1))
            adj.setdefault(right, []).append((left, e, -1))
    prev = {fa: None}
    dq = deque([fa])
    while dq:
        f = dq.popleft()
        if f == fb:
            break
        for g, e, s in adj.get(f, ()):
            if g not in prev:
                prev[g] = (f, e, s)
                dq.append(g)
    if fb not in prev:
        return None
    path = []
    f = fb
    while prev[f] is not None:
        f0, e, s = prev[f]
        path.append((e, s))
        f = f0
    path.reverse()
    if len(path) > ln or (len(path) == ln and not allow_equal):
        return None
    ins: dict = {}
    new_over = []
    for t, (e, s) in enumerate(path):
        x = next_label + t
        sig2[x] = s
        ins.setdefault(e, []).append(2 * x)
        new_over.append(2 * x + 1)
    ins.setdefault(strand, []).extend(new_over)
    out = []
    for i, cc in enumerate(rest):
        row = []
        for k, p in enumerate(cc):
            row.append(p)
            row.extend(ins.get((i, k), ()))
        out.append(row)
    return out, sig2, free


def strand_simplify(comps, signs, lateral: int = 200, lateral_above: int = 24,
                    seed: int = 0):
    """Greedy diagram simplification with R1/R2 moves and strand reroutes.

    Maximal over- and under-strands are rerouted along shortest paths in
    the dual graph whenever that lowers the crossing count.  When no reroute
    helps and more than ``lateral_above`` crossings remain, up to ``lateral``
    random equal-length reroutes are tried to leave the local minimum.  Deterministic for a given ``seed``.  Returns
    ``(comps, signs, free)`` as :func:`reduce_local`.
    """
    rng = random.Random(seed)
    comps, signs, free = reduce_local(comps, signs)
    budget = lateral
    while ncross(comps) > 0:
        if not is_connected_planar(comps, signs):
            break
        res = _strand_step(comps, signs, rng=None, allow_equal=False)
        if res is None and budget > 0 and ncross(comps) > lateral_above:
            budget -= 1
            res = _strand_step(comps, signs, rng=rng, allow_equal=True)
        if res is None:
            break
        new, nsig, extra = res
        comps, signs, f2 = reduce_local(new, nsig)
        free += extra + f2
    return comps, signs, free


def _strand_step(comps, signs, rng, allow_equal):
    next_label = max(signs) + 1
    options = []
    for bit in (1, 0):
        work, wsig = (comps, signs) if bit else mirror(comps, signs)
        for ci, c in enumerate(work):
            for st, ln in _runs(c, 1):
                options.append((ln, bit, ci, st))
    if rng is None:
        options.sort(reverse=True)
    else:
        rng.shuffle(options)
    for ln, bit, ci, st in options:
        work, wsig = (comps, signs) if bit else mirror(comps, signs)
        res = _reroute_over(work, wsig, ci, st, ln, next_label, allow_equal, rng)
        if res is None:
            continue
        new, nsig, extra = res
        if bit == 0:
            new, nsig = mirror(new, nsig)
        return new, nsig, extra
    return None


# ---------------------------------------------------------------- PD codes

def to_pd(word: list, signs) -> list:
    """PD code of a one-component diagram, edges labelled ``1..2n``.

    Pass ``k`` sits between edges ``k`` and ``k + 1`` (1-based, cyclic).
    """
    n = len(word)
    if n == 0:
        return []
    under = {}
    over = {}
    for k, p in enumerate(word):
        e_in = k + 1
        (over if p & 1 else under)[p >> 1] = e_in
    nxt = lambda e: e % n + 1  # noqa: E731
    pd = []
    for x in sorted(under):
        u, o = under[x], over[x]
        if signs[x] > 0:
            pd.append([u, nxt(o), nxt(u), o])
        else:
            pd.append([u, o, nxt(u), nxt(o)])
    return pd


def from_pd(pd) -> tuple[list, dict]:
    """One-component signed Gauss code from a PD code with consecutive edges."""
    if not pd:
        return [], {}
    m = 2 * len(pd)
    nxt = lambda e: e % m + 1  # noqa: E731
    at_head = {}
    signs = {}
    for x, (i, j, k, l) in enumerate(pd):
        if k != nxt(i):
            raise ValueError("under-strand of crossing %d is not consecutive" % x)
        if j == nxt(l) and l != nxt(j):
            signs[x], o_in = 1, l
        elif l == nxt(j) and j != nxt(l):
            signs[x], o_in = -1, j
        else:
            raise ValueError("cannot orient over-strand of crossing %d" % x)
        at_head[i] = 2 * x
        at_head[o_in] = 2 * x + 1
    labels = sorted(set(e for row in pd for e in row))
    if labels != list(range(1, m + 1)):
        raise ValueError("PD edges must be labelled 1..2n")
    # edge e ends at the pass listed for it; start the walk from edge 1
    word = [at_head[e] for e in range(1, m + 1)]
    return word, signs
