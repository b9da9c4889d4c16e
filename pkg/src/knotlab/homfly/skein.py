"""HOMFLYPT polynomial by skein recursion over signed Gauss codes.

Normalization: ``a P(L+) - a^-1 P(L-) = z P(L0)`` and ``P(unknot) = 1``.
The recursion walks the components from their base points; the first
crossing met on its under-strand is switched and smoothed until the
diagram is descending, which is a split unlink.
"""
from __future__ import annotations

from functools import lru_cache

from . import gauss
from .poly import LaurentPoly2, padd, pmul, pshift

DEFAULT_CAP = 50

# delta = (a - a^-1) / z, the value of a split unknot factor
_DELTA = {(1, -1): 1, (-1, -1): -1}


class CrossingCapExceeded(RuntimeError):
    """The simplified diagram still has more crossings than allowed."""


@lru_cache(maxsize=None)
def _delta_pow(k: int) -> tuple:
    out = {(0, 0): 1}
    for _ in range(k):
        out = pmul(out, _DELTA)
    return tuple(sorted(out.items()))


def _times_delta(p: dict, k: int) -> dict:
    if k == 0:
        return p
    return pmul(p, dict(_delta_pow(k)))


def _first_bad(comps):
    seen = set()
    for ci, c in enumerate(comps):
        for k, p in enumerate(c):
            x = p >> 1
            if x in seen:
                continue
            seen.add(x)
            if not p & 1:
                return x
    return None


def _switch(comps, signs, x):
    new = [[p ^ 1 if p >> 1 == x else p for p in c] for c in comps]
    sig = dict(signs)
    sig[x] = -sig[x]
    return new, sig


def _smooth(comps, signs, x):
    loc = []
    for ci, c in enumerate(comps):
        for k, p in enumerate(c):
            if p >> 1 == x:
                loc.append((ci, k))
    (i, p), (j, q) = loc
    new = [list(c) for c in comps]
    if i == j:
        c = comps[i]
        new[i] = c[:p] + c[q + 1:]
        new.insert(i + 1, c[p + 1:q])
    else:
        X, Y = comps[i], comps[j]
        new[i] = X[:p] + Y[q + 1:] + Y[:q] + X[p + 1:]
        del new[j]
    sig = {y: s for y, s in signs.items() if y != x}
    return new, sig


class SkeinEngine:
    """Memoized skein evaluator; one instance can be reused across calls."""

    def __init__(self, memo_size: int = 200_000):
        self.memo: dict = {}
        self.memo_size = memo_size

    def _eval(self, comps, signs) -> dict:
        comps, signs, free = gauss.reduce_local(comps, signs)
        if not signs:
            return dict(_delta_pow(len(comps) - 1 + free))
        key = gauss.canonical_key(comps, signs)
        hit = self.memo.get(key)
        if hit is None:
            x = _first_bad(comps)
            if x is None:
                hit = dict(_delta_pow(len(comps) - 1))
            else:
                sw = self._eval(*_switch(comps, signs, x))
                sm = self._eval(*_smooth(comps, signs, x))
                if signs[x] > 0:
                    hit = padd(pshift(sw, -2, 0), pshift(sm, -1, 1))
                else:
                    hit = padd(pshift(sw, 2, 0), pshift(sm, 1, 1, -1))
            if len(self.memo) >= self.memo_size:
                self.memo.clear()
            self.memo[key] = hit
        return _times_delta(hit, free)

    def evaluate(self, comps, signs) -> LaurentPoly2:
        gauss.validate(comps, signs)
        return LaurentPoly2._raw(dict(self._eval(comps, signs)))


_ENGINE = SkeinEngine()


def homfly_gauss(comps, signs, cap: int | None = DEFAULT_CAP,
                 simplify: bool = True) -> LaurentPoly2:
    """HOMFLYPT polynomial of a signed Gauss code.

    The diagram is simplified first (R1/R2, strand reroutes, and for knots
    nugatory crossings and connected-sum factors).  ``CrossingCapExceeded``
    is raised when more than ``cap`` crossings remain.
    """
    comps = [list(c) for c in comps]
    gauss.validate(comps, signs)
    free = 0
    if simplify:
        comps, signs, free = gauss.strand_simplify(comps, signs)
    if len(comps) == 1:
        factors = gauss.factor_knot(comps[0]) if simplify else [comps[0]]
        n = sum(len(f) for f in factors) // 2
        if cap is not None and n > cap:
            raise CrossingCapExceeded(n)
        out = {(0, 0): 1}
        for f in factors:
            sig = {p >> 1: signs[p >> 1] for p in f}
            out = pmul(out, _ENGINE._eval([f], sig))
    else:
        n = gauss.ncross(comps)
        if cap is not None and n > cap:
            raise CrossingCapExceeded(n)
        out = _ENGINE._eval(comps, signs)
    return LaurentPoly2._raw(_times_delta(out, free))


def homfly_pd(pd, cap: int | None = DEFAULT_CAP) -> LaurentPoly2:
    """HOMFLYPT polynomial of a knot given as a PD code."""
    word, signs = gauss.from_pd(pd)
    return homfly_gauss([word], signs, cap=cap)
