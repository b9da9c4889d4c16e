"""Exact two-variable Laurent polynomials in ``a`` and ``z``.

Coefficients are Python integers, so products never overflow.
"""
from __future__ import annotations

import re
from typing import Mapping


class LaurentPoly2:
    """Immutable ``sum c_ij a^i z^j`` with nonzero integer ``c_ij``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], int] | int = 0):
        if isinstance(terms, int):
            terms = {(0, 0): terms}
        clean = {}
        for (i, j), c in terms.items():
            if not isinstance(c, int):
                if float(c) != int(c):
                    raise ValueError("coefficients must be integers")
                c = int(c)
            if c:
                clean[(int(i), int(j))] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "LaurentPoly2":
        p = object.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def monomial(cls, i: int, j: int, c: int = 1) -> "LaurentPoly2":
        return cls({(i, j): c})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly2(other)
        if not isinstance(other, LaurentPoly2):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly2(other)
        return LaurentPoly2._raw(padd(self._terms, other._terms))

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly2._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPoly2(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly2._raw({k: c * other for k, c in self._terms.items() if c * other})
        if not isinstance(other, LaurentPoly2):
            return NotImplemented
        return LaurentPoly2._raw(pmul(self._terms, other._terms))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not polynomial")
        out = LaurentPoly2(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def mirror(self) -> "LaurentPoly2":
        """Substitute ``a -> 1/a`` (the mirror image of a knot)."""
        return LaurentPoly2._raw({(-i, j): c for (i, j), c in self._terms.items()})

    def is_mirror_symmetric(self) -> bool:
        return self == self.mirror()

    def evaluate(self, a: complex, z: complex) -> complex:
        return sum(c * a ** i * z ** j for (i, j), c in self._terms.items())

    def to_string(self) -> str:
        """Canonical text form, monomials sorted by ``(a-power, z-power)``.

        ``2a^-2z^0 + -1a^-4z^0`` style: every monomial is ``<c>a^<i>z^<j>``
        with a signed integer coefficient; the zero polynomial is ``0``.
        """
        if not self._terms:
            return "0"
        return " + ".join("%da^%dz^%d" % (c, i, j) for (i, j), c in self.items())

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly2":
        text = text.strip()
        if text == "0":
            return cls()
        terms = {}
        for part in text.split(" + "):
            m = _MONO.fullmatch(part.strip())
            if not m:
                raise ValueError("bad monomial %r" % part)
            c, i, j = (int(g) for g in m.groups())
            key = (i, j)
            if key in terms:
                raise ValueError("repeated monomial %r" % part)
            terms[key] = c
        return cls(terms)

    def __repr__(self):
        return "LaurentPoly2(%r)" % self.to_string()

    __str__ = to_string


_MONO = re.compile(r"([+-]?\d+)a\^(-?\d+)z\^(-?\d+)")


# Raw dict helpers used in the skein recursion.

def padd(p: dict, q: dict) -> dict:
    out = dict(p)
    for k, c in q.items():
        v = out.get(k, 0) + c
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def pmul(p: dict, q: dict) -> dict:
    out: dict = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            k = (i1 + i2, j1 + j2)
            v = out.get(k, 0) + c1 * c2
            if v:
                out[k] = v
            else:
                del out[k]
    return out


def pshift(p: dict, di: int, dj: int, c: int = 1) -> dict:
    return {(i + di, j + dj): v * c for (i, j), v in p.items()}


ONE = LaurentPoly2(1)
A = LaurentPoly2.monomial(1, 0)
Z = LaurentPoly2.monomial(0, 1)
