"""Exact univariate polynomials over Q and real algebraic numbers.

Polynomials are tuples of Fractions, lowest degree first, without trailing zeros.
"""
from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from typing import Sequence

Poly = tuple


def norm(p: Sequence) -> Poly:
    q = [Fraction(c) for c in p]
    while q and q[-1] == 0:
        q.pop()
    return tuple(q)


def degree(p: Poly) -> int:
    return len(p) - 1


def evaluate(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p: Poly) -> Poly:
    return norm([i * c for i, c in enumerate(p)][1:])


def divmod_poly(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        f = r[-1] / lead
        q[shift] = f
        for i, c in enumerate(b):
            r[i + shift] -= f * c
        r = list(norm(r))
    return norm(q), norm(r)


def monic(p: Poly) -> Poly:
    return tuple(c / p[-1] for c in p) if p else p


def gcd(a: Poly, b: Poly) -> Poly:
    a, b = norm(a), norm(b)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    return monic(a)


def squarefree(p: Poly) -> Poly:
    g = gcd(p, derivative(p))
    return monic(divmod_poly(p, g)[0]) if degree(g) > 0 else monic(p)


def charpoly(m: Sequence[Sequence[int]]) -> Poly:
    """det(xI - M) by Faddeev-LeVerrier, exact."""
    n = len(m)
    M = [[Fraction(x) for x in row] for row in m]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # Mk = M (M_{k-1} + c_{n-k+1} I)
        prev = [row[:] for row in Mk]
        for i in range(n):
            prev[i][i] += coeffs[n - k + 1]
        Mk = [[sum(M[i][t] * prev[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(Mk[i][i] for i in range(n)) / k
    return norm(coeffs)


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [p, derivative(p)]
    while seq[-1]:
        r = divmod_poly(seq[-2], seq[-1])[1]
        seq.append(tuple(-c for c in r))
    return seq[:-1]


def _sign_changes(seq: list[Poly], x: Fraction) -> int:
    signs = [s for s in (evaluate(p, x) for p in seq) if s != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if (u > 0) != (v > 0))


def count_roots(seq: list[Poly], lo: Fraction, hi: Fraction) -> int:
    """Distinct real roots in (lo, hi] of the squarefree head of ``seq``."""
    return _sign_changes(seq, lo) - _sign_changes(seq, hi)


def root_bound(p: Poly) -> Fraction:
    return 1 + max((abs(c / p[-1]) for c in p[:-1]), default=Fraction(0))


@total_ordering
class AlgebraicReal:
    """The unique root of a squarefree ``poly`` in the half-open interval (lo, hi]."""

    __slots__ = ("poly", "lo", "hi", "_seq")

    def __init__(self, poly: Poly, lo: Fraction, hi: Fraction):
        self.poly = squarefree(norm(poly))
        self.lo, self.hi = Fraction(lo), Fraction(hi)
        self._seq = sturm_sequence(self.poly)
        if count_roots(self._seq, self.lo, self.hi) != 1:
            raise ValueError("interval does not isolate exactly one root")

    @classmethod
    def largest_root(cls, p: Poly) -> "AlgebraicReal":
        sf = squarefree(norm(p))
        seq = sturm_sequence(sf)
        B = root_bound(sf)
        lo, hi = -B, B
        if count_roots(seq, lo, hi) == 0:
            raise ValueError("polynomial has no real root")
        while count_roots(seq, lo, hi) > 1:
            mid = (lo + hi) / 2
            if count_roots(seq, mid, hi) >= 1:
                lo = mid
            else:
                hi = mid
        return cls(sf, lo, hi)

    @classmethod
    def rational(cls, q) -> "AlgebraicReal":
        q = Fraction(q)
        return cls((-q, Fraction(1)), q - 1, q)

    def refine(self, width: Fraction) -> "AlgebraicReal":
        while self.hi - self.lo > width:
            self.bisect()
        return self

    def bisect(self) -> None:
        mid = (self.lo + self.hi) / 2
        if count_roots(self._seq, self.lo, mid) == 1:
            self.hi = mid
        else:
            self.lo = mid

    def __float__(self) -> float:
        self.refine(Fraction(1, 10**12))
        return float((self.lo + self.hi) / 2)

    def _cmp_rational(self, q: Fraction) -> int:
        if q <= self.lo:
            return 1
        if q > self.hi:
            return -1
        if count_roots(self._seq, self.lo, q) == 1:
            return 0 if evaluate(self.poly, q) == 0 else -1
        return 1

    def compare(self, other) -> int:
        if not isinstance(other, AlgebraicReal):
            return self._cmp_rational(Fraction(other))
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo < hi:
            g = gcd(self.poly, other.poly)
            if degree(g) > 0 and count_roots(sturm_sequence(g), lo, hi) >= 1:
                return 0
        while not (self.hi <= other.lo or other.hi <= self.lo):
            self.bisect()
            other.bisect()
        if self.hi <= other.lo:
            # roots are distinct, so touching endpoints cannot both be the roots
            return -1
        return 1

    def __eq__(self, other) -> bool:
        return self.compare(other) == 0

    def __lt__(self, other) -> bool:
        return self.compare(other) < 0

    def __hash__(self):
        raise TypeError("AlgebraicReal is unhashable")

    def __repr__(self) -> str:
        return f"AlgebraicReal(~{float(self):.6g})"
