"""Growth orders (d, theta) of letters and certified geometric length bounds."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .graph import reachable, scc
from .poly import AlgebraicReal, charpoly
from .words import Morphism


def incidence_matrix(phi: Morphism) -> list[list[int]]:
    """M[b][a] = number of occurrences of b in phi(a), letters in id order."""
    letters = phi.source.letters
    idx = {c: i for i, c in enumerate(letters)}
    M = [[0] * len(letters) for _ in letters]
    for a in letters:
        for b in phi[a]:
            M[idx[b]][idx[a]] += 1
    return M


@dataclass
class GrowthOrder:
    d: int
    theta: AlgebraicReal

    def compare(self, other: "GrowthOrder") -> int:
        c = self.theta.compare(other.theta)
        if c:
            return c
        return (self.d > other.d) - (self.d < other.d)

    def __eq__(self, other) -> bool:
        return isinstance(other, GrowthOrder) and self.compare(other) == 0

    def __lt__(self, other) -> bool:
        return self.compare(other) < 0

    def __str__(self) -> str:
        return f"({self.d}, {float(self.theta):.6f})"


def compare(o1: GrowthOrder, o2: GrowthOrder) -> int:
    return o1.compare(o2)


class GrowthAnalysis:
    """Condensation of the occurrence digraph with exact Perron roots per component."""

    def __init__(self, phi: Morphism):
        if not phi.non_erasing:
            raise ValueError("growth analysis needs a non-erasing substitution")
        self.phi = phi
        self.letters = phi.source.letters
        self.M = incidence_matrix(phi)
        succ = phi.occurrence_graph()
        self.succ = succ
        self.components = scc(self.letters, succ)
        self.comp_of = {c: i for i, comp in enumerate(self.components) for c in comp}
        idx = {c: i for i, c in enumerate(self.letters)}
        self.roots: list[AlgebraicReal | None] = []
        for comp in self.components:
            ids = [idx[c] for c in comp]
            sub = [[self.M[i][j] for j in ids] for i in ids]
            if len(comp) == 1 and sub[0][0] == 0:
                self.roots.append(None)  # acyclic singleton, no growth contribution
            else:
                self.roots.append(AlgebraicReal.largest_root(charpoly(sub)))
        # equivalence classes of equal roots
        self.root_class: list[int | None] = []
        reps: list[int] = []
        for i, r in enumerate(self.roots):
            if r is None or r.compare(1) <= 0:
                self.root_class.append(None)
                continue
            for k, j in enumerate(reps):
                if self.roots[j] == r:
                    self.root_class.append(k)
                    break
            else:
                reps.append(i)
                self.root_class.append(len(reps) - 1)
        self.comp_succ = {i: sorted({self.comp_of[b] for a in comp for b in succ[a]} - {i})
                          for i, comp in enumerate(self.components)}

    def component_root(self, i: int) -> AlgebraicReal | None:
        return self.roots[i]

    def order(self, letter: str) -> GrowthOrder:
        start = self.comp_of[letter]
        reach = reachable([start], self.comp_succ)
        best = None
        for i in reach:
            if self.root_class[i] is not None and (best is None or self.roots[i] > self.roots[best]):
                best = i
        if best is None:
            raise ValueError("letter grows at most polynomially (no Perron root above 1)")
        cls = self.root_class[best]
        # longest chain of components with the maximal root; components are sink-first
        chain: dict[int, int] = {}
        for i in range(len(self.components)):
            if i not in reach:
                continue
            tail = max((chain[j] for j in self.comp_succ[i] if j in chain), default=0)
            chain[i] = tail + (1 if self.root_class[i] == cls else 0)
        return GrowthOrder(chain[start] - 1, self.roots[best])

    @cached_property
    def orders(self) -> dict[str, GrowthOrder]:
        return {a: self.order(a) for a in self.letters}


def growth_order(phi: Morphism, letter: str) -> GrowthOrder:
    return GrowthAnalysis(phi).order(letter)


def all_same_order(phi: Morphism) -> tuple[bool, GrowthOrder | None]:
    orders = list(GrowthAnalysis(phi).orders.values())
    first = orders[0]
    if all(o == first for o in orders[1:]):
        return True, first
    return False, None


@dataclass(frozen=True)
class GrowthBounds:
    """``C1 theta_lo^k <= |psi(phi^k(a))| <= C2 theta_hi^k`` for every letter and k.

    ``upper`` is a positive v with M^T v <= theta_hi v; ``lower`` holds, per top
    component, its letters and a positive u with u M_sub >= theta_lo u.
    """

    C1: Fraction
    C2: Fraction
    theta_lo: Fraction
    theta_hi: Fraction
    upper: tuple[Fraction, ...] = field(default=(), compare=False)
    lower: tuple[tuple[str, tuple[Fraction, ...]], ...] = field(default=(), compare=False)

    def holds(self, phi: Morphism, psi: Morphism, kmax: int = 30) -> bool:
        letters = phi.source.letters
        lengths = {a: len(psi[a]) for a in letters}
        for k in range(kmax + 1):
            lo, hi = self.C1 * self.theta_lo ** k, self.C2 * self.theta_hi ** k
            if any(not lo <= n <= hi for n in lengths.values()):
                return False
            lengths = {a: sum(lengths[b] for b in phi[a]) for a in letters}
        return True


class CertificateError(RuntimeError):
    pass


def _solve(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    n = len(A)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def _upper(M: list[list[int]], theta_hi: Fraction) -> list[Fraction] | None:
    # v^T (I - M/theta_hi) = 1^T, i.e. (I - M^T/theta_hi) v = 1
    n = len(M)
    A = [[Fraction(int(i == j)) - Fraction(M[j][i]) / theta_hi for j in range(n)] for i in range(n)]
    v = _solve(A, [Fraction(1)] * n)
    if v is None or any(x <= 0 for x in v):
        return None
    return v


def _lower(sub: list[list[int]], iterations: int, denom: int) -> tuple[Fraction, list[Fraction]] | None:
    """Rational u > 0 and theta_lo with u M >= theta_lo u exactly."""
    m = np.array(sub, dtype=float)
    n = len(sub)
    shift = m + np.eye(n)
    u = np.ones(n)
    for _ in range(iterations):
        u = u @ shift
        u /= u.max()
    if np.any(u <= 0):
        return None
    uq = [Fraction(float(x)).limit_denominator(denom) for x in u]
    if any(x <= 0 for x in uq):
        return None
    uM = [sum(uq[i] * sub[i][j] for i in range(n)) for j in range(n)]
    ratio = min(uM[j] / uq[j] for j in range(n))
    theta_lo = Fraction(int(ratio * denom), denom)
    if theta_lo <= 1:
        return None
    return theta_lo, uq


def growth_bounds(phi: Morphism, psi: Morphism, max_retries: int = 8) -> GrowthBounds:
    ga = GrowthAnalysis(phi)
    same, order = all_same_order(phi)
    if not same:
        raise ValueError("growth bounds need a common growth order")
    if order.d != 0:
        raise ValueError("geometric bounds need d = 0")
    theta = order.theta
    letters = ga.letters
    idx = {c: i for i, c in enumerate(letters)}
    maxpsi = max(len(psi[a]) for a in letters)
    minpsi = min(len(psi[a]) for a in letters)
    if minpsi == 0:
        raise ValueError("psi must be non-erasing")
    top = [i for i, r in enumerate(ga.roots) if r is not None and r == theta]
    width = Fraction(1, 100)
    iterations, denom = 200, 10**6
    for _ in range(max_retries):
        theta.refine(width)
        theta_hi = theta.hi + width
        v = _upper(ga.M, theta_hi)
        lowers = []
        for i in top:
            ids = [idx[c] for c in ga.components[i]]
            sub = [[ga.M[r][c] for c in ids] for r in ids]
            res = _lower(sub, iterations, denom)
            if res is None:
                lowers = None
                break
            lowers.append((*res, "".join(ga.components[i])))
        if v is not None and lowers:
            theta_lo = min(t for t, _, _ in lowers)
            ratio = min(min(u) / max(u) for _, u, _ in lowers)
            C1 = ratio * minpsi / theta_lo ** len(letters)
            C2 = maxpsi * max(v)
            return GrowthBounds(C1, C2, theta_lo, theta_hi, tuple(v),
                                tuple((comp, tuple(u)) for _, u, comp in lowers))
        width /= 10
        iterations *= 2
        denom *= 100
    raise CertificateError("could not certify growth bounds")
