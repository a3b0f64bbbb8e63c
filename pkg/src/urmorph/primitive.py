"""The primitive core H of an all-growing system and the reduced decision instance."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, lcm

from .bounded import periodic_with_period
from .graph import reachable, scc, shortest_cycle_length
from .growth import GrowthBounds, growth_bounds
from .words import MorphicSystem, Morphism, preimage_factors_upto, prefix, restrict


def recurrent_letters(phi: Morphism) -> set[str]:
    succ = phi.occurrence_graph()
    return {a for a in phi.source.letters if shortest_cycle_length(a, succ) is not None}


@dataclass(frozen=True)
class PrimitiveCore:
    D: frozenset[str]   # letters of the ambient alphabet
    rho2: Morphism      # on the re-indexed alphabet of H
    d0: str             # ambient letter
    H: MorphicSystem
    n: int
    l: int
    embed: dict = field(compare=False)  # ambient letter -> H letter

    @property
    def power(self) -> int:
        """rho2 = phi^power on D."""
        return self.n * self.l


def _is_primitive(phi: Morphism) -> bool:
    letters = phi.source.letters
    k = len(letters)
    m = phi.power(1)
    for _ in range((k - 1) ** 2 + 1):
        if all(set(letters) <= set(m[a]) for a in letters):
            return True
        m = m.compose(phi)
    return False


def extract_core(sys: MorphicSystem) -> PrimitiveCore:
    phi = sys.phi
    succ = phi.occurrence_graph()
    cyc = [shortest_cycle_length(a, succ) for a in recurrent_letters(phi)]
    n = lcm(*cyc) if cyc else 1
    rho = phi.power(n)
    rsucc = rho.occurrence_graph()
    live = reachable([sys.a1], rsucc)
    sinks = []
    for comp in scc(sorted(live, key=ord), {a: [b for b in rsucc[a]] for a in live}):
        members = set(comp)
        if all(b in members for a in comp for b in rsucc[a]):
            sinks.append(comp)
    D = min(sinks, key=lambda comp: min(map(ord, comp)))
    d = min(D, key=ord)
    seen: dict[str, int] = {}
    while d not in seen:
        seen[d] = len(seen)
        d = rho[d][0]
    l = len(seen) - seen[d]
    rho2 = rho.power(l)
    H = restrict(rho2, sys.psi, D, d)
    keep = sorted(D, key=ord)
    embed = {a: chr(i) for i, a in enumerate(keep)}
    return PrimitiveCore(frozenset(D), H.phi, d, H, n, l, embed)


@dataclass(frozen=True)
class PeriodicityVerdict:
    period: str | None
    n_checked: int
    heuristic: bool  # aperiodicity rests on the finite Morse-Hedlund window


def default_nmax(H: MorphicSystem, theta_hi: float = 2.0, cap: int = 400) -> int:
    return min(cap, max(4, len(H.A) * H.phi.max_length * ceil(theta_hi) ** 2))


def is_periodic_primitive(H: MorphicSystem, n_max: int | None = None) -> PeriodicityVerdict:
    """Least period of H if it is at most ``n_max``.

    A uniformly recurrent word with p(n) <= n for some n is purely periodic with
    period at most n, so a prefix of length 4 n_max exposes any such period; the
    candidate is then confirmed on the exact factor set."""
    if n_max is None:
        n_max = default_nmax(H)
    x = prefix(H, 4 * n_max)
    for q in range(1, n_max + 1):
        if x[q:] == x[:-q] and periodic_with_period(H, x[:q]):
            return PeriodicityVerdict(x[:q], q, False)
    return PeriodicityVerdict(None, n_max, True)


class HOracle:
    """Exact factor test for a primitive morphic word.

    ``w`` is a factor of H iff it lies in psi(rho^j(xy)) for a 2-factor ``xy`` of the
    fixed point, once every psi(rho^j(c)) has length at least |w|."""

    SEP = "\uffff"

    def __init__(self, H: MorphicSystem):
        self.H = H
        self.pairs = sorted(w for w in preimage_factors_upto(H.phi, H.a1, 2) if len(w) == 2)
        self._levels: list[str] = []
        self._minlen: list[int] = []
        self._images = list(self.pairs)
        self._letters = list(H.A.letters)

    def _level(self, j: int) -> str:
        while len(self._levels) <= j:
            if self._levels:
                self._images = [self.H.phi(w) for w in self._images]
                self._letters = [self.H.phi(w) for w in self._letters]
            self._levels.append(self.SEP.join(self.H.psi(w) for w in self._images))
            self._minlen.append(min(len(self.H.psi(w)) for w in self._letters))
        return self._levels[j]

    def level_for(self, n: int) -> int:
        j = 0
        while True:
            self._level(j)
            if self._minlen[j] >= n:
                return j
            j += 1

    def __contains__(self, w: str) -> bool:
        if not w:
            return True
        return w in self._level(self.level_for(len(w)))


@dataclass(frozen=True)
class NosInstance:
    g: Morphism
    h: Morphism
    phi: Morphism
    psi: Morphism
    c1: str
    bounds: GrowthBounds
    sources: tuple[str, ...]  # factors of length 1 and 2 of g's fixed point
    core: PrimitiveCore

    def working_word(self, q: str, k: int) -> str:
        return self.h(self.g.power(k)(q)) if k else self.h(q)


def make_nos_instance(sys: MorphicSystem, core: PrimitiveCore) -> NosInstance:
    H = core.H
    sources = tuple(sorted(preimage_factors_upto(sys.phi, sys.a1, 2), key=lambda w: (len(w), w)))
    return NosInstance(sys.phi, sys.psi, H.phi, H.psi, H.a1,
                       growth_bounds(sys.phi, sys.psi), sources, core)
