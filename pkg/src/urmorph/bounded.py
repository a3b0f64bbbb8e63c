"""Bounded and growing letters, the graph Q, and the bounded-factor report."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .graph import reachable, scc, shortest_path
from .words import Alphabet, MorphicSystem, Morphism, factors


@dataclass(frozen=True)
class LetterClass:
    growing: frozenset[str]
    bounded: frozenset[str]

    def is_growing(self, a: str) -> bool:
        return a in self.growing

    def word_bounded(self, w: str) -> bool:
        return all(c in self.bounded for c in w)


def classify_letters(phi: Morphism) -> LetterClass:
    """A letter grows iff it reaches a cyclic letter whose image has length >= 2."""
    if not phi.non_erasing:
        raise ValueError("classification needs a non-erasing substitution")
    letters = phi.source.letters
    succ = phi.occurrence_graph()
    cyclic_long = set()
    for comp in scc(letters, succ):
        cyclic = len(comp) > 1 or comp[0] in succ[comp[0]]
        if cyclic and any(len(phi[c]) >= 2 for c in comp):
            cyclic_long.update(comp)
    growing = frozenset(a for a in letters if reachable([a], succ) & cyclic_long)
    return LetterClass(growing, frozenset(letters) - growing)


# Q vertices: (a,) growing letter; (a, b) ordered pair; (a, None) pair with the sentinel t.
Vertex = tuple


@dataclass(frozen=True)
class QEdge:
    src: Vertex
    dst: Vertex
    left: str   # first word of the label
    right: str  # second word of the label

    @property
    def empty(self) -> bool:
        return not self.left and not self.right


@dataclass
class GraphQ:
    vertices: list[Vertex]
    edges: list[QEdge]
    start: Vertex

    def succ(self) -> dict[Vertex, list[QEdge]]:
        out: dict[Vertex, list[QEdge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.src].append(e)
        return out

    def reachable_vertices(self) -> set[Vertex]:
        nbrs = {v: [e.dst for e in es] for v, es in self.succ().items()}
        return reachable([self.start], nbrs)

    def to_dot(self, alphabet: Alphabet) -> str:
        def name(v):
            return "".join(alphabet.token(c) if c is not None else "t" for c in v)

        def word(w):
            return alphabet.render(w) or "ε"

        lines = ["digraph Q {"]
        for v in self.vertices:
            lines.append(f'  "{name(v)}";')
        for e in self.edges:
            lines.append(f'  "{name(e.src)}" -> "{name(e.dst)}" [label="{{{word(e.left)},{word(e.right)}}}"];')
        lines.append("}")
        return "\n".join(lines)


def _growing_positions(w: str, cls: LetterClass) -> list[int]:
    return [i for i, c in enumerate(w) if c in cls.growing]


def build_graph_q(phi: Morphism, cls: LetterClass, a1: str) -> GraphQ:
    if not cls.growing:
        raise ValueError("graph Q needs at least one growing letter")
    grow = sorted(cls.growing, key=ord)
    vertices: list[Vertex] = [(a,) for a in grow]
    vertices += [(a, b) for a in grow for b in grow]
    vertices += [(a, None) for a in grow]
    edges: set[QEdge] = set()
    for x in grow:
        img = phi[x]
        pos = _growing_positions(img, cls)
        for p in pos:
            edges.add(QEdge((x,), (img[p],), "", ""))
        for p, q in zip(pos, pos[1:]):
            edges.add(QEdge((x,), (img[p], img[q]), img[p + 1:q], ""))
        last = pos[-1]
        tail = img[last + 1:]
        edges.add(QEdge((x,), (img[last], None), tail, ""))
        edges.add(QEdge((x, None), (img[last], None), tail, ""))
    for x in grow:
        ix = phi[x]
        lx = _growing_positions(ix, cls)[-1]
        for y in grow:
            iy = phi[y]
            fy = _growing_positions(iy, cls)[0]
            edges.add(QEdge((x, y), (ix[lx], iy[fy]), ix[lx + 1:], iy[:fy]))
    order = {v: i for i, v in enumerate(vertices)}
    edge_list = sorted(edges, key=lambda e: (order[e.src], order[e.dst], e.left, e.right))
    return GraphQ(vertices, edge_list, (a1,))


@dataclass(frozen=True)
class Finite:
    words: frozenset[str]


@dataclass(frozen=True)
class InfinitePower:
    U: str


BoundedFactorReport = Union[Finite, InfinitePower]


def _subwords(w: str) -> set[str]:
    return {w[i:j] for i in range(len(w) + 1) for j in range(i, len(w) + 1)}


def _nonempty_cycle(q: GraphQ) -> list[QEdge] | None:
    """A cycle reachable from the start vertex carrying some nonempty label."""
    live = q.reachable_vertices()
    succ = q.succ()
    nbrs = {v: [e.dst for e in succ[v] if e.dst in live] for v in live}
    order = [v for v in q.vertices if v in live]
    comp_of = {}
    for i, comp in enumerate(scc(order, nbrs)):
        for v in comp:
            comp_of[v] = i
    for v in order:
        for e in succ[v]:
            if e.dst in live and comp_of[e.dst] == comp_of[v] and not e.empty:
                back = shortest_path(e.dst, e.src, {u: [w for w in nbrs[u] if comp_of.get(w) == comp_of[v]]
                                                    for u in live})
                cycle = [e]
                for a, b in zip(back, back[1:]):
                    cycle.append(next(f for f in succ[a] if f.dst == b))
                return cycle
    return None


def _eventual_cycle(seq_start: str, step) -> list[str]:
    seen: dict[str, int] = {}
    xs: list[str] = []
    x = seq_start
    while x not in seen:
        seen[x] = len(xs)
        xs.append(x)
        x = step(x)
    return xs[seen[x]:]


def bounded_factors(phi: Morphism, a1: str, cls: LetterClass, q: GraphQ,
                    max_states: int = 200_000) -> BoundedFactorReport:
    cycle = _nonempty_cycle(q)
    if cycle is not None:
        L = len(cycle)
        P = Q = ""
        for e in cycle:
            P = e.left + phi(P)
            Q = phi(Q) + e.right
        phiL = phi.power(L)
        if P:
            period = _eventual_cycle(P, phiL)
            return InfinitePower("".join(period))
        period = _eventual_cycle(Q, phiL)
        return InfinitePower("".join(reversed(period)))
    succ = q.succ()
    start = (q.start, "")
    seen = {start}
    stack = [start]
    while stack:
        v, w = stack.pop()
        for e in succ[v]:
            nw = e.left + phi(w) + e.right
            state = (e.dst, nw)
            if state not in seen:
                seen.add(state)
                stack.append(state)
                if len(seen) > max_states:
                    raise RuntimeError("bounded-factor enumeration exceeded its state cap")
    words: set[str] = {""}
    for _, w in seen:
        words |= _subwords(w)
    return Finite(frozenset(words))


def analyze(sys: MorphicSystem) -> tuple[LetterClass, GraphQ | None, BoundedFactorReport]:
    cls = classify_letters(sys.phi)
    if not cls.bounded:
        return cls, None, Finite(frozenset({""}))
    q = build_graph_q(sys.phi, cls, sys.a1)
    return cls, q, bounded_factors(sys.phi, sys.a1, cls, q)


def is_rotation(v: str, u: str) -> bool:
    return len(v) == len(u) and v in u + u


def periodic_with_period(sys: MorphicSystem, u: str) -> bool:
    """True iff the morphic word is ``u u u ...`` up to the rotation fixed by its prefix."""
    if not u:
        raise ValueError("period must be nonempty")
    return all(is_rotation(v, u) for v in factors(sys, len(u)))
