"""Contraction onto triples [t w t'] so that every letter of the new substitution grows."""
from __future__ import annotations

from dataclasses import dataclass

from .bounded import LetterClass
from .words import Alphabet, MorphicSystem, Morphism, MorphismError


class DegenerateContraction(MorphismError):
    """The fixed point has fewer than two growing letters."""


Triple = tuple  # (t, w, t2) over letters of A


@dataclass(frozen=True)
class Contraction:
    C: Alphabet
    triples: tuple[Triple, ...]  # triples[i] is the letter chr(i) of C
    phi2: Morphism
    f: Morphism
    start: str

    def system(self, psi: Morphism) -> MorphicSystem:
        return MorphicSystem(self.phi2, psi.compose(self.f), self.start)


def _split(w: str, cls: LetterClass) -> tuple[str, list[tuple[str, str]]]:
    """w = w0 t1 w1 ... tk wk with ti growing and wi bounded."""
    head = []
    i = 0
    while i < len(w) and w[i] not in cls.growing:
        head.append(w[i])
        i += 1
    blocks: list[tuple[str, str]] = []
    while i < len(w):
        t = w[i]
        j = i + 1
        while j < len(w) and w[j] not in cls.growing:
            j += 1
        blocks.append((t, w[i + 1:j]))
        i = j
    return "".join(head), blocks


def _start_triple(sys: MorphicSystem, cls: LetterClass) -> Triple:
    """[a1 w1 a2] read off a1 v phi(v) phi^2(v) ...; while no growing letter has
    appeared every piece is bounded, and one appears within |A| pieces or never."""
    v = sys.phi[sys.a1][1:]
    seen = ""
    for _ in range(len(sys.A) + 1):
        for i, c in enumerate(v):
            if c in cls.growing:
                return (sys.a1, seen + v[:i], c)
        seen += v
        v = sys.phi(v)
    raise DegenerateContraction("fixed point has a single growing letter")


def triple_token(A: Alphabet, tr: Triple) -> str:
    t, w, t2 = tr
    return "[" + ".".join([A.token(t)] + [A.token(c) for c in w] + [A.token(t2)]) + "]"


def contract(sys: MorphicSystem, cls: LetterClass) -> Contraction:
    phi = sys.phi
    if sys.a1 not in cls.growing:
        raise DegenerateContraction("start letter is bounded")
    start = _start_triple(sys, cls)
    index = {start: 0}
    order = [start]
    images: list[list[Triple]] = []
    k = 0
    while k < len(order):
        t, w, t2 = order[k]
        _, blocks = _split(phi(t + w), cls)
        tail_head, tail_blocks = _split(phi(t2), cls)
        if not blocks or not tail_blocks:
            raise DegenerateContraction("growing letter with no growing letter in its image")
        img = []
        for i, (ti, wi) in enumerate(blocks):
            if i + 1 < len(blocks):
                img.append((ti, wi, blocks[i + 1][0]))
            else:
                img.append((ti, wi + tail_head, tail_blocks[0][0]))
        for tr in img:
            if tr not in index:
                index[tr] = len(order)
                order.append(tr)
        images.append(img)
        k += 1
    C = Alphabet(triple_token(sys.A, tr) for tr in order)
    phi2 = Morphism(C, C, ["".join(chr(index[tr]) for tr in img) for img in images])
    f = Morphism(C, sys.A, [t + w for t, w, _ in order])
    return Contraction(C, tuple(order), phi2, f, chr(0))
