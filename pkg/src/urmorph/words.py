"""Alphabets, words, morphisms and morphic words.

A word is a ``str`` whose characters are letter ids: letter number ``i`` of an
alphabet is the character ``chr(i)``.  The :class:`Alphabet` owns the mapping
between ids and the printable tokens used in rule files.  Keeping words as
strings lets substitution use ``str.translate`` and factor tests use ``in``.
"""
from __future__ import annotations

from functools import cached_property
from typing import Iterable, Mapping


class MorphismError(ValueError):
    pass


class NotProlongable(MorphismError):
    pass


class FiniteWordError(MorphismError):
    """The generated word is finite."""


class Alphabet:
    """Ordered finite set of tokens; letter ``i`` is written ``chr(i)`` in words."""

    __slots__ = ("tokens", "_index")

    def __init__(self, tokens: Iterable[str]):
        tokens = tuple(tokens)
        if not tokens:
            raise ValueError("alphabet must be nonempty")
        if len(set(tokens)) != len(tokens):
            raise ValueError(f"duplicate symbols in alphabet {tokens}")
        self.tokens = tokens
        self._index = {t: chr(i) for i, t in enumerate(tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.tokens == other.tokens

    def __hash__(self) -> int:
        return hash(self.tokens)

    def __repr__(self) -> str:
        return f"Alphabet({' '.join(self.tokens)})"

    @property
    def letters(self) -> str:
        return "".join(chr(i) for i in range(len(self.tokens)))

    def __contains__(self, letter: str) -> bool:
        return len(letter) == 1 and ord(letter) < len(self.tokens)

    def letter(self, token: str) -> str:
        try:
            return self._index[token]
        except KeyError:
            raise MorphismError(f"symbol {token!r} not in alphabet") from None

    def token(self, letter: str) -> str:
        return self.tokens[ord(letter)]

    def word(self, tokens: Iterable[str] | str) -> str:
        """Build a word from tokens; a plain string is split into characters
        when every token of the alphabet is a single character."""
        if isinstance(tokens, str):
            if " " in tokens:
                tokens = tokens.split()
            else:
                tokens = list(tokens)
        return "".join(self.letter(t) for t in tokens)

    def render(self, word: str, sep: str | None = None) -> str:
        if sep is None:
            sep = "" if all(len(t) == 1 for t in self.tokens) else " "
        return sep.join(self.tokens[ord(c)] for c in word)

    def check(self, word: str) -> None:
        n = len(self.tokens)
        for c in word:
            if ord(c) >= n:
                raise MorphismError(f"letter id {ord(c)} outside alphabet of size {n}")


class Morphism:
    """Morphism ``source* -> target*`` given by letter images."""

    __slots__ = ("source", "target", "images", "__dict__")

    def __init__(self, source: Alphabet, target: Alphabet, images: Mapping[str, str] | Iterable[str]):
        if isinstance(images, Mapping):
            imgs = []
            for a in source.letters:
                if a not in images:
                    raise MorphismError(f"no image for letter {source.token(a)!r}")
                imgs.append(images[a])
        else:
            imgs = list(images)
        if len(imgs) != len(source):
            raise MorphismError("image count does not match source alphabet")
        for w in imgs:
            target.check(w)
        self.source = source
        self.target = target
        self.images: tuple[str, ...] = tuple(imgs)

    @classmethod
    def from_tokens(cls, source: Alphabet, target: Alphabet, rules: Mapping[str, Iterable[str] | str]):
        return cls(source, target, {source.letter(a): target.word(w) for a, w in rules.items()})

    @classmethod
    def identity(cls, alphabet: Alphabet) -> Morphism:
        return cls(alphabet, alphabet, list(alphabet.letters))

    def __call__(self, w: str) -> str:
        return w.translate(self._table)

    def __getitem__(self, letter: str) -> str:
        return self.images[ord(letter)]

    def __eq__(self, other) -> bool:
        return (isinstance(other, Morphism) and self.source == other.source
                and self.target == other.target and self.images == other.images)

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.images))

    def __repr__(self) -> str:
        rules = ", ".join(
            f"{self.source.token(a)}->{self.target.render(self.images[ord(a)]) or 'ε'}"
            for a in self.source.letters)
        return f"Morphism({rules})"

    @cached_property
    def _table(self) -> dict[int, str]:
        return {i: w for i, w in enumerate(self.images)}

    @property
    def non_erasing(self) -> bool:
        return all(self.images)

    @property
    def coding(self) -> bool:
        return all(len(w) == 1 for w in self.images)

    @property
    def max_length(self) -> int:
        return max(len(w) for w in self.images)

    def compose(self, inner: Morphism) -> Morphism:
        """``self ∘ inner``."""
        if inner.target != self.source:
            raise MorphismError("alphabet mismatch in composition")
        return Morphism(inner.source, self.target, [self(w) for w in inner.images])

    def power(self, k: int) -> Morphism:
        if self.source != self.target:
            raise MorphismError("only substitutions can be iterated")
        images = list(self.source.letters)
        for _ in range(k):
            images = [self(w) for w in images]
        return Morphism(self.source, self.target, images)

    def occurrence_graph(self) -> dict[str, set[str]]:
        """Edges a -> b whenever b occurs in the image of a."""
        return {a: set(self.images[ord(a)]) for a in self.source.letters}


def apply(m: Morphism, w: str) -> str:
    m.source.check(w)
    return m(w)


def mortal_letters(m: Morphism) -> set[str]:
    mortal: set[str] = set()
    changed = True
    while changed:
        changed = False
        for a in m.source.letters:
            if a not in mortal and all(c in mortal for c in m[a]):
                mortal.add(a)
                changed = True
    return mortal


class MorphicSystem:
    """The word ``psi(phi^inf(a1))``."""

    __slots__ = ("A", "B", "a1", "phi", "psi", "__dict__")

    def __init__(self, phi: Morphism, psi: Morphism, a1: str):
        if phi.source != phi.target:
            raise MorphismError("phi must be a substitution")
        if psi.source != phi.source:
            raise MorphismError("psi must be defined on the alphabet of phi")
        if a1 not in phi.source:
            raise MorphismError("start letter outside alphabet")
        self.A = phi.source
        self.B = psi.target
        self.a1 = a1
        self.phi = phi
        self.psi = psi

    def __repr__(self) -> str:
        return f"MorphicSystem(start={self.A.token(self.a1)}, phi={self.phi}, psi={self.psi})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, MorphicSystem) and self.a1 == other.a1
                and self.phi == other.phi and self.psi == other.psi)

    def __hash__(self) -> int:
        return hash((self.a1, self.phi, self.psi))

    @property
    def normalized(self) -> bool:
        return self.phi.non_erasing and self.psi.coding

    def check_prolongable(self) -> None:
        img = self.phi[self.a1]
        if not img or img[0] != self.a1:
            raise NotProlongable(f"phi({self.A.token(self.a1)}) does not begin with the start letter")
        mortal = mortal_letters(self.phi)
        if all(c in mortal for c in img[1:]):
            raise NotProlongable("tail of phi(a1) consists of mortal letters; the fixed point is finite")

    def iterate(self, k: int) -> str:
        w = self.a1
        for _ in range(k):
            w = self.phi(w)
        return w

    def preimage_prefix(self, n: int) -> str:
        """A prefix of ``phi^inf(a1)`` of length at least ``n``."""
        return _fixed_point_prefix(self.phi, self.a1, n)


def _fixed_point_prefix(phi: Morphism, a1: str, n: int) -> str:
    """Read x[i] and append phi(x[i]); valid because x = phi(x) and phi(a1) starts with a1."""
    img = phi[a1]
    if not img or img[0] != a1:
        raise NotProlongable("phi(a1) does not begin with a1")
    parts = [img]
    size = len(img)
    x = img
    i = 1
    while size < n:
        if i >= len(x):
            x = "".join(parts)
            parts = [x]
            if i >= len(x):
                raise FiniteWordError("fixed point is finite")
        # read a block at a time from the part already materialised
        j = min(len(x), i + max(1, n - size))
        chunk = phi(x[i:j])
        parts.append(chunk)
        size += len(chunk)
        i = j
        if i >= len(x):
            x = "".join(parts)
            parts = [x]
    return "".join(parts)


def prefix(sys: MorphicSystem, n: int) -> str:
    """First ``n`` symbols of ``psi(phi^inf(a1))``.

    Works for erasing ``phi`` and ``psi`` too: ``phi^k(a1)`` is a prefix of
    ``phi^(k+1)(a1)``, so images of the iterates are nested prefixes."""
    sys.check_prolongable()
    if sys.psi.non_erasing:
        return sys.psi(_fixed_point_prefix(sys.phi, sys.a1, n))[:n]
    w = sys.a1
    out = sys.psi(w)
    stalls = 0
    while len(out) < n:
        w2 = sys.phi(w)
        out2 = sys.psi(w2)
        if len(out2) == len(out):
            stalls += 1
            if stalls > len(sys.A) + 2:
                raise FiniteWordError("generated word is finite")
        else:
            stalls = 0
        w, out = w2, out2
    return out[:n]


def _windows(w: str, n: int) -> Iterable[str]:
    return (w[i:i + n] for i in range(len(w) - n + 1))


def preimage_factors_upto(phi: Morphism, a1: str, n: int) -> set[str]:
    """All factors of length ``<= n`` of ``phi^inf(a1)`` for non-erasing ``phi``.

    Closure: a factor of length ``<= n`` of ``phi^(k+1)(a1)`` lies inside
    ``phi(u)`` for a factor ``u`` of ``phi^k(a1)`` with ``|u| <= n``."""
    if not phi.non_erasing:
        raise MorphismError("factor closure needs a non-erasing substitution")
    found = {a1}
    frontier = [a1]
    while frontier:
        nxt = []
        for u in frontier:
            img = phi(u)
            for m in range(1, min(n, len(img)) + 1):
                for v in _windows(img, m):
                    if v not in found:
                        found.add(v)
                        nxt.append(v)
        frontier = nxt
    return found


def factors(sys: MorphicSystem, n: int) -> set[str]:
    """Exact set of length-``n`` factors of the morphic word (``phi`` and ``psi`` non-erasing)."""
    if n < 1:
        raise ValueError("factor length must be positive")
    if not sys.psi.non_erasing:
        raise MorphismError("factors needs a non-erasing psi")
    out: set[str] = set()
    for u in _fixed_point_factors(sys.phi, sys.a1, n):
        out.update(_windows(sys.psi(u), n))
    return out


def _fixed_point_factors(phi: Morphism, a1: str, n: int) -> set[str]:
    """Length-``n`` factors of ``phi^inf(a1)``, for prolongable non-erasing ``phi``.

    A window of ``x = phi(x)`` lies in ``phi(x[j:j+n])`` with ``j`` strictly before the
    window, or with ``j = 0``; so closing ``{x[:n]}`` under windows of images is exact."""
    if not phi.non_erasing:
        raise MorphismError("factor closure needs a non-erasing substitution")
    start = _fixed_point_prefix(phi, a1, n)[:n]
    found = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            for v in _windows(phi(u), n):
                if v not in found:
                    found.add(v)
                    nxt.append(v)
        frontier = nxt
    return found


def occurs(sys: MorphicSystem, u: str) -> bool:
    if not u:
        raise ValueError("empty query word")
    return u in factors(sys, len(u))


def reachable_letters(phi: Morphism, a1: str) -> set[str]:
    seen = {a1}
    stack = [a1]
    while stack:
        a = stack.pop()
        for b in phi[a]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return seen


def restrict(phi: Morphism, psi: Morphism, keep: Iterable[str], a1: str) -> MorphicSystem:
    """Re-index a system on the letters ``keep`` (closed under phi), preserving order."""
    keep = sorted(set(keep), key=ord)
    A = Alphabet(phi.source.token(a) for a in keep)
    remap = {ord(a): chr(i) for i, a in enumerate(keep)}
    new_phi = Morphism(A, A, [phi[a].translate(remap) for a in keep])
    new_psi = Morphism(A, psi.target, [psi[a] for a in keep])
    return MorphicSystem(new_phi, new_psi, a1.translate(remap))


def restrict_reachable(sys: MorphicSystem) -> MorphicSystem:
    keep = reachable_letters(sys.phi, sys.a1)
    if len(keep) == len(sys.A):
        return sys
    return restrict(sys.phi, sys.psi, keep, sys.a1)


# ---------------------------------------------------------------------------
# normalization


class NormalizationError(MorphismError):
    pass


_BLOCK_CAP = 5000


def _fixed_point_blocks(g: Morphism, a1: str, good: set[str], n_blocks: int = 2) -> list[tuple[str, str]]:
    """Leading blocks ``(c, m)`` of ``g^inf(a1)``: a good letter ``c`` and the run ``m`` of bad letters after it."""
    w = a1
    for _ in range(64):
        blocks = []
        cur = None
        for ch in w:
            if ch in good:
                if cur is not None:
                    blocks.append(cur)
                cur = (ch, "")
            else:
                cur = (cur[0], cur[1] + ch)
        if len(blocks) >= n_blocks:
            return blocks
        w2 = g(w)
        if len(w2) > 10**6:
            break
        w = w2
    raise FiniteWordError("could not find two good letters in the fixed point")


def _merge_blocks(g: Morphism, f: Morphism, a1: str, good: set[str], power: int) -> tuple[Morphism, Morphism, str]:
    """Regroup ``g^inf(a1)`` into letters ``(c, m, c')``.

    ``c`` is a good letter, ``m`` the bad run following it and ``c'`` the next
    good letter.  With ``h = g^power`` every good letter's image must contain a
    good letter and ``h(a1)`` must begin with ``a1``.  The new substitution is
    non-erasing and the new morphism maps ``(c, m, c')`` to ``f(c m)``."""
    h = g.power(power)
    info = {}
    for c in good:
        img = h[c]
        pos = [i for i, ch in enumerate(img) if ch in good]
        if not pos:
            raise NormalizationError("good letter with no good letter in its image")
        info[c] = (img[:pos[0]], img[pos[0]])  # leading bad run, first good letter
    if a1 not in good or h[a1][:1] != a1:
        raise NormalizationError("start letter must be good and prolongable")
    (c1, m1), (c2, _) = _fixed_point_blocks(g, a1, good)[:2]
    start = (c1, m1, c2)

    def image(t):
        c, m, c_next = t
        img = h(c + m)
        lead = info[c][0]
        img = img[len(lead):]
        out = []
        cur_c, cur_m = None, ""
        for ch in img:
            if ch in good:
                if cur_c is not None:
                    out.append((cur_c, cur_m, ch))
                cur_c, cur_m = ch, ""
            else:
                cur_m += ch
        nlead, nfirst = info[c_next]
        out.append((cur_c, cur_m + nlead, nfirst))
        return out

    order = [start]
    index = {start: 0}
    images = []
    i = 0
    while i < len(order):
        img = image(order[i])
        for t in img:
            if t not in index:
                index[t] = len(order)
                order.append(t)
                if len(order) > _BLOCK_CAP:
                    raise NormalizationError("block alphabet does not close (unbounded bad runs)")
        images.append(img)
        i += 1
    src = g.source
    tokens = []
    for c, m, c2 in order:
        tok = "[" + src.token(c) + "".join("." + src.token(x) for x in m) + "|" + src.token(c2) + "]"
        tokens.append(tok)
    C = Alphabet(tokens)
    new_g = Morphism(C, C, ["".join(chr(index[t]) for t in img) for img in images])
    new_f = Morphism(C, f.target, [f(c + m) for c, m, _ in order])
    return new_g, new_f, chr(0)


def _reindex(g: Morphism, f: Morphism, a1: str) -> MorphicSystem:
    return restrict_reachable(MorphicSystem(g, f, a1))


def _invisible(g: Morphism, f: Morphism) -> set[str]:
    """Letters all of whose descendants are erased by ``f`` (greatest fixpoint)."""
    z = {a for a in g.source.letters if not f[a]}
    changed = True
    while changed:
        changed = False
        for a in list(z):
            if any(c not in z for c in g[a]):
                z.discard(a)
                changed = True
    return z


def _split_for_coding(g: Morphism, f: Morphism, a1: str) -> MorphicSystem:
    """Split letter ``a`` into ``|f(a)|`` letters; requires ``|f(g(a))| >= |f(a)|``."""
    src = g.source
    parts = {}
    tokens = []
    for a in src.letters:
        n = len(f[a])
        parts[a] = [len(tokens) + i for i in range(n)]
        if n == 1:
            tokens.append(src.token(a))
        else:
            tokens.extend(f"{src.token(a)}~{i}" for i in range(n))
    C = Alphabet(tokens)
    split = {ord(a): "".join(chr(i) for i in parts[a]) for a in src.letters}
    images = [""] * len(tokens)
    codes = [""] * len(tokens)
    for a in src.letters:
        big = g[a].translate(split)
        k = len(parts[a])
        # distribute len(big) letters over k nonempty chunks, the first chunk takes the slack
        sizes = [1] * k
        sizes[0] += len(big) - k
        pos = 0
        for idx, size in zip(parts[a], sizes):
            images[idx] = big[pos:pos + size]
            pos += size
        for j, idx in enumerate(parts[a]):
            codes[idx] = f[a][j]
    new_g = Morphism(C, C, images)
    new_f = Morphism(C, f.target, codes)
    return MorphicSystem(new_g, new_f, chr(parts[a1][0]))


def normalize(f: Morphism, g: Morphism, a1: str, max_rounds: int = 12) -> MorphicSystem:
    """System with non-erasing substitution and coding generating ``f(g^inf(a1))``.

    Each round applies one word-preserving rewrite: regrouping around mortal
    letters, deleting letters invisible under ``f``, regrouping around erased
    letters, and finally splitting letters for a coding."""
    sys = MorphicSystem(g, f, a1)
    sys.check_prolongable()
    prefix(sys, 1)  # rejects a finite image early
    for _ in range(max_rounds):
        g, f, a1 = sys.phi, sys.psi, sys.a1
        A = g.source
        if len(A) > _BLOCK_CAP:
            raise NormalizationError("alphabet grew beyond the cap")
        mortal = mortal_letters(g)
        if mortal:
            good = set(A.letters) - mortal
            if a1 in mortal:
                raise NotProlongable("start letter is mortal")
            g2, f2, s = _merge_blocks(g, f, a1, good, len(A))
            sys = _reindex(g2, f2, s)
            continue
        invisible = _invisible(g, f)
        if invisible:
            if a1 in invisible:
                raise FiniteWordError("generated word is empty")
            keep = set(A.letters) - invisible
            dropped = {ord(z): None for z in invisible}
            g2 = Morphism(A, A, [w.translate(dropped) for w in g.images])
            sys = restrict(g2, f, keep, a1)
            continue
        erased = {a for a in A.letters if not f[a]}
        if erased:
            good = set(A.letters) - erased
            for p in range(1, 2 * len(A) + 2):
                try:
                    g2, f2, s = _merge_blocks(g, f, a1, good, p)
                except NormalizationError:
                    continue
                break
            else:
                raise NormalizationError("could not regroup erased letters")
            sys = _reindex(g2, f2, s)
            continue
        if f.coding:
            return restrict_reachable(sys)
        lengths = [len(w) for w in f.images]
        chosen = None
        bound = 2 * len(A) + 2
        for p in range(1, bound * 4):
            gp = g.power(p)
            if all(len(f(gp[a])) >= lengths[ord(a)] for a in A.letters):
                chosen = gp
                break
        if chosen is not None:
            return restrict_reachable(_split_for_coding(chosen, f, a1))
        # letters that never regain their f-length are merged into their good neighbours
        best = None
        for p in range(1, bound + 1):
            gp = g.power(p)
            good = {a for a in A.letters if len(f(gp[a])) >= lengths[ord(a)]}
            if a1 in good and (best is None or len(good) > len(best[1])):
                best = (p, good)
        if best is None:
            raise NormalizationError("start letter cannot be split into a coding")
        g2, f2, s = _merge_blocks(g, f, a1, best[1], best[0])
        sys = _reindex(g2, f2, s)
    raise NormalizationError("normalization did not converge")
