"""Rauzy schemes: graphs with front and back words on edges, and their evolution.

Edge keys are positive ints in a numbered scheme, or ``(i, j)`` pairs for the
bipartite gadget edges that exist between an evolution and its renumbering.
Paths are tuples of edge keys.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterator

from .graph import scc
from .words import MorphicSystem, factors

DIST, COLL = "D", "C"

Key = Hashable
Path = tuple


class SchemeError(ValueError):
    pass


def sort_key(k: Key) -> tuple:
    if isinstance(k, tuple):
        return (1,) + tuple(sort_key(x) for x in k)
    return (0, k)


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    front: str
    back: str


class Scheme:
    """A graph with words whose vertices are distributing or collecting."""

    def __init__(self, edges: dict[Key, Edge]):
        self.edges = dict(edges)
        self.keys = sorted(self.edges, key=sort_key)
        self.out: dict[int, list[Key]] = {}
        self.inc: dict[int, list[Key]] = {}
        for k in self.keys:
            e = self.edges[k]
            self.out.setdefault(e.src, []).append(k)
            self.inc.setdefault(e.dst, []).append(k)
            self.out.setdefault(e.dst, [])
            self.inc.setdefault(e.src, [])
        self.kind: dict[int, str] = {}
        for v in self.out:
            i, o = len(self.inc[v]), len(self.out[v])
            if i == 1 and o > 1:
                self.kind[v] = DIST
            elif i > 1 and o == 1:
                self.kind[v] = COLL
            else:
                raise SchemeError(f"vertex {v} has in-degree {i} and out-degree {o}")

    # -- structure -----------------------------------------------------------------

    @property
    def vertices(self) -> list[int]:
        return sorted(self.out)

    def supporting(self) -> list[Key]:
        return [k for k in self.keys
                if self.kind[self.edges[k].src] == COLL and self.kind[self.edges[k].dst] == DIST]

    @property
    def scale(self) -> int:
        return min(len(self.edges[k].front) for k in self.supporting())

    def max_word(self) -> int:
        return max(max(len(e.front), len(e.back)) for e in self.edges.values())

    def lightened(self) -> tuple:
        """Topology and numbering only: ``(src, dst)`` per edge in key order, vertices
        renamed by first appearance."""
        ids: dict[int, int] = {}
        out = []
        for k in self.keys:
            e = self.edges[k]
            for v in (e.src, e.dst):
                if v not in ids:
                    ids[v] = len(ids)
            out.append((k, ids[e.src], ids[e.dst]))
        return tuple(out)

    # -- paths ---------------------------------------------------------------------

    def is_path(self, p: Path) -> bool:
        if not p or any(k not in self.edges for k in p):
            return False
        return all(self.edges[a].dst == self.edges[b].src for a, b in zip(p, p[1:]))

    def is_symmetric(self, p: Path) -> bool:
        return (self.is_path(p) and self.kind[self.edges[p[0]].src] == COLL
                and self.kind[self.edges[p[-1]].dst] == DIST)

    def front_generators(self, p: Path) -> list[int]:
        return [0] + [i for i in range(1, len(p)) if self.kind[self.edges[p[i]].src] == DIST]

    def back_generators(self, p: Path) -> list[int]:
        last = len(p) - 1
        return [i for i in range(last) if self.kind[self.edges[p[i]].dst] == COLL] + [last]

    def front_word(self, p: Path) -> str:
        if not self.is_path(p):
            raise SchemeError(f"not a path: {p}")
        return "".join(self.edges[p[i]].front for i in self.front_generators(p))

    def back_word(self, p: Path) -> str:
        if not self.is_path(p):
            raise SchemeError(f"not a path: {p}")
        return "".join(self.edges[p[i]].back for i in self.back_generators(p))

    def right_ext(self, p: Path) -> Path:
        p = list(p)
        while self.kind[self.edges[p[-1]].dst] == COLL:
            p.append(self.out[self.edges[p[-1]].dst][0])
        return tuple(p)

    def left_ext(self, p: Path) -> Path:
        p = list(p)
        while self.kind[self.edges[p[0]].src] == DIST:
            p.insert(0, self.inc[self.edges[p[0]].src][0])
        return tuple(p)

    def trim_right(self, p: Path) -> Path:
        gens = self.front_generators(p)
        if len(gens) < 2:
            raise SchemeError("path has a single front generator")
        return p[:gens[-1]]

    def trim_left(self, p: Path) -> Path:
        gens = self.back_generators(p)
        if len(gens) < 2:
            raise SchemeError("path has a single back generator")
        return p[gens[0] + 1:]

    def cut(self, p: Path) -> Path:
        return self.trim_right(self.trim_left(p))

    def symmetric_paths(self, max_len: int, admissible: Callable[[str], bool] | None = None
                        ) -> Iterator[Path]:
        """Symmetric paths with at most ``max_len`` edges; with ``admissible``, only
        paths whose word passes it (prefixes are pruned by the same test)."""
        starts = [k for k in self.keys if self.kind[self.edges[k].src] == COLL]
        stack = [(k,) for k in reversed(starts)]
        while stack:
            p = stack.pop()
            if admissible is not None and not admissible(self.front_word(p)):
                continue
            if self.kind[self.edges[p[-1]].dst] == DIST:
                yield p
            if len(p) < max_len:
                for k in reversed(self.out[self.edges[p[-1]].dst]):
                    stack.append(p + (k,))

    def to_dot(self, render: Callable[[str], str] = str) -> str:
        lines = ["digraph S {"]
        for v in self.vertices:
            shape = "box" if self.kind[v] == COLL else "ellipse"
            lines.append(f'  v{v} [shape={shape}];')
        for k in self.keys:
            e = self.edges[k]
            lines.append(f'  v{e.src} -> v{e.dst} [label="{k}: {render(e.front)} / {render(e.back)}"];')
        lines.append("}")
        return "\n".join(lines)


def occurrences(u: str, w: str) -> int:
    if not u:
        return len(w) + 1
    n, i = 0, w.find(u)
    while i >= 0:
        n += 1
        i = w.find(u, i + 1)
    return n


def path_occurrences(s1: Path, s2: Path) -> int:
    m = len(s1)
    return sum(1 for i in range(len(s2) - m + 1) if s2[i:i + m] == s1)


def path_contains(big: Path, small: Path) -> bool:
    return path_occurrences(small, big) > 0


# ---------------------------------------------------------------------------------
# construction from Rauzy graphs


def _rauzy_scheme(words: set[str], longer: set[str]) -> Scheme | None:
    """Scheme from the Rauzy graph with vertex set ``words`` (length n) and edge set ``longer``."""
    succ: dict[str, list[str]] = {u: [] for u in words}
    pred: dict[str, list[str]] = {u: [] for u in words}
    for w in sorted(longer):
        succ[w[:-1]].append(w[-1])
        pred[w[1:]].append(w[0])
    nodes = sorted(words)
    comps = scc(nodes, {u: [(u + x)[1:] for x in succ[u]] for u in nodes})
    if len(comps) != 1:
        return None
    lspec = {u for u in nodes if len(pred[u]) > 1}
    rspec = {u for u in nodes if len(succ[u]) > 1}
    special = sorted(lspec | rspec)
    if not special:
        return None
    vid: dict[tuple[str, str], int] = {}
    for u in special:
        if u in lspec:
            vid[(u, COLL)] = len(vid)
        if u in rspec:
            vid[(u, DIST)] = len(vid)

    def out_node(u):
        return vid[(u, DIST)] if u in rspec else vid[(u, COLL)]

    def in_node(u):
        return vid[(u, COLL)] if u in lspec else vid[(u, DIST)]

    raw = []  # (src vertex, dst vertex, source factor, tails, target factor)
    for u in special:
        if u in lspec and u in rspec:
            raw.append((vid[(u, COLL)], vid[(u, DIST)], u, "", u))
        for x in succ[u]:
            tails = x
            cur = (u + x)[1:]
            while cur not in lspec and cur not in rspec:
                y = succ[cur][0]
                tails += y
                cur = (cur + y)[1:]
            raw.append((out_node(u), in_node(cur), u, tails, cur))
    kind = {v: k for (_, k), v in vid.items()}
    out: dict[int, list[int]] = {}
    inc: dict[int, list[int]] = {}
    for i, (s, d, *_rest) in enumerate(raw):
        out.setdefault(s, []).append(i)
        inc.setdefault(d, []).append(i)

    def heads(i):
        _, _, src, tails, _ = raw[i]
        return (src + tails)[:len(tails)]

    edges: dict[Key, Edge] = {}
    for i, (s, d, src, tails, dst) in enumerate(raw):
        # forward: tails up to the next distributing vertex
        f, j = tails, i
        while kind[raw[j][1]] == COLL:
            j = out[raw[j][1]][0]
            f += raw[j][3]
        if kind[s] == COLL:
            f = src + f
        # backward: heads back to the previous collecting vertex
        b, j = heads(i), i
        while kind[raw[j][0]] == DIST:
            j = inc[raw[j][0]][0]
            b = heads(j) + b
        if kind[d] == DIST:
            b = b + dst
        edges[i + 1] = Edge(s, d, f, b)
    try:
        return Scheme(edges)
    except SchemeError:
        return None


def renumber(S: Scheme) -> tuple[Scheme, dict[Key, int]]:
    """Canonical numbering: breadth-first over edges from the lowest key, successors in key order."""
    order: list[Key] = []
    seen: set[Key] = set()
    for root in S.keys:
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            k = queue.popleft()
            order.append(k)
            for nk in S.out[S.edges[k].dst]:
                if nk not in seen:
                    seen.add(nk)
                    queue.append(nk)
    mapping = {k: i + 1 for i, k in enumerate(order)}
    return Scheme({mapping[k]: e for k, e in S.edges.items()}), mapping


def build_scheme(H: MorphicSystem, min_scale: int = 1, max_order: int = 64) -> Scheme:
    for n in range(max(1, min_scale), max_order + 1):
        longer = factors(H, n + 1)
        words = {w[:-1] for w in longer}
        S = _rauzy_scheme(words, longer)
        if S is not None and len(S.keys) > 1 and S.supporting():
            return renumber(S)[0]
    raise SchemeError("no Rauzy scheme found; is H periodic?")


# ---------------------------------------------------------------------------------
# evolution


@dataclass(frozen=True)
class EvolutionRecord:
    """How edges of the evolved scheme correspond to paths in the previous one."""

    v: Key                          # the consumed supporting edge
    images: dict                    # new key -> tuple of old keys (gadget edges read as v)
    starts_after_v: frozenset       # new keys leaving a vertex that replaced the head of v
    ends_before_v: frozenset        # new keys entering a vertex that replaced the tail of v

    def map_path(self, p: Path) -> Path:
        """The path in the previous scheme with the same word."""
        out: list = []
        for k in p:
            out.extend(self.images[k])
        if p[0] in self.starts_after_v:
            out.insert(0, self.v)
        if p[-1] in self.ends_before_v:
            out.append(self.v)
        return tuple(out)

    def relabel(self, mapping: dict) -> "EvolutionRecord":
        return EvolutionRecord(self.v, {mapping[k]: im for k, im in self.images.items()},
                               frozenset(mapping[k] for k in self.starts_after_v),
                               frozenset(mapping[k] for k in self.ends_before_v))


@dataclass(frozen=True)
class ProtocolEntry:
    lightened: tuple
    bad: frozenset


@dataclass(frozen=True)
class Evolution:
    scheme: Scheme
    entry: ProtocolEntry
    record: EvolutionRecord


def elementary_evolution(S: Scheme, v: Key, is_factor: Callable[[str], bool]
                         ) -> tuple[Scheme, frozenset, EvolutionRecord]:
    ev = S.edges[v]
    if S.kind[ev.src] != COLL or S.kind[ev.dst] != DIST:
        raise SchemeError(f"edge {v} is not supporting")
    c, d = ev.src, ev.dst
    xs, ys = list(S.inc[c]), list(S.out[d])
    V = ev.front
    nxt = max(S.vertices) + 1
    A = {x: nxt + i for i, x in enumerate(xs)}
    nxt += len(xs)
    B = {y: nxt + j for j, y in enumerate(ys)}
    X = {x: S.edges[x].back for x in xs}
    Y = {y: S.edges[y].front for y in ys}
    prime: dict[Key, Edge] = {}
    for k in S.keys:
        if k == v:
            continue
        e = S.edges[k]
        prime[k] = Edge(B.get(k, e.src), A.get(k, e.dst),
                        V + Y[k] if k in B else e.front,
                        X[k] + V if k in A else e.back)
    bad = set()
    for x in xs:
        for y in ys:
            prime[(x, y)] = Edge(A[x], B[y], Y[y], X[x])
            if not is_factor(X[x] + V + Y[y]):
                bad.add((x, y))
    Sp = Scheme(prime)
    good = {k: e for k, e in prime.items() if k not in bad}
    gout: dict[int, list[Key]] = {u: [] for u in Sp.vertices}
    gin: dict[int, list[Key]] = {u: [] for u in Sp.vertices}
    for k in sorted(good, key=sort_key):
        gout[good[k].src].append(k)
        gin[good[k].dst].append(k)
    alive = set(Sp.vertices)
    changed = True
    while changed:
        changed = False
        for u in list(alive):
            if not [k for k in gout[u] if good[k].dst in alive] or not [k for k in gin[u] if good[k].src in alive]:
                alive.discard(u)
                changed = True
    keep = {k for k, e in good.items() if e.src in alive and e.dst in alive}
    gout = {u: [k for k in gout[u] if k in keep] for u in alive}
    gin = {u: [k for k in gin[u] if k in keep] for u in alive}
    solid = {u for u in alive if len(gout[u]) > 1 or len(gin[u]) > 1}
    chains: dict[Key, tuple] = {}
    ends: dict[Key, tuple[int, int]] = {}
    for u in sorted(solid):
        for k in gout[u]:
            path = [k]
            cur = good[k].dst
            while cur not in solid:
                nk = gout[cur][0]
                path.append(nk)
                cur = good[nk].dst
                if len(path) > len(keep):
                    raise SchemeError("evolution produced a cycle without branching")
            chains[k] = tuple(path)
            ends[k] = (u, cur)
    topo = Scheme({k: Edge(s, t, "", "") for k, (s, t) in ends.items()})
    edges: dict[Key, Edge] = {}
    for k in topo.keys:
        right = sum((chains[j] for j in topo.right_ext((k,))), ())
        left = sum((chains[j] for j in topo.left_ext((k,))), ())
        s, t = ends[k]
        edges[k] = Edge(s, t, Sp.front_word(right), Sp.back_word(left))
    S2 = Scheme(edges)
    Bv, Av = set(B.values()), set(A.values())
    record = EvolutionRecord(
        v,
        {k: tuple(v if isinstance(j, tuple) else j for j in chains[k]) for k in S2.keys},
        frozenset(k for k in S2.keys if ends[k][0] in Bv),
        frozenset(k for k in S2.keys if ends[k][1] in Av))
    return S2, frozenset(bad), record


def evolve(S: Scheme, is_factor: Callable[[str], bool]) -> Evolution:
    """Deterministic evolution along the lowest-numbered supporting edge."""
    v = min(S.supporting(), key=sort_key)
    S2, bad, record = elementary_evolution(S, v, is_factor)
    S3, mapping = renumber(S2)
    return Evolution(S3, ProtocolEntry(S.lightened(), bad), record.relabel(mapping))


# ---------------------------------------------------------------------------------
# minimal covering paths and gluing


class GlueMismatch(SchemeError):
    """The shared middle path is not aligned; an upstream size condition failed."""


def _minimize(S: Scheme, p: Path, covers: Callable[[Path], bool]) -> Path:
    while True:
        if len(S.back_generators(p)) > 1 and covers(S.trim_left(p)):
            p = S.trim_left(p)
        elif len(S.front_generators(p)) > 1 and covers(S.trim_right(p)):
            p = S.trim_right(p)
        else:
            return p


def _overhangs(text: str, pat: str) -> list[int]:
    """Lengths n >= 1 with ``text`` ending in ``pat[:n]`` (KMP over ``text``)."""
    if not text or not pat:
        return []
    fail = [0] * len(pat)
    q = 0
    for i in range(1, len(pat)):
        while q and pat[i] != pat[q]:
            q = fail[q - 1]
        if pat[i] == pat[q]:
            q += 1
        fail[i] = q
    q = 0
    for ch in text:
        if q == len(pat):
            q = fail[q - 1]
        while q and ch != pat[q]:
            q = fail[q - 1]
        if ch == pat[q]:
            q += 1
    out = []
    while q:
        out.append(q)
        q = fail[q - 1]
    return out


def locate_all(S: Scheme, A: str, is_factor: Callable[[str], bool] | None = None) -> list[Path]:
    """All minimal symmetric paths whose word contains ``A`` (admissible ones when
    ``is_factor`` is given), sorted canonically."""
    if not A:
        raise ValueError("empty word")
    cands: set[Path] = set()
    covers = lambda q: A in S.front_word(q)  # noqa: E731
    for e in S.keys:
        base = S.left_ext((e,))
        word = S.front_word(base)
        lo, tail = len(word) - len(S.edges[e].front), len(word) - len(A) + 1
        # full occurrences all give the base path itself, so one of them is enough
        o = word.find(A, lo)
        offsets = [o] if 0 <= o < tail else []
        m = len(word) - max(lo, tail)
        offsets += [len(word) - n for n in _overhangs(word[len(word) - m:], A[:m])]
        for o in offsets:
            path, w = list(base), word
            ok = True
            while len(w) < o + len(A):
                end = S.edges[path[-1]].dst
                if S.kind[end] == COLL:
                    path.append(S.out[end][0])
                    continue
                need = A[len(w) - o]
                nk = next((k for k in S.out[end] if S.edges[k].front[:1] == need), None)
                if nk is None:
                    ok = False
                    break
                f = S.edges[nk].front
                stop = min(len(f), o + len(A) - len(w))
                if f[:stop] != A[len(w) - o:len(w) - o + stop]:
                    ok = False
                    break
                path.append(nk)
                w += f
            if not ok:
                continue
            cands.add(_minimize(S, S.right_ext(tuple(path)), covers))
    found = {s for s in cands if is_factor is None or is_factor(S.front_word(s))}
    minimal = [s for s in found if not any(t != s and path_contains(s, t) for t in found)]
    return sorted(minimal, key=lambda s: (len(s), [sort_key(k) for k in s]))


def locate(S: Scheme, A: str, is_factor: Callable[[str], bool] | None = None) -> Path:
    paths = locate_all(S, A, is_factor)
    if not paths:
        raise SchemeError("word is not covered by any admissible symmetric path")
    return paths[0]


def glue(p_ab: Path, p_bc: Path, p_b: Path, admissible: Callable[[Path], bool]) -> Path | None:
    """Splice l(AB) and l(BC) along l(B); the splice if admissible, else None."""
    n = len(p_b)
    if n == 0 or n > len(p_ab) or n > len(p_bc) or p_ab[len(p_ab) - n:] != p_b or p_bc[:n] != p_b:
        raise GlueMismatch("middle path is not a suffix of the left path and a prefix of the right one")
    spliced = p_ab + p_bc[n:]
    return spliced if admissible(spliced) else None


# ---------------------------------------------------------------------------------
# ruled schemes, protocol, validation


@dataclass(frozen=True)
class TRuledScheme:
    lightened: tuple
    paths: frozenset
    T: int


def t_ruled(S: Scheme, is_factor: Callable[[str], bool], T: int) -> TRuledScheme:
    return TRuledScheme(S.lightened(), frozenset(S.symmetric_paths(T, is_factor)), T)


@dataclass
class Protocol:
    """Deterministic evolution from a start scheme with a detected eventual period."""

    schemes: list[Scheme]
    entries: list[ProtocolEntry]
    records: list[EvolutionRecord]   # records[t] maps scheme t+1 to scheme t
    preperiod: int
    period: int


class ProtocolNotPeriodic(RuntimeError):
    pass


def detect_protocol(S0: Scheme, is_factor: Callable[[str], bool], T: int = 6,
                    max_steps: int = 200, min_span: int = 16,
                    max_word: int = 1_000_000) -> Protocol:
    """Evolve until the (protocol entry, T-ruled scheme) sequence repeats with some
    period p over ``max(2p, min_span)`` consecutive steps. Gives up after ``max_steps``
    steps or once some edge word is longer than ``max_word``."""
    schemes, entries, records, keys = [S0], [], [], []

    def key(t: int):
        while len(keys) <= t:
            u = len(keys)
            if schemes[u].max_word() > max_word:
                raise ProtocolNotPeriodic(f"no repetition before edge words exceed {max_word} letters")
            ev = evolve(schemes[u], is_factor)
            entries.append(ev.entry)
            records.append(ev.record)
            schemes.append(ev.scheme)
            r = t_ruled(schemes[u], is_factor, T)
            keys.append((ev.entry, r.lightened, r.paths))
        return keys[t]

    first: dict = {}
    for t in range(max_steps):
        for s in first.get(key(t), []):
            p = t - s
            if all(key(s + i) == key(t + i) for i in range(max(2 * p, min_span))):
                return Protocol(schemes, entries, records, s, p)
        first.setdefault(key(t), []).append(t)
    raise ProtocolNotPeriodic(f"no repetition within {max_steps} steps")


@dataclass
class ValidationReport:
    violations: list[int]
    unverified: list[int]
    notes: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_scheme(S: Scheme, H: MorphicSystem, is_factor: Callable[[str], bool],
                    path_budget: int = 5, word_budget: int | None = None) -> ValidationReport:
    bad: set[int] = set()
    unverified: set[int] = set()
    notes: list[str] = []
    comps = scc(S.vertices, {u: [S.edges[k].dst for k in S.out[u]] for u in S.vertices})
    if len(comps) != 1 or len(S.keys) < 2:
        bad.add(1)
        notes.append("1: not strongly connected or a single edge")
    for u in S.vertices:
        if S.kind[u] == DIST:
            firsts = [S.edges[k].front[:1] for k in S.out[u]]
            if "" in firsts or len(set(firsts)) != len(firsts):
                bad.add(2)
                notes.append(f"2: front words out of vertex {u} share a first letter")
        else:
            lasts = [S.edges[k].back[-1:] for k in S.inc[u]]
            if "" in lasts or len(set(lasts)) != len(lasts):
                bad.add(2)
                notes.append(f"2: back words into vertex {u} share a last letter")
    for p in S.symmetric_paths(path_budget):
        if S.front_word(p) != S.back_word(p):
            bad.add(3)
            notes.append(f"3: front and back words differ on {p}")
            break
    adm = list(S.symmetric_paths(path_budget, is_factor))
    words = {p: S.front_word(p) for p in adm}
    for p1 in adm:
        for p2 in adm:
            if occurrences(words[p1], words[p2]) > path_occurrences(p1, p2):
                bad.add(4)
                notes.append(f"4: word of {p1} occurs in word of {p2} more often than the path")
                break
        if 4 in bad:
            break
    for k in S.keys:
        e = S.edges[k]
        if not (is_factor(e.front) and is_factor(e.back)):
            bad.add(5)
            notes.append(f"5: edge {k} carries a non-factor")
    n = word_budget or min(2 * S.max_word(), 4096)
    for u in sorted(factors(H, n)):
        if not locate_all(S, u, is_factor):
            bad.add(6)
            notes.append("6: an uncovered factor of length %d" % n)
            break
    for k in S.keys:
        if not _witness(S, k, is_factor, path_budget):
            unverified.add(7)
            notes.append(f"7: no forcing word found for edge {k}")
    return ValidationReport(sorted(bad), sorted(unverified), notes)


def _witness(S: Scheme, k: Key, is_factor, budget: int) -> str | None:
    core = S.right_ext(S.left_ext((k,)))
    cands = [core] + [p for p in S.symmetric_paths(len(core) + budget, is_factor)
                      if path_contains(p, (k,)) and len(p) > len(core)]
    for p in cands:
        u = S.front_word(p)
        if not is_factor(u):
            continue
        found = locate_all(S, u, is_factor)
        if found and all(path_contains(q, (k,)) for q in found):
            return u
    return None
