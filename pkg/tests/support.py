"""Builders and brute-force oracles shared by the tests.

The oracles here avoid the library's own iteration code: they expand images with
plain dictionaries so that a bug in ``urmorph.words`` cannot hide itself.
"""
from __future__ import annotations

from urmorph.rulefile import parse
from urmorph.words import MorphicSystem


def build(rules: str, codes: str | None = None, start: str | None = None) -> MorphicSystem:
    """``build("a:ab b:ba", "a:0 b:1")``; letters are single characters, the first rule
    gives the start letter unless ``start`` is set."""
    pairs = [r.split(":") for r in rules.split()]
    letters = [k for k, _ in pairs]
    lines = [f"alphabet {' '.join(letters)}", f"start {start or letters[0]}"]
    lines += [f"rule {k} -> {' '.join(v)}" for k, v in pairs]
    if codes:
        cpairs = [c.split(":") for c in codes.split()]
        target = sorted({ch for _, v in cpairs for ch in v})
        lines.append(f"target {' '.join(target)}")
        lines += [f"code {k} -> {' '.join(v)}" for k, v in cpairs]
    return parse("\n".join(lines)).system


def naive_rules(rules: str) -> dict[str, str]:
    return dict(r.split(":") for r in rules.split())


def naive_prefix(rules: str, n: int, codes: str | None = None, start: str | None = None) -> str:
    """First n symbols of the coded fixed point: x = φ(a₁) is read left to right and
    φ(x[j]) is appended for j = 1, 2, ... (valid because φ(a₁) begins with a₁)."""
    r = naive_rules(rules)
    a1 = start or rules.split()[0].split(":")[0]
    c = naive_rules(codes) if codes else {ch: ch for ch in r}
    x = list(r[a1])
    assert x and x[0] == a1
    out = [c[ch] for ch in x]
    size = sum(map(len, out))
    j = 1
    while size < n:
        if j >= len(x):
            raise ValueError("finite fixed point")
        img = r[x[j]]
        x.extend(img)
        for ch in img:
            out.append(c[ch])
            size += len(c[ch])
        j += 1
    return "".join(out)[:n]


def windows(x: str, n: int) -> set[str]:
    return {x[i:i + n] for i in range(len(x) - n + 1)}


def tokens(sys: MorphicSystem, w: str) -> str:
    """Render a word over the target alphabet as a plain string of one-character tokens."""
    return sys.B.render(w)


def random_rules(rng, k: int, max_len: int = 3, short_bias: float = 0.5) -> str:
    """A random non-erasing substitution on the first k letters of ``abcd``, prolongable
    on ``a``; ``short_bias`` is the chance that a non-start letter gets a one-letter image."""
    letters = "abcd"[:k]
    parts = ["a:a" + "".join(rng.choice(letters) for _ in range(rng.randint(1, max_len - 1)))]
    for c in letters[1:]:
        n = 1 if rng.random() < short_bias else rng.randint(2, max_len)
        parts.append(f"{c}:" + "".join(rng.choice(letters) for _ in range(n)))
    return " ".join(parts)


def image_lengths(rules: dict[str, str], k: int) -> dict[str, list[int]]:
    """|φ^j(a)| for j = 0..k via the recurrence |φ^j(a)| = Σ_{c in φ(a)} |φ^{j-1}(c)|."""
    lens = {a: [1] for a in rules}
    for _ in range(k):
        prev = {a: v[-1] for a, v in lens.items()}
        for a, img in rules.items():
            lens[a].append(sum(prev[c] for c in img))
    return lens


def bounded_blocks(x: str, bounded: set[str]) -> set[str]:
    """All subwords of maximal runs of bounded letters in x, the empty word included."""
    out = {""}
    run = ""
    for c in x + "\0":
        if c in bounded:
            run += c
            continue
        for i in range(len(run)):
            for j in range(i + 1, len(run) + 1):
                out.add(run[i:j])
        run = ""
    return out
