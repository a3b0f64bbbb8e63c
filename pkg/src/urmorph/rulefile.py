"""Plain-text rule files.

::

    alphabet a b c
    target 0 1
    start a
    rule a -> a b
    rule b -> b a
    code a -> 0
    code b -> 1

``#`` starts a comment.  ``code`` lines are optional; without them the coding is
the identity and the target alphabet equals the source alphabet.  Comment lines
of the form ``# expect: UR`` or ``# note: ...`` are collected as metadata.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .words import Alphabet, Morphism, MorphicSystem


class RuleFileError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = f"{path or '<rules>'}:{line}: " if line is not None else (f"{path}: " if path else "")
        super().__init__(where + message)
        self.line = line


@dataclass
class RuleFile:
    phi: Morphism
    psi: Morphism
    start: str
    meta: dict[str, str] = field(default_factory=dict)

    @property
    def system(self) -> MorphicSystem:
        return MorphicSystem(self.phi, self.psi, self.start)


def parse(text: str, path: str | None = None) -> RuleFile:
    alphabet = target = start = None
    rules: dict[str, tuple[list[str], int]] = {}
    codes: dict[str, tuple[list[str], int]] = {}
    meta: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line, _, comment = raw.partition("#")
        comment = comment.strip()
        if comment and ":" in comment and not line.strip():
            key, _, value = comment.partition(":")
            if key.strip().isidentifier():
                meta[key.strip()] = value.strip()
        toks = line.split()
        if not toks:
            continue
        kw, args = toks[0], toks[1:]
        if kw == "alphabet":
            if alphabet is not None:
                raise RuleFileError("duplicate alphabet declaration", lineno, path)
            if not args or len(set(args)) != len(args):
                raise RuleFileError("alphabet must list distinct symbols", lineno, path)
            alphabet = (args, lineno)
        elif kw == "target":
            if target is not None:
                raise RuleFileError("duplicate target declaration", lineno, path)
            if not args or len(set(args)) != len(args):
                raise RuleFileError("target must list distinct symbols", lineno, path)
            target = (args, lineno)
        elif kw == "start":
            if start is not None:
                raise RuleFileError("duplicate start declaration", lineno, path)
            if len(args) != 1:
                raise RuleFileError("start takes exactly one symbol", lineno, path)
            start = (args[0], lineno)
        elif kw in ("rule", "code"):
            if len(args) < 2 or args[1] != "->":
                raise RuleFileError(f"expected '{kw} X -> ...'", lineno, path)
            table = rules if kw == "rule" else codes
            if args[0] in table:
                raise RuleFileError(f"duplicate {kw} for {args[0]!r}", lineno, path)
            table[args[0]] = (args[2:], lineno)
        else:
            raise RuleFileError(f"unknown declaration {kw!r}", lineno, path)
    if alphabet is None:
        raise RuleFileError("missing alphabet declaration", None, path)
    if start is None:
        raise RuleFileError("missing start declaration", None, path)
    A = Alphabet(alphabet[0])
    B = Alphabet(target[0]) if target is not None else A
    if start[0] not in A.tokens:
        raise RuleFileError(f"undeclared start symbol {start[0]!r}", start[1], path)

    def build(table, src, dst, kind):
        images = {}
        for sym, (rhs, lineno) in table.items():
            if sym not in src.tokens:
                raise RuleFileError(f"{kind} for undeclared symbol {sym!r}", lineno, path)
            for t in rhs:
                if t not in dst.tokens:
                    raise RuleFileError(f"undeclared symbol {t!r}", lineno, path)
            images[src.letter(sym)] = "".join(dst.letter(t) for t in rhs)
        return images

    phi_images = build(rules, A, A, "rule")
    for sym in A.tokens:
        if A.letter(sym) not in phi_images:
            raise RuleFileError(f"no rule for {sym!r}", None, path)
    if codes:
        psi_images = build(codes, A, B, "code")
        for sym in A.tokens:
            if A.letter(sym) not in psi_images:
                raise RuleFileError(f"no code for {sym!r}", None, path)
    else:
        if target is not None and B != A:
            raise RuleFileError("a target alphabet needs code lines", target[1], path)
        psi_images = {a: a for a in A.letters}
    return RuleFile(Morphism(A, A, phi_images), Morphism(A, B, psi_images), A.letter(start[0]), meta)


def load(path: str | Path) -> RuleFile:
    path = Path(path)
    return parse(path.read_text(), str(path))


def dump(phi: Morphism, psi: Morphism, start: str, meta: dict[str, str] | None = None) -> str:
    A, B = phi.source, psi.target
    lines = [f"# {k}: {v}" for k, v in (meta or {}).items()]
    lines.append("alphabet " + " ".join(A.tokens))
    identity = B == A and all(psi[a] == a for a in A.letters)
    if not identity:
        lines.append("target " + " ".join(B.tokens))
    lines.append("start " + A.token(start))
    for a in A.letters:
        lines.append(f"rule {A.token(a)} -> " + " ".join(A.token(c) for c in phi[a]))
    if not identity:
        for a in A.letters:
            lines.append(f"code {A.token(a)} -> " + " ".join(B.token(c) for c in psi[a]))
    return "\n".join(lines) + "\n"


def dump_system(sys: MorphicSystem, meta: dict[str, str] | None = None) -> str:
    return dump(sys.phi, sys.psi, sys.a1, meta)
