"""Deciding whether every working word h(g^k(q)) is a factor of the primitive word H.

The state of the main loop is an antirig: a period index into the detected
protocol cycle plus one minimal covering path per source. Transitions read only
lightened schemes and path admissibility, so a repeated state proves the answer
YES; a failed splice is re-checked directly before answering NO.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .growth import growth_bounds
from .oracle import gap_profile
from .primitive import HOracle, NosInstance
from .rauzy import (GlueMismatch, Path, Scheme, _minimize, build_scheme, detect_protocol,
                    evolve, glue, locate_all, path_contains)
from .words import prefix

YES, NO, INCONCLUSIVE = "YES", "NO", "INCONCLUSIVE"


class Inconsistent(RuntimeError):
    """A measured constant was too small for a lemma's size condition."""


class PeriodMismatch(Inconsistent):
    """A long path is admissible in one reference scheme but not one period later:
    the reference schemes start before the preperiod for paths of that length."""


@dataclass
class Verdict:
    answer: str
    witness: tuple | None = None      # (source, k) for NO
    reason: str = ""
    verified: bool = True             # NO witness re-checked against H directly
    ledger: "ConstantsLedger | None" = None
    trace: list[str] = field(default_factory=list)


@dataclass
class ConstantsLedger:
    values: dict[str, float] = field(default_factory=dict)
    notes: dict[str, str] = field(default_factory=dict)

    def set(self, name: str, value, note: str) -> None:
        self.values[name] = value
        self.notes[name] = note

    def __getitem__(self, name: str):
        return self.values[name]

    def lines(self) -> list[str]:
        out = []
        for k, v in self.values.items():
            shown = f"{float(v):.6g}" if isinstance(v, (int, float, Fraction)) else str(v)
            out.append(f"{k} = {shown}  # {self.notes[k]}")
        return out


@dataclass(frozen=True)
class AntiRig:
    index: int
    main: tuple  # one path per source, in source order
    k: int       # bookkeeping only, not part of the state

    @property
    def size(self) -> int:
        return max(len(p) for p in self.main)

    @property
    def key(self) -> tuple:
        return (self.index, self.main)


class Decider:
    def __init__(self, inst: NosInstance, *, T_check: int = 6, max_steps: int = 20_000,
                 gamma_op: int | None = None, max_k: int = 40, verify_limit: int = 4_000_000,
                 log: Callable[[str], None] | None = None):
        self.inst = inst
        self.H = inst.core.H
        self.oracle = HOracle(self.H)
        self.is_factor = self.oracle.__contains__
        self.T_check = T_check
        self.max_steps = max_steps
        self.max_k = max_k
        self.verify_limit = verify_limit
        self.trace: list[str] = []
        self._log = log
        self.gamma_op = gamma_op
        self._g_powers: dict[str, list[str]] = {q: [q] for q in inst.sources}
        self._src_index = {q: i for i, q in enumerate(inst.sources)}
        self._setup_protocol()
        self.ledger = self._measure()
        self.layouts = self._layouts()
        self._calibrate()

    # -- bookkeeping ------------------------------------------------------------------

    def log(self, line: str) -> None:
        self.trace.append(line)
        if self._log:
            self._log(line)

    def preimage(self, q: str, k: int) -> str:
        seq = self._g_powers[q]
        while len(seq) <= k:
            seq.append(self.inst.g(seq[-1]))
        return seq[k]

    def working_word(self, q: str, k: int) -> str:
        return self.inst.h(self.preimage(q, k))

    # -- protocol and constants ---------------------------------------------------------

    def _setup_protocol(self, rebase: int = 0, mult: int = 1) -> None:
        """Reference schemes: ``2P + 1`` consecutive schemes from ``rebase`` detected
        periods after the preperiod, with P = ``mult`` times the detected period."""
        if not hasattr(self, "protocol"):
            S = build_scheme(self.H, min_scale=2)
            self.protocol = detect_protocol(S, self.is_factor, self.T_check)
        proto = self.protocol
        r0 = proto.preperiod + rebase * proto.period
        P = mult * proto.period
        while len(proto.schemes) < r0 + 2 * P + 1:
            ev = evolve(proto.schemes[-1], self.is_factor)
            proto.schemes.append(ev.scheme)
            proto.records.append(ev.record)
            proto.entries.append(ev.entry)
        self.P = P
        self.reps: list[Scheme] = proto.schemes[r0:r0 + 2 * self.P + 1]
        self.recs = proto.records[r0:r0 + 2 * self.P]
        self._adm: dict[tuple[int, Path], bool] = {}
        self.log(f"protocol preperiod={proto.preperiod} period={self.P}, reference schemes from {r0}")

    def _layouts(self, max_rebase: int = 4, max_period: int = 12) -> list[tuple[int, int]]:
        """(rebase, multiple) pairs to try, cheapest first."""
        P0 = self.protocol.period
        pairs = [(r, m) for r in range(max_rebase + 1) for m in range(1, max(1, max_period // P0) + 1)]
        return sorted(pairs, key=lambda rm: (rm[0] + rm[1], rm[0]))

    def _samples(self, index: int, edges: int, count: int = 4) -> list[Path]:
        """Long admissible paths of reference scheme ``index`` and one-edge deviations from them."""
        S = self.reps[index]
        L = edges * S.scale
        x = prefix(self.H, 8 * L)
        out: list[Path] = []
        for st in range(0, 7 * L, max(1, 7 * L // count)):
            for p in locate_all(S, x[st:st + L], self.is_factor):
                out.append(p)
                for j in range(len(p) - 1, 0, -1):
                    sib = [k for k in S.out[S.edges[p[j - 1]].dst] if k != p[j]]
                    if sib:
                        out.append(S.right_ext(p[:j] + (sib[0],)))
                        break
        return out

    def _calibrate(self) -> None:
        """Pick the first layout under which sampled long paths keep their admissibility
        one period later; the run re-checks every path it actually uses."""
        edges = max(4 * self.gamma_op, 100)
        while self.layouts:
            r, m = self.layouts.pop(0)
            self._setup_protocol(rebase=r, mult=m)
            try:
                for i in range(self.P):
                    for p in self._samples(i, edges):
                        self.admissible(i, p)
            except PeriodMismatch as exc:
                self.log(f"calibration: {exc}")
                continue
            self.log(f"calibrated: {r} period(s) after the preperiod, period {self.P}")
            self.ledger.set("period", self.P, "evolution steps per period of the reference schemes")
            return
        raise PeriodMismatch("no layout keeps admissibility periodic on the samples")

    def admissible(self, index: int, p: Path) -> bool:
        key = (index, p)
        hit = self._adm.get(key)
        if hit is not None:
            return hit
        a, b = self.reps[index], self.reps[index + self.P]
        if not a.is_path(p):
            raise Inconsistent(f"path {p} is not a path of the scheme at index {index}")
        res = self.is_factor(a.front_word(p))
        if not b.is_path(p) or res != self.is_factor(b.front_word(p)):
            raise PeriodMismatch(f"admissibility of a {len(p)}-edge path differs across periods at index {index}")
        self._adm[key] = res
        return res

    def _measure(self) -> ConstantsLedger:
        L = ConstantsLedger()
        period = self.reps[:self.P + 1]
        Ms = [S.scale for S in period]
        cmax = max(Fraction(S.max_word(), S.scale) for S in period)
        cmin = None
        for S in period:
            for p in S.symmetric_paths(self.T_check, self.is_factor):
                r = Fraction(len(S.front_word(p)), S.scale * len(p))
                cmin = r if cmin is None else min(cmin, r)
        cm = max(Fraction(b, a) for a, b in zip(Ms, Ms[1:]))
        word = prefix(self.H, 20_000)
        prof = gap_profile(word, 24)
        P_rec = max(Fraction(prof.window(n), n) for n in range(1, 25))
        csep = Fraction(prof.sep).limit_denominator(1000) if prof.sep < math.inf else Fraction(1)
        K = 2 * cmax + 4 * cmax / csep
        L.set("C_max", cmax, "max edge word length over scale, one protocol period")
        L.set("C_min", cmin, "min admissible path word length over scale times edges")
        L.set("C_m", cm, "max scale ratio between consecutive schemes")
        L.set("P", P_rec, "max window(n)/n on a 20000-symbol prefix of H, n <= 24")
        L.set("C_sep", csep, "min occurrence distance over length, same prefix")
        L.set("K", K, "uniqueness threshold 2C_max + 4C_max/C_sep")
        b = growth_bounds(self.inst.g, self.inst.h)
        C1, C2 = b.C1, 2 * b.C2  # pairs are at most twice as long as letters
        lam_lo, lam_hi = b.theta_lo, b.theta_hi
        C3, C4, C5 = C1 / cmax, C2 / cmin, 2 * cmax / cmin
        C6 = max(C5 + K * C4 / C1, 2 * C5, C5 * C3 / C4)
        C7 = max(2 * C4 * cm / C3, 2 * C4 / C3)
        C8 = 2 * C4 * lam_hi / C3
        C9 = math.ceil(math.log(float(4 * C4 / C3)) / math.log(float(lam_lo)))
        L.set("C1", C1, "working word lower bound factor")
        L.set("C2", C2, "working word upper bound factor")
        L.set("lambda_lo", lam_lo, "rational lower bracket of the growth rate")
        L.set("lambda_hi", lam_hi, "rational upper bracket of the growth rate")
        for name, val in (("C3", C3), ("C4", C4), ("C5", C5), ("C6", C6), ("C7", C7), ("C8", C8)):
            L.set(name, val, "derived from the size and ratio inequalities")
        L.set("C9", C9, "steps that at least double the size")
        log10_gamma = math.log10(2 * float(C6)) + 2 * math.log10(float(C7)) + C9 * math.log10(float(C8))
        L.set("log10_Gamma", log10_gamma, "log10 of 2*C6*C7^2*C8^C9; not used operationally")
        if self.gamma_op is None:
            need = (K + 2 * cmax) / cmin
            self.gamma_op = max(6, min(64, math.ceil(float(need))))
        L.set("Gamma_op", self.gamma_op, "operational size threshold; doubled on inconsistency")
        return L

    # -- transitions ----------------------------------------------------------------------

    def step_k(self, rig: AntiRig) -> AntiRig | tuple[str, int]:
        """Main paths for order k+1 by splicing, or the failing (source, k+1)."""
        idx = self._src_index
        main = rig.main
        adm = lambda p: self.admissible(rig.index, p)  # noqa: E731
        out = []
        for q in self.inst.sources:
            gq = self.inst.g(q)
            if len(gq) == 1:
                out.append(main[idx[gq]])
                continue
            cur = main[idx[gq[0:2]]]
            for i in range(2, len(gq)):
                try:
                    cur = glue(cur, main[idx[gq[i - 1:i + 1]]], main[idx[gq[i - 1]]], adm)
                except GlueMismatch as exc:
                    raise Inconsistent(str(exc)) from exc
                if cur is None:
                    return (q, rig.k + 1)
            out.append(cur)
        return AntiRig(rig.index, tuple(out), rig.k + 1)

    def _container(self, j: int, s1: Path) -> Path:
        """Minimal admissible path of scheme j+1 whose image in scheme j contains ``s1``."""
        Sn = self.reps[j + 1]
        rec = self.recs[j]
        target = (j + 1) % self.P

        def image(p: Path) -> Path:
            return rec.map_path(p)

        found: set[Path] = set()
        n = len(s1)
        for e0 in Sn.keys:
            ext0 = ((rec.v,) if e0 in rec.starts_after_v else ()) + rec.images[e0]
            for o in range(len(ext0)):
                m = min(len(ext0) - o, n)
                if ext0[o:o + m] != s1[:m]:
                    continue
                stack = [((e0,), m)]
                while stack:
                    path, got = stack.pop()
                    last = path[-1]
                    if got == n or (n - got == 1 and s1[-1] == rec.v and last in rec.ends_before_v):
                        s = Sn.right_ext(Sn.left_ext(path))
                        cov = lambda q: path_contains(image(q), s1)  # noqa: E731
                        s = _minimize(Sn, s, cov)
                        found.add(s)
                        continue
                    for e in Sn.out[Sn.edges[last].dst]:
                        im = rec.images[e]
                        mm = min(len(im), n - got)
                        if im[:mm] == s1[got:got + mm]:
                            stack.append((path + (e,), got + mm))
        good = [s for s in found if self.admissible(target, s)]
        minimal = [s for s in good if not any(t != s and path_contains(s, t) for t in good)]
        if len(minimal) != 1:
            raise Inconsistent(f"{len(minimal)} minimal containers for a main path")
        return minimal[0]

    def step_evol(self, rig: AntiRig) -> AntiRig:
        j = rig.index
        new = tuple(self._container(j, s1) for s1 in rig.main)
        return AntiRig((j + 1) % self.P, new, rig.k)

    # -- main loop --------------------------------------------------------------------------

    def _verify_no(self, q: str, k: int) -> bool | None:
        w = self.preimage(q, k)
        if len(w) * max(1, self.inst.h.max_length) > self.verify_limit:
            return None
        return self.working_word(q, k) not in self.oracle

    def _initial(self) -> AntiRig | Verdict:
        S0 = self.reps[0]
        M = S0.scale
        K = float(self.ledger["K"])
        for k in range(self.max_k + 1):
            words = [self.working_word(q, k) for q in self.inst.sources]
            for q, w in zip(self.inst.sources, words):
                if w not in self.oracle:
                    self.log(f"k={k}: working word of source {q!r} is not a factor")
                    return Verdict(NO, (q, k), "working word is not a factor of H")
            if min(len(w) for w in words) < K * M:
                continue
            mains = []
            for w in words:
                ps = locate_all(S0, w, self.is_factor)
                if len(ps) != 1:
                    break
                mains.append(ps[0])
            else:
                rig = AntiRig(0, tuple(mains), k)
                self.log(f"k={k}: antirig size {rig.size}")
                if rig.size >= self.gamma_op:
                    return rig
        return Verdict(INCONCLUSIVE, None, f"no starting antirig up to k={self.max_k}")

    def run(self, max_doublings: int = 5) -> Verdict:
        doublings = 0
        while doublings <= max_doublings:
            try:
                v = self._run_once()
            except PeriodMismatch as exc:
                if not self.layouts:
                    break
                r, m = self.layouts.pop(0)
                self.log(f"{exc}; retrying {r} period(s) later with {m} times the period")
                self._setup_protocol(rebase=r, mult=m)
                continue
            except Inconsistent as exc:
                doublings += 1
                self.log(f"inconsistency: {exc}; Gamma_op {self.gamma_op} -> {2 * self.gamma_op}")
                self.gamma_op *= 2
                self.ledger.set("Gamma_op", self.gamma_op, "operational size threshold; doubled on inconsistency")
                continue
            v.ledger = self.ledger
            v.trace = self.trace
            return v
        return Verdict(INCONCLUSIVE, None, "constants kept failing their checks",
                       ledger=self.ledger, trace=self.trace)

    def _run_once(self) -> Verdict:
        self.log(f"Gamma_op={self.gamma_op}")
        start = self._initial()
        if isinstance(start, Verdict):
            return start
        rig = start
        seen = {rig.key: 0}
        for step in range(1, self.max_steps + 1):
            if rig.size < self.gamma_op:
                nxt = self.step_k(rig)
                if isinstance(nxt, tuple):
                    q, k = nxt
                    ok = self._verify_no(q, k)
                    if ok is False:
                        raise Inconsistent(f"splice for source {q!r} at k={k} failed but the word is a factor")
                    self.log(f"step {step}: splice fails for source {q!r} at k={k}")
                    return Verdict(NO, (q, k), "a working word is not a factor of H", verified=ok is True)
                kind = "k"
            else:
                nxt = self.step_evol(rig)
                kind = "evol"
            rig = nxt
            self.log(f"step {step}: {kind} index={rig.index} k={rig.k} size={rig.size}")
            if rig.key in seen:
                self.log(f"state repeats step {seen[rig.key]}")
                return Verdict(YES, None, f"antirig state repeated after {step} steps")
            seen[rig.key] = step
        return Verdict(INCONCLUSIVE, None, f"no repetition within {self.max_steps} steps")


def decide(inst: NosInstance, **kw) -> Verdict:
    return Decider(inst, **kw).run()

