"""Empirical recurrence checks on finite prefixes.

None of this proves uniform recurrence; it is the independent cross-check for the
decider. Verdicts compare the prefixes of length N, 2N and 4N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .words import MorphicSystem, prefix

CONSISTENT = "consistent-with-UR"
NOT_RECURRENT = "not-recurrent"
UNBOUNDED = "unbounded-gap-suspected"


@dataclass(frozen=True)
class GapProfile:
    R: tuple[int, ...]      # R[n-1]: max gap between consecutive occurrences, running max over n
    first: tuple[int, ...]  # first[n-1]: latest first occurrence (1-based end of the lead-in)
    sep: float              # least (occurrence distance) / n over repeated factors

    def window(self, n: int) -> int:
        """Length of a window guaranteed to contain every length-n factor seen."""
        return max(self.R[n - 1], self.first[n - 1]) + n - 1


def gap_profiles(word: str, n_max: int, cuts: list[int]) -> list[GapProfile]:
    """Gap profiles of the prefixes ``word[:c]`` for each cut, in one pass per n."""
    cuts = sorted(cuts)
    rows = [([], [], math.inf) for _ in cuts]
    best = [0] * len(cuts)
    for n in range(1, n_max + 1):
        last: dict[str, int] = {}
        worst = lead = 0
        sep = math.inf
        c = 0
        for i in range(len(word) - n + 1):
            while c < len(cuts) and i + n > cuts[c]:
                R, first, s = rows[c]
                best[c] = max(best[c], worst)
                R.append(best[c])
                first.append(lead)
                rows[c] = (R, first, min(s, sep))
                c += 1
            u = word[i:i + n]
            j = last.get(u)
            if j is None:
                lead = i + 1
            else:
                worst = max(worst, i - j)
                sep = min(sep, (i - j) / n)
            last[u] = i
        while c < len(cuts):
            R, first, s = rows[c]
            best[c] = max(best[c], worst)
            R.append(best[c])
            first.append(lead)
            rows[c] = (R, first, min(s, sep))
            c += 1
    return [GapProfile(tuple(R), tuple(first), s) for R, first, s in rows]


def gap_profile(word: str, n_max: int) -> GapProfile:
    return gap_profiles(word, n_max, [len(word)])[0]


@dataclass(frozen=True)
class OracleReport:
    verdict: str
    N: int
    n_max: int
    R: tuple[int, ...]          # over the prefix of length N
    R_doubled: tuple[int, ...]  # over 2N
    witness: str | None = None

    @property
    def recurrent(self) -> bool | None:
        """False when the prefix shows a defect, None otherwise."""
        return None if self.verdict == CONSISTENT else False

    def bounded_ratio(self) -> float:
        return max(r / n for n, r in enumerate(self.R, 1))


def _factors(w: str, n: int) -> set[str]:
    return {w[i:i + n] for i in range(len(w) - n + 1)}


def check(sys: MorphicSystem, N: int = 100_000, n_max: int = 10) -> OracleReport:
    """Scan prefixes of length N, 2N and 4N.

    not-recurrent: a factor of the first N symbols has no occurrence starting in
    [N, 4N), so its last occurrence survived two doublings.
    unbounded-gap-suspected: a short factor first occurs after N, or R(n) grows
    strictly under both doublings.
    """
    if N < 10 * n_max:
        raise ValueError("prefix length must be at least 10 * n_max")
    x = prefix(sys, 4 * N)
    head = x[:N]
    g1, g2, g4 = gap_profiles(x, n_max, [N, 2 * N, 4 * N])
    for n in range(1, n_max + 1):
        gone = _factors(head, n) - _factors(x[N:], n)
        if gone:
            return OracleReport(NOT_RECURRENT, N, n_max, g1.R, g2.R, min(gone))
    for n in range(1, n_max + 1):
        late = _factors(x[N - n + 1:2 * N], n) - _factors(head, n)
        if late:
            return OracleReport(UNBOUNDED, N, n_max, g1.R, g2.R, min(late))
    for n in range(1, n_max + 1):
        if g1.R[n - 1] < g2.R[n - 1] < g4.R[n - 1]:
            return OracleReport(UNBOUNDED, N, n_max, g1.R, g2.R)
    return OracleReport(CONSISTENT, N, n_max, g1.R, g2.R)
