"""Labelled rule-file corpus and the runner that compares pipeline and oracle."""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import partial
from importlib import resources
from pathlib import Path

from . import oracle
from .pipeline import NO, YES, decide_system
from .rulefile import RuleFileError, load

LABELS = {"UR": YES, "notUR": NO}


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    path: str
    expected: str  # "UR" or "notUR"
    note: str


@dataclass
class CorpusRow:
    name: str
    expected: str | None
    verdict: str | None
    stage: str | None
    oracle: str | None
    agree: bool
    seconds: float
    error: str | None = None

    def as_dict(self, timings: bool = True) -> dict:
        d = asdict(self)
        if not timings:
            del d["seconds"]
        return d


def standard_dir() -> Path:
    return Path(str(resources.files("urmorph") / "corpus"))


def entry_for(path: Path) -> CorpusEntry:
    rf = load(path)
    expected = rf.meta.get("expect")
    if expected not in LABELS:
        raise RuleFileError(f"expect must be one of {sorted(LABELS)}", None, str(path))
    return CorpusEntry(rf.meta.get("name", path.stem), str(path), expected, rf.meta.get("note", ""))


def run_entry(path: str, oracle_N: int = 100_000, n_max: int = 10, max_steps: int = 20_000) -> CorpusRow:
    t0 = time.perf_counter()
    p = Path(path)
    try:
        entry = entry_for(p)
        sys = load(p).system
        d = decide_system(sys, max_steps=max_steps)
        o = oracle.check(sys, oracle_N, n_max).verdict
    except Exception as exc:  # noqa: BLE001  a broken file must not stop the run
        return CorpusRow(p.stem, None, None, None, None, False, time.perf_counter() - t0,
                         f"{type(exc).__name__}: {exc}")
    # a certified defect must never meet YES; the label must match the verdict
    agree = d.answer == LABELS[entry.expected] and not (o != oracle.CONSISTENT and d.answer == YES)
    return CorpusRow(entry.name, entry.expected, d.answer, d.stage, o, agree, time.perf_counter() - t0)


def run_corpus(directory: str | Path | None = None, jobs: int = 1, **kw) -> list[CorpusRow]:
    """One row per ``*.txt`` file in name order; parse failures become error rows."""
    d = Path(directory) if directory is not None else standard_dir()
    files = sorted(str(p) for p in d.glob("*.txt"))
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            return list(ex.map(partial(run_entry, **kw), files))
    return [run_entry(f, **kw) for f in files]
