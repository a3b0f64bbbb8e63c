"""From a morphic system to a verdict: the reductions in order, then the decider."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .bounded import BoundedFactorReport, InfinitePower, LetterClass, analyze, periodic_with_period
from .contraction import contract
from .decider import INCONCLUSIVE, NO, YES, Decider, PeriodMismatch, Verdict
from .growth import all_same_order
from .primitive import PrimitiveCore, extract_core, is_periodic_primitive, make_nos_instance
from .rauzy import ProtocolNotPeriodic
from .words import MorphicSystem, normalize, restrict_reachable


@dataclass
class Decision:
    answer: str
    stage: str
    reason: str
    verdict: Verdict | None = None
    trace: list[str] = field(default_factory=list)

    @property
    def recurrent(self) -> bool | None:
        return {YES: True, NO: False}.get(self.answer)


@dataclass
class Reduction:
    W: MorphicSystem                 # normalized and restricted to reachable letters
    cls: LetterClass
    report: BoundedFactorReport
    grown: MorphicSystem | None      # all letters growing; None after an infinite power
    core: PrimitiveCore | None


def reduce_system(sys: MorphicSystem, note: Callable[[str], None] = lambda _: None,
                  with_core: bool = True) -> Reduction:
    if not sys.normalized:
        sys = normalize(sys.psi, sys.phi, sys.a1)
        note(f"normalized: |A| = {len(sys.A)}")
    sys.check_prolongable()
    W = restrict_reachable(sys)
    cls, _, report = analyze(W)
    note(f"letters: {len(cls.growing)} growing, {len(cls.bounded)} bounded")
    if isinstance(report, InfinitePower):
        return Reduction(W, cls, report, None, None)
    grown = W
    if cls.bounded:
        grown = restrict_reachable(contract(W, cls).system(W.psi))
        note(f"contracted onto {len(grown.A)} triples")
    core = None
    if with_core:
        core = extract_core(grown)
        note(f"primitive core on {len(core.D)} letters, power {core.power}")
    return Reduction(W, cls, report, grown, core)


def decide_system(sys: MorphicSystem, *, max_steps: int = 20_000, T_check: int = 6,
                  log: Callable[[str], None] | None = None) -> Decision:
    trace: list[str] = []

    def note(line: str) -> None:
        trace.append(line)
        if log:
            log(line)

    r = reduce_system(sys, note)
    W = r.W
    if isinstance(r.report, InfinitePower):
        u = W.psi(r.report.U)
        ok = periodic_with_period(W, u)
        note(f"bounded word {W.A.render(r.report.U, ' ')} has unbounded powers; "
             f"periodic with its image: {ok}")
        return Decision(YES if ok else NO, "bounded", "infinite power of a bounded word", trace=trace)

    pv = is_periodic_primitive(r.core.H)
    if pv.period is not None:
        ok = periodic_with_period(W, pv.period)
        note(f"core is periodic with period of length {len(pv.period)}; whole word periodic: {ok}")
        return Decision(YES if ok else NO, "periodic", "periodic core", trace=trace)
    note(f"core has no period up to {pv.n_checked} (heuristic bound)")

    same, order = all_same_order(r.grown.phi)
    if not same:
        note("letters grow at different orders")
        return Decision(NO, "growth", "some factor occurs with unbounded gaps", trace=trace)
    note(f"common growth order {order}")

    inst = make_nos_instance(r.grown, r.core)
    try:
        v = Decider(inst, T_check=T_check, max_steps=max_steps, log=note).run()
    except (ProtocolNotPeriodic, PeriodMismatch) as exc:
        note(f"decider setup failed: {exc}")
        return Decision(INCONCLUSIVE, "decider", str(exc), trace=trace)
    return Decision(v.answer, "decider", v.reason, verdict=v, trace=trace)


def decide(sys: MorphicSystem, **kw) -> bool | None:
    """True, False, or None when the budget ran out."""
    return decide_system(sys, **kw).recurrent
