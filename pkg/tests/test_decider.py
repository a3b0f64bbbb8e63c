import pytest

from urmorph.decider import INCONCLUSIVE, NO, YES, AntiRig, Decider, decide
from urmorph.primitive import extract_core, make_nos_instance
from urmorph.rauzy import locate_all

from support import build, naive_prefix, windows

TM, FIB, PREFIX = "a:ab b:ba", "a:ab b:a", "c:ca a:ab b:ba"


def instance(rules, codes=None):
    s = build(rules, codes)
    return make_nos_instance(s, extract_core(s))


@pytest.fixture(scope="module")
def tm():
    return Decider(instance(TM))


@pytest.mark.parametrize("rules", [TM, FIB])
def test_primitive_words_are_recurrent(rules):
    v = decide(instance(rules))
    assert v.answer == YES and v.witness is None
    assert "repeated" in v.reason


def test_tm_behind_a_coded_letter():
    assert decide(instance("c:cb a:ab b:ba", "c:a a:a b:b")).answer == YES


def test_prefix_letter_gives_verified_no():
    inst = instance(PREFIX)
    d = Decider(inst)
    v = d.run()
    assert v.answer == NO and v.verified
    q, k = v.witness
    w = inst.core.H.B.render(d.working_word(q, k))
    # H is the Thue-Morse word over a, b; the witness must be absent from it
    x = naive_prefix(TM, 50_000)
    assert w not in windows(x, len(w))


def test_ledger_has_positive_named_constants(tm):
    L = tm.ledger
    for name in ("C_max", "C_min", "C_m", "K", "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9"):
        assert L[name] > 0, name
        assert L.notes[name]
    assert L["C_max"] == 2 and L["lambda_lo"] == 2
    assert L["lambda_lo"] <= 2 <= L["lambda_hi"]
    assert L["K"] == 2 * L["C_max"] + 4 * L["C_max"] / L["C_sep"]
    assert any(line.startswith("Gamma_op = ") for line in L.lines())


def test_period_and_admissibility_agree_across_periods(tm):
    assert tm.P % tm.protocol.period == 0
    S = tm.reps[0]
    for p in S.symmetric_paths(5, tm.is_factor):
        assert tm.admissible(0, p) is True
    bad = [p for p in S.symmetric_paths(4) if not tm.is_factor(S.front_word(p))]
    assert bad and all(tm.admissible(0, p) is False for p in bad)


def antirig_at(d, k):
    S = d.reps[0]
    mains = []
    for q in d.inst.sources:
        ps = locate_all(S, d.working_word(q, k), d.is_factor)
        assert len(ps) == 1
        mains.append(ps[0])
    return AntiRig(0, tuple(mains), k)


def test_antirig_size_grows_like_lambda_power(tm):
    L = tm.ledger
    M = tm.reps[0].scale
    sizes = []
    for k in range(3, 9):
        size = antirig_at(tm, k).size
        lam_lo, lam_hi = float(L["lambda_lo"]), float(L["lambda_hi"])
        assert float(L["C3"]) * lam_lo ** k / M <= size <= float(L["C4"]) * lam_hi ** k / M + float(L["C5"])
        sizes.append(size)
    assert sizes == sorted(sizes)
    ratios = [b / a for a, b in zip(sizes, sizes[1:])]
    assert all(1.5 <= r <= 2.5 for r in ratios)


def test_step_k_matches_direct_location(tm):
    rig = antirig_at(tm, 5)
    nxt = tm.step_k(rig)
    assert isinstance(nxt, AntiRig) and nxt.k == 6
    assert nxt.main == antirig_at(tm, 6).main


def test_step_evol_moves_one_scheme_along(tm):
    rig = antirig_at(tm, 6)
    nxt = tm.step_evol(rig)
    assert nxt.index == 1 and nxt.k == 6
    S1 = tm.reps[1]
    for p, q in zip(nxt.main, tm.inst.sources):
        assert tm.working_word(q, 6) in S1.front_word(p)


def test_step_budget_gives_inconclusive():
    v = Decider(instance(TM), max_steps=1).run()
    assert v.answer == INCONCLUSIVE


def test_runs_are_deterministic():
    a = Decider(instance(FIB)).run()
    b = Decider(instance(FIB)).run()
    assert (a.answer, a.reason, a.trace) == (b.answer, b.reason, b.trace)
