import random

import pytest

from urmorph.primitive import HOracle, extract_core
from urmorph.rauzy import (
    COLL, DIST, Edge, GlueMismatch, ProtocolNotPeriodic, Scheme, SchemeError, build_scheme,
    detect_protocol, evolve, glue, locate, locate_all, occurrences, path_contains, t_ruled,
    validate_scheme,
)

from support import build, naive_prefix, windows

TM, FIB = "a:ab b:ba", "a:ab b:a"


def core(rules):
    s = build(rules)
    H = extract_core(s).H
    return s, H, HOracle(H).__contains__


def shape(S, H):
    return sorted((k, e.src, e.dst, H.A.render(e.front), H.A.render(e.back)) for k, e in S.edges.items())


def test_fibonacci_scheme_by_hand():
    # Rauzy graph of order 1: a is bispecial, b is neither
    _, H, _ = core(FIB)
    S = build_scheme(H)
    assert shape(S, H) == [(1, 0, 1, "a", "a"), (2, 1, 0, "a", "a"), (3, 1, 0, "ba", "ab")]
    assert S.kind == {0: COLL, 1: DIST}
    assert S.supporting() == [1] and S.scale == 1


def test_thue_morse_scheme_by_hand():
    _, H, _ = core(TM)
    S = build_scheme(H)
    assert shape(S, H) == [(1, 0, 1, "a", "a"), (2, 1, 0, "a", "a"), (3, 1, 2, "b", "a"),
                           (4, 2, 3, "b", "b"), (5, 3, 0, "a", "b"), (6, 3, 2, "b", "b")]
    assert S.supporting() == [1, 4]


@pytest.mark.parametrize("rules", [FIB, TM, "a:abc b:bc c:a"])
def test_scheme_axioms_survive_evolution(rules):
    _, H, f = core(rules)
    S = build_scheme(H)
    scales = [S.scale]
    for _ in range(12):
        rep = validate_scheme(S, H, f, word_budget=48)
        assert rep.ok, rep.notes
        S = evolve(S, f).scheme
        scales.append(S.scale)
    assert scales == sorted(scales)


def test_front_equals_back_on_symmetric_paths():
    _, H, f = core(TM)
    S = build_scheme(H)
    for _ in range(5):
        S = evolve(S, f).scheme
    paths = list(S.symmetric_paths(6))
    assert paths
    assert all(S.front_word(p) == S.back_word(p) for p in paths)


def test_admissible_paths_carry_factors():
    s, H, f = core(TM)
    S = build_scheme(H)
    x = naive_prefix(TM, 50_000)
    for p in S.symmetric_paths(6, f):
        w = H.A.render(S.front_word(p))
        assert w in windows(x, len(w))


def loops(H):
    """Two separate one-vertex loops: fine locally but not strongly connected."""
    a, b = H.A.word("a"), H.A.word("b")
    return Scheme({1: Edge(0, 1, a, a), 2: Edge(1, 0, a, a), 3: Edge(1, 0, b, b),
                   4: Edge(2, 3, b, b), 5: Edge(3, 2, a, a), 6: Edge(3, 2, b, b)})


def test_validate_flags_disconnected_scheme():
    _, H, f = core(TM)
    assert 1 in validate_scheme(loops(H), H, f).violations


def test_validate_flags_ambiguous_branching():
    _, H, f = core(TM)
    a = H.A.word("a")
    S = Scheme({1: Edge(0, 1, a, a), 2: Edge(1, 0, a, a), 3: Edge(1, 0, a + a, a)})
    rep = validate_scheme(S, H, f)
    assert 2 in rep.violations and not rep.ok


def test_vertex_degrees_are_checked():
    with pytest.raises(SchemeError):
        Scheme({1: Edge(0, 1, "\x00", "\x00"), 2: Edge(1, 0, "\x00", "\x00")})


def test_front_word_of_single_edge_and_non_path():
    _, H, _ = core(FIB)
    S = build_scheme(H)
    assert S.front_word((3,)) == S.edges[3].front
    assert S.back_word((3,)) == S.edges[3].back
    with pytest.raises(SchemeError):
        S.front_word((1, 1))


def test_evolution_is_deterministic():
    _, H, f = core(TM)
    a, b = build_scheme(H), build_scheme(H)
    for _ in range(8):
        ea, eb = evolve(a, f), evolve(b, f)
        assert shape(ea.scheme, H) == shape(eb.scheme, H) and ea.entry == eb.entry
        a, b = ea.scheme, eb.scheme


@pytest.mark.parametrize("rules", [FIB, TM, "a:abc b:bc c:a"])
def test_map_path_preserves_words(rules):
    _, H, f = core(rules)
    S = build_scheme(H)
    for _ in range(5):
        ev = evolve(S, f)
        for p in ev.scheme.symmetric_paths(6, f):
            q = ev.record.map_path(p)
            assert S.is_path(q) and S.front_word(q) == ev.scheme.front_word(p)
        S = ev.scheme


@pytest.mark.parametrize("rules,pre,per", [(FIB, 0, 2), (TM, 6, 4)])
def test_protocol_repeats(rules, pre, per):
    _, H, f = core(rules)
    P = detect_protocol(build_scheme(H), f, max_steps=200)
    assert (P.preperiod, P.period) == (pre, per)
    assert P.entries[pre] == P.entries[pre + per]


def test_protocol_budget_is_enforced():
    _, H, f = core(TM)
    with pytest.raises(ProtocolNotPeriodic):
        detect_protocol(build_scheme(H), f, max_steps=3)
    with pytest.raises(ProtocolNotPeriodic):
        detect_protocol(build_scheme(H), f, max_word=3)


def test_t_ruled_is_stable_and_subpath_closed():
    _, H, f = core(TM)
    S = build_scheme(H)
    for _ in range(4):
        S = evolve(S, f).scheme
    r1, r2 = t_ruled(S, f, 6), t_ruled(S, f, 6)
    assert r1 == r2 and r1.paths
    # a symmetric subpath of an admissible path is admissible
    for p in r1.paths:
        for i in range(len(p)):
            for j in range(i + 1, len(p) + 1):
                q = p[i:j]
                if S.is_symmetric(q):
                    assert q in r1.paths


def test_trim_and_cut():
    _, H, f = core(FIB)
    S = build_scheme(H)
    for _ in range(3):
        S = evolve(S, f).scheme
    checked = 0
    for p in S.symmetric_paths(7, f):
        if len(S.front_generators(p)) < 3 or len(S.back_generators(p)) < 3:
            continue
        r, l = S.trim_right(p), S.trim_left(p)
        last = p[S.front_generators(p)[-1]]
        assert S.is_symmetric(r) and S.is_symmetric(l)
        assert S.front_word(r) + S.edges[last].front == S.front_word(p)
        assert S.trim_right(l) == S.trim_left(r) == S.cut(p)
        assert len(S.front_word(r)) >= len(S.front_word(p)) - S.max_word()
        checked += 1
    assert checked > 5
    with pytest.raises(SchemeError):
        S.trim_right((S.supporting()[0],))


@pytest.mark.parametrize("rules,steps", [(FIB, 3), (TM, 3), ("a:abc b:bc c:a", 2)])
def test_locate_postconditions(rules, steps):
    s, H, f = core(rules)
    S = build_scheme(H)
    for _ in range(steps):
        S = evolve(S, f).scheme
    x = naive_prefix(rules, 20_000)
    rng = random.Random(1)
    for _ in range(60):
        i, n = rng.randrange(10_000), rng.randint(1, 40)
        A = s.A.word(x[i:i + n])
        p = locate(S, A, f)
        F = S.front_word(p)
        assert A in F and S.is_symmetric(p)
        if len(S.front_generators(p)) > 1:
            assert A not in S.front_word(S.trim_right(p))
        if len(S.back_generators(p)) > 1:
            assert A not in S.front_word(S.trim_left(p))
        assert len(F) <= len(A) + 2 * S.max_word()


def test_locate_supporting_edge_is_minimal():
    _, H, f = core(FIB)
    S = build_scheme(H)
    for _ in range(4):
        S = evolve(S, f).scheme
    v = S.supporting()[0]
    assert locate(S, S.edges[v].front, f) == (v,)


def test_locate_rejects_non_factor_and_empty_word():
    _, H, f = core(TM)
    S = build_scheme(H)
    with pytest.raises(SchemeError):
        locate(S, H.A.word("aaa"), f)
    with pytest.raises(ValueError):
        locate_all(S, "", f)


@pytest.mark.parametrize("rules", [FIB, TM])
def test_locate_unique_for_long_words(rules):
    s, H, f = core(rules)
    S = build_scheme(H, min_scale=2)
    for _ in range(4):
        S = evolve(S, f).scheme
    x = naive_prefix(rules, 30_000)
    n = 4 * S.max_word()
    for w in sorted(windows(x[:5000], n)):
        assert len(locate_all(S, s.A.word(w), f)) == 1


def glue_triples(s, S, f, x, mB, seed=0, count=60):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        i = rng.randrange(1000, len(x) - 1000)
        B = x[i:i + mB]
        occ = [j for j in range(len(x) - mB) if x.startswith(B, j)][:400]
        for A in sorted({x[j - 3:j] for j in occ}):
            for C in sorted({x[j + mB:j + mB + 3] for j in occ}):
                out.append((A, B, C))
    return out


def test_glue_matches_direct_factor_test():
    s, H, f = core(TM)
    S = build_scheme(H, min_scale=2)
    for _ in range(3):
        S = evolve(S, f).scheme
    x = s.A.word(naive_prefix(TM, 200_000))
    triples = glue_triples(s, S, f, x, 2 * S.max_word())
    seen = {True: 0, False: 0}
    for A, B, C in triples:
        pab, pbc, pb = locate(S, A + B, f), locate(S, B + C, f), locate(S, B, f)
        assert pab[len(pab) - len(pb):] == pb and pbc[:len(pb)] == pb
        g = glue(pab, pbc, pb, lambda p: f(S.front_word(p)))
        direct = f(A + B + C)
        assert (g is not None) == direct
        if g is not None:
            assert g == locate(S, A + B + C, f)
        seen[direct] += 1
    assert seen[True] > 50 and seen[False] > 5


def test_glue_rejects_misaligned_middle():
    with pytest.raises(GlueMismatch):
        glue((1, 2), (3, 4), (2,), lambda p: True)
    assert glue((1, 2), (2, 3), (2,), lambda p: False) is None
    assert glue((1, 2), (2, 3), (2,), lambda p: True) == (1, 2, 3)


def test_occurrence_helpers():
    assert occurrences("aa", "aaaa") == 3 and occurrences("", "ab") == 3
    assert path_contains((1, 2, 3), (2, 3)) and not path_contains((1, 2), (2, 1))


def test_to_dot_lists_every_edge():
    _, H, _ = core(TM)
    S = build_scheme(H)
    dot = S.to_dot(H.A.render)
    assert dot.count("->") == len(S.keys) and "shape=box" in dot
    assert {S.kind[v] for v in S.vertices} == {COLL, DIST}
