import pytest

from urmorph.bounded import Finite, analyze, classify_letters
from urmorph.contraction import DegenerateContraction, contract
from urmorph.words import apply, factors, prefix

from support import build, naive_prefix, naive_rules, tokens

# systems with bounded letters whose bounded factors are finite
CASES = [
    ("a:aba b:b", None),
    ("a:abca b:c c:b", None),
    ("a:abbca b:c c:b", None),
    ("a:acb b:cab c:c", None),
    ("a:abcda b:c c:d d:b", "a:0 b:1 c:1 d:0"),
]


def contracted(rules, codes=None):
    s = build(rules, codes)
    cls, _, rep = analyze(s)
    assert isinstance(rep, Finite) and cls.bounded
    return s, cls, contract(s, cls)


def test_periodic_example():
    s, _, c = contracted("a:aba b:b")
    assert c.C.tokens == ("[a.b.a]",)
    assert c.phi2[c.start] == c.start * 2
    assert s.A.render(c.f[c.start]) == "ab"


def test_without_bounded_letters_triples_are_pairs():
    s = build("a:ab b:ba")
    cls = classify_letters(s.phi)
    c = contract(s, cls)
    pairs = {s.A.render(t + t2) for t, w, t2 in c.triples}
    assert all(w == "" for _, w, _ in c.triples)
    assert pairs == {tokens(s, u) for u in factors(s, 2)}
    for i, (t, _, _) in enumerate(c.triples):
        assert c.f[chr(i)] == t


@pytest.mark.parametrize("rules,codes", CASES)
def test_prefix_fidelity(rules, codes):
    s, _, c = contracted(rules, codes)
    r = naive_rules(rules)
    a1 = rules.split()[0].split(":")[0]
    big, small = c.start, a1
    for n in range(1, 9):
        big = apply(c.phi2, big)
        small = "".join(r[ch] for ch in small)
        assert s.A.render(apply(c.f, big)).startswith(small)
    assert c.triples[ord(c.phi2[c.start][0])][0] == s.a1


@pytest.mark.parametrize("rules,codes", CASES)
def test_all_new_letters_grow_and_coding_is_non_erasing(rules, codes):
    s, _, c = contracted(rules, codes)
    assert not classify_letters(c.phi2).bounded
    assert all(c.f[x] for x in c.C.letters)
    # every triple t w t' is a factor of the preimage word
    x = s.preimage_prefix(50_000)
    for t, w, t2 in c.triples:
        assert t + w + t2 in x


@pytest.mark.parametrize("rules,codes", CASES)
def test_generated_word_is_unchanged(rules, codes):
    s, _, c = contracted(rules, codes)
    out = c.system(s.psi)
    assert tokens(out, prefix(out, 10_000)) == naive_prefix(rules, 10_000, codes)


def test_bounded_start_letter_is_degenerate():
    s = build("b:ba a:ab")   # b -> ba, a -> ab: start b grows, fine
    contract(s, classify_letters(s.phi))
    s = build("a:ab b:b")
    with pytest.raises(DegenerateContraction):
        contract(s, classify_letters(s.phi))
