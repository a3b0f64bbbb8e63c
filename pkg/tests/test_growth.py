import math
import random
from fractions import Fraction

import numpy as np
import pytest

from urmorph.growth import (
    GrowthAnalysis, all_same_order, compare, growth_bounds, growth_order, incidence_matrix,
)

from support import build, image_lengths, naive_rules, random_rules

TM, FIB, SPARSE, TAILC = "a:ab b:ba", "a:ab b:a", "c:cabc a:ab b:ba", "c:cb a:ab b:ba"


def order(rules, letter):
    s = build(rules)
    return growth_order(s.phi, s.A.letter(letter))


def test_incidence_matrix():
    s = build("a:aab b:ba")
    assert incidence_matrix(s.phi) == [[2, 1], [1, 1]]


def test_thue_morse_theta_is_exactly_two():
    o = order(TM, "a")
    assert o.d == 0
    assert o.theta.compare(2) == 0


def test_fibonacci_theta_isolated_near_golden_ratio():
    o = order(FIB, "a")
    o.theta.refine(Fraction(1, 10**6))
    assert o.theta.hi - o.theta.lo <= Fraction(1, 10**6)
    assert Fraction(1.61) < o.theta.lo and o.theta.hi < Fraction(1.62)
    assert abs(float(o.theta) - (1 + 5 ** 0.5) / 2) < 1e-9


def test_sparse_letter_has_polynomial_factor():
    o = order(SPARSE, "c")
    assert o.d == 1 and o.theta.compare(2) == 0
    # |φ^k(c)| / (k 2^k) settles, the log fit of |φ^k(c)| / 2^k against log k has slope ~1
    lens = image_lengths(naive_rules(SPARSE), 20)["c"]
    ks = np.arange(5, 21)
    slope = np.polyfit(np.log(ks), np.log([lens[k] / 2 ** k for k in ks]), 1)[0]
    assert 0.8 < slope < 1.2
    assert order(SPARSE, "a").d == 0


def test_order_comparison():
    assert compare(order(TM, "a"), order(TM, "b")) == 0
    assert order(FIB, "a") < order(TM, "a")
    assert order(SPARSE, "a") < order(SPARSE, "c")


def test_all_same_order():
    s = build(TM)
    same, o = all_same_order(s.phi)
    assert same and o.d == 0 and o.theta.compare(2) == 0
    assert not all_same_order(build(SPARSE).phi)[0]
    same, o = all_same_order(build(TAILC).phi)
    assert same and o.theta.compare(2) == 0
    assert image_lengths(naive_rules(TAILC), 12)["c"] == [2 ** k for k in range(13)]


@pytest.mark.parametrize("seed", range(20))
def test_orders_match_length_asymptotics(seed):
    rng = random.Random(seed)
    rules = random_rules(rng, rng.randint(2, 4), max_len=3, short_bias=0.2)
    s = build(rules)
    ga = GrowthAnalysis(s.phi)
    lens = image_lengths(naive_rules(rules), 120)
    for a in s.A.letters:
        seq = lens[s.A.token(a)]
        if seq[-1] == seq[-2]:
            continue    # bounded letter
        try:
            o = ga.order(a)
        except ValueError:
            # outside the domain of exponential orders: growth must be polynomial
            assert seq[120] <= 121 ** len(s.A)
            continue
        # log|φ^k| ≈ k log θ + d log k: compare the ratio over a long window
        k1, k2 = 60, 120
        est = (math.log(seq[k2]) - math.log(seq[k1]) - o.d * math.log(k2 / k1)) / (k2 - k1)
        assert abs(est - math.log(float(o.theta))) < 0.03, (rules, s.A.token(a), o)


def check_certificate(s, b):
    M = incidence_matrix(s.phi)
    n = len(M)
    v = b.upper
    # exact: M^T v <= theta_hi v with v > 0
    assert all(x > 0 for x in v)
    for i in range(n):
        assert sum(M[j][i] * v[j] for j in range(n)) <= b.theta_hi * v[i]
    idx = {c: i for i, c in enumerate(s.A.letters)}
    for comp, u in b.lower:
        ids = [idx[c] for c in comp]
        assert all(x > 0 for x in u)
        for jj, j in enumerate(ids):
            assert sum(u[ii] * M[i][j] for ii, i in enumerate(ids)) >= b.theta_lo * u[jj]
    assert b.holds(s.phi, s.psi, 30)


@pytest.mark.parametrize("rules,codes", [(TM, None), (FIB, None), (TAILC, None), (TAILC, "c:0 a:0 b:11"),
                                         ("a:aac b:cab c:b", None)])
def test_growth_bounds_certificates(rules, codes):
    s = build(rules, codes)
    b = growth_bounds(s.phi, s.psi)
    assert 1 < b.theta_lo <= b.theta_hi
    check_certificate(s, b)
    # brute force, independent of ``holds``
    lens = image_lengths(naive_rules(rules), 30)
    w = {a: len(s.psi[s.A.letter(a)]) for a in lens}
    for a in lens:
        for k in range(31):
            n = sum(w[c] * cnt for c, cnt in letter_counts(rules, a, k).items())
            assert b.C1 * b.theta_lo ** k <= n <= b.C2 * b.theta_hi ** k


def letter_counts(rules, a, k):
    r = naive_rules(rules)
    counts = {a: 1}
    for _ in range(k):
        nxt = {}
        for c, m in counts.items():
            for d in r[c]:
                nxt[d] = nxt.get(d, 0) + m
        counts = nxt
    return counts


def test_fibonacci_lower_bound_is_close_to_the_root():
    s = build(FIB)
    b = growth_bounds(s.phi, s.psi)
    assert Fraction(1.6) <= b.theta_lo <= Fraction(1.6181)
    assert b.theta_hi < Fraction(1.64)


def test_bounds_refuse_mixed_orders():
    s = build(SPARSE)
    with pytest.raises(ValueError):
        growth_bounds(s.phi, s.psi)


@pytest.mark.parametrize("rules", [TM, FIB, SPARSE, TAILC, "a:aac b:cab c:b"])
def test_order_is_stable_under_powering(rules):
    s = build(rules)
    sq = s.phi.power(2)
    for a in s.A.letters:
        o1, o2 = growth_order(s.phi, a), growth_order(sq, a)
        assert o1.d == o2.d
        assert o2.theta.compare(o1.theta) == 1
        # θ(φ²) = θ(φ)²: refine and compare the squares of the enclosures
        o1.theta.refine(Fraction(1, 10**8))
        o2.theta.refine(Fraction(1, 10**8))
        assert o1.theta.lo ** 2 <= o2.theta.hi and o2.theta.lo <= o1.theta.hi ** 2
