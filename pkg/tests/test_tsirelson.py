import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdspace.exact import FinVec
from bdspace.families import schreier
from bdspace.tsirelson import (CapExceeded, TsirelsonSpec,
                               build_dual_norming_set, certify_domination,
                               norming_functional, tree_vec, tsirelson_norm)
from oracles import bf_tsirelson

F = Fraction
S1 = schreier(1)
HALF = TsirelsonSpec(S1, F(1, 2))


def nat(entries):
    return FinVec("nat", entries)


def test_norm_examples():
    assert tsirelson_norm(nat({1: 1}), HALF) == 1
    assert tsirelson_norm(nat({1: 1, 2: 1}), HALF) == 1
    assert tsirelson_norm(nat({3: 1, 4: 1, 5: 1}), HALF) == F(3, 2)


def test_norm_banding_and_unconditionality():
    rng = random.Random(3)
    for _ in range(40):
        entries = {rng.randint(1, 9): F(rng.randint(-8, 8), 4)
                   for _ in range(rng.randint(1, 5))}
        x = nat(entries)
        n = tsirelson_norm(x, HALF)
        assert x.linf() <= n <= x.l1()
        flipped = nat({i: -v if rng.random() < 0.5 else v
                       for i, v in entries.items()})
        if flipped.support() == x.support():
            assert tsirelson_norm(flipped, HALF) == n


def test_oracle_equivalence_small_exhaustive():
    memo = {}
    for support in itertools.combinations(range(1, 7), 3):
        for vals in itertools.product((F(1), F(1, 2), F(-1)), repeat=3):
            x = dict(zip(support, vals))
            items = tuple((i, abs(v)) for i, v in sorted(x.items()))
            assert tsirelson_norm(nat(x), HALF) == bf_tsirelson(
                items, S1, F(1, 2), memo)


def test_oracle_equivalence_deeper_family():
    spec = TsirelsonSpec(schreier(2), F(1, 3))
    memo = {}
    rng = random.Random(7)
    for _ in range(25):
        sup = rng.sample(range(1, 9), rng.randint(1, 5))
        x = {i: F(rng.choice([1, -1, 2, -2]), rng.choice([1, 2])) for i in sup}
        items = tuple((i, abs(v)) for i, v in sorted(x.items()))
        assert tsirelson_norm(nat(x), spec) == bf_tsirelson(
            items, schreier(2), F(1, 3), memo)


def test_norming_functional_attains():
    rng = random.Random(11)
    for _ in range(25):
        sup = rng.sample(range(1, 9), rng.randint(1, 4))
        x = nat({i: F(rng.randint(-8, 8), 8) for i in sup})
        if not x:
            continue
        n, tree, vec = norming_functional(x, HALF)
        assert n == tsirelson_norm(x, HALF)
        assert vec.pair(x) == n
        assert set(vec.support()) <= set(x.support())


def test_dual_norming_set_examples():
    d0 = build_dual_norming_set(HALF, 0, 3)
    assert sorted(tuple(v.items()) for v in d0.members()) == sorted(
        ((j, F(s)),) for j in (1, 2, 3) for s in (1, -1))
    d1 = build_dual_norming_set(HALF, 1, 3)
    vecs = set(d1.members())
    assert nat({2: F(1, 2), 3: F(1, 2)}) in vecs
    assert nat({1: F(1, 2), 2: F(1, 2)}) not in vecs


def test_dual_norming_set_norms_from_below():
    d2 = build_dual_norming_set(HALF, 2, 5)
    d1 = build_dual_norming_set(HALF, 1, 5)
    rng = random.Random(5)
    for _ in range(20):
        x = nat({i: F(rng.randint(-4, 4), 4) for i in rng.sample(range(1, 6), 3)})
        n = tsirelson_norm(x, HALF)
        best1 = max((abs(v.pair(x)) for v in d1.members()), default=F(0))
        best2 = max((abs(v.pair(x)) for v in d2.members()), default=F(0))
        assert best1 <= best2 <= n
    # the deepest level attains the norm on vectors inside the bound
    x = nat({3: 1, 4: 1, 5: 1})
    assert max(abs(v.pair(x)) for v in d2.members()) == tsirelson_norm(x, HALF)


def test_dual_norming_set_cap():
    with pytest.raises(CapExceeded):
        build_dual_norming_set(HALF, 3, 9, member_cap=50)


def test_tree_vec_scaling():
    tree = ("node", (("leaf", 1, 2), ("leaf", -1, 3)))
    assert tree_vec(tree, HALF) == nat({2: F(1, 2), 3: F(-1, 2)})


def test_domination_identity_and_scaling():
    blocks = [nat({3: 1}), nat({4: 1}), nat({5: 1})]
    cert = certify_domination(blocks, [3, 4, 5], HALF, 1, trial_budget=60)
    assert cert.status == "PASS-AT-BUDGET"
    doubled = [b.scale(2) for b in blocks]
    cert = certify_domination(doubled, [3, 4, 5], HALF, 1, trial_budget=60)
    assert cert.status == "FAIL"
    assert cert.witness is not None
    lhs, rhs = cert.witness_values
    assert lhs > rhs


def test_domination_requires_successive_blocks():
    with pytest.raises(ValueError):
        certify_domination([nat({3: 1, 5: 1}), nat({4: 1})], [3, 4], HALF, 1)


@settings(max_examples=30, deadline=None)
@given(st.dictionaries(st.integers(min_value=1, max_value=7),
                       st.fractions(min_value=-2, max_value=2,
                                    max_denominator=4), max_size=4))
def test_triangle_inequality(entries):
    x = nat(entries)
    y = nat({i + 1: v for i, v in entries.items()})
    nx, ny = tsirelson_norm(x, HALF), tsirelson_norm(y, HALF)
    assert tsirelson_norm(x + y, HALF) <= nx + ny
