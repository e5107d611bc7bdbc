import random
from fractions import Fraction

import pytest

from bdspace import bdcore
from bdspace.bdcore import BDBuild, BuildError, Gamma1
from bdspace.exact import FinVec

F = Fraction


def tiny_build():
    """Handmade four-stage build exercising both element types."""
    bd = BDBuild("bd:tiny")
    u = lambda e: FinVec("bd:tiny", e)  # noqa: E731
    a = bd.add_type0(1, 0, u({}))
    b = bd.add_type0(1, 0, u({}))
    c = bd.add_type0(2, F(1, 2), u({a: F(1, 2), b: F(1, 2)}))
    d = bd.add_type0(2, 0, u({}))
    e = bd.add_type1(3, F(1, 4), 1, a, F(1, 8), u({c: F(2, 3), d: F(1, 3)}))
    f = bd.add_type0(3, F(1), u({a: F(-1, 2), c: F(1, 2)}))
    g = bd.add_type1(4, F(1), 2, c, F(1, 8), u({e: 1}))
    h = bd.add_type1(4, F(1, 3), 1, b, F(1, 2), u({d: 1}))  # exempt: c*_d = 0
    bd.freeze()
    return bd, (a, b, c, d, e, f, g, h)


def test_schema_valid():
    bd, _ = tiny_build()
    assert bdcore.validate_schema(bd).ok


def test_insertion_guards():
    bd = BDBuild("bd:t2")
    u = lambda e: FinVec("bd:t2", e)  # noqa: E731
    a = bd.add_type0(1, 0, u({}))
    with pytest.raises(BuildError):
        bd.add_type0(2, F(1, 2), u({a: 3}))          # l1 ball violated
    with pytest.raises(BuildError):
        bd.add_type0(1, F(1, 2), u({a: F(1, 2)}))    # rank-1 with c* != 0
    b = bd.add_type0(2, 0, u({}))
    with pytest.raises(BuildError):
        # type-1 b* must avoid Gamma_k: support at rank 1 with k = 1
        bd.add_type1(3, 1, 1, a, F(1, 2), u({a: 1}))


def test_schema_fault_injection():
    bd, ids = tiny_build()
    a, b, c, *_ = ids
    bd.cstar_table[c] = FinVec("bd:tiny", {a: F(1, 3)})
    rep = bdcore.validate_schema(bd)
    assert not rep.ok
    assert any(str(c) in v for v in rep.violations)


def test_schema_reports_ball_violation():
    bd, ids = tiny_build()
    g = ids[6]
    e = bd.elems[g]
    object.__setattr__(e, "bstar", FinVec("bd:tiny", {ids[4]: F(3, 2)}))
    rep = bdcore.validate_schema(bd)
    assert any("ball" in v for v in rep.violations)


def test_projection_examples():
    bd, ids = tiny_build()
    a, b, c, d, e, f, g, h = ids
    # an element with vanishing correction projects to itself
    assert bd.cstar(d) == FinVec("bd:tiny")
    assert bd.project(bd.estar(d), 1, 3) == bd.estar(d)
    # elements of Gamma_k die under P*_(k, m]
    assert bd.project(bd.estar(a), 1, 3) == FinVec("bd:tiny")
    assert bd.project(bd.estar(c), 2, 4) == FinVec("bd:tiny")


def test_projection_idempotence_random():
    bd, _ = tiny_build()
    rep = bdcore.verify_projection_idempotence(bd, samples=60)
    assert rep.ok, rep.violations


def test_projection_is_dstar_filter():
    bd, ids = tiny_build()
    rng = random.Random(4)
    for _ in range(30):
        v = FinVec("bd:tiny", {g: F(rng.randint(-6, 6), 3)
                               for g in rng.sample(ids, 3)})
        k, m = sorted(rng.sample(range(0, 5), 2))
        p = bd.project(v, k, m)
        dp = bd.bc.to_d(p)
        assert all(k < bd.rank[t] <= m for t in dp.support())
        dv = bd.bc.to_d(v)
        assert dp == dv.restrict(lambda t: k < bd.rank[t] <= m)


def test_constants_trivial_stage():
    bd, _ = tiny_build()
    rep = bdcore.compute_constants(bd, F(1, 4))
    assert rep.ok
    cn = rep.details["C_n"]
    assert cn[1] == 0 and cn[2] == 0  # no type-1 elements through stage 2
    assert rep.details["M_computed"] <= 1 + cn[4]


def test_weight_split_and_apriori_bound():
    bd, _ = tiny_build()
    rep = bdcore.condition_weight_split(bd, F(1, 4))
    assert rep.ok  # weights 1/8, 1/8 <= 1/4; weight 1/2 exempt via b* = e*_d
    assert bdcore.decomposition_bound(bd, F(1, 4)) == 2
    rep = bdcore.condition_weight_split(bd, F(1, 16))
    assert not rep.ok  # 1/8 > 1/16 and its b* is not exempt


def test_extension_restriction_identity():
    bd, ids = tiny_build()
    rng = random.Random(8)
    for m in (1, 2, 3):
        gam = bd.gamma_upto(m)
        x = FinVec("bd:tiny", {g: F(rng.randint(-8, 8), 8) for g in gam})
        jx = bd.apply_Jm(x, m)
        assert jx.restrict(lambda i: bd.rank[i] <= m) == x


def test_extension_isometry_on_stage_patterns():
    bd, _ = tiny_build()
    for m in sorted(bd.stages):
        rep = bdcore.verify_extension_isometry(bd, m)
        assert rep.ok, rep.violations


def test_extension_compatibility():
    bd, _ = tiny_build()
    rep = bdcore.verify_extension_compatibility(bd, samples=40)
    assert rep.ok, rep.violations


def test_extension_norm_bound():
    bd, _ = tiny_build()
    mbound = bdcore.decomposition_bound(bd, F(1, 4))
    rng = random.Random(9)
    for _ in range(30):
        m = rng.choice(list(bd.stages))
        x = FinVec("bd:tiny", {g: F(rng.randint(-4, 4), 4)
                               for g in bd.gamma_upto(m)})
        assert bd.apply_Jm(x, m).linf() <= mbound * x.linf()


def test_analysis_records():
    bd, ids = tiny_build()
    a, b, c, d, e, f, g, h = ids
    rec = bd.analyze(c)
    assert len(rec.terms) == 1 and rec.cuts == (2,)  # type-0 root
    assert bd.analyze(e).cuts == (1, 3)
    rec = bd.analyze(g)
    assert rec.cuts == (2, 4)  # chain passes through xi = c directly
    rep = bdcore.verify_analysis(bd)
    assert rep.ok, rep.violations


def test_analysis_partial_coefficients():
    bd, ids = tiny_build()
    g = ids[6]
    rec = bd.analyze(g)
    # alpha multipliers multiply down the chain
    alphas = [t[0] for t in rec.terms]
    assert alphas[-1] == 1
    chain_elem = bd.elems[g]
    assert isinstance(chain_elem, Gamma1)
    assert alphas[-2] == chain_elem.alpha


def test_dual_norm_band():
    bd, _ = tiny_build()
    m = bdcore.decomposition_bound(bd, F(1, 4))
    rep = bdcore.verify_dual_norms(bd, m, samples=60)
    assert rep.ok, rep.violations


def test_block_components_sum_back():
    bd, ids = tiny_build()
    rng = random.Random(10)
    for _ in range(10):
        x = FinVec("bd:tiny", {g: F(rng.randint(-8, 8), 8) for g in ids})
        x = bd.apply_Jm(x.restrict(lambda i: bd.rank[i] <= 4), 4)
        total = FinVec("bd:tiny")
        for j in range(1, 5):
            total = total + bd.block_component(x, j)
        assert total == x


def test_stage_patterns_reextend():
    bd, ids = tiny_build()
    x = bd.apply_Jm(FinVec("bd:tiny", {ids[2]: 1, ids[0]: F(-1, 2)}), 2)
    pats = bd.stage_patterns(x)
    assert bd.reextend(pats) == x
