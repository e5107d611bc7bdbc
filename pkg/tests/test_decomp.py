import random
from fractions import Fraction

import pytest

from bdspace.decomp import (SeedSpace, SeedSpaceError, build_norming_set_D,
                            check_subsequential_upper,
                            decomposition_closure_report, default_eps_seq,
                            member_band_report, norming_certificate,
                            optimal_c_decomposition, rounding_error_report,
                            tsirelson_seed, vstar_norm)
from bdspace.exact import FinVec
from bdspace.families import schreier
from bdspace.tsirelson import TsirelsonSpec
from oracles import polytope_vertices

F = Fraction
S1 = schreier(1)


def l1(v):
    return v.l1()


# -- greedy decomposition -----------------------------------------------------

def test_greedy_spec_example():
    x = FinVec("l1", {1: F(3, 10), 2: F(3, 10), 3: F(4, 5)})
    dec = optimal_c_decomposition(x, F(1, 2), l1)
    assert dec.breakpoints == (1, 2, 3, 4)
    assert [dict(b.items()) for b in dec.blocks()] == [
        {1: F(3, 10)}, {2: F(3, 10)}, {3: F(4, 5)}]


def test_greedy_single_coordinate():
    x = FinVec("l1", {4: F(7, 8)})
    dec = optimal_c_decomposition(x, F(1, 2), l1)
    assert dec.blocks() == (x,)


def test_greedy_all_small_one_block():
    x = FinVec("l1", {1: F(1, 10), 2: F(1, 10), 3: F(1, 10)})
    dec = optimal_c_decomposition(x, F(1, 2), l1)
    assert dec.blocks() == (x,)
    assert dec.breakpoints == (1, 4)


def test_greedy_reconstruction_and_adjacency():
    rng = random.Random(0)
    for trial in range(1000):
        sup = rng.sample(range(1, 12), rng.randint(1, 6))
        x = FinVec("l1", {i: F(rng.randint(-16, 16), 16) for i in sup})
        if not x:
            continue
        c = F(rng.randint(1, 6), 8)
        dec = optimal_c_decomposition(x, c, l1)
        total = FinVec("l1")
        for p in dec.pieces:
            total = total + p
        assert total == x
        blocks = dec.blocks()
        for a, b in zip(blocks, blocks[1:]):
            assert a.support()[-1] < b.support()[0]
        for p in blocks:
            assert len({i for i in p.support()}) == 1 or l1(p) <= c
        # adjacent pairs from the raw breakpoint pieces exceed c
        for j in range(len(dec.pieces) // 2):
            pair_sum = dec.pieces[2 * j] + dec.pieces[2 * j + 1]
            assert l1(pair_sum) > c


# -- seed spaces -----------------------------------------------------------------

def test_eps_seq_rule():
    eps = F(1, 32)
    seq = default_eps_seq(eps, 5)
    assert sum(seq) < eps / 8
    for n in range(5):
        assert sum(seq[n + 1:], F(0)) < seq[n] / 2


def test_seed_validation_rejects_bad_eps():
    with pytest.raises(SeedSpaceError):
        SeedSpace("bad", [1], [FinVec("seed:bad", {1: 1})], F(1, 16), F(1, 8))


def test_tsirelson_seed_norm_matches_module(acc_seed):
    spec = TsirelsonSpec(S1, F(1, 16))
    from bdspace.tsirelson import tsirelson_norm
    rng = random.Random(1)
    for _ in range(25):
        entries = {i: F(rng.randint(-8, 8), 8)
                   for i in rng.sample(range(1, 5), rng.randint(1, 3))}
        x = FinVec(acc_seed.universe, entries)
        assert acc_seed.primal_norm(x) == tsirelson_norm(
            FinVec("nat", entries), spec)


def test_dual_norm_against_vertex_oracle(acc_seed):
    # dual norm = max over the vertices of the primal ball, cross-checked
    # on the two-block section
    gens = [acc_seed.restrict_blocks(g, 1, 2) for g in acc_seed.norming]
    gens = [g for g in gens if g and set(g.support()) <= {1, 2}]
    rows = [[g[1], g[2]] for g in gens]
    verts = polytope_vertices(rows, 2)
    rng = random.Random(2)
    for _ in range(10):
        f = FinVec(acc_seed.universe,
                   {1: F(rng.randint(-4, 4), 4), 2: F(rng.randint(-4, 4), 4)})
        if not f:
            continue
        by_vertex = max(abs(f[1] * v[0] + f[2] * v[1]) for v in verts)
        assert acc_seed.dual_norm(f) == by_vertex


def test_seed_bimonotone_validation(acc_seed):
    assert acc_seed.validate() == []


def test_extension_keeps_norms(acc_seed):
    ext = acc_seed.extended(6)
    assert ext.validate() == []
    x = FinVec(ext.universe, {1: 1, 2: F(-1, 2)})
    assert ext.primal_norm(x) == acc_seed.primal_norm(
        FinVec(acc_seed.universe, dict(x.items())))
    y = FinVec(ext.universe, {5: F(3, 4), 6: F(-1, 4)})
    assert ext.primal_norm(y) == F(3, 4)


# -- the norming set ---------------------------------------------------------------

def test_atoms_equal_scaled_dense_sets(acc_seed, acc_D):
    factor = 1 + acc_seed.eps / 4
    for blk in range(1, acc_seed.nblocks + 1):
        atoms = {acc_D.members[i].vec for i in acc_D.atoms_of(blk)}
        expect = {a.scale(1 / factor) for a in acc_seed.atilde[blk - 1]}
        assert atoms == expect
        # the single-block intersection holds nothing besides the atoms
        assert set(acc_D.indices_in(blk, blk)) == set(acc_D.atoms_of(blk))


def test_norming_set_cap_flags_pruned(acc_seed):
    D = build_norming_set_D(acc_seed, size_cap=5)
    assert D.pruned
    assert len(D.members) <= 5
    # whatever was kept still satisfies the per-member invariants
    assert member_band_report(D) == []
    assert rounding_error_report(D) == []
    assert decomposition_closure_report(D) == []


def test_member_band_exact(acc_seed, acc_D):
    assert member_band_report(acc_D) == []
    for m in acc_D.members:
        n = acc_seed.dual_norm(m.vec)
        assert F(1, 2) <= n <= 1


def test_rounding_error_exact(acc_D):
    assert rounding_error_report(acc_D) == []


def test_decomposition_closure(acc_D):
    assert decomposition_closure_report(acc_D) == []


def test_norming_certificates_all_intervals(acc_seed, acc_D):
    for lo in range(1, acc_seed.nblocks + 1):
        for hi in range(lo, acc_seed.nblocks + 1):
            w, detail = norming_certificate(acc_D, lo, hi)
            assert w <= acc_seed.eps, (lo, hi, w)
            assert detail


def test_unconditional_variant_atoms():
    seed = tsirelson_seed("u", S1, F(1, 16), 3)
    D = build_norming_set_D(seed)
    assert member_band_report(D) == []
    assert rounding_error_report(D) == []
    assert decomposition_closure_report(D) == []
    # a') atoms coincide with the dense sets, no normalization factor
    for blk in range(1, 4):
        atoms = {D.members[i].vec for i in D.atoms_of(blk)}
        assert atoms == set(seed.atilde[blk - 1])


def test_case_coverage_for_coding(acc_D):
    # decompositions with a multi-block first piece exist (drives the
    # type-0 recoding case downstream)
    found = False
    for m in acc_D.members:
        if m.atom_block is None:
            first = acc_D.members[m.decomp[0][1]]
            if first.block_hi > first.block_lo:
                found = True
    assert found


# -- subsequential upper estimates --------------------------------------------------

def test_vstar_norm_examples():
    spec = TsirelsonSpec(S1, F(1, 2))
    assert vstar_norm({1: F(1)}, spec) == 1
    assert vstar_norm({1: F(1), 2: F(1)}, spec) == 2
    # e*_3 + e*_4 + e*_5 acts on e_3 + e_4 + e_5 of norm 3/2
    assert vstar_norm({3: F(1), 4: F(1), 5: F(1)}, spec) == 2


def test_upper_estimate_single_coordinate(acc_seed):
    spec = TsirelsonSpec(S1, F(1, 2))
    z = FinVec(acc_seed.universe, {2: F(1, 2)})
    cert = check_subsequential_upper([z], acc_seed, spec, 1)
    assert cert.status == "PASS-AT-BUDGET"
    assert cert.max_value <= 1


def test_upper_estimate_c0_type_failure():
    # sup-normed seed: the coordinate functionals sum with no decay, so the
    # l1-type target with C = 1 must fail on the two-coordinate functional
    uni = "seed:c0"
    norming = [FinVec(uni, {1: 1}), FinVec(uni, {1: -1}),
               FinVec(uni, {2: 1}), FinVec(uni, {2: -1})]
    seed = SeedSpace("c0", [1, 1], norming, F(1, 16), F(1, 32))
    assert seed.validate() == []
    spec = TsirelsonSpec(S1, F(1, 2))
    z = FinVec(uni, {1: 1, 2: 1})
    cert = check_subsequential_upper([z], seed, spec, 1)
    assert cert.status == "FAIL"
    assert cert.witness[2] == 2  # the evaluated value || v*_1 + v*_2 ||


def test_upper_estimate_logged_constant(acc_seed, acc_D):
    spec = TsirelsonSpec(S1, F(1, 2))
    members = [m.vec for m in acc_D.members][:10]
    probe = check_subsequential_upper(members, acc_seed, spec, 10 ** 6)
    logged = probe.max_value
    cert = check_subsequential_upper(members, acc_seed, spec, logged)
    assert cert.status == "PASS-AT-BUDGET"
    assert cert.max_value == logged
