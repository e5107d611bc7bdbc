"""Building a Bourgain-Delbaen host space around a seed space.

The index set is coded combinatorially: an element is a nonempty initial
segment (r_1 x*_1, ..., r_j x*_j) of the recorded special c-decomposition of
some norming-set member.  Bounded intervals of N are well ordered by

    [n1, n2] < [m1, m2]  iff  n2 < m2, or n2 = m2 and n1 > m1,

and the rank of a coded element is the position of the interval spanned by
its support blocks in that order.  Block j of the seed embeds at rank
m_j = 1 + j(j-1)/2 (so m_1, m_2, ... = 1, 2, 4, 7, 11, ...), where the
rank-m_j stage consists of the scaled single-block elements.

Each coded element is recoded into the type-0/type-1 schema, in four cases
keyed by the shape of the tuple; the correction functional is
alpha e*_xi + beta e*_eta with xi, eta earlier coded elements, and the
recoded projected form agrees with it exactly because the referenced
elements sit late enough in the well order.  The embedding of the seed
space maps block i through the stage-m_i coordinates and extends by the
J operators; the identity

    e*_gamma(phi(x)) = sum_j r_j x*_j(x)

is re-verified exactly for every built element, which pins the upper bound
||phi(x)|| <= ||x||, while the lower bound (1 - eps)||x|| is witnessed by
the coded element of a near-optimal norming functional (or reported
INCONCLUSIVE with the first stage that would contain it).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .bdcore import BDBuild, BuildError, Report
from .decomp import NormingSetD, SeedSpace
from .exact import FinVec


# ---------------------------------------------------------------------------
# the interval well order and the m sequence
# ---------------------------------------------------------------------------

def interval_rank(a: int, b: int) -> int:
    """Position of the interval [a, b] in the well order (1-based)."""
    if not (1 <= a <= b):
        raise ValueError("need 1 <= a <= b")
    return (b - 1) * b // 2 + (b - a + 1)


def interval_from_rank(n: int) -> tuple[int, int]:
    if n < 1:
        raise ValueError("rank must be >= 1")
    b = 1
    while b * (b + 1) // 2 < n:
        b += 1
    rem = n - (b - 1) * b // 2
    return (b - rem + 1, b)


def m_seq(j: int) -> int:
    """m_1 = 1 and m_{j+1} = m_j + j: the ranks hosting the seed blocks."""
    if j < 1:
        raise ValueError("index must be >= 1")
    return 1 + j * (j - 1) // 2


def i0_of_rank(n: int) -> int:
    """The unique i with m_i <= n < m_{i+1}."""
    i = 1
    while m_seq(i + 1) <= n:
        i += 1
    return i


def is_block_rank(n: int) -> bool:
    return interval_from_rank(n)[0] == interval_from_rank(n)[1]


# ---------------------------------------------------------------------------
# coded elements
# ---------------------------------------------------------------------------

@dataclass
class CodedInfo:
    entries: tuple                 # ((r, member index), ...)
    case: str                      # "i" | "ii" | "iii" | "iv"
    rank: int
    vecsum: FinVec                 # sum r_i x*_i over the seed coordinates
    supp_blocks: tuple[int, ...]
    xi: tuple | None = None        # coded tuple of the xi reference
    eta: tuple | None = None       # coded tuple of the eta reference
    coeffs: tuple | None = None    # (alpha, beta) of c* = alpha e_xi + beta e_eta


@dataclass
class EmbeddingBuild:
    seed: SeedSpace
    D: NormingSetD
    stage_bound: int
    bd: BDBuild
    code_of: dict                          # coded tuple -> bd id
    info: dict                             # bd id -> CodedInfo
    pruned: bool = False
    prune_log: list = field(default_factory=list)

    def tuple_of(self, g: int) -> tuple:
        return self.info[g].entries

    def full_code(self, member_index: int) -> tuple:
        return tuple(self.D.members[member_index].decomp)

    def nblocks_covered(self) -> int:
        i = 1
        while m_seq(i + 1) <= self.stage_bound:
            i += 1
        return min(i, self.seed.nblocks)


def _tuple_vecsum(D: NormingSetD, entries: tuple) -> FinVec:
    acc = FinVec(D.seed.universe)
    for r, j in entries:
        acc = acc + D.members[j].vec.scale(r)
    return acc


def _tuple_blocks(D: NormingSetD, entries: tuple) -> tuple[int, ...]:
    s = D.seed
    blocks = set()
    for _, j in entries:
        m = D.members[j]
        for b in range(m.block_lo, m.block_hi + 1):
            if s.restrict_blocks(m.vec, b, b):
                blocks.add(b)
    return tuple(sorted(blocks))


def build_embedding(seed: SeedSpace, D: NormingSetD, stage_bound: int,
                    stage_caps: dict[int, int] | int | None = None
                    ) -> EmbeddingBuild:
    """Generate the coded index set up to ``stage_bound`` and register it.

    Per-rank caps prune deterministically (canonical tuple order) and keep
    every referenced element, so all per-element identities remain exactly
    checkable on pruned builds; pruning is recorded.
    """
    s = seed

    # collect every prefix of every member's recorded decomposition
    tuples: set[tuple] = set()
    for m in D.members:
        dec = tuple(m.decomp)
        for j in range(1, len(dec) + 1):
            tuples.add(dec[:j])

    def rank_of(entries: tuple) -> int:
        blocks = _tuple_blocks(D, entries)
        return interval_rank(blocks[0], blocks[-1])

    ranked: dict[tuple, int] = {t: rank_of(t) for t in tuples}
    kept = {t for t, r in ranked.items() if r <= stage_bound}

    def cap_of(n: int):
        if stage_caps is None:
            return None
        if isinstance(stage_caps, int):
            return stage_caps
        return stage_caps.get(n)

    def references(t: tuple) -> list[tuple]:
        ln = len(t)
        blocks = _tuple_blocks(D, t)
        rk = ranked[t]
        if len(blocks) == 1:
            return []
        out = []
        if ln == 1:
            dec = tuple(D.members[t[0][1]].decomp)
            out.append(dec[:-1])
            out.append(tuple(D.members[dec[-1][1]].decomp))
        elif ln == 2 and D.members[t[0][1]].block_lo == D.members[t[0][1]].block_hi:
            out.append(((Fraction(1), t[0][1]),))
            out.append(tuple(D.members[t[1][1]].decomp))
        else:
            out.append(t[:-1])
            out.append(tuple(D.members[t[-1][1]].decomp))
        return out

    pruned = False
    prune_log = []
    if stage_caps is not None:
        by_rank: dict[int, list[tuple]] = {}
        for t in kept:
            by_rank.setdefault(ranked[t], []).append(t)
        chosen: set[tuple] = set()
        for n in sorted(by_rank):
            cands = sorted(by_rank[n])
            cap = cap_of(n)
            if cap is not None and len(cands) > cap:
                pruned = True
                prune_log.append(f"stage {n}: kept {cap} of {len(cands)}")
                cands = cands[:cap]
            chosen.update(cands)
        # dependency closure: every reference of a kept tuple is kept
        frontier = list(chosen)
        while frontier:
            t = frontier.pop()
            for ref in references(t):
                if ref not in chosen:
                    if ranked.get(ref) is None:
                        ranked[ref] = rank_of(ref)
                    chosen.add(ref)
                    frontier.append(ref)
        kept = chosen

    bd = BDBuild(f"bd:{s.name}")
    code_of: dict[tuple, int] = {}
    info: dict[int, CodedInfo] = {}

    for t in sorted(kept, key=lambda t: (ranked[t], t)):
        rk = ranked[t]
        blocks = _tuple_blocks(D, t)
        vecsum = _tuple_vecsum(D, t)
        ln = len(t)
        if len(blocks) == 1:
            if not is_block_rank(rk) or ln != 1:
                raise BuildError(f"coded element {t} misclassified")
            g = bd.add_type0(rk, 0, FinVec(bd.universe), free=t)
            info[g] = CodedInfo(t, "i", rk, vecsum, blocks)
            code_of[t] = g
            continue
        if ln == 1:
            case = "ii"
            dec = tuple(D.members[t[0][1]].decomp)
            xi_t, eta_t = dec[:-1], tuple(D.members[dec[-1][1]].decomp)
            r1 = t[0][0]
            sm = dec[-1][0]
            alpha, beta = r1, r1 * sm
        elif ln == 2 and D.members[t[0][1]].block_lo == D.members[t[0][1]].block_hi:
            case = "iii"
            xi_t = ((Fraction(1), t[0][1]),)
            eta_t = tuple(D.members[t[1][1]].decomp)
            alpha, beta = t[0][0], t[1][0]
        else:
            case = "iv"
            xi_t = t[:-1]
            eta_t = tuple(D.members[t[-1][1]].decomp)
            alpha, beta = Fraction(1), t[-1][0]
        xi_id, eta_id = code_of[xi_t], code_of[eta_t]
        k = bd.rank[xi_id]
        if not (k < bd.rank[eta_id] <= rk - 1):
            raise BuildError(
                f"reference ranks out of order for {t}: "
                f"rk(xi)={k}, rk(eta)={bd.rank[eta_id]}, rk={rk}")
        if case == "ii":
            bstar = FinVec(bd.universe, {xi_id: Fraction(1, 2),
                                         eta_id: sm / 2})
            g = bd.add_type0(rk, 2 * r1, bstar, free=t)
        else:
            g = bd.add_type1(rk, alpha, k, xi_id,
                             beta, FinVec(bd.universe, {eta_id: 1}), free=t)
        info[g] = CodedInfo(t, case, rk, vecsum, blocks, xi_t, eta_t,
                            (alpha, beta))
        code_of[t] = g

    bd.freeze()
    return EmbeddingBuild(seed, D, stage_bound, bd, code_of, info,
                          pruned=pruned, prune_log=prune_log)


# ---------------------------------------------------------------------------
# structural verification of the coding
# ---------------------------------------------------------------------------

def verify_coding(eb: EmbeddingBuild) -> Report:
    """Exact per-element checks tying the coded data to the schema data."""
    rep = Report("coding")
    bd, D, s = eb.bd, eb.D, eb.seed
    covered = eb.nblocks_covered()
    for n in range(1, eb.stage_bound + 1):
        a, b = interval_from_rank(n)
        if b <= covered and not bd.stage(n):
            rep.violations.append(f"stage {n} empty though blocks reach {b}")
    for g, inf in eb.info.items():
        # the interval position of the support matches the rank
        if interval_rank(inf.supp_blocks[0], inf.supp_blocks[-1]) != inf.rank:
            rep.violations.append(f"{g}: rank does not match the support span")
        # m_{i0} <= rk < m_{i0+1} exactly when i0 is the largest support block
        i0 = inf.supp_blocks[-1]
        if not (m_seq(i0) <= inf.rank < m_seq(i0 + 1)):
            rep.violations.append(f"{g}: rank window violates the block index")
        # minimal stage touched by e*_g is at least m_{min block}
        min_rank = min(bd.rank[t] for t in bd.dexp(g).support())
        if min_rank < m_seq(inf.supp_blocks[0]):
            rep.violations.append(f"{g}: d-support starts before m_(min block)")
        if inf.case == "i":
            if bd.cstar(g):
                rep.violations.append(f"{g}: block-rank element with c* != 0")
            continue
        xi_id, eta_id = eb.code_of[inf.xi], eb.code_of[inf.eta]
        alpha, beta = inf.coeffs
        coded_cstar = FinVec(bd.universe, {xi_id: alpha, eta_id: beta})
        if coded_cstar != bd.cstar(g):
            rep.violations.append(
                f"{g}: schema c* differs from alpha e_xi + beta e_eta "
                "(projection must fix e_eta)")
        # coefficient identity on the seed side
        lhs = inf.vecsum
        rhs = (eb.info[xi_id].vecsum.scale(alpha)
               + eb.info[eta_id].vecsum.scale(beta))
        if lhs != rhs:
            rep.violations.append(f"{g}: seed-side coefficient identity fails")
    return rep


def check_block_rank_order(eb: EmbeddingBuild, j: int) -> Report:
    """Order structure around the rank-m_j stage, as set equalities."""
    rep = Report(f"order-at-block-{j}")
    mj = m_seq(j)
    below = {g for g, i in eb.info.items() if i.rank < mj}
    below_expect = {g for g, i in eb.info.items() if i.supp_blocks[-1] < j}
    if below != below_expect:
        rep.violations.append(f"below-set mismatch at block {j}")
    above = {g for g, i in eb.info.items() if i.rank > mj}
    above_expect = {g for g, i in eb.info.items()
                    if i.supp_blocks[-1] >= j and i.supp_blocks != (j,)}
    if above != above_expect:
        rep.violations.append(f"above-set mismatch at block {j}")
    return rep


# ---------------------------------------------------------------------------
# the embedding
# ---------------------------------------------------------------------------

def embed_phi(eb: EmbeddingBuild, x: FinVec) -> FinVec:
    """Image of a seed vector: block i acts on the rank-m_i stage and is
    extended by J_{m_i}; the images are summed over the built stages."""
    s, bd, D = eb.seed, eb.bd, eb.D
    if x.universe != s.universe:
        raise BuildError("vector not over the seed space")
    out = FinVec(bd.universe)
    top = bd.max_rank()
    for blk in range(1, s.nblocks + 1):
        xb = s.restrict_blocks(x, blk, blk)
        if not xb:
            continue
        mi = m_seq(blk)
        stage = bd.stage(mi)
        if not stage:
            raise BuildError(f"stage bound too low for block {blk}")
        u = {}
        for g in stage:
            (r, j), = eb.info[g].entries
            val = r * D.members[j].vec.pair(xb)
            if val:
                u[g] = val
        out = out + bd.apply_Jm(FinVec(bd.universe, u), mi, top)
    return out


def phi_functional_identity(eb: EmbeddingBuild, x: FinVec,
                            image: FinVec | None = None) -> Report:
    """e*_g(phi(x)) = sum_j r_j x*_j(x) for every built element, exactly."""
    rep = Report("embedding-identity")
    if image is None:
        image = embed_phi(eb, x)
    for g, inf in eb.info.items():
        expect = sum((r * eb.D.members[j].vec.pair(x) for r, j in inf.entries),
                     Fraction(0))
        if image[g] != expect:
            rep.violations.append(
                f"{g}: e*(phi x) = {image[g]} != {expect}")
    return rep


@dataclass
class EmbeddingSample:
    x: FinVec
    norm: Fraction
    image_norm: Fraction
    status: str          # "WITNESSED" | "INCONCLUSIVE" | "FAIL"
    witness_stage: int | None = None


def verify_embedding(eb: EmbeddingBuild, samples: Sequence[FinVec] | int = 100,
                     seed_rng: int = 0) -> tuple[Report, list[EmbeddingSample]]:
    """Two-sided embedding bounds on sample vectors.

    The upper bound ||phi(x)|| <= ||x|| is exact over the built stages.  The
    lower bound (1 - eps)||x|| is witnessed when some built coordinate of
    phi(x) reaches it; otherwise the best norming-set member is located and
    the first stage containing its coded element is reported, INCONCLUSIVE.
    """
    s, bd, D = eb.seed, eb.bd, eb.D
    rep = Report("embedding-bounds")
    covered = eb.nblocks_covered()
    if isinstance(samples, int):
        rng = random.Random(seed_rng)
        vecs = []
        for _ in range(samples):
            nsup = rng.randint(1, min(3, covered))
            blocks = rng.sample(range(1, covered + 1), nsup)
            entries = {}
            for b in blocks:
                for i in s.block_coords(b):
                    entries[i] = Fraction(rng.randint(-8, 8), 8)
            v = FinVec(s.universe, entries)
            if v:
                vecs.append(v)
    else:
        vecs = list(samples)

    out = []
    bound = (1 - s.eps)
    for x in vecs:
        nx = s.primal_norm(x)
        img = embed_phi(eb, x)
        idrep = phi_functional_identity(eb, x, img)
        rep.violations.extend(idrep.violations)
        up = img.linf()
        if up > nx:
            rep.violations.append(f"upper bound fails: {up} > {nx}")
        if up >= bound * nx:
            out.append(EmbeddingSample(x, nx, up, "WITNESSED"))
            continue
        # locate the best functional in D and the stage of its coded element
        best = None
        for j, mem in enumerate(D.members):
            v = abs(mem.vec.pair(x))
            if best is None or v > best[0]:
                best = (v, j)
        val, j = best
        full = eb.full_code(j)
        blocks = _tuple_blocks(D, full)
        stage = interval_rank(blocks[0], blocks[-1])
        if val >= bound * nx:
            out.append(EmbeddingSample(x, nx, up, "INCONCLUSIVE", stage))
        else:
            out.append(EmbeddingSample(x, nx, up, "FAIL", stage))
            rep.violations.append(
                f"no norming member reaches (1-eps)||x|| for {x}")
    rep.details["witnessed"] = sum(1 for o in out if o.status == "WITNESSED")
    rep.details["inconclusive"] = sum(1 for o in out if o.status == "INCONCLUSIVE")
    rep.details["total"] = len(out)
    return rep, out


def cuts_family(eb: EmbeddingBuild) -> list[tuple[int, ...]]:
    return [eb.bd.cuts(g) for g in eb.bd.ids()]
