import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bdspace.construction import build_embedding
from bdspace.decomp import SeedSpace, build_norming_set_D
from bdspace.exact import FinVec
from bdspace.families import schreier
from bdspace.tsirelson import TsirelsonSpec, build_dual_norming_set


def make_acceptance_seed(nblocks: int = 4) -> SeedSpace:
    """The canonical acceptance seed: a truncated Tsirelson-normed space,
    one-dimensional blocks, built through the general (normalized) variant."""
    c = Fraction(1, 16)
    fam = schreier(1)
    dns = build_dual_norming_set(TsirelsonSpec(fam, c), nblocks, nblocks)
    uni = "seed:acc"
    norming = [FinVec(uni, dict(v.items())) for v in dns.members()]
    return SeedSpace("acc", [1] * nblocks, norming, c, c / 2,
                     unconditional=False)


@pytest.fixture(scope="session")
def acc_seed():
    seed = make_acceptance_seed()
    assert seed.validate() == []
    return seed


@pytest.fixture(scope="session")
def acc_D(acc_seed):
    return build_norming_set_D(acc_seed)


@pytest.fixture(scope="session")
def acc_build(acc_seed, acc_D):
    return build_embedding(acc_seed, acc_D, stage_bound=8)


@pytest.fixture(scope="session")
def acc_aug(acc_build):
    from bdspace.augmentation import AugmentedBuild
    return AugmentedBuild(acc_build, TsirelsonSpec(schreier(1), Fraction(1, 16)),
                          Fraction(1, 16), mode="fdd")
