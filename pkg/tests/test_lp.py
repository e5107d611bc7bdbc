from fractions import Fraction

import pytest

from bdspace import lp

F = Fraction


def test_basic_maximize():
    v, x = lp.maximize([3, 2], A_ub=[[1, 1], [1, 0]], b_ub=[4, 2])
    assert v == 10 and x == [F(2), F(2)]


def test_equality_constraints():
    v, x = lp.minimize([1, 1], A_eq=[[1, -1]], b_eq=[0], A_ub=[[-1, 0]],
                       b_ub=[-2])
    assert v == 4 and x == [F(2), F(2)]


def test_infeasible():
    with pytest.raises(lp.Infeasible):
        lp.maximize([1], A_ub=[[1], [-1]], b_ub=[1, -2])


def test_unbounded():
    with pytest.raises(lp.Unbounded):
        lp.maximize([1], A_ub=[[-1]], b_ub=[0])


def test_degenerate_cycling_guard():
    # classical Beale-style degeneracy; Bland's rule must terminate
    v, _ = lp.maximize(
        [F(3, 4), -150, F(1, 50), -6],
        A_ub=[[F(1, 4), -60, F(-1, 25), 9],
              [F(1, 2), -90, F(-1, 50), 3],
              [0, 0, 1, 0]],
        b_ub=[0, 0, 1])
    assert v == F(1, 20)


def test_exactness_no_drift():
    # tiny coefficients that would misbehave in floating point
    eps = F(1, 10**12)
    v, x = lp.maximize([1, 1], A_ub=[[1, 0], [eps, 1]], b_ub=[eps, eps])
    assert x[0] == eps and x[1] == eps - eps * eps
    assert v == 2 * eps - eps * eps
