from fractions import Fraction

import pytest

from approxgroups.errors import BudgetExceeded, Uncoverable
from approxgroups.groups import cyclic
from approxgroups.oracle import OracleBudget, OracleCache, exact_f, exact_min_cover, exact_P
from approxgroups.sets import GroupSet, approx_constant


def iv(G, lo, hi):
    return GroupSet.from_ids(G, [x % G.order for x in range(lo, hi + 1)])


def test_min_cover_examples():
    G = cyclic(16)
    A = iv(G, -2, 2)
    assert exact_min_cover(A, A) == 1
    big = OracleBudget(max_universe=64)
    assert exact_min_cover(iv(cyclic(64), -16, 16), iv(cyclic(64), -8, 8), budget=big) == 2
    with pytest.raises(Uncoverable):
        exact_min_cover(iv(G, -4, 4), A, pool=GroupSet.singleton(G, 0))


def test_f_examples():
    G = cyclic(16)
    A = iv(G, -2, 2)
    val, B = exact_f(Fraction(1, 5), A)
    assert val == 1 and len(B) == 1
    val, B = exact_f(1, A)
    assert val == Fraction(9, 5) and B == A
    val, B = exact_f(Fraction(3, 5), A)
    # any 3 elements of A need at least 7 sums; three consecutive achieve it
    assert val == Fraction(7, 5) and len(B) == 3


def test_P_examples():
    G = cyclic(12)
    A = iv(G, -1, 1)
    K = approx_constant(A).K
    assert exact_P(0, 1, GroupSet.empty(G), A, K) is False
    for n in range(3):
        assert exact_P(n, 1, A, A, K) is True


def test_budgets():
    with pytest.raises(BudgetExceeded):
        exact_min_cover(GroupSet.whole(cyclic(30)), GroupSet.singleton(cyclic(30), 0))
    A = iv(cyclic(24), -6, 6)
    with pytest.raises(BudgetExceeded):
        exact_f(Fraction(1, 13), A, budget=OracleBudget(max_subsets=100))
    with pytest.raises(BudgetExceeded):
        exact_P(3, 1, A, A, 2)


def test_cache_roundtrip(tmp_path):
    c = OracleCache(tmp_path / "cache")
    k = OracleCache.key("f", instance="abc", t="1/2")
    assert c.get(k) is None
    c.put(k, {"value": "7/5"})
    assert OracleCache(tmp_path / "cache").get(k) == {"value": "7/5"}
    assert k == OracleCache.key("f", t="1/2", instance="abc")
