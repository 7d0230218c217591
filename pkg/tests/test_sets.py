from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from approxgroups.errors import LocalOverflow, NotSymmetric, UniverseMismatch
from approxgroups.groups import LocalGroup, cyclic, dihedral, heisenberg, symmetric
from approxgroups.sets import (
    GroupSet, MeasureContext, approx_constant, conjugate, conjugation_union, disjoint_translate_growth,
    generated, inverse_set, is_subgroup, measure, power, product_set, sym_diff, translate, verify_approx,
)

from pack import PACK


def iv(G, lo, hi):
    return GroupSet.from_ids(G, [x % G.order for x in range(lo, hi + 1)])


def naive_product(G, X, Y):
    return {G.mul(x, y) for x in X for y in Y}


GROUPS = [cyclic(12), dihedral(6), heisenberg(3), symmetric(4)]
subsets = st.sampled_from(range(len(GROUPS))).flatmap(
    lambda i: st.tuples(st.just(i), *[st.sets(st.integers(0, GROUPS[i].order - 1), max_size=10)] * 3))


def test_product_examples():
    G = cyclic(12)
    assert product_set(GroupSet.from_ids(G, [0, 1, 11]), GroupSet.from_ids(G, [0, 1, 11])).tolist() == [0, 1, 2, 10, 11]
    assert len(product_set(GroupSet.empty(G), GroupSet.whole(G))) == 0
    G = cyclic(32)
    assert product_set(iv(G, -2, 2), iv(G, -2, 2)) == iv(G, -4, 4)


def test_power_examples():
    G = cyclic(256)
    A = iv(G, -16, 16)
    assert power(A, 2) == iv(G, -32, 32)
    assert power(A, 1) == A
    H = GroupSet.from_ids(cyclic(12), [0, 4, 8])
    assert all(power(H, n) == H for n in range(1, 6))


def test_inverse_symdiff_translate():
    G = cyclic(12)
    assert inverse_set(GroupSet.from_ids(G, [1, 5])).tolist() == [7, 11]
    X = GroupSet.from_ids(G, [1, 2, 3])
    assert len(sym_diff(X, X)) == 0
    assert len(translate(5, GroupSet.empty(G))) == 0
    assert translate(5, X).tolist() == [6, 7, 8]


def test_measure_examples():
    G = cyclic(256)
    A = iv(G, -16, 16)
    ctx = MeasureContext(A)
    assert measure(A, ctx) == 1
    assert measure(translate(77, A), ctx) == 1
    assert measure(iv(G, -32, 32), ctx) == Fraction(65, 33)


def test_measure_additive_and_invariant():
    G = dihedral(7)
    A = GroupSet.from_ids(G, [0, 1, 6, 7])
    ctx = MeasureContext(A)
    X, Y = GroupSet.from_ids(G, [2, 3]), GroupSet.from_ids(G, [8, 9, 10])
    assert ctx(X | Y) == ctx(X) + ctx(Y)
    from approxgroups.sets import right_translate
    assert ctx(right_translate(Y, 9)) == ctx(Y) == ctx(translate(9, Y))


def test_approx_constant_examples():
    G = cyclic(12)
    H = GroupSet.from_ids(G, [0, 3, 6, 9])
    c = approx_constant(H)
    assert (c.K, c.E) == (1, [0])
    c = approx_constant(GroupSet.whole(G))
    assert (c.K, c.E) == (1, [0])
    G = cyclic(256)
    c = approx_constant(iv(G, -16, 16))
    assert c.K == 2 and c.E == [16, 240] and c.verified
    # independent replay
    A = set(range(-16, 17))
    assert {(a + b) % 256 for a in A for b in A} <= {(e + a) % 256 for e in (16, -16) for a in A}


def test_approx_constant_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        approx_constant(GroupSet.from_ids(cyclic(12), [0, 1]))


def test_generated_examples():
    G = cyclic(12)
    gen, n = generated(GroupSet.from_ids(G, [0, 3, 9]))
    assert gen.tolist() == [0, 3, 6, 9] and n == 2
    H = GroupSet.from_ids(G, [0, 4, 8])
    assert generated(H) == (H, 1)
    gen, n = generated(GroupSet.from_ids(cyclic(7), [0, 1, 6]))
    assert len(gen) == 7 and n == 3


def test_universe_mismatch():
    with pytest.raises(UniverseMismatch):
        GroupSet.whole(cyclic(4)) & GroupSet.whole(cyclic(5))


def test_local_arity_cap():
    L = LocalGroup(10_000)
    A = GroupSet.from_ids(L, [L.id_of(v) for v in (-1, 0, 1)])
    assert len(power(A, 100)) == 201
    with pytest.raises(LocalOverflow):
        power(A, 101)
    with pytest.raises(LocalOverflow):
        power(GroupSet.from_ids(L, [L.id_of(v) for v in range(-200, 201)]), 60)


@settings(max_examples=150, deadline=None)
@given(subsets)
def test_product_matches_naive_and_is_associative(data):
    i, X, Y, Z = data
    G = GROUPS[i]
    gx, gy, gz = (GroupSet.from_ids(G, sorted(s)) for s in (X, Y, Z))
    assert set(product_set(gx, gy).tolist()) == naive_product(G, X, Y)
    assert product_set(product_set(gx, gy), gz) == product_set(gx, product_set(gy, gz))


@settings(max_examples=100, deadline=None)
@given(subsets)
def test_symmetric_powers_and_growth(data):
    i, X, _, _ = data
    G = GROUPS[i]
    ids = {0} | set(X) | {int(G.inv[x]) for x in X}
    A = GroupSet.from_ids(G, sorted(ids))
    prev = None
    for n in range(1, 5):
        P = power(A, n)
        assert P.is_symmetric()
        if prev is not None:
            assert prev.issubset(P) and len(prev) <= len(P)
        prev = P
    c = approx_constant(A)
    assert verify_approx(A, c.E)


def test_conjugation_union_nonabelian():
    G = symmetric(3)
    X = GroupSet.from_ids(G, [0, 1])
    U = conjugation_union(X, GroupSet.whole(G))
    expect = {G.mul(G.mul(int(G.inv[a]), x), a) for a in range(6) for x in (0, 1)}
    assert set(U.tolist()) == expect
    assert conjugate(X, 0) == X


def test_is_subgroup():
    G = cyclic(12)
    assert is_subgroup(GroupSet.from_ids(G, [0, 6]))
    assert not is_subgroup(GroupSet.from_ids(G, [0, 1, 11]))


def test_cached_flags_agree_with_recomputation():
    G = dihedral(6)
    for ids in ([0], [0, 1], [0, 1, 5], [6, 7], [0, 6, 7]):
        X = GroupSet.from_ids(G, ids)
        direct = 0 in ids and all(int(G.inv[x]) in ids for x in ids)
        assert X.is_symmetric() == direct
        assert X.contains_identity() == (0 in ids)


@pytest.mark.parametrize("name", sorted(PACK))
def test_growth_check_on_pack(name):
    _, A = PACK[name].build()
    checks = disjoint_translate_growth(A)
    assert checks and all(c.ok for c in checks)


def test_literal_growth_premise_has_counterexample():
    # A^(n+1) != A^n alone does not give |A^(3n+2)| >= (n+1)|A|:
    # the interval saturates cyclic(256) long before n = 7
    G = cyclic(256)
    A = iv(G, -16, 16)
    assert power(A, 8) != power(A, 7)
    assert len(power(A, 23)) == 256 < 8 * 33
