"""Acceptance criteria 1-9. Containments are re-checked here with plain
Python sets over the multiplication table, independent of the bit-vector
kernels. Run directly or through pytest; the summary prints one line per
criterion."""

import itertools
import math
import sys
import time
from fractions import Fraction as F

import pytest

from approxgroups.certs import CertBuilder
from approxgroups.chain import core_chain
from approxgroups.cli import analyze, chain_certificate, sanders_certificate
from approxgroups.covering import cover_by_translates, ruzsa_cover
from approxgroups.errors import LocalOverflow
from approxgroups.groups import cyclic, dihedral, direct_product, symmetric
from approxgroups.instances import Instance
from approxgroups.normality import normalize_refine
from approxgroups.oracle import exact_f, exact_min_cover, exact_P
from approxgroups.rng import XorShift64Star
from approxgroups.sanders import (
    PCache, build_schedule, eval_P, find_plateau, least_n, sanders_refine, search_f,
)
from approxgroups.sets import GroupSet, approx_constant, power

from pack import PACK, SUBGROUPS, build

crit = pytest.mark.criterion


# -- independent set arithmetic ---------------------------------------------------


def py_prod(U, X, Y):
    return {U.mul(x, y) for x in X for y in Y}


def py_power(U, A, n):
    cur = set(A)
    for _ in range(n - 1):
        cur = py_prod(U, cur, A)
    return cur


def py_inv(U, X):
    return {int(U.inv[x]) for x in X}


def py_covers(U, target, tile, translates):
    return set(target) <= py_prod(U, translates, tile)


# -- 1 and 2 ------------------------------------------------------------------------

RUNS = [(name, m) for name in PACK for m in (2, 8, 48)]


@pytest.fixture(scope="module")
def refinements():
    out = {}
    for name, m in RUNS:
        U, A = build(name)
        t0 = time.perf_counter()
        cert = sanders_refine(A, m)
        out[name, m] = (U, A, cert, time.perf_counter() - t0)
    return out


def test_pack_shape():
    assert len(PACK) >= 6
    assert all(build(n)[0].order <= 4096 for n in PACK)


@crit(1)
@pytest.mark.parametrize("name,m", RUNS)
def test_containment(refinements, name, m):
    U, A, cert, secs = refinements[name, m]
    S = cert.S.tolist()
    assert py_power(U, S, m) <= py_power(U, A.tolist(), 4)
    assert cert.containment_checked
    assert secs < 60


@crit(2)
@pytest.mark.parametrize("name,m", RUNS)
def test_wideness_bound(refinements, name, m):
    U, A, cert, _ = refinements[name, m]
    assert cert.chosen_t_index == cert.plateau_index
    t = cert.schedule.t_values[cert.plateau_index]
    assert cert.L <= math.floor(2 * cert.K / t)
    assert py_covers(U, A.tolist(), cert.S.tolist(), cert.wideness.translates)


# -- 3 ------------------------------------------------------------------------------

RUZSA_GROUPS = [cyclic(30), cyclic(64), dihedral(10), symmetric(4), direct_product(cyclic(6), cyclic(4))]


@crit(3)
def test_ruzsa_random_pairs():
    rng = XorShift64Star(2024)
    for _trial in range(500):
        U = RUZSA_GROUPS[rng.below(len(RUZSA_GROUPS))]
        X = rng.sample(range(U.order), 1 + rng.below(U.order // 2))
        Y = rng.sample(range(U.order), 1 + rng.below(6))
        XY = py_prod(U, X, Y)
        K = F(len(XY), len(Y)) + rng.below(3)  # any K with mu(XY) <= K mu(Y)
        Z = ruzsa_cover(GroupSet.from_ids(U, X), GroupSet.from_ids(U, Y), K=K)
        assert len(Z) <= len(XY) // len(Y) <= K
        assert set(Z) <= set(X)
        assert set(X) <= py_prod(U, py_prod(U, Z, Y), py_inv(U, Y))
        rows = [py_prod(U, [z], Y) for z in Z]
        assert sum(map(len, rows)) == len(set().union(*rows))


# -- 4 ------------------------------------------------------------------------------


@crit(4)
def test_plateau_random_vectors():
    rng = XorShift64Star(99)
    for _trial in range(1000):
        K = 1 + rng.below(8)
        m = (2, 8, 48)[rng.below(3)]
        eps = F(1, 4 * m)
        n_max = least_n(K, eps)
        den = 1000
        f = [F(den + rng.below((K - 1) * den + 1), den) for _ in range(n_max + 1)]
        i = find_plateau(f, eps)
        assert 0 <= i < n_max
        assert f[i + 1] >= (1 - eps) * f[i]


# -- 5 ------------------------------------------------------------------------------


def _iv(U, lo, hi):
    return GroupSet.from_ids(U, [x % U.order for x in range(lo, hi + 1)])


def _tiny():
    c2c12 = direct_product(cyclic(2), cyclic(12))
    s3 = symmetric(3)
    return {
        "c12 [-1..1]": _iv(cyclic(12), -1, 1),
        "c13 [-2..2]": _iv(cyclic(13), -2, 2),
        "c24 [-3..3]": _iv(cyclic(24), -3, 3),
        "c24 [-4..4]": _iv(cyclic(24), -4, 4),
        "d4 ball": GroupSet.from_ids(dihedral(4), [0, 1, 3, 4]),
        "s3 transpositions": GroupSet.from_ids(s3, [0, 1, 2, 5]),
        "c2xc12 ball": GroupSet.from_ids(c2c12, [0, 1, 11, 12]),
        "c24 [-5..5]+{12}": GroupSet.from_ids(cyclic(24), [x % 24 for x in range(-5, 6)] + [12]),
    }


TINY = _tiny()
P_CHECK_MAX = 9  # full B enumeration with the literal recursion up to this |A|


@crit(5)
@pytest.mark.parametrize("name", sorted(TINY))
def test_oracle_equivalence(name):
    A = TINY[name]
    U = A.universe
    assert len(A) <= 12 and U.order <= 24
    K = approx_constant(A).K
    sched = build_schedule(K, F(1, 32), A)
    ts = sched.t_values

    # exact f never exceeds the searched estimate
    f_hat, _, _ = search_f(A, sched)
    for t, fh in zip(ts, f_hat):
        assert exact_f(t, A)[0] <= fh

    # greedy covers are valid and never beat the exact minimum
    tiles = [A] + [GroupSet.from_ids(U, B) for B in itertools.combinations(A.tolist(), 2)]
    for target in (A, power(A, 2)):
        for tile in tiles:
            c = cover_by_translates(target, tile)
            assert py_covers(U, target.tolist(), tile.tolist(), c.translates)
            assert c.L >= exact_min_cover(target, tile)

    if len(A) > P_CHECK_MAX:
        return
    cache = PCache(budget=10 ** 7)
    for r in range(len(A) + 1):
        for B in itertools.combinations(A.tolist(), r):
            Bs = GroupSet.from_ids(U, B)
            for n in (0, 1, 2):
                for t in ts:
                    got = eval_P(n, t, Bs, A, K=K, cache=cache)
                    assert got == exact_P(n, t, Bs, A, K)
                    if r and r >= t * len(A):
                        assert got  # threshold implies P


# -- 6 ------------------------------------------------------------------------------


@crit(6)
@pytest.mark.parametrize("name", sorted(PACK))
@pytest.mark.parametrize("R_kind", ["A", "sanders-8"])
def test_normalize_replays(name, R_kind):
    U, A = build(name)
    R = A if R_kind == "A" else sanders_refine(A, 8).S
    cert = normalize_refine(A, R)
    S8 = py_power(U, cert.S.tolist(), 8)
    R4 = py_power(U, R.tolist(), 4)
    for a in A.tolist():
        ai = int(U.inv[a])
        assert {U.mul(U.mul(ai, s), a) for s in S8} <= R4
    assert cert.verified


@crit(6)
@pytest.mark.parametrize("name", sorted(PACK))
def test_normal_chain_normalized(name):
    U, A = build(name)
    rep = core_chain(A, 16, "normal")
    assert rep.stabilized_at is not None
    H = set(rep.H.tolist())
    for a in A.tolist():
        ai = int(U.inv[a])
        assert {U.mul(U.mul(a, h), ai) for h in H} == H


# -- 7 ------------------------------------------------------------------------------


@crit(7)
@pytest.mark.parametrize("name", sorted(PACK))
@pytest.mark.parametrize("mode", ["plain", "normal"])
def test_chain_semantics(name, mode):
    U, A = build(name)
    rep = core_chain(A, 16, mode)
    for prev, cur in zip(rep.stages, rep.stages[1:]):
        assert set(cur.H.tolist()) <= set(prev.H.tolist())
    assert rep.stabilized_at is not None
    H = set(rep.H.tolist())
    assert py_prod(U, H, H) <= H and py_inv(U, H) == H and U.identity in H


@crit(7)
@pytest.mark.parametrize("name", sorted(SUBGROUPS))
def test_subgroup_chain(name):
    U, A = build(name)
    rep = core_chain(A, 16, "plain")
    assert rep.stabilized_at == 0 and rep.H == A
    assert rep.final_is_subgroup and rep.index_in_generated == 1


# -- 8 ------------------------------------------------------------------------------


@crit(8)
@pytest.mark.parametrize("name", sorted(PACK))
def test_growth_inequality(name):
    U, A = build(name)
    a = A.tolist()
    pw = [{U.identity}, set(a)]  # pw[k] = A^k
    while len(pw) < 4 or pw[-1] != pw[-2]:
        pw.append(py_prod(U, pw[-1], a))
    observed = 0
    n = 0
    while 3 * n + 2 < len(pw):
        # the n+1 disjoint translates a_(3k) A, k <= n, fit in the universe
        # exactly when A^(3n+1) != A^(3n)
        if pw[n + 1] != pw[n] and pw[3 * n + 1] != pw[3 * n]:
            observed += 1
            assert len(pw[3 * n + 2]) >= (n + 1) * len(a)
        n += 1
    assert observed >= 1


# -- 9 ------------------------------------------------------------------------------


@crit(9)
def test_local_window_pipeline():
    radius, W = 10, 1000
    assert W >= 100 * radius
    inst = Instance(group={"kind": "local", "params": {"W": W}},
                    set={"interval": {"lo": -radius, "hi": radius}})
    _, A = inst.build()
    try:
        b = CertBuilder("sanders", "local.json", inst, {"m": 8})
        cert = sanders_certificate(b, A, 8, 8, 1)
        b2 = CertBuilder("chain", "local.json", inst, {"steps": 16})
        chain_cert, rep = chain_certificate(b2, A, 16, "plain", 8, 1)
        report = analyze(A)
    except LocalOverflow as e:  # pragma: no cover - the criterion is that this never happens
        pytest.fail(f"local overflow: {e}")
    assert all(c["holds"] for c in cert["claims"])
    assert all(c["holds"] for c in chain_cert["claims"])
    assert "growth_stopped" not in report


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
