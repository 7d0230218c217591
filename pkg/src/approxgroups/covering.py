"""Covering by translates: Ruzsa's covering lemma with witnesses, wideness
certificates and the equivalence construction ``B = A A* A``."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _cover
from .errors import NotEquivalent, NotSymmetric, PreconditionViolated, Uncoverable
from .sets import (
    ApproxCertificate,
    GroupSet,
    MeasureContext,
    approx_constant,
    inverse_set,
    measure,
    product_of,
    product_set,
)


@dataclass
class CoverCertificate:
    """``target`` is contained in the union of ``z*tile`` over ``translates``."""

    target: GroupSet
    tile: GroupSet
    translates: list[int]
    bound_claimed: int | None = None
    pool: str = "target*tile^-1"
    strategy: str = "greedy"
    verified: bool = False

    @property
    def L(self) -> int:
        return len(self.translates)

    def union(self) -> GroupSet:
        U = self.target.universe
        if not self.translates:
            return GroupSet.empty(U)
        Z = GroupSet.from_ids(U, self.translates, self.target.arity + self.tile.arity)
        return product_set(Z, self.tile)

    def replay(self) -> bool:
        return self.target.issubset(self.union())

    @property
    def within_bound(self) -> bool:
        return self.bound_claimed is None or self.L <= self.bound_claimed


def ruzsa_cover(X: GroupSet, Y: GroupSet, ctx: MeasureContext | None = None, K: int | Fraction | None = None) -> list[int]:
    """Ruzsa covering: ``Z`` inside X with ``X`` contained in ``Z Y Y^-1``.

    Z is a maximal family with pairwise disjoint translates ``zY``, built by
    scanning X in ascending id, so ``|Z| <= floor(mu(XY)/mu(Y))``.
    """
    if not len(Y):
        raise PreconditionViolated("ruzsa_cover needs Y nonempty")
    if not len(X):
        return []
    XY = product_set(X, Y)
    if K is not None:
        ctx = ctx or MeasureContext(Y)
        if measure(XY, ctx) > K * measure(Y, ctx):
            raise PreconditionViolated("mu(XY) exceeds K mu(Y)")
    U = X.universe
    used = np.zeros(U.order, dtype=bool)
    Z: list[int] = []
    ys = Y.ids
    for x in X.ids:
        row = U.mul_outer(np.array([x]), ys)[0]
        if not used[row].any():
            used[row] = True
            Z.append(int(x))
    if len(Z) * len(Y) > len(XY):
        raise AssertionError("disjoint translates overflow XY")
    YYinv = product_set(Y, inverse_set(Y))
    if not X.issubset(product_set(GroupSet.from_ids(U, Z, X.arity), YYinv)):
        raise AssertionError("Ruzsa cover failed its own replay")
    return Z


def ruzsa_bound(X: GroupSet, Y: GroupSet) -> int:
    return len(product_set(X, Y)) // len(Y)


def translates_disjoint(Z: list[int], Y: GroupSet) -> bool:
    U = Y.universe
    seen = np.zeros(U.order, dtype=bool)
    for z in Z:
        row = U.mul_outer(np.array([z]), Y.ids)[0]
        if seen[row].any():
            return False
        seen[row] = True
    return True


def cover_by_translates(
    target: GroupSet,
    tile: GroupSet,
    pool: GroupSet | None = None,
    *,
    bound: int | None = None,
    strategy: str = "greedy",
    tie_width: int = _cover.DEFAULT_TIE_WIDTH,
    pool_name: str | None = None,
) -> CoverCertificate:
    """Cover ``target`` by left translates of ``tile`` drawn from ``pool``.

    ``strategy="greedy"`` takes the translate covering the most uncovered
    elements (smallest id on ties, with the first pick explored over up to
    ``tie_width`` tied candidates, redundant picks pruned).
    ``strategy="points"`` translates by each uncovered target element in
    ascending order and ignores the pool. The pool defaults to
    ``target*tile^-1``, the set of translates that meet the target.
    """
    if not len(tile):
        raise PreconditionViolated("tile must be nonempty")
    U = target.universe
    if strategy == "points":
        picks = _cover.point_scan_cover(U, target.bits, tile.bits)
        if picks is None:
            raise PreconditionViolated("point scan needs the identity in the tile")
        cert = CoverCertificate(target, tile, picks, bound, "target", "points")
    elif strategy == "greedy":
        if pool is None:
            pool = product_set(target, inverse_set(tile))
            pool_name = pool_name or "target*tile^-1"
        M = _cover.incidence(U, target.bits, tile.ids, pool.ids)
        picks = _cover.greedy_cover(M, tie_width)
        if picks is None:
            raise Uncoverable("greedy cover exhausted the pool with target uncovered")
        cert = CoverCertificate(target, tile, [int(pool.ids[p]) for p in picks], bound,
                                pool_name or "given", "greedy")
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    cert.verified = cert.replay()
    if not cert.verified:
        raise AssertionError("cover failed its own replay")
    return cert


def best_cover(target: GroupSet, tile: GroupSet, bound: int | None = None, pool: GroupSet | None = None,
               tie_width: int = _cover.DEFAULT_TIE_WIDTH) -> CoverCertificate:
    """The shorter of the greedy and (when 1 is in the tile) point-scan covers."""
    cert = cover_by_translates(target, tile, pool, bound=bound, tie_width=tie_width)
    if tile.contains_identity():
        alt = cover_by_translates(target, tile, bound=bound, strategy="points")
        if alt.L < cert.L:
            cert = alt
    return cert


def wide_from_positive(B: GroupSet, A: GroupSet, ctx: MeasureContext | None = None) -> tuple[GroupSet, CoverCertificate]:
    """``BB^-1`` with a cover of A by at most ``floor(mu(AB)/mu(B))`` of its translates."""
    if not len(B):
        raise PreconditionViolated("wide_from_positive needs mu(B) > 0")
    BBinv = product_set(B, inverse_set(B))
    Z = ruzsa_cover(A, B, ctx)
    cert = CoverCertificate(A, BBinv, Z, ruzsa_bound(A, B), "ruzsa(A, B)", "ruzsa")
    cert.verified = cert.replay()
    return BBinv, cert


@dataclass
class CompositeWitness:
    """``B^2`` inside ``W*B`` with ``W = E^(2n-1) Y``; B is then an approximate subgroup."""

    n: int
    W: GroupSet
    verified: bool

    @property
    def K(self) -> int:
        return len(self.W)


def approx_witness_from_wide(B: GroupSet, A: GroupSet, E: list[int], Y: list[int], max_n: int = 50) -> CompositeWitness:
    """For symmetric B with ``A`` inside ``Y*B``: find the least n with
    ``B^2`` inside ``A^(2n)`` and verify ``B^2`` inside ``E^(2n-1) Y B``."""
    if not B.is_symmetric():
        raise NotSymmetric("B must be symmetric")
    U = A.universe
    B2 = product_set(B, B)
    Aset = GroupSet.from_ids(U, Y, 1)
    if not A.issubset(product_set(Aset, B)):
        raise PreconditionViolated("A is not covered by Y*B")
    A2 = product_set(A, A)
    cur, n = A2, 1
    while not B2.issubset(cur):
        n += 1
        if n > max_n:
            raise PreconditionViolated("B^2 is not inside any computed power of A")
        cur = product_set(cur, A2)
    Eset = GroupSet.from_ids(U, E, 1)
    W = Eset
    for _ in range(2 * n - 2):
        W = product_set(W, Eset)
    W = product_set(W, Aset)
    ok = B2.issubset(product_set(W, B))
    return CompositeWitness(n, W, ok)


@dataclass
class EquivalenceResult:
    B: GroupSet
    X: CoverCertificate          # A inside X A*
    Xstar: CoverCertificate      # A* inside X* A
    E: ApproxCertificate
    Estar: ApproxCertificate
    cover_A: CoverCertificate    # B by translates of A
    cover_Astar: CoverCertificate
    n: int
    core: GroupSet               # A^n & A*^n
    cover_core: CoverCertificate
    chain_checks: dict[str, bool] = field(default_factory=dict)
    search: list[dict] = field(default_factory=list)


def equivalence_refine(A: GroupSet, Astar: GroupSet, max_n: int = 16) -> EquivalenceResult:
    """``B = A A* A`` with A and A* wide in it, and the least n for which
    ``A^n & A*^n`` covers B in no more translates than the better of A and A*."""
    for name, S in (("A", A), ("A*", Astar)):
        if not S.is_symmetric():
            raise NotSymmetric(f"{name} must be symmetric")
    E = approx_constant(A)
    Es = approx_constant(Astar)
    try:
        X = cover_by_translates(A, Astar)
        Xs = cover_by_translates(Astar, A)
    except Uncoverable as e:
        raise NotEquivalent(str(e)) from None
    U = A.universe
    B = product_of(A, Astar, A)

    def elems(ids):
        return GroupSet.from_ids(U, ids, 1)

    Xe, Xse, Ee, Ese = elems(X.translates), elems(Xs.translates), elems(E.E), elems(Es.E)
    W_A = product_of(Xe, Ese, Xse, Ee)          # B inside X E* X* E A
    W_As = product_of(W_A, Xe)                  # B inside X E* X* E X A*
    W_B = product_of(Xe, Ese, Xse, Ee, Ee)      # B^2 inside X E* X* E^2 B
    checks = {
        "B symmetric": B.is_symmetric(),
        "A, A* inside B": A.issubset(B) and Astar.issubset(B),
        "B inside X E* X* E A": B.issubset(product_set(W_A, A)),
        "B inside X E* X* E X A*": B.issubset(product_set(W_As, Astar)),
        "B^2 inside X E* X* E^2 B": product_set(B, B).issubset(product_set(W_B, B)),
    }
    cA = cover_by_translates(B, A)
    cAs = cover_by_translates(B, Astar)
    target = min(cA.L, cAs.L)
    pa, ps = A, Astar
    search = []
    best = None
    for n in range(1, max_n + 1):
        if n > 1:
            pa2, ps2 = product_set(pa, A), product_set(ps, Astar)
            stable = pa2 == pa and ps2 == ps
            pa, ps = pa2, ps2
        else:
            stable = False
        core = pa & ps
        c = cover_by_translates(B, core)
        search.append({"n": n, "core_size": len(core), "L": c.L})
        if best is None or c.L < best[2].L:
            best = (n, core, c)
        if c.L <= target or stable:
            break
    n, core, cc = best
    return EquivalenceResult(B, X, Xs, E, Es, cA, cAs, n, core, cc, checks, search)
