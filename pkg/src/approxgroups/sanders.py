"""Refinement of an approximate subgroup A into a wide S with ``S^m`` inside ``A^4``.

Pipeline: the doubly-exponential schedule ``t_(k+1) = t_k^2 / 2K``, an
estimate of ``f(t) = min |BA|/|A|`` over a searched family of ``B`` inside A
with ``|B| >= t|A|``, the earliest plateau ``f(t_(i+1)) >= (1-eps) f(t_i)``,
and the stabilizer set ``S = {g in A^2 : |gBA ^ BA| < |BA|/m}``. Strictness
of that threshold makes ``S^m`` inside ``BA (BA)^-1``, which lies in ``A^4``, hold for
any B, so only the wideness bound depends on the search.

The literal predicate recursion :func:`eval_P` is kept as a cross-check for
small depths.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _cover
from .covering import CoverCertificate, best_cover
from .errors import (
    BudgetExceeded,
    InternalInvariantBroken,
    NotSymmetric,
    PreconditionViolated,
    SearchFailed,
)
from .sets import (
    ApproxCertificate,
    GroupSet,
    MeasureContext,
    _map,
    approx_constant,
    power,
    product_set,
    translate,
)

DEFAULT_SEARCH_WIDTH = 8


@dataclass
class Schedule:
    K: int
    epsilon: Fraction
    t_values: list[Fraction]
    n_max: int
    truncation_index: int | None = None

    @property
    def s_values(self) -> list[Fraction]:
        """``s = t / 2K`` at each step."""
        return [t / (2 * self.K) for t in self.t_values]

    def t(self, k: int) -> Fraction:
        return Fraction(1, (2 * self.K) ** (2 ** k - 1))


def least_n(K: int, epsilon: Fraction) -> int:
    """Least n with ``(1-eps)^n K < 1``."""
    n, val = 0, Fraction(K)
    while val >= 1:
        val *= 1 - epsilon
        n += 1
    return n


def build_schedule(K: int, epsilon, A: GroupSet | None = None) -> Schedule:
    """``t_0 = 1``, ``t_(k+1) = t_k^2/(2K)``, up to index n_max, or up to the
    first index with ``t_k <= 1/|A|`` when A is given (whichever is first)."""
    epsilon = Fraction(epsilon)
    if K < 1 or not 0 < epsilon < 1:
        raise PreconditionViolated("need K >= 1 and 0 < epsilon < 1")
    n_max = least_n(K, epsilon)
    ts = [Fraction(1)]
    trunc = None
    size = len(A) if A is not None else None
    while True:
        if size is not None and ts[-1] * size <= 1:
            trunc = len(ts) - 1
            break
        if len(ts) - 1 >= n_max:
            break
        ts.append(ts[-1] ** 2 / (2 * K))
    return Schedule(K, epsilon, ts, n_max, trunc)


def find_plateau(f_values: Sequence, epsilon) -> int:
    """Least i with ``f[i+1] >= (1-eps) f[i]``.

    Values must lie in ``[1, K]``; with at least ``n_max + 1`` of them such
    an i below n_max always exists.
    """
    eps = Fraction(epsilon)
    f = [Fraction(v) for v in f_values]
    if any(v < 1 for v in f):
        raise InternalInvariantBroken("f values must be at least 1")
    for i in range(len(f) - 1):
        if f[i + 1] >= (1 - eps) * f[i]:
            return i
    raise InternalInvariantBroken("no plateau among the supplied values")


# -- the predicate recursion ----------------------------------------------------


class PCache:
    """Memo table for :func:`eval_P`, keyed by (content hash, depth, t).

    Safe for concurrent insert-or-read; ``nodes`` counts evaluated (missed) keys.
    """

    def __init__(self, budget: int = 200_000):
        self.budget = budget
        self.nodes = 0
        self._memo: dict = {}
        self._lock = threading.Lock()

    def get(self, key):
        with self._lock:
            return self._memo.get(key)

    def put(self, key, value: bool) -> None:
        with self._lock:
            self._memo.setdefault(key, value)

    def charge(self) -> None:
        with self._lock:
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetExceeded(f"P recursion exceeded {self.budget} nodes")


def coverable_within(target: GroupSet, tile: GroupSet, pool: GroupSet, N: int, budget: int = 100_000) -> bool:
    """Whether at most N translates ``g*tile`` (g in pool) cover target. Exact."""
    if not len(target):
        return True
    if not len(tile) or N < 1:
        return False
    M = _cover.incidence(target.universe, target.bits, tile.ids, pool.ids)
    if not M.any(axis=0).all():
        return False
    greedy = _cover.greedy_cover(M)
    if greedy is not None and len(greedy) <= N:
        return True
    M = np.unique(M[M.any(axis=1)], axis=0)
    gmax = int(M.sum(axis=1).max())
    if -(-M.shape[1] // gmax) > N:
        return False
    rows_of = [np.flatnonzero(M[:, j]) for j in range(M.shape[1])]
    nodes = [0]

    def search(covered: np.ndarray, left: int) -> bool:
        nodes[0] += 1
        if nodes[0] > budget:
            raise BudgetExceeded("exact cover search exceeded its node budget")
        if covered.all():
            return True
        if left == 0:
            return False
        unc = ~covered
        best_gain = int((M[:, unc]).sum(axis=1).max())
        if -(-int(unc.sum()) // best_gain) > left:
            return False
        j = min(np.flatnonzero(unc), key=lambda c: len(rows_of[c]))
        for r in rows_of[j]:
            if search(covered | M[r], left - 1):
                return True
        return False

    return search(np.zeros(M.shape[1], dtype=bool), N)


def eval_P(n: int, t, B: GroupSet, A: GroupSet, *, K: int | None = None, cache: PCache | None = None) -> bool:
    """Evaluate the predicate ``P_n^t(B)`` literally, with memoization.

    ``P_0^t(B)`` iff B is nonempty; ``P_(n+1)^t(B)`` iff ``P_n^t(B)`` and A
    is covered by ``floor(2K/t)`` translates, taken from ``A^3``, of
    ``X = {g in A^2 : P_n^(t^2/2K)(gB & B) and P_n^(t^2/2K)(g^-1 B & B)}``.
    """
    t = Fraction(t)
    if not B.issubset(A):
        raise PreconditionViolated("B must be a subset of A")
    if K is None:
        K = approx_constant(A).K
    cache = cache if cache is not None else PCache()
    A2 = product_set(A, A)
    A3 = product_set(A2, A)
    inv = A.universe.inv
    g_arity = 2 * A.arity
    a_key = A.digest()

    def P(k: int, tt: Fraction, S: GroupSet) -> bool:
        key = (a_key, S.digest(), k, tt, K)
        hit = cache.get(key)
        if hit is not None:
            return hit
        cache.charge()
        if k == 0:
            val = len(S) > 0
        elif not P(k - 1, tt, S):
            val = False
        else:
            t2 = tt * tt / (2 * K)
            X = [
                g for g in A2
                if P(k - 1, t2, translate(g, S, g_arity) & S)
                and P(k - 1, t2, translate(int(inv[g]), S, g_arity) & S)
            ]
            Xs = GroupSet.from_ids(A.universe, X, g_arity)
            val = coverable_within(A, Xs, A3, math.floor(2 * K / tt))
        cache.put(key, val)
        return val

    return P(n, t, B)


# -- stabilizer sets -----------------------------------------------------------


def overlap_counts(Y: GroupSet) -> np.ndarray:
    """``c[g] = |gY & Y|`` for every g (zero outside ``Y Y^-1``)."""
    U = Y.universe
    if not len(Y):
        return np.zeros(U.order, dtype=np.int64)
    prods = U.mul_outer(Y.ids, U.inv[Y.ids])
    return np.bincount(prods.reshape(-1), minlength=U.order)


def stabilizer_set(B: GroupSet, rho, A: GroupSet, ctx: MeasureContext | None = None) -> GroupSet:
    """``{g in A^2 : mu(gBA ^ BA) < rho mu(BA)}``, strict inequality."""
    rho = Fraction(rho)
    if not len(B) or not B.issubset(A):
        raise PreconditionViolated("B must be a nonempty subset of A")
    if not 0 < rho <= 1:
        raise PreconditionViolated("rho must lie in (0, 1]")
    BA = product_set(B, A)
    A2 = product_set(A, A)
    n = len(BA)
    c = overlap_counts(BA)
    # |gBA ^ BA| = 2 (|BA| - |gBA & BA|) < rho |BA|, cleared of denominators
    near = 2 * (n - c) * rho.denominator < rho.numerator * n
    return GroupSet(A.universe, near & A2.bits, 2 * A.arity)


# -- the refinement ---------------------------------------------------------------


@dataclass
class RefineCertificate:
    A: GroupSet
    m: int
    K: int
    E: list[int]
    epsilon: Fraction
    schedule: Schedule
    f_values: list[Fraction]
    best_B: list[GroupSet]
    chosen_t_index: int
    plateau_index: int
    B: GroupSet
    f_value: Fraction
    rho: Fraction
    S: GroupSet
    A4: GroupSet
    Sm: GroupSet
    containment_checked: bool
    wideness: CoverCertificate
    search_log: list[dict] = field(default_factory=list)
    saturated_tail: bool = False
    near_minimality: str = "heuristic"
    search_failed: bool = False

    @property
    def t(self) -> Fraction:
        return self.schedule.t_values[self.chosen_t_index]

    @property
    def L(self) -> int:
        return self.wideness.L

    @property
    def L_bound(self) -> int:
        return math.floor(2 * self.K / self.t)

    @property
    def symmetric(self) -> bool:
        return self.S.is_symmetric()


class _Family:
    """Searched candidates B, deduplicated by content, with ``|BA|`` cached."""

    def __init__(self, A: GroupSet, threads: int):
        self.A = A
        self.threads = threads
        self.sets: list[GroupSet] = []
        self.ba: list[int] = []
        self._seen: set[str] = set()

    def add_many(self, cands) -> int:
        fresh = []
        for B in cands:
            if len(B) and B.digest() not in self._seen:
                self._seen.add(B.digest())
                fresh.append(B)
        sizes = _map(lambda B: len(product_set(B, self.A)), fresh, self.threads)
        self.sets.extend(fresh)
        self.ba.extend(sizes)
        return len(fresh)

    def best(self) -> int:
        # earliest discovered among the minimizers of |BA|
        return min(range(len(self.sets)), key=lambda i: (self.ba[i], i))

    def ranked(self) -> list[int]:
        return sorted(range(len(self.sets)), key=lambda i: (self.ba[i], -len(self.sets[i]), i))


def _translators(B: GroupSet, min_overlap: int) -> tuple[np.ndarray, np.ndarray]:
    c = overlap_counts(B)
    gs = np.flatnonzero(c >= min_overlap)
    return gs, c[gs]


def _shrink(B: GroupSet, A: GroupSet, size: int) -> GroupSet:
    """Greedy removal: repeatedly drop the element of B whose removal shrinks
    ``BA`` the most (smallest id on ties) until ``|B| = size``."""
    U = A.universe
    ids = B.ids.copy()
    if len(ids) <= size:
        return B
    P = U.mul_outer(ids, A.ids)
    cnt = np.bincount(P.reshape(-1), minlength=U.order)
    alive = np.ones(len(ids), dtype=bool)
    for _ in range(len(ids) - size):
        loss = np.where(alive, (cnt[P] == 1).sum(axis=1), -1)
        r = int(np.argmax(loss))
        alive[r] = False
        cnt[P[r]] -= 1
    return GroupSet.from_ids(U, ids[alive], B.arity)


def search_f(A: GroupSet, schedule: Schedule, search_width: int = DEFAULT_SEARCH_WIDTH,
             threads: int = 1) -> tuple[list[Fraction], list[GroupSet], list[dict]]:
    """Estimate ``f(t_k)`` for each schedule index by searching candidates B.

    The family at index k+1 contains every ``gB_k & B_k`` (g in ``A^2``) large
    enough to qualify, where ``B_k`` is the minimizer at index k; this is what
    makes the plateau argument go through for the estimate.
    """
    n = len(A)
    U = A.universe
    fam = _Family(A, threads)
    g_arity = 2 * A.arity
    f_vals, bests, log = [], [], []
    for k, t in enumerate(schedule.t_values):
        c = math.ceil(t * n)
        before = len(fam.sets)
        if k == 0:
            fam.add_many([A])
        else:
            prev = bests[-1]
            gs, _ = _translators(prev, c)
            fam.add_many(translate(int(g), prev, g_arity) & prev for g in gs)
            others = [i for i in fam.ranked() if fam.sets[i] != prev][:search_width]
            chains = []
            for i in others:
                Bi = fam.sets[i]
                gs, cnt = _translators(Bi, c)
                keep = cnt < len(Bi)  # gB = B gives nothing new
                gs, cnt = gs[keep], cnt[keep]
                top = gs[np.argsort(-cnt, kind="stable")[:search_width]]
                chains.extend(translate(int(g), Bi, g_arity) & Bi for g in top)
            fam.add_many(chains)
        if c <= 1:
            fam.add_many([GroupSet.singleton(U, U.identity, A.arity)])
        starts = {fam.best(), 0}
        fam.add_many([_shrink(fam.sets[i], A, c) for i in sorted(starts)])
        b = fam.best()
        B = fam.sets[b].with_arity(A.arity)
        bests.append(B)
        f_vals.append(Fraction(fam.ba[b], n))
        log.append({
            "index": k, "t": str(t), "threshold_size": c,
            "new_candidates": len(fam.sets) - before, "family_size": len(fam.sets),
            "best_size": len(B), "best_BA": fam.ba[b], "f": str(f_vals[-1]),
        })
    return f_vals, bests, log


def sanders_refine(
    A: GroupSet,
    m: int,
    ctx: MeasureContext | None = None,
    *,
    search_width: int = DEFAULT_SEARCH_WIDTH,
    threads: int = 1,
    approx: ApproxCertificate | None = None,
) -> RefineCertificate:
    """Find a symmetric S, wide in A, with ``S^m`` inside ``A^4``.

    Uses ``eps = 1/(4m)`` and the plateau of the estimated f along the
    truncated schedule. Raises :class:`SearchFailed` (certificate attached)
    if no schedule index gives a cover within ``floor(2K/t)``.
    """
    if not A.is_symmetric():
        raise NotSymmetric("sanders_refine needs a symmetric set containing 1")
    if m < 1:
        raise PreconditionViolated("m must be positive")
    approx = approx or approx_constant(A)
    K = approx.K
    eps = Fraction(1, 4 * m)
    rho = Fraction(1, m)
    A4 = power(A, 4)
    schedule = build_schedule(K, eps, A)
    f_vals, bests, log = search_f(A, schedule, search_width, threads)
    saturated = schedule.truncation_index is not None
    # below t <= 1/|A| every singleton qualifies and f stays at 1
    extended = f_vals + ([Fraction(1)] if saturated else [])
    plateau = find_plateau(extended, eps)

    def attempt(i: int):
        B = bests[i]
        S = stabilizer_set(B, rho, A)
        bound = math.floor(2 * K / schedule.t_values[i])
        cover = best_cover(A, S, bound=bound)
        return B, S, cover

    order = [plateau] + [i for i in range(len(bests)) if i != plateau]
    chosen = None
    for i in order:
        B, S, cover = attempt(i)
        if cover.within_bound:
            chosen = i
            break
        log.append({"fallback_rejected_index": i, "L": cover.L, "bound": cover.bound_claimed})
    failed = chosen is None
    if failed:
        chosen = plateau
        B, S, cover = attempt(plateau)
    Sm = power(S, m)
    cert = RefineCertificate(
        A=A, m=m, K=K, E=list(approx.E), epsilon=eps, schedule=schedule, f_values=f_vals,
        best_B=bests, chosen_t_index=chosen, plateau_index=plateau, B=B, f_value=f_vals[chosen],
        rho=rho, S=S, A4=A4, Sm=Sm, containment_checked=Sm.issubset(A4), wideness=cover,
        search_log=log, saturated_tail=saturated, search_failed=failed,
    )
    if not cert.containment_checked:
        raise InternalInvariantBroken("S^m escaped A^4; the stabilizer threshold is broken")
    if failed:
        raise SearchFailed("no schedule index gave a cover within floor(2K/t)", cert)
    return cert
