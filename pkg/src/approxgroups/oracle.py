"""Brute-force reference implementations for tiny instances.

Everything here works on plain Python sets and direct table lookups, not on
the bit-vector kernels, so it can serve as ground truth for them. Nothing in
the production paths calls into this module.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from .errors import BudgetExceeded, Uncoverable
from .sets import GroupSet


@dataclass(frozen=True)
class OracleBudget:
    max_universe: int = 24
    max_subsets: int = 2 ** 20
    max_P_depth: int = 2


DEFAULT_BUDGET = OracleBudget()


class _Tables:
    _cache: dict = {}

    @classmethod
    def of(cls, universe):
        key = universe.key
        if key not in cls._cache:
            n = universe.order
            mul = [[universe.mul(a, b) for b in range(n)] for a in range(n)]
            inv = [next(b for b in range(n) if mul[a][b] == universe.identity) for a in range(n)]
            cls._cache[key] = (mul, inv)
        return cls._cache[key]


def _check_universe(universe, budget: OracleBudget) -> None:
    if universe.is_local or universe.order > budget.max_universe:
        raise BudgetExceeded(f"universe of order {universe.order} exceeds the oracle budget")


@lru_cache(maxsize=1 << 16)
def _min_cover(masks: tuple[int, ...], full: int, max_subsets: int) -> int | None:
    """Exact minimum by iterative deepening: some chosen translate must
    contain the lowest uncovered element, so branching over those is
    exhaustive. ``max_subsets`` bounds the number of search nodes."""
    if full == 0:
        return 0
    union = 0
    for m in masks:
        union |= m
    if union != full:
        return None
    nodes = 0
    failed: set[tuple[int, int]] = set()

    def search(left: int, k: int) -> bool:
        nonlocal nodes
        if left == 0:
            return True
        if k == 0 or (left, k) in failed:
            return False
        nodes += 1
        if nodes > max_subsets:
            raise BudgetExceeded("exact cover search exceeded the node budget")
        low = left & -left
        for m in masks:
            if m & low and search(left & ~m, k - 1):
                return True
        failed.add((left, k))
        return False

    for k in range(1, len(masks) + 1):
        if search(full, k):
            return k
    return None  # unreachable: the union covers


def _min_cover_sets(mul, target: list[int], tile: list[int], pool: list[int], budget: OracleBudget) -> int:
    col = {x: j for j, x in enumerate(target)}
    masks = set()
    for g in pool:
        m = 0
        for y in tile:
            j = col.get(mul[g][y])
            if j is not None:
                m |= 1 << j
        if m:
            masks.add(m)
    res = _min_cover(tuple(sorted(masks)), (1 << len(target)) - 1, budget.max_subsets)
    if res is None:
        raise Uncoverable("target is not covered by the pool translates")
    return res


def exact_min_cover(target: GroupSet, tile: GroupSet, pool: GroupSet | None = None,
                    budget: OracleBudget = DEFAULT_BUDGET) -> int:
    """Minimum number of left translates of tile (from pool, default all of G)
    that cover target, by exhaustive search over translate subsets."""
    U = target.universe
    _check_universe(U, budget)
    mul, _ = _Tables.of(U)
    pool_ids = list(pool) if pool is not None else list(range(U.order))
    return _min_cover_sets(mul, list(target), list(tile), pool_ids, budget)


def exact_f(t, A: GroupSet, ctx=None, budget: OracleBudget = DEFAULT_BUDGET) -> tuple[Fraction, GroupSet]:
    """Exact ``min |BA|/|A|`` over all B inside A with ``|B| >= t|A|``, and the
    first minimizer in (size, lexicographic) order."""
    t = Fraction(t)
    U = A.universe
    _check_universe(U, budget)
    mul, _ = _Tables.of(U)
    elems = list(A)
    n = len(elems)
    c = max(1, math.ceil(t * n))
    total = sum(math.comb(n, k) for k in range(c, n + 1))
    if total > budget.max_subsets:
        raise BudgetExceeded(f"{total} subsets exceed the oracle budget")
    best, witness = None, None
    for k in range(c, n + 1):
        for B in itertools.combinations(elems, k):
            size = len({mul[b][a] for b in B for a in elems})
            if best is None or size < best:
                best, witness = size, B
    return Fraction(best, n), GroupSet.from_ids(U, witness)


def exact_P(n: int, t, B: GroupSet, A: GroupSet, K: int, budget: OracleBudget = DEFAULT_BUDGET) -> bool:
    """``P_n^t(B)`` by plain, unmemoized recursion; the covering clause uses
    :func:`exact_min_cover` with translates taken from ``A^3``."""
    if n > budget.max_P_depth:
        raise BudgetExceeded(f"depth {n} exceeds the oracle budget")
    U = A.universe
    _check_universe(U, budget)
    mul, inv = _Tables.of(U)
    a_el = sorted(A)
    A2 = sorted({mul[x][y] for x in a_el for y in a_el})
    A3 = sorted({mul[x][y] for x in A2 for y in a_el})

    def P(k: int, tt: Fraction, S: frozenset) -> bool:
        if k == 0:
            return len(S) > 0
        if not P(k - 1, tt, S):
            return False
        t2 = tt * tt / (2 * K)
        X = [
            g for g in A2
            if P(k - 1, t2, frozenset(mul[g][b] for b in S) & S)
            and P(k - 1, t2, frozenset(mul[inv[g]][b] for b in S) & S)
        ]
        if not X:
            return False
        try:
            L = _min_cover_sets(mul, a_el, X, A3, budget)
        except Uncoverable:
            return False
        return L <= math.floor(2 * K / tt)

    return P(n, Fraction(t), frozenset(B))


class OracleCache:
    """JSON results on disk, keyed by a hash of the operation and its inputs."""

    def __init__(self, directory: str | Path):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(op: str, **inputs) -> str:
        blob = json.dumps({"op": op, **inputs}, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:32]

    def get(self, key: str):
        p = self.dir / f"{key}.json"
        return json.loads(p.read_text()) if p.exists() else None

    def put(self, key: str, value) -> None:
        (self.dir / f"{key}.json").write_text(json.dumps(value, sort_keys=True, indent=2) + "\n")
