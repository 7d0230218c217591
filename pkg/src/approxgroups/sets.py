"""Set algebra over a universe: product sets, powers, inverses, exact
counting measure and approximate-subgroup witnesses.

Sets are dense boolean membership vectors (:class:`GroupSet`), immutable once
built. Every comparison of measures is done on exact rationals.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import _cover
from .errors import LocalOverflow, NotSymmetric, PreconditionViolated, UniverseMismatch
from .groups import ARITY_CAP

_CHUNK = 1 << 22


class GroupSet:
    """A subset of a universe stored as a dense bit vector.

    ``arity`` bounds how many base factors are multiplied to reach any
    element; it is only enforced in local groups, where products of more
    than 100 factors are undefined.
    """

    __slots__ = ("universe", "bits", "arity", "_ids", "_digest", "_sym")

    def __init__(self, universe, bits, arity: int = 1):
        bits = np.array(bits, dtype=bool, copy=True).reshape(-1)
        if bits.shape[0] != universe.order:
            raise UniverseMismatch("bit vector length differs from the universe order")
        bits.flags.writeable = False
        self.universe = universe
        self.bits = bits
        self.arity = int(arity)
        self._ids = None
        self._digest = None
        self._sym = None

    @classmethod
    def from_ids(cls, universe, ids: Iterable[int], arity: int = 1) -> "GroupSet":
        bits = np.zeros(universe.order, dtype=bool)
        ids = np.fromiter((int(i) for i in ids), dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= universe.order):
            raise UniverseMismatch("element id out of range")
        bits[ids] = True
        return cls(universe, bits, arity)

    @classmethod
    def empty(cls, universe) -> "GroupSet":
        return cls(universe, np.zeros(universe.order, dtype=bool))

    @classmethod
    def whole(cls, universe) -> "GroupSet":
        return cls(universe, np.ones(universe.order, dtype=bool))

    @classmethod
    def singleton(cls, universe, g: int, arity: int = 1) -> "GroupSet":
        return cls.from_ids(universe, [g], arity)

    @property
    def ids(self) -> np.ndarray:
        if self._ids is None:
            self._ids = np.flatnonzero(self.bits)
            self._ids.flags.writeable = False
        return self._ids

    def tolist(self) -> list[int]:
        return [int(i) for i in self.ids]

    def labels(self) -> list[str]:
        return [self.universe.label(int(i)) for i in self.ids]

    def __len__(self) -> int:
        return int(self.ids.shape[0])

    def __bool__(self) -> bool:
        return len(self) > 0

    def __iter__(self):
        return (int(i) for i in self.ids)

    def __contains__(self, g) -> bool:
        return 0 <= g < self.universe.order and bool(self.bits[g])

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupSet):
            return NotImplemented
        return self.universe == other.universe and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash(self.digest())

    def __repr__(self) -> str:
        shown = ", ".join(self.labels()[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"GroupSet({{{shown}{more}}}, size={len(self)})"

    def digest(self) -> str:
        """Content hash, stable across processes."""
        if self._digest is None:
            h = hashlib.sha256(self.universe.key.encode())
            h.update(np.packbits(self.bits).tobytes())
            self._digest = h.hexdigest()[:24]
        return self._digest

    def _check(self, other: "GroupSet") -> None:
        if self.universe != other.universe:
            raise UniverseMismatch("sets live in different universes")

    def __and__(self, other: "GroupSet") -> "GroupSet":
        self._check(other)
        return GroupSet(self.universe, self.bits & other.bits, min(self.arity, other.arity))

    def __or__(self, other: "GroupSet") -> "GroupSet":
        self._check(other)
        return GroupSet(self.universe, self.bits | other.bits, max(self.arity, other.arity))

    def __xor__(self, other: "GroupSet") -> "GroupSet":
        self._check(other)
        return GroupSet(self.universe, self.bits ^ other.bits, max(self.arity, other.arity))

    def __sub__(self, other: "GroupSet") -> "GroupSet":
        self._check(other)
        return GroupSet(self.universe, self.bits & ~other.bits, self.arity)

    def issubset(self, other: "GroupSet") -> bool:
        self._check(other)
        return not np.any(self.bits & ~other.bits)

    __le__ = issubset

    def with_arity(self, arity: int) -> "GroupSet":
        return GroupSet(self.universe, self.bits, arity)

    def contains_identity(self) -> bool:
        return bool(self.bits[self.universe.identity])

    def is_symmetric(self) -> bool:
        """Closed under inverse and containing the identity."""
        if self._sym is None:
            inv_bits = self.bits[self.universe.inv]
            self._sym = self.contains_identity() and bool(np.array_equal(inv_bits, self.bits))
        return self._sym


def _shared(*sets: GroupSet):
    U = sets[0].universe
    for s in sets[1:]:
        if s.universe != U:
            raise UniverseMismatch("sets live in different universes")
    return U


def _cap(U, arity: int) -> None:
    if U.is_local and arity > ARITY_CAP:
        raise LocalOverflow("arity", arity)


def product_set(X: GroupSet, Y: GroupSet) -> GroupSet:
    """``{x*y : x in X, y in Y}``.

    Rows of X are processed in chunks; each chunk ORs the translates
    ``x*Y`` into the result.
    """
    U = _shared(X, Y)
    arity = X.arity + Y.arity
    _cap(U, arity)
    out = np.zeros(U.order, dtype=bool)
    xs, ys = X.ids, Y.ids
    if len(xs) and len(ys):
        step = max(1, _CHUNK // len(ys))
        for i in range(0, len(xs), step):
            out[U.mul_outer(xs[i:i + step], ys).reshape(-1)] = True
    return GroupSet(U, out, arity)


def product_of(*sets: GroupSet) -> GroupSet:
    acc = sets[0]
    for s in sets[1:]:
        acc = product_set(acc, s)
    return acc


def powers(A: GroupSet, n: int) -> list[GroupSet]:
    """``[A, A^2, ..., A^n]``."""
    if n < 1:
        raise ValueError("n must be positive")
    _cap(A.universe, n * A.arity)
    out = [A]
    stable = False
    for k in range(2, n + 1):
        if stable:
            out.append(out[-1].with_arity(k * A.arity))
            continue
        nxt = product_set(out[-1], A)
        # with 1 in A the chain is increasing; equality means it has stopped
        stable = A.contains_identity() and nxt == out[-1]
        out.append(nxt)
    return out


def power(A: GroupSet, n: int) -> GroupSet:
    """The n-fold product set ``A^n``."""
    return powers(A, n)[-1]


def inverse_set(X: GroupSet) -> GroupSet:
    out = np.zeros(X.universe.order, dtype=bool)
    out[X.universe.inv[X.ids]] = True
    return GroupSet(X.universe, out, X.arity)


def sym_diff(X: GroupSet, Y: GroupSet) -> GroupSet:
    return X ^ Y


def translate(g: int, X: GroupSet, g_arity: int = 1) -> GroupSet:
    """Left translate ``g*X``."""
    U = X.universe
    arity = X.arity + g_arity
    _cap(U, arity)
    out = np.zeros(U.order, dtype=bool)
    if len(X):
        out[U.mul_outer(np.array([g]), X.ids)[0]] = True
    return GroupSet(U, out, arity)


def right_translate(X: GroupSet, g: int, g_arity: int = 1) -> GroupSet:
    """Right translate ``X*g``."""
    U = X.universe
    arity = X.arity + g_arity
    _cap(U, arity)
    out = np.zeros(U.order, dtype=bool)
    if len(X):
        out[U.mul_outer(X.ids, np.array([g]))[:, 0]] = True
    return GroupSet(U, out, arity)


def conjugate(X: GroupSet, a: int, a_arity: int = 1) -> GroupSet:
    """``X^a = a^-1 X a``."""
    U = X.universe
    return translate(int(U.inv[a]), right_translate(X, a, a_arity), a_arity)


def conjugation_union(X: GroupSet, A: GroupSet, threads: int = 1) -> GroupSet:
    """``X^A``, the union of ``a^-1 X a`` over ``a`` in A."""
    U = _shared(X, A)
    if U.abelian:
        return X.with_arity(X.arity + 2 * A.arity) if len(A) else GroupSet.empty(U)
    out = np.zeros(U.order, dtype=bool)
    for part in _map(lambda a: conjugate(X, a, A.arity).bits, list(A), threads):
        out |= part
    return GroupSet(U, out, X.arity + 2 * A.arity)


def _map(fn, items, threads: int):
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class MeasureContext:
    """Counting measure normalized so the reference set has measure 1."""

    reference_set: GroupSet

    def __post_init__(self):
        if not len(self.reference_set):
            raise PreconditionViolated("the reference set of a measure must be nonempty")

    @property
    def scale(self) -> Fraction:
        return Fraction(1, len(self.reference_set))

    def __call__(self, X: GroupSet) -> Fraction:
        return measure(X, self)


def measure(X: GroupSet, ctx: MeasureContext) -> Fraction:
    """``|X| / |A|`` as an exact rational."""
    _shared(X, ctx.reference_set)
    return Fraction(len(X), len(ctx.reference_set))


@dataclass
class ApproxCertificate:
    """Witness that ``A^2`` lies in ``K`` left translates ``e*A``, ``e`` in E."""

    K: int
    E: list[int]
    verified: bool = False
    A: GroupSet | None = field(default=None, repr=False)

    def replay(self) -> bool:
        if self.A is None:
            return False
        return verify_approx(self.A, self.E)


def verify_approx(A: GroupSet, E: Iterable[int]) -> bool:
    E = list(E)
    if not E:
        return len(A) == 0
    EA = product_set(GroupSet.from_ids(A.universe, E, A.arity), A)
    return product_set(A, A).issubset(EA)


def approx_constant(A: GroupSet, tie_width: int = _cover.DEFAULT_TIE_WIDTH) -> ApproxCertificate:
    """Greedy witness ``(K, E)`` with ``A^2`` covered by ``E*A``.

    Translates come from ``A^2 A^-1 = A^3``, the only useful ones. K is not
    guaranteed minimal.
    """
    if not A.is_symmetric():
        raise NotSymmetric("approx_constant needs a symmetric set containing 1")
    U = A.universe
    A2 = product_set(A, A)
    pool = product_set(A2, A)  # A^2 A^-1, A symmetric
    M = _cover.incidence(U, A2.bits, A.ids, pool.ids)
    picks = _cover.greedy_cover(M, tie_width)
    if picks is None:
        raise AssertionError("A^2 is always covered by translates from A^3")
    E = sorted(int(pool.ids[p]) for p in picks)
    cert = ApproxCertificate(K=len(E), E=E, A=A)
    cert.verified = verify_approx(A, E)
    if not cert.verified:
        raise AssertionError("approximate-subgroup witness failed its own replay")
    return cert


def generated(A: GroupSet) -> tuple[GroupSet, int]:
    """``(<A>, n)`` with n least such that ``A^(n+1) = A^n``."""
    if A.universe.is_local:
        raise PreconditionViolated("generated() needs a total group, not a local window")
    if not A.is_symmetric():
        raise NotSymmetric("generated() needs a symmetric set containing 1")
    cur, n = A, 1
    while True:
        nxt = product_set(cur, A)
        if nxt == cur:
            return cur.with_arity(A.arity), n
        cur, n = nxt, n + 1


def is_subgroup(H: GroupSet) -> bool:
    return bool(len(H)) and H.is_symmetric() and product_set(H, H).issubset(H)


@dataclass
class GrowthCheck:
    n: int
    power: int
    size: int
    bound: int
    ok: bool


def disjoint_translate_growth(A: GroupSet, max_power: int | None = None) -> list[GrowthCheck]:
    """Check ``|A^(3n+2)| >= (n+1)|A|`` wherever the disjoint-translate argument applies.

    The argument picks ``a_j`` in ``A^(j+1) \\ A^j`` and uses the disjoint
    translates ``a_(3k) A`` for ``k <= n``; those exist exactly when
    ``A^(3n+1) != A^(3n)``, which is the condition checked here. Powers are
    computed up to ``max_power`` (default: until the chain stabilizes).
    """
    if not A.is_symmetric():
        raise NotSymmetric("growth check needs a symmetric set containing 1")
    pw = [None, A]  # pw[k] = A^k
    limit = max_power if max_power is not None else 10 ** 9
    while len(pw) - 1 < limit:
        nxt = product_set(pw[-1], A)
        pw.append(nxt)
        if nxt == pw[-2]:
            break
    top = len(pw) - 1
    checks = []
    n = 0
    while 3 * n + 2 <= top:
        if pw[3 * n + 1] == pw[3 * n]:
            break
        size = len(pw[3 * n + 2])
        bound = (n + 1) * len(A)
        checks.append(GrowthCheck(n, 3 * n + 2, size, bound, size >= bound))
        n += 1
    return checks
