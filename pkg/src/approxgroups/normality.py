"""Normalized refinement: a wide symmetric S with ``(S^8)^A`` inside ``R^4``.

The construction refines R to T with ``T^48`` inside ``R^4``, covers A by
translates ``a_i T``, and intersects the conjugates ``a_i T a_i^-1`` inside
``A^6`` down to a set D with ``S = D^-1 D`` inside every ``a_i T^4 a_i^-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .covering import CoverCertificate, cover_by_translates, ruzsa_bound, ruzsa_cover
from .errors import NotSymmetric, PreconditionViolated
from .sanders import DEFAULT_SEARCH_WIDTH, RefineCertificate, sanders_refine
from .sets import (
    GroupSet,
    MeasureContext,
    _map,
    approx_constant,
    conjugate,
    conjugation_union,
    inverse_set,
    power,
    product_of,
    product_set,
    right_translate,
    translate,
)


@dataclass
class AveragedMeasure:
    """``mu_bar(X) = (1/n) sum_i mu(X a_i)``; left invariant like mu.

    For counting measure it coincides with mu, since counting is also right
    invariant; it is kept separate so the bounds below are checked as stated.
    """

    base: MeasureContext
    elements: list[int]

    def __post_init__(self):
        if not self.elements:
            raise PreconditionViolated("averaged measure needs at least one element")

    def __call__(self, X: GroupSet) -> Fraction:
        total = sum((self.base(right_translate(X, a)) for a in self.elements), Fraction(0))
        return total / len(self.elements)


def averaged_measure(ctx: MeasureContext, a_list: Sequence[int]) -> AveragedMeasure:
    return AveragedMeasure(ctx, [int(a) for a in a_list])


@dataclass
class CoreResult:
    D: GroupSet
    K: int
    steps: list[dict] = field(default_factory=list)
    bound_lhs: Fraction = Fraction(0)
    bound_rhs: Fraction = Fraction(0)

    @property
    def bound_ok(self) -> bool:
        return self.bound_lhs >= self.bound_rhs


def common_conjugate_core(
    X_list: Sequence[GroupSet],
    N_list: Sequence[int],
    ambient: GroupSet,
    measure: Callable[[GroupSet], Fraction],
    *,
    K: int | None = None,
) -> CoreResult:
    """D inside ``X_1`` with ``D^-1 D`` inside ``X_1^-1 X_1`` and every ``(X_i X_i^-1)^2``.

    Each step Ruzsa-covers the ambient set by translates ``g X_i X_i^-1``
    and keeps the translate meeting D the most (smallest id on ties). K is
    the ambient approximation constant; the returned bound compares
    ``K^(n-1) N_1...N_n mu(D)`` with ``mu(ambient)``.
    """
    if len(X_list) != len(N_list) or not X_list:
        raise PreconditionViolated("need matching nonempty X and N lists")
    mu_amb = measure(ambient)
    for i, (X, N) in enumerate(zip(X_list, N_list), 1):
        if not X.issubset(ambient):
            raise PreconditionViolated(f"X_{i} is not inside the ambient set")
        if N * measure(X) < mu_amb:
            raise PreconditionViolated(f"N_{i} mu(X_{i}) < mu(ambient)")
    if K is None:
        K = approx_constant(ambient).K
    D = X_list[0]
    steps = []
    for i in range(1, len(X_list)):
        X = X_list[i]
        Y = product_set(X, inverse_set(X))
        Z = ruzsa_cover(ambient, X)
        overlaps = [len(translate(z, Y, ambient.arity) & D) for z in Z]
        j = int(np.argmax(overlaps))
        D = translate(Z[j], Y, ambient.arity) & D
        steps.append({
            "i": i + 1, "translates": len(Z), "ruzsa_bound": K * N_list[i],
            "within_bound": len(Z) <= K * N_list[i], "chosen": Z[j], "size": len(D),
        })
    lhs = K ** (len(X_list) - 1) * np.prod([int(N) for N in N_list], dtype=object) * measure(D)
    return CoreResult(D, K, steps, Fraction(lhs), mu_amb)


@dataclass
class NormalizeCertificate:
    A: GroupSet
    R: GroupSet
    K: int
    E: list[int]
    N: int
    R_cover: CoverCertificate
    T_cert: RefineCertificate
    T: GroupSet
    a_list: list[int]
    a_cover: CoverCertificate
    ambient: GroupSet
    core: CoreResult
    D: GroupSet
    S: GroupSet
    S8: GroupSet
    R4: GroupSet
    wideness: CoverCertificate
    mu_A: Fraction
    mu_bar_A: Fraction
    mu_bar_conj: list[Fraction]
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.a_list)

    @property
    def verified(self) -> bool:
        return all(self.checks.values())


def normalize_refine(
    A: GroupSet,
    R: GroupSet,
    ctx: MeasureContext | None = None,
    *,
    search_width: int = DEFAULT_SEARCH_WIDTH,
    threads: int = 1,
) -> NormalizeCertificate:
    """Wide symmetric S with ``(S^8)^A`` inside ``R^4``, for R symmetric, wide in A, ``R^4`` inside ``A^4``."""
    if not A.is_symmetric():
        raise NotSymmetric("A must be symmetric")
    if not R.is_symmetric():
        raise PreconditionViolated("R must be symmetric")
    ctx = ctx or MeasureContext(A)
    A4 = power(A, 4)
    R4 = power(R, 4)
    if not R4.issubset(A4):
        raise PreconditionViolated("R^4 is not inside A^4")
    approx = approx_constant(A)
    K = approx.K
    R_cover = cover_by_translates(A, R)
    N = R_cover.L
    U = A.universe

    def elems(ids):
        return GroupSet.from_ids(U, ids, 1)

    # R^2 inside A^4 inside E^3 A inside E^3 X R
    E3X = product_of(elems(approx.E), elems(approx.E), elems(approx.E), elems(R_cover.translates))
    r_approx = product_set(R, R).issubset(product_set(E3X, R))

    T_cert = sanders_refine(R, 48, search_width=search_width, threads=threads)
    T = T_cert.S
    a_cover = cover_by_translates(A, T, pool=A, pool_name="A")
    a_list = list(a_cover.translates)
    n = len(a_list)
    mu_bar = averaged_measure(ctx, a_list)
    X_list = [conjugate(T, int(U.inv[a])) for a in a_list]  # a T a^-1
    ambient = power(A, 6)
    K6 = K ** 6
    mu_bar_A = mu_bar(A)
    mu_bar_conj = [mu_bar(X) for X in X_list]
    core = common_conjugate_core(X_list, [K6 * n * n] * n, ambient, mu_bar, K=K6)
    D = core.D
    Dinv = inverse_set(D)
    S = product_set(Dinv, D)
    S8 = power(S, 8)
    T4 = power(T, 4)
    T6 = power(T, 6)

    def per_i_ok(a):
        return conjugate(S, a).issubset(T4)

    def per_a_ok(a):
        return conjugate(S8, a).issubset(R4)

    per_i = _map(per_i_ok, a_list, threads)
    per_a = _map(per_a_ok, list(A), threads)
    Z = ruzsa_cover(A, Dinv)
    wide = CoverCertificate(A, S, Z, ruzsa_bound(A, Dinv), "ruzsa(A, D^-1)", "ruzsa")
    wide.verified = wide.replay()
    checks = {
        "(S^8)^A inside R^4": conjugation_union(S8, A, threads).issubset(R4),
        "(S^8)^a inside R^4 for every a in A": all(per_a),
        "S^(a_i) inside T^4 for every i": all(per_i),
        "S^A inside T^6": conjugation_union(S, A, threads).issubset(T6),
        "T^48 inside R^4": T_cert.containment_checked,
        "S symmetric": S.is_symmetric(),
        "D nonempty": len(D) > 0,
        "D inside A^6": D.issubset(ambient),
        "A inside union a_i T": a_cover.verified,
        "a_i in A": all(a in A for a in a_list),
        "R covers A": R_cover.verified,
        "R^2 inside E^3 X R": r_approx,
        "mu_bar(A) <= K mu(A)": mu_bar_A <= K * ctx(A),
        "mu_bar(a_i T a_i^-1) >= mu_bar(A)/(K n^2)": all(v * K * n * n >= mu_bar_A for v in mu_bar_conj),
        "core measure bound": core.bound_ok,
        "core cover sizes within K N_i": all(s["within_bound"] for s in core.steps),
        "S wide in A": wide.verified and wide.within_bound,
        "averaged measure equals counting measure": all(
            mu_bar(X) == ctx(X) for X in (A, T, S, D)),
    }
    return NormalizeCertificate(
        A=A, R=R, K=K, E=list(approx.E), N=N, R_cover=R_cover, T_cert=T_cert, T=T,
        a_list=a_list, a_cover=a_cover, ambient=ambient, core=core, D=D, S=S, S8=S8, R4=R4,
        wideness=wide, mu_A=ctx(A), mu_bar_A=mu_bar_A, mu_bar_conj=mu_bar_conj, checks=checks,
    )
