"""Descending chain ``S_0 = A``, ``S_(i+1)^8`` inside ``S_i^4``, and its core ``H``.

Each stage refines the previous one (plain or normalized refinement); the
chain stops once ``H_i = S_i^4`` stops shrinking, at which point ``H`` is a
subgroup (``H H = S^8`` inside ``S^4 = H``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .covering import CoverCertificate, cover_by_translates
from .errors import ApproxGroupsError, PreconditionViolated
from .normality import NormalizeCertificate, normalize_refine
from .sanders import DEFAULT_SEARCH_WIDTH, RefineCertificate, sanders_refine
from .sets import GroupSet, MeasureContext, conjugate, generated, is_subgroup, power

DEFAULT_MAX_STEPS = 16


@dataclass
class Stage:
    index: int
    S: GroupSet
    H: GroupSet
    measure: Fraction
    L: int | None          # wideness of S_i in S_(i-1)
    cover_A: CoverCertificate
    mode: str
    cert: RefineCertificate | NormalizeCertificate | None = None
    S8_in_prev_H: bool | None = None
    descends: bool | None = None


@dataclass
class ChainReport:
    A: GroupSet
    mode: str
    max_steps: int
    stages: list[Stage] = field(default_factory=list)
    stabilized_at: int | None = None
    final_is_subgroup: bool | None = None
    final_is_A_normalized: bool | None = None
    index_in_generated: int | None = None
    error: str | None = None

    @property
    def H(self) -> GroupSet:
        return self.stages[-1].H

    def tsv(self) -> str:
        rows = ["step\t|S_i|\t|H_i|\tL"]
        for st in self.stages:
            rows.append(f"{st.index}\t{len(st.S)}\t{len(st.H)}\t{'' if st.L is None else st.L}")
        return "\n".join(rows) + "\n"


def _stage(i, S, A, ctx, mode, L=None, cert=None) -> Stage:
    H = power(S, 4)
    return Stage(i, S, H, ctx(S), L, cover_by_translates(A, H), mode, cert)


def core_chain(
    A: GroupSet,
    max_steps: int = DEFAULT_MAX_STEPS,
    mode: str = "plain",
    ctx: MeasureContext | None = None,
    *,
    search_width: int = DEFAULT_SEARCH_WIDTH,
    threads: int = 1,
) -> ChainReport:
    """Iterate the refinement from ``S_0 = A`` until ``H_(i+1) = H_i`` or ``max_steps``.

    Refinement errors propagate with the partial report attached as
    ``exc.partial_report``.
    """
    if mode not in ("plain", "normal"):
        raise ValueError(f"unknown mode {mode!r}")
    if max_steps < 1:
        raise PreconditionViolated("max_steps must be at least 1")
    if not A.is_symmetric():
        raise PreconditionViolated("A must be symmetric")
    ctx = ctx or MeasureContext(A)
    report = ChainReport(A, mode, max_steps)
    report.stages.append(_stage(0, A, A, ctx, mode))
    base_arity = 4 * A.arity
    try:
        for i in range(max_steps):
            cur = report.stages[-1]
            if mode == "plain":
                cert = sanders_refine(cur.S, 8, search_width=search_width, threads=threads)
            else:
                cert = normalize_refine(A, cur.S, ctx, search_width=search_width, threads=threads)
            # S_(i+1) lies in S_(i+1)^8, inside H_i, inside A^4
            S = cert.S.with_arity(min(cert.S.arity, base_arity))
            nxt = _stage(i + 1, S, A, ctx, mode, cert.wideness.L, cert)
            nxt.S8_in_prev_H = power(S, 8).issubset(cur.H)
            nxt.descends = nxt.H.issubset(cur.H)
            report.stages.append(nxt)
            if nxt.H == cur.H:
                report.stabilized_at = i
                break
    except ApproxGroupsError as e:
        report.error = f"{type(e).__name__}: {e}"
        e.partial_report = report
        raise
    _final_checks(report)
    return report


def _final_checks(report: ChainReport) -> None:
    if report.stabilized_at is None:
        return
    H = report.H
    A = report.A
    report.final_is_subgroup = is_subgroup(H)
    if report.mode == "normal":
        report.final_is_A_normalized = all(conjugate(H, a) == H for a in A)
    if report.final_is_subgroup and not A.universe.is_local:
        gen, _ = generated(A)
        if H.issubset(gen):
            report.index_in_generated = len(gen) // len(H)
