"""JSON certificates and their replay.

A certificate stores every set it mentions once, in a table keyed by content
digest, and an ordered list of named claims. Verification never trusts the
stored outcomes: each claim is recomputed from the stored sets with the set
algebra, in order, and the first failing claim is reported. Digest integrity
is checked after the semantic claims, so a tampered set is reported by the
containment it breaks.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

from .errors import ApproxGroupsError, InvalidInstance
from .instances import Instance, canonical_json
from .sanders import stabilizer_set
from .sets import (
    GroupSet,
    conjugate,
    inverse_set,
    is_subgroup,
    power,
    product_set,
    verify_approx,
)

CERT_SCHEMA_VERSION = 1
KINDS = ("approx", "ruzsa", "wide", "equiv", "sanders", "normalize", "chain")


class CertError(ApproxGroupsError):
    """Unreadable certificate, bad schema, or missing/changed instance (exit code 2)."""


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def unfrac(s: str) -> Fraction:
    return Fraction(s)


# -- writing --------------------------------------------------------------------


class CertBuilder:
    def __init__(self, kind: str, instance_path: str | Path, instance: Instance, params: dict):
        if kind not in KINDS:
            raise ValueError(f"unknown certificate kind {kind!r}")
        self.kind = kind
        self.instance_path = str(instance_path)
        self.instance_sha = sha256_text(instance.dumps())
        self.params = params
        self.sets: dict[str, dict] = {}
        self.data: dict = {}

    def ref(self, X: GroupSet) -> str:
        d = X.digest()
        self.sets.setdefault(d, {"ids": X.tolist(), "arity": X.arity})
        return d

    def to_dict(self, claims: list[dict]) -> dict:
        return {
            "schema_version": CERT_SCHEMA_VERSION,
            "kind": self.kind,
            "instance": {"path": self.instance_path, "sha256": self.instance_sha},
            "params": self.params,
            "sets": self.sets,
            "data": self.data,
            "claims": claims,
        }


# -- reading --------------------------------------------------------------------


@dataclass
class ClaimResult:
    name: str
    holds: bool


@dataclass
class VerifyResult:
    kind: str
    claims: list[ClaimResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.claims)

    @property
    def first_failure(self) -> str | None:
        for c in self.claims:
            if not c.holds:
                return c.name
        return None


class _Reader:
    def __init__(self, cert: dict, A: GroupSet):
        self.cert = cert
        self.U = A.universe
        self.A = A
        self.sets = cert["sets"]
        self.data = cert["data"]
        self._cache: dict[str, GroupSet] = {}

    def set(self, ref: str) -> GroupSet:
        if ref not in self._cache:
            rec = self.sets.get(ref)
            if rec is None:
                raise CertError(f"certificate references unknown set {ref}")
            try:
                self._cache[ref] = GroupSet.from_ids(self.U, rec["ids"], int(rec.get("arity", 1)))
            except (KeyError, TypeError, ValueError, IndexError) as e:
                raise CertError(f"malformed set record {ref}: {e}") from None
        return self._cache[ref]

    def elems(self, ids) -> GroupSet:
        return GroupSet.from_ids(self.U, [int(i) for i in ids], 1)

    def d(self, key: str):
        if key not in self.data:
            raise CertError(f"certificate data is missing {key!r}")
        return self.data[key]


def _covers(target: GroupSet, tile: GroupSet, translates, arity: int = 1) -> bool:
    if not translates:
        return len(target) == 0
    Z = GroupSet.from_ids(target.universe, [int(z) for z in translates], arity)
    return target.issubset(product_set(Z, tile))


def _disjoint(Z, Y: GroupSet) -> bool:
    seen: set[int] = set()
    U = Y.universe
    for z in Z:
        row = {U.mul(int(z), int(y)) for y in Y.ids}
        if seen & row:
            return False
        seen |= row
    return True


def _claims_approx(r: _Reader):
    A = r.A
    E = r.d("E")
    yield "A^2 inside E A", lambda: verify_approx(A, E)
    yield "K = |E|", lambda: r.d("K") == len(set(E))


def _claims_ruzsa(r: _Reader):
    X, Y = r.set(r.d("X")), r.set(r.d("Y"))
    Z = r.d("Z")
    yield "X inside Z Y Y^-1", lambda: _covers(X, product_set(Y, inverse_set(Y)), Z, X.arity)
    yield "Z inside X", lambda: all(int(z) in X for z in Z)
    yield "translates zY pairwise disjoint", lambda: _disjoint(Z, Y)
    yield "|Z| <= floor(|XY|/|Y|)", lambda: len(Z) <= len(product_set(X, Y)) // len(Y)
    if r.data.get("K") is not None:
        yield "|Z| <= K", lambda: len(Z) <= Fraction(r.d("K"))


def _claims_wide(r: _Reader):
    A, B = r.A, r.set(r.d("B"))
    W = r.set(r.d("BBinv"))
    Z = r.d("Z")
    yield "A inside Z B B^-1", lambda: _covers(A, W, Z, A.arity)
    yield "B B^-1 recomputes", lambda: W == product_set(B, inverse_set(B))
    yield "B B^-1 symmetric", lambda: W.is_symmetric()
    yield "L <= floor(|AB|/|B|)", lambda: len(Z) <= len(product_set(A, B)) // len(B)
    n = r.d("n")
    E = r.d("E")

    def composite():
        W2 = power(W, 2)
        if not W2.issubset(power(A, 2 * n)):
            return False
        Wit = r.elems(E)
        for _ in range(2 * n - 2):
            Wit = product_set(Wit, r.elems(E))
        Wit = product_set(Wit, r.elems(Z))
        return W2.issubset(product_set(Wit, W))
    yield "(BB^-1)^2 inside E^(2n-1) Z BB^-1", composite


def _claims_equiv(r: _Reader):
    A, As, B = r.A, r.set(r.d("Astar")), r.set(r.d("B"))
    core = r.set(r.d("core"))
    n = r.d("n")
    yield "B = A A* A", lambda: B == product_set(product_set(A, As), A)
    yield "B symmetric", lambda: B.is_symmetric()
    yield "A inside X A*", lambda: _covers(A, As, r.d("X"))
    yield "A* inside X* A", lambda: _covers(As, A, r.d("Xstar"))
    yield "A wide in B", lambda: _covers(B, A, r.d("cover_A"))
    yield "A* wide in B", lambda: _covers(B, As, r.d("cover_Astar"))
    yield "core = A^n & A*^n", lambda: core == (power(A, n) & power(As, n))
    yield "core wide in B", lambda: _covers(B, core, r.d("cover_core"))


def _claims_sanders(r: _Reader):
    A = r.A
    S, B = r.set(r.d("S")), r.set(r.d("B"))
    m, K = r.d("m"), r.d("K")
    t = unfrac(r.d("t"))
    Z = r.d("translates")
    A4 = power(A, 4)
    yield "S^m inside A^4", lambda: power(S, m).issubset(A4)
    yield "S symmetric", lambda: S.is_symmetric()
    yield "S inside A^2", lambda: S.issubset(power(A, 2))
    yield "A^2 inside E A", lambda: verify_approx(A, r.d("E")) and len(r.d("E")) == K
    yield "A inside union of translates of S", lambda: _covers(A, S, Z, A.arity)
    yield "L <= floor(2K/t)", lambda: len(Z) <= math.floor(2 * K / t)

    def stabilizer():
        return stabilizer_set(B, unfrac(r.d("rho")), A) == S
    yield "S is the stabilizer set of B", stabilizer

    def threshold():
        return B.issubset(A) and len(B) >= t * len(A)
    yield "B inside A with |B| >= t|A|", threshold

    def f_value():
        return Fraction(len(product_set(B, A)), len(A)) == unfrac(r.d("f_value"))
    yield "f(t) = |BA|/|A| recomputes", f_value

    def schedule():
        ts = [unfrac(x) for x in r.d("t_values")]
        ok = ts[0] == 1 and all(ts[k + 1] == ts[k] ** 2 / (2 * K) for k in range(len(ts) - 1))
        return ok and ts[r.d("chosen_t_index")] == t

    yield "schedule t_(k+1) = t_k^2/2K", schedule

    def plateau():
        f = [unfrac(x) for x in r.d("f_values")]
        if r.d("saturated_tail"):
            f = f + [Fraction(1)]
        i = r.d("plateau_index")
        eps = unfrac(r.d("epsilon"))
        return 0 <= i < len(f) - 1 and all(1 <= v <= K for v in f) and f[i + 1] >= (1 - eps) * f[i]
    yield "plateau f(t_(i+1)) >= (1-eps) f(t_i)", plateau


def _claims_normalize(r: _Reader):
    A, R = r.A, r.set(r.d("R"))
    S, D, T = r.set(r.d("S")), r.set(r.d("D")), r.set(r.d("T"))
    R4 = power(R, 4)

    def normal():
        S8 = power(S, 8)
        return all(conjugate(S8, a).issubset(R4) for a in A)
    yield "(S^8)^A inside R^4", normal
    yield "S symmetric", lambda: S.is_symmetric()
    yield "S = D^-1 D", lambda: S == product_set(inverse_set(D), D)
    yield "R symmetric", lambda: R.is_symmetric()
    yield "R^4 inside A^4", lambda: R4.issubset(power(A, 4))
    yield "A inside union of translates of R", lambda: _covers(A, R, r.d("R_translates"))
    yield "T^48 inside R^4", lambda: power(T, 48).issubset(R4)
    yield "A inside union a_i T", lambda: _covers(A, T, r.d("a_list")) and all(int(a) in A for a in r.d("a_list"))
    yield "A inside union of translates of S", lambda: _covers(A, S, r.d("S_translates"), A.arity)


def _claims_chain(r: _Reader):
    A = r.A
    stages = r.d("stages")
    mode = r.d("mode")
    yield "S_0 = A", lambda: r.set(stages[0]["S"]) == A
    for i, st in enumerate(stages):
        S, H = r.set(st["S"]), r.set(st["H"])
        yield f"H_{i} = S_{i}^4", (lambda S=S, H=H: power(S, 4) == H)
        yield f"A covered by translates of H_{i}", (lambda H=H, st=st: _covers(A, H, st["cover_A"]))
        if i:
            Hp = r.set(stages[i - 1]["H"])
            yield f"S_{i}^8 inside H_{i - 1}", (lambda S=S, Hp=Hp: power(S, 8).issubset(Hp))
            yield f"H_{i} inside H_{i - 1}", (lambda H=H, Hp=Hp: H.issubset(Hp))
            tgt = r.set(st["wide_target"])
            yield f"S_{i} wide in its refinement target", (
                lambda S=S, tgt=tgt, st=st: _covers(tgt, S, st["translates"], tgt.arity))
    if r.d("stabilized_at") is not None:
        H = r.set(stages[-1]["H"])
        yield "H_(i+1) = H_i at the end", lambda: H == r.set(stages[-2]["H"])
        yield "H is a subgroup", lambda: is_subgroup(H)
        if mode == "normal":
            yield "a H a^-1 = H for all a in A", lambda: all(conjugate(H, a) == H for a in A)


_CLAIMS: dict[str, Callable] = {
    "approx": _claims_approx, "ruzsa": _claims_ruzsa, "wide": _claims_wide, "equiv": _claims_equiv,
    "sanders": _claims_sanders, "normalize": _claims_normalize, "chain": _claims_chain,
}


def claims_for(cert: dict, A: GroupSet) -> list[ClaimResult]:
    r = _Reader(cert, A)
    out = []
    name = "certificate setup"
    try:
        for name, fn in _CLAIMS[cert["kind"]](r):
            out.append(ClaimResult(name, bool(fn())))
    except ApproxGroupsError as e:
        if isinstance(e, CertError):
            raise
        # an operation that cannot even be evaluated (e.g. a local overflow on
        # a tampered set) counts as the claim failing
        out.append(ClaimResult(name, False))
        return out
    for d, rec in cert["sets"].items():
        X = r.set(d)
        out.append(ClaimResult(f"set digest {d}", X.digest() == d))
    return out


def _instance_for(cert: dict, cert_path: Path | None) -> Instance:
    info = cert.get("instance")
    if not isinstance(info, dict) or "path" not in info:
        raise CertError("certificate has no instance reference")
    p = Path(info["path"])
    candidates = [p]
    if not p.is_absolute() and cert_path is not None:
        candidates.append(cert_path.parent / p)
    for c in candidates:
        if c.exists():
            text = c.read_text()
            if sha256_text(text) != info.get("sha256"):
                raise CertError(f"instance {c} does not match the recorded hash")
            try:
                return Instance.loads(text)
            except InvalidInstance as e:
                raise CertError(f"instance {c}: {e}") from None
    raise CertError(f"instance {info['path']} not found")


def verify_dict(cert: dict, cert_path: Path | None = None, instance: Instance | None = None) -> VerifyResult:
    if not isinstance(cert, dict) or cert.get("schema_version") != CERT_SCHEMA_VERSION:
        raise CertError("unsupported certificate schema")
    kind = cert.get("kind")
    if kind not in KINDS:
        raise CertError(f"unknown certificate kind {kind!r}")
    for key in ("sets", "data", "claims"):
        if key not in cert:
            raise CertError(f"certificate is missing {key!r}")
    inst = instance or _instance_for(cert, cert_path)
    try:
        _, A = inst.build()
    except InvalidInstance as e:
        raise CertError(str(e)) from None
    return VerifyResult(kind, claims_for(cert, A))


def verify_file(path: str | Path) -> VerifyResult:
    path = Path(path)
    try:
        cert = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise CertError(f"cannot read certificate {path}: {e}") from None
    return verify_dict(cert, path)


def write_cert(cert: dict, path: str | Path) -> None:
    Path(path).write_text(canonical_json(cert))
