"""Finite groups as explicit Cayley tables, and integer windows as local groups.

Both universe types expose the same small surface used by the set algebra:
``order``, ``identity``, ``inv`` (an id -> id array), ``mul(a, b)``,
``mul_outer(xs, ys)``, ``label(i)``, ``resolve(ref)`` and ``key``.
Element ids are dense integers ``0..order-1``.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import InvalidSpec, LocalOverflow, UndefinedProduct

MAX_ORDER = 65536
EXHAUSTIVE_ASSOC_CUTOFF = 512
ASSOC_SAMPLES = 100_000
ARITY_CAP = 100
ELEMENT_KINDS = ("cyclic", "dihedral", "heisenberg", "symmetric", "product", "local")


def _canonical(spec: dict) -> str:
    return json.dumps(spec, sort_keys=True, separators=(",", ":"))


class GroupTable:
    """A finite group given by its multiplication and inverse tables.

    Element 0 is the identity. ``labels`` are human readable names used in
    reports and accepted by :meth:`resolve`.
    """

    is_local = False

    def __init__(
        self,
        table: np.ndarray,
        inv: np.ndarray,
        *,
        labels: Sequence[str] | None = None,
        generators: Sequence[int] = (),
        spec: dict | None = None,
        abelian: bool | None = None,
        validate: bool = True,
        seed: int = 0,
    ):
        order = int(table.shape[0])
        if order < 1 or order > MAX_ORDER:
            raise InvalidSpec(f"group order {order} outside 1..{MAX_ORDER}")
        if table.shape != (order, order) or inv.shape != (order,):
            raise InvalidSpec("table shapes do not match the order")
        dtype = np.uint16 if order <= 65536 else np.uint32
        self.table = np.ascontiguousarray(table, dtype=dtype)
        self.table.flags.writeable = False
        self.inv = np.ascontiguousarray(inv, dtype=np.int64)
        self.inv.flags.writeable = False
        self.order = order
        self.identity = 0
        self.labels = list(labels) if labels is not None else [str(i) for i in range(order)]
        self.generators = tuple(int(g) for g in generators)
        self.spec = spec or {"kind": "table", "params": {"order": order}}
        self.key = _canonical(self.spec)
        self._label_index = {lab: i for i, lab in enumerate(self.labels)}
        if validate:
            self.validate(seed=seed)
        self.abelian = bool(np.array_equal(self.table, self.table.T)) if abelian is None else abelian

    def __repr__(self) -> str:
        return f"GroupTable({self.key})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupTable) and other.key == self.key

    def __hash__(self) -> int:
        return hash(self.key)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def mul_outer(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """All products ``x*y`` for ``x`` in ``xs``, ``y`` in ``ys``, shape (len(xs), len(ys))."""
        return self.table[np.ix_(xs, ys)]

    def label(self, i: int) -> str:
        return self.labels[i]

    def resolve(self, ref: Any) -> int:
        """Map an element reference (id or label) to an id."""
        if isinstance(ref, str):
            if ref in self._label_index:
                return self._label_index[ref]
            raise InvalidSpec(f"unknown element label {ref!r}")
        if isinstance(ref, bool) or not isinstance(ref, (int, np.integer)):
            raise InvalidSpec(f"bad element reference {ref!r}")
        if not 0 <= ref < self.order:
            raise InvalidSpec(f"element id {ref} out of range")
        return int(ref)

    def validate(self, seed: int = 0) -> None:
        n = self.order
        t = self.table.astype(np.int64)
        if not (np.array_equal(t[0], np.arange(n)) and np.array_equal(t[:, 0], np.arange(n))):
            raise InvalidSpec("element 0 is not a two-sided identity")
        if not np.all(t[np.arange(n), self.inv] == 0):
            raise InvalidSpec("inverse table is wrong")
        if n <= EXHAUSTIVE_ASSOC_CUTOFF:
            for x in range(n):
                # (x y) z  versus  x (y z), for all y, z at once
                if not np.array_equal(t[t[x], :], t[x][t]):
                    raise InvalidSpec(f"multiplication is not associative (x={x})")
        else:
            rng = np.random.default_rng(seed)
            x, y, z = rng.integers(0, n, size=(3, ASSOC_SAMPLES))
            if not np.array_equal(t[t[x, y], z], t[x, t[y, z]]):
                raise InvalidSpec("multiplication is not associative (sampled)")


class LocalGroup:
    """The integer window ``[-W, W]`` under addition, as a local group.

    A product is defined only for at most ``arity_cap`` factors whose
    prefix sums all stay inside the window. Ids are offsets: id ``i`` is the
    integer ``i - W``, so the identity has id ``W``.
    """

    is_local = True
    abelian = True

    def __init__(self, window: int, arity_cap: int = ARITY_CAP):
        if window < 0:
            raise InvalidSpec("window must be non-negative")
        if arity_cap != ARITY_CAP:
            raise InvalidSpec(f"arity cap is fixed at {ARITY_CAP}")
        self.window = int(window)
        self.arity_cap = arity_cap
        self.order = 2 * self.window + 1
        self.identity = self.window
        self.inv = np.arange(self.order - 1, -1, -1, dtype=np.int64)
        self.inv.flags.writeable = False
        self.generators = (self.window + 1,) if self.window else ()
        self.spec = {"kind": "local", "params": {"W": self.window}}
        self.key = _canonical(self.spec)

    def __repr__(self) -> str:
        return f"LocalGroup(W={self.window})"

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalGroup) and other.window == self.window

    def __hash__(self) -> int:
        return hash(self.key)

    def value(self, i: int) -> int:
        return int(i) - self.window

    def id_of(self, value: int) -> int:
        if not -self.window <= value <= self.window:
            raise InvalidSpec(f"{value} lies outside the window [-{self.window}, {self.window}]")
        return int(value) + self.window

    def mul(self, a: int, b: int) -> int:
        v = (a - self.window) + (b - self.window)
        if not -self.window <= v <= self.window:
            raise LocalOverflow("window-exit", 2, v)
        return v + self.window

    def mul_outer(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        vals = (np.asarray(xs, dtype=np.int64) - self.window)[:, None] + (
            np.asarray(ys, dtype=np.int64) - self.window
        )[None, :]
        if vals.size:
            lo, hi = int(vals.min()), int(vals.max())
            if lo < -self.window or hi > self.window:
                raise LocalOverflow("window-exit", 2, lo if lo < -self.window else hi)
        return vals + self.window

    def label(self, i: int) -> str:
        return str(self.value(i))

    def resolve(self, ref: Any) -> int:
        if isinstance(ref, str):
            try:
                ref = int(ref)
            except ValueError:
                raise InvalidSpec(f"bad element reference {ref!r}") from None
        if isinstance(ref, bool) or not isinstance(ref, (int, np.integer)):
            raise InvalidSpec(f"bad element reference {ref!r}")
        return self.id_of(int(ref))


def local_product(L: LocalGroup, elems: Sequence[int]) -> int:
    """Product (sum) of integers in the local group ``L``.

    Raises :class:`UndefinedProduct` with the violating prefix when the list
    is longer than the arity cap or a prefix sum leaves the window.
    """
    if not elems:
        raise ValueError("elems must be nonempty")
    if len(elems) > L.arity_cap:
        raise UndefinedProduct("arity", len(elems))
    total = 0
    for k, e in enumerate(elems):
        if not -L.window <= e <= L.window:
            raise UndefinedProduct("window-exit", k, e)
        total += e
        if not -L.window <= total <= L.window:
            raise UndefinedProduct("window-exit", k, total)
    return total


# -- builders -----------------------------------------------------------------


def cyclic(n: int) -> GroupTable:
    _check_order(n)
    a = np.arange(n)
    table = (a[:, None] + a[None, :]) % n
    inv = (-a) % n
    return GroupTable(
        table, inv, labels=[str(k) for k in range(n)], generators=[1 % n],
        spec={"kind": "cyclic", "params": {"n": n}}, abelian=True,
    )


def dihedral(n: int) -> GroupTable:
    """Dihedral group of order 2n; id ``f*n + k`` is ``s^f r^k``."""
    if n < 1:
        raise InvalidSpec("dihedral(n) needs n >= 1")
    _check_order(2 * n)
    f = np.repeat([0, 1], n)
    k = np.tile(np.arange(n), 2)
    # s^f1 r^k1 s^f2 r^k2 = s^(f1+f2) r^((-1)^f2 k1 + k2)
    sign = np.where(f == 1, -1, 1)
    f12 = (f[:, None] + f[None, :]) % 2
    k12 = (sign[None, :] * k[:, None] + k[None, :]) % n
    table = f12 * n + k12
    inv = np.where(f == 1, np.arange(2 * n), (-k) % n)
    labels = []
    for fi, ki in zip(f, k):
        rk = "" if ki == 0 else ("r" if ki == 1 else f"r^{ki}")
        labels.append(("s" + rk) if fi else (rk or "e"))
    gens = [1 % n, n] if n > 1 else [n]
    return GroupTable(table, inv, labels=labels, generators=gens,
                      spec={"kind": "dihedral", "params": {"n": n}})


def heisenberg(p: int) -> GroupTable:
    """Upper unitriangular 3x3 matrices mod p; id ``a*p^2 + b*p + c`` is
    the matrix with a, b on the superdiagonal and c in the corner."""
    if p < 2:
        raise InvalidSpec("heisenberg(p) needs p >= 2")
    _check_order(p ** 3)
    ids = np.arange(p ** 3)
    a, b, c = ids // (p * p), (ids // p) % p, ids % p
    # (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a b')
    pa = (a[:, None] + a[None, :]) % p
    pb = (b[:, None] + b[None, :]) % p
    pc = (c[:, None] + c[None, :] + a[:, None] * b[None, :]) % p
    table = (pa * p + pb) * p + pc
    ia, ib, ic = (-a) % p, (-b) % p, (a * b - c) % p
    inv = (ia * p + ib) * p + ic
    labels = [f"({x},{y},{z})" for x, y, z in zip(a, b, c)]
    return GroupTable(table, inv, labels=labels, generators=[p * p, p],
                      spec={"kind": "heisenberg", "params": {"p": p}})


def symmetric(n: int) -> GroupTable:
    """Symmetric group on ``0..n-1``; permutations in lexicographic order,
    composed as functions: ``(s*t)(i) = s(t(i))``."""
    if not 1 <= n <= 6:
        raise InvalidSpec("symmetric(n) supports 1 <= n <= 6")
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    weights = n ** np.arange(n - 1, -1, -1)
    codes = perms @ weights  # increasing, since lexicographic order
    comp = perms[:, perms]  # comp[a, b, i] = perms[a, perms[b, i]]
    table = np.searchsorted(codes, comp @ weights)
    inv_perm = np.argsort(perms, axis=1)
    inv = np.searchsorted(codes, inv_perm @ weights)
    labels = ["(" + ",".join(map(str, q)) + ")" for q in perms]
    gens = []
    if n > 1:
        swap = list(range(n))
        swap[0], swap[1] = 1, 0
        cycle = list(range(1, n)) + [0]
        gens = sorted({int(np.searchsorted(codes, np.dot(swap, weights))),
                       int(np.searchsorted(codes, np.dot(cycle, weights)))})
    return GroupTable(table, inv, labels=labels, generators=gens,
                      spec={"kind": "symmetric", "params": {"n": n}})


def direct_product(G: GroupTable, H: GroupTable) -> GroupTable:
    """G x H with id ``g*|H| + h``."""
    n, m = G.order, H.order
    _check_order(n * m)
    gt = G.table.astype(np.int64)
    ht = H.table.astype(np.int64)
    table = (gt[:, None, :, None] * m + ht[None, :, None, :]).reshape(n * m, n * m)
    inv = (G.inv[:, None] * m + H.inv[None, :]).reshape(-1)
    labels = [f"({G.labels[g]},{H.labels[h]})" for g in range(n) for h in range(m)]
    gens = [g * m for g in G.generators] + list(H.generators)
    spec = {"kind": "product", "params": {"factors": [G.spec, H.spec]}}
    return GroupTable(table, inv, labels=labels, generators=gens, spec=spec,
                      abelian=G.abelian and H.abelian)


def _check_order(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise InvalidSpec(f"bad group parameter {n!r}")
    if n > MAX_ORDER:
        raise InvalidSpec(f"group order {n} exceeds the table cap {MAX_ORDER}")


_CALL = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$")


def parse_spec_string(text: str) -> dict:
    """Parse the short form ``cyclic(6)``, ``product(cyclic(4), cyclic(3))``."""
    m = _CALL.match(text)
    if not m:
        raise InvalidSpec(f"malformed group spec {text!r}")
    kind, inner = m.group(1), m.group(2)
    if kind in ("product", "direct_product"):
        parts, depth, cur = [], 0, ""
        for ch in inner:
            if ch == "," and depth == 0:
                parts.append(cur)
                cur = ""
                continue
            depth += ch == "("
            depth -= ch == ")"
            cur += ch
        parts.append(cur)
        return {"kind": "product", "params": {"factors": [parse_spec_string(p) for p in parts]}}
    param = {"cyclic": "n", "dihedral": "n", "heisenberg": "p", "symmetric": "n", "local": "W"}
    if kind not in param:
        raise InvalidSpec(f"unknown group kind {kind!r}")
    try:
        value = int(inner)
    except ValueError:
        raise InvalidSpec(f"malformed group spec {text!r}") from None
    return {"kind": kind, "params": {param[kind]: value}}


def build_group(spec: dict | str) -> GroupTable | LocalGroup:
    """Build a universe from its JSON description
    ``{"kind": ..., "params": {...}}`` (or the short string form)."""
    if isinstance(spec, str):
        spec = parse_spec_string(spec)
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidSpec(f"malformed group spec {spec!r}")
    kind = spec["kind"]
    params = spec.get("params", {})
    if not isinstance(params, dict):
        raise InvalidSpec("group params must be an object")
    try:
        if kind == "cyclic":
            return cyclic(_int_param(params, "n"))
        if kind == "dihedral":
            return dihedral(_int_param(params, "n"))
        if kind == "heisenberg":
            return heisenberg(_int_param(params, "p"))
        if kind == "symmetric":
            return symmetric(_int_param(params, "n"))
        if kind == "local":
            return LocalGroup(_int_param(params, "W"))
        if kind == "product":
            factors = params.get("factors")
            if not isinstance(factors, list) or len(factors) < 2:
                raise InvalidSpec("product needs a list of at least two factors")
            built = [build_group(f) for f in factors]
            if any(isinstance(b, LocalGroup) for b in built):
                raise InvalidSpec("local groups cannot be factors of a product")
            total = math.prod(b.order for b in built)
            _check_order(total)
            G = built[0]
            for H in built[1:]:
                G = direct_product(G, H)
            return G
    except KeyError as e:
        raise InvalidSpec(f"missing parameter {e}") from None
    raise InvalidSpec(f"unknown group kind {kind!r}")


def _int_param(params: dict, name: str) -> int:
    v = params[name]
    if isinstance(v, bool) or not isinstance(v, int):
        raise InvalidSpec(f"parameter {name} must be an integer")
    return v


def elements_of(universe, refs: Iterable[Any]) -> list[int]:
    """Resolve references to ids. Cyclic groups read integers modulo n,
    products also accept per-factor lists such as ``[3, 1]``."""
    out = []
    for r in refs:
        out.append(resolve_element(universe, r))
    return out


def resolve_element(universe, ref: Any) -> int:
    spec = universe.spec
    if isinstance(ref, list):
        if spec["kind"] != "product":
            raise InvalidSpec(f"list reference {ref!r} needs a product group")
        factors = [build_group(f) for f in _flatten_factors(spec)]
        if len(ref) != len(factors):
            raise InvalidSpec(f"reference {ref!r} has the wrong number of components")
        idx = 0
        for F, r in zip(factors, ref):
            idx = idx * F.order + resolve_element(F, r)
        return idx
    if spec["kind"] == "cyclic" and isinstance(ref, (int, np.integer)) and not isinstance(ref, bool):
        return int(ref) % universe.order
    return universe.resolve(ref)


def _flatten_factors(spec: dict) -> list[dict]:
    # products are built left-associated; flatten nested left factors
    if spec["kind"] != "product":
        return [spec]
    out = []
    for f in spec["params"]["factors"]:
        out.extend(_flatten_factors(f) if f["kind"] == "product" else [f])
    return out
