"""Instance files: a group spec plus a set spec for A, as canonical JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import InvalidInstance, InvalidSpec
from .groups import LocalGroup, build_group, elements_of, parse_spec_string
from .rng import XorShift64Star
from .sets import GroupSet, generated, power

SCHEMA_VERSION = 1
SET_KINDS = ("elements", "interval", "coset_union", "random_symmetric", "ball")


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


@dataclass
class Instance:
    group: dict
    set: dict
    seed: int | None = None
    schema_version: int = SCHEMA_VERSION
    _built: tuple | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        d = {"schema_version": self.schema_version, "group": self.group, "set": self.set}
        if self.seed is not None:
            d["seed"] = self.seed
        return d

    def dumps(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_dict(cls, d: Any) -> "Instance":
        if not isinstance(d, dict):
            raise InvalidInstance("instance must be a JSON object")
        if d.get("schema_version") != SCHEMA_VERSION:
            raise InvalidInstance(f"unsupported schema_version {d.get('schema_version')!r}")
        unknown = set(d) - {"schema_version", "group", "set", "seed"}
        if unknown:
            raise InvalidInstance(f"unknown instance fields {sorted(unknown)}")
        group = d.get("group")
        if isinstance(group, str):
            group = parse_spec_string(group)
        if not isinstance(group, dict) or not isinstance(d.get("set"), dict):
            raise InvalidInstance("instance needs group and set objects")
        seed = d.get("seed")
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
            raise InvalidInstance("seed must be an integer")
        return cls(group=group, set=d["set"], seed=seed)

    @classmethod
    def loads(cls, text: str) -> "Instance":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise InvalidInstance(f"instance is not valid JSON: {e}") from None

    @classmethod
    def load(cls, path: str | Path) -> "Instance":
        return cls.loads(Path(path).read_text())

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    def build(self):
        """Return ``(universe, A)``; raises InvalidInstance on bad or empty specs."""
        if self._built is None:
            try:
                U = build_group(self.group)
                A = build_set(U, self.set)
            except InvalidInstance:
                raise
            except InvalidSpec as e:
                raise InvalidInstance(str(e)) from None
            if not len(A):
                raise InvalidInstance("the set A is empty")
            self._built = (U, A)
        return self._built


def build_set(U, spec: dict) -> GroupSet:
    if len(spec) != 1 or next(iter(spec)) not in SET_KINDS:
        raise InvalidInstance(f"set spec needs exactly one of {SET_KINDS}")
    kind, body = next(iter(spec.items()))
    if kind == "elements":
        if not isinstance(body, list):
            raise InvalidInstance("elements must be a list")
        return GroupSet.from_ids(U, _refs(U, body))
    if kind == "interval":
        lo, hi = _int(body, "lo"), _int(body, "hi")
        if lo > hi:
            raise InvalidInstance("interval needs lo <= hi")
        if isinstance(U, LocalGroup):
            return GroupSet.from_ids(U, [U.id_of(v) for v in range(lo, hi + 1)])
        if U.spec["kind"] != "cyclic":
            raise InvalidInstance("intervals are only defined in cyclic and local groups")
        if hi - lo + 1 > U.order:
            raise InvalidInstance("interval longer than the group")
        return GroupSet.from_ids(U, [v % U.order for v in range(lo, hi + 1)])
    if isinstance(U, LocalGroup):
        raise InvalidInstance(f"set kind {kind!r} is not available in a local window")
    if kind == "coset_union":
        gens = _refs(U, _list(body, "subgroup_generators"))
        reps = _refs(U, _list(body, "coset_reps"))
        if not reps:
            raise InvalidInstance("coset_union needs at least one representative")
        H = _subgroup(U, gens)
        A = GroupSet.empty(U)
        for r in reps:
            A = A | GroupSet.from_ids(U, U.table[r, H.ids])
        return A
    if kind == "random_symmetric":
        return random_symmetric(U, _int(body, "size"), _int(body, "seed"))
    # ball
    r = _int(body, "radius")
    if r < 0:
        raise InvalidInstance("radius must be nonnegative")
    gens = _refs(U, body["generators"]) if "generators" in body else list(U.generators)
    S = _symmetric_hull(U, gens)
    return S if r <= 1 else power(S, r).with_arity(1)


def random_symmetric(U, size: int, seed: int) -> GroupSet:
    """Symmetric set with 1 of the given size, built from a seeded shuffle.

    Elements are visited in shuffled order and added together with their
    inverses while that fits, so the size is exact unless only inverse pairs
    remain when one slot is left.
    """
    if not 1 <= size <= U.order:
        raise InvalidInstance(f"size must lie in 1..{U.order}")
    rng = XorShift64Star(seed)
    order = rng.shuffle(list(range(1, U.order)))
    chosen = {U.identity}
    for g in order:
        if len(chosen) >= size:
            break
        if g in chosen:
            continue
        pair = {g, int(U.inv[g])}
        if len(chosen) + len(pair) <= size:
            chosen |= pair
    return GroupSet.from_ids(U, sorted(chosen))


def _symmetric_hull(U, gens) -> GroupSet:
    ids = {U.identity}
    for g in gens:
        ids |= {g, int(U.inv[g])}
    return GroupSet.from_ids(U, sorted(ids))


def _subgroup(U, gens) -> GroupSet:
    H, _ = generated(_symmetric_hull(U, gens))
    return H


def _refs(U, refs) -> list[int]:
    if isinstance(U, LocalGroup):
        return [U.id_of(_as_int(v)) for v in refs]
    return elements_of(U, refs)


def _as_int(v) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise InvalidInstance(f"expected an integer, got {v!r}")
    return v


def _int(body, name: str) -> int:
    if not isinstance(body, dict) or name not in body:
        raise InvalidInstance(f"set spec is missing {name!r}")
    return _as_int(body[name])


def _list(body, name: str) -> list:
    if not isinstance(body, dict) or not isinstance(body.get(name), list):
        raise InvalidInstance(f"set spec needs a list {name!r}")
    return body[name]


__all__ = ["Instance", "build_set", "canonical_json", "random_symmetric", "SCHEMA_VERSION"]
