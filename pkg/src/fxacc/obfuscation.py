"""Obfuscation schemes: per-location offsets, variable bindings, label
snapshots, and the RALPH register abstraction."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Union

from .words import M32


@dataclass(frozen=True, order=True)
class RegLoc:
    index: int


@dataclass(frozen=True, order=True)
class StripeLoc:
    """One offset class of an aggregate: every word of the class shares it."""

    storage: int
    cls: int


@dataclass(frozen=True, order=True)
class StackLoc:
    slot: int


Loc = Union[RegLoc, StripeLoc, StackLoc]


class OffsetSource:
    """Seeded stream of 32-bit offsets and coin flips.  Deterministic per seed."""

    def __init__(self, seed: int):
        self.seed = seed
        self._rng = random.Random(seed)
        self.draws = 0

    def fresh(self) -> int:
        self.draws += 1
        return self._rng.getrandbits(32)

    def coin(self) -> int:
        self.draws += 1
        return self._rng.getrandbits(1)

    def word(self) -> int:
        """A uniformly random word, for constants that carry no offset."""
        self.draws += 1
        return self._rng.getrandbits(32)


def fresh_offset(rng: OffsetSource) -> int:
    return rng.fresh()


class OffsetDB:
    """The obfuscation scheme D: Loc -> 32-bit offset."""

    __slots__ = ("_d",)

    def __init__(self, entries: dict | None = None):
        self._d: dict = dict(entries or {})

    def __getitem__(self, loc: Loc) -> int:
        return self._d[loc]

    def __setitem__(self, loc: Loc, delta: int) -> None:
        self._d[loc] = delta & M32

    def __contains__(self, loc: Loc) -> bool:
        return loc in self._d

    def __eq__(self, other) -> bool:
        return isinstance(other, OffsetDB) and self._d == other._d

    def __len__(self) -> int:
        return len(self._d)

    def get(self, loc: Loc, default=None):
        return self._d.get(loc, default)

    def items(self):
        return self._d.items()

    def copy(self) -> "OffsetDB":
        return OffsetDB(self._d)

    def restrict(self, domain: Iterable[Loc]) -> dict:
        return {loc: self._d[loc] for loc in domain if loc in self._d}

    def agrees_with(self, scheme: dict) -> bool:
        return all(self._d.get(loc) == delta for loc, delta in scheme.items())

    def __repr__(self) -> str:
        return f"OffsetDB({len(self._d)} entries)"


@dataclass
class VarBinding:
    """L: Var -> Loc, kept as a scope stack; inner scopes shadow outer ones."""

    scopes: list = field(default_factory=lambda: [{}])

    def push(self) -> None:
        self.scopes.append({})

    def pop(self) -> dict:
        return self.scopes.pop()

    def bind(self, var, binding) -> None:
        self.scopes[-1][var] = binding

    def lookup(self, var):
        for scope in reversed(self.scopes):
            if var in scope:
                return scope[var]
        raise KeyError(var)

    def in_scope(self) -> list:
        """Bindings currently visible, outermost declaration first."""
        seen: dict = {}
        for scope in self.scopes:
            seen.update(scope)
        return list(seen.values())


@dataclass(frozen=True)
class SchemeSnapshot:
    label: str
    offsets: dict  # Loc -> offset, in declaration order


class SnapshotError(Exception):
    pass


def snapshot(label: str, db: OffsetDB, domain: Iterable[Loc]) -> SchemeSnapshot:
    offsets = {}
    for loc in domain:
        if loc not in db:
            raise SnapshotError(f"{label}: location {loc} has no offset")
        offsets[loc] = db[loc]
    return SchemeSnapshot(label, offsets)


def restore_plan(snap: SchemeSnapshot, db: OffsetDB) -> list[tuple[Loc, int]]:
    """(loc, k) corrections, declaration order, one per drifted location."""
    plan = []
    for loc, want in snap.offsets.items():
        if loc not in db:
            raise SnapshotError(f"{snap.label}: {loc} is no longer bound")
        have = db[loc]
        if have != want:
            plan.append((loc, (want - have) & M32))
    return plan


def restore_code(
    snap: SchemeSnapshot,
    db: OffsetDB,
    emit_reg: Callable[[int, int], list],
    emit_stripe: Callable[[StripeLoc, int], list] | None = None,
) -> tuple[list, OffsetDB]:
    """Code moving ``db`` back onto ``snap``; returns (code, updated db).

    ``emit_reg(reg, k)`` builds ``addi reg, reg, E[k]``; stripes need
    ``emit_stripe`` since re-basing one touches every slot of the stripe.
    """
    code: list = []
    out = db.copy()
    for loc, k in restore_plan(snap, db):
        if isinstance(loc, RegLoc):
            code += emit_reg(loc.index, k)
        elif emit_stripe is not None:
            code += emit_stripe(loc, k)
        else:
            raise SnapshotError(f"no emitter for {loc}")
        out[loc] = snap.offsets[loc]
    return code, out


GPR_COUNT = 32
SPR_COUNT = 65536


class Ralph:
    """Register Abstraction Layer for Physical Hardware.

    Hands out successor temporaries r, r^s, r^ss, ...  Indices past the GPRs
    alias the special-purpose registers; past ``bound`` a register is backed
    by a stack slot instead.
    """

    def __init__(self, bound: int = GPR_COUNT + SPR_COUNT):
        self.bound = bound
        self.high_water = 0

    def resolve(self, index: int) -> RegLoc | StackLoc:
        if index < self.bound:
            return RegLoc(index)
        return StackLoc(index - self.bound)

    def alloc(self, current: int, width: int = 1) -> RegLoc | StackLoc:
        nxt = current + width
        self.high_water = max(self.high_water, nxt + width - 1)
        return self.resolve(nxt)

    def is_spr(self, index: int) -> bool:
        return GPR_COUNT <= index < self.bound


def ralph_alloc(current: int, ralph: Ralph | None = None) -> RegLoc | StackLoc:
    return (ralph or Ralph()).alloc(current)
