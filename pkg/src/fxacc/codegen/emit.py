"""Symbolic machine code: instructions with plain constants and label targets,
the spill-lowering post-pass, and linking into a sealed ObjectCode."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..cipher import KeyContext, NonceStream, Origin
from ..isa import OPCODES, SCRATCH, Instruction, IoSlot, ObjectCode
from ..obfuscation import Ralph, StackLoc
from ..words import M32, join64

SPILL_BASE = 0x2000_0000


class Label:
    _ids = itertools.count()

    __slots__ = ("id", "name")

    def __init__(self, name: str = "L"):
        self.id = next(Label._ids)
        self.name = name

    def __repr__(self) -> str:
        return f"{self.name}{self.id}"


@dataclass
class SInstr:
    op: str
    regs: tuple = ()
    consts: tuple = ()  # plain values; 64-bit constants as one 64-bit int
    target: object = None  # Label, or an int (relative for branches, absolute for j)

    def __str__(self) -> str:
        parts = [self.op] + [f"r{r}" for r in self.regs]
        if self.target is not None:
            parts.append(f"@{self.target}")
        if self.consts:
            parts.append("[" + ",".join(hex(c) for c in self.consts) + "]")
        return " ".join(parts)


# register operand roles per instruction kind: True = written
_WRITES = {
    "alu": (True, False, False),
    "addi": (True, False),
    "li": (True,),
    "mov": (True, False),
    "fused": (True, False, False),
    "unary": (True, False),
    "branch": (False, False),
    "jr": (False,),
    "lw": (True, False),
    "sw": (False, False),
    "out": (False,),
}


def _word_regs(spec, regs):
    for pos, (r, w) in enumerate(zip(regs, spec.regs)):
        yield pos, r, w


class SpillLowering:
    """Rewrite operands at or beyond the register bound into scratch registers
    backed by static memory slots."""

    def __init__(self, bound: int, rng):
        self.ralph = Ralph(bound)
        self.rng = rng
        self.spilled = 0

    def slot_addr(self, reg: int) -> int:
        loc = self.ralph.resolve(reg)
        assert isinstance(loc, StackLoc)
        return SPILL_BASE + loc.slot

    def is_spilled(self, reg: int, width: int) -> bool:
        return any(isinstance(self.ralph.resolve(reg + j), StackLoc) for j in range(width))

    def move(self, dst: int, src: int, store: bool) -> list:
        """Code moving between a (possibly spilled) register and a scratch one."""
        if not isinstance(self.ralph.resolve(src if not store else dst), StackLoc):
            return [SInstr("mov", (dst, src))]
        d = self.rng.word()
        if store:
            addr_reg = SCRATCH[-1]
            return [
                SInstr("li", (addr_reg,), ((self.slot_addr(dst) + d) & M32,)),
                SInstr("sw", (src, addr_reg), ((-d) & M32,)),
            ]
        return [
            SInstr("li", (dst,), ((self.slot_addr(src) + d) & M32,)),
            SInstr("lw", (dst, dst), ((-d) & M32,)),
        ]

    def lower(self, code: list) -> list:
        out: list = []
        for item in code:
            if not isinstance(item, SInstr):
                out.append(item)
                continue
            spec = OPCODES[item.op]
            roles = _WRITES.get(spec.kind)
            if roles is None or not any(
                self.is_spilled(r, w) for _, r, w in _word_regs(spec, item.regs)
            ):
                out.append(item)
                continue
            mapping: dict[int, int] = {}
            free = list(SCRATCH[:-1])
            regs = list(item.regs)
            before: list = []
            after: list = []
            for pos, r, w in _word_regs(spec, item.regs):
                if not self.is_spilled(r, w):
                    continue
                if r in mapping:
                    regs[pos] = mapping[r]
                    continue
                if len(free) < w:
                    raise RuntimeError("out of scratch registers during spill lowering")
                s = free[0]
                del free[:w]
                for j in range(w):
                    mapping[r + j] = s + j
                regs[pos] = s
            for pos, r, w in _word_regs(spec, item.regs):
                if regs[pos] == r:
                    continue
                s = regs[pos]
                for j in range(w):
                    if roles[pos]:
                        after.append((r + j, s + j))
                    else:
                        before.append((s + j, r + j))
            loaded: set = set()
            for s, r in before:
                if s not in loaded:
                    out += self.move(s, r, store=False)
                    loaded.add(s)
            out.append(SInstr(item.op, tuple(regs), item.consts, item.target))
            stored: set = set()
            for r, s in after:
                if r not in stored:
                    out += self.move(r, s, store=True)
                    stored.add(r)
            self.spilled += 1
        return out


def resolve_labels(code: list) -> list:
    """Replace Label targets with displacements (branches) or absolute pcs."""
    pos: dict[int, int] = {}
    pc = 0
    for item in code:
        if isinstance(item, Label):
            pos[item.id] = pc
        else:
            pc += 1
    out = []
    for item in code:
        if isinstance(item, Label):
            continue
        t = item.target
        if isinstance(t, Label):
            dest = pos[t.id]
            kind = OPCODES[item.op].kind
            t = dest - len(out) if kind in ("branch", "b") else dest
            item = SInstr(item.op, item.regs, item.consts, t)
        out.append(item)
    return out


def seal(code: list, ctx: KeyContext, seed: int, io: tuple = ()) -> ObjectCode:
    nonces = NonceStream(seed)
    out = []
    for ins in code:
        spec = OPCODES[ins.op]
        consts = tuple(
            ctx.seal(c, w, Origin.CONSTANT, nonces) for c, w in zip(ins.consts, spec.consts)
        )
        out.append(Instruction(ins.op, tuple(ins.regs), consts, ins.target))
    return ObjectCode(tuple(out), 0, tuple(io))


def k64(delta) -> int:
    """A 64-bit constant from an offset pair."""
    hi, lo = delta
    return join64(hi, lo)


__all__ = ["Label", "SInstr", "SpillLowering", "resolve_labels", "seal", "k64", "IoSlot"]
