"""FxA instruction records and the FXA1 object-file format."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from .cipher import CipherPair, Ciphertext, Origin, parse_sealed

NUM_GPRS = 32
SP = 1  # stack pointer (encrypted, offset tracked like any location)
RA = 9  # return-address register; holds a plain program count
SCRATCH = tuple(range(2, 9))  # reserved for spill lowering
FIRST_ALLOCATABLE = 10


class FormatError(ValueError):
    """Malformed or inconsistent object stream."""


@dataclass(frozen=True)
class OpSpec:
    name: str
    kind: str
    regs: tuple[int, ...]  # word width of each register operand
    consts: tuple[int, ...]  # word width of each constant
    target: bool = False
    rel: str | None = None
    flavor: str | None = None

    @property
    def writes_reg(self) -> bool:
        return self.kind in ("alu", "addi", "li", "mov", "fused", "unary", "lw")


def _table() -> dict[str, OpSpec]:
    t: dict[str, OpSpec] = {}

    def add(*a, **kw):
        spec = OpSpec(*a, **kw)
        t[spec.name] = spec

    add("add", "alu", (1, 1, 1), (1,))
    add("sub", "alu", (1, 1, 1), (1,))
    add("addi", "addi", (1, 1), (1,))
    add("add2", "addi", (2, 2), (2,))
    add("li", "li", (1,), (1,))
    add("li2", "li", (2,), (2,))
    add("mov", "mov", (1, 1), ())
    add("mov2", "mov", (2, 2), ())
    for op in ("mul", "div", "divu", "rem", "remu", "and", "or", "xor", "shl", "shr", "sra",
               "seq", "addf", "subf", "mulf", "divf"):
        add(op, "fused", (1, 1, 1), (1, 1, 1))
    for op in ("add_ll", "sub_ll", "mul_ll", "div_ll", "divu_ll", "rem_ll", "remu_ll",
               "and_ll", "or_ll", "xor_ll", "add_d", "sub_d", "mul_d", "div_d"):
        add(op, "fused", (2, 2, 2), (2, 2, 2))
    for op in ("shl_ll", "shr_ll", "sra_ll"):
        add(op, "fused", (2, 2, 1), (2, 2, 1))
    from .words import UNOPS

    for op, (win, wout, _) in UNOPS.items():
        add(op, "unary", (wout, win), (wout, win))
    # conditional branches: relative target, last constant is the polarity word
    add("beq", "branch", (1, 1), (1, 1), True, "eq", "s")
    add("bne", "branch", (1, 1), (1, 1), True, "ne", "s")
    for rel in ("lt", "gt", "le", "ge"):
        add("b" + rel, "branch", (1, 1), (1, 1, 1), True, rel, "s")
        add("b" + rel + "u", "branch", (1, 1), (1, 1, 1), True, rel, "u")
        add("b" + rel + "lu", "branch", (2, 2), (2, 2, 1), True, rel, "q")
    for rel in ("eq", "ne", "lt", "gt", "le", "ge"):
        add("b" + rel + "f", "branch", (1, 1), (1, 1, 1), True, rel, "f")
        add("b" + rel + "d", "branch", (2, 2), (2, 2, 1), True, rel, "d")
        add("b" + rel + "l", "branch", (2, 2), (2, 2, 1), True, rel, "l")
    add("b", "b", (), (), True)
    add("j", "j", (), (), True)
    add("jal", "jal", (), (), True)
    add("jr", "jr", (1,), ())
    add("lw", "lw", (1, 1), (1,))
    add("sw", "sw", (1, 1), (1,))
    add("nop", "nop", (), ())
    add("out", "out", (1,), (), True)
    add("out2", "out", (2,), (), True)
    return t


OPCODES: dict[str, OpSpec] = _table()
OPCODE_NAMES: list[str] = sorted(OPCODES)
OPCODE_INDEX: dict[str, int] = {n: i for i, n in enumerate(OPCODE_NAMES)}


def branch_opcode(rel: str, flavor: str) -> str:
    if flavor == "s":
        return "b" + rel
    if flavor == "u":
        return "b" + rel if rel in ("eq", "ne") else "b" + rel + "u"
    if flavor == "q":
        return "b" + rel + "l" if rel in ("eq", "ne") else "b" + rel + "lu"
    return "b" + rel + {"f": "f", "d": "d", "l": "l"}[flavor]


@dataclass(frozen=True)
class Instruction:
    op: str
    regs: tuple[int, ...] = ()
    consts: tuple = ()
    target: int | None = None

    def __post_init__(self):
        spec = OPCODES.get(self.op)
        if spec is None:
            raise FormatError(f"unknown opcode {self.op!r}")
        if len(self.regs) != len(spec.regs) or len(self.consts) != len(spec.consts):
            raise FormatError(
                f"{self.op}: expected {len(spec.regs)} regs/{len(spec.consts)} consts, "
                f"got {len(self.regs)}/{len(self.consts)}"
            )
        if spec.target != (self.target is not None):
            raise FormatError(f"{self.op}: target field mismatch")
        for c, w in zip(self.consts, spec.consts):
            want = CipherPair if w == 2 else Ciphertext
            if not isinstance(c, want):
                raise FormatError(f"{self.op}: constant width mismatch")
            if c.origin is not Origin.CONSTANT:
                raise FormatError(f"{self.op}: program constants must carry Constant origin")

    @property
    def spec(self) -> OpSpec:
        return OPCODES[self.op]

    def __str__(self) -> str:
        parts = [self.op]
        parts += [f"r{r}" for r in self.regs]
        if self.target is not None:
            parts.append(f"@{self.target}")
        if self.consts:
            parts.append(f"[{len(self.consts)}k]")
        return " ".join(parts)


@dataclass(frozen=True)
class IoSlot:
    """Public I/O layout: where inputs go and which output site is which."""

    direction: str  # "in" or "out"
    name: str
    loc: int  # register index for inputs, output site id for outputs
    ctype: str


@dataclass(frozen=True)
class ObjectCode:
    instructions: tuple[Instruction, ...]
    entry: int = 0
    io: tuple[IoSlot, ...] = field(default_factory=tuple)

    def __post_init__(self):
        n = len(self.instructions)
        if not 0 <= self.entry <= n:
            raise FormatError("entry point out of range")
        for pc, ins in enumerate(self.instructions):
            kind = ins.spec.kind
            if kind in ("branch", "b"):
                dest = pc + ins.target
            elif kind in ("j", "jal"):
                dest = ins.target
            else:
                continue
            if not 0 <= dest <= n:
                raise FormatError(f"pc {pc}: {ins.op} target {dest} outside program (0..{n})")

    @property
    def inputs(self) -> list[IoSlot]:
        return [s for s in self.io if s.direction == "in"]

    @property
    def outputs(self) -> list[IoSlot]:
        return [s for s in self.io if s.direction == "out"]


# ---------------------------------------------------------------------------
# FXA1 object stream:
#   "FXA1" | version u8 | count u32 | entry u32 | records... | io section
#   record := len u16 | opcode u16 | nregs u8 | regs u32* | nconsts u8 |
#             (len u16 | ascii)* | has_target u8 | target i32
MAGIC = b"FXA1"
VERSION = 1


def _pack_str(s: str) -> bytes:
    b = s.encode("utf-8")
    return struct.pack(">H", len(b)) + b


def _encode_instruction(ins: Instruction) -> bytes:
    body = bytearray(struct.pack(">HB", OPCODE_INDEX[ins.op], len(ins.regs)))
    for r in ins.regs:
        body += struct.pack(">I", r)
    body += struct.pack(">B", len(ins.consts))
    for c in ins.consts:
        body += _pack_str(c.serialize())
    body += struct.pack(">Bi", ins.target is not None, ins.target or 0)
    return struct.pack(">H", len(body)) + bytes(body)


def encode_object(o: ObjectCode) -> bytes:
    out = bytearray(MAGIC)
    out += struct.pack(">BII", VERSION, len(o.instructions), o.entry)
    for ins in o.instructions:
        out += _encode_instruction(ins)
    out += struct.pack(">I", len(o.io))
    for s in o.io:
        out += _pack_str(s.direction) + _pack_str(s.name) + struct.pack(">I", s.loc) + _pack_str(s.ctype)
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise FormatError("truncated object stream")
        vals = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return vals

    def string(self) -> str:
        (n,) = self.take(">H")
        if self.pos + n > len(self.data):
            raise FormatError("truncated object stream")
        s = self.data[self.pos : self.pos + n]
        self.pos += n
        try:
            return s.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError("bad string in object stream") from exc


def decode_object(data: bytes) -> ObjectCode:
    r = _Reader(data)
    if data[:4] != MAGIC:
        raise FormatError("bad magic")
    r.pos = 4
    version, count, entry = r.take(">BII")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    instructions = []
    for _ in range(count):
        (length,) = r.take(">H")
        end = r.pos + length
        op_index, nregs = r.take(">HB")
        if op_index >= len(OPCODE_NAMES):
            raise FormatError(f"unknown opcode index {op_index}")
        regs = tuple(r.take(">I")[0] for _ in range(nregs))
        (nconsts,) = r.take(">B")
        try:
            consts = tuple(parse_sealed(r.string()) for _ in range(nconsts))
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
        has_target, target = r.take(">Bi")
        if r.pos != end:
            raise FormatError("record length mismatch")
        instructions.append(
            Instruction(OPCODE_NAMES[op_index], regs, consts, target if has_target else None)
        )
    (nio,) = r.take(">I")
    io = []
    for _ in range(nio):
        direction = r.string()
        name = r.string()
        (loc,) = r.take(">I")
        io.append(IoSlot(direction, name, loc, r.string()))
    if r.pos != len(data):
        raise FormatError("trailing bytes after object")
    return ObjectCode(tuple(instructions), entry, tuple(io))
