"""The FxA processor: executes sealed object code on ciphertexts.

The machine holds a :class:`CipherOps` capability and nothing else from the
key context, so it can combine ciphertexts but never read a plaintext.  The
only plain values it ever sees are branch outcomes and code addresses, plus
the opaque handles that name memory words.
"""

from __future__ import annotations

import base64
from dataclasses import dataclass, field

from .cipher import AddrHandle, CipherOps, CipherPair, Ciphertext, IntegrityError, parse_sealed
from .isa import OPCODES, RA, ObjectCode
from .words import DivideTrap

STEP_BUDGET = 10_000_000


class Fault(Exception):
    pass


@dataclass
class TraceEntry:
    step: int
    pc: int
    op: str
    regs: tuple
    consts: tuple
    target: int | None
    taken: bool | None = None
    slot: int | None = None
    handle: int | None = None
    reads: tuple = ()  # register values before the step
    writes: tuple = ()  # register values written


@dataclass
class RunResult:
    status: str  # ok, trap, fault, nontermination
    outputs: list = field(default_factory=list)  # [(site, sealed)]
    message: str = ""
    steps: int = 0
    trace: list | None = None
    state: "MachineState | None" = None


class TLB:
    """Address handle -> physical slot.

    Slots are handed out in first-touch order and every store takes a fresh
    one, so the slot sequence says nothing about which addresses coincide
    beyond what the program's own reads reveal.
    """

    def __init__(self):
        self.map: dict[int, int] = {}
        self.memory: dict[int, object] = {}
        self.next_slot = 0

    def write(self, handle: AddrHandle, value) -> int:
        slot = self.next_slot
        self.next_slot += 1
        self.map[handle.handle] = slot
        self.memory[slot] = value
        return slot

    def read(self, handle: AddrHandle):
        slot = self.map.get(handle.handle)
        if slot is None:
            raise Fault("read of unmapped address")
        return slot, self.memory[slot]


class MachineState:
    def __init__(self):
        self.regs: dict[int, object] = {}
        self.pc = 0
        self.tlb = TLB()

    def get(self, r: int, width: int = 1):
        try:
            if width == 2:
                return CipherPair(self.regs[r], self.regs[r + 1])
            return self.regs[r]
        except KeyError:
            raise Fault(f"read of uninitialized register r{r}") from None

    def set(self, r: int, value) -> None:
        if isinstance(value, CipherPair):
            self.regs[r] = value.hi
            self.regs[r + 1] = value.lo
        else:
            self.regs[r] = value


class VM:
    def __init__(self, obj: ObjectCode, ops: CipherOps, budget: int = STEP_BUDGET):
        self.obj = obj
        self.ops = ops
        self.budget = budget

    def run(self, inputs: dict | None = None, trace: bool = False) -> RunResult:
        """Execute from the entry point.  ``inputs`` maps registers to sealed values."""
        st = MachineState()
        st.pc = self.obj.entry
        for r, v in (inputs or {}).items():
            st.set(r, v)
        code = self.obj.instructions
        n = len(code)
        ops = self.ops
        log: list | None = [] if trace else None
        outputs: list = []
        step = 0
        try:
            while st.pc != n:
                if step >= self.budget:
                    return RunResult("nontermination", outputs, "step budget exhausted", step,
                                     log, st)
                if not 0 <= st.pc < n:
                    raise Fault(f"pc {st.pc} outside program")
                ins = code[st.pc]
                spec = OPCODES[ins.op]
                kind = spec.kind
                regs, ks = ins.regs, ins.consts
                entry = None
                if trace:
                    entry = TraceEntry(step, st.pc, ins.op, regs, ks, ins.target)
                    read_regs, write_regs = _roles(kind, regs, spec)
                    entry.reads = tuple(st.regs.get(r) for r in read_regs)
                nxt = st.pc + 1
                if kind == "alu":
                    st.set(regs[0], ops.alu(ins.op, st.get(regs[1]), st.get(regs[2]), ks[0]))
                elif kind == "addi":
                    st.set(regs[0], ops.offset(st.get(regs[1], spec.regs[1]), ks[0]))
                elif kind == "li":
                    st.set(regs[0], ops.load_const(ks[0]))
                elif kind == "mov":
                    st.set(regs[0], st.get(regs[1], spec.regs[1]))
                elif kind == "fused":
                    a = st.get(regs[1], spec.regs[1])
                    b = st.get(regs[2], spec.regs[2])
                    st.set(regs[0], ops.fused(ins.op, a, b, *ks))
                elif kind == "unary":
                    st.set(regs[0], ops.unary(ins.op, st.get(regs[1], spec.regs[1]), *ks))
                elif kind == "branch":
                    a = st.get(regs[0], spec.regs[0])
                    b = st.get(regs[1], spec.regs[1])
                    taken = ops.branch(spec.rel, spec.flavor, a, b, ks)
                    if taken:
                        nxt = st.pc + ins.target
                    if entry is not None:
                        entry.taken = taken
                elif kind == "b":
                    nxt = st.pc + ins.target
                elif kind == "j":
                    nxt = ins.target
                elif kind == "jal":
                    st.regs[RA] = st.pc + 1
                    nxt = ins.target
                elif kind == "jr":
                    dest = st.get(regs[0])
                    if not isinstance(dest, int):
                        raise Fault("jump through a register not holding a code address")
                    nxt = dest
                elif kind == "lw":
                    h = ops.address(st.get(regs[1]), ks[0])
                    slot, value = st.tlb.read(h)
                    st.set(regs[0], value)
                    if entry is not None:
                        entry.slot, entry.handle = slot, h.handle
                elif kind == "sw":
                    h = ops.address(st.get(regs[1]), ks[0])
                    slot = st.tlb.write(h, st.get(regs[0]))
                    if entry is not None:
                        entry.slot, entry.handle = slot, h.handle
                elif kind == "out":
                    outputs.append((ins.target, st.get(regs[0], spec.regs[0])))
                elif kind != "nop":
                    raise Fault(f"cannot execute {ins.op}")
                if entry is not None:
                    entry.writes = tuple(st.regs.get(r) for r in write_regs)
                    log.append(entry)
                st.pc = nxt
                step += 1
        except DivideTrap:
            return RunResult("trap", outputs, "divide", step, log, st)
        except (Fault, IntegrityError) as exc:
            return RunResult("fault", outputs, str(exc), step, log, st)
        return RunResult("ok", outputs, "", step, log, st)


def _roles(kind: str, regs: tuple, spec) -> tuple[tuple, tuple]:
    words = [tuple(r + j for j in range(w)) for r, w in zip(regs, spec.regs)]
    if kind in ("alu", "addi", "li", "mov", "fused", "unary", "lw"):
        return tuple(x for ws in words[1:] for x in ws), words[0]
    if kind == "jal":
        return (), (RA,)
    return tuple(x for ws in words for x in ws), ()


def run(obj: ObjectCode, ops: CipherOps, inputs: dict | None = None, trace: bool = False,
        budget: int = STEP_BUDGET) -> RunResult:
    return VM(obj, ops, budget).run(inputs, trace)


# -- trace files ------------------------------------------------------------------

TRACE_FIELDS = ("step", "opcode", "regs", "consts", "taken", "slot", "reads", "writes")


def _const_text(c) -> str:
    if isinstance(c, CipherPair):
        return _const_text(c.hi) + ":" + _const_text(c.lo)
    return base64.b64encode(c.payload).decode("ascii")


def _value_text(v) -> str:
    if v is None:
        return "?"
    if isinstance(v, int):
        return f"pc{v}"  # return addresses are plain
    return v.serialize()


def _ints(xs) -> str:
    return ",".join(str(x) for x in xs)


def trace_line(e: TraceEntry) -> str:
    taken = "-" if e.taken is None else str(int(e.taken))
    slot = "-" if e.slot is None else str(e.slot)
    regs = _ints(e.regs)
    if e.target is not None:
        regs = (regs + ";" if regs else "") + f"@{e.target}"
    return "\t".join([
        str(e.step), e.op, regs, ",".join(_const_text(c) for c in e.consts), taken, slot,
        ",".join(_value_text(v) for v in e.reads), ",".join(_value_text(v) for v in e.writes),
    ])


def write_trace(entries, path) -> None:
    with open(path, "w") as fh:
        fh.write("#" + "\t".join(TRACE_FIELDS) + "\n")
        for e in entries:
            fh.write(trace_line(e) + "\n")


def read_trace(path) -> list[dict]:
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != len(TRACE_FIELDS):
                raise ValueError(f"bad trace line: {line!r}")
            rows.append(dict(zip(TRACE_FIELDS, parts)))
    return rows


__all__ = [
    "Fault", "MachineState", "RunResult", "TLB", "TraceEntry", "VM", "read_trace", "run",
    "trace_line", "write_trace", "Ciphertext", "parse_sealed",
]
