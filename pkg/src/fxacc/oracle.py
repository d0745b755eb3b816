"""Plaintext reference interpreter for type-checked programs.

Independent of the cipher, the compiler and the seed: this is the nominal
semantics every compiled run is compared against.  Integers are Python ints
kept in their type's range, ``float`` is ``numpy.float32`` and ``double`` is
``numpy.float64``.  Aggregates live in word stores laid out exactly as the
compiler lays them out, so union punning agrees.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .frontend import syntax as A
from .frontend.srctypes import (
    Array, Basic, Pointer, Record, SrcType, VoidType, size_words,
)
from .frontend.typecheck import FuncSym, TypedProgram, VarSym

STEP_LIMIT = 2_000_000


class Trap(Exception):
    def __init__(self, status: str, message: str):
        super().__init__(message)
        self.status = status


@dataclass(frozen=True)
class Output:
    name: str
    ctype: str
    value: object


@dataclass
class OracleResult:
    status: str  # ok, trap, fault, nontermination
    outputs: list = field(default_factory=list)
    message: str = ""


def output_name(e: A.Emit) -> str:
    if e.pos is None:
        return "emit"
    return f"emit@{e.pos[0]}:{e.pos[1]}"


# -- scalar semantics ------------------------------------------------------------


def wrap(v: int, t: Basic) -> int:
    bits = t.info.bits
    if t.name == "bool":
        return int(v != 0)
    v &= (1 << bits) - 1
    if t.info.signed and v >> (bits - 1):
        v -= 1 << bits
    return v


def int_to_f32(x: int) -> np.float32:
    f = np.float32(float(x))
    if not np.isfinite(f):
        return f
    best = None
    for cand in (np.nextafter(f, np.float32(-np.inf)), f, np.nextafter(f, np.float32(np.inf))):
        if not np.isfinite(cand):
            continue
        err = abs(Fraction(float(cand)) - x)
        key = (err, int(np.float32(cand).view(np.uint32)) & 1)
        if best is None or key < best[0]:
            best = (key, cand)
    return np.float32(best[1])


def float_to_int(v, t: Basic) -> int:
    fv = float(v)
    if math.isnan(fv) or math.isinf(fv):
        return 0
    return wrap(int(fv), t)


def convert(v, src: SrcType, dst: SrcType):
    if isinstance(dst, Pointer) or src == dst:
        return v
    di, si = dst.info, src.info
    if dst.name == "bool":
        return int(v != 0)
    if di.is_float:
        if si.is_float:
            return np.float32(v) if di.bits == 32 else np.float64(v)
        return int_to_f32(v) if di.bits == 32 else np.float64(float(v))
    if si.is_float:
        return float_to_int(v, dst)
    return wrap(v, dst)


def word_bits(v, t: SrcType) -> list[int]:
    """Scalar value -> its memory words (hi first for 64-bit)."""
    if isinstance(t, Pointer):
        raise TypeError("pointers are not stored in memory")
    if t.info.is_float:
        if t.info.bits == 32:
            return [int(np.float32(v).view(np.uint32))]
        b = int(np.float64(v).view(np.uint64))
        return [b >> 32, b & 0xFFFFFFFF]
    if t.info.bits == 64:
        b = v & (2**64 - 1)
        return [b >> 32, b & 0xFFFFFFFF]
    return [v & 0xFFFFFFFF]


def from_words(ws: list[int], t: Basic):
    if t.info.is_float:
        if t.info.bits == 32:
            return np.uint32(ws[0]).view(np.float32)
        return np.uint64((ws[0] << 32) | ws[1]).view(np.float64)
    if t.info.bits == 64:
        return wrap((ws[0] << 32) | ws[1], t)
    w = ws[0]
    if t.name in ("int", "long"):
        return wrap(w, t)
    if t.name in ("uint", "ulong"):
        return w
    # sub-word members hold canonical values; reading one as raw int is a cast
    return wrap(w if w < 2**31 else w - 2**32, t)


def output_bits(ctype: str, value) -> int:
    """Comparable bit pattern of an output value."""
    t = Basic(ctype)
    ws = word_bits(value, t)
    return (ws[0] << 32) | ws[1] if len(ws) == 2 else ws[0]


def _arith(op: str, a, b, t: Basic):
    if t.info.is_float:
        with np.errstate(all="ignore"):
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                return a / b
        raise ValueError(op)
    if op in ("/", "%"):
        if b == 0:
            raise Trap("trap", "divide")
        q = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            q = -q
        return wrap(q if op == "/" else a - b * q, t)
    bits = t.info.bits
    if op == "<<":
        return wrap(a << (b % bits), t)
    if op == ">>":
        return wrap(a >> (b % bits), t)
    return wrap(
        {"+": a + b, "-": a - b, "*": a * b, "&": a & b, "|": a | b, "^": a ^ b}[op], t
    )


_COMPARE = {
    "==": lambda a, b: a == b, "!=": lambda a, b: a != b, "<": lambda a, b: a < b,
    ">": lambda a, b: a > b, "<=": lambda a, b: a <= b, ">=": lambda a, b: a >= b,
}


# -- storage ---------------------------------------------------------------------


class Storage:
    __slots__ = ("name", "words", "elem_size")

    def __init__(self, name: str, t: SrcType):
        self.name = name
        self.words = [0] * size_words(t)
        self.elem_size = size_words(t.elem) if isinstance(t, Array) else 1


@dataclass
class Place:
    storage: Storage | None
    offset: int
    ty: SrcType
    frame: "Frame | None" = None
    sym: VarSym | None = None


class Frame:
    __slots__ = ("func", "parent", "vars")

    def __init__(self, func, parent):
        self.func = func
        self.parent = parent
        self.vars: dict = {}


class _Break(Exception):
    pass


class _Continue(Exception):
    pass


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class _Goto(Exception):
    def __init__(self, label):
        self.label = label


class Interpreter:
    def __init__(self, prog: TypedProgram, step_limit: int = STEP_LIMIT):
        self.prog = prog
        self.globals = Frame(None, None)
        self.outputs: list[Output] = []
        self.steps = 0
        self.step_limit = step_limit

    def tick(self):
        self.steps += 1
        if self.steps > self.step_limit:
            raise Trap("nontermination", "step budget exceeded")

    # -- variables ---------------------------------------------------------
    def frame_of(self, sym: VarSym, frame: Frame) -> Frame:
        if sym.kind == "global":
            return self.globals
        f = frame
        while f is not None and f.func is not sym.func:
            f = f.parent
        if f is None:
            raise RuntimeError(f"no activation holds {sym}")
        return f

    def declare(self, sym: VarSym, frame: Frame):
        t = sym.ty
        if isinstance(t, (Array, Record)):
            frame.vars[sym] = Storage(sym.name, t)
        elif isinstance(t, Pointer):
            frame.vars[sym] = None
        else:
            frame.vars[sym] = convert(0, Basic("int"), t)

    # -- places ------------------------------------------------------------
    def place(self, e, frame: Frame) -> Place:
        if isinstance(e, A.Name):
            f = self.frame_of(e.sym, frame)
            v = f.vars[e.sym]
            if isinstance(v, Storage):
                return Place(v, 0, e.sym.ty)
            return Place(None, 0, e.sym.ty, f, e.sym)
        if isinstance(e, A.Index):
            if isinstance(e.base.ty, Pointer):
                storage, idx = self.pointer(self.eval(e.base, frame))
                i = self.eval(e.index, frame)
                return self.element(storage, idx + i, e.base.ty.elem)
            base = self.place(e.base, frame)
            i = self.eval(e.index, frame)
            arr = base.ty
            if not 0 <= i < arr.length:
                raise Trap("fault", f"index {i} out of bounds")
            return Place(base.storage, base.offset + i * size_words(arr.elem), arr.elem)
        if isinstance(e, A.Member):
            if e.arrow:
                storage, idx = self.pointer(self.eval(e.base, frame))
                base = self.element(storage, idx, e.base.ty.elem)
            else:
                base = self.place(e.base, frame)
            rec = base.ty
            return Place(base.storage, base.offset + rec.field_offset(e.field), rec.field_type(e.field))
        if isinstance(e, A.Deref):
            storage, idx = self.pointer(self.eval(e.operand, frame))
            return self.element(storage, idx, e.operand.ty.elem)
        raise TypeError(f"not an lvalue: {type(e).__name__}")

    def pointer(self, p):
        if p is None:
            raise Trap("fault", "use of an unset pointer")
        return p

    def element(self, storage: Storage, idx: int, elem: SrcType) -> Place:
        size = size_words(elem)
        if not 0 <= idx * size < len(storage.words):
            raise Trap("fault", f"pointer access out of bounds in {storage.name}")
        return Place(storage, idx * size, elem)

    def load(self, p: Place, as_type: SrcType):
        if p.storage is None:
            return p.frame.vars[p.sym]
        n = size_words(p.ty) if not isinstance(p.ty, Pointer) else 1
        ws = p.storage.words[p.offset : p.offset + max(n, size_words(as_type))]
        return from_words(ws, as_type)

    def store(self, p: Place, v):
        if p.storage is None:
            p.frame.vars[p.sym] = v
            return
        ws = word_bits(v, p.ty)
        p.storage.words[p.offset : p.offset + len(ws)] = ws

    # -- expressions -------------------------------------------------------
    def eval(self, e, frame: Frame):
        m = getattr(self, "e_" + type(e).__name__)
        return m(e, frame)

    def e_IntLit(self, e, frame):
        return wrap(e.value, e.ty)

    def e_FloatLit(self, e, frame):
        text = e.text.rstrip("fFlL")
        return np.float32(float(text)) if e.single else np.float64(float(text))

    def e_Name(self, e, frame):
        f = self.frame_of(e.sym, frame)
        return f.vars[e.sym]

    def e_Index(self, e, frame):
        return self.load(self.place(e, frame), e.ty)

    e_Member = e_Index
    e_Deref = e_Index

    def e_AddrOf(self, e, frame):
        inner = e.operand
        if isinstance(inner, A.Deref):
            return self.pointer(self.eval(inner.operand, frame))
        if isinstance(inner.base.ty, Pointer):
            storage, idx = self.pointer(self.eval(inner.base, frame))
            return (storage, idx + self.eval(inner.index, frame))
        storage = self.place(inner.base, frame).storage
        return (storage, self.eval(inner.index, frame))

    def e_Unary(self, e, frame):
        v = self.eval(e.operand, frame)
        if e.op == "!":
            return int(v == 0) if not isinstance(v, tuple) else 0
        if e.op == "+":
            return v
        if e.op == "-":
            if e.ty.info.is_float:
                return -v
            return wrap(-v, e.ty)
        return wrap(~v, e.ty)

    def e_Binary(self, e, frame):
        op = e.op
        if op == "&&":
            return int(self.truth(e.left, frame) and self.truth(e.right, frame))
        if op == "||":
            return int(self.truth(e.left, frame) or self.truth(e.right, frame))
        a = self.eval(e.left, frame)
        b = self.eval(e.right, frame)
        if isinstance(e.left.ty, Pointer):
            if op in _COMPARE:
                return int(_COMPARE[op](a[1], b[1]))
            if op == "-" and isinstance(e.right.ty, Pointer):
                return wrap(a[1] - b[1], e.ty)
            return (a[0], a[1] + b if op == "+" else a[1] - b)
        if op in _COMPARE:
            return int(bool(_COMPARE[op](a, b)))
        return _arith(op, a, b, e.ty)

    def truth(self, e, frame) -> bool:
        v = self.eval(e, frame)
        if isinstance(v, tuple):
            return True
        return bool(v != 0)

    def e_Cond(self, e, frame):
        return self.eval(e.then if self.truth(e.test, frame) else e.other, frame)

    def e_Cast(self, e, frame):
        return convert(self.eval(e.operand, frame), e.operand.ty, e.to)

    def e_Assign(self, e, frame):
        p = self.place(e.target, frame)
        v = self.eval(e.value, frame)
        self.store(p, v)
        return v

    def e_IncDec(self, e, frame):
        p = self.place(e.target, frame)
        old = self.load(p, p.ty)
        t = e.ty
        step = 1 if e.op == "++" else -1
        if isinstance(t, Pointer):
            storage, idx = self.pointer(old)
            new = (storage, idx + step)
        elif t.info.is_float:
            new = old + (np.float32(step) if t.info.bits == 32 else np.float64(step))
        elif t.name == "bool":
            new = int(old + step != 0)
        else:
            new = wrap(old + step, t)
        self.store(p, new)
        return new if e.prefix else old

    def e_Call(self, e, frame):
        args = [self.eval(a, frame) for a in e.args]
        return self.call(e.sym, args, frame)

    def call(self, f: FuncSym, args, frame: Frame | None):
        parent = None
        if f.parent is not None:
            parent = frame
            while parent.func is not f.parent:
                parent = parent.parent
        act = Frame(f, parent)
        for p, v in zip(f.params, args):
            act.vars[p] = v
        try:
            self.block(f.defn.body, act)
        except _Return as r:
            return r.value
        if isinstance(f.ret, VoidType):
            return None
        return convert(0, Basic("int"), f.ret) if isinstance(f.ret, Basic) else None

    # -- statements --------------------------------------------------------
    def block(self, b: A.Block, frame: Frame):
        items = b.items
        i = 0
        while i < len(items):
            try:
                self.stmt(items[i], frame)
                i += 1
            except _Goto as g:
                if g.label.block is not b:
                    raise
                i = next(
                    k for k, s in enumerate(items) if isinstance(s, A.Labeled) and s.sym is g.label
                )

    def stmt(self, s, frame: Frame):
        self.tick()
        if isinstance(s, A.VarDecl):
            self.declare(s.sym, frame)
            self.init(s, frame)
        elif isinstance(s, A.ExprStmt):
            self.eval(s.expr, frame)
        elif isinstance(s, A.Emit):
            v = self.eval(s.value, frame)
            self.outputs.append(Output(output_name(s), s.value.ty.name, v))
        elif isinstance(s, A.Block):
            self.block(s, frame)
        elif isinstance(s, A.If):
            if self.truth(s.test, frame):
                self.stmt(s.then, frame)
            elif s.other is not None:
                self.stmt(s.other, frame)
        elif isinstance(s, A.While):
            while self.truth(s.test, frame):
                self.tick()
                try:
                    self.stmt(s.body, frame)
                except _Break:
                    break
                except _Continue:
                    pass
        elif isinstance(s, A.DoWhile):
            while True:
                self.tick()
                try:
                    self.stmt(s.body, frame)
                except _Break:
                    break
                except _Continue:
                    pass
                if not self.truth(s.test, frame):
                    break
        elif isinstance(s, A.For):
            if isinstance(s.init, A.Block):
                for d in s.init.items:
                    self.stmt(d, frame)
            elif s.init is not None:
                self.stmt(s.init, frame)
            while s.test is None or self.truth(s.test, frame):
                self.tick()
                try:
                    self.stmt(s.body, frame)
                except _Break:
                    break
                except _Continue:
                    pass
                if s.step is not None:
                    self.eval(s.step, frame)
        elif isinstance(s, A.Return):
            raise _Return(None if s.value is None else self.eval(s.value, frame))
        elif isinstance(s, A.Break):
            raise _Break()
        elif isinstance(s, A.Continue):
            raise _Continue()
        elif isinstance(s, A.Goto):
            raise _Goto(s.sym)
        elif isinstance(s, A.Labeled):
            self.stmt(s.stmt, frame)
        elif isinstance(s, (A.LabelDecl, A.Empty, A.FuncDef, A.RecordDecl)):
            pass
        else:
            raise TypeError(f"cannot interpret {type(s).__name__}")

    def init(self, d: A.VarDecl, frame: Frame):
        sym = d.sym
        for path, e in d.inits or []:
            v = self.eval(e, frame)
            if not path:
                frame.vars[sym] = v
                continue
            t = sym.ty
            off = 0
            for step in path:
                if isinstance(step, int):
                    off += step * size_words(t.elem)
                    t = t.elem
                else:
                    off += t.field_offset(step)
                    t = t.field_type(step)
            self.store(Place(frame.vars[sym], off, t), v)

    # -- program -----------------------------------------------------------
    def run(self, inputs) -> OracleResult:
        main = self.prog.main
        if len(inputs) != len(main.params):
            raise ValueError(f"main expects {len(main.params)} inputs, got {len(inputs)}")
        try:
            for d in self.prog.globals:
                self.declare(d.sym, self.globals)
                self.init(d, self.globals)
            args = [convert(int(v) if not isinstance(v, float) else v, _input_type(v), p.ty)
                    for v, p in zip(inputs, main.params)]
            ret = self.call(main, args, None)
            if not isinstance(main.ret, VoidType):
                self.outputs.append(Output("return", main.ret.name, ret))
        except Trap as t:
            return OracleResult(t.status, self.outputs, str(t))
        except RecursionError:
            return OracleResult("nontermination", self.outputs, "recursion too deep")
        return OracleResult("ok", self.outputs)


def _input_type(v) -> Basic:
    if isinstance(v, (float, np.floating)):
        return Basic("double")
    return Basic("llong") if -(2**63) <= v < 2**63 else Basic("ullong")


def interpret(prog: TypedProgram, inputs, step_limit: int = STEP_LIMIT) -> OracleResult:
    return Interpreter(prog, step_limit).run(list(inputs))


def plain_bits(v, ctype: str) -> int:
    return output_bits(ctype, v)


def f32(x: float) -> np.float32:
    return np.float32(struct.unpack(">f", struct.pack(">f", x))[0])
