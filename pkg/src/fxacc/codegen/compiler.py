"""The obfuscating compiler: lowered program -> FxA object code.

Every location carries an offset from its nominal value.  Each instruction
that writes a location draws a fresh offset for it, and the compile-time
database of offsets is threaded through statements.  Where control paths
merge, trailing adds bring every visible location back onto one agreed
scheme.  Offsets and branch polarities all come from one seeded stream, so
the code layout never depends on the seed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..cipher import KeyContext
from ..frontend import syntax as A
from ..frontend.layout import class_words, stride, word_classes
from ..frontend.lexer import CompileError
from ..frontend.srctypes import (
    Array, Basic, Pointer, Record, VoidType, scalar_kind, size_words,
)
from ..frontend.typecheck import FuncSym, TypedProgram, VarSym
from ..isa import OPCODES, RA, SP, branch_opcode
from ..obfuscation import GPR_COUNT, SPR_COUNT, OffsetDB, OffsetSource, RegLoc, StripeLoc
from ..oracle import convert, wrap
from ..words import M32, M64, join64, split64
from . import ir
from .emit import Label, SInstr, SpillLowering, resolve_labels, seal
from .normalize import Normalizer
from .schedule import Schedule, plain_words
from .writes import ProgramFacts, place_of, walk

TEMP_BASE = 10
VAR_BASE = 1034
STATIC_BASE = 0x1000
STACK_BASE = 0x3000_0000
DEFAULT_BOUND = GPR_COUNT + SPR_COUNT
UNROLL_LIMIT = 64

_REL = {"==": "eq", "!=": "ne", "<": "lt", ">": "gt", "<=": "le", ">=": "ge"}

_FUSED = {
    "s": {"*": "mul", "/": "div", "%": "rem", "&": "and", "|": "or", "^": "xor",
          "<<": "shl", ">>": "sra"},
    "u": {"*": "mul", "/": "divu", "%": "remu", "&": "and", "|": "or", "^": "xor",
          "<<": "shl", ">>": "shr"},
    "f": {"+": "addf", "-": "subf", "*": "mulf", "/": "divf"},
    "d": {"+": "add_d", "-": "sub_d", "*": "mul_d", "/": "div_d"},
    "l": {"+": "add_ll", "-": "sub_ll", "*": "mul_ll", "/": "div_ll", "%": "rem_ll",
          "&": "and_ll", "|": "or_ll", "^": "xor_ll", "<<": "shl_ll", ">>": "sra_ll"},
    "q": {"+": "add_ll", "-": "sub_ll", "*": "mul_ll", "/": "divu_ll", "%": "remu_ll",
          "&": "and_ll", "|": "or_ll", "^": "xor_ll", "<<": "shl_ll", ">>": "shr_ll"},
}
_UNARY = {
    ("-", "s"): "neg", ("-", "u"): "neg", ("~", "s"): "not", ("~", "u"): "not",
    ("-", "f"): "negf", ("-", "d"): "neg_d",
    ("-", "l"): "neg_ll", ("-", "q"): "neg_ll", ("~", "l"): "not_ll", ("~", "q"): "not_ll",
}


# -- offset arithmetic: an offset is a word, or a (hi, lo) pair -----------------


def dadd(a, b):
    if isinstance(a, tuple):
        return ((a[0] + b[0]) & M32, (a[1] + b[1]) & M32)
    return (a + b) & M32


def dsub(a, b):
    if isinstance(a, tuple):
        return ((a[0] - b[0]) & M32, (a[1] - b[1]) & M32)
    return (a - b) & M32


def kc(d) -> int:
    """Plain constant for an offset (pairs pack hi:lo)."""
    return join64(*d) if isinstance(d, tuple) else d & M32


def words_of(d) -> list:
    return list(d) if isinstance(d, tuple) else [d]


def tw(t) -> int:
    """Register words of a scalar type."""
    return 2 if isinstance(t, Basic) and t.info.bits == 64 else 1


def literal_bits(e) -> int:
    if isinstance(e, A.FloatLit):
        text = e.text.rstrip("fFlL")
        v = np.float32(float(text)) if e.single else np.float64(float(text))
        return plain_words(v, e.ty.name)
    if isinstance(e.ty, Pointer):
        return e.value & M32
    return plain_words(wrap(e.value, e.ty), e.ty.name)


# -- compile-time records -----------------------------------------------------------


@dataclass
class RegVar:
    reg: int
    width: int

    def locs(self):
        return [RegLoc(self.reg + j) for j in range(self.width)]


@dataclass
class Storage:
    id: int
    name: str
    ty: object
    base: int  # static address, or offset from sp for frame storage
    frame: bool
    classes: tuple = ()
    members: dict = field(default_factory=dict)  # class -> word offsets

    def locs(self):
        return [StripeLoc(self.id, c) for c in sorted(self.members)]


@dataclass
class Interior:
    ctx: "FnCtx"
    entry_scheme: dict
    exit_scheme: dict


@dataclass
class RecSet:
    scc: frozenset
    g_in: dict
    g_out: dict
    fns: dict = field(default_factory=dict)  # FuncSym -> FnCtx


@dataclass
class Loop:
    brk: Label
    brk_scheme: dict
    cont: Label
    cont_scheme: dict
    brk_used: bool = False
    cont_used: bool = False


@dataclass
class FnCtx:
    fsym: FuncSym | None
    kind: str  # main, plain, rec, interior
    entry: Label
    ret_reg: int | None
    ret_delta: object
    ret_type: object
    exit_label: Label | None = None
    exit_scheme: dict = field(default_factory=dict)
    link: int | None = None
    params: list = field(default_factory=list)  # [(VarSym, reg, delta)]
    recset: RecSet | None = None
    frame_size: int = 0
    frame_slots: dict = field(default_factory=dict)  # sym key -> sp offset
    link_slot: int = 0
    labels: dict = field(default_factory=dict)  # LabelSym uid -> (Label, scheme)
    loops: list = field(default_factory=list)


@dataclass
class CompileResult:
    obj: object
    schedule: Schedule
    final_db: OffsetDB
    var_locs: dict  # main variable name -> (register, final offset)
    stats: dict
    listing: list
    storages: list = field(default_factory=list)  # memory layout, one Storage per object


class Compiler:
    def __init__(self, prog: TypedProgram, seed: int, offsets: OffsetSource | None = None,
                 reg_bound: int = DEFAULT_BOUND, unroll_limit: int = UNROLL_LIMIT):
        self.prog = prog
        self.seed = seed
        self.rng = offsets if offsets is not None else OffsetSource(seed)
        self.reg_bound = reg_bound
        self.unroll_limit = unroll_limit
        self.next_reg = VAR_BASE
        self.static_next = STATIC_BASE
        self.storage_ids = itertools.count()
        self.storages: dict[int, Storage] = {}
        self.site_ids = itertools.count()
        self.sites: dict = {}
        self.chunks: list = []
        self.code: list = []
        self.db = OffsetDB()
        self.scopes: list = []
        self.global_scope: dict = {}
        self.fn: FnCtx | None = None
        self.reachable = True
        self.free = TEMP_BASE
        self.var_finals: dict = {}
        self.final_db = OffsetDB()
        self.stats = {"joins_checked": 0, "join_failures": 0, "storms": [], "instances": {},
                      "branches": 0}
        self.sp_delta = 0
        self._prepare()

    # -- program facts -----------------------------------------------------------
    def _prepare(self):
        self.bodies: dict = {}
        self.sym_by_key: dict = {}
        norm = Normalizer()
        for d in self.prog.globals:
            self.sym_by_key[d.sym.key] = d.sym
        for f in self.prog.functions.values():
            if f.defn is None or f.defn.body is None:
                continue
            self._lower(f, norm.block(f.defn.body.items), norm)
        self.global_ir = norm.block(self.prog.globals)
        for s in walk(self.global_ir):
            if isinstance(s, ir.IDecl):
                self.sym_by_key[s.sym.key] = s.sym
        self.facts = ProgramFacts(self.bodies, self._ptr_type)
        for f in self.facts.recursive:
            if f.parent is not None or f.interiors:
                raise CompileError(
                    f"interior function in recursive function '{f.top.name}' is not supported",
                    f.pos, self.prog.ast.filename)

    def _lower(self, f: FuncSym, body: list, norm: Normalizer):
        self.bodies[f] = body
        for p in f.params:
            self.sym_by_key[p.key] = p
        for s in walk(body):
            if isinstance(s, ir.IDecl):
                self.sym_by_key[s.sym.key] = s.sym
            elif isinstance(s, ir.IInterior):
                self._lower(s.func, s.body, norm)

    def _ptr_type(self, key: str):
        return self.sym_by_key[key].ty

    # -- primitives ------------------------------------------------------------------
    def fresh(self, width: int = 1):
        if width == 2:
            return (self.rng.fresh(), self.rng.fresh())
        return self.rng.fresh()

    def alloc(self, width: int = 1) -> int:
        r = self.next_reg
        self.next_reg += width
        return r

    def emit(self, op: str, regs=(), consts=(), target=None):
        spec = OPCODES[op]
        cs = tuple((c & M64) if w == 2 else (c & M32) for c, w in zip(consts, spec.consts))
        self.code.append(SInstr(op, tuple(regs), cs, target))

    def place(self, label: Label):
        self.code.append(label)

    def jump(self, label: Label):
        self.emit("j", target=label)
        self.reachable = False

    def branch(self, op: str, regs, consts, if_true: Label, if_false: Label):
        """Conditional branch through a trampoline pair.

        The polarity word's low bit inverts the test: a truthteller branches
        to ``+2`` when the condition holds, a liar when it fails.
        """
        pol = self.rng.word()
        self.emit(op, regs, tuple(consts) + (pol,), 2)
        if pol & 1:
            self.emit("j", target=if_true)
            self.emit("j", target=if_false)
        else:
            self.emit("j", target=if_false)
            self.emit("j", target=if_true)
        self.stats["branches"] += 1

    def get(self, reg: int, width: int):
        if width == 2:
            return (self.db[RegLoc(reg)], self.db[RegLoc(reg + 1)])
        return self.db[RegLoc(reg)]

    def put(self, reg: int, width: int, d):
        for j, x in enumerate(words_of(d)):
            self.db[RegLoc(reg + j)] = x

    def li(self, r: int, bits: int, width: int):
        d = self.fresh(width)
        if width == 2:
            self.emit("li2", (r,), (join64(*dadd(split64(bits), d)),))
        else:
            self.emit("li", (r,), (bits + d,))
        return d

    def addi(self, dst: int, src: int, k, width: int):
        self.emit("add2" if width == 2 else "addi", (dst, src), (kc(k),))

    def mov(self, dst: int, src: int, width: int):
        self.emit("mov2" if width == 2 else "mov", (dst, src))

    # -- bindings ------------------------------------------------------------------------
    def bind(self, key: str, b):
        self.scopes[-1][key] = b

    def lookup(self, key: str):
        for scope in reversed(self.scopes):
            if key in scope:
                return scope[key]
        raise CompileError(f"internal: unbound {key}", None, self.prog.ast.filename)

    def visible_locs(self, scopes=None) -> list:
        seen: dict = {}
        for scope in (self.scopes if scopes is None else scopes):
            seen.update(scope)
        locs = [RegLoc(SP)]
        for b in seen.values():
            if isinstance(b, (RegVar, Storage)):
                locs += b.locs()
        return locs

    def scheme(self, locs=None) -> dict:
        return {loc: self.db[loc] for loc in (self.visible_locs() if locs is None else locs)}

    def new_storage(self, sym: VarSym) -> Storage:
        size = size_words(sym.ty)
        if self.fn is not None and self.fn.kind == "rec":
            base, frame = self.fn.frame_slots[sym.key], True
        else:
            base, frame = self.static_next, False
            self.static_next += size
        sid = next(self.storage_ids)
        st = Storage(sid, sym.name, sym.ty, base, frame, word_classes(sym.ty), class_words(sym.ty))
        self.storages[sid] = st
        return st

    def load_base(self, r: int, st: Storage, off: int):
        """r <- address of word ``off`` of ``st`` under a fresh offset."""
        d = self.fresh()
        if st.frame:
            self.emit("addi", (r, SP), (st.base + off + d - self.sp_delta,))
        else:
            self.emit("li", (r,), (st.base + off + d,))
        return d

    # -- joins -------------------------------------------------------------------------
    def reconcile(self, target: dict, scratch: int | None = None):
        """Trailing adds moving the current scheme onto ``target``."""
        s0 = self.free if scratch is None else scratch
        for loc, want in target.items():
            have = self.db.get(loc)
            if have is None:
                raise CompileError(f"internal: {loc} has no offset at a join", None,
                                   self.prog.ast.filename)
            if have == want:
                continue
            if isinstance(loc, RegLoc):
                self.emit("addi", (loc.index, loc.index), (want - have,))
            else:
                self.rebase(self.storages[loc.storage], loc.cls, (want - have) & M32, s0)
            self.db[loc] = want
        self.stats["joins_checked"] += 1
        if not self.db.agrees_with(target):
            self.stats["join_failures"] += 1

    def adopt(self, target: dict):
        for loc, d in target.items():
            self.db[loc] = d

    def rebase(self, st: Storage, cls: int, k: int, s0: int):
        o = s0 + 2

        def body(x, delta, word):
            self.emit("lw", (o, x), (-delta,))
            self.emit("addi", (o, o), (k,))
            self.emit("sw", (o, x), (-delta,))

        self.stripe_pass(st, st.members[cls], s0, body)
        self.stats["storms"].append((st.name, cls, len(st.members[cls]), "rebase"))

    def stripe_pass(self, st: Storage, words: list, s0: int, body) -> str:
        """Run ``body(addr_reg, delta, word)`` over every word of a stripe.

        ``addr_reg`` holds the word's address plus ``delta``; ``word`` is the
        word offset, or None inside a loop.  Long stripes
        with a regular stride become a loop whose scheme is the same on every
        iteration.
        """
        sd = stride(words)
        if len(words) > self.unroll_limit and sd is not None:
            start, step = sd
            x, end = s0, s0 + 1
            dx = self.load_base(x, st, start)
            de = self.load_base(end, st, start + step * len(words))
            top, done = Label("storm"), Label("stormdone")
            self.place(top)
            body(x, dx, None)
            self.emit("addi", (x, x), (step,))
            self.branch("bne", (x, end), ((dx - de) & M32,), top, done)
            self.place(done)
            self.reachable = True
            self.stats["joins_checked"] += 1
            return "loop"
        db_ = self.load_base(s0, st, 0)
        for w in words:
            body(s0, (db_ - w) & M32, w)
        return "unrolled"

    # -- expressions ---------------------------------------------------------------------
    def expr(self, e, r: int):
        """Code leaving E[e + Δ] in r (and r+1 for pairs); returns Δ."""
        return getattr(self, "x_" + type(e).__name__)(e, r)

    def x_IntLit(self, e, r):
        return self.li(r, literal_bits(e), tw(e.ty))

    x_FloatLit = x_IntLit

    def x_Name(self, e, r):
        b = self.lookup(e.sym.key)
        d = self.fresh(b.width)
        self.addi(r, b.reg, dsub(d, self.get(b.reg, b.width)), b.width)
        return d

    def x_Unary(self, e, r):
        if e.op == "+":
            return self.expr(e.operand, r)
        kind = scalar_kind(e.ty)
        dx = self.expr(e.operand, r)
        d = self.fresh(tw(e.ty))
        self.emit(_UNARY[(e.op, kind)], (r, r), (kc(d), kc(dx)))
        return d

    def x_Binary(self, e, r):
        lt, rt = e.left.ty, e.right.ty
        if isinstance(lt, Pointer):
            return self.pointer_binary(e, r)
        kind = scalar_kind(e.ty)
        dx = self.expr(e.left, r)
        r2 = r + tw(lt)
        dy = self.expr(e.right, r2)
        d = self.fresh(tw(e.ty))
        if kind in "su" and e.op in "+-":
            k = dsub(dsub(d, dx), dy) if e.op == "+" else dadd(dsub(d, dx), dy)
            self.emit("add" if e.op == "+" else "sub", (r, r, r2), (k,))
            return d
        op = _FUSED[kind][e.op]
        self.emit(op, (r, r, r2), (kc(d), kc(dx), kc(dy)))
        return d

    def scale_add(self, r: int, dp, index, size: int, sub: bool = False):
        """r holds a pointer under ``dp``; add (or subtract) ``index`` elements."""
        c = index.value if isinstance(index, A.IntLit) else None
        if c is not None:
            return dadd(dp, c * size) if sub else dsub(dp, c * size)
        di = self.expr(index, r + 1)
        if size != 1:
            dc = self.li(r + 2, size, 1)
            dm = self.fresh()
            self.emit("mul", (r + 1, r + 1, r + 2), (dm, di, dc))
            di = dm
        d = self.fresh()
        if sub:
            self.emit("sub", (r, r, r + 1), (d - dp + di,))
        else:
            self.emit("add", (r, r, r + 1), (d - dp - di,))
        return d

    def pointer_binary(self, e, r):
        size = size_words(e.left.ty.elem)
        dp = self.expr(e.left, r)
        if isinstance(e.right.ty, Pointer):
            dq = self.expr(e.right, r + 1)
            dd = self.fresh()
            self.emit("sub", (r, r, r + 1), (dd - dp + dq,))
            if size == 1:
                return dd
            dc = self.li(r + 1, size, 1)
            d = self.fresh()
            self.emit("div", (r, r, r + 1), (d, dd, dc))
            return d
        return self.scale_add(r, dp, e.right, size, sub=(e.op == "-"))

    def x_Cast(self, e, r):
        dx = self.expr(e.operand, r)
        return self.convert(r, e.operand.ty, e.to, dx)

    def convert(self, r: int, src, dst, dx):
        if src == dst or isinstance(dst, Pointer):
            return dx
        s, t = src.info, dst.info
        if s.is_float or t.is_float:
            if s.is_float and t.is_float:
                return self.unary("cvt_fd" if t.bits == 64 else "cvt_df", r, dx, tw(dst))
            if t.is_float:
                letter = ("l" if s.signed else "q") if s.bits == 64 else ("i" if s.signed else "u")
                return self.unary(f"cvt_{letter}{'d' if t.bits == 64 else 'f'}", r, dx, tw(dst))
            src_letter = "d" if s.bits == 64 else "f"
            if t.bits == 64:
                return self.unary(f"cvt_{src_letter}{'l' if t.signed else 'q'}", r, dx, 2)
            d = self.unary(f"cvt_{src_letter}{'i' if t.signed else 'u'}", r, dx, 1)
            return self.narrow(r, d, t.bits, t.signed) if t.bits < 32 else d
        if t.bits == 64:
            if s.bits == 64:
                return dx
            return self.unary("cvt_sx" if s.signed else "cvt_zx", r, dx, 2)
        sbits, ssigned = s.bits, s.signed
        if sbits == 64:
            dx = self.unary("cvt_tr", r, dx, 1)
            sbits = 32
        if t.bits >= 32:
            return dx
        if (sbits < t.bits and (not ssigned or t.signed)) or (sbits == t.bits and ssigned == t.signed):
            return dx
        return self.narrow(r, dx, t.bits, t.signed)

    def unary(self, op: str, r: int, dx, out_width: int):
        d = self.fresh(out_width)
        self.emit(op, (r, r), (kc(d), kc(dx)))
        return d

    def narrow(self, r: int, dx, bits: int, signed: bool):
        """Shift left then right by 32-bits places, as a multiply and an exact
        divide.  The factor is never a program constant: a random k1 is loaded
        and the instruction's own constant subtracts k1 - F."""
        f = 1 << (32 - bits)
        k1 = self.rng.word()
        self.emit("li", (r + 1,), (k1,))
        dm = self.fresh()
        self.emit("mul", (r, r, r + 1), (dm, dx, k1 - f))
        k2 = self.rng.word()
        self.emit("li", (r + 1,), (k2,))
        d = self.fresh()
        self.emit("div" if signed else "divu", (r, r, r + 1), (d, dm, k2 - f))
        return d

    def x_AddrOf(self, e, r):
        return self.addr(e.operand, r)

    def x_Index(self, e, r):
        da = self.addr(e, r)
        key, ty, rep, _ = place_of(e, self._ptr_type)
        st = self.lookup(key)
        w = tw(e.ty)
        if w == 2:
            self.emit("lw", (r + 1, r), (1 - da,))
        self.emit("lw", (r, r), (-da,))
        have = tuple(self.db[StripeLoc(st.id, st.classes[rep + j])] for j in range(w))
        have = have if w == 2 else have[0]
        d = self.fresh(w)
        self.addi(r, r, dsub(d, have), w)
        return d

    x_Member = x_Index
    x_Deref = x_Index

    def addr(self, lv, r: int):
        """Address of a place in r, under the returned offset."""
        if isinstance(lv, A.Name):
            st = self.lookup(lv.sym.key)
            return self.load_base(r, st, 0)
        if isinstance(lv, A.Index):
            base = lv.base
            if isinstance(base.ty, Pointer):
                db_ = self.expr(base, r)
                size = size_words(base.ty.elem)
            else:
                db_ = self.addr(base, r)
                size = size_words(base.ty.elem)
            return self.scale_add(r, db_, lv.index, size)
        if isinstance(lv, A.Member):
            if lv.arrow:
                db_ = self.expr(lv.base, r)
                rec = lv.base.ty.elem
            else:
                db_ = self.addr(lv.base, r)
                rec = lv.base.ty
            return dsub(db_, rec.field_offset(lv.field))
        if isinstance(lv, A.Deref):
            return self.expr(lv.operand, r)
        raise CompileError(f"internal: no address for {type(lv).__name__}", None,
                           self.prog.ast.filename)

    # -- conditions ------------------------------------------------------------------------
    def cond(self, c, if_true: Label, if_false: Label):
        if isinstance(c, ir.And):
            mid = Label("and")
            self.cond(c.left, mid, if_false)
            self.place(mid)
            self.cond(c.right, if_true, if_false)
        elif isinstance(c, ir.Or):
            mid = Label("or")
            self.cond(c.left, if_true, mid)
            self.place(mid)
            self.cond(c.right, if_true, if_false)
        elif isinstance(c, ir.Not):
            self.cond(c.cond, if_false, if_true)
        elif isinstance(c, ir.Truth):
            v = c.value
            if isinstance(v.ty, Basic) and v.ty.info.is_float:
                zero = A.FloatLit("0.0f" if v.ty.info.bits == 32 else "0.0", ty=v.ty)
            else:
                zero = A.IntLit(0, "0", ty=v.ty)
            self.cond(ir.Cmp("!=", v, zero), if_true, if_false)
        else:
            t = c.left.ty
            w = tw(t)
            r = self.free
            dl = self.expr(c.left, r)
            dr = self.expr(c.right, r + w)
            op = branch_opcode(_REL[c.op], scalar_kind(t))
            if len(OPCODES[op].consts) == 2:
                consts = (dl - dr,)
            else:
                consts = (kc(dl), kc(dr))
            self.branch(op, (r, r + w), consts, if_true, if_false)

    # -- statements ------------------------------------------------------------------------
    def block(self, items: list, scope: bool = True):
        if scope:
            self.scopes.append({})
        for s in items:
            self.stmt(s)
        if scope:
            self.scopes.pop()

    def stmt(self, s):
        getattr(self, "s_" + type(s).__name__)(s)

    def s_IBlock(self, s):
        if not s.temps_only:
            self.block(s.items)
            return
        # temporaries die with the block; user declarations outlive it
        self.scopes.append({})
        for item in s.items:
            self.stmt(item)
        inner = self.scopes.pop()
        for key, b in inner.items():
            sym = self.sym_by_key.get(key)
            if sym is not None and getattr(sym, "kind", "") != "temp":
                self.bind(key, b)

    def s_IDecl(self, s):
        sym = s.sym
        if isinstance(sym.ty, (Array, Record)):
            self.decl_aggregate(sym, s.inits)
            return
        w = tw(sym.ty)
        reg = self.alloc(w)
        if s.inits:
            d = self.assign_reg(reg, w, s.inits[0][1])
        else:
            d = self.li(reg, 0, w)
        self.put(reg, w, d)
        self.bind(sym.key, RegVar(reg, w))

    def assign_reg(self, reg: int, w: int, value):
        """reg <- value under a fresh offset."""
        if isinstance(value, (A.IntLit, A.FloatLit)):
            return self.li(reg, literal_bits(value), w)
        if isinstance(value, A.Name):
            b = self.lookup(value.sym.key)
            d = self.fresh(w)
            self.addi(reg, b.reg, dsub(d, self.get(b.reg, w)), w)
            return d
        dv = self.expr(value, self.free)
        d = self.fresh(w)
        self.addi(reg, self.free, dsub(d, dv), w)
        return d

    def decl_aggregate(self, sym: VarSym, inits):
        st = self.new_storage(sym)
        self.bind(sym.key, st)
        deltas = {c: self.fresh() for c in sorted(st.members)}
        rb = self.free
        rv = rb + 1
        o = rv + 2
        db_ = self.load_base(rb, st, 0)
        covered = set()
        for path, e in inits:
            off, t = self.path_offset(sym.ty, path)
            w = tw(t)
            dv = words_of(self.expr(e, rv))
            for j in range(w):
                word = off + j
                self.emit("addi", (o, rv + j), (deltas[st.classes[word]] - dv[j],))
                self.emit("sw", (o, rb), (word - db_,))
                covered.add(word)
        for word in range(len(st.classes)):
            if word not in covered:
                self.emit("li", (o,), (deltas[st.classes[word]],))
                self.emit("sw", (o, rb), (word - db_,))
        for c, d in deltas.items():
            self.db[StripeLoc(st.id, c)] = d

    @staticmethod
    def path_offset(t, path):
        off = 0
        for step in path:
            if isinstance(step, int):
                off += step * size_words(t.elem)
                t = t.elem
            else:
                off += t.field_offset(step)
                t = t.field_type(step)
        return off, t

    def s_IAssign(self, s):
        target = s.target
        if isinstance(target, A.Name):
            b = self.lookup(target.sym.key)
            d = self.assign_reg(b.reg, b.width, s.value)
            self.put(b.reg, b.width, d)
            return
        self.store(target, s.value)

    def store(self, target, value):
        """Write storm: every word of the written stripes is reloaded, moved
        to the stripe's new offset and stored back, the target word taking
        the new value.  Selection is arithmetic, never a branch."""
        key, ty, rep, static = place_of(target, self._ptr_type)
        st = self.lookup(key)
        w = tw(target.ty)
        ra = self.free
        da = self.addr(target, ra) if static is None else None
        rv = ra + 1
        dv = words_of(self.expr(value, rv))
        s0 = rv + w
        vclasses = [st.classes[rep + j] for j in range(w)]
        for c in dict.fromkeys(vclasses):
            loc = StripeLoc(st.id, c)
            old, new = self.db[loc], self.fresh()
            updates = [j for j in range(w) if vclasses[j] == c]
            words = st.members[c]
            loop = len(words) > self.unroll_limit and stride(words) is not None
            if static is not None and loop:
                da = self.load_base(ra, st, static)
            if static is not None and not loop:
                body = self.static_word(static, updates, rv, dv, old, new, s0)
            else:
                body = self.dynamic_word(updates, ra, da, rv, dv, old, new, s0)
            form = self.stripe_pass(st, words, s0, body)
            self.db[loc] = new
            self.stats["storms"].append((st.name, c, len(words), form))

    def static_word(self, static, updates, rv, dv, old, new, s0):
        o = s0 + 2
        by_word = {static + j: j for j in updates}

        def body(x, delta, word):
            j = by_word.get(word)
            if j is not None:
                self.emit("addi", (o, rv + j), (new - dv[j],))
            else:
                self.emit("lw", (o, x), (-delta,))
                self.emit("addi", (o, o), (new - old,))
            self.emit("sw", (o, x), (-delta,))

        return body

    def dynamic_word(self, updates, ra, da, rv, dv, old, new, s0):
        o, t, d_, m = s0 + 2, s0 + 3, s0 + 4, s0 + 5

        def body(x, delta, word):
            self.emit("lw", (o, x), (-delta,))
            cur = old
            for n, j in enumerate(updates):
                dt, dd, dm = self.fresh(), self.fresh(), self.fresh()
                self.emit("seq", (t, ra, x), (dt, da - j, delta))
                self.emit("sub", (d_, rv + j, o), (dd - dv[j] + cur,))
                self.emit("mul", (m, t, d_), (dm, dt, dd))
                nxt = new if n == len(updates) - 1 else self.fresh()
                self.emit("add", (o, o, m), (nxt - cur - dm,))
                cur = nxt
            self.emit("sw", (o, x), (-delta,))

        return body

    def s_IEmit(self, s):
        t = s.value.ty
        w = tw(t)
        d = self.expr(s.value, self.free)
        site = next(self.site_ids)
        self.emit("out2" if w == 2 else "out", (self.free,), target=site)
        self.sites[site] = (s.name, d, t.name)

    def s_IIf(self, s):
        t_lab, f_lab, join = Label("then"), Label("else"), Label("fi")
        self.cond(s.cond, t_lab, f_lab)
        before = self.db.copy()
        locs = self.visible_locs()
        self.place(t_lab)
        self.block(s.then)
        if not s.other:
            if self.reachable:
                self.reconcile({loc: before[loc] for loc in locs})
            self.place(f_lab)
            self.db = self._merge(before, locs)
            self.reachable = True
            return
        then_reach = self.reachable
        then_db = self.db
        if then_reach:
            self.jump(join)
        self.db = before.copy()
        self.place(f_lab)
        self.reachable = True
        self.block(s.other)
        if then_reach and self.reachable:
            self.reconcile({loc: then_db[loc] for loc in locs})
        elif then_reach:
            self.db = then_db
        self.place(join)
        self.reachable = then_reach or self.reachable

    def _merge(self, db: OffsetDB, locs) -> OffsetDB:
        out = self.db.copy()
        for loc in locs:
            out[loc] = db[loc]
        return out

    def s_ILoop(self, s):
        if s.test_first:
            self.loop_while(s)
        else:
            self.loop_do(s)

    def loop_while(self, s):
        locs0 = self.visible_locs()
        head0 = self.scheme(locs0)
        head, body_l, step_l, exit_l = Label("head"), Label("body"), Label("step"), Label("exit")
        self.place(head)
        self.scopes.append({})
        self.block(s.prelude, scope=False)
        after_prelude = self.db.copy()
        pre = self.scheme()
        if s.cond is not None:
            self.cond(s.cond, body_l, exit_l)
        self.place(body_l)
        loop = Loop(exit_l, pre, step_l, pre)
        self.fn.loops.append(loop)
        self.block(s.body)
        self.fn.loops.pop()
        if self.reachable:
            self.reconcile(pre)
        self.place(step_l)
        if self.reachable or loop.cont_used:
            self.db = after_prelude.copy()
            self.reachable = True
            self.block(s.step)
            if self.reachable:
                self.reconcile(head0)
                self.jump(head)
        self.scopes.pop()
        self.place(exit_l)
        self.db = after_prelude.copy()
        self.reachable = s.cond is not None or loop.brk_used

    def loop_do(self, s):
        locs0 = self.visible_locs()
        head0 = self.scheme(locs0)
        entry_db = self.db.copy()
        head, cond_l, back, out, exit_l = (Label("do"), Label("cond"), Label("back"),
                                           Label("out"), Label("exit"))
        self.place(head)
        loop = Loop(exit_l, head0, cond_l, head0)
        self.fn.loops.append(loop)
        self.block(s.body)
        self.fn.loops.pop()
        if self.reachable:
            self.reconcile(head0)
        self.place(cond_l)
        if self.reachable or loop.cont_used:
            self.db = entry_db.copy()
            self.reachable = True
            self.scopes.append({})
            self.block(s.prelude, scope=False)
            after = self.db.copy()
            self.cond(s.cond, back, out)
            self.place(back)
            self.reconcile(head0)
            self.jump(head)
            self.db = after
            self.place(out)
            self.reconcile(head0)
            self.scopes.pop()
            self.reachable = True
        self.place(exit_l)
        self.db = self._adopted(entry_db, head0)
        self.reachable = self.reachable or loop.brk_used

    def _adopted(self, db: OffsetDB, scheme: dict) -> OffsetDB:
        out = db.copy()
        for loc, d in scheme.items():
            out[loc] = d
        return out

    def s_IBreak(self, s):
        loop = self.fn.loops[-1]
        loop.brk_used = True
        self.reconcile(loop.brk_scheme)
        self.jump(loop.brk)

    def s_IContinue(self, s):
        loop = self.fn.loops[-1]
        loop.cont_used = True
        self.reconcile(loop.cont_scheme)
        self.jump(loop.cont)

    def s_ILabelDecl(self, s):
        snap = self.scheme()
        for lab in s.labels:
            self.fn.labels[lab.uid] = (Label(lab.name), dict(snap))

    def s_ILabel(self, s):
        label, snap = self.fn.labels[s.label.uid]
        if self.reachable:
            self.reconcile(snap)
        else:
            self.adopt(snap)
        self.place(label)
        self.reachable = True

    def s_IGoto(self, s):
        label, snap = self.fn.labels[s.label.uid]
        self.reconcile(snap)
        self.jump(label)

    def s_IReturn(self, s):
        self.ret(s.value)

    def ret(self, value):
        fn = self.fn
        if fn.ret_reg is not None:
            w = tw(fn.ret_type)
            if value is None:
                d = self.li(fn.ret_reg, 0, w)
            else:
                d = self.assign_reg(fn.ret_reg, w, value)
            self.addi(fn.ret_reg, fn.ret_reg, dsub(fn.ret_delta, d), w)
        if fn.kind == "main":
            self.var_finals = {k: (b.reg, self.get(b.reg, b.width))
                               for scope in self.scopes[1:] for k, b in scope.items()
                               if isinstance(b, RegVar)}
            self.final_db = self.db.copy()
            self.jump(fn.exit_label)
            return
        self.reconcile(fn.exit_scheme)
        if fn.kind == "plain":
            self.jump(fn.exit_label)
        else:
            self.emit("jr", (fn.link,))
            self.reachable = False

    # -- calls -------------------------------------------------------------------------------
    def eval_args(self, args) -> list:
        out = []
        r = self.free
        for a in args:
            w = tw(a.ty)
            out.append((r, w, self.expr(a, r)))
            r += w
        return out

    def s_ICall(self, s):
        f = s.func
        if f.parent is not None:
            self.call_interior(s, f)
        elif f in self.facts.recursive:
            if self.fn.recset is not None and f in self.fn.recset.fns:
                self.call_internal(s, f)
            else:
                self.call_recursive(s, f)
        else:
            self.call_plain(s, f)

    def global_locs(self) -> list:
        return self.visible_locs([self.global_scope])

    def exit_for(self, f: FuncSym, bindings: list, base: dict) -> dict:
        """Fresh offsets for the visible locations ``f`` may write."""
        written = self.facts.writes[f]
        out = dict(base)
        for key, b in bindings:
            if isinstance(b, RegVar) and ("v", key) in written:
                for loc in b.locs():
                    out[loc] = self.fresh()
            elif isinstance(b, Storage):
                for c in sorted(b.members):
                    if ("m", key, c) in written:
                        out[StripeLoc(b.id, c)] = self.fresh()
        return out

    def _visible_bindings(self, scopes) -> list:
        seen: dict = {}
        for scope in scopes:
            seen.update(scope)
        return [(k, b) for k, b in seen.items() if isinstance(b, (RegVar, Storage))]

    def bump(self, sign: int):
        if self.fn.frame_size:
            self.emit("addi", (SP, SP), (sign * self.fn.frame_size,))

    def take_result(self, dest, ctx: FnCtx):
        if dest is not None:
            b = self.lookup(dest.sym.key)
            self.mov(b.reg, ctx.ret_reg, b.width)
            self.put(b.reg, b.width, ctx.ret_delta)

    def new_ctx(self, f: FuncSym, kind: str) -> FnCtx:
        ret_reg = None
        ret_delta = None
        if not isinstance(f.ret, VoidType):
            ret_reg = self.alloc(tw(f.ret))
            ret_delta = self.fresh(tw(f.ret))
        ctx = FnCtx(f, kind, Label(f.name), ret_reg, ret_delta, f.ret)
        if kind in ("rec", "interior"):
            ctx.link = self.alloc()
        self.stats["instances"][f.name] = self.stats["instances"].get(f.name, 0) + 1
        return ctx

    def call_plain(self, s, f: FuncSym):
        args = self.eval_args(s.args)
        ctx = self.new_ctx(f, "plain")
        entry = self.scheme(self.global_locs())
        for p, (r, w, d) in zip(f.params, args):
            reg = self.alloc(w)
            self.mov(reg, r, w)
            ctx.params.append((p, reg, d))
        ctx.exit_label = Label("ret")
        ctx.exit_scheme = self.exit_for(f, self._visible_bindings([self.global_scope]), entry)
        self.bump(+1)
        self.emit("j", target=ctx.entry)
        self.instance(ctx, entry, [self.global_scope])
        self.place(ctx.exit_label)
        self.bump(-1)
        self.adopt(ctx.exit_scheme)
        self.take_result(s.dest, ctx)

    def call_recursive(self, s, f: FuncSym):
        args = self.eval_args(s.args)
        scc = self.facts.scc_of[f]
        g_in = self.scheme(self.global_locs())
        bindings = self._visible_bindings([self.global_scope])
        written = set()
        for g in scc:
            written |= self.facts.writes[g]
        g_out = dict(g_in)
        for key, b in bindings:
            if isinstance(b, RegVar) and ("v", key) in written:
                for loc in b.locs():
                    g_out[loc] = self.fresh()
            elif isinstance(b, Storage):
                for c in sorted(b.members):
                    if ("m", key, c) in written:
                        g_out[StripeLoc(b.id, c)] = self.fresh()
        rs = RecSet(scc, g_in, g_out)
        for g in sorted(scc, key=lambda x: (x is not f, x.uid)):
            ctx = self.new_ctx(g, "rec")
            ctx.recset = rs
            ctx.exit_scheme = g_out
            for i, p in enumerate(g.params):
                w = tw(p.ty)
                d = args[i][2] if g is f else self.fresh(w)
                ctx.params.append((p, self.alloc(w), d))
            self.frame_layout(ctx)
            rs.fns[g] = ctx
        ctx = rs.fns[f]
        for (p, reg, _), (r, w, _) in zip(ctx.params, args):
            self.mov(reg, r, w)
        self.bump(+1)
        self.emit("jal", target=ctx.entry)
        self.bump(-1)
        self.adopt(g_out)
        self.take_result(s.dest, ctx)
        for g, gctx in rs.fns.items():
            self.instance(gctx, g_in, [self.global_scope])

    def frame_layout(self, ctx: FnCtx):
        off = 0
        for p, _, _ in ctx.params:
            ctx.frame_slots[p.key] = off
            off += tw(p.ty)
        for st in walk(self.bodies[ctx.fsym]):
            if isinstance(st, ir.IDecl):
                ctx.frame_slots[st.sym.key] = off
                off += size_words(st.sym.ty) if isinstance(st.sym.ty, (Array, Record)) else tw(st.sym.ty)
        ctx.link_slot = off
        ctx.frame_size = off + 1

    def call_internal(self, s, f: FuncSym):
        args = self.eval_args(s.args)
        scratch = self.free + sum(w for _, w, _ in args)
        callee = self.fn.recset.fns[f]
        saved = []
        for scope in self.scopes[1:]:
            for key, b in scope.items():
                if isinstance(b, RegVar):
                    saved.append((b, self.fn.frame_slots[key]))
        for b, slot in saved:
            for j in range(b.width):
                self.emit("sw", (b.reg + j, SP), (slot + j - self.sp_delta,))
        self.emit("sw", (self.fn.link, SP), (self.fn.link_slot - self.sp_delta,))
        self.bump(+1)
        self.reconcile(self.fn.recset.g_in, scratch)
        for (p, reg, dp), (r, w, d) in zip(callee.params, args):
            self.addi(reg, r, dsub(dp, d), w)
        self.emit("jal", target=callee.entry)
        self.bump(-1)
        for b, slot in saved:
            for j in range(b.width):
                self.emit("lw", (b.reg + j, SP), (slot + j - self.sp_delta,))
        self.emit("lw", (self.fn.link, SP), (self.fn.link_slot - self.sp_delta,))
        self.adopt(self.fn.recset.g_out)
        self.take_result(s.dest, callee)

    def call_interior(self, s, f: FuncSym):
        info = self.lookup(f"fn:{f.uid}")
        args = self.eval_args(s.args)
        scratch = self.free + sum(w for _, w, _ in args)
        self.reconcile(info.entry_scheme, scratch)
        for (p, reg, dp), (r, w, d) in zip(info.ctx.params, args):
            self.addi(reg, r, dsub(dp, d), w)
        self.emit("jal", target=info.ctx.entry)
        self.adopt(info.exit_scheme)
        self.take_result(s.dest, info.ctx)

    def s_IInterior(self, s):
        f = s.func
        after = Label("after")
        self.emit("j", target=after)
        ctx = self.new_ctx(f, "interior")
        for p in f.params:
            w = tw(p.ty)
            ctx.params.append((p, self.alloc(w), self.fresh(w)))
        entry = self.scheme()
        ctx.exit_scheme = self.exit_for(f, self._visible_bindings(self.scopes), entry)
        self.bind(f"fn:{f.uid}", Interior(ctx, entry, ctx.exit_scheme))
        saved = (self.db, self.fn, self.reachable)
        self.db = OffsetDB(entry)
        self.fn = ctx
        self.scopes.append({})
        self.enter(ctx)
        self.block(self.bodies[f], scope=False)
        if self.reachable:
            self.ret(None)
        self.scopes.pop()
        self.db, self.fn, self.reachable = saved
        self.place(after)

    def enter(self, ctx: FnCtx):
        """Entry point: bind parameters under their entry offsets."""
        self.place(ctx.entry)
        self.reachable = True
        if ctx.link is not None:
            self.emit("mov", (ctx.link, RA))
        for p, reg, d in ctx.params:
            self.bind(p.key, RegVar(reg, tw(p.ty)))
            self.put(reg, tw(p.ty), d)

    def instance(self, ctx: FnCtx, globals_scheme: dict, scopes: list):
        """Compile one instance of a top-level function as its own code chunk."""
        saved = (self.code, self.db, self.scopes, self.fn, self.reachable)
        self.code = []
        self.chunks.append(self.code)
        self.db = OffsetDB(globals_scheme)
        self.db[RegLoc(SP)] = self.sp_delta
        self.scopes = list(scopes) + [{}]
        self.fn = ctx
        self.enter(ctx)
        self.block(self.bodies[ctx.fsym], scope=False)
        if self.reachable:
            self.ret(None)
        self.code, self.db, self.scopes, self.fn, self.reachable = saved

    # -- program ---------------------------------------------------------------------------
    def compile(self, ctx: KeyContext | None = None) -> CompileResult:
        main = self.prog.main
        self.code = []
        self.chunks.append(self.code)
        mctx = self.new_ctx(main, "main")
        mctx.exit_label = Label("main_exit")
        self.fn = mctx
        sched = Schedule(self.seed)
        self.place(mctx.entry)
        in_reg = TEMP_BASE
        moves = []
        for p in main.params:
            w = tw(p.ty)
            reg = self.alloc(w)
            d = self.fresh(w)
            moves.append((p, reg, d))
            self.mov(reg, in_reg, w)
            sched.inputs.append((p.name, in_reg, d, p.ty.name))
            in_reg += w
        self.sp_delta = self.fresh()
        self.emit("li", (SP,), (STACK_BASE + self.sp_delta,))
        self.db[RegLoc(SP)] = self.sp_delta
        self.scopes = [self.global_scope]
        self.block(self.global_ir, scope=False)
        self.scopes.append({})
        for p, reg, d in moves:
            self.bind(p.key, RegVar(reg, tw(p.ty)))
            self.put(reg, tw(p.ty), d)
        self.block(self.bodies[main], scope=False)
        if self.reachable:
            self.ret(None)
        self.place(mctx.exit_label)
        if mctx.ret_reg is not None:
            site = next(self.site_ids)
            self.emit("out2" if tw(main.ret) == 2 else "out", (mctx.ret_reg,), target=site)
            self.sites[site] = ("return", mctx.ret_delta, main.ret.name)
        halt = Label("halt")
        self.emit("j", target=halt)
        code = [item for chunk in self.chunks for item in chunk] + [halt]
        lowering = SpillLowering(self.reg_bound, self.rng)
        code = lowering.lower(code)
        linked = resolve_labels(code)
        sched.outputs = dict(self.sites)
        io = tuple(
            [_io("in", n, r, t) for n, r, _, t in sched.inputs]
            + [_io("out", n, site, t) for site, (n, _, t) in sorted(self.sites.items())]
        )
        obj = seal(linked, ctx or KeyContext(), self.seed, io)
        self.stats["spilled"] = lowering.spilled
        self.stats["instructions"] = len(linked)
        self.stats["polarity"] = {pc: ins.consts[-1] & 1 for pc, ins in enumerate(linked)
                                  if OPCODES[ins.op].kind == "branch"}
        self.stats["registers"] = self.next_reg
        var_locs = {}
        for key, (reg, d) in self.var_finals.items():
            sym = self.sym_by_key.get(key)
            if sym is not None and sym.kind != "temp":
                var_locs[sym.name] = (reg, d)
        return CompileResult(obj, sched, self.final_db, var_locs, self.stats,
                             [str(i) for i in linked], list(self.storages.values()))


def _io(direction, name, loc, ctype):
    from ..isa import IoSlot

    return IoSlot(direction, name, loc, ctype)


def compile_program(prog: TypedProgram, seed: int, ctx: KeyContext | None = None, **kw) -> CompileResult:
    return Compiler(prog, seed, **kw).compile(ctx)
