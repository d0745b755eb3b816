"""Type checking: resolves names, annotates every expression with its type and
makes promotions and the usual arithmetic conversions explicit as casts."""

from __future__ import annotations

import copy
import itertools
from dataclasses import dataclass, field

from . import syntax as A
from .lexer import CompileError
from .parser import parse
from .srctypes import (
    BOOL, DOUBLE, FLOAT, INT, LLONG, UINT, VOID, Array, Basic, Pointer, Record, SrcType,
    VoidType, is_aggregate, is_arith, is_integer, is_scalar, is_subword, promote,
    usual_conversion,
)

_uids = itertools.count(1)


@dataclass(eq=False)
class VarSym:
    name: str
    ty: SrcType
    kind: str  # global, local, param, temp
    func: "FuncSym | None" = None
    pos: tuple | None = None
    uid: int = field(default_factory=lambda: next(_uids))

    @property
    def key(self) -> str:
        return f"{self.name}#{self.uid}"

    def __repr__(self) -> str:
        return f"<var {self.key}>"


@dataclass(eq=False)
class FuncSym:
    name: str
    ret: SrcType
    params: list
    defn: A.FuncDef | None = None
    parent: "FuncSym | None" = None
    pos: tuple | None = None
    uid: int = field(default_factory=lambda: next(_uids))
    interiors: list = field(default_factory=list)
    callees: list = field(default_factory=list)  # FuncSym per call expression

    @property
    def top(self) -> "FuncSym":
        f = self
        while f.parent is not None:
            f = f.parent
        return f

    def __repr__(self) -> str:
        return f"<func {self.name}#{self.uid}>"


@dataclass(eq=False)
class LabelSym:
    name: str
    block: A.Block
    func: FuncSym
    pos: tuple | None = None
    defined: bool = False
    uid: int = field(default_factory=lambda: next(_uids))
    scope_vars: list = field(default_factory=list)  # variables in scope at __label__


@dataclass
class TypedProgram:
    """Type-annotated program shared by the compiler and the reference interpreter."""

    ast: A.Program
    globals: list  # VarDecl nodes at file scope, in order
    functions: dict  # name -> FuncSym (file-scope functions)
    main: FuncSym

    def all_functions(self) -> list:
        out = []

        def walk(f):
            out.append(f)
            for g in f.interiors:
                walk(g)

        for f in self.functions.values():
            walk(f)
        return out


def _impure(e) -> bool:
    if isinstance(e, (A.Assign, A.IncDec, A.Call)):
        return True
    return any(_impure(c) for c in _children(e))


def _children(e):
    if isinstance(e, A.Unary):
        return [e.operand]
    if isinstance(e, A.Binary):
        return [e.left, e.right]
    if isinstance(e, A.Assign):
        return [e.target, e.value]
    if isinstance(e, A.IncDec):
        return [e.target]
    if isinstance(e, A.Cond):
        return [e.test, e.then, e.other]
    if isinstance(e, (A.Cast, A.Deref, A.AddrOf)):
        return [e.operand]
    if isinstance(e, A.Call):
        return list(e.args)
    if isinstance(e, A.Index):
        return [e.base, e.index]
    if isinstance(e, A.Member):
        return [e.base]
    return []


def int_literal_type(value: int, text: str) -> Basic:
    digits = text.rstrip("uUlL")
    suffix = text[len(digits):].lower()
    decimal = not (digits.startswith("0") and len(digits) > 1)
    unsigned = "u" in suffix
    longlong = "ll" in suffix
    if longlong:
        cands = ["ullong"] if unsigned else (["llong"] if decimal else ["llong", "ullong"])
    elif unsigned:
        cands = ["uint", "ullong"]
    elif decimal:
        cands = ["int", "llong"]
    else:
        cands = ["int", "uint", "llong", "ullong"]
    for c in cands:
        t = Basic(c)
        bits = t.info.bits
        limit = 1 << (bits - 1) if t.info.signed else 1 << bits
        if value < limit:
            return t
    return Basic("ullong")


def is_constant_expr(e) -> bool:
    if isinstance(e, (A.IntLit, A.FloatLit)):
        return True
    if isinstance(e, (A.Unary, A.Binary, A.Cast, A.Cond)):
        return all(is_constant_expr(c) for c in _children(e))
    return False


def union_path(e) -> bool:
    """True if the lvalue ``e`` is reached through a union member."""
    while True:
        if isinstance(e, A.Member):
            if e.arrow:
                rec = e.base.ty.elem
            else:
                rec = e.base.ty
            if rec.union:
                return True
            if e.arrow:
                return False
            e = e.base
        elif isinstance(e, A.Index) and isinstance(e.base.ty, Array):
            e = e.base
        else:
            return False


class Checker:
    def __init__(self, filename: str):
        self.filename = filename
        self.scopes: list[dict] = [{}]
        self.func: FuncSym | None = None
        self.loops = 0
        self.blocks: list = []  # (Block, label scope dict, declared-after-label tracking)

    def error(self, msg, node=None):
        raise CompileError(msg, getattr(node, "pos", None), self.filename)

    # -- scopes --------------------------------------------------------------
    def lookup(self, name: str, node=None):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        self.error(f"'{name}' undeclared", node)

    def declare(self, name: str, sym, node):
        if name == "emit":
            self.error("'emit' is reserved", node)
        if name in self.scopes[-1]:
            self.error(f"redeclaration of '{name}'", node)
        self.scopes[-1][name] = sym

    def visible_vars(self) -> list:
        seen: dict = {}
        for scope in self.scopes:
            for name, sym in scope.items():
                if isinstance(sym, VarSym):
                    seen[name] = sym
        return list(seen.values())

    # -- types ---------------------------------------------------------------
    def resolve_type(self, t: SrcType, node) -> SrcType:
        """Bind pointer types to the symbol of their restrict array."""
        if isinstance(t, Pointer):
            if t.array is None:
                self.error("pointer used without restrict binding", node)
            if "#" in t.array:
                return t
            sym = self.lookup(t.array, node)
            if not isinstance(sym, VarSym) or not isinstance(sym.ty, Array):
                self.error(f"restrict target '{t.array}' is not an array", node)
            if sym.ty.elem != t.elem:
                self.error(f"pointer element type {t.elem} does not match array '{t.array}'", node)
            return Pointer(t.elem, sym.key)
        if isinstance(t, Array):
            return Array(self.resolve_type(t.elem, node), t.length)
        return t

    def convert(self, e, to: SrcType, what: str = "assignment"):
        """Implicit conversion of rvalue ``e`` to type ``to``."""
        t = e.ty
        if t == to:
            return e
        if is_arith(t) and is_arith(to):
            return A.Cast(to, e, True, pos=e.pos, ty=to)
        if isinstance(to, Pointer) and isinstance(t, Pointer):
            self.error(f"incompatible pointer in {what}: {t.array.split('#')[0]} vs {to.array.split('#')[0]}", e)
        self.error(f"incompatible types in {what}: {t} to {to}", e)

    def cast_to(self, e, to: Basic):
        if e.ty == to:
            return e
        return A.Cast(to, e, True, pos=e.pos, ty=to)

    # -- program -------------------------------------------------------------
    def program(self, prog: A.Program) -> TypedProgram:
        globals_ = []
        functions: dict[str, FuncSym] = {}
        for item in prog.items:
            if isinstance(item, A.VarDecl):
                self.var_decl(item, "global")
                globals_.append(item)
            elif isinstance(item, A.FuncDef):
                self.func_def(item, functions)
            elif isinstance(item, A.RecordDecl):
                pass
            else:
                self.error("unexpected item at file scope", item)
        for f in functions.values():
            if f.defn is None or f.defn.body is None:
                for g in functions.values():
                    if any(c is f for c in g.callees):
                        self.error(f"function '{f.name}' is called but never defined", f)
        main = functions.get("main")
        if main is None or main.defn is None or main.defn.body is None:
            raise CompileError("no definition of 'main'", None, self.filename)
        for p in main.params:
            if not isinstance(p.ty, Basic):
                self.error("parameters of main must be basic types", p)
        for f in self.all_calls(functions):
            if f.name == "main" and f.parent is None:
                self.error("main cannot be called", main.defn)
        return TypedProgram(prog, globals_, functions, main)

    def all_calls(self, functions):
        for f in functions.values():
            stack = [f]
            while stack:
                g = stack.pop()
                yield from g.callees
                stack += g.interiors

    def func_def(self, fd: A.FuncDef, functions: dict | None, parent: FuncSym | None = None):
        if fd.name == "emit":
            self.error("'emit' is reserved", fd)
        ret = fd.ret
        if not (is_scalar(ret) or isinstance(ret, VoidType)):
            self.error("functions must return a scalar or void", fd)
        ret = self.resolve_type(ret, fd)
        params = []
        for p in fd.params:
            pty = self.resolve_type(p.type, p)
            if not is_scalar(pty):
                self.error("aggregate parameters are not supported", p)
            params.append(VarSym(p.name, pty, "param", pos=p.pos))
        existing = self.scopes[-1].get(fd.name)
        if parent is None and isinstance(existing, FuncSym):
            sig = (existing.ret, [q.ty for q in existing.params])
            if sig != (ret, [q.ty for q in params]):
                self.error(f"conflicting types for '{fd.name}'", fd)
            if fd.body is not None and existing.defn is not None and existing.defn.body is not None:
                self.error(f"redefinition of '{fd.name}'", fd)
            fsym = existing
            if fd.body is not None:
                fsym.params = params
                fsym.defn = fd
        else:
            fsym = FuncSym(fd.name, ret, params, fd, parent, fd.pos)
            self.declare(fd.name, fsym, fd)
            if functions is not None:
                functions[fd.name] = fsym
            if parent is not None:
                parent.interiors.append(fsym)
        fd.sym = fsym
        for p, sym in zip(fd.params, fsym.params):
            p.sym = sym
        if fd.body is None:
            return
        saved = (self.func, self.loops, self.blocks)
        self.func, self.loops, self.blocks = fsym, 0, []
        self.scopes.append({})
        for p, sym in zip(fd.params, params):
            sym.func = fsym
            self.declare(p.name, sym, p)
        self.block(fd.body, new_scope=False)
        self.scopes.pop()
        self.func, self.loops, self.blocks = saved

    # -- statements ----------------------------------------------------------
    def block(self, b: A.Block, new_scope: bool = True):
        if new_scope:
            self.scopes.append({})
        labels: dict[str, LabelSym] = {}
        self.blocks.append((b, labels))
        for s in b.items:
            self.stmt(s, labels)
        for lab in labels.values():
            if not lab.defined:
                self.error(f"label '{lab.name}' declared but not defined", b)
        self.blocks.pop()
        if new_scope:
            self.scopes.pop()

    def find_label(self, name, node) -> LabelSym:
        for _, labels in reversed(self.blocks):
            if name in labels:
                return labels[name]
        self.error(f"label '{name}' used without a prior __label__ declaration", node)

    def stmt(self, s, labels: dict | None = None):
        if isinstance(s, A.VarDecl):
            if labels is not None:
                for lab in labels.values():
                    if not lab.defined:
                        self.error(
                            f"'{s.name}' is declared between '__label__ {lab.name}' and its label", s
                        )
            self.var_decl(s, "local")
        elif isinstance(s, A.RecordDecl):
            pass
        elif isinstance(s, A.FuncDef):
            self.interior(s)
        elif isinstance(s, A.ExprStmt):
            s.expr = self.expr(s.expr, void_ok=True)
        elif isinstance(s, A.Emit):
            s.value = self.rvalue(s.value)
            if not is_scalar(s.value.ty) or isinstance(s.value.ty, Pointer):
                self.error("emit needs an arithmetic value", s)
        elif isinstance(s, A.Block):
            self.block(s)
        elif isinstance(s, A.If):
            s.test = self.test(s.test)
            self.sub(s.then)
            if s.other is not None:
                self.sub(s.other)
        elif isinstance(s, (A.While, A.DoWhile)):
            s.test = self.test(s.test)
            self.loops += 1
            self.sub(s.body)
            self.loops -= 1
        elif isinstance(s, A.For):
            self.scopes.append({})
            if s.init is not None:
                if isinstance(s.init, A.Block):
                    for d in s.init.items:
                        self.var_decl(d, "local")
                elif isinstance(s.init, A.VarDecl):
                    self.var_decl(s.init, "local")
                else:
                    self.stmt(s.init)
            if s.test is not None:
                s.test = self.test(s.test)
            if s.step is not None:
                s.step = self.expr(s.step, void_ok=True)
            self.loops += 1
            self.sub(s.body)
            self.loops -= 1
            self.scopes.pop()
        elif isinstance(s, A.Return):
            ret = self.func.ret
            if s.value is None:
                if not isinstance(ret, VoidType):
                    self.error("return without a value in non-void function", s)
            else:
                if isinstance(ret, VoidType):
                    self.error("return with a value in void function", s)
                s.value = self.convert(self.rvalue(s.value), ret, "return")
        elif isinstance(s, (A.Break, A.Continue)):
            if self.loops == 0:
                self.error(f"'{'break' if isinstance(s, A.Break) else 'continue'}' outside a loop", s)
        elif isinstance(s, A.Goto):
            s.sym = self.find_label(s.label, s)
        elif isinstance(s, A.LabelDecl):
            if labels is None:
                self.error("__label__ must appear directly in a block", s)
            s.syms = []
            for name in s.names:
                if name in labels:
                    self.error(f"duplicate label declaration '{name}'", s)
                lab = LabelSym(name, self.blocks[-1][0], self.func, s.pos)
                lab.scope_vars = self.visible_vars()
                labels[name] = lab
                s.syms.append(lab)
        elif isinstance(s, A.Labeled):
            if labels is None or s.label not in labels:
                self.error(f"label '{s.label}' must be declared with __label__ in the enclosing block", s)
            lab = labels[s.label]
            if lab.defined:
                self.error(f"duplicate label '{s.label}'", s)
            lab.defined = True
            s.sym = lab
            self.sub(s.stmt)
        elif isinstance(s, A.Empty):
            pass
        else:
            self.error(f"unsupported statement {type(s).__name__}", s)

    def sub(self, s):
        # a nested statement that is not a block gets no label scope of its own
        self.stmt(s, None)

    def interior(self, fd: A.FuncDef):
        self.func_def(fd, None, parent=self.func)

    def test(self, e):
        e = self.rvalue(e)
        if not is_scalar(e.ty):
            self.error("condition must be scalar", e)
        return e

    def var_decl(self, d: A.VarDecl, kind: str):
        ty = self.resolve_type(d.type, d)
        if isinstance(ty, VoidType):
            self.error(f"variable '{d.name}' declared void", d)
        sym = VarSym(d.name, ty, kind, self.func, d.pos)
        inits = []
        if d.init is not None:
            inits = self.initializer(ty, d.init, (), kind == "global")
        d.inits = inits
        self.declare(d.name, sym, d)
        d.sym = sym

    def initializer(self, ty, init, path, constant) -> list:
        if isinstance(init, A.InitList):
            if isinstance(ty, Array):
                if len(init.items) > ty.length:
                    self.error("too many initializers", init)
                out = []
                for i, item in enumerate(init.items):
                    out += self.initializer(ty.elem, item, path + (i,), constant)
                return out
            if isinstance(ty, Record):
                fields = ty.fields[:1] if ty.union else ty.fields
                if len(init.items) > len(fields):
                    self.error("too many initializers", init)
                out = []
                for (fname, ftype), item in zip(fields, init.items):
                    out += self.initializer(ftype, item, path + (fname,), constant)
                return out
            if len(init.items) != 1:
                self.error("scalar initializer must have one element", init)
            return self.initializer(ty, init.items[0], path, constant)
        if is_aggregate(ty):
            self.error("aggregate initializer needs braces", init)
        if constant and not is_constant_expr(init):
            self.error("initializer element is not constant", init)
        e = self.convert(self.rvalue(init), ty, "initialization")
        return [(path, e)]

    # -- expressions ---------------------------------------------------------
    def rvalue(self, e, void_ok: bool = False):
        e = self.expr(e, void_ok)
        t = e.ty
        if isinstance(t, Array):
            return self.decay(e)
        if isinstance(t, Record):
            self.error("struct and union values are not supported here", e)
        if isinstance(t, VoidType) and not void_ok:
            self.error("void value not ignored", e)
        if is_subword(t) and isinstance(e, (A.Index, A.Member)) and union_path(e):
            # union punning: read the raw word, then narrow it
            e.ty = INT
            return A.Cast(t, e, True, pos=e.pos, ty=t)
        return e

    def decay(self, e):
        if not (isinstance(e, A.Name) and isinstance(e.sym, VarSym)):
            self.error("only named arrays can be used as pointers", e)
        if isinstance(e.ty.elem, Array):
            self.error("multidimensional arrays cannot decay to pointers", e)
        zero = A.IntLit(0, "0", pos=e.pos, ty=INT)
        idx = A.Index(e, zero, pos=e.pos, ty=e.ty.elem)
        return A.AddrOf(idx, pos=e.pos, ty=Pointer(e.ty.elem, e.sym.key))

    def lvalue(self, e):
        e = self.expr(e)
        if not isinstance(e, (A.Name, A.Index, A.Member, A.Deref)):
            self.error("expression is not assignable", e)
        if isinstance(e, A.Name) and not isinstance(e.sym, VarSym):
            self.error(f"'{e.id}' is not a variable", e)
        if not is_scalar(e.ty):
            self.error("only scalar objects can be assigned", e)
        return e

    def expr(self, e, void_ok: bool = False):
        method = getattr(self, "x_" + type(e).__name__, None)
        if method is None:
            self.error(f"unsupported expression {type(e).__name__}", e)
        out = method(e)
        if isinstance(out.ty, VoidType) and not void_ok:
            self.error("void value not ignored", e)
        return out

    def x_IntLit(self, e):
        e.ty = int_literal_type(e.value, e.text or str(e.value))
        return e

    def x_FloatLit(self, e):
        e.ty = FLOAT if e.single else DOUBLE
        return e

    def x_Name(self, e):
        sym = self.lookup(e.id, e)
        if isinstance(sym, FuncSym):
            self.error(f"function '{e.id}' used as a value", e)
        if self.func is not None and sym.func is not None and sym.func is not self.func:
            # variable of an enclosing function, seen from an interior function
            pass
        e.sym = sym
        e.ty = sym.ty
        return e

    def x_Unary(self, e):
        e.operand = self.rvalue(e.operand)
        t = e.operand.ty
        if e.op == "!":
            if not is_scalar(t):
                self.error("invalid operand to '!'", e)
            e.ty = INT
            return e
        if not is_arith(t) or (e.op == "~" and not is_integer(t)):
            self.error(f"invalid operand to unary '{e.op}'", e)
        pt = promote(t)
        e.operand = self.cast_to(e.operand, pt)
        e.ty = pt
        return e

    def x_Binary(self, e):
        op = e.op
        e.left = self.rvalue(e.left)
        e.right = self.rvalue(e.right)
        lt, rt = e.left.ty, e.right.ty
        if op in ("&&", "||"):
            if not (is_scalar(lt) and is_scalar(rt)):
                self.error(f"invalid operands to '{op}'", e)
            e.ty = INT
            return e
        if isinstance(lt, Pointer) or isinstance(rt, Pointer):
            return self.pointer_binary(e)
        if not (is_arith(lt) and is_arith(rt)):
            self.error(f"invalid operands to '{op}'", e)
        if op in ("<<", ">>"):
            if not (is_integer(lt) and is_integer(rt)):
                self.error(f"invalid operands to '{op}'", e)
            pt = promote(lt)
            e.left = self.cast_to(e.left, pt)
            e.right = self.cast_to(e.right, INT)
            e.ty = pt
            return e
        if op in ("%", "&", "|", "^") and not (is_integer(lt) and is_integer(rt)):
            self.error(f"invalid operands to '{op}'", e)
        ct = usual_conversion(lt, rt)
        e.left = self.cast_to(e.left, ct)
        e.right = self.cast_to(e.right, ct)
        e.ty = INT if op in ("==", "!=", "<", ">", "<=", ">=") else ct
        return e

    def pointer_binary(self, e):
        op = e.op
        lt, rt = e.left.ty, e.right.ty
        if op == "+" and isinstance(rt, Pointer) and is_integer(lt):
            e.left, e.right = e.right, e.left
            lt, rt = rt, lt
        if op in ("+", "-") and isinstance(lt, Pointer) and is_integer(rt):
            e.right = self.cast_to(e.right, INT)
            e.ty = lt
            return e
        if isinstance(lt, Pointer) and isinstance(rt, Pointer) and lt == rt:
            if op == "-":
                e.ty = INT
                return e
            if op in ("==", "!=", "<", ">", "<=", ">="):
                e.ty = INT
                return e
        if isinstance(lt, Pointer) and isinstance(rt, Pointer) and op in ("-", "==", "!=", "<", ">", "<=", ">="):
            self.error("pointers into different arrays cannot be combined", e)
        self.error(f"invalid pointer operands to '{op}'", e)

    def x_Assign(self, e):
        if e.op != "=":
            if _impure(e.target):
                self.error("compound assignment target must not have side effects", e)
            copy_target = copy.deepcopy(e.target)
            target = self.lvalue(e.target)
            binop = A.Binary(e.op[:-1], copy_target, e.value, pos=e.pos)
            value = self.x_Binary(binop)
            if isinstance(target.ty, Pointer) and not isinstance(value.ty, Pointer):
                self.error(f"invalid pointer operands to '{e.op}'", e)
            e.op = "="
            e.target = target
            e.value = self.convert(value, target.ty)
            e.ty = target.ty
            return e
        e.target = self.lvalue(e.target)
        e.value = self.convert(self.rvalue(e.value), e.target.ty)
        e.ty = e.target.ty
        return e

    def x_IncDec(self, e):
        e.target = self.lvalue(e.target)
        e.ty = e.target.ty
        return e

    def x_Cond(self, e):
        e.test = self.test(e.test)
        e.then = self.rvalue(e.then)
        e.other = self.rvalue(e.other)
        a, b = e.then.ty, e.other.ty
        if is_arith(a) and is_arith(b):
            ct = usual_conversion(a, b)
            e.then = self.cast_to(e.then, ct)
            e.other = self.cast_to(e.other, ct)
            e.ty = ct
        elif isinstance(a, Pointer) and a == b:
            e.ty = a
        else:
            self.error("incompatible operand types in conditional expression", e)
        return e

    def x_Cast(self, e):
        e.operand = self.rvalue(e.operand)
        if not isinstance(e.to, Basic):
            self.error(f"cannot cast to {e.to}", e)
        if not is_arith(e.operand.ty):
            self.error(f"cannot cast {e.operand.ty} to {e.to}", e)
        e.ty = e.to
        return e

    def x_Call(self, e):
        if e.func == "emit":
            self.error("emit is a statement, not an expression", e)
        sym = self.lookup(e.func, e)
        if not isinstance(sym, FuncSym):
            self.error(f"'{e.func}' is not a function", e)
        f = self.func
        while f is not None:
            if f is sym and sym.parent is not None:
                self.error("interior functions cannot be recursive", e)
            f = f.parent
        if len(e.args) != len(sym.params):
            self.error(f"'{e.func}' expects {len(sym.params)} arguments, got {len(e.args)}", e)
        e.args = [
            self.convert(self.rvalue(a), p.ty, "argument")
            for a, p in zip(e.args, sym.params)
        ]
        e.sym = sym
        e.ty = sym.ret
        if self.func is not None:
            self.func.callees.append(sym)
        return e

    def x_Index(self, e):
        base = self.expr(e.base)
        if isinstance(base.ty, Pointer):
            base = self.rvalue(base)
            elem = base.ty.elem
        elif isinstance(base.ty, Array):
            if isinstance(base, A.Name) and not isinstance(base.sym, VarSym):
                self.error("subscripted value is not an array", e)
            elem = base.ty.elem
        else:
            self.error("subscripted value is neither array nor pointer", e)
        e.base = base
        idx = self.rvalue(e.index)
        if not is_integer(idx.ty):
            self.error("array subscript is not an integer", e)
        e.index = self.cast_to(idx, INT)
        e.ty = elem
        return e

    def x_Member(self, e):
        if e.arrow:
            base = self.rvalue(e.base)
            if not (isinstance(base.ty, Pointer) and isinstance(base.ty.elem, Record)):
                self.error("'->' applied to a non-pointer-to-struct", e)
            rec = base.ty.elem
        else:
            base = self.expr(e.base)
            if not isinstance(base.ty, Record):
                self.error("member access on a non-struct value", e)
            if not isinstance(base, (A.Name, A.Index, A.Member, A.Deref)):
                self.error("member access needs an object", e)
            rec = base.ty
        try:
            e.ty = rec.field_type(e.field)
        except KeyError:
            self.error(f"{rec} has no member '{e.field}'", e)
        e.base = base
        return e

    def x_Deref(self, e):
        e.operand = self.rvalue(e.operand)
        if not isinstance(e.operand.ty, Pointer):
            self.error("dereference of a non-pointer", e)
        e.ty = e.operand.ty.elem
        return e

    def x_AddrOf(self, e):
        inner = self.expr(e.operand)
        if isinstance(inner, A.Index):
            b = inner.base
            if isinstance(b.ty, Pointer):
                e.operand = inner
                e.ty = b.ty
                return e
            if isinstance(b, A.Name) and isinstance(b.ty, Array) and not isinstance(b.ty.elem, Array):
                e.operand = inner
                e.ty = Pointer(b.ty.elem, b.sym.key)
                return e
        if isinstance(inner, A.Deref):
            e.operand = inner
            e.ty = inner.operand.ty
            return e
        self.error("'&' is only supported on elements of named arrays", e)


def typecheck(prog: A.Program) -> TypedProgram:
    return Checker(prog.filename).program(prog)


def check_source(src: str, filename: str = "<input>") -> TypedProgram:
    return typecheck(parse(src, filename))
