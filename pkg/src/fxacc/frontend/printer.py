"""Pretty-printer: parsed syntax tree back to C source."""

from __future__ import annotations

from . import syntax as A
from .srctypes import Array, Basic, Pointer, Record, VoidType

_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5, "==": 6, "!=": 6, "<": 7, ">": 7,
    "<=": 7, ">=": 7, "<<": 8, ">>": 8, "+": 9, "-": 9, "*": 10, "/": 10, "%": 10,
}


def type_base(t) -> str:
    while isinstance(t, Array):
        t = t.elem
    if isinstance(t, Pointer):
        t = t.elem
    if isinstance(t, Record):
        return f"{'union' if t.union else 'struct'} {t.tag}"
    return str(t)


def declaration(name: str, t) -> str:
    dims = ""
    while isinstance(t, Array):
        dims += f"[{t.length}]"
        t = t.elem
    if isinstance(t, Pointer):
        return f"restrict {t.array} {type_base(t)} *{name}{dims}"
    return f"{type_base(t)} {name}{dims}"


def expr(e, prec: int = 0) -> str:
    if isinstance(e, A.IntLit):
        return e.text or str(e.value)
    if isinstance(e, A.FloatLit):
        return e.text
    if isinstance(e, A.Name):
        return e.id
    if isinstance(e, A.Binary):
        p = _PREC[e.op]
        s = f"{expr(e.left, p)} {e.op} {expr(e.right, p + 1)}"
        return f"({s})" if p < prec else s
    if isinstance(e, A.Assign):
        s = f"{expr(e.target, 12)} {e.op} {expr(e.value, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(e, A.Cond):
        s = f"{expr(e.test, 1)} ? {expr(e.then, 0)} : {expr(e.other, 1)}"
        return f"({s})" if prec > 0 else s
    if isinstance(e, (A.Unary, A.Cast, A.Deref, A.AddrOf)) or (
        isinstance(e, A.IncDec) and e.prefix
    ):
        s = _prefix(e)
        return f"({s})" if prec > 11 else s
    if isinstance(e, A.IncDec):
        return f"{expr(e.target, 12)}{e.op}"
    if isinstance(e, A.Call):
        return f"{e.func}({', '.join(expr(a) for a in e.args)})"
    if isinstance(e, A.Index):
        return f"{expr(e.base, 12)}[{expr(e.index)}]"
    if isinstance(e, A.Member):
        return f"{expr(e.base, 12)}{'->' if e.arrow else '.'}{e.field}"
    raise TypeError(f"cannot print {type(e).__name__}")


def _prefix(e) -> str:
    if isinstance(e, A.Unary):
        return f"{e.op}({expr(e.operand)})" if e.op in "-+" else f"{e.op}{expr(e.operand, 11)}"
    if isinstance(e, A.IncDec):
        return f"{e.op}{expr(e.target, 11)}"
    if isinstance(e, A.Cast):
        return f"({type_base(e.to)}){expr(e.operand, 11)}"
    if isinstance(e, A.Deref):
        return f"*{expr(e.operand, 11)}"
    return f"&{expr(e.operand, 11)}"


def init(i) -> str:
    if isinstance(i, A.InitList):
        return "{" + ", ".join(init(x) for x in i.items) + "}"
    return expr(i)


class _Printer:
    def __init__(self):
        self.lines: list[str] = []
        self.depth = 0

    def emit(self, s: str):
        self.lines.append("    " * self.depth + s)

    def item(self, s):
        if isinstance(s, A.RecordDecl):
            r = s.type
            self.emit(f"{'union' if r.union else 'struct'} {r.tag} {{")
            self.depth += 1
            for n, t in r.fields:
                self.emit(declaration(n, t) + ";")
            self.depth -= 1
            self.emit("};")
        elif isinstance(s, A.VarDecl):
            tail = f" = {init(s.init)}" if s.init is not None else ""
            self.emit(declaration(s.name, s.type) + tail + ";")
        elif isinstance(s, A.FuncDef):
            params = ", ".join(declaration(p.name, p.type) for p in s.params) or "void"
            head = f"{type_base(s.ret)} {s.name}({params})"
            if s.body is None:
                self.emit(head + ";")
            else:
                self.emit(head + " {")
                self.body(s.body)
                self.emit("}")
        else:
            self.stmt(s)

    def body(self, b: A.Block):
        self.depth += 1
        for s in b.items:
            self.item(s)
        self.depth -= 1

    def sub(self, s):
        if isinstance(s, A.Block):
            self.emit("{")
            self.body(s)
            self.emit("}")
        else:
            self.depth += 1
            self.item(s)
            self.depth -= 1

    def stmt(self, s):
        if isinstance(s, A.Block):
            self.emit("{")
            self.body(s)
            self.emit("}")
        elif isinstance(s, A.ExprStmt):
            self.emit(expr(s.expr) + ";")
        elif isinstance(s, A.Emit):
            self.emit(f"emit({expr(s.value)});")
        elif isinstance(s, A.If):
            self.emit(f"if ({expr(s.test)})")
            self.sub(s.then)
            if s.other is not None:
                self.emit("else")
                self.sub(s.other)
        elif isinstance(s, A.While):
            self.emit(f"while ({expr(s.test)})")
            self.sub(s.body)
        elif isinstance(s, A.DoWhile):
            self.emit("do")
            self.sub(s.body)
            self.emit(f"while ({expr(s.test)});")
        elif isinstance(s, A.For):
            if isinstance(s.init, A.VarDecl):
                tail = f" = {init(s.init.init)}" if s.init.init is not None else ""
                first = declaration(s.init.name, s.init.type) + tail
            elif isinstance(s.init, A.ExprStmt):
                first = expr(s.init.expr)
            elif s.init is None:
                first = ""
            else:
                raise TypeError("multi-declaration for-init cannot be printed")
            test = expr(s.test) if s.test is not None else ""
            step = expr(s.step) if s.step is not None else ""
            self.emit(f"for ({first}; {test}; {step})")
            self.sub(s.body)
        elif isinstance(s, A.Return):
            self.emit("return;" if s.value is None else f"return {expr(s.value)};")
        elif isinstance(s, A.Break):
            self.emit("break;")
        elif isinstance(s, A.Continue):
            self.emit("continue;")
        elif isinstance(s, A.Goto):
            self.emit(f"goto {s.label};")
        elif isinstance(s, A.Labeled):
            self.emit(f"{s.label}:")
            self.sub(s.stmt)
        elif isinstance(s, A.LabelDecl):
            self.emit(f"__label__ {', '.join(s.names)};")
        elif isinstance(s, A.Empty):
            self.emit(";")
        else:
            raise TypeError(f"cannot print {type(s).__name__}")


def to_source(prog: A.Program) -> str:
    p = _Printer()
    for item in prog.items:
        p.item(item)
    return "\n".join(p.lines) + "\n"
