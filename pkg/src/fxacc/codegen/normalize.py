"""Desugaring of side effects and value-context control flow into statements.

Evaluation order matches the reference interpreter: left to right, assignment
targets before assigned values.  When a later operand has side effects, earlier
operand values are captured in temporaries first.
"""

from __future__ import annotations

import itertools

from ..frontend import syntax as A
from ..frontend.srctypes import (
    BOOL, DOUBLE, FLOAT, INT, Basic, Pointer, VoidType, promote, usual_conversion,
)
from ..frontend.typecheck import FuncSym, VarSym
from ..oracle import output_name
from . import ir

_COMPARISONS = {"==", "!=", "<", ">", "<=", ">="}


def _is_const(e) -> bool:
    return isinstance(e, (A.IntLit, A.FloatLit))


class Normalizer:
    def __init__(self):
        self.counter = itertools.count()
        self.temps: list = []

    def temp(self, ty) -> A.Name:
        sym = VarSym(f"$t{next(self.counter)}", ty, "temp")
        self.temps.append(sym)
        return A.Name(sym.name, ty=ty, sym=sym)

    def use(self, name: A.Name) -> A.Name:
        return A.Name(name.id, ty=name.ty, sym=name.sym)

    def new_temp(self, ty, out: list) -> A.Name:
        t = self.temp(ty)
        out.append(ir.IDecl(t.sym))
        return t

    # -- expressions ---------------------------------------------------------
    def sequence(self, parts: list) -> tuple[list, list]:
        """Normalize sibling expressions in order, capturing earlier values
        when a later sibling has side effects."""
        results = [self.pure(p) for p in parts]
        stmts: list = []
        values: list = []
        for i, (s, v) in enumerate(results):
            if s:
                for j in range(len(values)):
                    values[j] = self.capture(values[j], stmts)
            stmts += s
            values.append(v)
        return stmts, values

    def capture(self, e, out: list):
        if e is None or _is_const(e):
            return e
        if isinstance(e, A.Name) and e.sym.kind == "temp":
            return e
        t = self.new_temp(e.ty, out)
        out.append(ir.IAssign(self.use(t), e))
        return self.use(t)

    def pure(self, e) -> tuple[list, object]:
        m = getattr(self, "p_" + type(e).__name__)
        return m(e)

    def p_IntLit(self, e):
        return [], e

    p_FloatLit = p_IntLit

    def p_Name(self, e):
        return [], e

    def p_Unary(self, e):
        if e.op == "!":
            return self.boolean(e)
        s, v = self.pure(e.operand)
        return s, A.Unary(e.op, v, pos=e.pos, ty=e.ty)

    def p_Binary(self, e):
        if e.op in ("&&", "||") or e.op in _COMPARISONS:
            return self.boolean(e)
        s, (l, r) = self.sequence([e.left, e.right])
        return s, A.Binary(e.op, l, r, pos=e.pos, ty=e.ty)

    def p_Cast(self, e):
        if e.to == BOOL and e.operand.ty != BOOL:
            return self.boolean(e.operand, ty=BOOL)
        s, v = self.pure(e.operand)
        return s, A.Cast(e.to, v, e.implicit, pos=e.pos, ty=e.ty)

    def boolean(self, e, ty=INT):
        stmts, c = self.cond(e)
        t = self.new_temp(ty, stmts)
        one = A.IntLit(1, "1", ty=INT)
        stmts.append(ir.IIf(c, [ir.IAssign(self.use(t), self.cast(one, ty))], []))
        return stmts, self.use(t)

    def cast(self, e, ty):
        return e if e.ty == ty else A.Cast(ty, e, True, ty=ty)

    def p_Cond(self, e):
        stmts, c = self.cond(e.test)
        t = self.new_temp(e.ty, stmts)
        s1, v1 = self.pure(e.then)
        s2, v2 = self.pure(e.other)
        then = s1 + [ir.IAssign(self.use(t), v1)]
        other = s2 + [ir.IAssign(self.use(t), v2)]
        stmts.append(ir.IIf(c, [ir.IBlock(then)], [ir.IBlock(other)]))
        return stmts, self.use(t)

    def p_Assign(self, e):
        stmts, target = self.lvalue(e.target)
        s, v = self.pure(e.value)
        if s:
            target = self.freeze_lvalue(target, stmts)
        stmts += s
        t = self.new_temp(e.ty, stmts)
        stmts.append(ir.IAssign(self.use(t), v))
        stmts.append(ir.IAssign(target, self.use(t)))
        return stmts, self.use(t)

    def p_IncDec(self, e):
        stmts, target = self.lvalue(e.target)
        old = self.new_temp(e.ty, stmts)
        stmts.append(ir.IAssign(self.use(old), target))
        new = self.new_temp(e.ty, stmts)
        if e.ty == BOOL:
            if e.op == "++":
                value = A.Cast(BOOL, A.IntLit(1, "1", ty=INT), True, ty=BOOL)
            else:
                s, value = self.boolean(A.Unary("!", self.use(old), ty=INT), ty=BOOL)
                stmts += s
        else:
            value = self.stepped(self.use(old), e.op, e.ty)
        stmts.append(ir.IAssign(self.use(new), value))
        stmts.append(ir.IAssign(target, self.use(new)))
        return stmts, self.use(new if e.prefix else old)

    def stepped(self, v, op: str, ty):
        bop = "+" if op == "++" else "-"
        if isinstance(ty, Pointer):
            return A.Binary(bop, v, A.IntLit(1, "1", ty=INT), ty=ty)
        if ty.info.is_float:
            one = A.FloatLit("1.0f" if ty == FLOAT else "1.0", ty=ty)
            return A.Binary(bop, v, one, ty=ty)
        pt = usual_conversion(ty, INT)
        b = A.Binary(bop, self.cast(v, pt), A.IntLit(1, "1", ty=INT) if pt == INT else
                     A.Cast(pt, A.IntLit(1, "1", ty=INT), True, ty=pt), ty=pt)
        return self.cast(b, ty)

    def p_Call(self, e):
        stmts, args = self.sequence(list(e.args))
        if isinstance(e.ty, VoidType):
            stmts.append(ir.ICall(None, e.sym, args))
            return stmts, None
        t = self.new_temp(e.ty, stmts)
        stmts.append(ir.ICall(self.use(t), e.sym, args))
        return stmts, self.use(t)

    def p_Index(self, e):
        if isinstance(e.base.ty, Pointer):
            s, (b, i) = self.sequence([e.base, e.index])
        else:
            sb, b = self.lvalue(e.base)
            si, i = self.pure(e.index)
            if si:
                b = self.freeze_lvalue(b, sb)
            s = sb + si
        return s, A.Index(b, i, pos=e.pos, ty=e.ty)

    def p_Member(self, e):
        if e.arrow:
            s, b = self.pure(e.base)
        else:
            s, b = self.lvalue(e.base)
        return s, A.Member(b, e.field, e.arrow, pos=e.pos, ty=e.ty)

    def p_Deref(self, e):
        s, v = self.pure(e.operand)
        return s, A.Deref(v, pos=e.pos, ty=e.ty)

    def p_AddrOf(self, e):
        s, v = self.lvalue(e.operand)
        return s, A.AddrOf(v, pos=e.pos, ty=e.ty)

    # -- lvalues ---------------------------------------------------------------
    def lvalue(self, e):
        if isinstance(e, A.Name):
            return [], e
        if isinstance(e, (A.Index, A.Member, A.Deref)):
            return self.pure(e)
        raise TypeError(f"not an lvalue: {type(e).__name__}")

    def freeze_lvalue(self, e, out: list):
        """Capture the address-forming operands of an lvalue."""
        if isinstance(e, A.Name):
            return e
        if isinstance(e, A.Index):
            if isinstance(e.base.ty, Pointer):
                base = self.capture(e.base, out)
            else:
                base = self.freeze_lvalue(e.base, out)
            return A.Index(base, self.capture(e.index, out), pos=e.pos, ty=e.ty)
        if isinstance(e, A.Member):
            base = self.capture(e.base, out) if e.arrow else self.freeze_lvalue(e.base, out)
            return A.Member(base, e.field, e.arrow, pos=e.pos, ty=e.ty)
        if isinstance(e, A.Deref):
            return A.Deref(self.capture(e.operand, out), pos=e.pos, ty=e.ty)
        return e

    # -- conditions ------------------------------------------------------------
    def cond(self, e) -> tuple[list, object]:
        if isinstance(e, A.Unary) and e.op == "!":
            s, c = self.cond(e.operand)
            return s, ir.Not(c)
        if isinstance(e, A.Binary) and e.op in ("&&", "||"):
            sa, ca = self.cond(e.left)
            sb, cb = self.cond(e.right)
            if not sb:
                return sa, (ir.And if e.op == "&&" else ir.Or)(ca, cb)
            t = self.new_temp(INT, sa)
            one = A.IntLit(1, "1", ty=INT)
            set_t = [ir.IAssign(self.use(t), one)]
            inner = sb + [ir.IIf(cb, list(set_t), [])]
            if e.op == "&&":
                sa.append(ir.IIf(ca, [ir.IBlock(inner)], []))
            else:
                sa.append(ir.IIf(ca, list(set_t), [ir.IBlock(inner)]))
            return sa, ir.Truth(self.use(t))
        if isinstance(e, A.Binary) and e.op in _COMPARISONS:
            s, (l, r) = self.sequence([e.left, e.right])
            return s, ir.Cmp(e.op, l, r)
        if isinstance(e, A.Cast) and e.to == BOOL and e.operand.ty != BOOL:
            return self.cond(e.operand)
        s, v = self.pure(e)
        return s, ir.Truth(v)

    # -- statements ------------------------------------------------------------
    def scoped(self, make) -> list:
        """Run ``make`` and wrap its output in a block owning the new temporaries."""
        saved = self.temps
        self.temps = []
        out = make()
        fresh = self.temps
        self.temps = saved
        if fresh:
            return [ir.IBlock(out, temps_only=True)]
        return out

    def block(self, items) -> list:
        out: list = []
        for s in items:
            out += self.stmt(s)
        return out

    def stmt(self, s) -> list:
        if isinstance(s, A.Labeled):
            return [ir.ILabel(s.sym)] + self.stmt(s.stmt)
        if isinstance(s, A.Block):
            return [ir.IBlock(self.block(s.items))]
        if isinstance(s, (A.While, A.DoWhile, A.For)):
            return self.loop(s)
        if isinstance(s, A.FuncDef):
            return [ir.IInterior(s.sym, self.block(s.body.items))]
        return self.scoped(lambda: self.simple(s))

    def simple(self, s) -> list:
        if isinstance(s, A.VarDecl):
            return self.decl(s)
        if isinstance(s, A.ExprStmt):
            return self.effect(s.expr)
        if isinstance(s, A.Emit):
            st, v = self.pure(s.value)
            return st + [ir.IEmit(v, output_name(s))]
        if isinstance(s, A.If):
            st, c = self.cond(s.test)
            then = self.stmt(s.then)
            other = self.stmt(s.other) if s.other is not None else []
            return st + [ir.IIf(c, then, other)]
        if isinstance(s, A.Return):
            if s.value is None:
                return [ir.IReturn(None)]
            st, v = self.pure(s.value)
            return st + [ir.IReturn(v)]
        if isinstance(s, A.Break):
            return [ir.IBreak()]
        if isinstance(s, A.Continue):
            return [ir.IContinue()]
        if isinstance(s, A.Goto):
            return [ir.IGoto(s.sym)]
        if isinstance(s, A.LabelDecl):
            return [ir.ILabelDecl(list(s.syms))]
        if isinstance(s, (A.Empty, A.RecordDecl)):
            return []
        raise TypeError(f"cannot lower {type(s).__name__}")

    def decl(self, d: A.VarDecl) -> list:
        paths = [p for p, _ in d.inits or []]
        stmts, values = self.sequence([e for _, e in d.inits or []])
        return stmts + [ir.IDecl(d.sym, list(zip(paths, values)))]

    def effect(self, e) -> list:
        """Statements for an expression evaluated only for its side effects."""
        if isinstance(e, A.Assign):
            stmts, target = self.lvalue(e.target)
            s, v = self.pure(e.value)
            if s:
                target = self.freeze_lvalue(target, stmts)
            return stmts + s + [ir.IAssign(target, v)]
        if isinstance(e, A.IncDec):
            stmts, target = self.lvalue(e.target)
            if e.ty == BOOL:
                if e.op == "++":
                    new = A.Cast(BOOL, A.IntLit(1, "1", ty=INT), True, ty=BOOL)
                    return stmts + [ir.IAssign(target, new)]
                s, v = self.boolean(A.Unary("!", target, ty=INT), ty=BOOL)
                return stmts + s + [ir.IAssign(target, v)]
            return stmts + [ir.IAssign(target, self.stepped(target, e.op, e.ty))]
        if isinstance(e, A.Call):
            stmts, args = self.sequence(list(e.args))
            return stmts + [ir.ICall(None, e.sym, args)]
        stmts, _ = self.pure(e)
        return stmts

    def loop(self, s) -> list:
        if isinstance(s, A.For):
            def make():
                init = []
                if isinstance(s.init, A.Block):
                    for d in s.init.items:
                        init += self.decl(d)
                elif isinstance(s.init, A.VarDecl):
                    init = self.decl(s.init)
                elif s.init is not None:
                    init = self.stmt(s.init)
                return init

            init = self.scoped(make)
            # the for-scope: declarations in init stay visible through the loop
            head = self.loop_parts(s.test, s.body, s.step, True)
            if isinstance(s.init, (A.Block, A.VarDecl)):
                return [ir.IBlock(_unwrap(init) + [head])]
            return init + [head]
        if isinstance(s, A.While):
            return [self.loop_parts(s.test, s.body, None, True)]
        return [self.loop_parts(s.test, s.body, None, False)]

    def loop_parts(self, test, body, step, test_first) -> ir.ILoop:
        prelude: list = []
        cond = None
        if test is not None:
            saved = self.temps
            self.temps = []
            prelude, cond = self.cond(test)
            self.temps = saved
        body_ir = self.stmt(body)
        step_ir = self.scoped(lambda: self.effect(step)) if step is not None else []
        return ir.ILoop(prelude, cond, body_ir, step_ir, test_first)


def _unwrap(stmts: list) -> list:
    if len(stmts) == 1 and isinstance(stmts[0], ir.IBlock):
        return stmts[0].items
    return stmts


def normalize_function(f: FuncSym) -> list:
    return Normalizer().block(f.defn.body.items)


def normalize_globals(decls) -> list:
    n = Normalizer()
    out: list = []
    for d in decls:
        out += n.decl(d)
    return out
