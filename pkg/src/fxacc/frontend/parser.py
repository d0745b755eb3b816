"""Recursive-descent parser for the C subset."""

from __future__ import annotations

from . import syntax as A
from .lexer import CompileError, Token, char_value, tokenize
from .srctypes import Array, Basic, Pointer, Record, VOID

_TYPE_WORDS = {"_Bool", "char", "short", "int", "long", "float", "double", "void",
               "signed", "unsigned"}
_QUALIFIERS = {"const", "volatile"}
_UNSUPPORTED = {
    "switch": "switch statements are not supported",
    "case": "switch statements are not supported",
    "default": "switch statements are not supported",
    "typedef": "typedef is not supported",
    "sizeof": "sizeof is not supported",
    "static": "storage classes are not supported",
    "extern": "storage classes are not supported",
}
_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="}
_BINARY_LEVELS = [
    ["||"], ["&&"], ["|"], ["^"], ["&"], ["==", "!="], ["<", ">", "<=", ">="],
    ["<<", ">>"], ["+", "-"], ["*", "/", "%"],
]


def _basic_from_words(words: list[str]) -> Basic | None:
    key = sorted(words)
    signed = "signed" in words
    unsigned = "unsigned" in words
    if signed and unsigned:
        return None
    core = [w for w in words if w not in ("signed", "unsigned")]
    core.sort()
    table = {
        (): "int",
        ("_Bool",): "bool",
        ("char",): "schar",
        ("short",): "short",
        ("int", "short"): "short",
        ("int",): "int",
        ("long",): "long",
        ("int", "long"): "long",
        ("long", "long"): "llong",
        ("int", "long", "long"): "llong",
        ("float",): "float",
        ("double",): "double",
    }
    name = table.get(tuple(core))
    if name is None or (not core and not (signed or unsigned)):
        return None
    if name in ("bool", "float", "double") and (signed or unsigned):
        return None
    if unsigned:
        name = {"schar": "uchar", "short": "ushort", "int": "uint", "long": "ulong",
                "llong": "ullong"}[name]
    del key
    return Basic(name)


class Parser:
    def __init__(self, src: str, filename: str = "<input>"):
        self.filename = filename
        self.toks = tokenize(src, filename)
        self.i = 0
        self.records: dict[tuple[str, bool], Record] = {}
        self.pending: list = []  # record definitions hoisted ahead of the current item
        self.anon = 0

    # -- token helpers -------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, n: int = 1) -> Token:
        return self.toks[min(self.i + n, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise CompileError(msg, tok.pos, self.filename)

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text in texts

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            self.error(f"expected '{text}' before '{found}'")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> Token:
        if self.tok.kind != "id":
            self.error(f"expected identifier before '{self.tok.text or 'end of input'}'")
        t = self.tok
        self.i += 1
        return t

    def check_unsupported(self):
        t = self.tok
        if t.kind == "kw" and t.text in _UNSUPPORTED:
            self.error(_UNSUPPORTED[t.text])

    # -- types ---------------------------------------------------------------
    def starts_type(self, tok: Token | None = None) -> bool:
        t = tok or self.tok
        return t.kind == "kw" and (
            t.text in _TYPE_WORDS or t.text in ("struct", "union", "restrict") or t.text in _QUALIFIERS
        )

    def decl_specs(self):
        """Returns (base type, restrict array name or None)."""
        restrict = None
        if self.accept("restrict"):
            restrict = self.ident().text
        while self.accept("const") or self.accept("volatile"):
            pass
        start = self.tok
        if self.at("struct", "union"):
            base = self.record_spec()
        else:
            words = []
            while self.tok.kind == "kw" and self.tok.text in _TYPE_WORDS | _QUALIFIERS:
                if self.tok.text not in _QUALIFIERS:
                    words.append(self.tok.text)
                self.i += 1
            if not words:
                self.check_unsupported()
                self.error(f"expected type before '{self.tok.text or 'end of input'}'")
            if words == ["void"]:
                base = VOID
            else:
                base = _basic_from_words(words)
                if base is None:
                    self.error("invalid type specifier '" + " ".join(words) + "'", start)
        while self.accept("const") or self.accept("volatile"):
            pass
        return base, restrict

    def record_spec(self) -> Record:
        kw = self.tok
        self.i += 1
        union = kw.text == "union"
        tag = None
        if self.tok.kind == "id":
            tag = self.ident().text
        if not self.at("{"):
            if tag is None:
                self.error("expected '{' in anonymous struct")
            rec = self.records.get((tag, union))
            if rec is None:
                self.error(f"unknown {kw.text} '{tag}'", kw)
            return rec
        if tag is None:
            self.anon += 1
            tag = f"__anon{self.anon}"
        if (tag, union) in self.records:
            self.error(f"redefinition of {kw.text} '{tag}'", kw)
        self.expect("{")
        fields = []
        while not self.accept("}"):
            base, restrict = self.decl_specs()
            while True:
                name, ty, tok = self.declarator(base, restrict)
                if any(n == name for n, _ in fields):
                    self.error(f"duplicate member '{name}'", tok)
                if isinstance(ty, Pointer):
                    self.error("pointer members are not supported", tok)
                fields.append((name, ty))
                if not self.accept(","):
                    break
            self.expect(";")
        if not fields:
            self.error(f"empty {kw.text}", kw)
        rec = Record(tag, tuple(fields), union)
        self.records[(tag, union)] = rec
        self.pending.append(A.RecordDecl(rec, pos=kw.pos))
        return rec

    def const_int(self) -> int:
        e = self.conditional()
        v = _fold(e)
        if v is None:
            self.error("array size must be an integer constant")
        return v

    def declarator(self, base, restrict, allow_unsized: bool = False):
        if self.at("("):
            self.error("function pointers are not supported")
        star = self.accept("*")
        if star is not None and self.at("*"):
            self.error("pointers to pointers are not supported")
        if star is not None and self.at("("):
            self.error("function pointers are not supported")
        tok = self.ident()
        dims = []
        while self.accept("["):
            if self.at("]") and allow_unsized and not dims:
                dims.append(None)
            else:
                n = self.const_int()
                if n <= 0:
                    self.error("array size must be positive", tok)
                dims.append(n)
            self.expect("]")
        ty = base
        if star is not None:
            if base is VOID:
                self.error("void pointers are not supported", star)
            ty = Pointer(base, restrict)
        elif restrict is not None:
            self.error("restrict applies only to pointer declarations", tok)
        for n in reversed(dims):
            ty = Array(ty, n if n is not None else -1)
        return tok.text, ty, tok

    def type_name(self):
        base, restrict = self.decl_specs()
        if self.at("*"):
            self.error("pointer casts are not supported")
        if restrict is not None:
            self.error("restrict applies only to pointer declarations")
        return base

    # -- top level -----------------------------------------------------------
    def program(self) -> A.Program:
        items = []
        while self.tok.kind != "eof":
            self.check_unsupported()
            got = self.external()
            items += self.pending
            self.pending = []
            items += got
        return A.Program(items, self.filename)

    def external(self) -> list:
        start = self.tok
        base, restrict = self.decl_specs()
        if self.accept(";"):
            if not isinstance(base, Record):
                self.error("declaration declares nothing", start)
            return []
        name, ty, tok = self.declarator(base, restrict, allow_unsized=True)
        if self.at("("):
            return [self.function(name, ty, tok)]
        return self.finish_decl(base, restrict, name, ty, tok)

    def finish_decl(self, base, restrict, name, ty, tok) -> list:
        decls = []
        while True:
            if ty is VOID:
                self.error(f"variable '{name}' declared void", tok)
            init = None
            if self.accept("="):
                init = self.initializer()
            if isinstance(ty, Array) and ty.length == -1:
                if not isinstance(init, A.InitList):
                    self.error(f"array '{name}' needs a size", tok)
                ty = Array(ty.elem, len(init.items))
            decls.append(A.VarDecl(name, ty, init, pos=tok.pos))
            if not self.accept(","):
                break
            name, ty, tok = self.declarator(base, restrict, allow_unsized=True)
        self.expect(";")
        return decls

    def initializer(self):
        if self.at("{"):
            t = self.expect("{")
            items = []
            while not self.at("}"):
                items.append(self.initializer())
                if not self.accept(","):
                    break
            self.expect("}")
            return A.InitList(items, pos=t.pos)
        return self.assignment()

    def function(self, name, ret, tok) -> A.FuncDef:
        if isinstance(ret, Array):
            self.error("functions cannot return arrays", tok)
        self.expect("(")
        params = []
        if self.at("void") and self.peek().text == ")":
            self.i += 1
        elif not self.at(")"):
            while True:
                if self.at("..."):
                    self.error("variadic functions are not supported")
                base, restrict = self.decl_specs()
                pname, pty, ptok = self.declarator(base, restrict)
                if pty is VOID:
                    self.error("parameter declared void", ptok)
                params.append(A.Param(pname, pty, pos=ptok.pos))
                if not self.accept(","):
                    break
        self.expect(")")
        if self.accept(";"):
            return A.FuncDef(name, ret, params, None, pos=tok.pos)
        body = self.block()
        return A.FuncDef(name, ret, params, body, pos=tok.pos)

    # -- statements ----------------------------------------------------------
    def block(self) -> A.Block:
        t = self.expect("{")
        items = []
        while not self.accept("}"):
            if self.tok.kind == "eof":
                self.error("expected '}' at end of input")
            got = self.block_item()
            items += self.pending
            self.pending = []
            items += got
        return A.Block(items, pos=t.pos)

    def block_item(self) -> list:
        if self.starts_type():
            base, restrict = self.decl_specs()
            if self.at(";"):
                t = self.expect(";")
                if not isinstance(base, Record):
                    self.error("declaration declares nothing", t)
                return []
            name, ty, tok = self.declarator(base, restrict, allow_unsized=True)
            if self.at("("):
                fn = self.function(name, ty, tok)
                if fn.body is None:
                    self.error("interior function needs a body", tok)
                return [fn]
            return self.finish_decl(base, restrict, name, ty, tok)
        return [self.statement()]

    def statement(self) -> A.Stmt:
        t = self.tok
        self.check_unsupported()
        if self.at("{"):
            return self.block()
        if self.accept(";"):
            return A.Empty(pos=t.pos)
        if self.accept("if"):
            self.expect("(")
            test = self.expression()
            self.expect(")")
            then = self.sub_statement()
            other = self.sub_statement() if self.accept("else") else None
            return A.If(test, then, other, pos=t.pos)
        if self.accept("while"):
            self.expect("(")
            test = self.expression()
            self.expect(")")
            return A.While(test, self.sub_statement(), pos=t.pos)
        if self.accept("do"):
            body = self.sub_statement()
            self.expect("while")
            self.expect("(")
            test = self.expression()
            self.expect(")")
            self.expect(";")
            return A.DoWhile(body, test, pos=t.pos)
        if self.accept("for"):
            self.expect("(")
            init = None
            if self.starts_type():
                base, restrict = self.decl_specs()
                name, ty, tok = self.declarator(base, restrict)
                decls = self.finish_decl(base, restrict, name, ty, tok)
                init = decls[0] if len(decls) == 1 else A.Block(decls, pos=tok.pos)
            elif not self.accept(";"):
                e = self.expression()
                init = A.ExprStmt(e, pos=e.pos)
                self.expect(";")
            test = None if self.at(";") else self.expression()
            self.expect(";")
            step = None if self.at(")") else self.expression()
            self.expect(")")
            return A.For(init, test, step, self.sub_statement(), pos=t.pos)
        if self.accept("return"):
            value = None if self.at(";") else self.expression()
            self.expect(";")
            return A.Return(value, pos=t.pos)
        if self.accept("break"):
            self.expect(";")
            return A.Break(pos=t.pos)
        if self.accept("continue"):
            self.expect(";")
            return A.Continue(pos=t.pos)
        if self.accept("goto"):
            label = self.ident().text
            self.expect(";")
            return A.Goto(label, pos=t.pos)
        if self.accept("__label__"):
            names = [self.ident().text]
            while self.accept(","):
                names.append(self.ident().text)
            self.expect(";")
            return A.LabelDecl(names, pos=t.pos)
        if t.kind == "id" and self.peek().text == ":" and self.peek().kind == "op":
            self.i += 2
            return A.Labeled(t.text, self.sub_statement(), pos=t.pos)
        e = self.expression()
        self.expect(";")
        if isinstance(e, A.Call) and e.func == "emit":
            if len(e.args) != 1:
                self.error("emit takes exactly one argument", t)
            return A.Emit(e.args[0], pos=t.pos)
        return A.ExprStmt(e, pos=t.pos)

    def sub_statement(self) -> A.Stmt:
        if self.starts_type():
            self.error("a declaration is not a statement; wrap it in braces")
        return self.statement()

    # -- expressions ---------------------------------------------------------
    def expression(self) -> A.Expr:
        e = self.assignment()
        if self.at(","):
            self.error("the comma operator is not supported")
        return e

    def assignment(self) -> A.Expr:
        left = self.conditional()
        if self.tok.kind == "op" and self.tok.text in _ASSIGN_OPS:
            t = self.tok
            self.i += 1
            value = self.assignment()
            return A.Assign(t.text, left, value, pos=t.pos)
        return left

    def conditional(self) -> A.Expr:
        test = self.binary(0)
        if self.at("?"):
            t = self.expect("?")
            then = self.expression()
            self.expect(":")
            other = self.conditional()
            return A.Cond(test, then, other, pos=t.pos)
        return test

    def binary(self, level: int) -> A.Expr:
        if level == len(_BINARY_LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        while self.tok.kind == "op" and self.tok.text in _BINARY_LEVELS[level]:
            t = self.tok
            self.i += 1
            right = self.binary(level + 1)
            left = A.Binary(t.text, left, right, pos=t.pos)
        return left

    def unary(self) -> A.Expr:
        t = self.tok
        self.check_unsupported()
        if self.at("++", "--"):
            self.i += 1
            return A.IncDec(t.text, True, self.unary(), pos=t.pos)
        if self.at("-", "+", "!", "~"):
            self.i += 1
            return A.Unary(t.text, self.unary(), pos=t.pos)
        if self.at("*"):
            self.i += 1
            return A.Deref(self.unary(), pos=t.pos)
        if self.at("&"):
            self.i += 1
            return A.AddrOf(self.unary(), pos=t.pos)
        if self.at("(") and self.starts_type(self.peek()):
            self.i += 1
            ty = self.type_name()
            self.expect(")")
            return A.Cast(ty, self.unary(), pos=t.pos)
        return self.postfix()

    def postfix(self) -> A.Expr:
        e = self.primary()
        while True:
            t = self.tok
            if self.accept("["):
                idx = self.expression()
                self.expect("]")
                e = A.Index(e, idx, pos=t.pos)
            elif self.at("("):
                if not isinstance(e, A.Name):
                    self.error("only named functions can be called")
                self.i += 1
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.assignment())
                        if not self.accept(","):
                            break
                self.expect(")")
                e = A.Call(e.id, args, pos=e.pos)
            elif self.accept("."):
                e = A.Member(e, self.ident().text, False, pos=t.pos)
            elif self.accept("->"):
                e = A.Member(e, self.ident().text, True, pos=t.pos)
            elif self.at("++", "--"):
                self.i += 1
                e = A.IncDec(t.text, False, e, pos=t.pos)
            else:
                return e

    def primary(self) -> A.Expr:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return A.IntLit(_int_value(t, self), t.text, pos=t.pos)
        if t.kind == "float":
            self.i += 1
            return A.FloatLit(t.text, pos=t.pos)
        if t.kind == "char":
            self.i += 1
            v = char_value(t.text, t.pos, self.filename)
            return A.IntLit(v, str(v), pos=t.pos)
        if t.kind == "id":
            self.i += 1
            return A.Name(t.text, pos=t.pos)
        if self.accept("("):
            e = self.expression()
            self.expect(")")
            return e
        self.check_unsupported()
        self.error(f"expected expression before '{t.text or 'end of input'}'")


def _int_value(t: Token, p: Parser) -> int:
    digits = t.text.rstrip("uUlL")
    suffix = t.text[len(digits):].lower()
    if suffix not in ("", "u", "l", "ul", "lu", "ll", "ull", "llu"):
        p.error(f"invalid integer suffix '{t.text[len(digits):]}'", t)
    if digits.lower().startswith("0x"):
        v = int(digits, 16)
    elif len(digits) > 1 and digits.startswith("0"):
        if any(c in "89" for c in digits):
            p.error(f"invalid octal constant '{t.text}'", t)
        v = int(digits, 8)
    else:
        v = int(digits)
    if v >= 1 << 64:
        p.error("integer constant is too large", t)
    return v


def _fold(e) -> int | None:
    """Fold a constant integer expression (array sizes)."""
    if isinstance(e, A.IntLit):
        return e.value
    if isinstance(e, A.Unary) and e.op in "-+":
        v = _fold(e.operand)
        return None if v is None else (-v if e.op == "-" else v)
    if isinstance(e, A.Binary) and e.op in ("+", "-", "*", "/", "%", "<<"):
        a, b = _fold(e.left), _fold(e.right)
        if a is None or b is None or (e.op in "/%" and b == 0):
            return None
        return {"+": a + b, "-": a - b, "*": a * b, "/": int(a / b), "%": a % b, "<<": a << b}[e.op]
    return None


def parse(src: str, filename: str = "<input>") -> A.Program:
    return Parser(src, filename).program()
