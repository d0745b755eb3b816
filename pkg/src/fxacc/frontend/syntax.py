"""Syntax tree for the C subset.

Nodes compare structurally; source positions and the annotations added by the
type checker (``ty``, ``sym``) are excluded from comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from .srctypes import SrcType

Pos = Optional[tuple]


def _pos():
    return field(default=None, compare=False, repr=False)


def _ann():
    return field(default=None, compare=False, repr=False)


class Node:
    pass


class Expr(Node):
    pass


class Stmt(Node):
    pass


# -- expressions ---------------------------------------------------------------


@dataclass(eq=True)
class IntLit(Expr):
    value: int
    text: str = ""
    pos: Pos = _pos()
    ty: Any = _ann()


@dataclass(eq=True)
class FloatLit(Expr):
    text: str
    pos: Pos = _pos()
    ty: Any = _ann()

    @property
    def single(self) -> bool:
        return self.text[-1] in "fF"


@dataclass(eq=True)
class Name(Expr):
    id: str
    pos: Pos = _pos()
    ty: Any = _ann()
    sym: Any = _ann()


@dataclass(eq=True)
class Unary(Expr):
    op: str  # - + ~ !
    operand: Expr
    pos: Pos = _pos()
    ty: Any = _ann()


@dataclass(eq=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr
    pos: Pos = _pos()
    ty: Any = _ann()


@dataclass(eq=True)
class Assign(Expr):
    op: str  # "=", "+=", ...
    target: Expr
    value: Expr
    pos: Pos = _pos()
    ty: Any = _ann()


@dataclass(eq=True)
class IncDec(Expr):
    op: str  # "++" or "--"
    prefix: bool
    target: Expr
    pos: Pos = _pos()
    ty: Any = _ann()


@dataclass(eq=True)
class Cond(Expr):
    test: Expr
    then: Expr
    other: Expr
    pos: Pos = _pos()
    ty: Any = _ann()


@dataclass(eq=True)
class Cast(Expr):
    to: SrcType
    operand: Expr
    implicit: bool = False
    pos: Pos = _pos()
    ty: Any = _ann()


@dataclass(eq=True)
class Call(Expr):
    func: str
    args: list
    pos: Pos = _pos()
    ty: Any = _ann()
    sym: Any = _ann()


@dataclass(eq=True)
class Index(Expr):
    base: Expr
    index: Expr
    pos: Pos = _pos()
    ty: Any = _ann()


@dataclass(eq=True)
class Member(Expr):
    base: Expr
    field: str
    arrow: bool = False
    pos: Pos = _pos()
    ty: Any = _ann()


@dataclass(eq=True)
class Deref(Expr):
    operand: Expr
    pos: Pos = _pos()
    ty: Any = _ann()


@dataclass(eq=True)
class AddrOf(Expr):
    operand: Expr
    pos: Pos = _pos()
    ty: Any = _ann()


@dataclass(eq=True)
class InitList(Node):
    items: list
    pos: Pos = _pos()


# -- statements ----------------------------------------------------------------


@dataclass(eq=True)
class VarDecl(Stmt):
    name: str
    type: SrcType
    init: Optional[Node] = None
    pos: Pos = _pos()
    sym: Any = _ann()
    inits: Any = _ann()  # flattened [(path, expr)] after type checking


@dataclass(eq=True)
class RecordDecl(Stmt):
    """A bare ``struct S {...};`` definition."""

    type: SrcType
    pos: Pos = _pos()


@dataclass(eq=True)
class ExprStmt(Stmt):
    expr: Expr
    pos: Pos = _pos()


@dataclass(eq=True)
class Emit(Stmt):
    value: Expr
    pos: Pos = _pos()
    site: Any = _ann()


@dataclass(eq=True)
class Block(Stmt):
    items: list
    pos: Pos = _pos()


@dataclass(eq=True)
class If(Stmt):
    test: Expr
    then: Stmt
    other: Optional[Stmt] = None
    pos: Pos = _pos()


@dataclass(eq=True)
class While(Stmt):
    test: Expr
    body: Stmt
    pos: Pos = _pos()


@dataclass(eq=True)
class DoWhile(Stmt):
    body: Stmt
    test: Expr
    pos: Pos = _pos()


@dataclass(eq=True)
class For(Stmt):
    init: Optional[Stmt]
    test: Optional[Expr]
    step: Optional[Expr]
    body: Stmt
    pos: Pos = _pos()


@dataclass(eq=True)
class Return(Stmt):
    value: Optional[Expr] = None
    pos: Pos = _pos()


@dataclass(eq=True)
class Break(Stmt):
    pos: Pos = _pos()


@dataclass(eq=True)
class Continue(Stmt):
    pos: Pos = _pos()


@dataclass(eq=True)
class Goto(Stmt):
    label: str
    pos: Pos = _pos()
    sym: Any = _ann()


@dataclass(eq=True)
class Labeled(Stmt):
    label: str
    stmt: Stmt
    pos: Pos = _pos()
    sym: Any = _ann()


@dataclass(eq=True)
class LabelDecl(Stmt):
    names: list
    pos: Pos = _pos()
    syms: Any = _ann()


@dataclass(eq=True)
class Empty(Stmt):
    pos: Pos = _pos()


@dataclass(eq=True)
class Param(Node):
    name: str
    type: SrcType
    pos: Pos = _pos()
    sym: Any = _ann()


@dataclass(eq=True)
class FuncDef(Stmt):
    name: str
    ret: SrcType
    params: list
    body: Optional[Block]  # None for a prototype
    pos: Pos = _pos()
    sym: Any = _ann()


@dataclass(eq=True)
class Program(Node):
    items: list
    filename: str = field(default="<input>", compare=False)
