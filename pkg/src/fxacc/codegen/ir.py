"""Lowered statement forms consumed by the compiler.

Expressions inside these statements are side-effect free typed syntax nodes:
no assignments, calls, conditionals, comparisons or logical operators in value
position.  Conditions are explicit trees over comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional


# condition trees
@dataclass
class Cmp:
    op: str  # == != < > <= >=
    left: Any
    right: Any


@dataclass
class Truth:
    value: Any


@dataclass
class Not:
    cond: Any


@dataclass
class And:
    left: Any
    right: Any


@dataclass
class Or:
    left: Any
    right: Any


# statements
@dataclass
class IDecl:
    sym: Any
    inits: list = field(default_factory=list)  # [(path, pure expr)]


@dataclass
class IAssign:
    target: Any  # Name / Index / Member / Deref with pure parts
    value: Any


@dataclass
class ICall:
    dest: Any  # Name of a temp, or None
    func: Any  # FuncSym
    args: list


@dataclass
class IEmit:
    value: Any
    name: str


@dataclass
class IIf:
    cond: Any
    then: list
    other: list


@dataclass
class ILoop:
    prelude: list  # statements evaluated before every test
    cond: Any  # condition tree or None (always true)
    body: list
    step: list
    test_first: bool = True


@dataclass
class IBreak:
    pass


@dataclass
class IContinue:
    pass


@dataclass
class IReturn:
    value: Optional[Any]


@dataclass
class IGoto:
    label: Any  # LabelSym


@dataclass
class ILabel:
    label: Any


@dataclass
class ILabelDecl:
    labels: list


@dataclass
class IBlock:
    items: list
    temps_only: bool = False  # scopes only compiler temporaries


@dataclass
class IInterior:
    func: Any  # FuncSym
    body: list
