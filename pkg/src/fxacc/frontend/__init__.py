"""Parser and type checker for the supported C subset."""

from .lexer import CompileError
from .parser import parse
from .printer import to_source
from .typecheck import FuncSym, LabelSym, TypedProgram, VarSym, check_source, typecheck

__all__ = [
    "CompileError", "FuncSym", "LabelSym", "TypedProgram", "VarSym", "check_source",
    "parse", "to_source", "typecheck",
]
