"""Tokenizer for the C subset."""

from __future__ import annotations

import re
from dataclasses import dataclass


class CompileError(Exception):
    """Diagnostic carrying a source position; prints as ``file:line:col: msg``."""

    def __init__(self, message: str, pos=None, filename: str = "<input>"):
        super().__init__(message)
        self.message = message
        self.pos = pos
        self.filename = filename

    def __str__(self) -> str:
        if self.pos is None:
            return f"{self.filename}: {self.message}"
        line, col = self.pos
        return f"{self.filename}:{line}:{col}: {self.message}"


KEYWORDS = {
    "_Bool", "char", "short", "int", "long", "float", "double", "void", "signed",
    "unsigned", "struct", "union", "if", "else", "while", "do", "for", "return",
    "break", "continue", "goto", "__label__", "restrict", "const", "volatile",
    "switch", "case", "default", "typedef", "sizeof", "static", "extern",
}

PUNCT = [
    "...", "<<=", ">>=", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&",
    "||", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "+", "-", "*", "/", "%",
    "<", ">", "=", "!", "~", "&", "|", "^", "?", ":", ";", ",", "(", ")", "[", "]",
    "{", "}", ".",
]


@dataclass(frozen=True)
class Token:
    kind: str  # id, kw, int, float, char, string, op, eof
    text: str
    pos: tuple


_FLOAT = r"(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?[fFlL]?|\d+[eE][+-]?\d+[fFlL]?"
_INT = r"0[xX][0-9a-fA-F]+[uUlL]*|\d+[uUlL]*"
_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\f\v]+)|(?P<nl>\n)|(?P<lc>//[^\n]*)|(?P<bc>/\*.*?\*/)"
    rf"|(?P<float>{_FLOAT})|(?P<int>{_INT})"
    r"|(?P<id>[A-Za-z_]\w*)|(?P<char>'(?:\\.|[^\\'\n])+')|(?P<string>\"(?:\\.|[^\\\"\n])*\")"
    r"|(?P<op>" + "|".join(re.escape(p) for p in PUNCT) + r")|(?P<pp>\#)",
    re.S,
)

_ESCAPES = {"n": 10, "t": 9, "r": 13, "0": 0, "\\": 92, "'": 39, '"': 34, "a": 7, "b": 8,
            "f": 12, "v": 11}


def char_value(text: str, pos, filename: str) -> int:
    body = text[1:-1]
    if body.startswith("\\"):
        esc = body[1:]
        if esc in _ESCAPES:
            return _ESCAPES[esc]
        if esc.startswith("x"):
            return int(esc[1:], 16) & 0xFF
        if esc.isdigit():
            return int(esc, 8) & 0xFF
        raise CompileError(f"unknown escape {text}", pos, filename)
    if len(body) != 1:
        raise CompileError("multi-character constant not supported", pos, filename)
    return ord(body)


def tokenize(src: str, filename: str = "<input>") -> list[Token]:
    toks: list[Token] = []
    i, line, line_start = 0, 1, 0
    at_line_start = True
    while i < len(src):
        pos = (line, i - line_start + 1)
        if src.startswith("/*", i) and src.find("*/", i + 2) < 0:
            raise CompileError("unterminated comment", pos, filename)
        m = _TOKEN.match(src, i)
        if m is None:
            raise CompileError(f"unexpected character {src[i]!r}", pos, filename)
        kind = m.lastgroup
        text = m.group()
        if kind == "pp" and at_line_start:
            raise CompileError("preprocessor directives are not supported", pos, filename)
        if kind == "pp":
            raise CompileError("unexpected character '#'", pos, filename)
        if kind == "string":
            raise CompileError("string literals are not supported", pos, filename)
        if kind in ("nl", "bc", "ws", "lc"):
            nls = text.count("\n")
            if nls:
                line += nls
                line_start = i + text.rfind("\n") + 1
                at_line_start = True
        else:
            at_line_start = False
            if kind == "id" and text in KEYWORDS:
                kind = "kw"
            toks.append(Token(kind, text, pos))
        i = m.end()
    toks.append(Token("eof", "", (line, i - line_start + 1)))
    return toks
