"""Static facts about the lowered program: call graph, recursive groups, and
which global or enclosing locations each function may write."""

from __future__ import annotations

import networkx as nx

from ..frontend import syntax as A
from ..frontend.layout import word_classes
from ..frontend.srctypes import Pointer, size_words
from . import ir


def walk(stmts):
    """Every statement in a lowered body, not descending into interior functions."""
    for s in stmts:
        yield s
        if isinstance(s, ir.IIf):
            yield from walk(s.then)
            yield from walk(s.other)
        elif isinstance(s, ir.ILoop):
            yield from walk(s.prelude)
            yield from walk(s.body)
            yield from walk(s.step)
        elif isinstance(s, ir.IBlock):
            yield from walk(s.items)


def const_index(e):
    return e.value if isinstance(e, A.IntLit) else None


def place_of(lv, ptr_target):
    """(storage key, storage type, representative word, static word or None).

    ``ptr_target(key)`` gives the storage type of the array a pointer is bound
    to.  Dynamic indices sit at element 0: element patterns repeat, so the
    offset class is the same for every element.
    """
    if isinstance(lv, A.Name):
        return lv.sym.key, lv.sym.ty, 0, 0
    if isinstance(lv, A.Index):
        if isinstance(lv.base.ty, Pointer):
            key = lv.base.ty.array
            return key, ptr_target(key), 0, None
        key, ty, rep, static = place_of(lv.base, ptr_target)
        arr = lv.base.ty
        size = size_words(arr.elem)
        c = const_index(lv.index)
        if c is not None and 0 <= c < arr.length:
            return key, ty, rep + c * size, None if static is None else static + c * size
        return key, ty, rep, None
    if isinstance(lv, A.Member):
        if lv.arrow:
            key = lv.base.ty.array
            rec = lv.base.ty.elem
            return key, ptr_target(key), rec.field_offset(lv.field), None
        key, ty, rep, static = place_of(lv.base, ptr_target)
        off = lv.base.ty.field_offset(lv.field)
        return key, ty, rep + off, None if static is None else static + off
    if isinstance(lv, A.Deref):
        key = lv.operand.ty.array
        return key, ptr_target(key), 0, None
    raise TypeError(f"not a place: {type(lv).__name__}")


def target_keys(lv, ptr_target) -> set:
    if isinstance(lv, A.Name):
        return {("v", lv.sym.key)}
    key, ty, rep, _ = place_of(lv, ptr_target)
    classes = word_classes(ty)
    w = size_words(lv.ty)
    return {("m", key, classes[rep + j]) for j in range(w)}


class ProgramFacts:
    def __init__(self, bodies: dict, ptr_target):
        """``bodies``: FuncSym -> lowered body (interiors included)."""
        self.graph = nx.DiGraph()
        direct: dict = {}
        for f, body in bodies.items():
            self.graph.add_node(f)
            w = set()
            for s in walk(body):
                if isinstance(s, ir.IAssign):
                    w |= target_keys(s.target, ptr_target)
                elif isinstance(s, ir.ICall):
                    self.graph.add_edge(f, s.func)
            direct[f] = w
        self.recursive: set = set()
        self.scc_of: dict = {}
        for comp in nx.strongly_connected_components(self.graph):
            comp = frozenset(comp)
            for f in comp:
                self.scc_of[f] = comp
            if len(comp) > 1 or any(self.graph.has_edge(f, f) for f in comp):
                self.recursive |= comp
        self.writes: dict = {}
        for f in bodies:
            w = set(direct[f])
            for g in nx.descendants(self.graph, f):
                w |= direct.get(g, set())
            self.writes[f] = w
