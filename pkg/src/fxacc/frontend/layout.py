"""Word layout of aggregates and their offset-class (stripe) patterns.

Every word of an aggregate belongs to one offset class; all words of a class
share one offset.  Array elements repeat the element's pattern, struct fields
get disjoint classes, and union members are merged into the coarsest scheme
compatible with every member.
"""

from __future__ import annotations

from networkx.utils import UnionFind

from .srctypes import Array, Basic, Pointer, Record, SrcType, size_words


def _canonical(pattern) -> tuple[int, ...]:
    ids: dict = {}
    return tuple(ids.setdefault(c, len(ids)) for c in pattern)


def unify_union_scheme(members: list) -> tuple[int, ...]:
    """Merge member class patterns: words equal in any member share a class."""
    n = max((len(m) for m in members), default=0)
    uf = UnionFind(range(n))
    for pattern in members:
        first: dict = {}
        for w, c in enumerate(pattern):
            if c in first:
                uf.union(first[c], w)
            else:
                first[c] = w
    return _canonical(uf[w] for w in range(n))


def word_classes(t: SrcType) -> tuple[int, ...]:
    """Class id of every word of ``t``, numbered by first occurrence."""
    if isinstance(t, Basic):
        return (0, 1) if size_words(t) == 2 else (0,)
    if isinstance(t, Pointer):
        return (0,)
    if isinstance(t, Array):
        return word_classes(t.elem) * t.length
    if isinstance(t, Record):
        if t.union:
            return unify_union_scheme([word_classes(ft) for _, ft in t.fields])
        out: list = []
        for _, ft in t.fields:
            base = len(set(out))
            out += [base + c for c in word_classes(ft)]
        return _canonical(out)
    raise TypeError(f"no layout for {t}")


def class_words(t: SrcType) -> dict[int, list[int]]:
    """Class id -> word offsets belonging to it, ascending."""
    out: dict[int, list[int]] = {}
    for w, c in enumerate(word_classes(t)):
        out.setdefault(c, []).append(w)
    return out


def stride(words: list[int]) -> tuple[int, int] | None:
    """(start, step) if the offsets form an arithmetic progression."""
    if len(words) < 2:
        return (words[0], 1) if words else None
    step = words[1] - words[0]
    if all(b - a == step for a, b in zip(words, words[1:])):
        return words[0], step
    return None
