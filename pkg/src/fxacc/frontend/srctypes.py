"""Source-level C types and their word layout (ILP32, one scalar per word)."""

from __future__ import annotations

from dataclasses import dataclass


class SrcType:
    pass


@dataclass(frozen=True)
class BasicInfo:
    spelling: str
    bits: int
    signed: bool
    is_float: bool
    rank: int


BASIC_INFO = {
    "bool": BasicInfo("_Bool", 1, False, False, 0),
    "schar": BasicInfo("char", 8, True, False, 1),
    "uchar": BasicInfo("unsigned char", 8, False, False, 1),
    "short": BasicInfo("short", 16, True, False, 2),
    "ushort": BasicInfo("unsigned short", 16, False, False, 2),
    "int": BasicInfo("int", 32, True, False, 3),
    "uint": BasicInfo("unsigned int", 32, False, False, 3),
    "long": BasicInfo("long", 32, True, False, 4),
    "ulong": BasicInfo("unsigned long", 32, False, False, 4),
    "llong": BasicInfo("long long", 64, True, False, 5),
    "ullong": BasicInfo("unsigned long long", 64, False, False, 5),
    "float": BasicInfo("float", 32, True, True, 6),
    "double": BasicInfo("double", 64, True, True, 7),
}


@dataclass(frozen=True)
class Basic(SrcType):
    name: str

    def __post_init__(self):
        if self.name not in BASIC_INFO:
            raise ValueError(f"not a basic type: {self.name}")

    @property
    def info(self) -> BasicInfo:
        return BASIC_INFO[self.name]

    def __str__(self) -> str:
        return self.info.spelling


@dataclass(frozen=True)
class VoidType(SrcType):
    def __str__(self) -> str:
        return "void"


@dataclass(frozen=True)
class Array(SrcType):
    elem: SrcType
    length: int

    def __str__(self) -> str:
        return f"{self.elem}[{self.length}]"


@dataclass(frozen=True)
class Pointer(SrcType):
    """Pointer bound to the one array it may point into (``restrict A T *p``)."""

    elem: SrcType
    array: str

    def __str__(self) -> str:
        return f"restrict {self.array} {self.elem} *"


@dataclass(frozen=True)
class Record(SrcType):
    tag: str
    fields: tuple  # ((name, SrcType), ...)
    union: bool = False

    def field_type(self, name: str) -> SrcType:
        for n, t in self.fields:
            if n == name:
                return t
        raise KeyError(name)

    def field_offset(self, name: str) -> int:
        if self.union:
            self.field_type(name)
            return 0
        off = 0
        for n, t in self.fields:
            if n == name:
                return off
            off += size_words(t)
        raise KeyError(name)

    def __str__(self) -> str:
        return f"{'union' if self.union else 'struct'} {self.tag}"


VOID = VoidType()
INT = Basic("int")
UINT = Basic("uint")
BOOL = Basic("bool")
LLONG = Basic("llong")
FLOAT = Basic("float")
DOUBLE = Basic("double")


def size_words(t: SrcType) -> int:
    if isinstance(t, Basic):
        return 2 if t.info.bits == 64 else 1
    if isinstance(t, Pointer):
        return 1
    if isinstance(t, Array):
        return t.length * size_words(t.elem)
    if isinstance(t, Record):
        sizes = [size_words(ft) for _, ft in t.fields]
        return max(sizes, default=0) if t.union else sum(sizes)
    raise TypeError(f"no size for {t}")


def is_scalar(t: SrcType) -> bool:
    return isinstance(t, (Basic, Pointer))


def is_arith(t: SrcType) -> bool:
    return isinstance(t, Basic)


def is_integer(t: SrcType) -> bool:
    return isinstance(t, Basic) and not t.info.is_float


def is_float(t: SrcType) -> bool:
    return isinstance(t, Basic) and t.info.is_float


def is_aggregate(t: SrcType) -> bool:
    return isinstance(t, (Array, Record))


def is_subword(t: SrcType) -> bool:
    return isinstance(t, Basic) and t.info.bits < 32


def width(t: SrcType) -> int:
    """Register words occupied by a scalar of this type."""
    return 2 if isinstance(t, Basic) and t.info.bits == 64 else 1


def promote(t: Basic) -> Basic:
    if t.info.is_float or t.info.rank >= 3:
        return t
    return INT


def usual_conversion(a: Basic, b: Basic) -> Basic:
    if a.name == "double" or b.name == "double":
        return DOUBLE
    if a.name == "float" or b.name == "float":
        return FLOAT
    a, b = promote(a), promote(b)
    if a == b:
        return a
    ia, ib = a.info, b.info
    if ia.signed == ib.signed:
        return a if ia.rank >= ib.rank else b
    u, s = (a, b) if not ia.signed else (b, a)
    if u.info.rank >= s.info.rank:
        return u
    if s.info.bits > u.info.bits:
        return s
    return Basic("u" + s.name if s.name != "llong" else "ullong")


def unsigned_of(t: Basic) -> Basic:
    return {"int": UINT, "long": Basic("ulong"), "llong": Basic("ullong")}.get(t.name, t)


def scalar_kind(t: SrcType) -> str:
    """Machine flavor of a scalar: s/u (32-bit int), f, l/q (64-bit int), d."""
    if isinstance(t, Pointer):
        return "u"
    info = t.info
    if info.is_float:
        return "d" if info.bits == 64 else "f"
    if info.bits == 64:
        return "l" if info.signed else "q"
    return "s" if info.signed else "u"
