import pytest

from fxacc.cipher import KeyContext, NonceStream, Origin
from fxacc.isa import (
    OPCODES, FormatError, Instruction, IoSlot, ObjectCode, branch_opcode, decode_object,
    encode_object,
)


def _const(ctx, x, w=1, origin=Origin.CONSTANT):
    return ctx.seal(x, w, origin, NonceStream(x))


def test_encode_decode_roundtrip():
    ctx = KeyContext()
    code = (
        Instruction("li", (10,), (_const(ctx, 5),)),
        Instruction("add2", (12, 12), (_const(ctx, 7, 2),)),
        Instruction("beq", (10, 11), (_const(ctx, 1), _const(ctx, 2)), 2),
        Instruction("j", (), (), 4),
        Instruction("out", (10,), (), 0),
    )
    obj = ObjectCode(code, 0, (IoSlot("in", "x", 10, "int"), IoSlot("out", "return", 0, "int")))
    data = encode_object(obj)
    assert data[:4] == b"FXA1"
    assert decode_object(data) == obj


def test_runtime_constant_rejected():
    ctx = KeyContext()
    with pytest.raises(FormatError):
        Instruction("li", (1,), (_const(ctx, 5, origin=Origin.RUNTIME),))


def test_arity_and_width_checked():
    ctx = KeyContext()
    with pytest.raises(FormatError):
        Instruction("add", (1, 2), (_const(ctx, 0),))
    with pytest.raises(FormatError):
        Instruction("li2", (1,), (_const(ctx, 0),))
    with pytest.raises(FormatError):
        Instruction("nosuch")


def test_jump_target_range():
    with pytest.raises(FormatError):
        ObjectCode((Instruction("j", (), (), 7),))


def test_truncated_stream():
    ctx = KeyContext()
    data = encode_object(ObjectCode((Instruction("li", (3,), (_const(ctx, 1),)),)))
    with pytest.raises(FormatError):
        decode_object(data[:-3])
    with pytest.raises(FormatError):
        decode_object(b"XXXX" + data[4:])
    with pytest.raises(FormatError):
        decode_object(data + b"\0")


def test_branch_opcodes_exist():
    for rel in ("eq", "ne", "lt", "gt", "le", "ge"):
        for flavor in "sulqfd":
            op = branch_opcode(rel, flavor)
            assert OPCODES[op].kind == "branch"
    assert len(OPCODES["beq"].consts) == 2
    assert OPCODES["bltlu"].consts == (2, 2, 1)
