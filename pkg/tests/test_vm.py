import pytest

from corpus_tools import CORPUS, run_compiled
from fxacc.analysis import shape_of_rows, trace_shape
from fxacc.cipher import AddrHandle, KeyContext, random_key
from fxacc.vm import TLB, Fault, read_trace, write_trace


@pytest.fixture(scope="module")
def ctx():
    return KeyContext()


def test_tlb_fresh_slot_per_write():
    tlb = TLB()
    assert tlb.write(AddrHandle(7), "a") == 0
    assert tlb.write(AddrHandle(9), "b") == 1
    assert tlb.write(AddrHandle(7), "c") == 2
    assert tlb.read(AddrHandle(7)) == (2, "c")
    with pytest.raises(Fault):
        tlb.read(AddrHandle(8))


def test_identity(ctx):
    _, res, outs = run_compiled("int main(int a) { return a; }", 3, [41], ctx)
    assert res.status == "ok"
    assert outs == [("return", "int", "41")]


def test_divide_trap(ctx):
    _, res, _ = run_compiled("int main(int a) { return 10 / a; }", 1, [0], ctx)
    assert (res.status, res.message) == ("trap", "divide")


def test_budget(ctx):
    from fxacc.codegen import compile_program, encrypt_inputs
    from fxacc.frontend import check_source
    from fxacc.vm import run

    result = compile_program(check_source("int main(int a) { while (a == a) {} return 0; }"), 2, ctx)
    res = run(result.obj, ctx.ops(), encrypt_inputs(result.schedule, [1], ctx), budget=5000)
    assert res.status == "nontermination"
    assert res.steps == 5000


def test_wrong_key_cannot_run(ctx):
    from fxacc.codegen import compile_program, encrypt_inputs
    from fxacc.frontend import check_source
    from fxacc.vm import run

    result = compile_program(check_source("int main(int a) { return a + 1; }"), 2, ctx)
    other = KeyContext(random_key())
    res = run(result.obj, other.ops(), encrypt_inputs(result.schedule, [1], other))
    assert res.status == "fault"


def test_trace_file_roundtrip(ctx, tmp_path):
    src = (CORPUS / "linked.c").read_text()
    _, res, _ = run_compiled(src, 5, [3, 1], ctx, trace=True)
    path = tmp_path / "t.trace"
    write_trace(res.trace, path)
    rows = read_trace(path)
    assert len(rows) == len(res.trace)
    assert shape_of_rows(rows) == trace_shape(res.trace)
    assert any(r["slot"] != "-" for r in rows)
