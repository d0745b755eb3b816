import random

import pytest

from corpus_tools import CORPUS, draw_inputs, input_ranges, outputs_of, run_compiled
from fxacc.cipher import KeyContext
from fxacc.codegen import Schedule, ScheduleError, compile_program
from fxacc.frontend import CompileError, check_source
from fxacc.isa import encode_object
from fxacc.oracle import interpret


@pytest.fixture(scope="module")
def ctx():
    return KeyContext()


def _agree(name, seed, ctx, n_inputs=3, **kw):
    src = (CORPUS / name).read_text()
    prog = check_source(src)
    rng = random.Random(seed)
    for _ in range(n_inputs):
        inputs = draw_inputs(input_ranges(src), rng)
        result, res, outs = run_compiled(src, seed, inputs, ctx, **kw)
        assert res.status == "ok", res.message
        assert outs == outputs_of(interpret(prog, inputs)), (name, seed, inputs)
    return result


def test_same_seed_same_object(ctx):
    prog = check_source((CORPUS / "structs.c").read_text())
    a = compile_program(prog, 17, ctx)
    b = compile_program(prog, 17, ctx)
    assert encode_object(a.obj) == encode_object(b.obj)
    assert a.schedule.to_text() == b.schedule.to_text()
    c = compile_program(prog, 18, ctx)
    assert encode_object(a.obj) != encode_object(c.obj)


def test_schedule_text_roundtrip(ctx):
    prog = check_source((CORPUS / "longlong.c").read_text())
    sched = compile_program(prog, 4, ctx).schedule
    assert Schedule.from_text(sched.to_text()) == sched
    with pytest.raises(ScheduleError):
        Schedule.from_text("in x r10 zz")


@pytest.mark.parametrize("name", ["recursion.c", "matrix.c", "interior.c", "longlong.c"])
def test_spilling_keeps_semantics(ctx, name):
    result = _agree(name, 3, ctx, reg_bound=40)
    assert result.stats["spilled"] > 0


def test_small_unroll_limit_uses_loops(ctx):
    result = _agree("arrays.c", 5, ctx, unroll_limit=2)
    assert any(form == "loop" for *_, form in result.stats["storms"])


@pytest.mark.parametrize("n", [1, 4, 8, 64, 100])
def test_storm_covers_whole_array(ctx, n):
    src = f"int a[{n}];\nint main(int i) {{\n  a[i] = 7;\n  return a[i];\n}}"
    result = compile_program(check_source(src), 1, ctx)
    assert result.stats["storms"] == [("a", 0, n, "loop" if n > 64 else "unrolled")]
    assert result.stats["join_failures"] == 0


def test_interior_in_recursive_rejected(ctx):
    src = """int f(int n) {
      int g(int x) { return x + 1; }
      if (n == 0) return 0;
      return g(f(n - 1));
    }
    int main(int n) { return f(n); }"""
    with pytest.raises(CompileError, match="recursive"):
        compile_program(check_source(src), 1, ctx)


def test_every_variable_has_an_offset(ctx):
    result = compile_program(check_source((CORPUS / "loops.c").read_text()), 9, ctx)
    assert result.var_locs
    for reg, d in result.var_locs.values():
        assert reg >= 10
