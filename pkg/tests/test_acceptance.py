"""Acceptance criteria.  Each test reports one PASS/FAIL line."""

import random
import time

import pytest

from conftest import ACCEPTANCE
from corpus_tools import CORPUS, corpus_files, draw_inputs, input_ranges, outputs_of, run_compiled
from fxacc.analysis import branch_balance, branch_outcomes, offset_uniformity, trace_shape
from fxacc.cipher import CipherPair, Ciphertext, KeyContext, NonceStream, Origin
from fxacc.codegen import compile_program, decode_outputs, encrypt_inputs
from fxacc.frontend import check_source
from fxacc.obfuscation import OffsetSource
from fxacc.oracle import interpret
from fxacc.vm import run

BRANCHY = """int main(int a) {
  int x = a + 1;
  if (a > 0) x = x * 2;
  emit(a > 0);
  return x;
}
"""
N_RECOMPILES = 2000


@pytest.fixture(scope="module")
def ctx():
    return KeyContext()


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE[n] = line
    print(line)
    assert ok, line


def words_of(v):
    return [v.hi, v.lo] if isinstance(v, CipherPair) else [v]


def test_criterion_1_differential(ctx):
    start = time.monotonic()
    programs = corpus_files()
    runs = mismatches = 0
    first_bad = ""
    for path in programs:
        src = path.read_text()
        prog = check_source(src)
        ranges = input_ranges(src)
        rng = random.Random(path.stem)
        inputs = [draw_inputs(ranges, rng) for _ in range(10)]
        expected = [outputs_of(interpret(prog, xs)) for xs in inputs]
        for seed in rng.sample(range(1 << 30), 50):
            result = compile_program(prog, seed, ctx)
            for xs, want in zip(inputs, expected):
                res = run(result.obj, ctx.ops(), encrypt_inputs(result.schedule, xs, ctx))
                got = [(n, t, str(v)) for n, t, v in decode_outputs(result.schedule, res.outputs, ctx)]
                runs += 1
                if res.status != "ok" or got != want:
                    mismatches += 1
                    first_bad = first_bad or f"{path.stem} seed {seed} inputs {xs}"
    elapsed = time.monotonic() - start
    ok = len(programs) >= 20 and mismatches == 0 and elapsed <= 300
    report(1, ok, f"{len(programs)} programs, {runs} runs, {mismatches} mismatches, "
                  f"{elapsed:.0f}s {first_bad}".rstrip())


def test_criterion_2_trace_shape(ctx):
    differing = []
    for path in corpus_files():
        src = path.read_text()
        xs = draw_inputs(input_ranges(src), random.Random(path.stem))
        shapes = set()
        for seed in range(20):
            _, res, _ = run_compiled(src, 1000 + seed, xs, ctx, trace=True)
            shapes.add(trace_shape(res.trace))
        if len(shapes) != 1:
            differing.append(path.stem)
    report(2, not differing, f"20 seeds per program, differing: {differing or 'none'}")


def _target_offsets(prog, ctx, offsets=None):
    out = []
    for seed in range(N_RECOMPILES):
        kw = {} if offsets is None else {"offsets": offsets(seed)}
        result = compile_program(prog, seed, ctx, **kw)
        out.append(result.var_locs["x"][1])
    return out


class ConstantOffsets(OffsetSource):
    def fresh(self) -> int:
        self.draws += 1
        return 0x5A5A_0001


def test_criterion_3_offset_uniformity(ctx):
    prog = check_source(BRANCHY)
    fair = offset_uniformity(_target_offsets(prog, ctx))
    rigged = offset_uniformity(_target_offsets(prog, ctx, ConstantOffsets))
    ok = fair.pvalue > 0.001 and rigged.pvalue < 1e-6
    report(3, ok, f"p = {fair.pvalue:.4f} over {N_RECOMPILES} recompiles, "
                  f"constant-offset mutant p = {rigged.pvalue:.2e}")


def test_criterion_4_branch_balance(ctx):
    prog = check_source(BRANCHY)
    fixed = []
    taken, truths = [], []
    rng = random.Random(4)
    for seed in range(N_RECOMPILES):
        result, res, _ = run_compiled(BRANCHY, seed, [7], ctx, trace=True)
        fixed.append(branch_outcomes(res.trace, result.stats["polarity"])[0][0])
        a = rng.randint(-50, 50)
        result, res, _ = run_compiled(BRANCHY, seed, [a], ctx, trace=True)
        truth = interpret(prog, [a]).outputs[0].value
        taken.append(branch_outcomes(res.trace, result.stats["polarity"])[0][0])
        truths.append(bool(truth))
    frac = branch_balance(fixed).taken_fraction
    corr = branch_balance(taken, truths).correlation
    ok = 0.45 <= frac <= 0.55 and abs(corr) < 0.1
    report(4, ok, f"taken fraction {frac:.3f} for a fixed-true test, correlation {corr:+.3f}")


def test_criterion_5_joins(ctx):
    failures = checked = 0
    for path in corpus_files():
        prog = check_source(path.read_text())
        for seed in range(5):
            stats = compile_program(prog, seed, ctx).stats
            failures += stats["join_failures"]
            checked += stats["joins_checked"]
    report(5, failures == 0, f"{checked} joins checked, {failures} failures")


def _stores(src, inputs, ctx):
    result, res, outs = run_compiled(src, 1, inputs, ctx, trace=True)
    assert res.status == "ok"
    return result, [e for e in res.trace if e.op == "sw"], outs


def _handle(ctx, addr):
    return ctx.addr_handle(ctx.encrypt(addr, Origin.RUNTIME, NonceStream(0))).handle


def test_criterion_6_write_storms(ctx):
    problems = []
    for n in (1, 4, 8, 64, 100):
        decl = f"int a[{n}];\nint main(int i) {{\n"
        result, with_write, _ = _stores(decl + "  a[i] = 7;\n  return a[i];\n}", [n - 1], ctx)
        _, without, _ = _stores(decl + "  return a[i];\n}", [n - 1], ctx)
        form = result.stats["storms"][0][3]
        if len(with_write) - len(without) != n or (form == "loop") != (n > 64):
            problems.append(f"n={n}: {len(with_write) - len(without)} stores, {form}")
    src = ("struct s { int x; int y; int z; };\nstruct s v[4];\nint main(int i) {\n"
           "  v[i].y = 3;\n  return v[i].y;\n}")
    result, stores, outs = _stores(src, [2], ctx)
    (v,) = [st for st in result.storages if st.name == "v"]
    field_y = {_handle(ctx, v.base + w) for w in v.members[1]}
    storm = stores[len(v.classes):]
    if len(storm) != 4 or any(e.handle not in field_y for e in storm) or outs[-1][2] != "3":
        problems.append("struct field storm left its stripe")
    report(6, not problems, f"n in 1,4,8,64,100 and a struct field stripe: {problems or 'exact'}")


def test_criterion_7_origin_disjoint(ctx):
    const, runtime = set(), set()
    for name in ("linked.c", "longlong.c", "recursion.c", "floats.c"):
        src = (CORPUS / name).read_text()
        xs = draw_inputs(input_ranges(src), random.Random(name))
        result, res, _ = run_compiled(src, 7, xs, ctx, trace=True)
        for ins in result.obj.instructions:
            for k in ins.consts:
                const.update(w.payload for w in words_of(k))
        for e in res.trace:
            for v in e.reads + e.writes:
                if isinstance(v, (Ciphertext, CipherPair)):
                    runtime.update(w.payload for w in words_of(v) if w.origin is Origin.RUNTIME)
    tags = all(ctx.nonce_of(Ciphertext(p, Origin.CONSTANT)) >> 63 for p in list(const)[:200])
    ok = not (const & runtime) and tags
    report(7, ok, f"{len(const)} constant and {len(runtime)} runtime ciphertexts, "
                  f"{len(const & runtime)} shared")


def test_criterion_8_tlb(ctx):
    src = (CORPUS / "linked.c").read_text()
    xs = [3, -7]
    _, res, outs = run_compiled(src, 8, xs, ctx, trace=True)
    writes = [e.slot for e in res.trace if e.op == "sw"]
    fresh = writes == list(range(len(writes)))
    latest, consistent = {}, True
    for e in res.trace:
        if e.op == "sw":
            latest[e.handle] = (e.slot, e.reads[0])
        elif e.op == "lw":
            slot, value = latest.get(e.handle, (None, None))
            consistent &= e.slot == slot and e.writes[0] == value
    correct = outs == outputs_of(interpret(check_source(src), xs))
    ok = fresh and consistent and correct and res.status == "ok"
    report(8, ok, f"{len(writes)} writes in slots 0..{len(writes) - 1}, "
                  f"read-after-write {'consistent' if consistent else 'broken'}")


def test_criterion_9_mov(ctx):
    movs = bad = 0
    for name in ("recursion.c", "multicall.c", "loops.c", "doubles.c"):
        src = (CORPUS / name).read_text()
        xs = draw_inputs(input_ranges(src), random.Random(name))
        _, res, _ = run_compiled(src, 9, xs, ctx, trace=True)
        for e in res.trace:
            if e.op.startswith("mov"):
                movs += 1
                bad += [getattr(v, "payload", v) for v in e.reads] != \
                       [getattr(v, "payload", v) for v in e.writes]
    report(9, movs > 0 and bad == 0, f"{movs} moves, {bad} altered a value")
