"""Corpus loading and input generation shared by the test modules."""

import random
import re
from pathlib import Path

CORPUS = Path(__file__).parent / "corpus"
_RANGE = re.compile(r"(-?[\d.]+)\.\.(-?[\d.]+)")


def corpus_files():
    return sorted(CORPUS.glob("*.c"))


def input_ranges(src: str):
    first = src.splitlines()[0]
    assert first.startswith("// inputs:"), "corpus programs start with an input header"
    out = []
    for lo, hi in _RANGE.findall(first):
        if "." in lo or "." in hi:
            out.append((float(lo), float(hi)))
        else:
            out.append((int(lo), int(hi)))
    return out


def draw_inputs(ranges, rng: random.Random):
    vals = []
    for lo, hi in ranges:
        if isinstance(lo, float):
            vals.append(rng.uniform(lo, hi))
        else:
            vals.append(rng.randint(lo, hi))
    return vals


def outputs_of(result):
    """Comparable (name, type, value) triples from an oracle result."""
    return [(o.name, o.ctype, str(o.value)) for o in result.outputs]


def run_compiled(src, seed, inputs, ctx, trace=False, **kw):
    """Compile ``src`` under ``seed``, run it, and decode the outputs."""
    from fxacc.codegen import compile_program, decode_outputs, encrypt_inputs
    from fxacc.frontend import check_source
    from fxacc.vm import run

    result = compile_program(check_source(src), seed, ctx, **kw)
    res = run(result.obj, ctx.ops(), encrypt_inputs(result.schedule, inputs, ctx), trace=trace)
    outs = [(n, t, str(v)) for n, t, v in decode_outputs(result.schedule, res.outputs, ctx)]
    return result, res, outs
