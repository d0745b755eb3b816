"""fxacc command line: compile, run, oracle-run, diff-trace, stats, storm-report.

Exit codes: 0 ok, 1 traces differ, 2 compile error, 3 runtime trap or fault,
4 usage error.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from pathlib import Path

from . import analysis
from .cipher import KeyContext
from .codegen import Schedule, ScheduleError, compile_program, decode_outputs, encrypt_inputs
from .frontend import CompileError, check_source
from .isa import FormatError, decode_object, encode_object
from .oracle import interpret
from .vm import read_trace, run, write_trace

EXIT_OK, EXIT_DIFF, EXIT_COMPILE, EXIT_TRAP, EXIT_USAGE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_value(text: str):
    try:
        return int(text, 0)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"bad input value {text!r}") from None


def parse_inputs(items) -> list:
    out = []
    for item in items or []:
        out += [parse_value(t) for t in item.replace(",", " ").split()]
    return out


def load_program(path: str):
    try:
        src = Path(path).read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    return src, check_source(src, path)


def key_context(args) -> KeyContext:
    if getattr(args, "key", None):
        try:
            return KeyContext(bytes.fromhex(args.key))
        except ValueError as exc:
            raise UsageError(f"bad key: {exc}") from None
    return KeyContext()


def sched_path(obj_path: str) -> Path:
    return Path(obj_path).with_suffix(".sched")


def format_value(v) -> str:
    return repr(float(v)) if hasattr(v, "dtype") and v.dtype.kind == "f" else str(v)


def print_outputs(outputs) -> None:
    for name, _, value in outputs:
        print(f"{name} = {format_value(value)}")


# -- subcommands ------------------------------------------------------------------------


def cmd_compile(args) -> int:
    _, prog = load_program(args.src)
    seed = args.seed
    if seed is None:
        seed = int.from_bytes(os.urandom(4), "big")
        print(f"seed {seed}")
    result = compile_program(prog, seed, key_context(args))
    out = Path(args.output or Path(args.src).with_suffix(".fxa").name)
    out.write_bytes(encode_object(result.obj))
    sched_path(str(out)).write_text(result.schedule.to_text())
    if args.listing:
        print("\n".join(result.listing))
    return EXIT_OK


def cmd_run(args) -> int:
    ctx = key_context(args)
    try:
        obj = decode_object(Path(args.obj).read_bytes())
        sched = Schedule.from_text(sched_path(args.obj).read_text())
        regs = encrypt_inputs(sched, parse_inputs(args.inputs), ctx)
    except (OSError, FormatError, ScheduleError) as exc:
        raise UsageError(str(exc)) from None
    res = run(obj, ctx.ops(), regs, trace=bool(args.trace), budget=args.budget)
    if args.trace:
        write_trace(res.trace, args.trace)
    print_outputs(decode_outputs(sched, res.outputs, ctx))
    if res.status != "ok":
        print(f"{res.status}: {res.message}", file=sys.stderr)
        return EXIT_TRAP
    return EXIT_OK


def cmd_oracle_run(args) -> int:
    _, prog = load_program(args.src)
    res = interpret(prog, parse_inputs(args.inputs))
    print_outputs([(o.name, o.ctype, o.value) for o in res.outputs])
    if res.status != "ok":
        print(f"{res.status}: {res.message}", file=sys.stderr)
        return EXIT_TRAP
    return EXIT_OK


def cmd_diff_trace(args) -> int:
    try:
        a = analysis.shape_of_rows(read_trace(args.a))
        b = analysis.shape_of_rows(read_trace(args.b))
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    at = analysis.first_difference(a, b)
    if at is None:
        print(f"shapes equal ({len(a)} steps)")
        return EXIT_OK
    print(f"shapes differ at step {at} (lengths {len(a)} and {len(b)})")
    return EXIT_DIFF


def cmd_stats(args) -> int:
    if args.seeds < analysis.MIN_SAMPLES:
        raise UsageError(f"too few seeds ({args.seeds} < {analysis.MIN_SAMPLES})")
    src, prog = load_program(args.src)
    ctx = key_context(args)
    inputs = parse_inputs(args.inputs) or [0] * len(prog.main.params)
    rng = random.Random(args.base_seed)
    seeds = rng.sample(range(1 << 31), args.seeds)
    offsets, first_taken, taken, truths = [], [], [], []
    for seed in seeds:
        result = compile_program(check_source(src, args.src), seed, ctx)
        if args.target not in result.var_locs:
            raise UsageError(f"unknown target variable {args.target!r}")
        d = result.var_locs[args.target][1]
        offsets.append(d[0] if isinstance(d, tuple) else d)
        res = run(result.obj, ctx.ops(), encrypt_inputs(result.schedule, inputs, ctx), trace=True)
        outcomes = analysis.branch_outcomes(res.trace, result.stats["polarity"])
        if outcomes:
            first_taken.append(outcomes[0][0])
        for t, b in outcomes:
            taken.append(t)
            truths.append(b)
    uni = analysis.offset_uniformity(offsets, args.bins)
    print(f"program: {args.src}")
    print(f"seeds: {args.seeds}")
    print(f"target: {args.target}")
    print(f"chi2_bins: {uni.bins}")
    print(f"chi2_statistic: {uni.statistic:.4f}")
    print(f"chi2_pvalue: {uni.pvalue:.6g}")
    if first_taken:
        first = analysis.branch_balance(first_taken)
        pooled = analysis.branch_balance(taken, truths)
        print(f"first_branch_taken_fraction: {first.taken_fraction:.4f}")
        print(f"branches_observed: {pooled.n}")
        print(f"taken_fraction: {pooled.taken_fraction:.4f}")
        print(f"taken_truth_correlation: {pooled.correlation:.4f}")
    else:
        print("branches_observed: 0")
    return EXIT_OK


def cmd_storm_report(args) -> int:
    _, prog = load_program(args.src)
    result = compile_program(prog, args.seed, key_context(args))
    for name, cls, words, form in result.stats["storms"]:
        print(f"storm {name} class {cls} words {words} {form}")
    for name, rec in analysis.storm_summary(result.stats["storms"]).items():
        print(f"total {name} storms {rec['storms']} words {rec['words']} loops {rec['loops']}")
    print(f"instructions {result.stats['instructions']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fxacc", description="Obfuscating compiler and encrypted-computing VM.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def keyed(sp):
        sp.add_argument("--key", help="AES-128 key as 32 hex digits")
        return sp

    c = keyed(sub.add_parser("compile", help="compile C source to an FXA1 object"))
    c.add_argument("src")
    c.add_argument("--seed", type=int)
    c.add_argument("-o", "--output")
    c.add_argument("--listing", action="store_true", help="print the linked listing")
    c.set_defaults(fn=cmd_compile)

    r = keyed(sub.add_parser("run", help="run an object on plaintext inputs"))
    r.add_argument("obj")
    r.add_argument("--in", dest="inputs", action="append", default=[])
    r.add_argument("--trace")
    r.add_argument("--budget", type=int, default=10_000_000)
    r.set_defaults(fn=cmd_run)

    o = sub.add_parser("oracle-run", help="run the reference interpreter")
    o.add_argument("src")
    o.add_argument("--in", dest="inputs", action="append", default=[])
    o.set_defaults(fn=cmd_oracle_run)

    d = sub.add_parser("diff-trace", help="compare the shapes of two trace files")
    d.add_argument("a")
    d.add_argument("b")
    d.set_defaults(fn=cmd_diff_trace)

    s = keyed(sub.add_parser("stats", help="offset uniformity and branch balance over seeds"))
    s.add_argument("src")
    s.add_argument("--seeds", type=int, default=2000)
    s.add_argument("--target", required=True)
    s.add_argument("--in", dest="inputs", action="append", default=[])
    s.add_argument("--bins", type=int, choices=(16, 256), default=16)
    s.add_argument("--base-seed", type=int, default=0)
    s.set_defaults(fn=cmd_stats)

    w = keyed(sub.add_parser("storm-report", help="write storms emitted for one compilation"))
    w.add_argument("src")
    w.add_argument("--seed", type=int, default=0)
    w.set_defaults(fn=cmd_storm_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CompileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPILE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
