"""The user's I/O schedule: where inputs go, which offsets to add on the way in
and subtract on the way out.  Also the client-side encode/decode steps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..cipher import KeyContext, NonceStream, Origin
from ..frontend.srctypes import Basic
from ..oracle import convert, from_words, word_bits
from ..words import M32, join64, split64


class ScheduleError(ValueError):
    pass


def _fmt_delta(d) -> str:
    return f"{d[0]}:{d[1]}" if isinstance(d, tuple) else str(d)


def _parse_delta(text: str):
    if ":" in text:
        hi, lo = text.split(":")
        return (int(hi), int(lo))
    return int(text)


@dataclass
class Schedule:
    seed: int
    inputs: list = field(default_factory=list)  # [(name, reg, delta, ctype)]
    outputs: dict = field(default_factory=dict)  # site -> (name, delta, ctype)

    def to_text(self) -> str:
        lines = []
        for name, reg, d, ctype in self.inputs:
            lines.append(f"in {name} r{reg} {_fmt_delta(d)} {ctype}")
        for site in sorted(self.outputs):
            name, d, ctype = self.outputs[site]
            lines.append(f"out {name} site{site} {_fmt_delta(d)} {ctype}")
        lines.append(f"seed {self.seed}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Schedule":
        sched = cls(seed=0)
        for n, line in enumerate(text.splitlines(), 1):
            parts = line.split()
            if not parts:
                continue
            try:
                if parts[0] == "in" and len(parts) == 5 and parts[2].startswith("r"):
                    sched.inputs.append((parts[1], int(parts[2][1:]), _parse_delta(parts[3]), parts[4]))
                elif parts[0] == "out" and len(parts) == 5 and parts[2].startswith("site"):
                    sched.outputs[int(parts[2][4:])] = (parts[1], _parse_delta(parts[3]), parts[4])
                elif parts[0] == "seed" and len(parts) == 2:
                    sched.seed = int(parts[1])
                else:
                    raise ValueError(line)
            except ValueError as exc:
                raise ScheduleError(f"schedule line {n}: cannot parse {line!r}") from exc
        return sched


def plain_words(value, ctype: str) -> int:
    """Bit pattern (32 or 64 bits) of a plaintext value of a basic type."""
    t = Basic(ctype)
    ws = word_bits(value, t)
    return join64(*ws) if len(ws) == 2 else ws[0]


def value_of(bits: int, ctype: str):
    t = Basic(ctype)
    ws = list(split64(bits)) if t.info.bits == 64 else [bits & M32]
    v = from_words(ws, t)
    if t.name == "bool":
        return int(v != 0)
    return v


def coerce_input(v, ctype: str):
    """A Python number as a value of the parameter's type (C conversion rules)."""
    t = Basic(ctype)
    if isinstance(v, (float, np.floating)):
        return convert(np.float64(v), Basic("double"), t)
    src = Basic("llong") if -(2**63) <= int(v) < 2**63 else Basic("ullong")
    return convert(int(v), src, t)


def offset_bits(bits: int, delta, width: int, sign: int) -> int:
    if width == 2:
        hi, lo = split64(bits)
        return join64(hi + sign * delta[0], lo + sign * delta[1])
    return (bits + sign * delta) & M32


def encrypt_inputs(sched: Schedule, values, ctx: KeyContext, nonces: NonceStream | None = None):
    """Plain input values -> {register: sealed value + Δ_in}."""
    if len(values) != len(sched.inputs):
        raise ScheduleError(f"program expects {len(sched.inputs)} inputs, got {len(values)}")
    nonces = nonces or NonceStream()
    regs = {}
    for v, (_, reg, d, ctype) in zip(values, sched.inputs):
        w = 2 if Basic(ctype).info.bits == 64 else 1
        bits = offset_bits(plain_words(coerce_input(v, ctype), ctype), d, w, +1)
        regs[reg] = ctx.seal(bits, w, Origin.RUNTIME, nonces)
    return regs


def decode_outputs(sched: Schedule, outs, ctx: KeyContext) -> list:
    """VM output stream [(site, sealed)] -> [(name, ctype, plain value)]."""
    result = []
    for site, c in outs:
        if site not in sched.outputs:
            raise ScheduleError(f"output site {site} missing from schedule")
        name, d, ctype = sched.outputs[site]
        w = 2 if Basic(ctype).info.bits == 64 else 1
        bits = offset_bits(ctx.open(c), d, w, -1)
        result.append((name, ctype, value_of(bits, ctype)))
    return result
