"""Statistics over compilations and traces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .isa import OPCODES

MIN_SAMPLES = 500


class AnalysisError(ValueError):
    pass


def shape_entry(op: str, regs, target) -> tuple:
    return (op, tuple(regs), target)


def trace_shape(trace) -> tuple:
    """Opcode and operand fields of every executed instruction.

    Ciphertext constants and memory slots are dropped, as is the branch
    outcome, which is a coin flipped per compilation.
    """
    return tuple(shape_entry(e.op, e.regs, e.target) for e in trace)


def shape_of_rows(rows) -> tuple:
    """Shape of a trace read back from a trace file."""
    out = []
    for row in rows:
        regs, _, target = row["regs"].partition("@")
        regs = tuple(int(r) for r in regs.rstrip(";").split(",") if r)
        out.append(shape_entry(row["opcode"], regs, int(target) if target else None))
    return tuple(out)


def first_difference(a, b) -> int | None:
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return i
    return None if len(a) == len(b) else min(len(a), len(b))


@dataclass
class Uniformity:
    statistic: float
    pvalue: float
    bins: int
    counts: np.ndarray


def offset_uniformity(samples, bins: int = 16) -> Uniformity:
    """Pearson chi-square of 32-bit offsets binned by their top bits."""
    if bins not in (16, 256):
        raise AnalysisError("bins must be 16 or 256")
    x = np.asarray(samples, dtype=np.uint64) & np.uint64(0xFFFF_FFFF)
    if x.size < MIN_SAMPLES:
        raise AnalysisError(f"too few samples ({x.size} < {MIN_SAMPLES})")
    shift = np.uint64(32 - int(np.log2(bins)))
    counts = np.bincount((x >> shift).astype(np.int64), minlength=bins)
    res = stats.chisquare(counts)
    return Uniformity(float(res.statistic), float(res.pvalue), bins, counts)


@dataclass
class Balance:
    taken_fraction: float
    correlation: float
    n: int


def point_biserial(bits, truths) -> float:
    bits = np.asarray(bits, dtype=float)
    truths = np.asarray(truths, dtype=float)
    if bits.std() == 0 or truths.std() == 0:
        return 0.0
    return float(stats.pointbiserialr(truths, bits).statistic)


def branch_balance(taken, truths=None) -> Balance:
    """Fraction of taken branches, and their correlation with the source boolean."""
    taken = np.asarray(taken, dtype=bool)
    if taken.size == 0:
        raise AnalysisError("no branch outcomes recorded")
    corr = point_biserial(taken, truths) if truths is not None else float("nan")
    return Balance(float(taken.mean()), corr, int(taken.size))


def branch_outcomes(trace, polarity: dict):
    """(taken, source boolean) for every executed conditional branch.

    The source boolean is the branch bit corrected by the compiler's polarity
    coin for that instruction.
    """
    out = []
    for e in trace:
        if OPCODES[e.op].kind == "branch":
            out.append((bool(e.taken), bool(e.taken) != bool(polarity[e.pc])))
    return out


def storm_summary(storms) -> dict:
    """Per-storage totals of the write storms a compilation emitted."""
    out: dict = {}
    for name, cls, words, form in storms:
        rec = out.setdefault(name, {"storms": 0, "words": 0, "loops": 0})
        rec["storms"] += 1
        rec["words"] += words
        rec["loops"] += form == "loop"
    return out
