"""Obfuscating compiler back end."""

from .compiler import CompileResult, Compiler, compile_program
from .schedule import Schedule, ScheduleError, decode_outputs, encrypt_inputs

__all__ = [
    "CompileResult", "Compiler", "Schedule", "ScheduleError", "compile_program",
    "decode_outputs", "encrypt_inputs",
]
