"""Obfuscating C compiler for an encrypted-computing (FxA) processor, with a
simulated-cipher virtual machine, a plaintext reference interpreter and a
statistics suite."""

__version__ = "0.1.0"
