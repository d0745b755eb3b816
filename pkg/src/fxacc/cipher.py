"""Simulated encryption oracle for the encrypted-computing platform.

The key context is the only holder of the key.  The virtual machine is handed a
:class:`CipherOps` capability that can combine ciphertexts (the ``[f]`` and
``[R]`` operations) but has no way to open them.

A sealed word is one AES-128 block ``value(4) | nonce(8) | magic(4)`` under the
key.  The nonce's top bit carries the origin, so constant and runtime
ciphertexts can never collide.
"""

from __future__ import annotations

import base64
import enum
import os
import random
import struct
import threading
from dataclasses import dataclass
from functools import lru_cache

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from . import words
from .words import M32, M64, join64, split64

_MAGIC = b"FxA\x01"
_ORIGIN_BIT = 1 << 63
_CACHE_LIMIT = 1 << 20


class IntegrityError(ValueError):
    """Ciphertext was not produced under this key, or has been tampered with."""


class Origin(enum.Enum):
    CONSTANT = "C"
    RUNTIME = "R"


@dataclass(frozen=True, slots=True)
class Ciphertext:
    payload: bytes
    origin: Origin

    def serialize(self) -> str:
        return base64.b64encode(self.payload).decode("ascii") + self.origin.value

    @classmethod
    def parse(cls, text: str) -> "Ciphertext":
        if len(text) < 2 or text[-1] not in "CR":
            raise IntegrityError(f"bad ciphertext text {text!r}")
        try:
            payload = base64.b64decode(text[:-1], validate=True)
        except ValueError as exc:
            raise IntegrityError(str(exc)) from exc
        return cls(payload, Origin(text[-1]))


@dataclass(frozen=True, slots=True)
class CipherPair:
    """64-bit value as two sealed words, high word first."""

    hi: Ciphertext
    lo: Ciphertext

    def serialize(self) -> str:
        return self.hi.serialize() + ":" + self.lo.serialize()

    @classmethod
    def parse(cls, text: str) -> "CipherPair":
        hi, sep, lo = text.partition(":")
        if not sep:
            raise IntegrityError(f"bad ciphertext pair {text!r}")
        return cls(Ciphertext.parse(hi), Ciphertext.parse(lo))

    @property
    def origin(self) -> Origin:
        return self.hi.origin


@dataclass(frozen=True, slots=True)
class AddrHandle:
    handle: int


def parse_sealed(text: str) -> Ciphertext | CipherPair:
    return CipherPair.parse(text) if ":" in text else Ciphertext.parse(text)


class NonceStream:
    """Source of 63-bit nonces; seeded for reproducible builds, else seeded
    from OS entropy."""

    def __init__(self, seed: int | None = None):
        if seed is None:
            seed = int.from_bytes(os.urandom(16), "big")
        self._rng = random.Random(seed)
        self.next = lambda: self._rng.getrandbits(63)


DEFAULT_KEY = bytes.fromhex("2b7e151628aed2a6abf7158809cf4f3c")


class KeyContext:
    """Holds the key.  Everything that needs plaintext goes through here."""

    def __init__(self, key: bytes = DEFAULT_KEY):
        if len(key) != 16:
            raise ValueError("key must be 16 bytes")
        self.key = key
        aes = Cipher(algorithms.AES(key), modes.ECB())
        self._enc = aes.encryptor()
        self._dec = aes.decryptor()
        addr_key = Cipher(algorithms.AES(key), modes.ECB()).encryptor().update(b"addr-handle-key!")
        self._addr = Cipher(algorithms.AES(addr_key), modes.ECB()).encryptor()
        self._lock = threading.Lock()
        # payload -> (value, nonce); filled at seal time so opening a fresh
        # runtime word costs no AES decryption
        self._plain: dict[bytes, tuple[int, int]] = {}
        self._handle = lru_cache(maxsize=1 << 16)(self._handle_uncached)

    # -- sealing -------------------------------------------------------------
    def encrypt(self, x: int, origin: Origin, nonces: NonceStream) -> Ciphertext:
        nonce = nonces.next()
        if origin is Origin.CONSTANT:
            nonce |= _ORIGIN_BIT
        block = struct.pack(">IQ", x & M32, nonce) + _MAGIC
        with self._lock:
            payload = self._enc.update(block)
            if len(self._plain) >= _CACHE_LIMIT:
                self._plain.clear()
            self._plain[payload] = (x & M32, nonce)
        return Ciphertext(payload, origin)

    def _open(self, payload: bytes) -> tuple[int, int]:
        hit = self._plain.get(payload)
        if hit is not None:
            return hit
        return self._open_uncached(payload)

    def _open_uncached(self, payload: bytes) -> tuple[int, int]:
        if len(payload) != 16:
            raise IntegrityError("payload length")
        with self._lock:
            block = self._dec.update(payload)
        if block[12:] != _MAGIC:
            raise IntegrityError("integrity check failed")
        value, nonce = struct.unpack(">IQ", block[:12])
        with self._lock:
            self._plain[payload] = (value, nonce)
        return value, nonce

    def decrypt_word(self, c: Ciphertext) -> int:
        """Plaintext as an unsigned 32-bit word."""
        value, nonce = self._open(c.payload)
        if bool(nonce & _ORIGIN_BIT) != (c.origin is Origin.CONSTANT):
            raise IntegrityError("origin tag does not match sealed origin")
        return value

    def decrypt(self, c: Ciphertext) -> int:
        """Plaintext as a signed 32-bit word."""
        return words.s32(self.decrypt_word(c))

    def nonce_of(self, c: Ciphertext) -> int:
        return self._open(c.payload)[1]

    def encrypt_pair(self, x: int, origin: Origin, nonces: NonceStream) -> CipherPair:
        hi, lo = split64(x)
        return CipherPair(self.encrypt(hi, origin, nonces), self.encrypt(lo, origin, nonces))

    def decrypt_pair(self, c: CipherPair) -> int:
        """Plaintext as an unsigned 64-bit value."""
        return join64(self.decrypt_word(c.hi), self.decrypt_word(c.lo))

    def open(self, c: Ciphertext | CipherPair) -> int:
        return self.decrypt_pair(c) if isinstance(c, CipherPair) else self.decrypt_word(c)

    def seal(self, x: int, width: int, origin: Origin, nonces: NonceStream):
        if width == 2:
            return self.encrypt_pair(x, origin, nonces)
        return self.encrypt(x, origin, nonces)

    # -- address handles -----------------------------------------------------
    def _handle_uncached(self, a: int) -> int:
        # 4-round Feistel over 16-bit halves: a keyed bijection on 32-bit words
        left, right = a >> 16, a & 0xFFFF
        for rnd in range(4):
            block = struct.pack(">HH", rnd, right) + bytes(12)
            with self._lock:
                f = int.from_bytes(self._addr.update(block)[:2], "big")
            left, right = right, left ^ f
        return (left << 16) | right

    def addr_handle(self, c: Ciphertext) -> AddrHandle:
        return AddrHandle(self._handle(self.decrypt_word(c)))

    # -- ciphertext-domain operations ----------------------------------------
    def ct_op(self, tag: str, args, nonces: NonceStream):
        plain = [self.open(a) for a in args]
        value, width = apply_plain(tag, plain)
        return self.seal(value, width, Origin.RUNTIME, nonces)

    def ct_cmp(self, rel: str, a, b, flavor: str = "s") -> bool:
        return words.compare(rel, flavor, self.open(a), self.open(b))

    def ops(self, nonces: NonceStream | None = None) -> "CipherOps":
        return CipherOps(self, nonces if nonces is not None else NonceStream())


def apply_plain(tag: str, plain: list[int]) -> tuple[int, int]:
    """Apply op ``tag`` to plain values; returns (value, width in words)."""
    if tag in words.BINOPS32:
        a, b = plain
        return words.BINOPS32[tag](a, b), 1
    if tag in words.BINOPS64:
        a, b = plain
        return words.BINOPS64[tag](a, b), 2
    if tag in words.SHIFTS64:
        a, b = plain
        return words.SHIFTS64[tag](a, b), 2
    if tag in words.UNOPS:
        _, wout, fn = words.UNOPS[tag]
        (a,) = plain
        return fn(a), wout
    if tag in ("add2", "sub2"):
        # component-wise on the two halves, no carry
        a, b = (split64(p) for p in plain)
        sign = 1 if tag == "add2" else -1
        return join64(a[0] + sign * b[0], a[1] + sign * b[1]), 2
    raise ValueError(f"unknown op tag {tag!r}")


def _pair_sub(v: int, k: int) -> int:
    return words.join64(*(x - y for x, y in zip(split64(v), split64(k))))


def _pair_add(v: int, k: int) -> int:
    return words.join64(*(x + y for x, y in zip(split64(v), split64(k))))


def _sub(v: int, k: int, width: int) -> int:
    return _pair_sub(v, k) if width == 2 else (v - k) & M32


def _add(v: int, k: int, width: int) -> int:
    return _pair_add(v, k) if width == 2 else (v + k) & M32


class CipherOps:
    """Capability handed to the processor: combine ciphertexts, never open them.

    Each method is one atomic FxA operation; intermediate plaintexts live only
    inside the call.
    """

    __slots__ = ("_ctx", "_nonces")

    def __init__(self, ctx: KeyContext, nonces: NonceStream):
        self._ctx = ctx
        self._nonces = nonces

    def _out(self, value: int, width: int):
        return self._ctx.seal(value, width, Origin.RUNTIME, self._nonces)

    def ct_op(self, tag: str, args):
        return self._ctx.ct_op(tag, args, self._nonces)

    def ct_cmp(self, rel: str, a, b, flavor: str = "s") -> bool:
        return self._ctx.ct_cmp(rel, a, b, flavor)

    def addr_handle(self, c: Ciphertext) -> AddrHandle:
        return self._ctx.addr_handle(c)

    # fused forms used by the VM --------------------------------------------
    def alu(self, op: str, a: Ciphertext, b: Ciphertext, k: Ciphertext) -> Ciphertext:
        o = self._ctx.open
        x, y = o(a), o(b)
        v = x + y if op == "add" else x - y
        return self._out((v + o(k)) & M32, 1)

    def offset(self, a, k):
        """a [+] k, component-wise for pairs."""
        o = self._ctx.open
        width = 2 if isinstance(a, CipherPair) else 1
        return self._out(_add(o(a), o(k), width), width)

    def load_const(self, k):
        width = 2 if isinstance(k, CipherPair) else 1
        return self._out(self._ctx.open(k), width)

    def fused(self, op: str, a, b, k0, k1, k2):
        """(a [-] k1) [op] (b [-] k2) [+] k0."""
        o = self._ctx.open
        wa = 2 if isinstance(a, CipherPair) else 1
        wb = 2 if isinstance(b, CipherPair) else 1
        x = _sub(o(a), o(k1), wa)
        y = _sub(o(b), o(k2), wb)
        value, width = apply_plain(op, [x, y])
        return self._out(_add(value, o(k0), width), width)

    def unary(self, op: str, a, k0, k1):
        """op(a [-] k1) [+] k0."""
        o = self._ctx.open
        wa = 2 if isinstance(a, CipherPair) else 1
        value, width = apply_plain(op, [_sub(o(a), o(k1), wa)])
        return self._out(_add(value, o(k0), width), width)

    def branch(self, rel: str, flavor: str, a, b, consts) -> bool:
        """Branch test; the last constant's low bit inverts the outcome."""
        o = self._ctx.open
        invert = o(consts[-1]) & 1
        if len(consts) == 2:
            # word form: r1 [R] r2 [+] k
            x, y = o(a), (o(b) + o(consts[0])) & M32
        else:
            width = 2 if isinstance(a, CipherPair) else 1
            x = _sub(o(a), o(consts[0]), width)
            y = _sub(o(b), o(consts[1]), width)
        return words.compare(rel, flavor, x, y) != bool(invert)

    def address(self, base: Ciphertext, k: Ciphertext) -> AddrHandle:
        """Unique handle of the address base [+] k."""
        o = self._ctx.open
        return AddrHandle(self._ctx._handle((o(base) + o(k)) & M32))


def random_key() -> bytes:
    return os.urandom(16)
