"""Deterministic keyed randomness.

Every random decision in the package is a pure function of a 64-bit master
seed plus a structured key (strings, ints, tuples).  Draws are therefore
reproducible, order-independent, and safe to evaluate from parallel trials:
two call sites that use different keys never share randomness, and the same
key always yields the same value.
"""

from __future__ import annotations

import hashlib
import struct


def _encode(part) -> bytes:
    # Tagged, length-prefixed encoding so distinct key tuples never collide.
    if isinstance(part, bool):
        return b"o" + (b"\x01" if part else b"\x00")
    if isinstance(part, int):
        return b"i" + struct.pack(">q", part)
    if isinstance(part, str):
        raw = part.encode("utf-8")
        return b"s" + struct.pack(">I", len(raw)) + raw
    if isinstance(part, bytes):
        return b"b" + struct.pack(">I", len(part)) + part
    if isinstance(part, float):
        return b"f" + struct.pack(">d", part)
    if isinstance(part, (tuple, list)):
        body = b"".join(_encode(p) for p in part)
        return b"t" + struct.pack(">I", len(part)) + body
    raise TypeError(f"cannot use {type(part).__name__} as a randomness key part")


def _digest(seed: int, parts: tuple) -> bytes:
    key = struct.pack(">Q", seed % (1 << 64))
    h = hashlib.blake2b(digest_size=8, key=key)
    for part in parts:
        h.update(_encode(part))
    return h.digest()


def u01(seed: int, *parts) -> float:
    """Uniform value in [0, 1) determined by (seed, parts)."""
    return int.from_bytes(_digest(seed, parts), "big") / float(1 << 64)


def bernoulli(seed: int, p: float, *parts) -> bool:
    """One coin with success probability p, determined by (seed, parts)."""
    return u01(seed, *parts) < p


def derive_seed(seed: int, *parts) -> int:
    """A fresh 63-bit seed for an independent sub-stream."""
    return int.from_bytes(_digest(seed, ("derive",) + parts), "big") >> 1


def choose_index(seed: int, n: int, *parts) -> int:
    """Uniform index in range(n) determined by (seed, parts)."""
    if n <= 0:
        raise ValueError("choose_index needs n >= 1")
    return int(u01(seed, "choice", n, *parts) * n)
