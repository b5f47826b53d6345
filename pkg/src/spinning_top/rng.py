"""Seeded random streams.

Every random draw in the package comes from numpy's PCG64 bit generator,
seeded through ``SeedSequence`` with an explicit entropy tuple. Streams are
split by appending integer keys (pair index, role, hashed game state, ...)
rather than by advancing a shared generator, so results never depend on
evaluation order or worker count.
"""
from __future__ import annotations

import hashlib

import numpy as np

_MASK32 = 0xFFFFFFFF


def _words(value: int) -> list[int]:
    # SeedSequence wants non-negative 32-bit words; split wide ints.
    value = int(value)
    if value < 0:
        value = (-value << 1) | 1
    out = []
    while True:
        out.append(value & _MASK32)
        value >>= 32
        if not value:
            return out


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for ``(seed, *keys)``."""
    entropy = _words(seed)
    spawn = []
    for k in keys:
        spawn.extend(_words(k))
        spawn.append(len(spawn))  # keep (1, 23) and (12, 3) apart
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy, spawn_key=tuple(spawn))))


def digest(obj) -> int:
    """Stable 64-bit digest of ``repr(obj)`` (independent of PYTHONHASHSEED)."""
    h = hashlib.blake2b(repr(obj).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")
