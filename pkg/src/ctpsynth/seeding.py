"""Deterministic seed derivation.

Every stochastic choice in the pipeline is keyed by a 64-bit seed derived
with :func:`mix64`, a SplitMix64-style finalizer folded over the seed
material.  The function is small and fully specified here so that an
independent implementation can reproduce the exact same seeds:

    h = 0
    for each value v:  h = splitmix64_mix((h + GOLDEN + v) mod 2^64)

where GOLDEN = 0x9E3779B97F4A7C15 and splitmix64_mix is the xor-shift
multiply finalizer from Steele et al.'s SplitMix64.

Sampling itself uses numpy PCG64 generators seeded from these values;
per-sample seeds make parallel generation order-independent.
"""
from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64_mix(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix64(*values: int) -> int:
    """Mix any number of integers into one 64-bit seed."""
    h = 0
    for v in values:
        h = _splitmix64_mix((h + _GOLDEN + (int(v) & _MASK64)) & _MASK64)
    return h


def hash_name(name: str) -> int:
    """Stable 64-bit hash of a text id (blake2b; not Python's salted hash)."""
    digest = hashlib.blake2b(name.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_rng(seed: int) -> np.random.Generator:
    """A PCG64 generator for one derived 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))
