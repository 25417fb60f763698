"""Bit-string and basis-string helpers.

Bit strings and basis strings are numpy uint8 arrays with entries in {0,1}.
For bases, 0 denotes the computational (+) basis and 1 the Hadamard (x)
basis.
"""

from __future__ import annotations

import numpy as np


def as_bits(value, length: int | None = None) -> np.ndarray:
    """Coerce a bit string given as array, list, int or '0101' text.

    Integers require an explicit length and are read most-significant
    bit first.
    """
    if isinstance(value, str):
        arr = np.array([int(ch) for ch in value], dtype=np.uint8)
    elif isinstance(value, (int, np.integer)):
        if length is None:
            raise ValueError("integer bit strings need an explicit length")
        arr = int_to_bits(int(value), length)
    else:
        arr = np.asarray(value, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("bit string must be one-dimensional")
    if arr.size and arr.max() > 1:
        raise ValueError("bit string entries must be 0 or 1")
    if length is not None and arr.size != length:
        raise ValueError(f"expected {length} bits, got {arr.size}")
    return arr


def bits_to_int(bits: np.ndarray) -> int:
    out = 0
    for b in np.asarray(bits, dtype=np.uint8):
        out = (out << 1) | int(b)
    return out


def int_to_bits(value: int, length: int) -> np.ndarray:
    if value < 0 or value >= (1 << length):
        raise ValueError(f"{value} does not fit in {length} bits")
    return np.array([(value >> (length - 1 - i)) & 1 for i in range(length)],
                    dtype=np.uint8)


def bits_to_hex(bits: np.ndarray) -> str:
    """Hex encoding of a bit string, left-padded to whole bytes."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size == 0:
        return ""
    return np.packbits(bits).tobytes().hex()


def random_bits(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def substring_by_basis(x: np.ndarray, b: np.ndarray, which: int,
                       pad_to: int | None = None) -> np.ndarray:
    """All x_i with b_i == which, in order, zero-padded to pad_to bits."""
    x = np.asarray(x, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    if x.shape != b.shape:
        raise ValueError("x and b must have equal length")
    sub = x[b == which]
    if pad_to is None:
        return sub
    if sub.size > pad_to:
        raise ValueError("substring longer than pad target")
    return np.concatenate([sub, np.zeros(pad_to - sub.size, dtype=np.uint8)])
