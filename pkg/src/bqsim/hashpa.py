"""Two-universal hashing over GF(2) and the privacy-amplification bound.

The hash family is the set of all l x n binary matrices acting on bit
strings by matrix-vector multiplication mod 2.  For distinct inputs the
difference d = x0 xor x1 is nonzero, so M*d is uniform over {0,1}^l and
the collision probability is exactly 2^-l: the family is two-universal
with equality.  All logarithms are base 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .bits import as_bits


@dataclass(frozen=True)
class HashSeed:
    """Seed of the linear hash family: an l x n binary matrix."""
    matrix: np.ndarray
    n: int
    ell: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.uint8)
        if m.shape != (self.ell, self.n):
            raise ValueError(
                f"matrix shape {m.shape} does not match (l={self.ell}, n={self.n})")
        if m.size and m.max() > 1:
            raise ValueError("seed matrix entries must be bits")
        object.__setattr__(self, "matrix", m)


def sample_hash_seed(n: int, ell: int, rng) -> HashSeed:
    """Uniformly random seed; requires 1 <= l <= n."""
    if not 1 <= ell <= n:
        raise ValueError(f"need 1 <= l <= n, got l={ell}, n={n}")
    return HashSeed(rng.integers(0, 2, size=(ell, n), dtype=np.uint8), n, ell)


def hash_bits(seed: HashSeed, x) -> np.ndarray:
    """y = M x over GF(2).  Inputs must already be padded to length n."""
    x = as_bits(x)
    if x.size != seed.n:
        raise ValueError(f"input length {x.size} != n={seed.n}")
    return ((seed.matrix.astype(np.int64) @ x.astype(np.int64)) % 2).astype(np.uint8)


def collision_probability(n: int, ell: int, x0, x1,
                          method: str = "exact") -> float:
    """Pr over uniform seeds that hash(x0) == hash(x1), for x0 != x1.

    method "exact" uses the linear-family argument (M*d uniform for
    d != 0, so the probability is 2^-l); "enumerate" checks every seed,
    feasible for n*l <= 24.
    """
    x0 = as_bits(x0, n)
    x1 = as_bits(x1, n)
    if np.array_equal(x0, x1):
        raise ValueError("collision probability requires x0 != x1")
    if method == "exact":
        return 2.0 ** (-ell)
    if method == "enumerate":
        if n * ell > 24:
            raise ValueError("seed enumeration limited to n*l <= 24")
        hits = 0
        total = 0
        for entries in product((0, 1), repeat=n * ell):
            m = np.array(entries, dtype=np.uint8).reshape(ell, n)
            seed = HashSeed(m, n, ell)
            if np.array_equal(hash_bits(seed, x0), hash_bits(seed, x1)):
                hits += 1
            total += 1
        return hits / total
    raise ValueError(f"unknown method {method!r}")


def pa_extractable_length(h_min: float, q: int, eps: float) -> int:
    """Largest l with l <= h_min - q - 2 log(1/eps), clamped at 0.

    A hash output of this length is guaranteed (eps + 2 eps')-close to
    uniform given the side information, where eps' is the smoothing used
    to compute h_min.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be in (0, 1)")
    if q < 0:
        raise ValueError("q must be non-negative")
    raw = h_min - q - 2.0 * math.log2(1.0 / eps)
    return max(0, math.floor(raw))
