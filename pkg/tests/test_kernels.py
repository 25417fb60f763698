"""The two kernel backends must agree bit-for-bit on identical inputs."""

import numpy as np
import pytest

from bqsim import _kernels
from bqsim.bits import substring_by_basis
from bqsim.hashpa import HashSeed, hash_bits
from bqsim.rng import stream_rng

numba = pytest.importorskip("numba")


def sample(trials, n, ell, seed):
    rng = stream_rng(seed, 0)
    return (rng.integers(0, 2, (trials, n), dtype=np.uint8),
            rng.integers(0, 2, (trials, n), dtype=np.uint8),
            rng.integers(0, 2, trials, dtype=np.uint8),
            rng.integers(0, 2, (trials, n), dtype=np.uint8),
            rng.integers(0, 2, (trials, ell, n), dtype=np.uint8),
            rng.integers(0, 2, (trials, ell, n), dtype=np.uint8))


@pytest.fixture(scope="module")
def jitted():
    return (numba.njit(cache=True)(_kernels._honest_ot_loop),
            numba.njit(cache=True)(_kernels._gf2_matvec_loop))


def test_honest_ot_backends_agree(jitted):
    jit_ot, _ = jitted
    for seed, (trials, n, ell) in enumerate([(200, 8, 2), (100, 64, 4),
                                             (50, 3, 1), (30, 17, 5)]):
        data = sample(trials, n, ell, seed)
        a = _kernels._honest_ot_numpy(*data)
        b = jit_ot(*data)
        for x, y in zip(a, b):
            assert np.array_equal(x, y), (trials, n, ell)


def test_gf2_backends_agree(jitted):
    _, jit_gf = jitted
    rng = stream_rng(7, 0)
    m = rng.integers(0, 2, (100, 3, 16), dtype=np.uint8)
    xs = rng.integers(0, 2, (100, 16), dtype=np.uint8)
    assert np.array_equal(_kernels._gf2_matvec_numpy(m, xs), jit_gf(m, xs))


def test_kernel_matches_reference_implementation():
    # per-trial recomputation with the unbatched hashing primitives
    trials, n, ell = 40, 12, 3
    x, b, c, coins, r0, r1 = sample(trials, n, ell, 99)
    s0, s1, y = _kernels._honest_ot_numpy(x, b, c, coins, r0, r1)
    for t in range(trials):
        seeds = [HashSeed(r0[t], n, ell), HashSeed(r1[t], n, ell)]
        for j, s in ((0, s0), (1, s1)):
            ref = hash_bits(seeds[j], substring_by_basis(x[t], b[t], j,
                                                         pad_to=n))
            assert np.array_equal(s[t], ref)
        xp = np.where(b[t] == c[t], x[t], coins[t])
        ref_y = hash_bits(seeds[c[t]],
                          substring_by_basis(xp, b[t], int(c[t]), pad_to=n))
        assert np.array_equal(y[t], ref_y)


def test_active_backend_selection():
    # whichever backend the env selected, it must match the numpy one
    data = sample(50, 16, 3, 5)
    a = _kernels.honest_ot_trials(*data)
    b = _kernels._honest_ot_numpy(*data)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)
