"""Hot numeric kernels for batched honest protocol runs.

Two interchangeable backends: a numba @njit loop version (default) and a
vectorized pure-numpy version.  Selection is by the BQSIM_NUMBA env var
("0" disables numba); tests assert both backends agree bit-for-bit.

All randomness is pre-sampled by the caller, so the kernels are pure
functions of their array arguments.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("BQSIM_NUMBA", "1") != "0"


def _honest_ot_loop(x, b, c, coins, r0, r1):
    """Per-trial honest BQS-OT arithmetic.

    x, b, coins: (T, n) bits; c: (T,); r0, r1: (T, ell, n) hash seeds.
    Returns s0, s1, y: (T, ell) with s_j = h(r_j, pad(x_|j)) and
    y = h(r_c, pad(x'_|c)).
    """
    trials, n = x.shape
    ell = r0.shape[1]
    s0 = np.zeros((trials, ell), dtype=np.uint8)
    s1 = np.zeros((trials, ell), dtype=np.uint8)
    y = np.zeros((trials, ell), dtype=np.uint8)
    xs = np.zeros(n, dtype=np.uint8)
    for t in range(trials):
        ct = c[t]
        for j in range(2):
            rj = r0[t] if j == 0 else r1[t]
            # compacted substring x_|j, zero-padded to n
            pos = 0
            for i in range(n):
                xs[i] = 0
            for i in range(n):
                if b[t, i] == j:
                    xs[pos] = x[t, i]
                    pos += 1
            for row in range(ell):
                acc = 0
                for i in range(pos):
                    acc ^= rj[row, i] & xs[i]
                if j == 0:
                    s0[t, row] = acc
                else:
                    s1[t, row] = acc
        # receiver measures in basis c; x'_|c only uses matched positions,
        # where x'_i = x_i, so the mismatch coins never enter y
        pos = 0
        for i in range(n):
            xs[i] = 0
        for i in range(n):
            if b[t, i] == ct:
                xs[pos] = x[t, i]
                pos += 1
        rc = r0[t] if ct == 0 else r1[t]
        for row in range(ell):
            acc = 0
            for i in range(pos):
                acc ^= rc[row, i] & xs[i]
            y[t, row] = acc
    return s0, s1, y


def _honest_ot_numpy(x, b, c, coins, r0, r1):
    """Vectorized backend; see _honest_ot_loop for the contract."""
    trials, n = x.shape
    xprime = np.where(b == c[:, None], x, coins)
    out = []
    for j, r in ((0, r0), (1, r1)):
        # stable sort brings positions with b == j to the front, in order
        order = np.argsort(b != j, axis=1, kind="stable")
        xs = np.take_along_axis(x, order, axis=1)
        xs = xs * (np.take_along_axis(b, order, axis=1) == j)
        out.append((np.einsum("tli,ti->tl", r, xs) % 2).astype(np.uint8))
    s0, s1 = out
    # receiver side: mismatched coins never enter x'_|c
    order = np.argsort(b != c[:, None], axis=1, kind="stable")
    xs = np.take_along_axis(xprime, order, axis=1)
    xs = xs * (np.take_along_axis(b, order, axis=1) == c[:, None])
    rc = np.where(c[:, None, None] == 0, r0, r1)
    y = (np.einsum("tli,ti->tl", rc, xs) % 2).astype(np.uint8)
    return s0, s1, y


def _gf2_matvec_loop(m, xs):
    """Batched GF(2) products: m (T, l, n), xs (T, n) -> (T, l)."""
    trials, ell, n = m.shape
    out = np.zeros((trials, ell), dtype=np.uint8)
    for t in range(trials):
        for row in range(ell):
            acc = 0
            for i in range(n):
                acc ^= m[t, row, i] & xs[t, i]
            out[t, row] = acc
    return out


def _gf2_matvec_numpy(m, xs):
    return (np.einsum("tli,ti->tl", m, xs) % 2).astype(np.uint8)


if USE_NUMBA:
    from numba import njit

    honest_ot_trials = njit(cache=True)(_honest_ot_loop)
    gf2_matvec_batch = njit(cache=True)(_gf2_matvec_loop)
else:
    honest_ot_trials = _honest_ot_numpy
    gf2_matvec_batch = _gf2_matvec_numpy
