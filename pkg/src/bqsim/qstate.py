"""Exact simulation of small labeled quantum registers.

States are dense: either a complex amplitude vector (pure) or a density
matrix (mixed) over a tuple of named qubits.  Qubit 0 is the leftmost
tensor factor.  Everything is a value: operations return new states and
never mutate their inputs, so independent trials can safely run in
parallel, each with its own RNG stream.

Honest protocol participants only ever handle product states of single
qubits; :func:`measure_bb84_product` is the classical fast path for that
case, which lets the protocol string length exceed ``MAX_QUBITS`` as long
as any jointly-stored register stays small.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import as_bits, random_bits

MAX_QUBITS = 14
ATOL = 1e-9

# single-qubit gates
I2 = np.eye(2, dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
CNOT = np.array([[1, 0, 0, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1],
                 [0, 0, 1, 0]], dtype=complex)

# |0>_b, |1>_b for b in {+, x}
_BASIS_KETS = {
    0: (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
    1: (np.array([1, 1], dtype=complex) / np.sqrt(2),
        np.array([1, -1], dtype=complex) / np.sqrt(2)),
}


class QuantumState:
    """Pure or mixed state over an ordered tuple of named qubits."""

    def __init__(self, labels, vec=None, rho=None, max_qubits=None):
        self.labels = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate qubit labels")
        cap = MAX_QUBITS if max_qubits is None else max_qubits
        if len(self.labels) > cap:
            raise ValueError(
                f"register of {len(self.labels)} qubits exceeds cap {cap}")
        dim = 2 ** len(self.labels)
        if (vec is None) == (rho is None):
            raise ValueError("exactly one of vec or rho must be given")
        if vec is not None:
            vec = np.asarray(vec, dtype=complex).reshape(-1)
            if vec.size != dim:
                raise ValueError("amplitude vector has wrong dimension")
            if abs(np.linalg.norm(vec) - 1.0) > ATOL:
                raise ValueError("state vector is not normalized")
            self.vec = vec
            self.rho = None
        else:
            rho = np.asarray(rho, dtype=complex).reshape(dim, dim)
            if np.max(np.abs(rho - rho.conj().T)) > ATOL:
                raise ValueError("density matrix is not Hermitian")
            if abs(np.trace(rho).real - 1.0) > ATOL:
                raise ValueError("density matrix trace is not 1")
            if np.linalg.eigvalsh(rho).min() < -ATOL:
                raise ValueError("density matrix has negative eigenvalues")
            self.vec = None
            self.rho = rho

    # -- basic introspection -------------------------------------------------

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    @property
    def is_pure(self) -> bool:
        return self.vec is not None

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"unknown register {label!r}") from None

    def density(self) -> np.ndarray:
        """Dense density matrix regardless of representation."""
        if self.rho is not None:
            return self.rho
        return np.outer(self.vec, self.vec.conj())

    def copy(self) -> "QuantumState":
        if self.is_pure:
            return QuantumState(self.labels, vec=self.vec.copy())
        return QuantumState(self.labels, rho=self.rho.copy())

    @staticmethod
    def zero(labels) -> "QuantumState":
        vec = np.zeros(2 ** len(tuple(labels)), dtype=complex)
        vec[0] = 1.0
        return QuantumState(labels, vec=vec)

    def tensor(self, other: "QuantumState") -> "QuantumState":
        labels = self.labels + other.labels
        if self.is_pure and other.is_pure:
            return QuantumState(labels, vec=np.kron(self.vec, other.vec))
        return QuantumState(labels, rho=np.kron(self.density(), other.density()))


@dataclass
class MemoryBoundOutcome:
    """Result of forcing a register down to at most m retained qubits."""
    classical_bits: np.ndarray
    measured_labels: tuple
    retained: QuantumState | None


def bell_pair(label_a: str, label_b: str) -> QuantumState:
    """The EPR pair (|00> + |11>)/sqrt(2)."""
    vec = np.zeros(4, dtype=complex)
    vec[0] = vec[3] = 1 / np.sqrt(2)
    return QuantumState((label_a, label_b), vec=vec)


def encode_bb84(x, b, labels=None, max_qubits=None) -> QuantumState:
    """Product state |x>_b = |x_1>_{b_1} ... |x_n>_{b_n}."""
    x = as_bits(x)
    b = as_bits(b)
    if x.size != b.size:
        raise ValueError("data and basis strings differ in length")
    if x.size == 0:
        raise ValueError("empty string")
    vec = np.ones(1, dtype=complex)
    for xi, bi in zip(x, b):
        vec = np.kron(vec, _BASIS_KETS[int(bi)][int(xi)])
    if labels is None:
        labels = tuple(f"q{i}" for i in range(x.size))
    return QuantumState(labels, vec=vec, max_qubits=max_qubits)


def measure_bb84_product(x, b, meas_basis, rng) -> np.ndarray:
    """Fast path: measure |x>_b qubit-wise in the bases ``meas_basis``.

    Matching-basis positions return x_i; mismatched positions return a
    fair coin.  Exact for product BB84 states, works for any n.
    """
    x = as_bits(x)
    b = as_bits(b)
    meas = as_bits(meas_basis)
    if not (x.size == b.size == meas.size):
        raise ValueError("length mismatch")
    coins = random_bits(rng, x.size)
    return np.where(b == meas, x, coins).astype(np.uint8)


def _as_tensor(state: QuantumState):
    k = state.num_qubits
    if state.is_pure:
        return state.vec.reshape((2,) * k), True
    return state.density().reshape((2,) * (2 * k)), False


def apply_unitary(state: QuantumState, targets, U) -> QuantumState:
    """Apply a unitary to the listed target qubits."""
    targets = [targets] if isinstance(targets, str) else list(targets)
    axes = [state.axis(t) for t in targets]
    t = len(axes)
    U = np.asarray(U, dtype=complex)
    if U.shape != (2 ** t, 2 ** t):
        raise ValueError("unitary dimension does not match target count")
    if np.max(np.abs(U @ U.conj().T - np.eye(2 ** t))) > ATOL:
        raise ValueError("matrix is not unitary")
    k = state.num_qubits
    Ut = U.reshape((2,) * (2 * t))
    tensor, pure = _as_tensor(state)
    if pure:
        out = np.tensordot(Ut, tensor, axes=(range(t, 2 * t), axes))
        out = np.moveaxis(out, range(t), axes)
        return QuantumState(state.labels, vec=out.reshape(-1))
    # rho -> U rho U^dagger: rows are axes, columns are axes + k
    out = np.tensordot(Ut, tensor, axes=(range(t, 2 * t), axes))
    out = np.moveaxis(out, range(t), axes)
    col_axes = [a + k for a in axes]
    out = np.tensordot(out, Ut.conj(), axes=(col_axes, range(t, 2 * t)))
    out = np.moveaxis(out, range(2 * k - t, 2 * k), col_axes)
    return QuantumState(state.labels, rho=out.reshape(2 ** k, 2 ** k))


def measure(state: QuantumState, targets, b, rng):
    """Measure target qubits in the given bases (0 = +, 1 = x).

    Returns the sampled outcome bits and the normalized post-measurement
    state (measured qubits collapse to the corresponding basis states).
    """
    targets = [targets] if isinstance(targets, str) else list(targets)
    b = as_bits(b)
    if b.size != len(targets):
        raise ValueError("need one basis bit per target")
    outcomes = np.zeros(len(targets), dtype=np.uint8)
    current = state
    for i, (t, bi) in enumerate(zip(targets, b)):
        if bi:
            current = apply_unitary(current, t, H)
        current, out = _measure_computational(current, t, rng)
        if bi:
            current = apply_unitary(current, t, H)
        outcomes[i] = out
    return outcomes, current


def _measure_computational(state: QuantumState, target: str, rng):
    axis = state.axis(target)
    k = state.num_qubits
    if state.is_pure:
        tensor = state.vec.reshape((2,) * k)
        sl0 = [slice(None)] * k
        sl0[axis] = 0
        p0 = float(np.sum(np.abs(tensor[tuple(sl0)]) ** 2))
        out = 0 if rng.random() < p0 else 1
        proj = tensor.copy()
        sl = [slice(None)] * k
        sl[axis] = 1 - out
        proj[tuple(sl)] = 0
        norm = np.linalg.norm(proj)
        if norm < 1e-15:
            raise ValueError("projection onto zero-probability outcome")
        return QuantumState(state.labels, vec=(proj / norm).reshape(-1)), out
    tensor = state.rho.reshape((2,) * (2 * k))
    sl0 = [slice(None)] * (2 * k)
    sl0[axis] = 0
    sl0[axis + k] = 0
    # probability of 0 = trace of the projected block
    idx = [slice(None)] * (2 * k)
    idx[axis] = 0
    idx[axis + k] = 0
    block0 = tensor[tuple(idx)].reshape(2 ** (k - 1), 2 ** (k - 1))
    p0 = float(np.trace(block0).real)
    out = 0 if rng.random() < p0 else 1
    proj = np.zeros_like(tensor)
    idx = [slice(None)] * (2 * k)
    idx[axis] = out
    idx[axis + k] = out
    proj[tuple(idx)] = tensor[tuple(idx)]
    rho = proj.reshape(2 ** k, 2 ** k)
    tr = float(np.trace(rho).real)
    if tr < 1e-15:
        raise ValueError("projection onto zero-probability outcome")
    return QuantumState(state.labels, rho=rho / tr), out


def partial_trace(state: QuantumState, discard) -> QuantumState:
    """Reduced density matrix after tracing out the listed qubits."""
    discard = [discard] if isinstance(discard, str) else list(discard)
    axes = sorted(state.axis(d) for d in discard)
    k = state.num_qubits
    if len(axes) >= k:
        raise ValueError("cannot trace out every register")
    keep_labels = tuple(l for l in state.labels if l not in discard)
    tensor = state.density().reshape((2,) * (2 * k))
    for a in reversed(axes):
        tensor = np.trace(tensor, axis1=a, axis2=a + tensor.ndim // 2)
    d = 2 ** len(keep_labels)
    return QuantumState(keep_labels, rho=tensor.reshape(d, d))


def trace_distance(a: QuantumState, b: QuantumState) -> float:
    """D(rho, sigma) = (1/2) Tr |rho - sigma|."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("states have different dimensions")
    diff = a.density() - b.density()
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def teleport(state: QuantumState, payload: str, epr: tuple, rng):
    """Teleport ``payload`` through the EPR pair ``epr = (near, far)``.

    The state must contain the payload qubit and both pair halves; any
    further registers ride along untouched.  The reduced state on the
    pair is checked to be the maximally entangled pair (|00>+|11>)/sqrt(2).
    Returns the two classical correction bits and the post state, in
    which the far half now carries the payload (correction applied) and
    the two measured qubits are traced out.
    """
    near, far = epr
    pair = partial_trace(state, [l for l in state.labels
                                 if l not in (near, far)]) \
        if state.num_qubits > 2 else state
    phi = bell_pair(near, far)
    # order of (near, far) inside `pair` may differ from the canonical pair
    perm_pair = _reorder(pair, (near, far))
    fid = float(np.real(phi.vec.conj() @ perm_pair.density() @ phi.vec))
    if abs(fid - 1.0) > 1e-6:
        raise ValueError("epr registers are not a maximally entangled pair")
    st = apply_unitary(state, [payload, near], CNOT)
    st = apply_unitary(st, payload, H)
    m, st = measure(st, [payload, near], [0, 0], rng)
    if m[1]:
        st = apply_unitary(st, far, X)
    if m[0]:
        st = apply_unitary(st, far, Z)
    st = partial_trace(st, [payload, near])
    return m, st


def _reorder(state: QuantumState, new_labels) -> QuantumState:
    new_labels = tuple(new_labels)
    if new_labels == state.labels:
        return state
    perm = [state.axis(l) for l in new_labels]
    k = state.num_qubits
    if state.is_pure:
        tensor = state.vec.reshape((2,) * k).transpose(perm)
        return QuantumState(new_labels, vec=tensor.reshape(-1))
    tensor = state.rho.reshape((2,) * (2 * k))
    tensor = tensor.transpose(perm + [p + k for p in perm])
    return QuantumState(new_labels, rho=tensor.reshape(2 ** k, 2 ** k))


def enforce_memory_bound(state: QuantumState, keep, m: int,
                         rng) -> MemoryBoundOutcome:
    """Measure everything outside ``keep`` in the computational basis.

    ``keep`` must fit in the declared bound of m qubits; the measured
    outcomes are returned as classical bits alongside the retained state.
    """
    keep = [keep] if isinstance(keep, str) else list(keep)
    if len(keep) > m:
        raise ValueError(f"cannot keep {len(keep)} qubits under bound m={m}")
    for l in keep:
        state.axis(l)
    to_measure = [l for l in state.labels if l not in keep]
    if not to_measure:
        return MemoryBoundOutcome(np.zeros(0, dtype=np.uint8), (), state)
    outcome, post = measure(state, to_measure,
                            np.zeros(len(to_measure), dtype=np.uint8), rng)
    retained = partial_trace(post, to_measure) if keep else None
    return MemoryBoundOutcome(outcome, tuple(to_measure), retained)
