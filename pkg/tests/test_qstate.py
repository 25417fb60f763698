import numpy as np
import pytest

from bqsim import qstate
from bqsim.bits import as_bits
from bqsim.rng import stream_rng

ATOL = 1e-9


def rng_for(test_id, trial=0):
    return stream_rng(hash(test_id) % 2 ** 31, trial)


def test_hadamard_one_sign_convention():
    # |1>_x must be (|0> - |1>)/sqrt(2)
    st = qstate.encode_bb84([1], [1])
    assert np.allclose(st.vec, [1 / np.sqrt(2), -1 / np.sqrt(2)], atol=ATOL)


def test_encode_matches_gate_construction():
    rng = rng_for("encode", 0)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        x = rng.integers(0, 2, n, np.uint8)
        b = rng.integers(0, 2, n, np.uint8)
        st = qstate.encode_bb84(x, b)
        # reference: start from |x> and apply H where b_i = 1
        ref = qstate.encode_bb84(x, np.zeros(n, np.uint8))
        for i in np.flatnonzero(b):
            ref = qstate.apply_unitary(ref, f"q{i}", qstate.H)
        assert np.allclose(st.vec, ref.vec, atol=ATOL)


def test_matched_basis_measurement_deterministic():
    rng = rng_for("matched")
    for _ in range(30):
        n = int(rng.integers(1, 5))
        x = rng.integers(0, 2, n, np.uint8)
        b = rng.integers(0, 2, n, np.uint8)
        st = qstate.encode_bb84(x, b)
        out, _ = qstate.measure(st, list(st.labels), b, rng)
        assert np.array_equal(out, x)


def test_mismatched_basis_is_a_fair_coin():
    rng = rng_for("mismatch")
    trials = 4000
    ones = 0
    for t in range(trials):
        st = qstate.encode_bb84([0], [0])
        out, _ = qstate.measure(st, "q0", [1], rng)
        ones += int(out[0])
    assert abs(ones / trials - 0.5) < 0.03


def test_fast_path_agrees_with_dense_statistics():
    # same marginal statistics as the full simulation, for any n
    rng = rng_for("fastpath")
    n, trials = 6, 3000
    x = rng.integers(0, 2, n, np.uint8)
    b = rng.integers(0, 2, n, np.uint8)
    meas = rng.integers(0, 2, n, np.uint8)
    fast = np.array([qstate.measure_bb84_product(x, b, meas, rng)
                     for _ in range(trials)])
    match = b == meas
    assert (fast[:, match] == x[match]).all()
    if (~match).any():
        freq = fast[:, ~match].mean()
        assert abs(freq - 0.5) < 0.05


def test_measure_is_projective():
    rng = rng_for("projective")
    st = qstate.bell_pair("a", "b")
    out1, post = qstate.measure(st, "a", [0], rng)
    out2, _ = qstate.measure(post, "b", [0], rng)
    assert out1[0] == out2[0]        # perfect correlation in +


def test_partial_trace_of_bell_pair_is_maximally_mixed():
    red = qstate.partial_trace(qstate.bell_pair("a", "b"), "b")
    assert np.allclose(red.rho, np.eye(2) / 2, atol=ATOL)


def test_trace_distance_extremes():
    z0 = qstate.QuantumState(("q",), vec=[1, 0])
    z1 = qstate.QuantumState(("q",), vec=[0, 1])
    assert abs(qstate.trace_distance(z0, z1) - 1.0) < ATOL
    assert qstate.trace_distance(z0, z0) < ATOL


def test_apply_unitary_rejects_nonunitary():
    st = qstate.QuantumState(("q",), vec=[1, 0])
    with pytest.raises(ValueError):
        qstate.apply_unitary(st, "q", np.array([[1, 0], [0, 2]]))


def test_register_cap():
    with pytest.raises(ValueError):
        qstate.QuantumState(tuple(f"q{i}" for i in range(qstate.MAX_QUBITS + 1)),
                            vec=np.eye(1, 2 ** (qstate.MAX_QUBITS + 1))[0])


def test_state_validation():
    with pytest.raises(ValueError):
        qstate.QuantumState(("q",), vec=[1, 1])       # not normalized
    with pytest.raises(ValueError):
        qstate.QuantumState(("q",), rho=[[0.5, 0.5j], [0.5j, 0.5]])
    with pytest.raises(ValueError):
        qstate.QuantumState(("q",), rho=[[1.5, 0], [0, -0.5]])


def test_teleport_moves_the_payload():
    rng = rng_for("teleport")
    for trial in range(20):
        x = int(rng.integers(2))
        b = int(rng.integers(2))
        st = qstate.encode_bb84([x], [b], labels=("p",))
        st = st.tensor(qstate.bell_pair("e", "f"))
        mbits, post = qstate.teleport(st, "p", ("e", "f"), rng)
        assert post.labels == ("f",)
        out, _ = qstate.measure(post, "f", [b], rng)
        assert out[0] == x
        assert mbits.shape == (2,)


def test_teleport_rejects_broken_pair():
    rng = rng_for("teleport-bad")
    st = qstate.encode_bb84([0, 0, 0], [0, 0, 0], labels=("p", "e", "f"))
    with pytest.raises(ValueError):
        qstate.teleport(st, "p", ("e", "f"), rng)


def test_memory_bound_measures_everything_else():
    rng = rng_for("bound")
    st = qstate.encode_bb84([1, 0, 1], [0, 0, 0])
    out = qstate.enforce_memory_bound(st, ["q0"], 1, rng)
    assert out.classical_bits.size == 2
    assert out.retained.num_qubits == 1
    with pytest.raises(ValueError):
        qstate.enforce_memory_bound(st, ["q0", "q1"], 1, rng)


def test_mixed_state_unitary_and_measurement():
    rng = rng_for("mixed")
    mixed = qstate.QuantumState(("q",), rho=np.eye(2) / 2)
    rotated = qstate.apply_unitary(mixed, "q", qstate.H)
    assert np.allclose(rotated.rho, np.eye(2) / 2, atol=ATOL)
    out, post = qstate.measure(mixed, "q", [0], rng)
    assert int(out[0]) in (0, 1)
    assert abs(np.trace(post.rho).real - 1.0) < ATOL
