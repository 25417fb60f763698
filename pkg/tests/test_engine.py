import itertools

import numpy as np
import pytest

from bqsim import adversary, engine, entropy
from bqsim.bits import bits_to_int, int_to_bits
from bqsim.bounds import SecurityParams
from bqsim.rng import stream_rng

P16 = SecurityParams(n=16, ell=3, m=2, beta=0, eps=2.0 ** -3)


# -- ideal functionalities ---------------------------------------------------

def test_ideal_rot_honest_shape():
    out = engine.run_ideal_rot(4, stream_rng(1, 0))
    (x0, x1), (c, y) = out["A"], out["B"]
    assert x0.size == x1.size == y.size == 4
    assert np.array_equal(y, (x0, x1)[c])


def test_ideal_rot_corrupt_sender_respects_inputs():
    rng = stream_rng(1, 1)
    out = engine.run_ideal_rot(3, rng, corruption="A",
                               inputs=([1, 0, 1], [0, 0, 0]))
    c, y = out["B"]
    assert list(y) == ([1, 0, 1], [0, 0, 0])[c]
    assert "A" not in out


def test_ideal_rot_corrupt_receiver_hides_other_string():
    seen = set()
    for i in range(200):
        out = engine.run_ideal_rot(3, stream_rng(2, i), corruption="B",
                                   inputs=(1, [1, 1, 0]))
        x0, x1 = out["A"]
        assert list(x1) == [1, 1, 0]
        seen.add(bits_to_int(x0))
    assert len(seen) == 8            # the unrelated string is fresh


def test_ideal_rot_validation():
    with pytest.raises(ValueError):
        engine.run_ideal_rot(3, stream_rng(0, 0), inputs=(1, 2))
    with pytest.raises(ValueError):
        engine.run_ideal_rot(3, stream_rng(0, 0), corruption="A",
                             inputs=([1], [0]))
    with pytest.raises(ValueError):
        engine.run_ideal_rot(3, stream_rng(0, 0), corruption="C")


def test_ideal_tor_is_role_reversed():
    out = engine.run_ideal_tor(4, stream_rng(3, 0))
    c, y = out["A"]              # A now holds the receiver side
    x0, x1 = out["B"]
    assert np.array_equal(y, (x0, x1)[c])


def test_ideal_ot():
    assert list(engine.run_ideal_ot(2, [1, 0], [0, 1], 1)) == [0, 1]
    with pytest.raises(ValueError):
        engine.run_ideal_ot(2, [1, 0], [0, 1], 2)


def test_ideal_bc_phase_order():
    f = engine.IdealBC()
    with pytest.raises(ValueError):
        f.open(1)
    f.commit(1)
    with pytest.raises(ValueError):
        f.commit(0)
    assert f.open(1) == 1
    with pytest.raises(ValueError):
        f.open(1)
    g = engine.IdealBC()
    g.commit(0)
    assert g.open(0) is None         # verifier refuses, nothing revealed


# -- BQS-OT ------------------------------------------------------------------

def test_honest_run_correct_and_transcribed():
    for i in range(30):
        res = engine.run_bqs_ot(P16, stream_rng(10, i))
        c, y = res.receiver
        assert np.array_equal(y, (res.s0, res.s1)[c])
    events = [e.event for e in res.transcript.events]
    assert events[0].startswith("send-qubits")
    assert "send-b-r0-r1" in events
    rows = res.transcript.rows(trial=7)
    assert all(set(r) == {"trial", "round", "channel", "dir",
                          "payload_hex", "event"} for r in rows)
    assert rows[0]["trial"] == 7


def test_transcript_rounds_strictly_increasing():
    t = engine.Transcript()
    t.record(1, "Comm", "A->B", None, "x")
    with pytest.raises(ValueError):
        t.record(1, "Comm", "A->B", None, "y")
    with pytest.raises(ValueError):
        t.record(0, "Comm", "A->B", None, "z")


def test_honest_batch_c_and_b_uniform():
    # choice bit and basis bits uniform within 3 sigma over 10^4 trials
    p = SecurityParams(n=16, ell=2)
    trials = 10 ** 4
    _, _, _, c = engine.honest_ot_batch(p, trials, 99)
    sigma = 0.5 / np.sqrt(trials)
    assert abs(c.mean() - 0.5) < 3 * sigma
    bs = np.array([engine.run_bqs_ot(p, stream_rng(99, i)).b
                   for i in range(200)])
    assert abs(bs.mean() - 0.5) < 3 * 0.5 / np.sqrt(bs.size)


def test_memory_bound_event_precedes_basis_reveal():
    strat = adversary.full_measurement_receiver()
    res = engine.run_bqs_ot(P16, stream_rng(11, 0), receiver=strat)
    events = [e.event for e in res.transcript.events]
    bound = next(i for i, e in enumerate(events) if e.startswith("memory-bound"))
    reveal = events.index("send-b-r0-r1")
    assert bound < reveal


def test_full_measurement_receiver_gets_one_string():
    hits_chosen, hits_both = 0, 0
    trials = 60
    for i in range(trials):
        strat = adversary.full_measurement_receiver(i % 2)
        res = engine.run_bqs_ot(P16, stream_rng(12, i), receiver=strat)
        got0 = np.array_equal(res.receiver["s0_hat"], res.s0)
        got1 = np.array_equal(res.receiver["s1_hat"], res.s1)
        hits_chosen += int((got0, got1)[i % 2])
        hits_both += int(got0 and got1)
    assert hits_chosen == trials     # measuring in basis j yields s_j
    assert hits_both < trials        # but not both, except by luck


def test_storing_receiver_knows_stored_positions():
    strat = adversary.storing_receiver(2)
    res = engine.run_bqs_ot(P16, stream_rng(13, 0), receiver=strat)
    known = res.receiver["known"]
    assert known[:2].all()           # stored qubits measured post-reveal
    vals = res.receiver["values"]
    assert (vals[:2] == res.x[:2]).all()


def test_storing_receiver_over_bound_rejected():
    strat = adversary.storing_receiver(5)
    with pytest.raises(engine.MemoryBoundViolation):
        engine.run_bqs_ot(P16, stream_rng(13, 1), receiver=strat)


def test_epr_attack_legacy_vs_refined():
    p = SecurityParams(n=6, ell=2, m=0, beta=0, eps=0.25)
    strat = adversary.epr_teleport_receiver(6)
    for i in range(10):
        res = engine.run_bqs_ot(p, stream_rng(14, i), receiver=strat,
                                model="legacy")
        assert np.array_equal(res.receiver["s0_hat"], res.s0)
        assert np.array_equal(res.receiver["s1_hat"], res.s1)
    with pytest.raises(engine.MemoryBoundViolation):
        engine.run_bqs_ot(p, stream_rng(14, 0), receiver=strat,
                          model="refined")
    with pytest.raises(ValueError):
        engine.run_bqs_ot(p, stream_rng(14, 0), receiver=strat, model="other")


def test_epr_attack_uses_two_classical_bits_per_position():
    p = SecurityParams(n=4, ell=2, m=0, beta=0, eps=0.25)
    strat = adversary.epr_teleport_receiver(4)
    res = engine.run_bqs_ot(p, stream_rng(15, 0), receiver=strat,
                            model="legacy")
    assert res.receiver["teleport_bits"].size == 8


def test_reflection_strategy_refused_in_single_instance():
    with pytest.raises(ValueError):
        engine.run_bqs_ot(P16, stream_rng(16, 0),
                          receiver=adversary.reflection_attacker())


def test_batch_matches_single_runs_statistically():
    s0, s1, y, c = engine.honest_ot_batch(P16, 500, 77)
    sc = np.where(c[:, None] == 0, s0, s1)
    assert (sc == y).all()
    # outputs not constant across trials
    assert len({bits_to_int(row) for row in s0}) > 1


def test_batch_deterministic_per_seed():
    a = engine.honest_ot_batch(P16, 50, 123)
    b = engine.honest_ot_batch(P16, 50, 123)
    cdiff = engine.honest_ot_batch(P16, 50, 124)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)
    assert any(not np.array_equal(x, y) for x, y in zip(a, cdiff))


# -- reductions --------------------------------------------------------------

def test_ot_from_rot_exhaustive():
    ell = 2
    for x0v, x1v, c, cp, ypv in itertools.product(range(4), range(4), (0, 1),
                                                  (0, 1), range(4)):
        x0 = int_to_bits(x0v, ell)
        x1 = int_to_bits(x1v, ell)
        yp = int_to_bits(ypv, ell)
        other = int_to_bits(3 - ypv, ell)
        pair = [None, None]
        pair[cp] = yp
        pair[1 - cp] = other
        rot = {"A": (pair[0], pair[1]), "B": (cp, yp)}
        res = engine.run_ot_from_rot(x0, x1, c, stream_rng(0, 0), rot=rot)
        assert np.array_equal(res.y, (x0, x1)[c])


def test_ot_from_rot_messages_hide_inputs():
    # with fresh ROT randomness the messages m0, m1 are one-time padded
    seen = set()
    for i in range(300):
        res = engine.run_ot_from_rot([1, 1], [0, 0], 0, stream_rng(20, i))
        payload = next(e.payload for e in res.transcript.events
                       if e.event == "send-m0-m1")
        seen.add(bits_to_int(payload))
    assert len(seen) == 16


def test_bc_honest_commit_open():
    for b in (0, 1):
        res = engine.run_bc(b, 1, stream_rng(21, b), 4)
        assert res.verifier_output == b
    res = engine.run_bc(1, 0, stream_rng(21, 2), 4)
    assert res.verifier_output is None


def test_bc_commit_message_hides_bit():
    # exact enumeration over the functionality's choice bit c
    for c in (0, 1):
        msgs = {b: b ^ c for b in (0, 1)}
        assert sorted(msgs.values()) == [0, 1]
    # and empirically the commit message is a fair coin for both b
    for b in (0, 1):
        ms = []
        for i in range(400):
            res = engine.run_bc(b, 1, stream_rng(22, i), 2)
            ms.append(int(res.transcript.events[0].payload[0]))
        assert 0.4 < np.mean(ms) < 0.6


def test_bc_binding_attack_rate():
    hits = 0
    trials = 3000
    for i in range(trials):
        res = engine.run_bc(0, 1, stream_rng(23, i), 3,
                            committer=adversary.binding_attacker())
        assert res.verifier_output in (None, 0, 1)
        hits += int(res.cheat_success)
    rate = hits / trials
    assert abs(rate - 2.0 ** -3) < 4 * np.sqrt(0.125 * 0.875 / trials)


def test_compose_stack():
    p = SecurityParams(n=32, ell=3, m=0, beta=0, eps=2.0 ** -3)
    for b in (0, 1):
        res = engine.compose(p, b, 1, stream_rng(24, b))
        assert res.verifier_output == b
        assert res.error_budget == 6.0 * 2.0 ** -3
        assert res.simulator_memory_qubits == 0
        assert set(res.transcripts) == {"inner", "outer"}


# -- proof-simulators --------------------------------------------------------

def test_sender_simulation_matches_real_distribution():
    strat = adversary.SenderStrategy(kind="fixed",
                                     classical_x=(1, 0, 1, 1),
                                     classical_b=(0, 1, 0, 1), ell=2)
    real_hist, sim_hist = {}, {}
    for i in range(2000):
        (c, y), _ = engine.run_with_corrupt_sender(strat, stream_rng(25, i))
        key = (c, bits_to_int(y))
        real_hist[key] = real_hist.get(key, 0) + 1
        sim = engine.simulate_sender(strat, stream_rng(26, i))
        ic, iy = sim.receiver_out
        key = (ic, bits_to_int(iy))
        sim_hist[key] = sim_hist.get(key, 0) + 1
    keys = set(real_hist) | set(sim_hist)
    tv = 0.5 * sum(abs(real_hist.get(k, 0) - sim_hist.get(k, 0)) / 2000
                   for k in keys)
    assert tv < 0.06


def test_sender_simulation_extraction_is_exact():
    # for a classically-described sender the extracted strings are the
    # exact hashes the honest receiver could ever compute
    strat = adversary.SenderStrategy(kind="fixed",
                                     classical_x=(1, 1, 0, 0),
                                     classical_b=(0, 0, 1, 1),
                                     ell=2)
    sim = engine.simulate_sender(strat, stream_rng(27, 0))
    s0, s1 = sim.extracted
    assert s0.size == s1.size == 2


def test_enumerated_receiver_distribution_normalizes():
    p = SecurityParams(n=3, ell=1, m=0, beta=0, eps=0.25)
    strat = adversary.full_measurement_receiver("random")
    d, ks = engine.enumerate_receiver_distribution(strat, p)
    assert abs(d.table.sum() - 1.0) < 1e-9
    assert d.names == entropy.SPLIT_VARS


def test_enumeration_budget_enforced():
    p = SecurityParams(n=5, ell=1, m=0, beta=0, eps=0.25)
    strat = adversary.full_measurement_receiver("random")
    with pytest.raises(ValueError):
        engine.enumerate_receiver_distribution(strat, p, max_cells=1000)
    with pytest.raises(ValueError):
        engine.enumerate_receiver_distribution(adversary.storing_receiver(1), p)


def test_receiver_simulation_choice_bit_deterministic():
    p = SecurityParams(n=3, ell=1, m=0, beta=0, eps=0.25)
    strat = adversary.full_measurement_receiver(0)
    enum = engine.enumerate_receiver_distribution(strat, p)
    res1 = engine.simulate_receiver(strat, p, stream_rng(28, 0),
                                    enumeration=enum)
    res2 = engine.simulate_receiver(strat, p, stream_rng(28, 0),
                                    enumeration=enum)
    assert res1.c == res2.c
    assert np.array_equal(res1.y, res2.y)
    assert res1.alpha > 0.0


def test_receiver_simulation_feeds_functionality():
    p = SecurityParams(n=4, ell=2, m=0, beta=0, eps=0.25)
    strat = adversary.full_measurement_receiver("random")
    res = engine.simulate_receiver(strat, p, stream_rng(29, 1))
    x0, x1 = res.sender_out
    assert np.array_equal((x0, x1)[res.c], res.y)


# -- OTfromROT corruption checks ---------------------------------------------

def test_ot_sender_attack_real_equals_simulated():
    rng = stream_rng(30, 0)
    for trial in range(20):
        ell = 2
        xp0 = rng.integers(0, 2, ell, np.uint8)
        xp1 = rng.integers(0, 2, ell, np.uint8)
        table = {d: (rng.integers(0, 2, ell, np.uint8),
                     rng.integers(0, 2, ell, np.uint8)) for d in (0, 1)}
        for c in (0, 1):
            real, sim = engine.ot_sender_attack_distributions(
                xp0, xp1, lambda d: table[d], c, ell)
            assert real == sim, trial


def test_ot_receiver_attack_real_equals_simulated():
    rng = stream_rng(31, 0)
    for trial in range(20):
        ell = 2
        x0 = rng.integers(0, 2, ell, np.uint8)
        x1 = rng.integers(0, 2, ell, np.uint8)
        yp = rng.integers(0, 2, ell, np.uint8)
        cp = int(rng.integers(2))
        d = int(rng.integers(2))
        out_fn = lambda m0, m1: np.concatenate([m0, m1])
        real, sim = engine.ot_receiver_attack_distributions(
            x0, x1, cp, yp, d, out_fn, ell)
        assert real == sim, trial


def test_reflection_pair_always_hits():
    p = SecurityParams(n=8, ell=2, m=0, beta=0, eps=0.25)
    for i in range(50):
        res = engine.run_reflection_pair(p, stream_rng(32, i))
        assert res.matches_x0 or res.matches_x1
        assert res.adversary_memory_qubits == 0
