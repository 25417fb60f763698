"""Protocol engine: channels, ideal functionalities, the BQS-OT state
machines, the classical reductions, and the proof-simulators.

One protocol execution is single-threaded (the model has a global clock
dividing time into rounds); independent trials run in parallel with
isolated RNG streams and transcripts.  Transcript payloads are bit
exact; quantum events log only basis/outcome metadata, never
amplitudes, since a distinguisher only sees what an environment could.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import entropy, hashpa, qstate
from .adversary import CommitterStrategy, ReceiverStrategy, SenderStrategy
from .bits import bits_to_hex, bits_to_int, int_to_bits, random_bits, \
    substring_by_basis
from .bounds import SecurityParams, composed_bc_error
from ._kernels import honest_ot_trials
from .rng import stream_rng


class MemoryBoundViolation(RuntimeError):
    """An adversary held more qubits than declared at an enforcement point."""


# ---------------------------------------------------------------------------
# transcripts

@dataclass
class TranscriptEvent:
    round: int
    channel: str            # "Comm" or "Q-Comm"
    direction: str          # "A->B", "B->A", or "local"
    payload: np.ndarray | None
    event: str


@dataclass
class Transcript:
    events: list = field(default_factory=list)
    outputs: dict = field(default_factory=dict)

    def record(self, round_, channel, direction, payload, event):
        if self.events and round_ <= self.events[-1].round:
            raise ValueError("rounds must be strictly increasing")
        self.events.append(TranscriptEvent(round_, channel, direction,
                                           payload, event))

    def memory_bound(self, round_, measured_bits, label):
        self.record(round_, "Comm", "local", measured_bits,
                    f"memory-bound:{label}")

    def rows(self, trial=0):
        """JSONL-ready dicts: {trial, round, channel, dir, payload_hex, event}."""
        out = []
        for ev in self.events:
            payload_hex = "" if ev.payload is None else bits_to_hex(ev.payload)
            out.append({"trial": trial, "round": ev.round, "channel": ev.channel,
                        "dir": ev.direction, "payload_hex": payload_hex,
                        "event": ev.event})
        return out


# ---------------------------------------------------------------------------
# ideal functionalities

def run_ideal_rot(ell, rng, corruption="none", inputs=None):
    """The randomized-OT functionality, per corruption variant."""
    if corruption == "none":
        if inputs is not None:
            raise ValueError("honest ROT takes no inputs")
        x0 = random_bits(rng, ell)
        x1 = random_bits(rng, ell)
        c = int(rng.integers(2))
        return {"A": (x0, x1), "B": (c, (x0, x1)[c].copy())}
    if corruption == "A":
        x0, x1 = inputs
        if len(x0) != ell or len(x1) != ell:
            raise ValueError("corrupt-sender strings must have length ell")
        c = int(rng.integers(2))
        return {"B": (c, np.asarray((x0, x1)[c], dtype=np.uint8).copy())}
    if corruption == "B":
        c, y = inputs
        if c not in (0, 1) or len(y) != ell:
            raise ValueError("corrupt-receiver input must be (bit, ell-string)")
        other = random_bits(rng, ell)
        pair = [None, None]
        pair[c] = np.asarray(y, dtype=np.uint8).copy()
        pair[1 - c] = other
        return {"A": (pair[0], pair[1])}
    raise ValueError(f"unknown corruption {corruption!r}")


def run_ideal_tor(ell, rng, corruption="none", inputs=None):
    """Role-reversed ROT: B is the sender, A the receiver."""
    swap = {"none": "none", "A": "B", "B": "A"}[corruption]
    out = run_ideal_rot(ell, rng, swap, inputs)
    return {{"A": "B", "B": "A"}[k]: v for k, v in out.items()}


def run_ideal_ot(ell, x0, x1, c):
    """Plain OT: B learns x_c and nothing else."""
    if c not in (0, 1):
        raise ValueError("choice bit must be 0 or 1")
    x0 = np.asarray(x0, dtype=np.uint8)
    x1 = np.asarray(x1, dtype=np.uint8)
    if x0.size != ell or x1.size != ell:
        raise ValueError("strings must have length ell")
    return (x0, x1)[c].copy()


class IdealBC:
    """Two-phase bit-commitment functionality, commit strictly first."""

    def __init__(self):
        self.committed = None
        self.opened = False

    def commit(self, b):
        if self.committed is not None:
            raise ValueError("already committed")
        if b not in (0, 1):
            raise ValueError("committed value must be a bit")
        self.committed = b
        return None  # verifier sees only "committed"

    def open(self, a):
        if self.committed is None:
            raise ValueError("open before commit")
        if self.opened:
            raise ValueError("already opened")
        self.opened = True
        return self.committed if a == 1 else None


# ---------------------------------------------------------------------------
# BQS-OT

@dataclass
class BqsOtResult:
    s0: np.ndarray
    s1: np.ndarray
    receiver: tuple          # honest: (c, y); adversary: its classical output
    transcript: Transcript
    x: np.ndarray
    b: np.ndarray
    r0: np.ndarray
    r1: np.ndarray


def _pad_sub(x, b, which, n):
    return substring_by_basis(x, b, which, pad_to=n)


def run_bqs_ot(params: SecurityParams, rng, receiver=None, model="refined",
               enforce_every_round=False):
    """One BQS-OT execution; honest receiver unless a strategy is given.

    Memory bounds are enforced before the receiver's step 1 and between
    its steps 2 and 3 (the two points the proof needs);
    enforce_every_round additionally applies the bound after each round.
    """
    n, ell = params.n, params.ell
    t = Transcript()
    if receiver is not None:
        _admit_receiver(receiver, params, model)

    # sender steps 1-3 (the listing numbers its output step 5; there is
    # no step 4)
    x = random_bits(rng, n)
    b = random_bits(rng, n)
    t.record(1, "Q-Comm", "A->B", None, f"send-qubits:n={n}")
    r0 = hashpa.sample_hash_seed(n, ell, rng)
    r1 = hashpa.sample_hash_seed(n, ell, rng)
    comm_payload = np.concatenate([b, r0.matrix.reshape(-1),
                                   r1.matrix.reshape(-1)])
    s0 = hashpa.hash_bits(r0, _pad_sub(x, b, 0, n))
    s1 = hashpa.hash_bits(r1, _pad_sub(x, b, 1, n))

    if receiver is None:
        c = int(rng.integers(2))
        xprime = qstate.measure_bb84_product(x, b, np.full(n, c, np.uint8), rng)
        t.record(2, "Comm", "A->B", comm_payload, "send-b-r0-r1")
        y = hashpa.hash_bits((r0, r1)[c], _pad_sub(xprime, b, c, n))
        receiver_out = (c, y)
    else:
        phase1 = _receiver_phase1(receiver, x, b, params, t, rng,
                                  enforce_every_round)
        t.record(3, "Comm", "A->B", comm_payload, "send-b-r0-r1")
        receiver_out = _receiver_phase2(receiver, phase1, b, r0, r1, t, rng)

    t.outputs = {"A": (s0, s1), "B": receiver_out}
    return BqsOtResult(s0, s1, receiver_out, t, x, b, r0.matrix, r1.matrix)


def _admit_receiver(strategy: ReceiverStrategy, params, model):
    """First enforcement point: auxiliary input and declared memory."""
    if model not in ("legacy", "refined"):
        raise ValueError(f"unknown model variant {model!r}")
    if model == "refined" and strategy.aux_qubits > params.beta:
        raise MemoryBoundViolation(
            f"{strategy.name}: auxiliary input of {strategy.aux_qubits} qubits "
            f"exceeds the enforced bound beta={params.beta}")
    if strategy.kind == "store_first" and strategy.m > params.m:
        raise MemoryBoundViolation(
            f"{strategy.name}: declares {strategy.m} qubits, bound is m={params.m}")
    if strategy.kind == "reflect":
        raise ValueError("reflection strategy only runs in the paired scenario")


@dataclass
class _Phase1:
    known: np.ndarray        # mask of positions whose x_i is known for sure
    values: np.ndarray       # known values (junk elsewhere)
    k_out: dict              # classical output after the memory bound
    stored: list             # [(index, QuantumState)] surviving the bound


def _receiver_phase1(strategy, x, b, params, t, rng, enforce_every_round):
    n = x.size
    if strategy.kind == "measure_all":
        if strategy.basis_rule == "fixed":
            bases = np.full(n, strategy.fixed_basis, np.uint8)
        else:
            bases = random_bits(rng, n)
        outcomes = qstate.measure_bb84_product(x, b, bases, rng)
        t.memory_bound(2, outcomes, "after-step-2:q=0")
        known = bases == b
        return _Phase1(known, outcomes,
                       {"bases": bases, "outcomes": outcomes}, [])
    if strategy.kind == "store_first":
        m_store = min(strategy.m, n)
        stored = [(i, qstate.encode_bb84([x[i]], [b[i]], labels=(f"q{i}",)))
                  for i in range(m_store)]
        if len(stored) > params.m:
            raise MemoryBoundViolation("stored register exceeds m")
        bases = random_bits(rng, n)
        rest = np.arange(m_store, n)
        outcomes = np.zeros(n, dtype=np.uint8)
        outcomes[rest] = qstate.measure_bb84_product(
            x[rest], b[rest], bases[rest], rng)
        t.memory_bound(2, outcomes[rest], f"after-step-2:q={len(stored)}")
        known = np.zeros(n, dtype=bool)
        known[rest] = bases[rest] == b[rest]
        return _Phase1(known, outcomes,
                       {"bases": bases[rest], "outcomes": outcomes[rest],
                        "stored": m_store}, stored)
    if strategy.kind == "epr_teleport":
        # two classical teleport bits per position end up in storage
        tele_bits = np.zeros(2 * n, dtype=np.uint8)
        remote = []
        for i in range(n):
            st = qstate.encode_bb84([x[i]], [b[i]], labels=(f"p{i}",))
            st = st.tensor(qstate.bell_pair(f"e{i}", f"f{i}"))
            mbits, post = qstate.teleport(st, f"p{i}", (f"e{i}", f"f{i}"), rng)
            tele_bits[2 * i:2 * i + 2] = mbits
            remote.append(post)     # lives in the environment, not counted
        t.memory_bound(2, tele_bits, "after-step-2:q=0")
        known = np.zeros(n, dtype=bool)
        return _Phase1(known, np.zeros(n, dtype=np.uint8),
                       {"teleport_bits": tele_bits, "remote": remote}, [])
    raise ValueError(f"unknown receiver strategy {strategy.kind!r}")


def _receiver_phase2(strategy, phase1, b, r0, r1, t, rng):
    """After (b, r0, r1) arrives: finish measurements, guess both strings."""
    n = b.size
    known = phase1.known.copy()
    values = phase1.values.copy()
    for i, st in phase1.stored:
        out, _ = qstate.measure(st, st.labels[0], [b[i]], rng)
        values[i] = out[0]
        known[i] = True
    if strategy.kind == "epr_teleport":
        for i, st in enumerate(phase1.k_out["remote"]):
            out, _ = qstate.measure(st, st.labels[0], [b[i]], rng)
            values[i] = out[0]
            known[i] = True
    guess = np.where(known, values, random_bits(rng, n))
    s_hat = []
    for j, r in ((0, r0), (1, r1)):
        s_hat.append(hashpa.hash_bits(r, _pad_sub(guess, b, j, n)))
    out = {"s0_hat": s_hat[0], "s1_hat": s_hat[1], "known": known,
           "values": np.where(known, values, 0).astype(np.uint8)}
    out.update({k: v for k, v in phase1.k_out.items() if k != "remote"})
    return out


def honest_ot_batch(params: SecurityParams, trials: int, seed: int,
                    stream_base: int = 0):
    """Kernel-backed batch of honest runs; returns (s0, s1, y, c) arrays."""
    n, ell = params.n, params.ell
    rng = stream_rng(seed, stream_base)
    x = rng.integers(0, 2, (trials, n), dtype=np.uint8)
    b = rng.integers(0, 2, (trials, n), dtype=np.uint8)
    c = rng.integers(0, 2, trials, dtype=np.uint8)
    coins = rng.integers(0, 2, (trials, n), dtype=np.uint8)
    r0 = rng.integers(0, 2, (trials, ell, n), dtype=np.uint8)
    r1 = rng.integers(0, 2, (trials, ell, n), dtype=np.uint8)
    s0, s1, y = honest_ot_trials(x, b, c, coins, r0, r1)
    return s0, s1, y, c


# ---------------------------------------------------------------------------
# classical reductions

@dataclass
class OtFromRotResult:
    y: np.ndarray
    transcript: Transcript


def run_ot_from_rot(x0, x1, c, rng, rot=None) -> OtFromRotResult:
    """OT on top of (by default ideal) ROT plus one classical message each way."""
    x0 = np.asarray(x0, dtype=np.uint8)
    x1 = np.asarray(x1, dtype=np.uint8)
    if x0.size != x1.size:
        raise ValueError("input strings must have equal length")
    ell = x0.size
    if rot is None:
        rot = run_ideal_rot(ell, rng)
    (xp0, xp1), (cp, yp) = rot["A"], rot["B"]
    t = Transcript()
    d = cp ^ c
    t.record(1, "Comm", "B->A", np.array([d], dtype=np.uint8), "send-d")
    m0 = x0 ^ (xp0, xp1)[d]
    m1 = x1 ^ (xp0, xp1)[1 - d]
    t.record(2, "Comm", "A->B", np.concatenate([m0, m1]), "send-m0-m1")
    y = (m0, m1)[c] ^ yp
    t.outputs = {"B": y}
    return OtFromRotResult(y, t)


@dataclass
class BcResult:
    verifier_output: int | None
    transcript: Transcript
    cheat_success: bool | None = None


def run_bc(b, a, rng, ell, committer: CommitterStrategy | None = None,
           tor=None) -> BcResult:
    """Commit-then-open over role-reversed ROT plus a classical channel."""
    if b not in (0, 1) or a not in (0, 1):
        raise ValueError("b and a must be bits")
    if tor is None:
        tor = run_ideal_tor(ell, rng)
    c, y = tor["A"]
    x0, x1 = tor["B"]
    t = Transcript()
    m = b ^ c
    t.record(1, "Comm", "A->B", np.array([m], dtype=np.uint8), "commit")
    if committer is None:
        if a == 1:
            t.record(2, "Comm", "A->B",
                     np.concatenate([np.array([b], np.uint8), y]), "open")
            ok = np.array_equal((x0, x1)[b ^ m], y)
            out = b if ok else None
        else:
            t.record(2, "Comm", "A->B", None, "open-refused")
            out = None
        return BcResult(out, t)
    if committer.kind != "flip-open":
        raise ValueError(f"unknown committer strategy {committer.kind!r}")
    # open the bit NOT committed to, guessing the unseen string
    b_cheat = 1 - (c ^ m)
    y_guess = random_bits(rng, ell)
    t.record(2, "Comm", "A->B", np.concatenate([[b_cheat], y_guess]), "open")
    ok = np.array_equal((x0, x1)[b_cheat ^ m], y_guess)
    out = b_cheat if ok else None
    return BcResult(out, t, cheat_success=bool(ok))


@dataclass
class ComposeResult:
    verifier_output: int | None
    transcripts: dict
    error_budget: float
    simulator_memory_qubits: int


def compose(params: SecurityParams, b, a, rng,
            committer: CommitterStrategy | None = None) -> ComposeResult:
    """Full commitment stack: the reduction running over real BQS-OT.

    The inner role-reversed BQS-OT replaces the ideal functionality
    sequentially (one protocol active at a time); the reported error
    budget is 6 eps for eps = 2^-ell.  The proof-simulators for the
    reduction keep only classical state between phases, so their qubit
    usage is 0; it is reported rather than assumed.
    """
    inner = run_bqs_ot(params, rng)
    c, y = inner.receiver      # A plays the BQS receiver in the reversal
    tor = {"A": (c, y), "B": (inner.s0, inner.s1)}
    outer = run_bc(b, a, rng, params.ell, committer=committer, tor=tor)
    budget = composed_bc_error(2.0 ** -params.ell)["total"]
    return ComposeResult(outer.verifier_output,
                         {"inner": inner.transcript, "outer": outer.transcript},
                         budget, 0)


# ---------------------------------------------------------------------------
# proof-simulators

@dataclass
class SenderSimResult:
    extracted: tuple         # (s0, s1) fed to the ideal functionality
    receiver_out: tuple      # (c, y) produced by the honest side
    adversary_out: dict


def _sender_message(strategy: SenderStrategy, rng):
    if strategy.kind == "honest":
        n = len(strategy.classical_b) or 8
        x = random_bits(rng, n)
        b = random_bits(rng, n)
    elif strategy.kind == "fixed":
        x = np.asarray(strategy.classical_x, dtype=np.uint8)
        b = np.asarray(strategy.classical_b, dtype=np.uint8)
        if x.size != b.size or x.size == 0:
            raise ValueError("fixed sender strategy needs matching x and b")
    else:
        raise ValueError(f"unknown sender strategy {strategy.kind!r}")
    n = x.size
    ell = strategy.ell
    if strategy.r0:
        r0 = hashpa.HashSeed(np.asarray(strategy.r0, np.uint8).reshape(ell, n),
                             n, ell)
        r1 = hashpa.HashSeed(np.asarray(strategy.r1, np.uint8).reshape(ell, n),
                             n, ell)
    else:
        r0 = hashpa.sample_hash_seed(n, ell, rng)
        r1 = hashpa.sample_hash_seed(n, ell, rng)
    return x, b, r0, r1


def simulate_sender(strategy: SenderStrategy, rng) -> SenderSimResult:
    """Ideal-world run against a corrupt sender.

    The simulator runs the adversary, measures its quantum message in
    the bases it announced on the classical channel (never touching any
    retained register), recomputes both output strings, and feeds them
    to the corrupt-sender variant of the ideal functionality.
    """
    x, b, r0, r1 = _sender_message(strategy, rng)
    n = x.size
    # measuring |x>_b in basis b returns x with certainty
    s0 = hashpa.hash_bits(r0, _pad_sub(x, b, 0, n))
    s1 = hashpa.hash_bits(r1, _pad_sub(x, b, 1, n))
    out = run_ideal_rot(strategy.ell, rng, corruption="A", inputs=(s0, s1))
    return SenderSimResult((s0, s1), out["B"], {"x": x, "b": b})


def run_with_corrupt_sender(strategy: SenderStrategy, rng):
    """Real protocol against the same corrupt sender, honest receiver."""
    x, b, r0, r1 = _sender_message(strategy, rng)
    n = x.size
    c = int(rng.integers(2))
    xprime = qstate.measure_bb84_product(x, b, np.full(n, c, np.uint8), rng)
    y = hashpa.hash_bits((r0, r1)[c], _pad_sub(xprime, b, c, n))
    return (c, y), {"x": x, "b": b}


MAX_ENUM_CELLS = 1 << 22


def enumerate_receiver_distribution(strategy: ReceiverStrategy,
                                    params: SecurityParams,
                                    max_cells: int = MAX_ENUM_CELLS):
    """Exact joint distribution P(X0, X1, K) induced by a classical strategy.

    X0/X1 are the padded substrings as n-bit integers; K indexes the
    tuple (b, adversary bases, adversary outcomes).  Returns the dense
    JointDistribution (J trivial) and the K codebook.
    """
    if strategy.kind != "measure_all":
        raise ValueError("only measure-on-arrival strategies are enumerable")
    n = params.n
    if strategy.basis_rule == "fixed":
        bases_options = [np.full(n, strategy.fixed_basis, np.uint8)]
    else:
        bases_options = [int_to_bits(v, n) for v in range(2 ** n)]
    p_bases = 1.0 / len(bases_options)
    sparse = {}
    for xv in range(2 ** n):
        x = int_to_bits(xv, n)
        for bv in range(2 ** n):
            b = int_to_bits(bv, n)
            x0 = bits_to_int(_pad_sub(x, b, 0, n))
            x1 = bits_to_int(_pad_sub(x, b, 1, n))
            base_p = 4.0 ** -n * p_bases
            for bases in bases_options:
                mism = np.flatnonzero(bases != b)
                for coin in range(2 ** mism.size):
                    xp = x.copy()
                    xp[mism] = int_to_bits(coin, mism.size)
                    k = (bv, bits_to_int(bases), bits_to_int(xp))
                    key = (x0, x1, k)
                    sparse[key] = sparse.get(key, 0.0) + \
                        base_p * 2.0 ** -mism.size
    k_values = sorted({key[2] for key in sparse})
    k_index = {k: i for i, k in enumerate(k_values)}
    cells = (2 ** n) * (2 ** n) * len(k_values)
    if cells > max_cells:
        raise ValueError(
            f"enumeration needs {cells} cells, budget is {max_cells}")
    table = np.zeros((2 ** n, 2 ** n, len(k_values), 1))
    for (x0, x1, k), p in sparse.items():
        table[x0, x1, k_index[k], 0] += p
    d = entropy.JointDistribution(("X0", "X1", "K", "J"), table / table.sum())
    return d, k_values


@dataclass
class ReceiverSimResult:
    c: int
    y: np.ndarray
    sender_out: tuple
    adversary_out: dict
    alpha: float
    split: entropy.SplitResult


def simulate_receiver(strategy: ReceiverStrategy, params: SecurityParams,
                      rng, eps: float = 0.01,
                      enumeration=None) -> ReceiverSimResult:
    """Ideal-world run against an enumerable corrupt receiver.

    The simulator plays the honest sender's first rounds, runs the
    adversary to the memory bound, derives the choice bit from the
    splitting rule on the strategy's (known) induced distribution, and
    hands (C, S_C) to the corrupt-receiver variant of the ideal
    functionality.  The adversary's output is reproduced from its
    classical output alone.
    """
    if enumeration is None:
        enumeration = enumerate_receiver_distribution(strategy, params)
    dist, k_values = enumeration
    alpha = entropy.smooth_min_entropy(dist, ("X0", "X1"), ("K", "J"), eps)
    beta = float(strategy.aux_qubits)
    split = entropy.split_choice(dist, alpha, beta)
    k_index = {k: i for i, k in enumerate(k_values)}

    n, ell = params.n, params.ell
    x = random_bits(rng, n)
    b = random_bits(rng, n)
    t = Transcript()
    phase1 = _receiver_phase1(strategy, x, b, params, t, rng, False)
    k = (bits_to_int(b), bits_to_int(phase1.k_out["bases"]),
         bits_to_int(phase1.k_out["outcomes"]))
    x1_val = bits_to_int(_pad_sub(x, b, 1, n))
    c = int(split.c_table[x1_val, k_index[k]])
    r0 = hashpa.sample_hash_seed(n, ell, rng)
    r1 = hashpa.sample_hash_seed(n, ell, rng)
    s_c = hashpa.hash_bits((r0, r1)[c], _pad_sub(x, b, c, n))
    ideal = run_ideal_rot(ell, rng, corruption="B", inputs=(c, s_c))
    adv_out = _receiver_phase2(strategy, phase1, b, r0, r1, t, rng)
    return ReceiverSimResult(c, s_c, ideal["A"], adv_out, alpha, split)


# ---------------------------------------------------------------------------
# OTfromROT corruption checks (enumerated real vs simulated distributions)

def _dist_key(parts):
    out = []
    for p in parts:
        out.append(tuple(int(v) for v in np.atleast_1d(p)))
    return tuple(out)


def ot_sender_attack_distributions(xp0, xp1, message_fn, c, ell):
    """Corrupt OTfromROT sender: exact output distributions, both worlds.

    The adversary feeds (xp0, xp1) to the functionality and answers the
    receiver's d with message_fn(d) = (m0, m1).  Observables are
    (d seen by the adversary, honest receiver's y).
    """
    xp0 = np.asarray(xp0, dtype=np.uint8)
    xp1 = np.asarray(xp1, dtype=np.uint8)
    real, sim = {}, {}
    for d in (0, 1):
        # real: d = c' ^ c with c' uniform
        m0, m1 = message_fn(d)
        yp = (xp0, xp1)[d ^ c]       # c' = d ^ c, y' = x'_{c'}
        y = (m0, m1)[c] ^ yp
        key = _dist_key([d, y])
        real[key] = real.get(key, 0.0) + 0.5
        # simulated: the simulator sends a uniform d itself
        xs = [np.asarray(m, np.uint8) ^ (xp0, xp1)[i ^ d]
              for i, m in enumerate((m0, m1))]
        y_sim = run_ideal_ot(ell, xs[0], xs[1], c)
        key = _dist_key([d, y_sim])
        sim[key] = sim.get(key, 0.0) + 0.5
    return real, sim


def ot_receiver_attack_distributions(x0, x1, cp, yp, d, output_fn, ell):
    """Corrupt OTfromROT receiver: exact output distributions, both worlds.

    The adversary inputs (cp, yp) to the functionality, sends d, and its
    final output is output_fn(m0, m1).  The hidden honest input is
    (x0, x1); observables are the adversary's output.
    """
    x0 = np.asarray(x0, dtype=np.uint8)
    x1 = np.asarray(x1, dtype=np.uint8)
    yp = np.asarray(yp, dtype=np.uint8)
    real, sim = {}, {}
    w = 2.0 ** -ell
    for other_val in range(2 ** ell):
        other = int_to_bits(other_val, ell)
        # real: x'_{c'} = y', x'_{1-c'} uniform
        xp = [None, None]
        xp[cp] = yp
        xp[1 - cp] = other
        m0 = x0 ^ xp[d]
        m1 = x1 ^ xp[1 - d]
        real_key = _dist_key([output_fn(m0, m1)])
        real[real_key] = real.get(real_key, 0.0) + w
        # simulated: y = x_{c' ^ d} from OT, m_{c'^d} = y ^ y', other uniform
        y = run_ideal_ot(ell, x0, x1, cp ^ d)
        m = [None, None]
        m[cp ^ d] = y ^ yp
        m[1 - (cp ^ d)] = other
        sim_key = _dist_key([output_fn(m[0], m[1])])
        sim[sim_key] = sim.get(sim_key, 0.0) + w
    return real, sim


# ---------------------------------------------------------------------------
# paired-instance reflection scenario

@dataclass
class ReflectionResult:
    y: np.ndarray
    x0: np.ndarray
    x1: np.ndarray
    matches_x0: bool
    matches_x1: bool
    adversary_memory_qubits: int


def run_reflection_pair(params: SecurityParams, rng) -> ReflectionResult:
    """Two role-swapped parallel instances with a reflecting Bob.

    Bob returns instance-one qubits unmeasured as his instance-two
    quantum message and echoes (b, r0, r1), so Alice measures her own
    states in her own bases: her second-instance output always equals
    one of her first-instance strings.
    """
    n, ell = params.n, params.ell
    x = random_bits(rng, n)
    b = random_bits(rng, n)
    r0 = hashpa.sample_hash_seed(n, ell, rng)
    r1 = hashpa.sample_hash_seed(n, ell, rng)
    s0 = hashpa.hash_bits(r0, _pad_sub(x, b, 0, n))
    s1 = hashpa.hash_bits(r1, _pad_sub(x, b, 1, n))
    # instance two: Alice is the receiver of her own reflected qubits
    c = int(rng.integers(2))
    xprime = qstate.measure_bb84_product(x, b, np.full(n, c, np.uint8), rng)
    y = hashpa.hash_bits((r0, r1)[c], _pad_sub(xprime, b, c, n))
    return ReflectionResult(y, s0, s1, bool(np.array_equal(y, s0)),
                            bool(np.array_equal(y, s1)), 0)
