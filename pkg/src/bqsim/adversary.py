"""Pluggable adversary strategies.

Strategies are declarative descriptions interpreted by the engine, not
arbitrary code: the receiver-simulator has to enumerate a strategy's
induced distribution, which requires a known description.  Factories
below build the attacks the security bounds are measured against.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import qstate


@dataclass(frozen=True)
class ReceiverStrategy:
    """Corrupt-receiver behavior for one BQS-OT run.

    kind:
      measure_all  -- measure every qubit on arrival (m = 0)
      store_first  -- keep the first m qubits, measure the rest in
                      random bases, finish after the bases are revealed
      epr_teleport -- teleport every qubit to the environment through
                      pre-shared EPR pairs (the composability break)
    """
    kind: str
    m: int = 0
    basis_rule: str = "random"   # "random" or "fixed"
    fixed_basis: int = 0
    aux_qubits: int = 0          # quantum auxiliary input (beta)
    name: str = ""


@dataclass(frozen=True)
class SenderStrategy:
    """Corrupt-sender behavior: what goes on Q-Comm and Comm.

    With classical_x/classical_b set the quantum message is the BB84
    product state |x>_b described classically; fixed seeds are optional.
    """
    kind: str = "fixed"          # "fixed" or "honest"
    classical_x: tuple = ()
    classical_b: tuple = ()
    r0: tuple = ()               # row-major l x n bits, () = sample fresh
    r1: tuple = ()
    ell: int = 1


@dataclass(frozen=True)
class CommitterStrategy:
    """Binding attacker for the commitment reduction."""
    kind: str = "flip-open"      # open 1 - (c xor m) with a uniform guess
    name: str = "binding"


def full_measurement_receiver(basis_rule="random") -> ReceiverStrategy:
    """Measure-on-arrival receiver with zero quantum memory.

    basis_rule "random" draws a fresh basis per qubit; an integer fixes
    one basis for every position (the honest receiver's behavior).
    """
    if basis_rule == "random":
        return ReceiverStrategy(kind="measure_all", m=0, basis_rule="random",
                                name="full-measurement")
    if basis_rule in (0, 1):
        return ReceiverStrategy(kind="measure_all", m=0, basis_rule="fixed",
                                fixed_basis=int(basis_rule),
                                name="full-measurement")
    raise ValueError("basis_rule must be 'random', 0 or 1")


def storing_receiver(m: int) -> ReceiverStrategy:
    """Keep the first m qubits unmeasured until the bases are revealed."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if m > qstate.MAX_QUBITS:
        raise ValueError(f"m={m} exceeds the simulator cap {qstate.MAX_QUBITS}")
    if m == 0:
        return full_measurement_receiver()
    return ReceiverStrategy(kind="store_first", m=m, name="storing")


def epr_teleport_receiver(n: int, beta_bound: int | None = None) -> ReceiverStrategy:
    """Borrow n EPR halves from the environment and teleport everything out.

    Only constructible when the auxiliary-input size is unbounded
    (beta_bound None, the legacy model); under an enforced bound the
    construction is refused -- which is the point of the refined model.
    """
    if beta_bound is not None and beta_bound < n:
        raise ValueError(
            f"epr-teleport needs {n} auxiliary qubits, bound is {beta_bound}")
    return ReceiverStrategy(kind="epr_teleport", m=0, aux_qubits=n,
                            name="epr-teleport")


def reflection_attacker() -> ReceiverStrategy:
    """Return every qubit unmeasured in a role-swapped parallel pairing.

    Interpreted only by the paired-protocol demonstration runner; uses
    zero qubits of memory.
    """
    return ReceiverStrategy(kind="reflect", m=0, name="reflection")


def binding_attacker() -> CommitterStrategy:
    """Commit, then try to open the other bit with a uniform guess."""
    return CommitterStrategy()


BY_NAME = {
    "full-measurement": lambda **kw: full_measurement_receiver(
        kw.get("basis_rule", "random")),
    "storing": lambda **kw: storing_receiver(kw.get("m", 1)),
    "epr-teleport": lambda **kw: epr_teleport_receiver(
        kw["n"], kw.get("beta_bound")),
    "reflection": lambda **kw: reflection_attacker(),
    "binding": lambda **kw: binding_attacker(),
}
