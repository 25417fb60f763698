"""Desk-scale simulator and verification lab for oblivious transfer and
bit commitment against memory-bounded quantum adversaries."""

from .bounds import SecurityParams, max_ell, min_n, uncertainty_bound
from .engine import run_bc, run_bqs_ot, run_ideal_rot, run_ot_from_rot
from .entropy import JointDistribution, min_entropy, smooth_min_entropy
from .hashpa import hash_bits, pa_extractable_length, sample_hash_seed
from .qstate import MAX_QUBITS, QuantumState

__all__ = [
    "SecurityParams", "max_ell", "min_n", "uncertainty_bound",
    "run_bc", "run_bqs_ot", "run_ideal_rot", "run_ot_from_rot",
    "JointDistribution", "min_entropy", "smooth_min_entropy",
    "hash_bits", "pa_extractable_length", "sample_hash_seed",
    "MAX_QUBITS", "QuantumState",
]

__version__ = "0.1.0"
