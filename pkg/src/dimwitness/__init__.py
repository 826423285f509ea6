"""Determinant null test of qubit dimension.

Simulate the two-preparation repeated-gate protocol, evaluate the 5x5
determinant witness with its shot-noise error, reproduce the classical and
qutrit bounds, estimate pulse leakage, and analyse shot-count datasets.
"""

__version__ = "0.1.0"

from .qcore import Channel, Effect, State, ValidationError, channel_from_unitary, sequence_probability
from .witness import (
    LABELS,
    ProbTable,
    WitnessReport,
    assemble_matrix,
    cofactor_matrix,
    first_order_shift,
    p_value,
    variance,
    witness_report,
    witness_value,
)
from .models import NoiseConfig, NoiseKind, classical_dim9, ideal_protocol, noisy_protocol, protocol_table
from .bounds import QUTRIT_OPTIMUM, QutritParams, maximize_qutrit, qutrit_witness, verify_classical_bound
from .pulse import PulseParams, leak_amplitude_z, simulate_three_level
from .stats_io import Dataset, ingest, emit, report, sample_counts, witness_mode_i, witness_mode_ii

__all__ = [
    "__version__",
    "Channel", "Effect", "State", "ValidationError", "channel_from_unitary", "sequence_probability",
    "LABELS", "ProbTable", "WitnessReport", "assemble_matrix", "cofactor_matrix",
    "first_order_shift", "p_value", "variance", "witness_report", "witness_value",
    "NoiseConfig", "NoiseKind", "classical_dim9", "ideal_protocol", "noisy_protocol", "protocol_table",
    "QUTRIT_OPTIMUM", "QutritParams", "maximize_qutrit", "qutrit_witness", "verify_classical_bound",
    "PulseParams", "leak_amplitude_z", "simulate_three_level",
    "Dataset", "ingest", "emit", "report", "sample_counts", "witness_mode_i", "witness_mode_ii",
]
