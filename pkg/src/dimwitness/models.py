"""Concrete protocols: the native-gate qubit test, noisy variants, a leaky
qutrit, and the classical 9-state system that saturates the witness.

Noise is applied after the gate in the Schrodinger picture, so a noise
channel with Kraus operators ``N_k`` composed with gate ``S`` has Kraus
operators ``N_k @ S`` and acts on effects as ``M -> sum S^dag N_k^dag M N_k S``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .qcore import (
    Channel,
    Effect,
    State,
    ValidationError,
    channel_from_unitary,
    ket_projector,
    sequence_probability,
)
from .witness import ProbTable

__all__ = [
    "NoiseKind",
    "NoiseConfig",
    "ProtocolSpec",
    "gate_set",
    "s_gate",
    "z_gate",
    "s_theta",
    "measurement_candidates",
    "ideal_protocol",
    "leaky_gate",
    "noisy_protocol",
    "protocol_table",
    "shift_operator",
    "classical_dim9",
    "CLASSICAL_EXTREMAL",
]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def s_gate() -> np.ndarray:
    return np.array([[1, -1j], [-1j, 1]]) / math.sqrt(2)


def z_gate(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def s_theta(theta: float) -> np.ndarray:
    """S gate with its rotation axis turned by ``theta`` about z."""
    z = z_gate(theta)
    return z.conj().T @ s_gate() @ z


def gate_set(theta: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    return s_gate(), z_gate(theta), s_theta(theta)


@dataclass(frozen=True)
class ProtocolSpec:
    prep1: State
    prep2: State
    op: Channel
    meas: Effect
    max_n1: int = 5
    max_n2: int = 4

    def __post_init__(self):
        dims = {self.prep1.dim, self.prep2.dim, self.op.dim, self.meas.dim}
        if len(dims) != 1:
            raise ValidationError(f"protocol components have mismatched dimensions {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.op.dim


def protocol_table(spec: ProtocolSpec) -> ProbTable:
    """Exact probabilities ``p_{i,n}`` of a protocol."""
    p1 = [sequence_probability(spec.prep1, spec.op, n, spec.meas) for n in range(spec.max_n1 + 1)]
    p2 = [sequence_probability(spec.prep2, spec.op, n, spec.meas) for n in range(spec.max_n2 + 1)]
    return ProbTable(p1, p2)


_KET0 = np.array([1, 0], dtype=complex)
_KET1 = np.array([0, 1], dtype=complex)


def measurement_candidates() -> dict[str, np.ndarray]:
    """Hermitian readings of the measurement ``S_{-pi/4} |0><0| S_{pi/4}``.

    The written product is not Hermitian, so the rank-1 projector
    ``V |0><0| V^dag`` is used, with ``V`` either ``S_{-pi/4}`` (``"conj_left"``)
    or ``S_{pi/4}^dag`` (``"conj_right"``).  Both give the same sanity
    identities and the same cofactor pattern; ``"conj_left"`` is the default.
    """
    out = {}
    for name, v in (("conj_left", s_theta(-math.pi / 4)), ("conj_right", s_theta(math.pi / 4).conj().T)):
        out[name] = ket_projector(v @ _KET0)
    return out


def _ideal_parts(measurement: str = "conj_left"):
    p1 = ket_projector(_KET1)
    p2 = ket_projector(s_theta(math.pi / 2) @ _KET1)
    try:
        m = measurement_candidates()[measurement]
    except KeyError:
        raise ValueError(f"unknown measurement reading {measurement!r}") from None
    return p1, p2, m


def ideal_protocol(measurement: str = "conj_left") -> ProtocolSpec:
    p1, p2, m = _ideal_parts(measurement)
    return ProtocolSpec(State(p1), State(p2), channel_from_unitary(s_gate()), Effect(m))


class NoiseKind(str, enum.Enum):
    AMPLITUDE_DAMPING = "amplitude_damping"
    DEPHASING = "dephasing"
    OVER_ROTATION = "over_rotation"
    Z_DRIFT = "z_drift"
    QUTRIT_LEAK = "qutrit_leak"


@dataclass(frozen=True)
class NoiseConfig:
    """Noise model and its strength.

    ``strength`` is a probability for damping and dephasing, and an angle in
    radians for over-rotation, z-drift and qutrit leakage.
    """

    kind: NoiseKind
    strength: float

    def __post_init__(self):
        kind = NoiseKind(self.kind)
        s = float(self.strength)
        if not math.isfinite(s) or s < 0:
            raise ValueError(f"noise strength must be finite and >= 0, got {self.strength!r}")
        if kind in (NoiseKind.AMPLITUDE_DAMPING, NoiseKind.DEPHASING) and s > 1:
            raise ValueError(f"{kind.value} strength must lie in [0, 1], got {s}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "strength", s)


def _noise_kraus(cfg: NoiseConfig) -> tuple[np.ndarray, ...]:
    s = cfg.strength
    if cfg.kind is NoiseKind.AMPLITUDE_DAMPING:
        return (
            np.array([[1, 0], [0, math.sqrt(1 - s)]], dtype=complex),
            np.array([[0, math.sqrt(s)], [0, 0]], dtype=complex),
        )
    if cfg.kind is NoiseKind.DEPHASING:
        return (math.sqrt(1 - s) * np.eye(2, dtype=complex), math.sqrt(s) * SIGMA_Z)
    if cfg.kind is NoiseKind.OVER_ROTATION:
        # extra rotation about the gate's own (x) axis
        return (math.cos(s / 2) * np.eye(2) - 1j * math.sin(s / 2) * SIGMA_X,)
    if cfg.kind is NoiseKind.Z_DRIFT:
        return (z_gate(s),)
    raise ValueError(f"{cfg.kind.value} is not a qubit-confined noise kind")


def _embed3(a: np.ndarray) -> np.ndarray:
    out = np.zeros((3, 3), dtype=complex)
    out[:2, :2] = a
    return out


def leaky_gate(strength: float) -> np.ndarray:
    """S on levels 0-1 followed by a real rotation by ``strength`` in the 1-2 plane."""
    s3 = _embed3(s_gate())
    s3[2, 2] = 1.0
    c, s = math.cos(strength), math.sin(strength)
    r = np.array([[1, 0, 0], [0, c, -s], [0, s, c]], dtype=complex)
    return r @ s3


def noisy_protocol(cfg: NoiseConfig, measurement: str = "conj_left") -> ProtocolSpec:
    p1, p2, m = _ideal_parts(measurement)
    if cfg.kind is NoiseKind.QUTRIT_LEAK:
        return ProtocolSpec(
            State(_embed3(p1)),
            State(_embed3(p2)),
            channel_from_unitary(leaky_gate(cfg.strength)),
            Effect(_embed3(m)),
        )
    gate = s_gate()
    op = Channel(tuple(k @ gate for k in _noise_kraus(cfg)))
    return ProtocolSpec(State(p1), State(p2), op, Effect(m))


# Deterministic classical system on 9 states.

CLASSICAL_EXTREMAL = ProbTable((1, 0, 1, 1, 0, 1), (1, 0, 0, 0, 1))


def shift_operator(dim: int = 9) -> np.ndarray:
    """Permutation ``|k> -> |k+1 mod dim>``."""
    return np.roll(np.eye(dim), 1, axis=0)


def classical_dim9() -> ProbTable:
    """Cyclic shift by one on states 1..9, starts at 5 and 1, measurement on {1, 5, 7, 8}."""
    def basis(k):  # 1-based level label
        e = np.zeros(9)
        e[k - 1] = 1.0
        return np.diag(e)

    spec = ProtocolSpec(
        State(basis(5)),
        State(basis(1)),
        channel_from_unitary(shift_operator(9)),
        Effect(sum(basis(k) for k in (1, 5, 7, 8))),
    )
    return protocol_table(spec)
