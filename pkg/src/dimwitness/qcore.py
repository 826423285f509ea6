"""Small dense operators, channels and the repeated-operation probability model.

Everything here works on plain complex ``numpy`` arrays of shape ``(d, d)``
with ``2 <= d <= 9``.  States, effects and channels are frozen dataclasses
that validate on construction; the arrays they hold are read-only copies.

Channels act on effects (Heisenberg picture)::

    E(M) = sum_j K_j^dag M K_j

so that ``Tr(rho E^n(M))`` is the probability of the outcome ``M`` after the
operation has been applied ``n`` times to ``rho``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "ValidationError",
    "ProbabilityRangeWarning",
    "HERMITIAN_TOL",
    "PSD_TOL",
    "UNITAL_TOL",
    "CLAMP_WINDOW",
    "MAX_DIM",
    "as_cmatrix",
    "State",
    "Effect",
    "Channel",
    "channel_from_unitary",
    "apply_channel",
    "apply_channel_power",
    "sequence_probability",
    "eig_hermitian",
    "ket_projector",
    "random_unitary",
    "random_state",
    "random_effect",
    "random_channel",
]

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
UNITAL_TOL = 1e-10
CLAMP_WINDOW = 1e-9
MAX_DIM = 9
MAX_REPEAT = 16


class ValidationError(ValueError):
    """An operator violates the invariants of the type it is used as."""


class ProbabilityRangeWarning(RuntimeWarning):
    """A computed probability fell outside [0, 1] by more than the clamp window."""


def as_cmatrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a read-only complex square matrix, checking shape and finiteness."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{name}: expected a square matrix, got shape {m.shape}")
    d = m.shape[0]
    if not 2 <= d <= MAX_DIM:
        raise ValidationError(f"{name}: dimension {d} outside supported range 2..{MAX_DIM}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name}: non-finite entries")
    m.flags.writeable = False
    return m


def _hermitian_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def eig_hermitian(m) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix in nondecreasing order.

    Raises
    ------
    ValidationError
        If ``m`` deviates from Hermitian by more than 1e-10 entry-wise.
    """
    m = as_cmatrix(m)
    dev = _hermitian_deviation(m)
    if dev > PSD_TOL:
        raise ValidationError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


@dataclass(frozen=True)
class State:
    """Density operator: Hermitian, unit trace, positive semidefinite."""

    rho: np.ndarray

    def __post_init__(self):
        rho = as_cmatrix(self.rho, "state")
        dev = _hermitian_deviation(rho)
        if dev > HERMITIAN_TOL:
            raise ValidationError(f"state is not Hermitian (max deviation {dev:.3e})")
        tr = np.trace(rho)
        if abs(tr - 1.0) > HERMITIAN_TOL:
            raise ValidationError(f"state trace is {tr.real:.15g}, expected 1")
        lo = eig_hermitian(rho)[0]
        if lo < -PSD_TOL:
            raise ValidationError(f"state has negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]


@dataclass(frozen=True)
class Effect:
    """Measurement operator with spectrum in [0, 1]."""

    m: np.ndarray

    def __post_init__(self):
        m = as_cmatrix(self.m, "effect")
        dev = _hermitian_deviation(m)
        if dev > HERMITIAN_TOL:
            raise ValidationError(f"effect is not Hermitian (max deviation {dev:.3e})")
        ev = eig_hermitian(m)
        if ev[0] < -PSD_TOL or ev[-1] > 1.0 + PSD_TOL:
            raise ValidationError(
                f"effect spectrum [{ev[0]:.3e}, {ev[-1]:.15g}] outside [0, 1]"
            )
        object.__setattr__(self, "m", m)

    @property
    def dim(self) -> int:
        return self.m.shape[0]


@dataclass(frozen=True)
class Channel:
    """Completely positive unital map on effects, stored by its Kraus operators."""

    kraus: tuple

    def __post_init__(self):
        ks = tuple(as_cmatrix(k, "kraus operator") for k in self.kraus)
        if not ks:
            raise ValidationError("channel needs at least one Kraus operator")
        d = ks[0].shape[0]
        if any(k.shape != (d, d) for k in ks):
            raise ValidationError("Kraus operators have mismatched dimensions")
        total = sum(k.conj().T @ k for k in ks)
        dev = float(np.max(np.abs(total - np.eye(d))))
        if dev > UNITAL_TOL:
            raise ValidationError(f"sum K^dag K deviates from identity by {dev:.3e}")
        object.__setattr__(self, "kraus", ks)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def compose(self, after: "Channel") -> "Channel":
        """Channel applying ``self`` first, then ``after`` (Schrodinger time order)."""
        if after.dim != self.dim:
            raise ValidationError(f"dimension mismatch: {self.dim} vs {after.dim}")
        return Channel(tuple(a @ b for a in after.kraus for b in self.kraus))


def channel_from_unitary(u) -> Channel:
    """Single-Kraus channel ``M -> u^dag M u``."""
    u = as_cmatrix(u, "unitary")
    dev = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if dev > UNITAL_TOL:
        raise ValidationError(f"matrix is not unitary (max deviation of u^dag u from 1: {dev:.3e})")
    return Channel((u,))


def _apply(kraus: Sequence[np.ndarray], m: np.ndarray) -> np.ndarray:
    out = np.zeros_like(m)
    for k in kraus:
        out = out + k.conj().T @ m @ k
    return out


def apply_channel(ch: Channel, m: Effect) -> Effect:
    if ch.dim != m.dim:
        raise ValidationError(f"dimension mismatch: channel {ch.dim}, effect {m.dim}")
    out = _apply(ch.kraus, m.m)
    # restore exact Hermiticity lost to rounding
    return Effect(0.5 * (out + out.conj().T))


def apply_channel_power(ch: Channel, m: Effect, n: int) -> np.ndarray:
    """``E^n(M)`` as a raw array (no re-validation between steps)."""
    if ch.dim != m.dim:
        raise ValidationError(f"dimension mismatch: channel {ch.dim}, effect {m.dim}")
    out = np.array(m.m)
    for _ in range(n):
        out = _apply(ch.kraus, out)
    return out


def sequence_probability(p: State, ch: Channel, n: int, m: Effect) -> float:
    """Probability ``Tr(rho E^n(M))`` of outcome ``m`` after ``n`` repetitions of ``ch``.

    Values within 1e-9 outside [0, 1] are clamped; anything further out is
    returned unchanged and a :class:`ProbabilityRangeWarning` is emitted.
    """
    if not (p.dim == ch.dim == m.dim):
        raise ValidationError(f"dimension mismatch: state {p.dim}, channel {ch.dim}, effect {m.dim}")
    if not 0 <= n <= MAX_REPEAT:
        raise ValidationError(f"repetition count {n} outside 0..{MAX_REPEAT}")
    raw = float(np.real(np.trace(p.rho @ apply_channel_power(ch, m, n))))
    if -CLAMP_WINDOW <= raw <= 1.0 + CLAMP_WINDOW:
        return min(max(raw, 0.0), 1.0)
    warnings.warn(f"probability {raw!r} outside [0, 1]", ProbabilityRangeWarning, stacklevel=2)
    return raw


def ket_projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


# Random objects for property tests and demonstrations.

def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_state(dim: int, rng: np.random.Generator, rank: int | None = None) -> State:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return State(0.5 * (rho + rho.conj().T))


def random_effect(dim: int, rng: np.random.Generator) -> Effect:
    u = random_unitary(dim, rng)
    m = u @ np.diag(rng.uniform(0.0, 1.0, dim)) @ u.conj().T
    return Effect(0.5 * (m + m.conj().T))


def random_channel(dim: int, rng: np.random.Generator, n_kraus: int = 3) -> Channel:
    """Random channel from a random isometry ``C^d -> C^(d*n_kraus)``."""
    g = rng.standard_normal((dim * n_kraus, dim)) + 1j * rng.standard_normal((dim * n_kraus, dim))
    v, _ = np.linalg.qr(g)
    return Channel(tuple(v[j * dim:(j + 1) * dim, :] for j in range(n_kraus)))
