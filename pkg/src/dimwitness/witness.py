"""The 5x5 determinant witness, its cofactors and its shot-noise error.

The eleven measured probabilities ``p_{1,0..5}`` and ``p_{2,0..4}`` are laid
out as::

    p10 p11 p12 p20 p21
    p11 p12 p13 p21 p22
    p12 p13 p14 p22 p23
    p13 p14 p15 p23 p24
     1   1   1   1   1

and the witness is the determinant of that matrix.  It vanishes for every
two-level protocol because the matrix then has rank at most four.

Conventions
-----------
``cofactor_matrix`` returns ``C`` with ``C[i, j] = d det / d m[i, j]``.  The
adjugate is its transpose.  For the ideal gate protocol the nonzero entries
of ``C`` sit in columns 4 and 5, i.e. the adjugate has them in rows 4 and 5.

The error of the witness is propagated from independent binomial
fluctuations of each probability.  A probability that occupies several
matrix positions contributes the *sum* of the cofactors at those positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "LABELS",
    "POSITIONS",
    "ProbTable",
    "WitnessReport",
    "DegenerateProtocolError",
    "assemble_matrix",
    "determinant",
    "cofactor_matrix",
    "grouped_cofactors",
    "witness_value",
    "variance",
    "p_value",
    "log10_p_value",
    "log_erfc",
    "first_order_shift",
    "witness_report",
]

LABELS = ("1:0", "1:1", "1:2", "1:3", "1:4", "1:5", "2:0", "2:1", "2:2", "2:3", "2:4")

# 0-based (row, col) positions of each probability in the witness matrix
_LAYOUT = (
    ("1:0", "1:1", "1:2", "2:0", "2:1"),
    ("1:1", "1:2", "1:3", "2:1", "2:2"),
    ("1:2", "1:3", "1:4", "2:2", "2:3"),
    ("1:3", "1:4", "1:5", "2:3", "2:4"),
)
POSITIONS: dict[str, tuple[tuple[int, int], ...]] = {
    label: tuple((i, j) for i, row in enumerate(_LAYOUT) for j, x in enumerate(row) if x == label)
    for label in LABELS
}


class DegenerateProtocolError(ValueError):
    """First-order error propagation is undefined for this table."""


@dataclass(frozen=True)
class ProbTable:
    """Eleven protocol probabilities: ``p1`` for n = 0..5, ``p2`` for n = 0..4."""

    p1: tuple
    p2: tuple

    def __post_init__(self):
        p1 = tuple(float(x) for x in self.p1)
        p2 = tuple(float(x) for x in self.p2)
        if len(p1) != 6 or len(p2) != 5:
            raise ValueError(f"expected 6 + 5 probabilities, got {len(p1)} + {len(p2)}")
        for label, x in zip(LABELS, p1 + p2):
            if not 0.0 <= x <= 1.0:
                raise ValueError(f"probability {label} = {x!r} outside [0, 1]")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)

    @classmethod
    def from_flat(cls, values: Sequence[float]) -> "ProbTable":
        values = list(values)
        if len(values) != 11:
            raise ValueError(f"expected 11 probabilities, got {len(values)}")
        return cls(values[:6], values[6:])

    @classmethod
    def from_mapping(cls, values: Mapping[str, float]) -> "ProbTable":
        missing = [k for k in LABELS if k not in values]
        if missing:
            raise ValueError(f"missing probabilities: {', '.join(missing)}")
        return cls.from_flat([values[k] for k in LABELS])

    def flat(self) -> np.ndarray:
        return np.array(self.p1 + self.p2)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(LABELS, self.p1 + self.p2))

    def __getitem__(self, label: str) -> float:
        return self.as_dict()[label]


def _flat(t) -> np.ndarray:
    if isinstance(t, ProbTable):
        return t.flat()
    if isinstance(t, Mapping):
        return np.array([t[k] for k in LABELS], dtype=float)
    a = np.asarray(t, dtype=float)
    if a.shape[-1] != 11:
        raise ValueError(f"expected 11 values in the last axis, got shape {a.shape}")
    return a


def assemble_matrix(t) -> np.ndarray:
    """Witness matrix for a table; also accepts stacked ``(..., 11)`` arrays."""
    v = _flat(t)
    m = np.ones(v.shape[:-1] + (5, 5))
    for k, label in enumerate(LABELS):
        for i, j in POSITIONS[label]:
            m[..., i, j] = v[..., k]
    return m


def determinant(m) -> float:
    """Determinant by LU factorisation with partial pivoting (LAPACK)."""
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return float(np.linalg.det(m))


def cofactor_matrix(m) -> np.ndarray:
    """Signed minors ``C[i, j] = (-1)**(i+j) det(m without row i, col j)``.

    Computed from the 4x4 minors directly; the matrices of interest are
    singular, so ``inv(m) * det(m)`` is not an option.
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    c = np.empty((n, n))
    for i in range(n):
        rows = np.delete(m, i, axis=0)
        for j in range(n):
            c[i, j] = (-1) ** (i + j) * np.linalg.det(np.delete(rows, j, axis=1))
    return c


def grouped_cofactors(c) -> np.ndarray:
    """Partial derivatives ``dW/dp_a`` in :data:`LABELS` order.

    Each is the sum of cofactors over every position holding ``p_a``.
    """
    c = np.asarray(c, dtype=float)
    return np.array([sum(c[i, j] for i, j in POSITIONS[a]) for a in LABELS])


def witness_value(t) -> float:
    return determinant(assemble_matrix(t))


def variance(t, n_trials: int) -> float:
    """Shot-noise variance of the witness for ``n_trials`` repetitions per probability."""
    if n_trials < 1:
        raise ValueError(f"n_trials must be positive, got {n_trials}")
    p = _flat(t)
    g = grouped_cofactors(cofactor_matrix(assemble_matrix(p)))
    b = p * (1.0 - p)
    return float(np.sum(b * g * g) / n_trials)


def first_order_shift(c, deltas) -> float:
    """Linear estimate of the witness change for probability shifts ``deltas``.

    ``deltas`` is an 11-vector in :data:`LABELS` order or a mapping keyed by
    label; entries may be negative.
    """
    return float(grouped_cofactors(c) @ _flat(deltas))


_SQRT2 = math.sqrt(2.0)
_LN10 = math.log(10.0)


def log_erfc(x: float) -> float:
    """Natural log of ``erfc(x)``, finite far beyond the double underflow point."""
    if x < 20.0:
        return math.log(math.erfc(x))
    # Laplace continued fraction: erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    tail = x
    for k in range(60, 0, -1):
        tail = x + (k / 2.0) / tail
    return -x * x - 0.5 * math.log(math.pi) - math.log(tail)


def p_value(w: float, sigma: float) -> float:
    """Two-sided Gaussian tail ``erfc(|w| / (sqrt(2) sigma))``.

    Underflows to 0.0 once the tail drops below ~1e-308; use
    :func:`log10_p_value` for such significances.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    return math.erfc(abs(w) / (_SQRT2 * sigma))


def log10_p_value(w: float, sigma: float) -> float:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    return log_erfc(abs(w) / (_SQRT2 * sigma)) / _LN10


@dataclass(frozen=True)
class WitnessReport:
    w: float
    sigma: float
    p_value: float
    log10_p_value: float
    cofactors: np.ndarray
    n_trials: int
    empirical_se: float | None = None

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError("p_value outside [0, 1]")

    @property
    def z(self) -> float:
        """Deviation in units of sigma."""
        return abs(self.w) / self.sigma

    def to_dict(self) -> dict:
        return {
            "w": self.w,
            "sigma": self.sigma,
            "z": self.z,
            "p_value": self.p_value,
            "log10_p_value": self.log10_p_value,
            "n_trials": self.n_trials,
            "empirical_se": self.empirical_se,
            "cofactors": np.asarray(self.cofactors).tolist(),
        }


def witness_report(t, n_trials: int) -> WitnessReport:
    """Witness, analytic sigma and p-value for a table measured ``n_trials`` times.

    Raises
    ------
    DegenerateProtocolError
        If the propagated variance vanishes, either because every
        probability is 0 or 1 or because all cofactor sums cancel (the
        single-circle case, which needs second-order minors).
    """
    p = _flat(t)
    m = assemble_matrix(p)
    c = cofactor_matrix(m)
    g = grouped_cofactors(c)
    if np.max(np.abs(g)) < 1e-12:
        raise DegenerateProtocolError(
            "all cofactor sums vanish; first-order error propagation is undefined "
            "(preparations and measurement on a single Bloch circle?)"
        )
    var = float(np.sum(p * (1 - p) * g * g) / n_trials)
    if var <= 0.0:
        raise DegenerateProtocolError(
            "propagated variance is zero: every probability with a nonzero cofactor sum is 0 or 1"
        )
    w = determinant(m)
    sigma = math.sqrt(var)
    c.flags.writeable = False
    return WitnessReport(w, sigma, p_value(w, sigma), log10_p_value(w, sigma), c, n_trials)
