"""Extreme values of the witness: the classical 0/1 maximum and the qutrit
maximum over a four-angle family of protocols.

Qutrit family
-------------
``U(phi)`` rotates levels 1 and 2 of a qutrit and leaves level 3 alone.  The
repeated operation is ``M -> U^2dag M U^2``, the preparations are
``U^-5 |psi1><psi1| U^5`` and ``U^-4 |psi2><psi2| U^4`` and the measurement is
``|psi3><psi3|``, with ``psi_k = cos(alpha_k)|1> + sin(alpha_k)|3>``.  Under
this convention ``p_{1,n} = |<psi1| U^(5-2n) |psi3>|^2`` and
``p_{2,n} = |<psi2| U^(4-2n) |psi3>|^2``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .qcore import Effect, State, channel_from_unitary, ket_projector, sequence_probability
from .rng import derive_rng
from .witness import ProbTable, assemble_matrix, witness_value

__all__ = [
    "QUTRIT_OPTIMUM",
    "QutritParams",
    "rotation_u",
    "qutrit_protocol_table",
    "qutrit_witness",
    "nelder_mead",
    "NelderMeadResult",
    "maximize_qutrit",
    "enumerate_classical",
    "verify_classical_bound",
]

QUTRIT_OPTIMUM = 0.5259128034146499


@dataclass(frozen=True)
class QutritParams:
    phi: float
    alpha1: float
    alpha2: float
    alpha3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.alpha1, self.alpha2, self.alpha3])

    @classmethod
    def from_array(cls, x) -> "QutritParams":
        return cls(*(float(v) for v in x))


def rotation_u(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]], dtype=complex)


def _ket(alpha: float) -> np.ndarray:
    return np.array([math.cos(alpha), 0.0, math.sin(alpha)], dtype=complex)


def qutrit_protocol_table(q: QutritParams) -> ProbTable:
    """The eleven probabilities, evaluated through the generic channel model."""
    u = rotation_u(q.phi)
    u2 = u @ u
    ui = u.conj().T
    p1 = np.linalg.matrix_power(ui, 5) @ ket_projector(_ket(q.alpha1)) @ np.linalg.matrix_power(u, 5)
    p2 = np.linalg.matrix_power(ui, 4) @ ket_projector(_ket(q.alpha2)) @ np.linalg.matrix_power(u, 4)
    # channel_from_unitary(v) acts as M -> v^dag M v; here v = U^2
    op = channel_from_unitary(u2)
    m = Effect(ket_projector(_ket(q.alpha3)))
    s1 = State(0.5 * (p1 + p1.conj().T))
    s2 = State(0.5 * (p2 + p2.conj().T))
    return ProbTable(
        [sequence_probability(s1, op, n, m) for n in range(6)],
        [sequence_probability(s2, op, n, m) for n in range(5)],
    )


def qutrit_witness(q: QutritParams) -> float:
    return witness_value(qutrit_protocol_table(q))


def _fast_qutrit_witness(x: np.ndarray) -> float:
    # U^k acts on span{|1>, |3>} overlaps as cos(k phi) on the |1> component only
    phi, a1, a2, a3 = x
    c1, s1, c2, s2, c3, s3 = (math.cos(a1), math.sin(a1), math.cos(a2), math.sin(a2),
                              math.cos(a3), math.sin(a3))
    v = np.empty(11)
    for n in range(6):
        v[n] = (c1 * c3 * math.cos((5 - 2 * n) * phi) + s1 * s3) ** 2
    for n in range(5):
        v[6 + n] = (c2 * c3 * math.cos((4 - 2 * n) * phi) + s2 * s3) ** 2
    return float(np.linalg.det(assemble_matrix(v)))


@dataclass(frozen=True)
class NelderMeadResult:
    x: np.ndarray
    fun: float
    iterations: int
    converged: bool


def nelder_mead(
    f: Callable[[np.ndarray], float],
    x0,
    step: float = 0.25,
    xtol: float = 1e-12,
    max_iter: int = 2000,
    alpha: float = 1.0,
    gamma: float = 2.0,
    rho: float = 0.5,
    shrink: float = 0.5,
) -> NelderMeadResult:
    """Minimise ``f`` with the downhill simplex method.

    Stops when the simplex diameter (largest vertex distance from the best
    vertex) drops below ``xtol`` or after ``max_iter`` iterations.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    simplex = [x0.copy()]
    for i in range(n):
        v = x0.copy()
        v[i] += step
        simplex.append(v)
    values = [f(v) for v in simplex]

    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        order = np.argsort(values, kind="stable")
        simplex = [simplex[k] for k in order]
        values = [values[k] for k in order]
        diameter = max(np.max(np.abs(v - simplex[0])) for v in simplex[1:])
        if diameter < xtol:
            converged = True
            break

        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = centroid + alpha * (centroid - worst)
        fr = f(xr)
        if values[0] <= fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = centroid + rho * (xr - centroid)
            fc = f(xc)
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
                continue
        else:
            xc = centroid + rho * (worst - centroid)
            fc = f(xc)
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
                continue
        best = simplex[0]
        simplex = [best] + [best + shrink * (v - best) for v in simplex[1:]]
        values = [values[0]] + [f(v) for v in simplex[1:]]

    k = int(np.argmin(values))
    return NelderMeadResult(simplex[k], float(values[k]), it, converged)


def maximize_qutrit(seed: int, restarts: int = 64) -> tuple[QutritParams, float]:
    """Multi-start simplex search for the largest qutrit witness.

    Restart ``k`` starts from a uniform point in ``[0, 2pi)^4`` drawn from
    ``derive_rng(seed, "bounds", k)``, so results do not depend on the
    order in which restarts are evaluated.
    """
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    best_x, best_val = None, -math.inf
    for k in range(restarts):
        x0 = derive_rng(seed, "bounds", k).uniform(0.0, 2 * math.pi, 4)
        res = nelder_mead(lambda x: -_fast_qutrit_witness(x), x0)
        if -res.fun > best_val:
            best_x, best_val = res.x, -res.fun
    params = QutritParams.from_array(np.mod(best_x, 2 * math.pi))
    return params, qutrit_witness(params)


def enumerate_classical() -> tuple[np.ndarray, np.ndarray]:
    """All 2^11 deterministic tables and their (exact, integer) witnesses."""
    tables = np.array(list(itertools.product((0.0, 1.0), repeat=11)))
    # integer matrices have integer determinants; rounding removes LU noise
    values = np.rint(np.linalg.det(assemble_matrix(tables)))
    return tables, values


def verify_classical_bound() -> float:
    _, values = enumerate_classical()
    return float(values.max())
