"""Leakage of a truncated-Gaussian single-qubit pulse into the third level.

Model
-----
Three-level anharmonic oscillator driven in the frame where the 0-1
transition is resonant::

    H(t) = Omega(t) (|1><0| + lam |2><1|) + h.c. + Delta |2><2|

with the truncated Gaussian envelope ``Omega_G`` on ``[-T/2, T/2]``
(area ``pi/2``) and the optional DRAG correction
``Omega = Omega_G - 1j lam^2 dOmega_G/dt / (4 Delta)``.

Units: time in ns, angular frequencies in rad/ns, ``nu`` in GHz.

First-order perturbation theory gives the final population of ``|2>`` for
a start state ``psi0|0> + psi1|1>`` as ``2 |z psi1 - 1j conj(z) psi0|^2`` with
the leakage amplitude ``z`` below; its maximum over start states is
``4 |z|^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, special

__all__ = [
    "PulseParams",
    "QuadratureError",
    "IntegrationError",
    "omega_g",
    "omega_g_dot",
    "phi_of_t",
    "leak_amplitude_forms",
    "leak_amplitude_z",
    "max_leak_probability",
    "leak_probability",
    "maximizing_state",
    "global_phase_theta",
    "hamiltonian",
    "simulate_three_level",
    "computational_block",
]

_EDGE_TOL = 1e-9  # ns


class QuadratureError(RuntimeError):
    """Quadrature did not reach the requested accuracy."""


class IntegrationError(RuntimeError):
    """Time stepping lost norm or failed its step-halving check."""


@dataclass(frozen=True)
class PulseParams:
    n_T: int = 256
    n_sigma: int = 64
    delta_t: float = 0.222  # ns
    nu: float = -0.310  # GHz
    lam: float = math.sqrt(2)

    def __post_init__(self):
        if self.n_T <= 0 or self.n_sigma <= 0:
            raise ValueError("n_T and n_sigma must be positive")
        if not self.delta_t > 0:
            raise ValueError("delta_t must be positive")
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.nu == 0:
            raise ValueError("nu must be nonzero")

    @property
    def T(self) -> float:
        return self.n_T * self.delta_t

    @property
    def sigma(self) -> float:
        return self.n_sigma * self.delta_t

    @property
    def Delta(self) -> float:
        return 2 * math.pi * self.nu

    def with_overrides(self, **kw) -> "PulseParams":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _consts(p: PulseParams):
    T, s = p.T, p.sigma
    edge = math.exp(-T * T / (8 * s * s))
    norm = math.sqrt(2 * math.pi) * s * math.erf(T / (2 * math.sqrt(2) * s)) - T * edge
    return T, s, edge, norm


def _check_window(t, p: PulseParams) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    half = p.T / 2
    if np.any(np.abs(t) > half + _EDGE_TOL):
        raise ValueError(f"time outside the pulse window [-{half}, {half}] ns")
    return np.clip(t, -half, half)


def omega_g(t, p: PulseParams):
    """Truncated Gaussian envelope, zero at both window edges, area ``pi/2``."""
    t = _check_window(t, p)
    _, s, edge, norm = _consts(p)
    out = (math.pi / 2) * (np.exp(-t * t / (2 * s * s)) - edge) / norm
    return out if out.ndim else float(out)


def omega_g_dot(t, p: PulseParams):
    """Analytic time derivative of :func:`omega_g`."""
    t = _check_window(t, p)
    _, s, _, norm = _consts(p)
    out = (math.pi / 2) * (-t / (s * s)) * np.exp(-t * t / (2 * s * s)) / norm
    return out if out.ndim else float(out)


def phi_of_t(t, p: PulseParams):
    """Accumulated rotation angle ``integral of omega_g`` from ``-T/2`` to ``t``."""
    t = _check_window(t, p)
    T, s, edge, norm = _consts(p)
    r2s = math.sqrt(2) * s
    gauss = math.sqrt(math.pi / 2) * s * (special.erf(t / r2s) + math.erf(T / (2 * r2s)))
    out = (math.pi / 2) * (gauss - (t + T / 2) * edge) / norm
    return out if out.ndim else float(out)


def _fourier(f, p: PulseParams, epsabs: float) -> complex:
    """``integral of exp(1j Delta t) f(t)`` over the window, by QAWO."""
    half = p.T / 2
    parts = []
    for weight in ("cos", "sin"):
        val, err, *rest = integrate.quad(
            f, -half, half, weight=weight, wvar=p.Delta, epsabs=epsabs, epsrel=1e-13,
            limit=400, full_output=1,
        )
        if err > 10 * epsabs and err > 1e-11 * abs(val):
            raise QuadratureError(f"{weight} quadrature reached error estimate {err:.3e}")
        parts.append(val)
    return complex(parts[0], parts[1])


def leak_amplitude_forms(p: PulseParams, epsabs: float = 1e-15) -> tuple[complex, complex]:
    """Leakage amplitude ``z`` by direct quadrature and after integration by parts."""
    direct = _fourier(lambda t: omega_g(t, p) * math.cos(phi_of_t(t, p)), p, epsabs)
    by_parts_integral = _fourier(lambda t: math.sin(phi_of_t(t, p)), p, epsabs)
    by_parts = np.exp(0.5j * p.Delta * p.T) - 1j * p.Delta * by_parts_integral
    return direct, complex(by_parts)


def leak_amplitude_z(p: PulseParams, rtol: float = 1e-8) -> complex:
    """``z = integral of exp(1j Delta t) omega_g(t) cos(phi(t)) dt``.

    Raises :class:`QuadratureError` if the integrated-by-parts form disagrees
    by more than ``rtol`` relative.
    """
    direct, by_parts = leak_amplitude_forms(p)
    rel = abs(direct - by_parts) / abs(direct)
    if rel > rtol:
        raise QuadratureError(f"the two forms of z disagree by {rel:.3e} relative")
    return direct


def leak_probability(psi0: complex, psi1: complex, z: complex) -> float:
    """Perturbative population of ``|2>`` after the pulse, ``2|z psi1 - 1j z* psi0|^2``."""
    norm = abs(psi0) ** 2 + abs(psi1) ** 2
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"state is not normalised (|psi|^2 = {norm!r})")
    return 2.0 * abs(z * psi1 - 1j * np.conj(z) * psi0) ** 2


def maximizing_state(z: complex) -> tuple[complex, complex]:
    """Start state maximising :func:`leak_probability`: ``psi0/psi1 = 1j z / conj(z)``."""
    ratio = 1j * z / np.conj(z)
    psi1 = 1 / math.sqrt(2)
    return complex(ratio * psi1), complex(psi1)


def max_leak_probability(z: complex) -> float:
    return 4.0 * abs(z) ** 2


def global_phase_theta(p: PulseParams) -> float:
    """``integral of omega_g^2 lam^2 / (2 Delta)``, the leftover global phase."""
    half = p.T / 2
    val, err = integrate.quad(lambda t: omega_g(t, p) ** 2, -half, half, epsabs=1e-14, epsrel=1e-13)
    return val * p.lam ** 2 / (2 * p.Delta)


def hamiltonian(t, p: PulseParams, drag: bool = False, amplitude: float = 1.0) -> np.ndarray:
    """``H(t)`` as a ``(..., 3, 3)`` array."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    om = amplitude * omega_g(t, p).astype(complex)
    if drag:
        om = om - 1j * amplitude * p.lam ** 2 * omega_g_dot(t, p) / (4 * p.Delta)
    h = np.zeros(t.shape + (3, 3), dtype=complex)
    h[..., 1, 0] = om
    h[..., 2, 1] = p.lam * om
    h[..., 0, 1] = np.conj(om)
    h[..., 1, 2] = p.lam * np.conj(om)
    h[..., 2, 2] = p.Delta
    return h


def _rk4(psi: np.ndarray, p: PulseParams, drag: bool, amplitude: float, n_steps: int) -> np.ndarray:
    half = p.T / 2
    h = p.T / n_steps
    # Hamiltonians at every step start and midpoint
    hs = hamiltonian(np.linspace(-half, half, 2 * n_steps + 1), p, drag, amplitude)
    a = -1j * hs
    psi = np.array(psi, dtype=complex)
    worst = 0.0
    for k in range(n_steps):
        a0, am, a1 = a[2 * k], a[2 * k + 1], a[2 * k + 2]
        k1 = a0 @ psi
        k2 = am @ (psi + 0.5 * h * k1)
        k3 = am @ (psi + 0.5 * h * k2)
        k4 = a1 @ (psi + h * k3)
        psi = psi + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        worst = max(worst, abs(np.vdot(psi, psi).real - 1.0))
    if worst > 1e-9:
        raise IntegrationError(f"norm drifted by {worst:.3e}; reduce the step")
    return psi


def simulate_three_level(
    p: PulseParams,
    psi_init,
    drag: bool = False,
    amplitude: float = 1.0,
    steps_per_sample: int = 50,
    check: bool = True,
) -> np.ndarray:
    """Integrate ``i dpsi/dt = H(t) psi`` across the pulse with fixed-step RK4.

    The step is ``delta_t / steps_per_sample``.  With ``check`` on, the run is
    repeated at half the step and an :class:`IntegrationError` is raised if the
    two final states differ by more than 1e-9.  ``amplitude`` scales the whole
    drive (0 switches it off).
    """
    psi = np.asarray(psi_init, dtype=complex)
    if psi.shape != (3,):
        raise ValueError("psi_init must have three amplitudes")
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-10:
        raise ValueError("psi_init is not normalised")
    n = p.n_T * steps_per_sample
    out = _rk4(psi, p, drag, amplitude, n)
    if check:
        fine = _rk4(psi, p, drag, amplitude, 2 * n)
        diff = float(np.max(np.abs(fine - out)))
        if diff > 1e-9:
            raise IntegrationError(f"step halving changed the final state by {diff:.3e}")
        out = fine
    return out


def computational_block(p: PulseParams, drag: bool = False, steps_per_sample: int = 50) -> np.ndarray:
    """2x2 block of the pulse propagator on levels 0 and 1."""
    cols = [simulate_three_level(p, e, drag, steps_per_sample=steps_per_sample, check=False)[:2]
            for e in (np.array([1, 0, 0], complex), np.array([0, 1, 0], complex))]
    return np.column_stack(cols)
