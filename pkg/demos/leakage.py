"""
Leakage from a Gaussian pi/2 pulse
==================================

A truncated Gaussian drive on a transmon populates |2> slightly.  The
first-order amplitude z bounds the leak by 4|z|^2; a direct three-level
integration checks the estimate and shows the effect of DRAG.
"""

import numpy as np

from dimwitness.pulse import (
    PulseParams,
    global_phase_theta,
    leak_amplitude_forms,
    maximizing_state,
    simulate_three_level,
)

p = PulseParams()
print(f"T = {p.T:.3f} ns, sigma = {p.sigma:.3f} ns, Delta = {p.Delta:.4f} rad/ns")

direct, by_parts = leak_amplitude_forms(p)
print(f"z = {direct:.6e}  (by parts: {by_parts:.6e})")
print(f"maximal leak 4|z|^2 = {4 * abs(direct) ** 2:.4e}")
print(f"leftover global phase theta = {global_phase_theta(p):.6f} rad")

psi0, psi1 = maximizing_state(direct)
start = np.array([psi0, psi1, 0])
for drag in (False, True):
    out = simulate_three_level(p, start, drag=drag)
    print(f"ODE leak ({'with' if drag else 'without'} DRAG): {abs(out[2]) ** 2:.4e}")

# Larger anharmonicity protects the qubit better.
for nu in (-0.2, -0.31, -0.5, -1.0):
    q = p.with_overrides(nu=nu)
    z, _ = leak_amplitude_forms(q)
    print(f"nu = {nu:+.2f} GHz -> 4|z|^2 = {4 * abs(z) ** 2:.3e}")
