"""
How large can the witness get?
==============================

Deterministic (classical) strategies reach at most 3; a qutrit following the
same protocol family tops out near 0.526.
"""

import numpy as np

from dimwitness.bounds import QUTRIT_OPTIMUM, enumerate_classical, maximize_qutrit, qutrit_witness

tables, values = enumerate_classical()
print(f"classical: {len(tables)} tables, W ranges over {sorted(set(values.tolist()))}")
for t in tables[values == values.max()][:5]:
    print("  argmax", t.astype(int))

# A multi-start Nelder-Mead over (phi, alpha1, alpha2, alpha3).
params, w = maximize_qutrit(seed=0, restarts=64)
print(f"\nqutrit maximum {w:.13f} (reference {QUTRIT_OPTIMUM})")
print("  at", params)

# The landscape is rugged; random points sit far below the optimum.
rng = np.random.default_rng(1)
samples = [qutrit_witness(params.from_array(rng.uniform(0, 2 * np.pi, 4))) for _ in range(2000)]
print(f"random parameters: median W = {np.median(samples):.3f}, max = {max(samples):.3f}")
