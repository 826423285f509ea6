import numpy as np
import pytest


def laplace_det(m):
    """Determinant by full cofactor expansion along the first row."""
    m = [list(map(float, row)) for row in m]
    n = len(m)
    if n == 1:
        return m[0][0]
    total = 0.0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * laplace_det(minor)
    return total


def fd_gradient(f, m, h=1e-6):
    """Central finite-difference gradient of a scalar function of a matrix."""
    m = np.array(m, dtype=float)
    g = np.zeros_like(m)
    for idx in np.ndindex(m.shape):
        up, dn = m.copy(), m.copy()
        up[idx] += h
        dn[idx] -= h
        g[idx] = (f(up) - f(dn)) / (2 * h)
    return g


def resampled_witnesses(probs, n_trials, n_samples, seed):
    """Witness values of binomially resampled tables (independent of the library)."""
    rng = np.random.default_rng(seed)
    freq = rng.binomial(n_trials, np.asarray(probs), size=(n_samples, 11)) / n_trials
    a = freq[:, :6]
    b = freq[:, 6:]
    m = np.ones((n_samples, 5, 5))
    for r in range(4):
        m[:, r, 0:3] = a[:, r:r + 3]
        m[:, r, 3:5] = b[:, r:r + 2]
    return np.linalg.det(m)


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)
