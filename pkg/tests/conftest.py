"""Shared generators for randomized tests.

All randomness is seeded at the call site; nothing here owns global state.
"""

import numpy as np

from scatchan.smatrix import PortSpec, ScatteringMatrix


def random_unitary(rng, n):
    """Haar-ish unitary via QR of a complex Ginibre matrix."""
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_smatrix(rng, k, d):
    """Random homogeneous unitary scatterer with k slots per group."""
    return ScatteringMatrix(random_unitary(rng, 2 * k * d), PortSpec(k, k, k, k, d))


def bounded_loop_smatrix(rng, k, d, cmax=0.9):
    """Unitary scatterer whose reflection blocks have operator norm <= cmax.

    Built from the cosine-sine decomposition
    [[U1,0],[0,U2]] [[C,S],[S,-C]] [[V1,0],[0,V2]] with cos values drawn
    below cmax, so products of two reflection blocks stay contractive and
    both transmission blocks stay well conditioned.
    """
    m = k * d
    c = rng.uniform(0.0, cmax, size=m)
    s = np.sqrt(1.0 - c * c)
    core = np.block([[np.diag(c), np.diag(s)], [np.diag(s), -np.diag(c)]])
    u = np.block([
        [random_unitary(rng, m), np.zeros((m, m))],
        [np.zeros((m, m)), random_unitary(rng, m)],
    ])
    v = np.block([
        [random_unitary(rng, m), np.zeros((m, m))],
        [np.zeros((m, m)), random_unitary(rng, m)],
    ])
    return ScatteringMatrix(u @ core @ v, PortSpec(k, k, k, k, d))


def singular_loop_pair(rng, k, d):
    """Unitary pair whose loop matrix is exactly singular.

    s1 fully reflects one right mode with phase e^{i beta} and s2 fully
    reflects one left mode with phase e^{-i beta}; the phases cancel in
    S2^{L,L} S1^{R,R}, pinning one loop eigenvalue at 1.  Everything else
    is generic.
    """
    n = 2 * k * d
    beta = rng.uniform(0, 2 * np.pi)

    def embed(phase, idx):
        out = np.zeros((n, n), dtype=complex)
        out[idx, idx] = phase
        rest = [j for j in range(n) if j != idx]
        out[np.ix_(rest, rest)] = random_unitary(rng, n - 1)
        return out

    s1 = ScatteringMatrix(embed(np.exp(1j * beta), k * d), PortSpec(k, k, k, k, d))
    s2 = ScatteringMatrix(embed(np.exp(-1j * beta), 0), PortSpec(k, k, k, k, d))
    return s2, s1


def random_contraction(rng, d, p_max=1.0):
    """Random M with M^dag M <= 1: unitaries around clipped singular values."""
    sv = rng.uniform(0.0, p_max, size=d)
    return random_unitary(rng, d) @ np.diag(np.sqrt(sv)) @ random_unitary(rng, d)


def random_density(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho)
