"""Complex Hadamard matrices and mutually unbiased bases."""

from __future__ import annotations

import numpy as np

from .designs import _is_prime

DEFAULT_TOL = 1e-10


def is_power_of_two(r: int) -> bool:
    return r > 0 and r & (r - 1) == 0


def dft_matrix(r: int) -> np.ndarray:
    """Character table of the cyclic group of order r: entry (j, k) = exp(2*pi*i*j*k/r)."""
    if r < 1:
        raise ValueError(f"order must be positive, got {r}")
    jk = np.outer(np.arange(r), np.arange(r)) % r
    return np.exp(2j * np.pi * jk / r)


def sylvester(order: int) -> np.ndarray:
    """Real normalized Hadamard matrix of order 2^m (first row and column all ones)."""
    if not is_power_of_two(order):
        raise ValueError(f"Sylvester order must be a power of two, got {order}")
    h = np.ones((1, 1))
    while h.shape[0] < order:
        h = np.block([[h, h], [h, -h]])
    return h


def is_complex_hadamard(h: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or not np.all(np.isfinite(h)):
        return False
    r = h.shape[0]
    mod = np.abs(h)
    if np.any(mod < 1 - tol) or np.any(mod > 1 + tol):
        return False
    gram = h @ h.conj().T
    return float(np.max(np.abs(gram - r * np.eye(r)))) <= tol * r


def mub_family(p: int) -> list[np.ndarray]:
    """Complete set of p+1 mutually unbiased bases of C^p, basis vectors as columns.

    M_0 is the identity. For odd prime p, M_t has entries
    omega^(t*j^2 + k*j) / sqrt(p) for t = 1..p (so M_p is the normalized DFT).
    For p = 2 the standard qubit triple is returned.
    """
    if p == 2:
        s = 1 / np.sqrt(2)
        return [
            np.eye(2, dtype=complex),
            s * np.array([[1, 1], [1, -1]], dtype=complex),
            s * np.array([[1, 1], [1j, -1j]], dtype=complex),
        ]
    if not _is_prime(p):
        raise ValueError(f"MUB dimension must be prime, got {p}")
    j = np.arange(p)[:, None]
    k = np.arange(p)[None, :]
    bases = [np.eye(p, dtype=complex)]
    for t in range(1, p + 1):
        expo = (t * j * j + k * j) % p
        bases.append(np.exp(2j * np.pi * expo / p) / np.sqrt(p))
    return bases


def max_unbiased_deviation(bases: list[np.ndarray]) -> float:
    """Largest | |(M_i^H M_j)_ab| - 1/sqrt(d) | over all i != j."""
    d = bases[0].shape[0]
    worst = 0.0
    for i in range(len(bases)):
        for jdx in range(i + 1, len(bases)):
            overlap = np.abs(bases[i].conj().T @ bases[jdx])
            worst = max(worst, float(np.max(np.abs(overlap - 1 / np.sqrt(d)))))
    return worst
