"""Random instance generators for the verification suites.

Every generator draws only from the ``Generator`` it is handed, so a trial
is a pure function of its stream seed.
"""

from __future__ import annotations

import numpy as np

from . import matops
from .channel import CQChannel, ClassicalChannel, ProbabilityDistribution, embed_classical

MAX_COND = 1e6


def log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def sample_spectrum(rng, d: int, max_cond: float = MAX_COND, scale=(0.2, 5.0)) -> np.ndarray:
    """Positive spectrum with condition number log-uniform in ``[1, max_cond]``.

    Both extremes are hit exactly so the drawn condition number is attained.
    """
    top = log_uniform(rng, *scale)
    cond = log_uniform(rng, 1.0, max_cond) if max_cond > 1 else 1.0
    w = top * np.exp(rng.uniform(-np.log(cond), 0.0, size=d))
    w[0] = top
    if d > 1:
        w[-1] = top / cond
    return np.sort(w)[::-1]


def sample_pd(rng, d: int, max_cond: float = MAX_COND, scale=(0.2, 5.0)) -> np.ndarray:
    U = matops.random_unitary(rng, d)
    return matops.from_spectrum(U, sample_spectrum(rng, d, max_cond, scale))


def zero_smallest(A: np.ndarray, k: int) -> np.ndarray:
    """Zero the ``k`` smallest eigenvalues of a PD matrix and reassemble."""
    w, V = matops.eigh(A)
    w = w.copy()
    if k > 0:
        w[-k:] = 0.0
    return matops.from_spectrum(V, w)


def sample_psd(rng, d: int, max_cond: float = MAX_COND, singular_prob: float = 0.25) -> np.ndarray:
    A = sample_pd(rng, d, max_cond)
    if d > 1 and rng.random() < singular_prob:
        A = zero_smallest(A, int(rng.integers(1, d)))
    return A


def sample_gap(rng, d: int) -> np.ndarray:
    """Random PSD increment, sometimes rank-deficient, sometimes zero."""
    u = rng.random()
    if u < 0.05:
        return np.zeros((d, d), dtype=complex)
    rank = d if u < 0.6 else int(rng.integers(1, d + 1))
    G = (rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))) / np.sqrt(2)
    return matops.hermitian_part(log_uniform(rng, 1e-3, 2.0) * (G @ G.conj().T) / rank)


def sample_nonsingular(rng, d: int, max_cond: float = 10.0) -> np.ndarray:
    """Generic complex matrix with singular values log-uniform, condition <= ``max_cond``."""
    U = matops.random_unitary(rng, d)
    V = matops.random_unitary(rng, d)
    sv = sample_spectrum(rng, d, max_cond, scale=(0.5, 2.0))
    return (U * sv) @ V.conj().T


def sample_density(rng, d: int, kind: str = "full", max_cond: float = MAX_COND) -> np.ndarray:
    """Density operator of the requested kind: full, deficient or pure."""
    if kind == "pure":
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        v /= np.linalg.norm(v)
        rho = np.outer(v, v.conj())
    else:
        A = sample_pd(rng, d, max_cond, scale=(1.0, 1.0))
        if kind == "deficient" and d > 1:
            A = zero_smallest(A, int(rng.integers(1, d)))
        rho = A
    rho = matops.hermitian_part(rho)
    return rho / np.trace(rho).real


CHANNEL_KINDS = ("full", "mixed", "deficient", "pure", "classical", "useless")


def sample_channel(rng, n_inputs: int, d: int, kind: str | None = None) -> CQChannel:
    """Random c-q channel; ``mixed`` combines full-rank and rank-deficient outputs."""
    if kind is None:
        kind = CHANNEL_KINDS[int(rng.integers(len(CHANNEL_KINDS)))]
    if kind == "classical":
        rows = rng.dirichlet(np.ones(d), size=n_inputs)
        rows /= rows.sum(axis=1, keepdims=True)
        return embed_classical(ClassicalChannel(rows))
    if kind == "useless":
        rho = sample_density(rng, d, "full")
        return CQChannel(tuple(rho.copy() for _ in range(n_inputs)))
    if kind == "mixed":
        kinds = [("full", "deficient", "pure")[int(rng.integers(3))] for _ in range(n_inputs)]
    else:
        kinds = [kind] * n_inputs
    return CQChannel(tuple(sample_density(rng, d, k) for k in kinds))


def sample_distribution(rng, n: int) -> ProbabilityDistribution:
    w = rng.dirichlet(np.ones(n))
    if n > 1 and rng.random() < 0.1:
        w[int(rng.integers(n))] = 0.0
    return ProbabilityDistribution.normalized(w)


def sample_classical_channel(rng, n_inputs: int, n_outputs: int) -> ClassicalChannel:
    rows = rng.dirichlet(np.ones(n_outputs), size=n_inputs)
    rows /= rows.sum(axis=1, keepdims=True)
    return ClassicalChannel(rows)
