"""Hermitian matrix core.

Every matrix function in the package is routed through a single spectral
primitive (``eigh``) or, for Gram products ``X^† X``, through the singular
value decomposition of the factor ``X``.  Matrices are plain complex
``numpy`` arrays; the ``as_*`` helpers validate and normalise them.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, InputError, SingularityError

HERM_TOL = 1e-12
PSD_TOL = 1e-10
SLACK = 1e-9

_EPS = np.finfo(float).eps


class EigenSystem(NamedTuple):
    """Eigenvalues in descending order and the matching unitary basis."""

    eigenvalues: np.ndarray
    basis: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.basis * self.eigenvalues) @ self.basis.conj().T


def hermitian_part(M: np.ndarray) -> np.ndarray:
    return (M + M.conj().T) / 2


def as_hermitian(M, herm_tol: float = HERM_TOL) -> np.ndarray:
    """Validate ``M`` as a square Hermitian matrix and return its exact Hermitian part."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise InputError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InputError("matrix has non-finite entries")
    scale = max(1.0, float(np.abs(M).max()))
    skew = float(np.abs(M - M.conj().T).max())
    if skew > herm_tol * scale:
        raise InputError(f"matrix is not Hermitian: max |M - M^dag| = {skew:.3e}")
    return hermitian_part(M)


def eigh(M, herm_tol: float = HERM_TOL) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending."""
    H = as_hermitian(M, herm_tol)
    w, V = np.linalg.eigh(H)
    return EigenSystem(w[::-1].copy(), V[:, ::-1].copy())


def eigvals(M, herm_tol: float = HERM_TOL) -> np.ndarray:
    """Descending eigenvalues of a Hermitian matrix."""
    return np.linalg.eigvalsh(as_hermitian(M, herm_tol))[::-1].copy()


def _psd_scale(w: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(w))))


def _check_psd_spectrum(w: np.ndarray, psd_tol: float) -> None:
    scale = _psd_scale(w)
    if w.size and w.min() < -psd_tol * scale:
        raise InputError(f"matrix is not positive semi-definite: min eigenvalue {w.min():.3e}")


def as_psd(M, psd_tol: float = PSD_TOL, herm_tol: float = HERM_TOL) -> np.ndarray:
    H = as_hermitian(M, herm_tol)
    _check_psd_spectrum(np.linalg.eigvalsh(H), psd_tol)
    return H


def is_positive_definite(A, psd_tol: float = PSD_TOL) -> bool:
    w = eigvals(A)
    return bool(w[-1] > psd_tol * _psd_scale(w))


def _spectral_power(w: np.ndarray, p: float, psd_tol: float) -> np.ndarray:
    """Apply ``x -> x**p`` to a PSD spectrum under the support convention."""
    _check_psd_spectrum(w, psd_tol)
    scale = _psd_scale(w)
    # Eigenvalues below the roundoff floor of eigh are exact zeros.
    floor = 4 * w.size * _EPS * float(np.max(np.abs(w), initial=0.0))
    zero = w <= floor
    if p == 0:
        return np.ones_like(w)
    if p < 0 and (np.any(zero) or w.min() <= psd_tol * scale):
        raise SingularityError(f"negative power {p} of a singular matrix")
    out = np.zeros_like(w)
    out[~zero] = w[~zero] ** p
    return out


def matrix_power(A, p: float, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Fractional power ``A**p`` of a PSD matrix.

    Zero eigenvalues map to zero for ``p > 0``; ``A**0`` is the identity.
    Negative powers require ``A`` to be positive definite.
    """
    w, V = eigh(A)
    return (V * _spectral_power(w, float(p), psd_tol)) @ V.conj().T


def gram_power(X, p: float, psd_tol: float = PSD_TOL) -> np.ndarray:
    """``(X^dag X)**p`` computed from the singular values of ``X``.

    Squaring singular values keeps small eigenvalues of the Gram matrix
    accurate to relative precision, which forming ``X^dag X`` first does not.
    """
    _, sv, Vh = np.linalg.svd(np.asarray(X, dtype=complex))
    lam = _spectral_power(sv**2, float(p), psd_tol)
    return hermitian_part((Vh.conj().T * lam) @ Vh)


def gram_eigvals(X) -> np.ndarray:
    """Descending eigenvalues of ``X^dag X``."""
    return np.linalg.svd(np.asarray(X, dtype=complex), compute_uv=False) ** 2


def apply_fn(A, f: Callable) -> np.ndarray:
    """Spectral calculus ``U f(diag(w)) U^dag`` for Hermitian ``A``."""
    w, V = eigh(A)
    fw = np.array([float(f(x)) for x in w])
    return (V * fw) @ V.conj().T


def inverse(A, psd_tol: float = PSD_TOL) -> np.ndarray:
    return matrix_power(A, -1.0, psd_tol)


def kyfan_norm(A, k: int) -> float:
    """Sum of the ``k`` largest singular values."""
    A = np.asarray(A, dtype=complex)
    d = A.shape[0]
    if not 1 <= k <= d:
        raise InputError(f"Ky Fan index k={k} outside [1, {d}]")
    sv = np.linalg.svd(A, compute_uv=False)
    return float(np.sum(sv[:k]))


def kyfan_norms(A) -> np.ndarray:
    """All Ky Fan norms ``k = 1..d`` at once (prefix sums of singular values)."""
    return np.cumsum(np.linalg.svd(np.asarray(A, dtype=complex), compute_uv=False))


def schatten_norm(A, p: float) -> float:
    """``(Tr |A|**p)**(1/p)`` for ``p >= 1``, evaluated without overflow."""
    if p < 1:
        raise InputError(f"Schatten index must be >= 1, got {p}")
    sv = np.linalg.svd(np.asarray(A, dtype=complex), compute_uv=False)
    top = float(sv[0]) if sv.size else 0.0
    if top == 0.0:
        return 0.0
    return top * float(np.sum((sv / top) ** p)) ** (1.0 / p)


def operator_norm(A) -> float:
    return float(np.linalg.norm(np.asarray(A, dtype=complex), 2))


def loewner_margin(A, B) -> float:
    """Smallest eigenvalue of ``B - A`` relative to ``max(1, ||A||, ||B||)``.

    Nonnegative exactly when ``A <= B`` in the Loewner order.
    """
    A = as_hermitian(A, herm_tol=1e-8)
    B = as_hermitian(B, herm_tol=1e-8)
    if A.shape != B.shape:
        raise InputError(f"dimension mismatch {A.shape} vs {B.shape}")
    lo = float(np.linalg.eigvalsh(B - A)[0])
    return lo / max(1.0, operator_norm(A), operator_norm(B))


def loewner_leq(A, B, tol: float = PSD_TOL) -> bool:
    """True iff ``B - A`` is PSD up to ``tol * max(1, ||B - A||)``."""
    A = as_hermitian(A)
    B = as_hermitian(B)
    if A.shape != B.shape:
        raise InputError(f"dimension mismatch {A.shape} vs {B.shape}")
    w = np.linalg.eigvalsh(B - A)
    return bool(w[0] >= -tol * max(1.0, float(np.max(np.abs(w)))))


def trace_fn(A, f: Callable) -> float:
    """``Tr f(A)`` as the sum of ``f`` over the spectrum."""
    w = eigvals(A)
    total = 0.0
    for x in w:
        try:
            with np.errstate(all="raise"):
                v = float(f(float(x)))
        except (ValueError, ZeroDivisionError, OverflowError, FloatingPointError) as exc:
            raise DomainError(f"function undefined at eigenvalue {x!r}") from exc
        if not np.isfinite(v):
            raise DomainError(f"function undefined at eigenvalue {x!r}")
        total += v
    return total


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed unitary via QR with phase correction."""
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def from_spectrum(U: np.ndarray, w) -> np.ndarray:
    return hermitian_part((U * np.asarray(w, dtype=float)) @ U.conj().T)


def random_hermitian(rng: np.random.Generator, d: int, scale: float = 1.0) -> np.ndarray:
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * hermitian_part(Z) / np.sqrt(2)


def random_pd(d: int, seed: int, floor: float = 1e-3) -> np.ndarray:
    """Deterministic ``G G^dag + floor I`` with ``G`` seeded complex Gaussian."""
    if d < 1:
        raise InputError(f"dimension must be >= 1, got {d}")
    if floor <= 0:
        raise InputError(f"floor must be positive, got {floor}")
    rng = np.random.default_rng(seed)
    G = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    return hermitian_part(G @ G.conj().T + floor * np.eye(d))
