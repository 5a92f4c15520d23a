"""Weighted geometric mean of positive operators.

``A #_s B = A^{1/2} (A^{-1/2} B A^{-1/2})^s A^{1/2}``.

The inner congruence is evaluated through the factor ``Y = B^{1/2} A^{-1/2}``:
``A^{-1/2} B A^{-1/2} = Y^dag Y``, so with ``Y = U S W^dag`` the mean is
``X^dag X`` where ``X = S^s W^dag A^{1/2}``.  This keeps the result PSD by
construction and loses far less accuracy on ill-conditioned pairs than
forming ``A^{-1/2} B A^{-1/2}`` explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matops
from .errors import InputError, NonConvergenceError, SingularityError

__all__ = [
    "GeomeanConfig",
    "weighted_geomean",
    "weighted_geomean_factor",
    "weighted_geomean_limit",
    "support_basis",
]


@dataclass(frozen=True)
class GeomeanConfig:
    """Settings for the regularised limit ``lim (A + eps I) #_s (B + eps I)``.

    ``method`` selects how singular pairs are resolved: ``"support"`` computes
    the limit exactly by reducing to the intersection of the supports;
    ``"schedule"`` walks ``eps_schedule`` and stops on a Cauchy criterion.
    """

    eps_schedule: tuple = (1e-4, 1e-6, 1e-8)
    convergence_tol: float = 1e-7
    method: str = "support"
    psd_tol: float = matops.PSD_TOL

    def __post_init__(self):
        eps = tuple(float(e) for e in self.eps_schedule)
        if not eps or any(e <= 0 for e in eps):
            raise InputError("eps_schedule must be non-empty and positive")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise InputError("eps_schedule must be strictly decreasing")
        if not self.convergence_tol > 0:
            raise InputError("convergence_tol must be positive")
        if self.method not in ("support", "schedule"):
            raise InputError(f"unknown limit method {self.method!r}")
        object.__setattr__(self, "eps_schedule", eps)


DEFAULT_CONFIG = GeomeanConfig()


def _sqrt_pair(A, psd_tol):
    w, V = matops.eigh(A)
    scale = max(1.0, float(np.abs(w).max()))
    if w[-1] <= psd_tol * scale:
        raise SingularityError(
            "first argument of the geometric mean is singular; use weighted_geomean_limit"
        )
    root = np.sqrt(w)
    return (V * root) @ V.conj().T, (V / root) @ V.conj().T


def weighted_geomean_factor(A, B, s: float, psd_tol: float = matops.PSD_TOL) -> np.ndarray:
    """Return ``X`` with ``A #_s B = X^dag X``.

    Useful when only the spectrum of the mean is needed: its eigenvalues are
    the squared singular values of ``X``.
    """
    A = matops.as_psd(A, psd_tol)
    B = matops.as_psd(B, psd_tol)
    if A.shape != B.shape:
        raise InputError(f"dimension mismatch {A.shape} vs {B.shape}")
    s = float(s)
    A_half, A_ihalf = _sqrt_pair(A, psd_tol)
    B_half = matops.matrix_power(B, 0.5, psd_tol)
    _, sv, Wh = np.linalg.svd(B_half @ A_ihalf)
    # sv**2 is the spectrum of A^{-1/2} B A^{-1/2}; its s/2 power builds X.
    if s < 0 or s > 1:
        if not matops.is_positive_definite(B, psd_tol):
            raise SingularityError(f"s={s} outside [0, 1] needs a positive definite B")
    lam = matops._spectral_power(sv**2, s / 2.0, psd_tol) if s != 0 else np.ones_like(sv)
    return (lam[:, None] * Wh) @ A_half


def weighted_geomean(A, B, s: float, psd_tol: float = matops.PSD_TOL) -> np.ndarray:
    """``A #_s B`` for positive definite ``A`` and PSD ``B``.

    ``B`` must be positive definite as well when ``s`` lies outside ``[0, 1]``.
    Singular ``A`` is refused; see :func:`weighted_geomean_limit`.
    """
    X = weighted_geomean_factor(A, B, s, psd_tol)
    return matops.hermitian_part(X.conj().T @ X)


def support_basis(A, psd_tol: float = matops.PSD_TOL) -> np.ndarray:
    """Orthonormal columns spanning the range of PSD ``A``."""
    w, V = matops.eigh(A)
    keep = w > psd_tol * max(1.0, float(np.abs(w).max()))
    return V[:, keep]


def _range_intersection(Va: np.ndarray, Vb: np.ndarray) -> np.ndarray:
    """Orthonormal basis of ``range(Va) ∩ range(Vb)`` for orthonormal inputs."""
    if Va.shape[1] == 0 or Vb.shape[1] == 0:
        return np.zeros((Va.shape[0], 0), dtype=complex)
    # Principal angles: singular value 1 of Va^dag Vb marks a shared direction.
    U, sv, _ = np.linalg.svd(Va.conj().T @ Vb, full_matrices=False)
    shared = sv > 1 - 1e-8
    return Va @ U[:, shared]


def _shorted(A: np.ndarray, S: np.ndarray, psd_tol: float) -> np.ndarray:
    """Compression to ``range(S)`` of the shorted operator ``[A]_S``.

    For ``range(S)`` inside ``range(A)`` this is ``(S^dag A^+ S)^{-1}``, which
    stays positive definite where the Schur complement form loses it to
    cancellation.
    """
    w, V = matops.eigh(A)
    keep = w > psd_tol * max(1.0, float(np.abs(w).max()))
    R = S.conj().T @ V[:, keep]
    return matops.inverse(matops.hermitian_part((R / w[keep]) @ R.conj().T))


def _support_limit(A, B, s, psd_tol):
    """Exact limit for PSD pairs with ``0 < s < 1``.

    The regularised means decrease to ``[A]_S #_s [B]_S`` with
    ``S = range(A) ∩ range(B)``; both shorted operators are invertible on ``S``.
    """
    S = _range_intersection(support_basis(A, psd_tol), support_basis(B, psd_tol))
    d = A.shape[0]
    if S.shape[1] == 0:
        return np.zeros((d, d), dtype=complex)
    As = _shorted(A, S, psd_tol)
    Bs = _shorted(B, S, psd_tol)
    G = weighted_geomean(As, Bs, s, psd_tol)
    return matops.hermitian_part(S @ G @ S.conj().T)


def _schedule_limit(A, B, s, cfg):
    eye = np.eye(A.shape[0])
    scale_ab = max(1.0, matops.operator_norm(A), matops.operator_norm(B)) + max(cfg.eps_schedule)
    iterates = []
    for eps in cfg.eps_schedule:
        # A + eps I is positive definite by construction, even when eps is
        # below the default positive-definiteness threshold.
        tol = min(cfg.psd_tol, 0.5 * eps / scale_ab)
        cur = weighted_geomean(A + eps * eye, B + eps * eye, s, tol)
        if iterates:
            prev = iterates[-1]
            scale = max(1.0, float(np.linalg.norm(cur)))
            if np.linalg.norm(cur - prev) / scale < cfg.convergence_tol:
                return cur
        iterates.append(cur)
    raise NonConvergenceError(
        f"eps schedule {cfg.eps_schedule} exhausted without convergence",
        iterates=iterates[-2:],
    )


def weighted_geomean_limit(A, B, s: float, cfg: GeomeanConfig = DEFAULT_CONFIG) -> np.ndarray:
    """``A #_s B`` for possibly singular PSD operators, ``s`` in ``[0, 1]``.

    Defined as ``lim_{eps -> 0} (A + eps I) #_s (B + eps I)``.  Positive
    definite inputs go straight to :func:`weighted_geomean`.
    """
    A = matops.as_psd(A, cfg.psd_tol)
    B = matops.as_psd(B, cfg.psd_tol)
    if A.shape != B.shape:
        raise InputError(f"dimension mismatch {A.shape} vs {B.shape}")
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise InputError(f"s must lie in [0, 1] for the limit extension, got {s}")
    if s == 0.0:
        return A
    if s == 1.0:
        return B
    if matops.is_positive_definite(A, cfg.psd_tol):
        return weighted_geomean(A, B, s, cfg.psd_tol)
    if cfg.method == "schedule":
        return _schedule_limit(A, B, s, cfg)
    if matops.is_positive_definite(B, cfg.psd_tol):
        # Self-duality A #_s B = B #_{1-s} A.
        return weighted_geomean(B, A, 1.0 - s, cfg.psd_tol)
    return _support_limit(A, B, s, cfg.psd_tol)
