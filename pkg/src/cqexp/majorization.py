"""Weak majorization and weak log-majorization of real vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matops
from .errors import DomainError, InputError

SLACK = matops.SLACK


@dataclass(frozen=True)
class MajorizationVerdict:
    """Certificate for ``x ≺_w y``.

    ``prefix_margins[k]`` is the RHS prefix sum minus the LHS prefix sum over
    the ``k + 1`` largest entries; the relation holds when the worst of them
    is above ``-slack``.
    """

    holds: bool
    prefix_margins: np.ndarray
    worst_margin: float
    scale: float

    @property
    def relative_margin(self) -> float:
        return self.worst_margin / max(1.0, self.scale)


def decreasing_rearrangement(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise InputError("vector has non-finite entries")
    return np.sort(x)[::-1].copy()


def _verdict(margins: np.ndarray, scale: float, slack: float) -> MajorizationVerdict:
    worst = float(margins.min()) if margins.size else 0.0
    return MajorizationVerdict(bool(worst >= -slack * max(1.0, scale)), margins, worst, scale)


def weak_majorizes(x, y, slack: float = SLACK) -> MajorizationVerdict:
    """Verdict for ``x ≺_w y`` (every prefix sum of ``x↓`` at most that of ``y↓``)."""
    xs = decreasing_rearrangement(x)
    ys = decreasing_rearrangement(y)
    if xs.shape != ys.shape:
        raise InputError(f"length mismatch {xs.size} vs {ys.size}")
    scale = float(max(np.abs(xs).max(initial=0.0), np.abs(ys).max(initial=0.0)))
    return _verdict(np.cumsum(ys) - np.cumsum(xs), scale, slack)


def log_majorizes(x, y, slack: float = SLACK) -> MajorizationVerdict:
    """Verdict for ``x ≺_log y``, i.e. ``log x ≺_w log y``.

    Zeros are allowed on the left only; they contribute ``-inf`` to the prefix
    sums and can never break the comparison.  A zero on the right forces a
    failure from the first prefix that includes it.  Margins involving
    infinities are reported as ``+inf``/``-inf``.
    """
    xs = decreasing_rearrangement(x)
    ys = decreasing_rearrangement(y)
    if xs.shape != ys.shape:
        raise InputError(f"length mismatch {xs.size} vs {ys.size}")
    if np.any(xs < 0) or np.any(ys < 0):
        raise DomainError("log-majorization needs nonnegative entries")
    with np.errstate(divide="ignore"):
        lx = np.log(xs)
        ly = np.log(ys)
    finite = np.concatenate([lx[np.isfinite(lx)], ly[np.isfinite(ly)]])
    scale = float(np.abs(finite).max(initial=0.0))
    lhs = np.cumsum(lx)
    rhs = np.cumsum(ly)
    with np.errstate(invalid="ignore"):
        margins = rhs - lhs
    # -inf on both sides: both prefix products vanish, the comparison holds.
    margins = np.where(np.isneginf(lhs) & np.isneginf(rhs), np.inf, margins)
    return _verdict(margins, scale, slack)


def eigenvalue_vector(A) -> np.ndarray:
    """Eigenvalues of Hermitian ``A`` in decreasing order."""
    return matops.eigh(A).eigenvalues
