"""Channel models and the auxiliary function E0(s, P).

All logarithms are base 2; every exponent is reported in bits per channel use.

For a classical-quantum channel ``x -> W_x`` and input distribution ``P``::

    E0(s, P) = -log2 Tr[(sum_x P(x) W_x^{1/(1+s)})^{1+s}]

which reduces to Gallager's classical function when the outputs commute.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import matops
from .errors import InputError

DIST_TOL = 1e-12
TRACE_TOL = 1e-10


@dataclass(frozen=True)
class ProbabilityDistribution:
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        if w.size == 0:
            raise InputError("distribution over an empty alphabet")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InputError("distribution weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > DIST_TOL:
            raise InputError(f"distribution weights sum to {w.sum()!r}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n: int) -> "ProbabilityDistribution":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def normalized(cls, w) -> "ProbabilityDistribution":
        """Rescale nonnegative weights onto the simplex."""
        w = np.clip(np.asarray(w, dtype=float).ravel(), 0.0, None)
        total = w.sum()
        if total <= 0:
            raise InputError("cannot normalise an all-zero weight vector")
        w = w / total
        # One correction pass pins the sum to 1 within a few ulps.
        w[np.argmax(w)] += 1.0 - w.sum()
        return cls(w)

    def __len__(self):
        return self.weights.size

    def __eq__(self, other):
        if not isinstance(other, ProbabilityDistribution):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(self.weights.tobytes())


@dataclass(frozen=True)
class CQChannel:
    """Finite input alphabet mapped to density operators of one dimension.

    Each output is eigendecomposed once at construction; fractional powers
    reuse that spectrum.
    """

    outputs: tuple
    _spectra: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        outs = []
        for i, W in enumerate(self.outputs):
            W = np.array(W, dtype=complex)
            try:
                W = matops.as_psd(W)
            except InputError as exc:
                raise InputError(f"output {i}: {exc}") from exc
            tr = float(np.trace(W).real)
            if abs(tr - 1.0) > TRACE_TOL:
                raise InputError(f"output {i} has trace {tr!r}, not 1")
            W.setflags(write=False)
            outs.append(W)
        if not outs:
            raise InputError("channel needs at least one input symbol")
        dims = {W.shape[0] for W in outs}
        if len(dims) != 1:
            raise InputError(f"outputs have differing dimensions {sorted(dims)}")
        object.__setattr__(self, "outputs", tuple(outs))
        object.__setattr__(self, "_spectra", tuple(matops.eigh(W) for W in outs))

    @property
    def alphabet_size(self) -> int:
        return len(self.outputs)

    @property
    def dim(self) -> int:
        return self.outputs[0].shape[0]

    def powers(self, p: float) -> np.ndarray:
        """Stack of ``W_x ** p`` with shape ``(|X|, d, d)``."""
        out = np.empty((self.alphabet_size, self.dim, self.dim), dtype=complex)
        for i, (w, V) in enumerate(self._spectra):
            out[i] = (V * matops._spectral_power(w, p, matops.PSD_TOL)) @ V.conj().T
        return out

    def __eq__(self, other):
        if not isinstance(other, CQChannel):
            return NotImplemented
        return len(self.outputs) == len(other.outputs) and all(
            np.array_equal(a, b) for a, b in zip(self.outputs, other.outputs)
        )

    def __hash__(self):
        return hash(tuple(W.tobytes() for W in self.outputs))


@dataclass(frozen=True)
class ClassicalChannel:
    """Stochastic matrix ``rows[x][y] = Q(y|x)``."""

    rows: np.ndarray

    def __post_init__(self):
        Q = np.array(self.rows, dtype=float)
        if Q.ndim != 2 or Q.size == 0:
            raise InputError(f"classical channel must be a non-empty matrix, got shape {Q.shape}")
        if not np.all(np.isfinite(Q)) or np.any(Q < 0):
            raise InputError("transition probabilities must be finite and nonnegative")
        bad = np.flatnonzero(np.abs(Q.sum(axis=1) - 1.0) > DIST_TOL)
        if bad.size:
            raise InputError(f"row {int(bad[0])} does not sum to 1")
        Q.setflags(write=False)
        object.__setattr__(self, "rows", Q)

    @property
    def alphabet_size(self) -> int:
        return self.rows.shape[0]

    @property
    def output_size(self) -> int:
        return self.rows.shape[1]

    def __eq__(self, other):
        if not isinstance(other, ClassicalChannel):
            return NotImplemented
        return np.array_equal(self.rows, other.rows)

    def __hash__(self):
        return hash(self.rows.tobytes())


def _as_dist(P, n: int) -> ProbabilityDistribution:
    if not isinstance(P, ProbabilityDistribution):
        P = ProbabilityDistribution(P)
    if len(P) != n:
        raise InputError(f"distribution has {len(P)} entries, alphabet has {n}")
    return P


def _check_s(s: float) -> float:
    s = float(s)
    if not s >= 0:
        raise InputError(f"s must be nonnegative, got {s}")
    return s


def mixture_power(W: CQChannel, P, t: float) -> np.ndarray:
    """``sum_x P(x) W_x^{1/t}``."""
    P = _as_dist(P, W.alphabet_size)
    return np.tensordot(P.weights, W.powers(1.0 / t), axes=1)


def trace_functional(W: CQChannel, P, t: float) -> float:
    """``Tr[(sum_x P(x) W_x^{1/t})^t]`` for ``t >= 1``."""
    P = _as_dist(P, W.alphabet_size)
    used = np.flatnonzero(P.weights > 0)
    first = W.outputs[used[0]]
    if all(np.array_equal(W.outputs[x], first) for x in used[1:]):
        # One state in play: the mixture is W^{1/t}, so the value is Tr W for
        # every t. Skipping the eigensolver keeps E0 flat to the last bit.
        return float(np.trace(first).real)
    M = mixture_power(W, P, t)
    lam = np.clip(np.linalg.eigvalsh(matops.hermitian_part(M)), 0.0, None)
    return float(np.sum(lam**t))


def e0_quantum(W: CQChannel, P, s: float) -> float:
    """Auxiliary function of a classical-quantum channel, in bits."""
    s = _check_s(s)
    P = _as_dist(P, W.alphabet_size)
    if s == 0.0:
        return 0.0
    return -float(np.log2(trace_functional(W, P, 1.0 + s)))


def e0_classical(Q: ClassicalChannel, P, s: float) -> float:
    """Gallager's auxiliary function of a classical channel, in bits."""
    s = _check_s(s)
    P = _as_dist(P, Q.alphabet_size)
    if s == 0.0:
        return 0.0
    t = 1.0 + s
    inner = P.weights @ np.power(Q.rows, 1.0 / t)
    return -float(np.log2(np.sum(inner**t)))


def f_map(W: CQChannel, P, t: float) -> float:
    """``log2 Tr[(E W_X^{1/t})^t]``, equal to ``-E0(t - 1, P)``."""
    t = float(t)
    if not t >= 1:
        raise InputError(f"t must be at least 1, got {t}")
    if t == 1.0:
        return 0.0
    return float(np.log2(trace_functional(W, P, t)))


def e0_derivatives(W: CQChannel, P, s: float, h: float = 1e-4) -> tuple[float, float]:
    """Central-difference first and second derivatives of E0 in ``s``."""
    s = _check_s(s)
    if not h > 0:
        raise InputError(f"step must be positive, got {h}")
    if s - h < 0:
        raise InputError(f"central differences need s >= h (s={s}, h={h})")
    lo, mid, hi = (e0_quantum(W, P, x) for x in (s - h, s, s + h))
    return (hi - lo) / (2 * h), (hi - 2 * mid + lo) / (h * h)


def e0_derivatives_forward(W: CQChannel, P, s: float, h: float = 1e-4) -> tuple[float, float]:
    """Second-order one-sided differences, for ``s`` closer than ``h`` to zero."""
    s = _check_s(s)
    f0, f1, f2, f3 = (e0_quantum(W, P, s + k * h) for k in range(4))
    return (-3 * f0 + 4 * f1 - f2) / (2 * h), (2 * f0 - 5 * f1 + 4 * f2 - f3) / (h * h)


def embed_classical(Q: ClassicalChannel) -> CQChannel:
    """Diagonal (commuting) embedding ``W_x = diag(Q(.|x))``."""
    return CQChannel(tuple(np.diag(row).astype(complex) for row in Q.rows))


def useless_channel(state, n_inputs: int) -> CQChannel:
    """Every input mapped to the same state."""
    return CQChannel(tuple(np.array(state, dtype=complex) for _ in range(n_inputs)))


def noiseless_binary() -> CQChannel:
    return embed_classical(ClassicalChannel(np.eye(2)))


def pure_state_channel(vectors: Sequence) -> CQChannel:
    """Channel whose outputs are the projectors onto the given (normalised) vectors."""
    outs = []
    for v in vectors:
        v = np.asarray(v, dtype=complex)
        v = v / np.linalg.norm(v)
        outs.append(np.outer(v, v.conj()))
    return CQChannel(tuple(outs))
