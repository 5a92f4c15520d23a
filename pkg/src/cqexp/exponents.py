"""Random-coding and sphere-packing exponents.

Both exponents maximise ``max_P E0(s, P) - s R`` over ``s``; the random
coding exponent restricts ``s`` to ``[0, 1]``, the sphere-packing exponent
takes the supremum over ``s >= 0`` (capped at ``s_max``, with divergence
detected from the slope at the cap).

The inner maximisation over ``P`` minimises the trace functional
``F(P) = Tr[(sum_x P(x) W_x^{1/t})^t]``, which is convex in ``P`` for
``t >= 1``.  It is solved from several starts by exponentiated-gradient
steps with the exact gradient ``dF/dP(x) = t Tr[M^{t-1} W_x^{1/t}]``,
polished by damped Newton steps with the exact Hessian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import matops
from .channel import CQChannel, ProbabilityDistribution, e0_quantum
from .errors import InputError

INV_PHI = (math.sqrt(5) - 1) / 2
_STALL = 50
_WARMUP = 25
# Exponents below this many bits are roundoff; they are reported as the
# exact zero attained at s = 0.
ZERO_TOL = 1e-12


@dataclass(frozen=True)
class OptimizerConfig:
    starts: int = 8
    tol: float = 1e-7
    max_iters: int = 5000
    seed: int = 0
    s_step: float = 0.05
    s_tol: float = 1e-6
    growth: float = 1.1

    def __post_init__(self):
        if self.starts < 1:
            raise InputError("starts must be >= 1")
        if not self.tol > 0 or not self.s_tol > 0 or not self.s_step > 0:
            raise InputError("tolerances and step must be positive")
        if self.max_iters < 1:
            raise InputError("max_iters must be >= 1")
        if not self.growth > 1:
            raise InputError("growth must exceed 1")


class InputOptimum(NamedTuple):
    dist: ProbabilityDistribution
    value: float
    converged: bool


@dataclass(frozen=True)
class ExponentPoint:
    rate: float
    value: float
    arg_s: float
    arg_P: ProbabilityDistribution
    s_cap_hit: bool = False
    converged: bool = True

    @property
    def divergent(self) -> bool:
        return math.isinf(self.value)


def _start_points(n: int, opt: OptimizerConfig) -> list[np.ndarray]:
    starts = [np.full(n, 1.0 / n)]
    if n <= 7:
        # Exponentiated gradient cannot leave a face of the simplex, so vertex
        # starts keep a little mass everywhere.
        for x in range(n):
            if len(starts) >= opt.starts:
                break
            v = np.full(n, 0.1 / n)
            v[x] += 0.9
            starts.append(v)
    k = 0
    while len(starts) < opt.starts:
        rng = np.random.default_rng([opt.seed, n, k])
        starts.append(rng.dirichlet(np.ones(n)))
        k += 1
    return starts[: opt.starts]


def _mixture_spectrum(Wp: np.ndarray, p: np.ndarray):
    M = matops.hermitian_part(np.tensordot(p, Wp, axes=1))
    lam, V = np.linalg.eigh(M)
    lam = np.clip(lam, 0.0, None)
    # Roundoff-level eigenvalues are exact zeros (M^{t-1} is singular there).
    keep = lam > 4 * lam.size * np.finfo(float).eps * max(lam.max(), 0.0)
    return lam[keep], V[:, keep]


def _functional_and_grad(Wp: np.ndarray, p: np.ndarray, t: float):
    lam, V = _mixture_spectrum(Wp, p)
    F = float(np.sum(lam**t))
    Mt1 = (V * lam ** (t - 1)) @ V.conj().T
    g = t * np.einsum("ij,xji->x", Mt1, Wp).real
    return F, g


def _hessian(Wp: np.ndarray, p: np.ndarray, t: float, idx: np.ndarray) -> np.ndarray:
    """Exact Hessian of ``F`` over the coordinates ``idx``.

    ``d^2F/dp_x dp_y = t Tr[D(M^{t-1})[V_y] V_x]`` with the Frechet derivative
    from the Daleckii-Krein divided differences of ``x -> x^{t-1}`` on the
    support of ``M``.
    """
    lam, V = _mixture_spectrum(Wp, p)
    f = lam ** (t - 1)
    dl = lam[:, None] - lam[None, :]
    same = np.abs(dl) <= 1e-12 * max(1.0, float(lam.max(initial=0.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        gamma = np.where(same, (t - 1) * lam[:, None] ** (t - 2), (f[:, None] - f[None, :]) / np.where(same, 1.0, dl))
    Vt = np.einsum("ia,xij,jb->xab", V.conj(), Wp[idx], V)
    return t * np.einsum("ab,yab,xba->xy", gamma, Vt, Vt).real


def _gap(p: np.ndarray, g: np.ndarray, F: float) -> float:
    """Frank-Wolfe gap in bits; bounds ``log2 F(p) - log2 F*`` from above."""
    return float(p @ g - g.min()) / F / math.log(2)


def _newton(Wp: np.ndarray, p: np.ndarray, t: float, opt: OptimizerConfig, steps: int = 40):
    """Damped Newton on the face of the simplex carrying ``p``."""
    F, g = _functional_and_grad(Wp, p, t)
    for _ in range(steps):
        if _gap(p, g, F) <= opt.tol:
            break
        # Free set: the support, plus zero coordinates whose reduced gradient
        # says they should enter.
        free = np.flatnonzero((p > 0) | (g < p @ g))
        n = free.size
        K = np.zeros((n + 1, n + 1))
        K[:n, :n] = _hessian(Wp, p, t, free)
        K[:n, n] = K[n, :n] = 1.0
        rhs = np.concatenate([-g[free], [0.0]])
        step = np.linalg.lstsq(K, rhs, rcond=1e-13)[0][:n]
        if not np.all(np.isfinite(step)):
            break
        d = np.zeros_like(p)
        d[free] = step
        d -= d.sum() / n * (np.isin(np.arange(p.size), free))
        if g @ d >= 0:
            break
        neg = d < 0
        alpha = min(1.0, float(np.min(-p[neg] / d[neg]))) if np.any(neg) else 1.0
        accepted = False
        for _ in range(40):
            q = np.clip(p + alpha * d, 0.0, None)
            q /= q.sum()
            Fq, gq = _functional_and_grad(Wp, q, t)
            if Fq < F:
                p, F, g = q, Fq, gq
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
    return p, F, g


def _descend(Wp: np.ndarray, p: np.ndarray, t: float, opt: OptimizerConfig):
    """Minimise the trace functional from ``p``; returns (p, F, converged).

    A short run of exponentiated-gradient steps finds the right face, damped
    Newton steps then converge quadratically; exponentiated gradient resumes
    if Newton stalls.  Converged means the Frank-Wolfe gap (an upper bound
    on the excess by convexity) is below ``tol`` in bits, or ``F`` stopped
    improving beyond a few ulps for ``_STALL`` consecutive steps, i.e. the
    optimum is resolved to machine precision.
    """
    F, g = _functional_and_grad(Wp, p, t)
    eta = 1.0
    ref, stall = F, 0
    polish_at = min(_WARMUP, opt.max_iters)
    for it in range(opt.max_iters):
        if _gap(p, g, F) <= opt.tol or stall >= _STALL:
            return p, F, True
        if it == polish_at:
            p, F, g = _newton(Wp, p, t, opt)
            if _gap(p, g, F) <= opt.tol:
                return p, F, True
            polish_at += _WARMUP
        logits = np.log(np.maximum(p, 1e-300)) - eta * g / F
        q = np.exp(logits - logits.max())
        q /= q.sum()
        Fq, gq = _functional_and_grad(Wp, q, t)
        if Fq <= F:
            p, F, g = q, Fq, gq
            eta = min(eta * 1.5, 1e6)
        else:
            eta *= 0.5
        if F < ref * (1 - 1e-14):
            ref, stall = F, 0
        else:
            stall += 1
    return p, F, bool(_gap(p, g, F) <= opt.tol or stall >= _STALL)


def max_e0_over_inputs(W: CQChannel, s: float, opt: OptimizerConfig = OptimizerConfig()) -> InputOptimum:
    """Best input distribution for ``E0(s, .)`` by multistart descent."""
    s = float(s)
    if not s >= 0:
        raise InputError(f"s must be nonnegative, got {s}")
    n = W.alphabet_size
    if n == 1 or s == 0.0:
        P = ProbabilityDistribution.uniform(n)
        return InputOptimum(P, e0_quantum(W, P, s), True)
    t = 1.0 + s
    Wp = W.powers(1.0 / t)
    best = None
    for p0 in _start_points(n, opt):
        p, F, ok = _descend(Wp, p0, t, opt)
        if best is None or F < best[1]:
            best = (p, F, ok)
    P = ProbabilityDistribution.normalized(best[0])
    return InputOptimum(P, e0_quantum(W, P, s), best[2])


class E0Profile:
    """Memoised ``s -> max_P E0(s, P)`` for one channel."""

    def __init__(self, W: CQChannel, opt: OptimizerConfig = OptimizerConfig()):
        self.channel = W
        self.opt = opt
        self._cache: dict[float, InputOptimum] = {}

    def __call__(self, s: float) -> InputOptimum:
        s = float(s)
        hit = self._cache.get(s)
        if hit is None:
            hit = self._cache[s] = max_e0_over_inputs(self.channel, s, self.opt)
        return hit


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-6):
    """Golden-section search for the maximiser of a unimodal ``f`` on ``[a, b]``.

    Returns ``(x, f(x))`` for the best point evaluated, endpoints included.
    """
    fa, fb = f(a), f(b)
    best = (a, fa) if fa >= fb else (b, fb)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    for x, fx in ((c, fc), (d, fd)):
        if fx > best[1]:
            best = (x, fx)
    return best


def _coarse_grid(lo: float, hi: float, step: float) -> np.ndarray:
    n = int(math.floor((hi - lo) / step + 1e-9))
    grid = lo + step * np.arange(n + 1)
    if hi - grid[-1] > 1e-12:
        grid = np.append(grid, hi)
    return grid


def _sp_grid(s_max: float, opt: OptimizerConfig) -> np.ndarray:
    """Uniform grid on ``[0, min(1, s_max)]`` then geometric steps up to ``s_max``."""
    head = _coarse_grid(0.0, min(1.0, s_max), opt.s_step)
    tail = []
    s = head[-1]
    while s < s_max:
        s = min(s * opt.growth, s_max) if s > 0 else s_max
        tail.append(s)
    return np.concatenate([head, np.array(tail)])


def _maximise(objective, grid, opt):
    vals = [objective(s) for s in grid]
    k = int(np.argmax(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    s_best, v_best = golden_section_max(objective, lo, hi, opt.s_tol)
    if vals[k] >= v_best:
        s_best, v_best = float(grid[k]), vals[k]
    return float(s_best), float(v_best)


def _check_rate(R: float) -> float:
    R = float(R)
    if not R >= 0:
        raise InputError(f"rate must be nonnegative, got {R}")
    return R


def random_coding_exponent(
    W: CQChannel,
    R: float,
    opt: OptimizerConfig = OptimizerConfig(),
    profile: E0Profile | None = None,
) -> ExponentPoint:
    """``max_{0 <= s <= 1} max_P E0(s, P) - s R`` in bits."""
    R = _check_rate(R)
    profile = profile or E0Profile(W, opt)
    grid = _coarse_grid(0.0, 1.0, opt.s_step)
    s, v = _maximise(lambda x: profile(x).value - x * R, grid, opt)
    if v <= ZERO_TOL:
        s, v = 0.0, 0.0
    inner = profile(s)
    return ExponentPoint(R, max(v, 0.0), s, inner.dist, False, inner.converged)


def sphere_packing_exponent(
    W: CQChannel,
    R: float,
    s_max: float = 64.0,
    opt: OptimizerConfig = OptimizerConfig(),
    profile: E0Profile | None = None,
) -> ExponentPoint:
    """``sup_{s >= 0} max_P E0(s, P) - s R`` in bits, ``inf`` when divergent.

    The search runs on ``[0, s_max]``; if the objective still rises at the
    cap by more than ``opt.tol`` per unit of ``s`` the point is divergent.
    """
    R = _check_rate(R)
    s_max = float(s_max)
    if not s_max > 0:
        raise InputError(f"s_max must be positive, got {s_max}")
    profile = profile or E0Profile(W, opt)

    def objective(x):
        return profile(x).value - x * R

    delta = min(opt.s_step, s_max / 2)
    slope = (objective(s_max) - objective(s_max - delta)) / delta
    if slope > opt.tol:
        inner = profile(s_max)
        return ExponentPoint(R, math.inf, s_max, inner.dist, True, inner.converged)
    s, v = _maximise(objective, _sp_grid(s_max, opt), opt)
    if s_max >= 1.0:
        # The supremum covers [0, 1]; never report less than the random-coding search.
        er = random_coding_exponent(W, R, opt, profile)
        if er.value > v:
            s, v = er.arg_s, er.value
    if v <= ZERO_TOL:
        s, v = 0.0, 0.0
    inner = profile(s)
    return ExponentPoint(R, max(v, 0.0), s, inner.dist, False, inner.converged)
