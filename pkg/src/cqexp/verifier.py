"""Seeded randomized suites for the operator inequalities behind E0 concavity.

A suite is a trial function ``rng -> Trial`` plus a fold.  Trial ``i`` of a
suite run with seed ``seed`` draws from its own stream, seeded by
``trial_seed(name, seed, i)``, so results do not depend on execution order or
worker count, and any single trial can be replayed from its stream seed.

Margins follow one sign convention: positive means the inequality holds with
room to spare, negative means it is violated.  Each margin is normalised by
``max(1, magnitude of the larger side)``; a trial violates when its margin is
below ``-slack``.
"""

from __future__ import annotations

import json
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import matops
from .channel import e0_quantum, f_map, mixture_power
from .errors import GeneratorError, InputError
from .geomean import GeomeanConfig, weighted_geomean, weighted_geomean_factor, weighted_geomean_limit
from .majorization import log_majorizes, weak_majorizes
from .sampling import (
    MAX_COND,
    log_uniform,
    sample_channel,
    sample_distribution,
    sample_gap,
    sample_nonsingular,
    sample_pd,
    sample_psd,
    sample_spectrum,
    zero_smallest,
)

SLACK = matops.SLACK
IDENTITY_TOL = 1e-12
DEFAULT_D_RANGE = (2, 6)
NORM_POWER_TS = (0.3, 0.7, 1.0, 2.0, 5.0)
VECTOR_POWER_TS = (1.0, 1.5, 2.0, 4.0, 10.0)
MAX_COUNTEREXAMPLES = 5


class Trial(NamedTuple):
    margins: dict
    inputs: dict


@dataclass(frozen=True)
class InequalityReport:
    suite_name: str
    trials: int
    violations: int
    worst_margin: float
    worst_seed: int
    params: dict
    asserted: bool = True
    parts: tuple = ()
    counterexamples: tuple = ()

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def part(self, name: str) -> "InequalityReport":
        for p in self.parts:
            if p.suite_name.rsplit("/", 1)[-1] == name:
                return p
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "suite_name": self.suite_name,
            "trials": self.trials,
            "violations": self.violations,
            "worst_margin": _json_float(self.worst_margin),
            "worst_seed": self.worst_seed,
            "asserted": self.asserted,
            "params": _jsonable(self.params),
            "parts": [p.to_dict() for p in self.parts],
            "counterexamples": [_jsonable(c) for c in self.counterexamples],
        }


def _json_float(x: float):
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return [_jsonable(v) for v in obj] if obj.ndim > 1 else [
                [_json_float(z.real), _json_float(z.imag)] for z in obj
            ]
        return [_jsonable(v) for v in obj] if obj.ndim > 1 else [_json_float(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _json_float(obj)
    if isinstance(obj, complex):
        return [_json_float(obj.real), _json_float(obj.imag)]
    return obj


def reports_to_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# margins


def _rel(lhs: float, rhs: float) -> float:
    """Margin of ``lhs <= rhs`` relative to the larger side."""
    return (rhs - lhs) / max(1.0, abs(lhs), abs(rhs))


def _eq_margin(X: np.ndarray, Y: np.ndarray) -> float:
    """Equality as a margin: minus the relative operator-norm distance."""
    scale = max(1.0, matops.operator_norm(X), matops.operator_norm(Y))
    return -matops.operator_norm(X - Y) / scale


def _leq(X, Y) -> float:
    return matops.loewner_margin(X, Y)


def _dim(rng, d_range) -> int:
    lo, hi = d_range
    return int(rng.integers(lo, hi + 1))


def _unit(rng, p_end: float = 0.05) -> float:
    """Uniform on [0, 1] with a small chance of hitting either endpoint exactly."""
    u = rng.random()
    if u < p_end / 2:
        return 0.0
    if u < p_end:
        return 1.0
    return float(rng.random())


def _trace_power(A, p: float) -> float:
    return float(np.sum(np.clip(matops.eigvals(A), 0.0, None) ** p))


def _trace_product(X, Y) -> tuple[float, float]:
    z = complex(np.trace(X @ Y))
    return z.real, abs(z.imag)


# --------------------------------------------------------------------------
# lemma suites


def trial_logmajor(rng, d_range=DEFAULT_D_RANGE, commuting=False) -> Trial:
    d = _dim(rng, d_range)
    A = sample_pd(rng, d)
    if commuting:
        w, V = matops.eigh(A)
        B = matops.from_spectrum(V, sample_spectrum(rng, d))
    else:
        B = sample_pd(rng, d)
    s = _unit(rng)
    lhs = matops.gram_eigvals(weighted_geomean_factor(A, B, s))
    # Spectrum of A^{(1-s)/2} B^s A^{(1-s)/2}, which is similar to A^{1-s} B^s.
    rhs = matops.gram_eigvals(matops.matrix_power(B, s / 2) @ matops.matrix_power(A, (1 - s) / 2))
    v = log_majorizes(lhs, rhs)
    return Trial({"logmajor": v.relative_margin}, {"A": A, "B": B, "s": s})


def trial_norm_power(rng, d_range=DEFAULT_D_RANGE, ts=NORM_POWER_TS) -> Trial:
    d = _dim(rng, d_range)
    A = sample_psd(rng, d)
    B = sample_psd(rng, d)
    worst = math.inf
    A_half = matops.matrix_power(A, 0.5)
    for t in ts:
        Bt = matops.matrix_power(B, t)
        left = matops.kyfan_norms(Bt @ matops.matrix_power(A, t) @ Bt)
        # (BAB)^t from the singular values of A^{1/2} B.
        right = matops.kyfan_norms(matops.gram_power(A_half @ B, t))
        for k in range(d):
            if t <= 1:
                worst = min(worst, _rel(left[k], right[k]))
            if t >= 1:
                worst = min(worst, _rel(right[k], left[k]))
    return Trial({"norm_power": worst}, {"A": A, "B": B, "ts": list(ts)})


def _weakly_majorized_pair(rng, d):
    for _ in range(100):
        y = log_uniform(rng, 0.1, 3.0) * rng.random(d)
        if rng.random() < 0.1:
            x = rng.permutation(y)
        else:
            # Doubly stochastic mix of y, then an entrywise decrease.
            n_perm = int(rng.integers(1, 4))
            wts = rng.dirichlet(np.ones(n_perm))
            z = sum(w * y[rng.permutation(d)] for w in wts)
            shrink = rng.uniform(0.0, 0.5, size=d) * (rng.random(d) < 0.7)
            x = z * (1.0 - shrink)
        x = np.clip(x, 0.0, None)
        if weak_majorizes(x, y).holds:
            return x, y
    raise GeneratorError("could not build a weakly majorized pair in 100 attempts")


def trial_vector_power(rng, d_range=DEFAULT_D_RANGE, ts=VECTOR_POWER_TS) -> Trial:
    d = _dim(rng, d_range)
    x, y = _weakly_majorized_pair(rng, d)
    worst = min(weak_majorizes(x**t, y**t).relative_margin for t in ts)
    return Trial({"vector_power": worst}, {"x": x, "y": y, "ts": list(ts)})


_MONOTONE_CONVEX = {
    "exp": math.exp,
    "t*max(t,0)": lambda t: t * max(t, 0.0),
}
_PSD_POWERS = {"t^2": 2.0, "t^4": 4.0}


def trial_trace_convex(rng, d_range=DEFAULT_D_RANGE) -> Trial:
    d = _dim(rng, d_range)
    G = sample_gap(rng, d)
    # Monotone convex functions on arbitrary Hermitian pairs.
    H = matops.random_hermitian(rng, d, scale=log_uniform(rng, 0.1, 2.0))
    worst_h = min(
        _rel(matops.trace_fn(H, f), matops.trace_fn(H + G, f)) for f in _MONOTONE_CONVEX.values()
    )
    # Convex powers t^p, p >= 1, on PSD-ordered pairs.
    A = sample_psd(rng, d)
    p = float(rng.uniform(1.0, 8.0))
    exps = list(_PSD_POWERS.values()) + [p]
    worst_p = min(_rel(_trace_power(A, q), _trace_power(A + G, q)) for q in exps)
    return Trial(
        {"monotone_convex": worst_h, "psd_power": worst_p},
        {"H": H, "A": A, "G": G, "p": p},
    )


def trial_holder(rng, d_range=DEFAULT_D_RANGE) -> Trial:
    d = _dim(rng, d_range)
    A = sample_psd(rng, d)
    B = sample_psd(rng, d)
    theta = float(rng.uniform(0.01, 0.99))
    lhs, _ = _trace_product(A, B)
    rhs = matops.schatten_norm(A, 1 / theta) * matops.schatten_norm(B, 1 / (1 - theta))
    return Trial({"holder": _rel(lhs, rhs)}, {"A": A, "B": B, "theta": theta})


def _core_sides(A, B, lam, t, cfg=GeomeanConfig()):
    G = weighted_geomean_limit(A, B, lam, cfg)
    lhs = _trace_power(G, t)
    rhs, imag = _trace_product(matops.matrix_power(A, t * (1 - lam)), matops.matrix_power(B, t * lam))
    return lhs, rhs, imag


def trial_core_lemma(rng, d_range=DEFAULT_D_RANGE) -> Trial:
    d = _dim(rng, d_range)
    A = sample_pd(rng, d)
    B = sample_pd(rng, d)
    t = float(rng.uniform(1.0, 8.0))
    lam = _unit(rng)
    lhs, rhs, imag = _core_sides(A, B, lam, t)
    margins = {"pd": _rel(lhs, rhs), "imag_part": -imag / max(1.0, abs(rhs))}
    # Singular pair through the eps-limit extension (reported, not asserted).
    As = zero_smallest(A, int(rng.integers(1, d)))
    Bs = zero_smallest(B, int(rng.integers(0, d)))
    lhs_s, rhs_s, _ = _core_sides(As, Bs, lam, t)
    margins["singular"] = _rel(lhs_s, rhs_s)
    return Trial(margins, {"A": A, "B": B, "A_singular": As, "B_singular": Bs, "t": t, "lambda": lam})


# --------------------------------------------------------------------------
# geometric-mean properties


def trial_gm_commutativity(rng, d_range=DEFAULT_D_RANGE) -> Trial:
    d = _dim(rng, d_range)
    U = matops.random_unitary(rng, d)
    A = matops.from_spectrum(U, sample_spectrum(rng, d))
    B = matops.from_spectrum(U, sample_spectrum(rng, d))
    s = _unit(rng)
    lhs = weighted_geomean(A, B, s)
    rhs = matops.matrix_power(A, 1 - s) @ matops.matrix_power(B, s)
    return Trial({"a_commutativity": _eq_margin(lhs, rhs)}, {"A": A, "B": B, "s": s})


def trial_gm_homogeneity(rng, d_range=DEFAULT_D_RANGE) -> Trial:
    d = _dim(rng, d_range)
    A, B = sample_pd(rng, d), sample_pd(rng, d)
    s = _unit(rng)
    a, b = (float(10.0 * (1.0 - rng.random())) for _ in range(2))
    lhs = weighted_geomean(a * A, b * B, s)
    rhs = a ** (1 - s) * b**s * weighted_geomean(A, B, s)
    return Trial({"b_homogeneity": _eq_margin(lhs, rhs)}, {"A": A, "B": B, "s": s, "a": a, "b": b})


def trial_gm_monotonicity(rng, d_range=DEFAULT_D_RANGE) -> Trial:
    d = _dim(rng, d_range)
    A, B = sample_pd(rng, d), sample_pd(rng, d)
    C = A + sample_gap(rng, d)
    D = B + sample_gap(rng, d)
    s = _unit(rng)
    m = _leq(weighted_geomean(A, B, s), weighted_geomean(C, D, s))
    return Trial({"c_monotonicity": m}, {"A": A, "B": B, "C": C, "D": D, "s": s})


def trial_gm_congruence(rng, d_range=DEFAULT_D_RANGE) -> Trial:
    d = _dim(rng, d_range)
    A, B = sample_pd(rng, d), sample_pd(rng, d)
    M = sample_nonsingular(rng, d)
    s = _unit(rng)
    Mh = M.conj().T
    lhs = M @ weighted_geomean(A, B, s) @ Mh
    rhs = weighted_geomean(M @ A @ Mh, M @ B @ Mh, s)
    return Trial({"d_congruence": _eq_margin(lhs, rhs)}, {"A": A, "B": B, "M": M, "s": s})


def trial_gm_self_duality(rng, d_range=DEFAULT_D_RANGE) -> Trial:
    d = _dim(rng, d_range)
    A, B = sample_pd(rng, d), sample_pd(rng, d)
    s = _unit(rng)
    G = weighted_geomean(A, B, s)
    swap = _eq_margin(G, weighted_geomean(B, A, 1 - s))
    inv = _eq_margin(matops.inverse(G), weighted_geomean(matops.inverse(A), matops.inverse(B), s))
    return Trial({"e_self_duality": min(swap, inv)}, {"A": A, "B": B, "s": s})


def trial_gm_concavity(rng, d_range=DEFAULT_D_RANGE) -> Trial:
    d = _dim(rng, d_range)
    A, B, C, D = (sample_pd(rng, d) for _ in range(4))
    lam, s = _unit(rng), _unit(rng)
    lhs = lam * weighted_geomean(A, C, s) + (1 - lam) * weighted_geomean(B, D, s)
    rhs = weighted_geomean(lam * A + (1 - lam) * B, lam * C + (1 - lam) * D, s)
    return Trial({"f_concavity": _leq(lhs, rhs)}, {"A": A, "B": B, "C": C, "D": D, "lambda": lam, "s": s})


def trial_gm_hm_gm_am(rng, d_range=DEFAULT_D_RANGE) -> Trial:
    d = _dim(rng, d_range)
    A, B = sample_pd(rng, d), sample_pd(rng, d)
    s = _unit(rng)
    G = weighted_geomean(A, B, s)
    harmonic = matops.inverse((1 - s) * matops.inverse(A) + s * matops.inverse(B))
    arithmetic = (1 - s) * A + s * B
    return Trial({"g_hm_gm_am": min(_leq(harmonic, G), _leq(G, arithmetic))}, {"A": A, "B": B, "s": s})


CONTINUITY_EPS = (1e-2, 1e-4, 1e-6, 1e-8)


def trial_gm_continuity(rng, d_range=DEFAULT_D_RANGE) -> Trial:
    """Distances to the limit shrink monotonically and obey the homogeneity bound.

    ``(A + eps) #_s (B + eps) <= (1 + eps/a)^{1-s} (1 + eps/b)^s (A #_s B)`` with
    ``a, b`` the smallest eigenvalues, by properties (b) and (c).
    """
    d = _dim(rng, d_range)
    A, B = sample_pd(rng, d), sample_pd(rng, d)
    s = _unit(rng)
    G = weighted_geomean(A, B, s)
    g = matops.operator_norm(G)
    a, b = matops.eigvals(A)[-1], matops.eigvals(B)[-1]
    eye = np.eye(d)
    dist = []
    worst = math.inf
    for eps in CONTINUITY_EPS:
        dk = matops.operator_norm(weighted_geomean(A + eps * eye, B + eps * eye, s) - G)
        bound = ((1 + eps / a) ** (1 - s) * (1 + eps / b) ** s - 1) * g
        worst = min(worst, _rel(dk, bound))
        if dist:
            worst = min(worst, _rel(dk, dist[-1]))
        dist.append(dk)
    return Trial({"h_continuity": worst}, {"A": A, "B": B, "s": s})


GEOMEAN_PROPERTIES = (
    ("a-commutativity", "a_commutativity", trial_gm_commutativity),
    ("b-homogeneity", "b_homogeneity", trial_gm_homogeneity),
    ("c-monotonicity", "c_monotonicity", trial_gm_monotonicity),
    ("d-congruence", "d_congruence", trial_gm_congruence),
    ("e-self-duality", "e_self_duality", trial_gm_self_duality),
    ("f-concavity", "f_concavity", trial_gm_concavity),
    ("g-hm-gm-am", "g_hm_gm_am", trial_gm_hm_gm_am),
    ("h-continuity", "h_continuity", trial_gm_continuity),
)


# --------------------------------------------------------------------------
# channel-level suites


def proof_chain_margins(W, P, l, r, theta, cfg=GeomeanConfig()) -> dict:
    """Margins of each displayed step of the concavity argument for one instance."""
    t = theta * l + (1 - theta) * r
    lam = l * theta / t
    m = {"i_identity": -abs(lam / l + (1 - lam) / r - 1 / t)}

    Wl, Wr, Wt = W.powers(1 / l), W.powers(1 / r), W.powers(1 / t)
    pointwise = math.inf
    for x in range(W.alphabet_size):
        if P.weights[x] > 0:
            gm = weighted_geomean_limit(Wl[x], Wr[x], 1 - lam, cfg)
            pointwise = min(pointwise, _eq_margin(Wt[x], gm))
    m["ii_pointwise"] = pointwise

    mix_t = mixture_power(W, P, t)
    A = mixture_power(W, P, l)
    B = mixture_power(W, P, r)
    G = weighted_geomean_limit(A, B, 1 - lam, cfg)
    m["ii_geomean_concavity"] = _leq(mix_t, G)

    tr_mix = _trace_power(mix_t, t)
    tr_gm = _trace_power(G, t)
    m["iii_trace_monotone"] = _rel(tr_mix, tr_gm)

    core, _ = _trace_product(matops.matrix_power(A, t * lam), matops.matrix_power(B, t * (1 - lam)))
    m["iv_core_lemma"] = _rel(tr_gm, core)
    split, _ = _trace_product(matops.matrix_power(A, l * theta), matops.matrix_power(B, r * (1 - theta)))
    m["iv_exponents"] = -abs(core - split) / max(1.0, abs(core))

    holder = _trace_power(A, l) ** theta * _trace_power(B, r) ** (1 - theta)
    m["v_holder"] = _rel(split, holder)

    m["conclusion"] = _rel(f_map(W, P, t), theta * f_map(W, P, l) + (1 - theta) * f_map(W, P, r))
    return m


def trial_proof_chain(rng, d_range=(2, 5), max_inputs=5) -> Trial:
    d = _dim(rng, (min(d_range[0], 5), min(d_range[1], 5)))
    n = int(rng.integers(1, max_inputs + 1))
    W = sample_channel(rng, n, d, kind="mixed")
    P = sample_distribution(rng, n)
    l = float(rng.uniform(1.0, 8.0))
    r = float(rng.uniform(l, 8.0))
    theta = _unit(rng)
    m = proof_chain_margins(W, P, l, r, theta)
    return Trial(m, {"outputs": list(W.outputs), "P": P.weights, "l": l, "r": r, "theta": theta})


def _concavity_margin(W, P, s1, s2, theta):
    mid = e0_quantum(W, P, theta * s1 + (1 - theta) * s2)
    chord = theta * e0_quantum(W, P, s1) + (1 - theta) * e0_quantum(W, P, s2)
    return _rel(chord, mid)


def trial_concavity(rng, d_range=DEFAULT_D_RANGE, max_inputs=6, s_max=8.0) -> Trial:
    d = _dim(rng, d_range)
    n = int(rng.integers(1, max_inputs + 1))
    W = sample_channel(rng, n, d)
    P = sample_distribution(rng, n)
    s1, s2 = sorted(rng.uniform(0.0, s_max, size=2))
    theta = _unit(rng)
    u1, u2 = sorted(rng.uniform(0.0, 1.0, size=2))
    phi = _unit(rng)
    l, r = sorted(rng.uniform(1.0, 1.0 + s_max, size=2))
    psi = _unit(rng)
    margins = {
        "full": _concavity_margin(W, P, float(s1), float(s2), theta),
        "unit_interval": _concavity_margin(W, P, float(u1), float(u2), phi),
        "f_convexity": _rel(
            f_map(W, P, psi * l + (1 - psi) * r), psi * f_map(W, P, l) + (1 - psi) * f_map(W, P, r)
        ),
    }
    inputs = {
        "outputs": list(W.outputs), "P": P.weights,
        "s": [float(s1), float(s2)], "theta": theta,
        "s_unit_interval": [float(u1), float(u2)], "theta_unit_interval": phi,
    }
    return Trial(margins, inputs)


# --------------------------------------------------------------------------
# registry and runner


@dataclass(frozen=True)
class SuiteSpec:
    trial: Callable
    default_trials: int
    asserted: tuple
    params: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)


SUITES: dict[str, SuiteSpec] = {
    "logmajor": SuiteSpec(trial_logmajor, 1000, ("logmajor",), {"s": [0, 1], "max_cond": MAX_COND}),
    "norm-power": SuiteSpec(
        trial_norm_power, 1000, ("norm_power",), {"t": list(NORM_POWER_TS), "ky_fan_k": "1..d"}
    ),
    "vector-power": SuiteSpec(trial_vector_power, 1000, ("vector_power",), {"t": list(VECTOR_POWER_TS)}),
    "trace-convex": SuiteSpec(
        trial_trace_convex,
        1000,
        ("monotone_convex", "psd_power"),
        {"monotone_f": sorted(_MONOTONE_CONVEX), "psd_f": ["t^2", "t^4", "t^p, p in [1, 8]"]},
    ),
    "holder": SuiteSpec(trial_holder, 1000, ("holder",), {"theta": [0.01, 0.99]}),
    "core-lemma": SuiteSpec(
        trial_core_lemma,
        1000,
        ("pd", "imag_part"),
        {"t": [1, 8], "lambda": [0, 1], "max_cond": MAX_COND, "singular": "reported, not asserted"},
        {"imag_part": 1e-10},
    ),
    "proof-chain": SuiteSpec(
        trial_proof_chain,
        500,
        (
            "i_identity", "ii_pointwise", "ii_geomean_concavity", "iii_trace_monotone",
            "iv_core_lemma", "iv_exponents", "v_holder", "conclusion",
        ),
        {"inputs": [1, 5], "d": [2, 5], "l_r": [1, 8], "theta": [0, 1], "outputs": "full/deficient/pure"},
        {"i_identity": IDENTITY_TOL},
    ),
    "concavity": SuiteSpec(
        trial_concavity,
        1000,
        ("full", "unit_interval", "f_convexity"),
        {"s": [0, 8], "s_unit_interval": [0, 1], "inputs": [1, 6], "kinds": "full/mixed/deficient/pure/classical/useless"},
    ),
}
for _name, _key, _fn in GEOMEAN_PROPERTIES:
    SUITES[f"geomean-props/{_name}"] = SuiteSpec(_fn, 1000, (_key,), {"s": [0, 1], "max_cond": MAX_COND})


def trial_seed(name: str, seed: int, index: int) -> int:
    """64-bit stream seed of trial ``index`` in suite ``name``."""
    salt = zlib.crc32(name.encode())
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), salt, int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def run_trial(name: str, stream_seed: int, d_range=DEFAULT_D_RANGE) -> Trial:
    """Replay one trial from its stream seed."""
    rng = np.random.default_rng(stream_seed)
    return SUITES[name].trial(rng, tuple(d_range))


def _violates(margins, keys, tolerances, slack) -> bool:
    return any(not margins[k] >= -tolerances.get(k, slack) for k in keys)


def _run_chunk(name, seed, indices, d_range, slack):
    spec = SUITES[name]
    out = []
    for i in indices:
        ts = trial_seed(name, seed, i)
        trial = run_trial(name, ts, d_range)
        bad = _violates(trial.margins, spec.asserted, spec.tolerances, slack)
        out.append((i, ts, trial.margins, trial.inputs if bad else None))
    return out


def _fold(label, rows, keys, tolerances, slack, asserted, params):
    """Fold trial rows over ``keys``; NaN margins count as the worst possible."""
    worst, worst_rank, worst_seed, violations = math.inf, math.inf, None, 0
    examples = []
    for _, ts, margins, inputs in rows:
        vals = [margins[k] for k in keys]
        m = math.nan if any(math.isnan(v) for v in vals) else min(vals)
        if _violates(margins, keys, tolerances, slack):
            violations += 1
            if inputs is not None and len(examples) < MAX_COUNTEREXAMPLES:
                examples.append({"seed": ts, "margins": dict(margins), "inputs": inputs})
        rank = -math.inf if math.isnan(m) else m
        if worst_seed is None or rank < worst_rank:
            worst, worst_rank, worst_seed = m, rank, ts
    return InequalityReport(
        label, len(rows), violations, worst, worst_seed or 0, params, asserted, (), tuple(examples)
    )


def run_suite(
    name: str,
    trials: int | None = None,
    seed: int = 0,
    d_range=DEFAULT_D_RANGE,
    workers: int = 1,
    slack: float = SLACK,
) -> InequalityReport:
    """Run suite ``name`` and fold its trials into a report."""
    if name not in SUITES:
        raise InputError(f"unknown suite {name!r}")
    spec = SUITES[name]
    trials = spec.default_trials if trials is None else int(trials)
    if trials < 1:
        raise InputError("trials must be >= 1")
    if workers < 1:
        raise InputError("workers must be >= 1")
    lo, hi = (int(v) for v in d_range)
    if not 1 <= lo <= hi:
        raise InputError(f"invalid dimension range {d_range}")
    d_range = (lo, hi)
    indices = list(range(trials))
    if workers == 1:
        rows = _run_chunk(name, seed, indices, d_range, slack)
    else:
        chunks = [indices[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, name, seed, c, d_range, slack) for c in chunks if c]
            rows = sorted((row for f in futures for row in f.result()), key=lambda row: row[0])
    params = {"seed": int(seed), "d_range": list(d_range), "slack": slack, **spec.params}
    if spec.tolerances:
        params["tolerances"] = dict(spec.tolerances)
    keys = sorted({k for row in rows for k in row[2]})
    parts = ()
    if len(keys) > 1:
        parts = tuple(
            _fold(f"{name}/{k}", rows, (k,), spec.tolerances, slack, k in spec.asserted, {})
            for k in keys
        )
    top = _fold(name, rows, spec.asserted, spec.tolerances, slack, True, params)
    return InequalityReport(
        top.suite_name, top.trials, top.violations, top.worst_margin, top.worst_seed,
        top.params, True, parts, top.counterexamples,
    )


# --------------------------------------------------------------------------
# public entry points


def check_lemma_logmajor(trials=1000, d_range=DEFAULT_D_RANGE, seed=0, workers=1) -> InequalityReport:
    """``λ(A #_s B)`` weakly log-majorized by ``λ(A^{1-s} B^s)``."""
    return run_suite("logmajor", trials, seed, d_range, workers)


def check_lemma_norm_power(trials=1000, d_range=DEFAULT_D_RANGE, seed=0, workers=1) -> InequalityReport:
    """Ky Fan comparison of ``B^t A^t B^t`` against ``(BAB)^t``."""
    return run_suite("norm-power", trials, seed, d_range, workers)


def check_lemma_vector_power(trials=1000, d_range=DEFAULT_D_RANGE, seed=0, workers=1) -> InequalityReport:
    """Entrywise powers ``t >= 1`` preserve weak majorization."""
    return run_suite("vector-power", trials, seed, d_range, workers)


def check_lemma_trace_convex(trials=1000, d_range=DEFAULT_D_RANGE, seed=0, workers=1) -> InequalityReport:
    """``A <= B`` implies ``Tr f(A) <= Tr f(B)`` for the tested ``f``."""
    return run_suite("trace-convex", trials, seed, d_range, workers)


def check_lemma_holder(trials=1000, d_range=DEFAULT_D_RANGE, seed=0, workers=1) -> InequalityReport:
    """Matrix Hölder inequality for PSD pairs."""
    return run_suite("holder", trials, seed, d_range, workers)


def check_core_lemma(trials=1000, d_range=DEFAULT_D_RANGE, seed=0, workers=1) -> InequalityReport:
    """``Tr[(A #_λ B)^t] <= Tr[A^{t(1-λ)} B^{tλ}]``, plus a reported singular part."""
    return run_suite("core-lemma", trials, seed, d_range, workers)


def check_geomean_properties(trials=1000, d_range=DEFAULT_D_RANGE, seed=0, workers=1) -> list:
    """One report per geometric-mean property, in order (a) to (h)."""
    return [
        run_suite(f"geomean-props/{name}", trials, seed, d_range, workers)
        for name, _, _ in GEOMEAN_PROPERTIES
    ]


def check_proof_chain(trials=500, seed=0, workers=1) -> InequalityReport:
    """Every step of the convexity argument for ``f(t)``, one part per step."""
    return run_suite("proof-chain", trials, seed, DEFAULT_D_RANGE, workers)


def check_concavity_theorem(trials=1000, seed=0, workers=1) -> InequalityReport:
    """Midpoint concavity of ``E0`` in ``s`` on random channels."""
    return run_suite("concavity", trials, seed, DEFAULT_D_RANGE, workers)


SELECTORS = (
    "logmajor", "norm-power", "vector-power", "trace-convex", "holder",
    "core-lemma", "geomean-props", "proof-chain", "concavity",
)


def suites_for(selector: str) -> list:
    """Registry names covered by a command-line selector."""
    if selector == "all":
        return [n for sel in SELECTORS for n in suites_for(sel)]
    if selector == "geomean-props":
        return [f"geomean-props/{name}" for name, _, _ in GEOMEAN_PROPERTIES]
    if selector in SUITES:
        return [selector]
    raise InputError(f"unknown suite selector {selector!r}")
