"""Command-line front end.

Subcommands::

    cqexp e0 CHANNEL [--dist P] [--s-grid a:b:step]
    cqexp exponents CHANNEL [--r-grid a:b:step] [--s-max S]
    cqexp geomean A_FILE B_FILE S
    cqexp verify [SELECTOR] [--trials N]

Exit status is 0 on success, 1 when a verification suite records a
violation, 2 on bad input or usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import matops
from .channel import ProbabilityDistribution, e0_derivatives, e0_derivatives_forward, e0_quantum
from .errors import CQExpError, InputError
from .exponents import E0Profile, OptimizerConfig, random_coding_exponent, sphere_packing_exponent
from .fileio import read_channel, read_matrix
from .geomean import weighted_geomean, weighted_geomean_limit
from .verifier import SELECTORS, reports_to_json, run_suite, suites_for

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
DERIV_STEP = 1e-4
SEED_ENV = "CQEXP_SEED"


def parse_grid(text: str) -> list[float]:
    """``a:b:step`` to the inclusive grid ``a, a + step, ..., <= b``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"grid {text!r} is not of the form a:b:step")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError:
        raise InputError(f"grid {text!r} has a non-numeric field") from None
    if not all(math.isfinite(v) for v in (a, b, step)):
        raise InputError(f"grid {text!r} has a non-finite field")
    if not step > 0:
        raise InputError(f"grid step must be positive, got {step}")
    if b < a:
        raise InputError(f"grid {text!r} is empty (end below start)")
    n = int(math.floor((b - a) / step + 1e-9))
    return [round(a + k * step, 12) for k in range(n + 1)]


def parse_seed(text) -> int:
    try:
        seed = int(text)
    except (TypeError, ValueError):
        raise InputError(f"seed {text!r} is not an integer") from None
    if not 0 <= seed < 2**64:
        raise InputError(f"seed {seed} is outside the 64-bit unsigned range")
    return seed


def parse_dist(text: str) -> ProbabilityDistribution:
    try:
        w = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"distribution {text!r} is not a comma-separated list of numbers") from None
    return ProbabilityDistribution(np.array(w))


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return parse_seed(args.seed)
    env = os.environ.get(SEED_ENV)
    return parse_seed(env) if env not in (None, "") else 0


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(header, rows, fmt: str) -> str:
    if fmt == "json":
        recs = [{k: (_fmt(v) if isinstance(v, float) and not math.isfinite(v) else v) for k, v in zip(header, r)}
                for r in rows]
        return json.dumps(recs, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


# --------------------------------------------------------------------------
# subcommands


def cmd_e0(args) -> int:
    W, file_dist = read_channel(args.channel)
    if args.dist is not None:
        P = parse_dist(args.dist)
    else:
        P = file_dist or ProbabilityDistribution.uniform(W.alphabet_size)
    if len(P) != W.alphabet_size:
        raise InputError(f"distribution has {len(P)} entries, channel has {W.alphabet_size} inputs")
    rows = []
    for s in parse_grid(args.s_grid):
        if s < 0:
            raise InputError(f"s must be nonnegative, got {s}")
        if s >= DERIV_STEP:
            d1, d2 = e0_derivatives(W, P, s, DERIV_STEP)
        else:
            d1, d2 = e0_derivatives_forward(W, P, s, DERIV_STEP)
        rows.append((s, e0_quantum(W, P, s), d1, d2))
    _emit(_table(("s", "E0_bits", "dE0_ds", "d2E0_ds2"), rows, args.format), args.out)
    return EXIT_OK


def _exponent_rows(W, rates, s_max, opt):
    profile = E0Profile(W, opt)
    rows = []
    for R in rates:
        er = random_coding_exponent(W, R, opt, profile)
        sp = sphere_packing_exponent(W, R, s_max, opt, profile)
        if not (er.converged and sp.converged):
            print(f"cqexp: warning: input optimisation did not converge at R={R}", file=sys.stderr)
        rows.append((R, er.value, er.arg_s, sp.value, sp.arg_s, sp.s_cap_hit))
    return rows


def cmd_exponents(args) -> int:
    W, _ = read_channel(args.channel)
    rates = parse_grid(args.r_grid)
    if rates[0] < 0:
        raise InputError(f"rates must be nonnegative, got {rates[0]}")
    try:
        s_max = float(args.s_max)
    except ValueError:
        raise InputError(f"--s-max must be a number, got {args.s_max!r}") from None
    if not s_max > 0 or not math.isfinite(s_max):
        raise InputError(f"--s-max must be positive and finite, got {args.s_max}")
    opt = OptimizerConfig(seed=_resolve_seed(args))
    workers = min(args.workers, len(rates))
    if workers <= 1:
        rows = _exponent_rows(W, rates, s_max, opt)
    else:
        # Every point is a deterministic function of (W, R, opt), so the
        # split changes nothing but wall time.
        chunks = [rates[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_exponent_rows, [W] * workers, chunks, [s_max] * workers, [opt] * workers))
        by_rate = {row[0]: row for part in parts for row in part}
        rows = [by_rate[R] for R in rates]
    header = ("R", "Er_bits", "Er_arg_s", "Esp_bits_or_inf", "Esp_arg_s", "s_cap_hit")
    _emit(_table(header, rows, args.format), args.out)
    return EXIT_OK


def _matrix_text(M: np.ndarray) -> str:
    real = np.allclose(M.imag, 0.0, rtol=0.0, atol=matops.HERM_TOL * max(1.0, float(np.abs(M).max())))

    def cell(z):
        if real:
            return f"{z.real:.15g}"
        return f"{z.real:.15g}{z.imag:+.15g}j"

    return "\n".join(" ".join(cell(z) for z in row) for row in M) + "\n"


def cmd_geomean(args) -> int:
    A = read_matrix(args.a_file)
    B = read_matrix(args.b_file)
    try:
        s = float(args.s)
    except ValueError:
        raise InputError(f"s must be a real number, got {args.s!r}") from None
    if not math.isfinite(s):
        raise InputError(f"s must be finite, got {s}")
    if A.shape != B.shape:
        raise InputError(f"dimension mismatch {A.shape} vs {B.shape}")
    for name, path, M in (("A", args.a_file, A), ("B", args.b_file, B)):
        try:
            matops.as_psd(M)
        except InputError as exc:
            raise InputError(f"{path}: {name} is invalid: {exc}") from None
    A = matops.as_psd(A)
    B = matops.as_psd(B)
    pd = matops.is_positive_definite(A) and (0.0 <= s <= 1.0 or matops.is_positive_definite(B))
    if pd:
        G = weighted_geomean(A, B, s)
    elif 0.0 <= s <= 1.0:
        G = weighted_geomean_limit(A, B, s)
    else:
        raise InputError("singular input needs s in [0, 1] (the limit extension)")
    w = matops.eigvals(G)
    if args.format == "json":
        doc = {
            "s": s,
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in G],
            "eigenvalues": [float(x) for x in w],
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        text = _matrix_text(G) + "eigenvalues: " + " ".join(f"{x:.15g}" for x in w) + "\n"
        _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = suites_for(args.selector)
    if args.trials is not None and args.trials < 1:
        raise InputError(f"--trials must be >= 1, got {args.trials}")
    try:
        slack = float(args.tol_slack)
    except ValueError:
        raise InputError(f"--tol-slack must be a number, got {args.tol_slack!r}") from None
    if not (slack >= 0 and math.isfinite(slack)):
        raise InputError(f"--tol-slack must be nonnegative and finite, got {args.tol_slack}")
    d_range = parse_d_range(args.d_range)
    seed = _resolve_seed(args)
    reports = [run_suite(n, args.trials, seed, d_range, args.workers, slack) for n in names]
    if args.format == "csv":
        rows = [(r.suite_name, r.trials, r.violations, r.worst_margin, r.worst_seed) for r in reports]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("suite", "trials", "violations", "worst_margin", "worst_seed"))
        for name, n, v, m, ws in rows:
            w.writerow((name, n, v, _fmt(m), ws))
        _emit(buf.getvalue(), args.out)
    else:
        _emit(reports_to_json(reports), args.out)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(
            f"{status} {r.suite_name}: trials={r.trials} violations={r.violations} "
            f"worst_margin={r.worst_margin:.3e} worst_seed={r.worst_seed}",
            file=sys.stderr,
        )
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATION


def parse_d_range(text: str) -> tuple[int, int]:
    parts = text.split(":")
    try:
        lo, hi = (int(p) for p in parts) if len(parts) == 2 else (int(parts[0]),) * 2
    except ValueError:
        raise InputError(f"dimension range {text!r} is not of the form lo:hi") from None
    if not 1 <= lo <= hi:
        raise InputError(f"invalid dimension range {text!r}")
    return lo, hi


# --------------------------------------------------------------------------
# argument parsing


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", help=f"64-bit seed (default: ${SEED_ENV}, else 0)")
    common.add_argument("--workers", type=_positive_int, default=1, help="worker processes (default 1)")
    common.add_argument("--out", help="write output to FILE instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default=None, help="output format")

    parser = argparse.ArgumentParser(prog="cqexp", description="E0 and error exponents of c-q channels.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("e0", parents=[common], help="E0(s, P) curve with derivatives")
    p.add_argument("channel", help="channel JSON file")
    p.add_argument("--dist", help="input distribution p1,p2,... (default: file's, else uniform)")
    p.add_argument("--s-grid", default="0:8:0.5", help="a:b:step (default 0:8:0.5)")
    p.set_defaults(func=cmd_e0, default_format="csv")

    p = sub.add_parser("exponents", parents=[common], help="random-coding and sphere-packing exponents")
    p.add_argument("channel", help="channel JSON file")
    p.add_argument("--r-grid", default="0:1:0.1", help="a:b:step in bits (default 0:1:0.1)")
    p.add_argument("--s-max", default="64", help="cap on s for the sphere-packing search (default 64)")
    p.set_defaults(func=cmd_exponents, default_format="csv")

    p = sub.add_parser("geomean", parents=[common], help="weighted geometric mean A #_s B")
    p.add_argument("a_file", help="matrix file for A")
    p.add_argument("b_file", help="matrix file for B")
    p.add_argument("s", help="weight s")
    p.set_defaults(func=cmd_geomean, default_format="csv")

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("selector", nargs="?", default="all", help=f"all or one of: {', '.join(SELECTORS)}")
    p.add_argument("--trials", type=int, default=None, help="trials per suite (default: suite default)")
    p.add_argument("--tol-slack", default=str(matops.SLACK), help="relative slack (default 1e-9)")
    p.add_argument("--d-range", default="2:6", help="matrix dimension range lo:hi (default 2:6)")
    p.set_defaults(func=cmd_verify, default_format="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except CQExpError as exc:
        print(f"cqexp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cqexp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
