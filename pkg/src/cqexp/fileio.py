"""Channel and matrix files.

Channel files are JSON::

    {"dim": d,
     "states": [[[re, im], ...d*d pairs, row-major...], ...],
     "dist": [p1, ...]}                      # optional

A state may also be given as ``d`` rows of ``d`` entries, and an entry may be
a bare real number instead of a ``[re, im]`` pair.  Instead of ``states`` a
file may carry ``"classical": {"rows": [[...], ...]}``, a stochastic matrix
that is embedded diagonally.

Matrix files hold one square matrix, either as JSON (nested rows, or a flat
list whose length is a perfect square) or as whitespace-separated text rows
whose entries are real or Python complex literals such as ``1+2j``.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .channel import ClassicalChannel, CQChannel, ProbabilityDistribution, embed_classical
from .errors import InputError


class FormatError(InputError):
    """Malformed input file; ``where`` names the line or field at fault."""

    def __init__(self, source: str, where: str, message: str):
        super().__init__(f"{source}: {where}: {message}")
        self.source = source
        self.where = where


def _real(value, source, where) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(source, where, f"expected a number, got {json.dumps(value)}")
    x = float(value)
    if not math.isfinite(x):
        raise FormatError(source, where, "entry is not finite")
    return x


def _entry(value, source, where) -> complex:
    if isinstance(value, list):
        if len(value) != 2:
            raise FormatError(source, where, f"expected [re, im], got {len(value)} numbers")
        return complex(_real(value[0], source, f"{where}[0]"), _real(value[1], source, f"{where}[1]"))
    return complex(_real(value, source, where), 0.0)


def _is_nested(value, d) -> bool:
    # Flat lists have d*d items and nested ones d rows; for d == 1 a row [x]
    # has length 1 while a [re, im] pair has length 2.
    if d == 1:
        return isinstance(value[0], list) and len(value[0]) == 1
    return len(value) == d


def _state(value, d, source, where) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise FormatError(source, where, "expected a non-empty list of matrix entries")
    M = np.empty((d, d), dtype=complex)
    if _is_nested(value, d):
        for i, row in enumerate(value):
            if not isinstance(row, list) or len(row) != d:
                raise FormatError(source, f"{where}[{i}]", f"expected a row of {d} entries")
            for j, v in enumerate(row):
                M[i, j] = _entry(v, source, f"{where}[{i}][{j}]")
        return M
    if len(value) != d * d:
        raise FormatError(source, where, f"expected {d * d} entries for dim {d}, got {len(value)}")
    for k, v in enumerate(value):
        M[k // d, k % d] = _entry(v, source, f"{where}[{k}]")
    return M


def _load_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(source, f"line {exc.lineno} column {exc.colno}", exc.msg) from None


def _read_text(path) -> tuple[str, str]:
    source = str(path)
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read(), source
    except OSError as exc:
        raise InputError(f"{source}: cannot read file: {exc.strerror}") from None


def parse_channel(text: str, source: str = "<channel>") -> tuple[CQChannel, ProbabilityDistribution | None]:
    """Parse channel JSON into the channel and its optional distribution."""
    doc = _load_json(text, source)
    if not isinstance(doc, dict):
        raise FormatError(source, "top level", "expected a JSON object")
    unknown = sorted(set(doc) - {"dim", "states", "dist", "classical"})
    if unknown:
        raise FormatError(source, unknown[0], "unknown field")
    if ("states" in doc) == ("classical" in doc):
        raise FormatError(source, "states", "give exactly one of 'states' and 'classical'")
    if "classical" in doc:
        cl = doc["classical"]
        if not isinstance(cl, dict) or not isinstance(cl.get("rows"), list):
            raise FormatError(source, "classical", "expected {\"rows\": [[...], ...]}")
        rows = cl["rows"]
        for i, row in enumerate(rows):
            if not isinstance(row, list):
                raise FormatError(source, f"classical.rows[{i}]", "expected a list of probabilities")
            for j, v in enumerate(row):
                _real(v, source, f"classical.rows[{i}][{j}]")
        try:
            W = embed_classical(ClassicalChannel(np.array(rows, dtype=float)))
        except (InputError, ValueError) as exc:
            raise FormatError(source, "classical.rows", str(exc)) from None
        if "dim" in doc and doc["dim"] != W.dim:
            raise FormatError(source, "dim", f"is {doc['dim']} but classical rows have {W.dim} outputs")
    else:
        d = doc.get("dim")
        if isinstance(d, bool) or not isinstance(d, int) or d < 1:
            raise FormatError(source, "dim", "expected a positive integer")
        states = doc["states"]
        if not isinstance(states, list) or not states:
            raise FormatError(source, "states", "expected a non-empty list of states")
        mats = [_state(v, d, source, f"states[{x}]") for x, v in enumerate(states)]
        try:
            W = CQChannel(tuple(mats))
        except InputError as exc:
            raise FormatError(source, "states", str(exc)) from None
    P = None
    if "dist" in doc:
        dist = doc["dist"]
        if not isinstance(dist, list):
            raise FormatError(source, "dist", "expected a list of probabilities")
        w = [_real(v, source, f"dist[{k}]") for k, v in enumerate(dist)]
        if len(w) != W.alphabet_size:
            raise FormatError(source, "dist", f"has {len(w)} entries, channel has {W.alphabet_size} inputs")
        try:
            P = ProbabilityDistribution(np.array(w))
        except InputError as exc:
            raise FormatError(source, "dist", str(exc)) from None
    return W, P


def read_channel(path) -> tuple[CQChannel, ProbabilityDistribution | None]:
    text, source = _read_text(path)
    return parse_channel(text, source)


def format_channel(W: CQChannel, P: ProbabilityDistribution | None = None) -> str:
    """Canonical form: flat ``[re, im]`` pairs, shortest round-trip floats."""
    doc = {
        "dim": W.dim,
        "states": [[[float(z.real), float(z.imag)] for z in M.ravel()] for M in W.outputs],
    }
    if P is not None:
        doc["dist"] = [float(p) for p in P.weights]
    return json.dumps(doc, separators=(",", ":")) + "\n"


def write_channel(path, W: CQChannel, P: ProbabilityDistribution | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_channel(W, P))


def _square(entries: list, source: str) -> np.ndarray:
    n = len(entries)
    d = math.isqrt(n)
    if n == 0 or d * d != n:
        raise FormatError(source, "matrix", f"{n} entries do not form a square matrix")
    return np.array(entries, dtype=complex).reshape(d, d)


def parse_matrix(text: str, source: str = "<matrix>") -> np.ndarray:
    """Square complex matrix from JSON or whitespace-separated rows."""
    stripped = text.strip()
    if not stripped:
        raise FormatError(source, "line 1", "empty matrix file")
    if stripped[0] in "[{":
        doc = _load_json(text, source)
        if isinstance(doc, dict):
            if "matrix" not in doc:
                raise FormatError(source, "matrix", "missing field")
            doc = doc["matrix"]
        if not isinstance(doc, list) or not doc:
            raise FormatError(source, "matrix", "expected a non-empty list")
        if all(isinstance(r, list) and len(r) == len(doc) for r in doc):
            return _state(doc, len(doc), source, "matrix")
        return _square([_entry(v, source, f"matrix[{k}]") for k, v in enumerate(doc)], source)
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        row = []
        for col, tok in enumerate(line.replace(",", " ").split(), start=1):
            try:
                z = complex(tok)
            except ValueError:
                raise FormatError(source, f"line {lineno} column {col}", f"cannot parse {tok!r}") from None
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise FormatError(source, f"line {lineno} column {col}", "entry is not finite")
            row.append(z)
        rows.append((lineno, row))
    d = len(rows)
    if d == 1 and len(rows[0][1]) > 1:
        return _square(rows[0][1], source)
    for lineno, row in rows:
        if len(row) != d:
            raise FormatError(source, f"line {lineno}", f"expected {d} entries, got {len(row)}")
    return np.array([row for _, row in rows], dtype=complex)


def read_matrix(path) -> np.ndarray:
    text, source = _read_text(path)
    return parse_matrix(text, source)
