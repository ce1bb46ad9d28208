"""Document schemas of the command line: radial functions, transforms, matrices.

Radial-function documents are flat JSON objects with a fixed key order and
floats printed to 17 significant digits, so a parse/serialize round trip of
a canonical document is byte identical.  Complex numbers travel as
``[re, im]`` pairs in JSON and as ``re+imi`` in CSV cells.
"""

from __future__ import annotations

import json

import numpy as np

from .field import FieldParams, KRadialFunction
from .laplace import TransformSequence
from .operators import OperatorMatrix

__all__ = [
    "SchemaError",
    "dump_radial",
    "load_radial",
    "dump_transform",
    "load_transform",
    "matrix_csv",
    "matrix_json",
]


class SchemaError(ValueError):
    """A document does not match its schema; the message names the field."""


def _fmt(x: float) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0  # canonicalize the sign of zero
    return format(x, ".17g")


def _pair(z: complex) -> str:
    return f"[{_fmt(z.real)}, {_fmt(z.imag)}]"


def _cell(z: complex) -> str:
    sign = "+" if z.imag >= 0 else "-"
    return f"{_fmt(z.real)}{sign}{_fmt(abs(z.imag))}i"


def dump_radial(u: KRadialFunction) -> str:
    values = ", ".join(_pair(complex(v)) for v in u.values)
    return (
        "{"
        f'"q": {u.params.q}, '
        f'"alpha": {_fmt(u.params.alpha)}, '
        f'"n_lo": {u.n_lo}, '
        f'"n_hi": {u.n_hi}, '
        f'"values": [{values}], '
        f'"inner_tail": {_pair(u.inner_tail)}'
        "}\n"
    )


def _field(doc: dict, name: str, kinds) -> object:
    if name not in doc:
        raise SchemaError(f"missing field {name!r}")
    val = doc[name]
    if not isinstance(val, kinds) or isinstance(val, bool):
        raise SchemaError(f"field {name!r} has the wrong type")
    return val


def _complex_pair(raw, name: str) -> complex:
    if (
        not isinstance(raw, list)
        or len(raw) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in raw)
    ):
        raise SchemaError(f"field {name!r} must be a [re, im] pair")
    return complex(raw[0], raw[1])


def _parse_common(text: str, want_tail: bool):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("document must be a JSON object")
    q = _field(doc, "q", int)
    alpha = _field(doc, "alpha", (int, float))
    n_lo = _field(doc, "n_lo", int)
    n_hi = _field(doc, "n_hi", int)
    raw_values = _field(doc, "values", list)
    values = np.array(
        [_complex_pair(v, f"values[{i}]") for i, v in enumerate(raw_values)], dtype=complex
    )
    if values.size != n_hi - n_lo + 1:
        raise SchemaError(
            f"field 'values' has length {values.size}, window [{n_lo}, {n_hi}] needs {n_hi - n_lo + 1}"
        )
    try:
        params = FieldParams(q, float(alpha))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    tail = 0j
    if want_tail:
        tail = _complex_pair(_field(doc, "inner_tail", list), "inner_tail")
    return params, n_lo, n_hi, values, tail


def load_radial(text: str) -> KRadialFunction:
    params, n_lo, n_hi, values, tail = _parse_common(text, want_tail=True)
    try:
        return KRadialFunction(params, n_lo, n_hi, values, tail)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def dump_transform(t: TransformSequence) -> str:
    values = ", ".join(_pair(complex(v)) for v in t.values)
    return (
        "{"
        f'"q": {t.params.q}, '
        f'"alpha": {_fmt(t.params.alpha)}, '
        f'"n_lo": {t.n_lo}, '
        f'"n_hi": {t.n_hi}, '
        f'"values": [{values}]'
        "}\n"
    )


def load_transform(text: str) -> TransformSequence:
    params, n_lo, n_hi, values, _ = _parse_common(text, want_tail=False)
    try:
        return TransformSequence(params, n_lo, n_hi, values)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def matrix_csv(mat: OperatorMatrix) -> str:
    r"""Rows by basis index j ascending; corner cell labels rows\columns."""
    lines = ["j\\n," + ",".join(str(n) for n in range(mat.dim))]
    for j in range(mat.dim):
        lines.append(f"{j}," + ",".join(_cell(complex(z)) for z in mat.entries[j]))
    return "\n".join(lines) + "\n"


def matrix_json(mat: OperatorMatrix) -> str:
    rows = []
    for j in range(mat.dim):
        rows.append("[" + ", ".join(_pair(complex(z)) for z in mat.entries[j]) + "]")
    body = ", ".join(rows)
    return (
        "{"
        f'"q": {mat.params.q}, '
        f'"name": "{mat.name}", '
        f'"basis": "{mat.basis}", '
        f'"dim": {mat.dim}, '
        f'"entries": [{body}]'
        "}\n"
    )
