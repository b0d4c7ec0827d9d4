"""Text and JSON formats for complexes, fields, functions and reports.

Complex text, one record per line, ordered by id::

    # comment
    V 0 v0
    C 0 0
    C 1 13 : +1 -0

Field text: ``P <tail> <head>``; function text: ``F <cell> <p/q>``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .cellcomplex import Complex
from .errors import ParseError
from .morse import GradientField, MorseFunction


def _records(text: str):
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line.split()


def _int(tok: str, n: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected {what}, got {tok!r}", line=n) from None


def _simplicial_structure(dims, facets):
    """Vertex sets when the facets are those of simplices with standard signs, else None."""
    verts: dict[int, frozenset] = {}
    for c in sorted(dims, key=lambda c: (dims[c], c)):
        d = dims[c]
        if d == 0:
            if facets[c]:
                return None
            verts[c] = frozenset([c])
            continue
        fs = facets[c]
        if len(fs) != d + 1 or any(f not in verts for f, _ in fs):
            return None
        vs = frozenset().union(*(verts[f] for f, _ in fs))
        if len(vs) != d + 1:
            return None
        order = sorted(vs)
        expected = {}
        for i in range(d + 1):
            expected[frozenset(order[:i] + order[i + 1:])] = -1 if i % 2 else 1
        got = {verts[f]: s for f, s in fs}
        if got != expected:
            return None
        verts[c] = vs
    if len(set(verts.values())) != len(verts):
        return None
    return verts


def _make_complex(dims, facets, labels) -> Complex:
    verts = _simplicial_structure(dims, facets)
    return Complex(dims, facets, verts, labels)


def parse_complex(text: str) -> Complex:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return complex_from_json(json.loads(stripped))
    dims: dict[int, int] = {}
    facets: dict[int, tuple] = {}
    labels: dict[int, str] = {}
    for n, tok in _records(text):
        kind = tok[0]
        if kind == "V":
            if len(tok) < 3:
                raise ParseError("label record needs an id and a name", line=n)
            labels[_int(tok[1], n, "cell id")] = " ".join(tok[2:])
        elif kind == "C":
            if len(tok) < 3:
                raise ParseError("cell record needs a dimension and an id", line=n)
            d = _int(tok[1], n, "dimension")
            cid = _int(tok[2], n, "cell id")
            if d < 0:
                raise ParseError(f"negative dimension {d}", line=n)
            if cid in dims:
                raise ParseError(f"cell {cid} defined twice", line=n)
            rest = tok[3:]
            if rest and rest[0] != ":":
                raise ParseError("expected ':' before the facet list", line=n)
            row = []
            for t in rest[1:]:
                sign = -1 if t.startswith("-") else 1
                row.append((_int(t.lstrip("+-"), n, "facet id"), sign))
            if d == 0 and row:
                raise ParseError("a vertex has no facets", line=n)
            if d > 0 and not row:
                raise ParseError(f"cell {cid} of dimension {d} has no facets", line=n)
            dims[cid] = d
            facets[cid] = tuple(row)
        else:
            raise ParseError(f"unknown record type {kind!r}", line=n)
    return _make_complex(dims, facets, labels)


def emit_complex(X: Complex) -> str:
    out = []
    for c in sorted(X.labels):
        if c in set(X.cells()):
            out.append(f"V {c} {X.labels[c]}")
    for c in sorted(X.cells()):
        d = X.dim(c)
        if d == 0:
            out.append(f"C 0 {c}")
        else:
            fs = " ".join(f"{'+' if s > 0 else '-'}{f}" for f, s in X.signed_facets(c))
            out.append(f"C {d} {c} : {fs}")
    return "\n".join(out) + "\n"


def complex_to_json(X: Complex) -> dict:
    return {
        "cells": [
            {"dim": X.dim(c), "id": c, "facets": [[f, s] for f, s in X.signed_facets(c)]}
            for c in sorted(X.cells())
        ],
        "labels": {str(c): X.labels[c] for c in sorted(X.labels) if c in set(X.cells())},
    }


def complex_from_json(data: dict) -> Complex:
    try:
        dims = {int(r["id"]): int(r["dim"]) for r in data["cells"]}
        facets = {int(r["id"]): tuple((int(f), int(s)) for f, s in r.get("facets", [])) for r in data["cells"]}
        labels = {int(k): v for k, v in data.get("labels", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed complex JSON: {exc}") from None
    if len(dims) != len(data["cells"]):
        raise ParseError("a cell id is defined twice")
    return _make_complex(dims, facets, labels)


def parse_field(text: str) -> GradientField:
    pairs = []
    seen: dict[int, int] = {}
    for n, tok in _records(text):
        if tok[0] != "P" or len(tok) != 3:
            raise ParseError("expected 'P <tail> <head>'", line=n)
        s = _int(tok[1], n, "cell id")
        t = _int(tok[2], n, "cell id")
        for c in (s, t):
            if c in seen:
                raise ParseError(f"cell {c} already paired on line {seen[c]}", line=n)
            seen[c] = n
        pairs.append((s, t))
    return GradientField(frozenset(pairs))


def emit_field(V: GradientField) -> str:
    return "".join(f"P {s} {t}\n" for s, t in sorted(V.pairs))


def parse_function(text: str) -> MorseFunction:
    vals: dict[int, Fraction] = {}
    for n, tok in _records(text):
        if tok[0] != "F" or len(tok) != 3:
            raise ParseError("expected 'F <cell> <value>'", line=n)
        c = _int(tok[1], n, "cell id")
        if c in vals:
            raise ParseError(f"cell {c} has two values", line=n)
        try:
            vals[c] = Fraction(tok[2])
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad rational {tok[2]!r}", line=n) from None
    return MorseFunction(vals)


def emit_function(f: MorseFunction) -> str:
    return "".join(f"F {c} {v}\n" for c, v in sorted(f.values.items()))


def emit_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def parse_report(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed report: {exc.msg}", line=exc.lineno) from None


def read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def write_text(path, text: str) -> None:
    Path(path).write_text(text)
