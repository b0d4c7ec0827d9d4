"""Command line front end: ``morsesum <command> ...``."""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import io
from .cellcomplex import Complex, check_closed_3manifold
from .errors import InvalidField, MorseSumError, NotPerfect
from .fixtures import fixture, perfect_field_search, sphere13
from .grouping import group_critical_cells
from .homology import betti
from .morse import (
    GradientField,
    ascending_paths_into,
    critical_cells,
    descending_paths,
    field_from_function,
    is_perfect,
    validate_acyclic,
    validate_morse_function,
)
from .separation import build_separating_sphere
from .splitting import regions_from_surface, split_and_extend

EXIT_OTHER = 6


def _load_complex(path) -> Complex:
    return io.parse_complex(io.read_text(path))


def _load_field(path, X: Complex) -> GradientField:
    """A field file, or a function file turned into its gradient field."""
    text = io.read_text(path)
    first = next((ln.split() for ln in text.splitlines() if ln.split("#", 1)[0].strip()), ["P"])
    if first[0] == "F":
        return field_from_function(io.parse_function(text), X)
    V = io.parse_field(text)
    V.check(X)
    return V


def _side(arg: str | None):
    if not arg:
        return None
    try:
        return [int(t) for t in arg.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--side expects comma-separated cell ids, got {arg!r}")


def _emit(args, data: dict, text: str | None = None) -> None:
    if args.json or text is None:
        sys.stdout.write(io.emit_report(data))
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _require_perfect(V: GradientField, X: Complex) -> None:
    b = betti(X)
    counts = critical_cells(V, X).counts(X.dimension)
    if not is_perfect(V, X, b):
        raise NotPerfect(
            f"field is not perfect: critical counts {list(counts)} vs Betti numbers {list(b.b)}",
            critical=list(counts), betti=list(b.b),
        )


# ----------------------------------------------------------------------
# commands


def cmd_homology(args) -> int:
    X = _load_complex(args.complex)
    b = betti(X)
    sys.stdout.write(io.emit_report(b.as_dict()))
    return 0


def cmd_validate(args) -> int:
    X = _load_complex(args.complex)
    out: dict = {"counts": list(X.counts())}
    if X.dimension == 3 and X.is_simplicial:
        rep = check_closed_3manifold(X)
        out["closed_3_manifold"] = rep.ok
        out["offenders"] = {k: v[:10] for k, v in rep.offenders.items() if v}
    if args.field:
        text = io.read_text(args.field)
        first = next((ln.split() for ln in text.splitlines() if ln.split("#", 1)[0].strip()), ["P"])
        if first[0] == "F":
            f = io.parse_function(text)
            rep = validate_morse_function(f, X)
            out["morse_function"] = rep.ok
            out["violations"] = [list(map(str, v)) for v in rep.violations[:10]]
            if not rep.ok:
                _emit(args, out)
                return 3
            V = field_from_function(f, X)
        else:
            V = io.parse_field(text)
            V.check(X)
        ok, cyc = validate_acyclic(V, X)
        out["acyclic"] = ok
        out["cycle"] = cyc
        if not ok:
            _emit(args, out)
            return 3
        out["critical"] = list(critical_cells(V, X).counts(X.dimension))
    _emit(args, out, "\n".join(f"{k}: {v}" for k, v in out.items()))
    return 0


def cmd_critical(args) -> int:
    X = _load_complex(args.complex)
    V = _load_field(args.field, X)
    crit = critical_cells(V, X)
    data = {
        "counts": list(crit.counts(X.dimension)),
        "cells": {str(k): sorted(crit[k]) for k in range(X.dimension + 1)},
        "perfect": is_perfect(V, X),
    }
    text = "\n".join(f"dim {k}: {sorted(crit[k])}" for k in range(X.dimension + 1))
    _emit(args, data, text)
    return 0


def cmd_trace(args) -> int:
    X = _load_complex(args.complex)
    V = _load_field(args.field, X)
    if args.direction == "desc":
        paths = descending_paths(V, args.cell, X)
    else:
        paths = ascending_paths_into(V, args.cell, X)
    seqs = sorted(list(p.sequence) for p in paths)
    data = {"cell": args.cell, "direction": args.direction, "count": len(seqs), "paths": seqs[: args.limit]}
    _emit(args, data, "\n".join(" ".join(map(str, s)) for s in seqs[: args.limit]))
    return 0


def cmd_group(args) -> int:
    X = _load_complex(args.complex)
    V = _load_field(args.field, X)
    g = group_critical_cells(V, X, choose=_side(args.side))
    _emit(args, g.as_dict())
    return 0


def _write_separation(out: Path, res) -> None:
    out.mkdir(parents=True, exist_ok=True)
    io.write_text(out / "complex.cx", io.emit_complex(res.complex))
    io.write_text(out / "field.txt", io.emit_field(res.field))
    io.write_text(out / "sphere.cx", io.emit_complex(res.certificate.surface))
    io.write_text(out / "region_A.txt", " ".join(map(str, sorted(res.region_A.cells))) + "\n")
    io.write_text(out / "region_B.txt", " ".join(map(str, sorted(res.region_B.cells))) + "\n")


def cmd_separate(args) -> int:
    X = _load_complex(args.complex)
    V = _load_field(args.field, X)
    _require_perfect(V, X)
    g = group_critical_cells(V, X, choose=_side(args.side))
    res = build_separating_sphere(V, g, X, strategy=args.strategy, max_iter=args.max_iter, check=args.check)
    _write_separation(Path(args.out), res)
    data = {"certificate": res.certificate.as_dict(), "grouping": g.as_dict()}
    if args.log:
        data["log"] = res.state.log
    _emit(args, data)
    return 0


def _write_summand(out: Path, name: str, s) -> None:
    io.write_text(out / f"{name}.cx", io.emit_complex(s.manifold))
    io.write_text(out / f"{name}.field", io.emit_field(s.field))
    io.write_text(out / f"{name}.func", io.emit_function(s.function))


def cmd_split(args) -> int:
    X = _load_complex(args.complex)
    V = _load_field(args.field, X)
    S = _load_complex(args.sphere)
    if X.is_simplicial and S.is_simplicial:
        cells = {X.cell_of(S.vertices(c)) for c in S.cells()}
        if None in cells:
            raise InvalidField("sphere file has cells that are not in the complex")
    else:
        cells = set(S.cells())
    A, B = regions_from_surface(X, V, cells)
    M1, M2 = split_and_extend(X, V, A, B, cells)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_summand(out, "M1", M1)
    _write_summand(out, "M2", M2)
    _emit(args, {"M1": M1.as_dict(), "M2": M2.as_dict()})
    return 0


def run_pipeline(X: Complex, V: GradientField, side=None, max_iter=None, strategy="global",
                 check=True, timings=False) -> tuple[dict, dict]:
    """Group, separate and split; returns the report and the produced objects."""
    t0 = time.perf_counter()
    clock = {}
    b = betti(X)
    _require_perfect(V, X)
    g = group_critical_cells(V, X, choose=side)
    clock["group"] = time.perf_counter() - t0
    res = build_separating_sphere(V, g, X, strategy=strategy, max_iter=max_iter, check=check)
    clock["separate"] = time.perf_counter() - t0 - clock["group"]
    M1, M2 = split_and_extend(res.complex, res.field, res.region_A, res.region_B)
    clock["split"] = time.perf_counter() - t0 - clock["group"] - clock["separate"]
    report = {
        "input": {
            "counts": list(X.counts()),
            "betti": list(b.b),
            "critical": list(critical_cells(V, X).counts(X.dimension)),
        },
        "grouping": g.as_dict(),
        "log": res.state.log,
        "certificate": res.certificate.as_dict(),
        "M1": M1.as_dict(),
        "M2": M2.as_dict(),
    }
    if timings:
        report["timings"] = {k: round(v, 3) for k, v in clock.items()}
    return report, {"separation": res, "M1": M1, "M2": M2}


def cmd_pipeline(args) -> int:
    X = _load_complex(args.complex)
    V = _load_field(args.field, X)
    report, objs = run_pipeline(X, V, _side(args.side), args.max_iter, args.strategy,
                                check=not args.no_check, timings=args.timings)
    out = Path(args.out)
    _write_separation(out, objs["separation"])
    _write_summand(out, "M1", objs["M1"])
    _write_summand(out, "M2", objs["M2"])
    io.write_text(out / "report.json", io.emit_report(report))
    shown = dict(report)
    if not args.log:
        shown.pop("log")
    _emit(args, shown)
    return 0


def cmd_fixture(args) -> int:
    if args.name == "sphere13":
        L = sphere13()
    else:
        name = args.name + "".join(f"#{s}" for s in args.sum or [])
        L = fixture(name)
    X = L.complex
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    io.write_text(prefix.with_suffix(".cx"), io.emit_complex(X))
    data = {"name": L.name, "counts": list(X.counts()), "betti": list(L.known_betti.b)}
    V = L.gradient
    if args.field and V is None:
        summands = L if L.meta.get("tags_A") and len(args.sum or []) == 1 else None
        V = perfect_field_search(X, seed=args.seed, summands=summands)
    if args.field:
        io.write_text(prefix.with_suffix(".field"), io.emit_field(V))
        crit = critical_cells(V, X)
        data["critical"] = sorted(crit.all())
        tags_b = set(L.meta.get("tags_B", ()))
        if tags_b:
            data["side_B"] = sorted(
                c for c in crit.all() if L.provenance[c] in tags_b and 0 < X.dim(c) < X.dimension
            )
    _emit(args, data)
    return 0


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="morsesum", description="Split perfect discrete Morse functions on connected sums.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)

    s = sub.add_parser("homology", help="Betti numbers and torsion")
    s.add_argument("complex")
    s.set_defaults(func=cmd_homology)

    s = sub.add_parser("validate", help="check a complex and a field or function")
    s.add_argument("complex")
    s.add_argument("field", nargs="?")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("critical", help="critical cells of a field")
    s.add_argument("complex")
    s.add_argument("field")
    s.set_defaults(func=cmd_critical)

    s = sub.add_parser("trace", help="V-paths from or into a cell")
    s.add_argument("complex")
    s.add_argument("field")
    s.add_argument("--cell", type=int, required=True)
    s.add_argument("--direction", choices=("asc", "desc"), default="desc")
    s.add_argument("--limit", type=int, default=50)
    s.set_defaults(func=cmd_trace)

    s = sub.add_parser("group", help="group critical cells by intersection parity")
    s.add_argument("complex")
    s.add_argument("field")
    s.add_argument("--side", help="comma-separated critical cells whose components form side B")
    s.set_defaults(func=cmd_group)

    def sep_opts(sp):
        sp.add_argument("--side", help="comma-separated critical cells whose components form side B")
        sp.add_argument("--max-iter", type=int, default=None)
        sp.add_argument("--strategy", choices=("global", "local"), default="global")
        sp.add_argument("--log", action="store_true", help="include the repair log")
        sp.add_argument("--out", default="morsesum_out")

    s = sub.add_parser("separate", help="build and certify a separating sphere")
    s.add_argument("complex")
    s.add_argument("field")
    sep_opts(s)
    s.add_argument("--check", action="store_true", help="recompute homology after every repair")
    s.set_defaults(func=cmd_separate)

    s = sub.add_parser("split", help="cap both sides of a separating sphere")
    s.add_argument("complex")
    s.add_argument("field")
    s.add_argument("sphere")
    s.add_argument("--out", default="morsesum_out")
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("pipeline", help="group, separate and split")
    s.add_argument("complex")
    s.add_argument("field", help="field file or function file")
    sep_opts(s)
    s.add_argument("--no-check", action="store_true", help="skip homology checks after repairs")
    s.add_argument("--timings", action="store_true", help="record timings in the report")
    s.set_defaults(func=cmd_pipeline)

    s = sub.add_parser("fixture", help="write a test manifold (and a perfect field)")
    s.add_argument("name", help="S3, S2xS1, T3, S2xS1~, sphere13 or a sum such as S2xS1#T3")
    s.add_argument("--sum", action="append", help="add a connected summand")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--field", action="store_true", help="also write a perfect field")
    s.add_argument("--out", default="fixture")
    s.set_defaults(func=cmd_fixture)

    for sp in sub.choices.values():
        common(sp)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except MorseSumError as exc:
        sys.stderr.write(f"error [{exc.module}] {type(exc).__name__}: {exc}\n")
        if getattr(exc, "details", None):
            sys.stderr.write(json.dumps(exc.details, default=str, sort_keys=True) + "\n")
        return exc.exit_code
    except argparse.ArgumentTypeError as exc:
        sys.stderr.write(f"error [cli]: {exc}\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        sys.stderr.write(f"error [internal] {type(exc).__name__}: {exc}\n")
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
