"""Batch command line front end.

Every verb validates its arguments, computes, and prints one deterministic
report on standard output: JSON for structured results, DOT for poset
drawings, plain text for length vectors and figure tables.  Identical
invocations produce byte-identical output.  Exit status is 0 on success,
2 for bad input (including non-generic lengths, with the offending subset
in the message), and 3 when an internal audit fails.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional

from .coxeter import RegularCellComplex
from .errors import USER_ERRORS, InvalidCodeError, PolygonSpacesError
from .genetics import (
    GeneticCode,
    genetic_code,
    parse_code,
    saturated_chain,
    surgery_signature,
)
from .homology import (
    HomologyReport,
    SimplicialComplex,
    homology,
    identify_small,
)
from .posets import (
    Barred,
    FinitePoset,
    Interval,
    canonical_partition,
    comb_surgery,
    intersection_poset,
    partition_str,
)
from .surgery import run_chain, run_model


def _print(text: str) -> None:
    sys.stdout.write(text + "\n")


def _emit_json(payload) -> None:
    _print(json.dumps(payload, indent=2, sort_keys=False))


def _parse_lengths(raw: list[str]) -> list[Fraction]:
    if len(raw) < 3:
        raise InvalidCodeError("a polygon needs at least 3 edges")
    out = []
    for item in raw:
        try:
            out.append(Fraction(item))
        except (ValueError, ZeroDivisionError):
            raise InvalidCodeError(f"not a rational length: {item!r}")
    return out


def _code_payload(code: GeneticCode) -> dict:
    return {
        "m": code.edge_count,
        "genes": [sorted(g) for g in sorted(code.genes, key=sorted)],
    }


def _report_payload(rep: HomologyReport, name: str) -> dict:
    return {
        "betti": list(rep.betti),
        "torsion": [list(t) for t in rep.torsion],
        "components": rep.components,
        "orientable": rep.orientable,
        "identification": name,
    }


# -- gencode --------------------------------------------------------------


def _cmd_gencode(args: argparse.Namespace) -> int:
    code = genetic_code(_parse_lengths(args.lengths))
    _emit_json(_code_payload(code))
    return 0


# -- chain ----------------------------------------------------------------


def _cmd_chain(args: argparse.Namespace) -> int:
    code = parse_code(args.code, args.m)
    chain = saturated_chain(code)
    _emit_json(
        {
            "codes": [str(c) for c in chain.codes],
            "added": [sorted(g) for g in chain.added_sets],
            "signature": list(surgery_signature(code)),
        }
    )
    return 0


# -- run ------------------------------------------------------------------


def _dump_cells(complex_: RegularCellComplex, path: str) -> None:
    order = sorted(complex_.cells)
    index = {ident: k for k, ident in enumerate(order)}
    cells = [
        {
            "dim": complex_.cells[i].dim,
            "facets": sorted(index[f] for f in complex_.cells[i].facets),
        }
        for i in order
    ]
    with open(path, "w", encoding="utf-8") as handle:
        json.dump({"kind": "cells", "cells": cells}, handle, indent=2)
        handle.write("\n")


def _dump_simplicial(complex_: SimplicialComplex, path: str) -> None:
    vertices = sorted(complex_.vertices, key=repr)
    index = {v: k for k, v in enumerate(vertices)}
    maximal = sorted(
        sorted(index[v] for v in face) for face in complex_.maximal_faces()
    )
    with open(path, "w", encoding="utf-8") as handle:
        json.dump({"kind": "simplicial", "maximal": maximal}, handle, indent=2)
        handle.write("\n")


def _figure_row(tag: str, f_vector: tuple[int, ...]) -> str:
    euler = sum((-1) ** k * n for k, n in enumerate(f_vector))
    f_text = " ".join(str(n) for n in f_vector)
    return f"{tag:<12} f = {f_text:<16} chi = {euler}"


def _cmd_run(args: argparse.Namespace) -> int:
    code = parse_code(args.code, args.m)
    if args.mode == "model":
        if args.projective:
            raise InvalidCodeError(
                "--projective only applies to the surface modes"
            )
        return _run_model(code, args)
    trace = run_chain(code, mode=args.mode, projective=args.projective)

    if args.dump_cells:
        os.makedirs(args.dump_cells, exist_ok=True)
        for k, complex_ in enumerate(trace.complexes):
            _dump_cells(
                complex_, os.path.join(args.dump_cells, f"step-{k:02d}.json")
            )

    if args.figures:
        _print(_figure_row("start", trace.complexes[0].f_vector()))
        for step in trace.steps:
            cut = "".join(str(e) for e in step.added)
            _print(_figure_row(f"cut {cut}", step.f_after))
        _print(f"{'space':<12} {identify_small(trace.final)}")
        return 0

    steps = []
    for step, after in zip(trace.steps, trace.complexes[1:]):
        rep = homology(after)
        steps.append(
            {
                "code": step.code,
                "added": list(step.added),
                "index": step.index,
                "sphere_size": len(step.sphere),
                "f_after": list(step.f_after),
                "betti": list(rep.betti),
                "torsion": [list(t) for t in rep.torsion],
            }
        )
    final = homology(trace.final)
    _emit_json(
        {
            "code": str(code),
            "mode": trace.mode,
            "projective": trace.projective,
            "start": {"f_vector": list(trace.complexes[0].f_vector())},
            "steps": steps,
            "final": {
                "f_vector": list(trace.final.f_vector()),
                "euler_characteristic": trace.final.euler_characteristic(),
                **_report_payload(final, identify_small(trace.final)),
            },
        }
    )
    return 0


def _run_model(code: GeneticCode, args: argparse.Namespace) -> int:
    result = run_model(code)
    if args.dump_cells:
        os.makedirs(args.dump_cells, exist_ok=True)
        _dump_simplicial(
            result.complex, os.path.join(args.dump_cells, "model.json")
        )
    if args.figures:
        _print(_figure_row("model", result.complex.f_vector()))
        _print(f"{'space':<12} {identify_small(result.complex)}")
        return 0
    rep = homology(result.complex)
    _emit_json(
        {
            "code": str(code),
            "mode": "model",
            "steps": [
                {
                    "added": list(step.added),
                    "units": list(step.units),
                    "sphere_size": len(step.sphere),
                }
                for step in result.steps
            ],
            "final": {
                "f_vector": list(result.complex.f_vector()),
                "euler_characteristic": result.complex.euler_characteristic(),
                **_report_payload(rep, identify_small(result.complex)),
            },
        }
    )
    return 0


# -- poset ----------------------------------------------------------------


def _parse_locus(text: str, edge_count: int):
    """A surgery locus: digit groups separated by commas, or a JSON list
    of blocks; elements not mentioned become singletons."""
    text = text.strip()
    if text.startswith("["):
        blocks = [tuple(b) for b in json.loads(text)]
    else:
        blocks = [tuple(int(ch) for ch in group) for group in text.split(",")]
    named = {e for b in blocks for e in b}
    blocks += [(e,) for e in range(1, edge_count + 1) if e not in named]
    return canonical_partition(blocks)


def _element_str(element) -> str:
    if isinstance(element, Barred):
        return f"bar({partition_str(element.partition)})"
    if isinstance(element, Interval):
        base = _element_str(element.base)
        return f"[{base} : {_element_str(element.locus)}]"
    return partition_str(element)


def _cmd_poset(args: argparse.Namespace) -> int:
    code = parse_code(args.code, args.m)
    poset = intersection_poset(code, barred=args.bar)
    if args.surgery:
        locus = _parse_locus(args.surgery, code.edge_count)
        poset = comb_surgery(poset, locus)
    names = {e: _element_str(e) for e in poset}
    order = sorted(poset, key=lambda e: names[e])
    covers = sorted(
        (names[a], names[b]) for a, b in poset.covers()
    )
    if args.format == "json":
        index = {e: k for k, e in enumerate(order)}
        _emit_json(
            {
                "elements": [names[e] for e in order],
                "covers": [
                    [index[a], index[b]] for a, b in poset.covers()
                ],
            }
        )
        return 0
    lines = ["digraph poset {", "  rankdir=BT;"]
    lines += [f'  "{names[e]}";' for e in order]
    lines += [f'  "{a}" -> "{b}";' for a, b in covers]
    lines.append("}")
    _print("\n".join(lines))
    return 0


# -- homology -------------------------------------------------------------


def _load_dump(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidCodeError(f"cannot read complex dump {path}: {exc}")
    if not isinstance(data, dict) or "kind" not in data:
        raise InvalidCodeError(f"{path} is not a complex dump")
    if data["kind"] == "simplicial":
        return SimplicialComplex([tuple(face) for face in data["maximal"]])
    if data["kind"] == "cells":
        out = RegularCellComplex()
        for k, cell in enumerate(data["cells"]):
            out.add_cell(
                cell["dim"], ("c", k), tuple(cell["facets"]), ident=k
            )
        out.seal()
        return out
    raise InvalidCodeError(f"unknown dump kind {data['kind']!r}")


def _cmd_homology(args: argparse.Namespace) -> int:
    complex_ = _load_dump(args.file)
    rep = homology(complex_)
    _emit_json(_report_payload(rep, identify_small(complex_)))
    return 0


# -- realize --------------------------------------------------------------


def _cmd_realize(args: argparse.Namespace) -> int:
    from .genetics import realize

    vector = realize(parse_code(args.code, args.m))
    if vector is None:
        _print("UNREALIZABLE")
    else:
        _print(" ".join(str(v) for v in vector.values))
    return 0


# -- entry point ----------------------------------------------------------


def _add_code_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "code",
        help='genetic code, e.g. "<25>" or "<[2,4,6,9]>" for edges past 9',
    )
    parser.add_argument(
        "--m",
        type=int,
        default=None,
        help="number of edges (default: largest edge mentioned)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polygonspaces",
        description="Planar polygon moduli spaces as explicit cell complexes.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("gencode", help="genetic code of a length vector")
    p.add_argument("lengths", nargs="+", help="edge lengths, e.g. 1 1 1 1 3")
    p.set_defaults(func=_cmd_gencode)

    p = sub.add_parser("chain", help="saturated chain down to the minimal code")
    _add_code_argument(p)
    p.set_defaults(func=_cmd_chain)

    p = sub.add_parser("run", help="build the space by iterated surgery")
    _add_code_argument(p)
    p.add_argument(
        "--mode",
        choices=("attach", "collapse", "model"),
        default="attach",
        help="surgery realization (default: attach)",
    )
    p.add_argument(
        "--projective",
        action="store_true",
        help="work on the quotient by the reversal involution",
    )
    p.add_argument(
        "--dump-cells",
        metavar="DIR",
        default=None,
        help="write every intermediate complex as JSON into DIR",
    )
    p.add_argument(
        "--figures",
        action="store_true",
        help="print an f-vector table instead of JSON",
    )
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("poset", help="intersection poset of a genetic code")
    _add_code_argument(p)
    p.add_argument(
        "--bar",
        action="store_true",
        help="double the partitions with disconnected quotients",
    )
    p.add_argument(
        "--surgery",
        metavar="BLOCKS",
        default=None,
        help='combinatorial surgery at this locus, e.g. "345"',
    )
    p.add_argument(
        "--format",
        choices=("dot", "json"),
        default="dot",
        help="output format (default: dot)",
    )
    p.set_defaults(func=_cmd_poset)

    p = sub.add_parser("homology", help="homology of a dumped complex")
    p.add_argument("file", help="JSON file written by run --dump-cells")
    p.set_defaults(func=_cmd_homology)

    p = sub.add_parser("realize", help="integer lengths realizing a code")
    _add_code_argument(p)
    p.set_defaults(func=_cmd_realize)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except USER_ERRORS as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except PolygonSpacesError as exc:
        print(f"audit failure [{exc.code}]: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
