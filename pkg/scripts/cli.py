"""
Command-line front end.

Input documents are JSON objects with `group`, `H`, `c` and, for commands
about a single CM type, `phi`. Exit codes: 0 success, 1 invalid input,
2 a theorem or stability check failed, 64 usage error.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, TextIO

import settings
from atlas import (
    FAMILIES,
    admissible_data,
    tabulate_datum,
    tabulate_family,
    write_atlas_csv,
    write_atlas_json,
)
from cm_structures import (
    CmType,
    CmTypeError,
    InternalStabilityViolation,
    NotUnionOfCosets,
    primitive_descent,
    reflex_type,
    validate_cm_type,
)
from finite_group import (
    CmDatumError,
    CmFieldDatum,
    FiniteGroup,
    GroupSpecError,
    Subgroup,
    make_group,
    make_subgroup,
    subgroup_closure,
    trivial_subgroup,
    validate_cm_datum,
)
from integer_lattice import LatticeError
from mumford_tate import (
    DEGENERACY_CONVENTION,
    HODGE,
    TATE,
    CapExceeded,
    check_algebra,
    check_main_theorem,
    hodge_relations,
    invariant_class_dimension,
    make_cm_algebra,
    motive_weights,
    mt_lattice,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILED = 2
EXIT_USAGE = 64

INTERNAL_ERRORS = (InternalStabilityViolation, NotUnionOfCosets)


class InputError(ValueError):
    """Raised when an input document cannot be read or is missing fields"""

    def __init__(self, code: str, detail: str = ""):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}" if detail else code)


INPUT_ERRORS = (InputError, GroupSpecError, CmDatumError, CmTypeError, LatticeError, CapExceeded)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def render_json(payload) -> str:
    return json.dumps(payload, indent=2)


def _flag(value: bool) -> str:
    return "true" if value else "false"


def _read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError("UnreadableFile", f"{path}: {e.strerror}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError("BadJson", f"{path}: {e.msg} at line {e.lineno}")
    return doc


def load_document(path) -> Dict:
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise InputError("BadJson", f"{path}: top level must be an object")
    return doc


def load_group_list(path: str) -> List[Dict]:
    """A JSON list of group specs, or an object holding one under "groups"."""
    doc = _read_json(path)
    if isinstance(doc, dict):
        doc = _require(doc, "groups")
    if not isinstance(doc, list):
        raise InputError("BadJson", f"{path}: expected a list of group specs")
    return doc


def _require(doc: Dict, key: str):
    if key not in doc:
        raise InputError("MissingField", f"input has no {key!r}")
    return doc[key]


def parse_group(doc: Dict) -> FiniteGroup:
    return make_group(_require(doc, "group"))


def parse_subgroup(group: FiniteGroup, value) -> Subgroup:
    """H as an element list, or {"generators": [...]}; absent means trivial."""
    if value is None:
        return trivial_subgroup(group)
    if isinstance(value, dict):
        if "generators" not in value:
            raise InputError("BadSubgroup", "subgroup object needs 'generators'")
        return subgroup_closure(group, value["generators"])
    if isinstance(value, list):
        return make_subgroup(group, value)
    raise InputError("BadSubgroup", f"H must be a list or an object, got {type(value).__name__}")


def parse_datum(doc: Dict, group: Optional[FiniteGroup] = None) -> CmFieldDatum:
    group = group or parse_group(doc)
    h = parse_subgroup(group, doc.get("H"))
    return validate_cm_datum(group, h, _require(doc, "c"))


def parse_type(doc: Dict) -> CmType:
    datum = parse_datum(doc)
    return validate_cm_type(datum, _require(doc, "phi"))


def _lines(out: TextIO, lines: Sequence[str]) -> None:
    for line in lines:
        out.write(line + "\n")


def _datum_lines(datum: CmFieldDatum) -> List[str]:
    sigma = datum.sigma
    pairs = sorted({tuple(sorted((j, datum.conjugate_coset(j)))) for j in range(sigma.coset_count)})
    return [
        f"H = {list(datum.h.elements)}",
        f"c = {datum.c}",
        f"embeddings = {sigma.coset_count}, g = {datum.g_dim}",
        "cosets:",
        *[f"  {j}: {list(sigma.members(j))}" for j in range(sigma.coset_count)],
        "conjugate pairs: " + " ".join(f"{a}-{b}" for a, b in pairs),
    ]


def cmd_validate(args, out: TextIO) -> int:
    doc = load_document(args.file)
    try:
        group = parse_group(doc)
    except INPUT_ERRORS as e:
        _lines(out, [f"invalid: {e}"])
        return EXIT_INVALID
    lines = [f"group {group.name} of order {group.order}", "elements:"]
    lines += [f"  {a}: {group.label(a)}" for a in group.elements()]
    try:
        datum = parse_datum(doc, group)
        lines += _datum_lines(datum)
        if "phi" in doc:
            t = validate_cm_type(datum, doc["phi"])
            lines.append(f"phi = {list(t.phi)}")
    except INPUT_ERRORS as e:
        _lines(out, lines + [f"invalid: {e}"])
        return EXIT_INVALID
    _lines(out, lines + ["valid"])
    return EXIT_OK


def cmd_mt(args, out: TextIO) -> int:
    t = parse_type(load_document(args.file))
    lattice = mt_lattice(t)
    relations = hodge_relations(t)
    descent = primitive_descent(t)
    payload = {
        "g": t.g_dim,
        "phi": list(t.phi),
        "mt_rank": lattice.rank,
        "degenerate": lattice.rank < t.g_dim + 1,
        "degeneracy_convention": DEGENERACY_CONVENTION,
        "primitive": descent is None,
        "descent": None if descent is None else {
            "H": list(descent[0].elements),
            "phi": list(descent[1].phi),
        },
        "mt_lattice": lattice.to_json(),
        "relations": relations.to_json(),
    }
    if args.json:
        out.write(render_json(payload) + "\n")
        return EXIT_OK
    lines = [
        f"phi = {payload['phi']}",
        f"mt_rank = {payload['mt_rank']}",
        f"degenerate = {_flag(payload['degenerate'])} ({DEGENERACY_CONVENTION})",
        f"primitive = {_flag(payload['primitive'])}",
    ]
    if descent is not None:
        lines.append(f"descends to H' = {payload['descent']['H']} with phi = {payload['descent']['phi']}")
    lines.append("mt_lattice:")
    lines += [f"  {row}" for row in payload["mt_lattice"]]
    lines.append("relations:")
    lines += [f"  {row}" for row in payload["relations"]]
    _lines(out, lines)
    return EXIT_OK


def cmd_reflex(args, out: TextIO) -> int:
    t = parse_type(load_document(args.file))
    reflex = reflex_type(t)
    payload = {
        "h_e": list(reflex.h_e.elements),
        "reflex_degree": reflex.reflex_degree,
        "phi_e": list(reflex.phi_e.phi),
    }
    if args.json:
        out.write(render_json(payload) + "\n")
    else:
        _lines(out, [f"{key} = {value}" for key, value in payload.items()])
    return EXIT_OK


def cmd_check(args, out: TextIO) -> int:
    report = check_main_theorem(parse_type(load_document(args.file)))
    if args.json:
        out.write(render_json(report.to_dict()) + "\n")
    else:
        payload = report.to_dict()
        lines = [
            f"group {payload['group']} of order {payload['order']}, H = {payload['H']}, c = {payload['c']}",
            f"phi = {payload['phi']}, g = {payload['g']}",
            f"mt_rank = {payload['mt_rank']}",
            f"degenerate = {_flag(payload['degenerate'])}",
            f"reflex: h_e = {payload['reflex']['h_e']}, degree = {payload['reflex']['reflex_degree']}, "
            f"phi_e = {payload['reflex']['phi_e']}",
            f"theorem_holds = {_flag(report.theorem_holds)}",
            f"factorization_holds = {_flag(report.factorization_holds)}",
        ]
        if report.column_violations:
            lines.append(f"column_violations = {list(report.column_violations)}")
        _lines(out, lines)
    if report.theorem_holds and report.factorization_holds and not report.column_violations:
        return EXIT_OK
    return EXIT_FAILED


def cmd_enumerate(args, out: TextIO) -> int:
    if args.file is not None:
        doc = load_document(args.file)
        if args.all_subfields:
            group = parse_group(doc)
            records = []
            for datum in admissible_data(group, all_subfields=True):
                records.extend(tabulate_datum(datum, dedupe=args.dedupe, workers=args.workers))
        else:
            records = tabulate_datum(parse_datum(doc), dedupe=args.dedupe, workers=args.workers)
    else:
        groups = load_group_list(args.groups) if args.groups else None
        records = tabulate_family(args.family, args.max_order, all_subfields=args.all_subfields,
                                  dedupe=args.dedupe, workers=args.workers, groups=groups)

    if args.csv:
        write_atlas_csv(records, args.csv)
    elif args.json:
        write_atlas_json(records, args.json)

    failed = [rec for rec in records if not rec.ok]
    degenerate = sum(1 for rec in records if rec.degenerate)
    lines = [f"records = {len(records)}", f"degenerate = {degenerate}", f"failed = {len(failed)}"]
    lines += [f"  {rec.group} phi={list(rec.phi)} {rec.error}".rstrip() for rec in failed]
    _lines(out, lines)
    if not failed:
        return EXIT_OK
    # only oversized data
    if all(rec.error.startswith(CapExceeded.code) for rec in failed):
        return EXIT_INVALID
    return EXIT_FAILED


def cmd_weights(args, out: TextIO) -> int:
    t = parse_type(load_document(args.file))
    weights = motive_weights(t, args.m, args.n, args.r)
    payload = weights.to_dict()
    agree = True
    if args.classes:
        hodge = invariant_class_dimension(t, args.m, args.n, args.r, HODGE)
        tate = invariant_class_dimension(t, args.m, args.n, args.r, TATE)
        agree = hodge == tate
        payload.update({"hodge_classes": hodge, "tate_classes": tate, "agree": agree})
    if args.json:
        out.write(render_json(payload) + "\n")
    else:
        lines = [f"V({args.m}, {args.n}, {args.r}): {weights.total_multiplicity} weights with multiplicity"]
        lines += [f"  {list(w)} x{k}" for w, k in weights.entries]
        if args.classes:
            lines += [f"hodge_classes = {payload['hodge_classes']}",
                      f"tate_classes = {payload['tate_classes']}",
                      f"agree = {_flag(agree)}"]
        _lines(out, lines)
    return EXIT_OK if agree else EXIT_FAILED


def cmd_algebra(args, out: TextIO) -> int:
    doc = load_document(args.file)
    group = parse_group(doc)
    components = _require(doc, "components")
    if not isinstance(components, list):
        raise InputError("BadComponents", "components must be a list")
    types = []
    for i, part in enumerate(components):
        if not isinstance(part, dict):
            raise InputError("BadComponents", f"component {i} must be an object")
        datum = validate_cm_datum(group, parse_subgroup(group, part.get("H")), _require(doc, "c"))
        types.append(validate_cm_type(datum, _require(part, "phi")))
    report = check_algebra(make_cm_algebra(types))
    if args.json:
        out.write(render_json(report.to_dict()) + "\n")
    else:
        lines = [f"components = {len(types)}", f"mt_rank = {report.mt_rank}", "mt_lattice:"]
        lines += [f"  {row}" for row in report.mt_lattice.to_json()]
        lines.append(f"theorem_holds = {_flag(report.theorem_holds)}")
        _lines(out, lines)
    return EXIT_OK if report.theorem_holds else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mtcm", description="Mumford-Tate groups of CM types at lattice level")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log progress at INFO.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("validate", help="Check an input document and print the element order.")
    p.add_argument("file")
    p.set_defaults(handler=cmd_validate)

    for name, handler, text in (
        ("mt", cmd_mt, "Mumford-Tate lattice, degeneracy and primitivity."),
        ("reflex", cmd_reflex, "Reflex subgroup, degree and reflex type."),
        ("check", cmd_check, "Check the main theorem and the reflex norm factorization."),
        ("algebra", cmd_algebra, "Check the main theorem for a product of CM types."),
    ):
        p = subparsers.add_parser(name, help=text)
        p.add_argument("file")
        p.add_argument("--json", action="store_true", help="Print a JSON report.")
        p.set_defaults(handler=handler)

    p = subparsers.add_parser("enumerate", help="Tabulate every CM type of a datum or a family.")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--file")
    source.add_argument("--family", choices=FAMILIES)
    p.add_argument("--groups", help="JSON list of group specs for --family explicit.")
    p.add_argument("--max-order", type=int)
    p.add_argument("--dedupe", action="store_true", help="One CM type per translation orbit.")
    p.add_argument("--all-subfields", action="store_true", help="Range H over every admissible subgroup.")
    p.add_argument("--workers", type=int, default=1)
    sink = p.add_mutually_exclusive_group()
    sink.add_argument("--csv")
    sink.add_argument("--json")
    p.set_defaults(handler=cmd_enumerate)

    p = subparsers.add_parser("weights", help="Weights of V^m (x) dual(V)^n (x) Q(r).")
    p.add_argument("file")
    p.add_argument("-m", type=int, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-r", type=int, required=True)
    p.add_argument("--classes", action="store_true", help="Count Hodge and Tate classes.")
    p.add_argument("--json", action="store_true", help="Print a JSON report.")
    p.set_defaults(handler=cmd_weights)
    return parser


def run_command(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None,
                stderr: Optional[TextIO] = None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "enumerate":
            if args.family is not None and args.max_order is None:
                parser.error("--family requires --max-order")
            if (args.family == "explicit") != (args.groups is not None):
                parser.error("--groups goes with --family explicit and nothing else")
            if args.workers < 1:
                parser.error("--workers must be at least 1")
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else int(e.code)

    if args.verbose:
        logging.getLogger().setLevel(logging.INFO)

    try:
        return args.handler(args, out)
    except INTERNAL_ERRORS as e:
        logger.error(f"Internal check failed: {str(e)}")
        err.write(f"error: {e}\n")
        return EXIT_FAILED
    except ValueError as e:
        logger.debug(f"Rejected input: {str(e)}")
        err.write(f"error: {e}\n")
        return EXIT_INVALID


def main() -> int:
    logging.basicConfig(level=settings.LOG_LEVEL, format=settings.LOG_FORMAT, stream=sys.stderr)
    return run_command(sys.argv[1:])


if __name__ == "__main__":
    raise SystemExit(main())
