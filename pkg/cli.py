"""
Command line front end for the Affine Quiver toolkit.

    affine-quiver info kronecker.json
    affine-quiver basis kronecker.json 2,2 --oracle --format json
    affine-quiver serre kronecker.json 1 2 2

Reports go to stdout, logs to stderr. Exit codes: 0 ok, 2 bad input,
3 field too small, 4 enumeration cap exceeded, 5 oracle mismatch, 1 otherwise.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field as dataclass_field
from typing import List, Optional

try:
    from .canon import build_inventory, enumerate_delta, stratum_dim, weight_dim_oracle
    from .config import DEFAULT_SEED, DEFAULT_SUBSPACE_CAP, OUTPUT_FORMATS, Config
    from .errors import InternalError, OracleMismatch, ParseError, QuiverError
    from .functors import classify, coxeter_minus, coxeter_plus, reflection_minus, reflection_plus
    from .hallalg import hall_number, hall_polynomial, rep_builder, serre_element
    from .quiver import (
        Quiver, admissible_sink_sequence, cartan_matrix, classify_graph, defect,
        minimal_imaginary_root, parse_dim_vector,
    )
    from .rep import Representation, indecompose
    from .tubes import cyclic_direct_sum, cyclic_indec, find_tubes, hall_apply, parse_segments
except ImportError:
    from canon import build_inventory, enumerate_delta, stratum_dim, weight_dim_oracle
    from config import DEFAULT_SEED, DEFAULT_SUBSPACE_CAP, OUTPUT_FORMATS, Config
    from errors import InternalError, OracleMismatch, ParseError, QuiverError
    from functors import classify, coxeter_minus, coxeter_plus, reflection_minus, reflection_plus
    from hallalg import hall_number, hall_polynomial, rep_builder, serre_element
    from quiver import (
        Quiver, admissible_sink_sequence, cartan_matrix, classify_graph, defect,
        minimal_imaginary_root, parse_dim_vector,
    )
    from rep import Representation, indecompose
    from tubes import cyclic_direct_sum, cyclic_indec, find_tubes, hall_apply, parse_segments


logger = logging.getLogger(__name__)


@dataclass
class Report:
    """Text lines for --format table, records (one JSON line each) for --format json."""

    lines: List[str] = dataclass_field(default_factory=list)
    records: List[dict] = dataclass_field(default_factory=list)
    failure: Optional[QuiverError] = None

    def add(self, line: str, record: Optional[dict] = None):
        self.lines.append(line)
        if record is not None:
            self.records.append(record)


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror}")


def _load_quiver(path: str) -> Quiver:
    try:
        return Quiver.from_json(_read_json(path))
    except ParseError as e:
        raise ParseError(f"{path}: {e}")


def _load_rep(path: str, q: Optional[Quiver] = None) -> Representation:
    try:
        return Representation.from_json(_read_json(path), quiver=q)
    except ParseError as e:
        raise ParseError(f"{path}: {e}")


def _dims(dims) -> str:
    return "(" + ",".join(str(x) for x in dims) + ")"


# Commands

def cmd_info(args, config: Config) -> Report:
    q = _load_quiver(args.quiver)
    affine = classify_graph(q)
    delta = minimal_imaginary_root(q)
    report = Report()
    record = {"family": affine.name, "vertices": list(q.vertices),
              "cartan": [list(r) for r in cartan_matrix(q)], "delta": list(delta)}
    report.lines.append(f"family {affine.name}")
    report.lines.append(f"vertices {', '.join(q.vertices)}")
    report.lines.append("cartan matrix")
    report.lines.extend("  " + " ".join(f"{x:3d}" for x in row) for row in cartan_matrix(q))
    report.lines.append(f"delta={_dims(delta)}")
    if q.is_acyclic():
        defects = {v: defect(q, q.unit_vector(v)) for v in q.vertices}
        record["defects"] = defects
        report.lines.append("defect " + ", ".join(f"{v}:{d}" for v, d in defects.items()))
        seq = admissible_sink_sequence(q)
        record["sink_sequence"] = list(seq)
        report.lines.append(f"admissible sink sequence {', '.join(seq)}")
    else:
        record["sink_sequence"] = None
        report.lines.append("no admissible order")
    report.records.append(record)
    return report


def cmd_classify(args, config: Config) -> Report:
    q = _load_quiver(args.quiver)
    m = _load_rep(args.rep, q)
    report = Report()
    if m.is_zero():
        report.add("zero representation", {"summands": []})
        return report
    for piece, mult in indecompose(m, config.seed):
        result = classify(q, piece, config.seed, verify=args.verify)
        prefix = f"{mult} x " if mult > 1 else ""
        record = dict(result.to_json(), multiplicity=mult)
        report.add(f"{prefix}{_dims(piece.dims)}: {result.describe()}", record)
    return report


def _rep_report(m: Representation) -> Report:
    report = Report()
    report.add(f"dims {_dims(m.dims)}", m.to_json())
    report.lines.append(json.dumps(m.to_json(), sort_keys=True))
    return report


def cmd_reflect(args, config: Config) -> Report:
    q = _load_quiver(args.quiver)
    m = _load_rep(args.rep, q)
    step = reflection_minus if args.minus else reflection_plus
    return _rep_report(step(q, args.vertex, m))


def cmd_coxeter(args, config: Config) -> Report:
    q = _load_quiver(args.quiver)
    m = _load_rep(args.rep, q)
    step = coxeter_minus if args.minus else coxeter_plus
    return _rep_report(step(q, m, args.power))


def cmd_tubes(args, config: Config) -> Report:
    q = _load_quiver(args.quiver)
    tubes = find_tubes(q, config.field(), config.seed)
    periods = [t.period for t in tubes]
    if len(tubes) == 1:
        head = f"1 tube, period {periods[0]}"
    else:
        head = f"{len(tubes)} tubes, periods [{','.join(str(p) for p in periods)}]"
    report = Report(lines=[head])
    for k, t in enumerate(tubes):
        simples = [list(s.dims) for s in t.simples]
        report.add(f"tube {k}: period {t.period}, simples " + " ".join(_dims(s.dims) for s in t.simples),
                   {"tube": k, "period": t.period, "simples": simples})
    return report


def cmd_hall_apply(args, config: Config) -> Report:
    q = _load_quiver(args.quiver)
    tubes = find_tubes(q, config.field(), config.seed)
    if not 0 <= args.tube < len(tubes):
        raise ParseError(f"tube index {args.tube} outside 0..{len(tubes) - 1}")
    t = tubes[args.tube]
    parts = [cyclic_indec(t.period, z, length, t.field) for z, length in parse_segments(args.segments)]
    if not parts:
        raise ParseError("segments must name at least one socle:length pair")
    source = cyclic_direct_sum(*parts) if len(parts) > 1 else parts[0]
    return _rep_report(hall_apply(t, source))


def cmd_basis(args, config: Config) -> Report:
    q = _load_quiver(args.quiver)
    nu = parse_dim_vector(q, args.nu)
    inventory = build_inventory(q, config.field(), nu, config.seed, config.cache_dir)
    params = enumerate_delta(q, nu, inventory)
    report = Report()
    for param in params:
        record = param.to_json()
        line = str(param)
        if args.strata:
            record["stratum_dim"] = stratum_dim(q, param, inventory)
            line += f" dim={record['stratum_dim']}"
        report.add(line, record)
    report.lines.append(f"|Delta| = {len(params)}")
    if args.oracle:
        expected = weight_dim_oracle(q, nu)
        verdict = "PASS" if expected == len(params) else "FAIL"
        report.add(f"oracle {expected} {verdict}", {"oracle": expected, "count": len(params), "result": verdict})
        if verdict == "FAIL":
            report.failure = OracleMismatch(f"|Delta_{_dims(nu)}| = {len(params)} but the oracle gives {expected}")
    return report


def cmd_serre(args, config: Config) -> Report:
    q = _load_quiver(args.quiver)
    element = serre_element(q, args.i, args.j, args.q, config.subspace_cap, config.seed)
    report = Report()
    verdict = "PASS" if element.is_zero() else "FAIL"
    record = {"i": args.i, "j": args.j, "q": args.q, "result": verdict}
    if element.is_zero():
        report.add(f"serre {args.i} {args.j} q={args.q} PASS", record)
    else:
        record["element"] = element.to_json()
        report.add(f"serre {args.i} {args.j} q={args.q} FAIL: {element.describe()}", record)
        report.failure = InternalError(f"quantum Serre relation ({args.i}, {args.j}) fails at q={args.q}")
    return report


def cmd_hall_num(args, config: Config) -> Report:
    top, sub, total = (_load_rep(path) for path in (args.top, args.sub, args.total))
    g = hall_number(top, sub, total, config.subspace_cap, config.seed)
    report = Report()
    record = {"hall_number": g, "q": total.field.p}
    line = f"g = {g} over {total.field!r}"
    if args.polynomial:
        builders = [rep_builder(_read_json(path)) for path in (args.top, args.sub, args.total)]
        poly = hall_polynomial(lambda f: tuple(b(f) for b in builders), cap=config.subspace_cap, seed=config.seed)
        record["polynomial"] = str(poly.as_expr())
        line += f", Hall polynomial {poly.as_expr()}"
    report.add(line, record)
    return report


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default="17", help="prime p or Q (default 17)")
    common.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED, help="random seed")
    common.add_argument("--cache", default=None, help="inventory cache directory")
    common.add_argument("--no-cache", action="store_true", help="do not read or write the inventory cache")
    common.add_argument("--format", choices=OUTPUT_FORMATS, default="table")
    common.add_argument("--cap", type=int, default=DEFAULT_SUBSPACE_CAP, help="enumeration cap")
    common.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    parser = argparse.ArgumentParser(prog="affine-quiver", description="Representations of affine quivers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", parents=[common], help="affine type, Cartan matrix, delta, defects")
    p.add_argument("quiver")
    p.set_defaults(handler=cmd_info)

    p = sub.add_parser("classify", parents=[common], help="decompose and classify a representation")
    p.add_argument("quiver")
    p.add_argument("rep")
    p.add_argument("--verify", action="store_true", help="cross-check each class by Coxeter iteration")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("reflect", parents=[common], help="BGP reflection at a sink (or source with --minus)")
    p.add_argument("quiver")
    p.add_argument("rep")
    p.add_argument("vertex")
    p.add_argument("--minus", action="store_true")
    p.set_defaults(handler=cmd_reflect)

    p = sub.add_parser("coxeter", parents=[common], help="Coxeter functor power")
    p.add_argument("quiver")
    p.add_argument("rep")
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--minus", action="store_true")
    p.set_defaults(handler=cmd_coxeter)

    p = sub.add_parser("tubes", parents=[common], help="inhomogeneous tubes and their simples")
    p.add_argument("quiver")
    p.set_defaults(handler=cmd_tubes)

    p = sub.add_parser("hall-apply", parents=[common], help="Hall functor on a cyclic representation")
    p.add_argument("quiver")
    p.add_argument("segments", help='socle:length list such as "0:2,1:1"')
    p.add_argument("--tube", type=int, default=0)
    p.set_defaults(handler=cmd_hall_apply)

    p = sub.add_parser("basis", parents=[common], help="enumerate Delta_nu")
    p.add_argument("quiver")
    p.add_argument("nu", help="dimension vector as a comma list in vertex order")
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--strata", action="store_true")
    p.set_defaults(handler=cmd_basis)

    p = sub.add_parser("serre", parents=[common], help="check a quantum Serre relation in the Hall algebra")
    p.add_argument("quiver")
    p.add_argument("i")
    p.add_argument("j")
    p.add_argument("q", type=int)
    p.set_defaults(handler=cmd_serre)

    p = sub.add_parser("hall-num", parents=[common], help="Hall number g^total_{top,sub}")
    p.add_argument("top")
    p.add_argument("sub")
    p.add_argument("total")
    p.add_argument("--polynomial", action="store_true", help="interpolate the Hall polynomial")
    p.set_defaults(handler=cmd_hall_num)
    return parser


def _emit(report: Report, fmt: str):
    if fmt == "json":
        for record in report.records:
            print(json.dumps(record, sort_keys=True))
    else:
        for line in report.lines:
            print(line)


def _fail(error: QuiverError, fmt: str) -> int:
    if fmt == "json":
        print(json.dumps(error.as_dict(), sort_keys=True))
    else:
        print(f"error [{error.code}]: {error}", file=sys.stderr)
        if error.exit_code == 3:
            print("hint: rerun with a larger --field prime", file=sys.stderr)
    return error.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    fmt = args.format
    try:
        config = Config.from_args(args)
        report = args.handler(args, config)
    except QuiverError as e:
        return _fail(e, fmt)
    except ValueError as e:
        return _fail(ParseError(str(e)), fmt)
    except Exception as e:
        logger.exception("unexpected failure in %s", args.command)
        return _fail(InternalError(f"{type(e).__name__}: {e}"), fmt)
    _emit(report, fmt)
    if report.failure is not None:
        return _fail(report.failure, fmt)
    return 0


if __name__ == "__main__":
    sys.exit(main())
