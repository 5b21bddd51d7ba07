"""Command-line driver.

    firwidth infer design.fir          annotate a circuit with inferred widths
    firwidth solve system.txt          least solution of a constraint file
    firwidth oracle system.txt         reference oracles, for debugging
    firwidth parse design.fir          parse / extraction summary (--dot)
    firwidth emit-lp system.txt -o DIR LP files for external ILP cross-checks

Exit codes: 0 satisfiable, 1 unsatisfiable, 2 input or usage error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import firrtl, lpformat, oracle, textfmt
from .constraints import BoundCheck, ConstraintSystem
from .depgraph import NotConjunctive, UnsupportedDynamicShift, build_graph, to_dot
from .solve import InternalInvariantError, SolveResult, failed_checks, solve

EXIT_SAT = 0
EXIT_UNSAT = 1
EXIT_ERROR = 2
EXIT_INTERNAL = 3

InputError = (firrtl.FirrtlSyntaxError, firrtl.UnsupportedConstruct,
              firrtl.ExtractionError, firrtl.UnsupportedOp,
              firrtl.WidthTypeError, textfmt.FormatError,
              UnsupportedDynamicShift, NotConjunctive, lpformat.LpUnsupported,
              OSError)


def _trace_fn(args):
    if getattr(args, "trace", False):
        return lambda line: print(line, file=sys.stderr)
    return None


def _write_output(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    _atomic_write(Path(path), text)


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=str(path.parent) or ".", prefix=path.name)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _load_system(path: str) -> tuple[ConstraintSystem, list[BoundCheck]]:
    text = Path(path).read_text()
    if path.endswith(".fir"):
        table = firrtl.extract(firrtl.parse(text))
        return table.system, table.checks
    return textfmt.parse_text(text), []


def _unsat_payload(sys_names, result: SolveResult) -> dict:
    return {
        "status": "unsat",
        "reason": result.reason,
        "scc": [sys_names[v] for v in result.component],
        "detail": result.detail,
    }


def _report_checks(checks: list[BoundCheck], values, strict: bool) -> int:
    bad = failed_checks(checks, values)
    for check in bad:
        level = "error" if strict else "warning"
        print(f"{level}: fixed width exceeded: {check.note}", file=sys.stderr)
    return EXIT_UNSAT if (bad and strict) else EXIT_SAT


def cmd_infer(args) -> int:
    text = Path(args.input).read_text()
    circuit = firrtl.parse(text)
    table = firrtl.extract(circuit)
    result = solve(table.system, trace=_trace_fn(args))
    if not result.sat:
        payload = _unsat_payload(table.system.names, result)
        if args.json:
            _write_output(args.output, json.dumps(payload, indent=2) + "\n")
        else:
            leaves = ", ".join(payload["scc"]) or "(none)"
            print(f"unsatisfiable: {result.reason} [{result.detail}]", file=sys.stderr)
            print(f"involved leaves: {leaves}", file=sys.stderr)
        return EXIT_UNSAT
    assert result.values is not None
    if args.json:
        payload = {"status": "sat", "widths": firrtl.width_report(table, result.values)}
        _write_output(args.output, json.dumps(payload, indent=2) + "\n")
    else:
        _write_output(args.output, firrtl.apply_solution(circuit, table, result.values))
    return _report_checks(table.checks, result.values, args.strict)


def cmd_solve(args) -> int:
    sys_, checks = _load_system(args.input)
    result = solve(sys_, trace=_trace_fn(args))
    if not result.sat:
        if args.json:
            _write_output(args.output, json.dumps(_unsat_payload(sys_.names, result), indent=2) + "\n")
        else:
            print(f"unsatisfiable: {result.reason} [{result.detail}]", file=sys.stderr)
        return EXIT_UNSAT
    assert result.values is not None
    if args.json:
        payload = {"status": "sat",
                   "widths": dict(zip(sys_.names, result.values))}
        _write_output(args.output, json.dumps(payload, indent=2) + "\n")
    else:
        lines = [f"{name} = {value}" for name, value in zip(sys_.names, result.values)]
        _write_output(args.output, "".join(line + "\n" for line in lines))
    return _report_checks(checks, result.values, args.strict)


def cmd_oracle(args) -> int:
    sys_, _checks = _load_system(args.input)
    if args.bound is not None:
        res = oracle.exhaustive_least(sys_, args.bound)
    else:
        res = oracle.kleene_least(sys_, args.cutoff)
    if res.sat:
        assert res.values is not None
        for name, value in zip(sys_.names, res.values):
            print(f"{name} = {value}")
        return EXIT_SAT
    print(f"{res.kind} (limit {res.limit})", file=sys.stderr)
    return EXIT_UNSAT


def cmd_parse(args) -> int:
    text = Path(args.input).read_text()
    circuit = firrtl.parse(text)
    table = firrtl.extract(circuit)
    if args.dot:
        conjunctive = next(table.system.disjuncts())
        _write_output(args.output, to_dot(build_graph(conjunctive), table.system.names))
        return EXIT_SAT
    summary = {
        "circuit": circuit.name,
        "modules": [m.name for m in circuit.modules],
        "leaves": len(table.leaves),
        "unknown_widths": table.system.num_vars,
        "inequalities": sum(len(v) for v in table.system.by_var.values()),
        "checks": len(table.checks),
    }
    _write_output(args.output, json.dumps(summary, indent=2) + "\n")
    return EXIT_SAT


def cmd_emit_lp(args) -> int:
    sys_, _checks = _load_system(args.input)
    outdir = Path(args.output or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.input).stem
    written = []
    for index, text in enumerate(lpformat.lp_files(sys_)):
        path = outdir / f"{stem}.d{index}.lp"
        _atomic_write(path, text)
        written.append(str(path))
    for path in written:
        print(path)
    return EXIT_SAT


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="firwidth",
                                     description="FIRRTL width inference")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, output=True):
        p.add_argument("input", help="input file")
        if output:
            p.add_argument("-o", "--output", default=None,
                           help="output path (default: stdout)")
        p.add_argument("--trace", action="store_true",
                       help="log solver steps to stderr")

    p_infer = sub.add_parser("infer", help="infer widths of a .fir circuit")
    common(p_infer)
    p_infer.add_argument("--json", action="store_true", help="emit a JSON width report")
    p_infer.add_argument("--strict", action="store_true",
                         help="treat exceeded fixed widths as errors")
    p_infer.set_defaults(fn=cmd_infer)

    p_solve = sub.add_parser("solve", help="solve a constraint file (or .fir)")
    common(p_solve)
    p_solve.add_argument("--json", action="store_true")
    p_solve.add_argument("--strict", action="store_true")
    p_solve.set_defaults(fn=cmd_solve)

    p_oracle = sub.add_parser("oracle", help="run the reference oracles")
    common(p_oracle, output=False)
    p_oracle.add_argument("--cutoff", type=int, default=10 ** 6,
                          help="fixpoint-iteration divergence cutoff")
    p_oracle.add_argument("--bound", type=int, default=None,
                          help="run the bounded search with this box bound instead")
    p_oracle.set_defaults(fn=cmd_oracle)

    p_parse = sub.add_parser("parse", help="parse and summarize a .fir circuit")
    common(p_parse)
    p_parse.add_argument("--dot", action="store_true",
                         help="dump the dependency graph in DOT format")
    p_parse.set_defaults(fn=cmd_parse)

    p_lp = sub.add_parser("emit-lp", help="write LP files for external solvers")
    common(p_lp)
    p_lp.set_defaults(fn=cmd_emit_lp)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except InternalInvariantError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as e:  # noqa: BLE001 - a crash is an internal failure
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
