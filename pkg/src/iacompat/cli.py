"""Command-line front end.

Subcommands: ``lint`` (parse + well-formedness), ``check`` (pairwise
compatibility), ``product`` (write the synchronized product as a document),
``dot`` (graph export), ``eval`` (evaluate a constraint expression under
explicit bindings).

Exit codes are uniform: 0 success/compatible, 1 incompatible or a failed
validation, 2 usage or parse errors. All output is deterministic; running the
same invocation twice produces byte-identical results.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from .automata import InterfaceAutomaton, composable, product, qualify_hidden
from .docformat import (
    document_diagnostics,
    document_from_automaton,
    export_dot,
    parse_document,
    print_document,
)
from .evaluate import EvalError, MissingVariable, Valuation, evaluate
from .expr_parse import parse_expression
from .exprs import SortError, UnknownVariable
from .falsity import ENUM_BUDGET_ENV, default_budget
from .lexer import ParseError
from .verifier import (
    CompatOptions,
    CompatReport,
    CompatVerdict,
    InvalidAutomaton,
    check_compatibility,
    report_to_json,
)


class _UsageError(Exception):
    pass


def _load_single(path: str, contract: Optional[str] = None) -> InterfaceAutomaton:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"{path}: {exc}") from None
    doc = parse_document(text, source=path)
    if contract is not None:
        try:
            return doc.automaton(contract)
        except (KeyError, ValueError) as exc:
            raise _UsageError(f"{path}: {exc}") from None
    if len(doc.automata) != 1:
        raise _UsageError(
            f"{path}: expected exactly one contract, found {len(doc.automata)};"
            " pick one with --contract"
        )
    return doc.automata[0]


def _write_or_print(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands

def _cmd_lint(args: argparse.Namespace) -> int:
    worst = 0
    for path in args.files:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            print(f"{path}: error: {exc}", file=sys.stderr)
            worst = max(worst, 2)
            continue
        try:
            doc = parse_document(text, source=path)
        except ParseError as exc:
            print(f"error: {exc}", file=sys.stderr)
            worst = max(worst, 2)
            continue
        diags = document_diagnostics(doc)
        if diags:
            for d in diags:
                print(f"{path}: {d}")
            worst = max(worst, 1)
        else:
            print(f"{path}: ok")
    return worst


def _summary_lines(report: CompatReport) -> list[str]:
    lines = [
        f"left: {report.left}",
        f"right: {report.right}",
        f"composable: {'yes' if report.composability.ok else 'no'}",
    ]
    for c in report.composability.conflicts:
        acts = ", ".join(str(a) for a in c.actions)
        lines.append(f"conflict {c.clause}: {acts}")
    if report.composability.ok:
        lines.append(f"shared: {', '.join(str(a) for a in report.shared) or '(none)'}")
        prod = report.product.automaton
        lines.append(f"product: {len(prod.states)} states, {len(prod.transitions)} transitions")
        lines.append(f"illegal states: {len(report.illegal.states)}")
        lines.append(f"bad states: {len(report.bad)}")
        lines.append(
            f"pruned: {len(report.pruned.states)} states, {len(report.pruned.transitions)} transitions"
        )
    if report.verdict is CompatVerdict.COMPATIBLE:
        lines.append("verdict: compatible")
    else:
        lines.append(f"verdict: incompatible ({report.cause.value})")
    return lines


def _cmd_check(args: argparse.Namespace) -> int:
    a = _load_single(args.left)
    b = _load_single(args.right)
    options = CompatOptions(
        qualify_hidden=args.qualify_hidden,
        strict_deadlock=args.strict_deadlock,
        enum_budget=args.enum_budget,
    )
    try:
        report = check_compatibility(a, b, options)
    except InvalidAutomaton as exc:
        for d in exc.diagnostics:
            print(f"invalid: {d}", file=sys.stderr)
        return 1
    for line in _summary_lines(report):
        print(line)
    if args.witness:
        if report.witness is None:
            print("witness: (none)")
        else:
            print(f"witness ({len(report.witness.steps)} steps):")
            print(f"  {report.witness.states[0]}")
            prod = report.product.automaton
            for t in report.witness.steps:
                cls = prod.action_class(t.action)
                deco = cls.decoration if cls else ""
                print(f"  -[{t.action}{deco}]-> {t.target}")
    if args.report:
        Path(args.report).write_text(report_to_json(report), encoding="utf-8")
    return 0 if report.verdict is CompatVerdict.COMPATIBLE else 1


def _cmd_product(args: argparse.Namespace) -> int:
    a = _load_single(args.left)
    b = _load_single(args.right)
    if args.qualify_hidden:
        a = qualify_hidden(a)
        b = qualify_hidden(b)
    comp = composable(a, b)
    if not comp.ok:
        for c in comp.conflicts:
            acts = ", ".join(str(x) for x in c.actions)
            print(f"conflict {c.clause}: {acts}", file=sys.stderr)
        print("error: not composable", file=sys.stderr)
        return 1
    prod = product(a, b)
    _write_or_print(print_document(document_from_automaton(prod.automaton)), args.output)
    return 0


def _cmd_dot(args: argparse.Namespace) -> int:
    a = _load_single(args.file, args.contract)
    _write_or_print(export_dot(a), args.output)
    return 0


def _parse_binding_value(text: str):
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    if text.startswith("<") and text.endswith(">"):
        return text[1:-1]
    return text  # bare word doubles as an enum literal


def _collect_bindings(items) -> dict[str, object]:
    out: dict[str, object] = {}
    for item in items or ():
        key, eq, value = item.partition("=")
        if not eq or not key:
            raise _UsageError(f"binding must look like name=value, got {item!r}")
        out[key] = _parse_binding_value(value)
    return out


def _cmd_eval(args: argparse.Namespace) -> int:
    try:
        expr = parse_expression(args.expression, None, open_world=True)
    except (SortError, UnknownVariable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    values = _collect_bindings(args.bind)
    old = _collect_bindings(args.bind_old) if args.bind_old else None
    val = Valuation(values=values, old=old)
    try:
        result = evaluate(expr, val)
    except MissingVariable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EvalError as exc:
        print(f"evaluation error: {exc}")
        return 1
    print(_value_text(result))
    return 0


def _value_text(v) -> str:
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, frozenset):
        return "{" + ", ".join(sorted(_value_text(x) for x in v)) + "}"
    if isinstance(v, tuple):
        return "[" + ", ".join(_value_text(x) for x in v) + "]"
    return str(v)


# ---------------------------------------------------------------------------
# argument wiring

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iacompat",
        description="Check interface-automata contracts for pairwise compatibility.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("lint", help="parse documents and report well-formedness problems")
    p.add_argument("files", nargs="+", metavar="FILE")
    p.set_defaults(func=_cmd_lint)

    p = sub.add_parser("check", help="run the full compatibility check on two contracts")
    p.add_argument("left", metavar="LEFT.ia")
    p.add_argument("right", metavar="RIGHT.ia")
    p.add_argument("--qualify-hidden", action="store_true",
                   help="namespace hidden actions by contract before checking")
    p.add_argument("--strict-deadlock", action="store_true",
                   help="treat states without outgoing transitions as illegal")
    p.add_argument("--enum-budget", type=int, default=None, metavar="N",
                   help=f"max valuations per falsity query (default {default_budget()}, "
                        f"or ${ENUM_BUDGET_ENV})")
    p.add_argument("--report", metavar="PATH", help="write the structured JSON report here")
    p.add_argument("--witness", action="store_true", help="print a path into the illegal set")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("product", help="write the synchronized product as a document")
    p.add_argument("left", metavar="LEFT.ia")
    p.add_argument("right", metavar="RIGHT.ia")
    p.add_argument("--qualify-hidden", action="store_true",
                   help="namespace hidden actions by contract before composing")
    p.add_argument("-o", "--output", metavar="OUT", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_product)

    p = sub.add_parser("dot", help="export a contract as a Graphviz graph")
    p.add_argument("file", metavar="FILE.ia")
    p.add_argument("--contract", metavar="NAME", default=None,
                   help="contract to render when the document holds several")
    p.add_argument("-o", "--output", metavar="OUT", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_dot)

    p = sub.add_parser("eval", help="evaluate a constraint expression under bindings")
    p.add_argument("expression", metavar="EXPR")
    p.add_argument("--bind", action="append", metavar="NAME=VALUE",
                   help="bind a variable (repeatable)")
    p.add_argument("--bind-old", action="append", metavar="NAME=VALUE",
                   help="bind a variable in the old state (repeatable)")
    p.set_defaults(func=_cmd_eval)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main_exit() -> None:
    raise SystemExit(main())
