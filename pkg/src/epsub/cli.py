"""Command-line interface: ``epsub parse|translate|solve|verify|demo``.

Exit codes: 0 solved and verified, 1 usage, parse or validation error,
2 diverged, 3 solved but verification failed (or a critical formula was
destroyed in strict mode).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Sequence, TextIO

import jsonschema

from . import __version__
from .complexity import complexity
from .demos import (
    DEMOS,
    IDENTITY_SOURCE,
    LOOP_SOURCE,
    SO_OWNER,
    SO_WITNESS,
    loop_step_system,
    loop_term,
    so_step_system,
)
from .engine import (
    APPLY_ORDERS,
    MODES,
    DestroyedCriticalFormula,
    Diverged,
    SolveResult,
    StepRecord,
    SubstitutionStep,
    assemble_disjunction,
    default_mode,
    solve,
    union,
)
from .second_order import CONSTRUCTED_NOTE, complexity_report, select_second_order, so_principal_step
from .syntax import (
    FreeVariableWarning,
    FunctionApp,
    Node,
    ParseError,
    Term,
    canonical,
    parse,
    parse_program,
    parse_term,
    size,
    substitute,
    to_str,
)
from .taut import DEFAULT_THRESHOLD, Countermodel, evaluate, is_tautology
from .translate import NotCritical, SystemE, build_system, epsilon_translate

EXIT_OK, EXIT_ERROR, EXIT_DIVERGED, EXIT_UNVERIFIED = 0, 1, 2, 3

STRATEGY_CHOICES = ("maximal", "first-listed", "min-degree")
TRACE_FORMATS = ("text", "json")
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    strategy: str = "maximal"
    budget: int = 100
    apply_order: str = "recorded"
    mode: str = "strict"
    trace_format: str = "text"
    taut_threshold: int = DEFAULT_THRESHOLD

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if self.strategy not in STRATEGY_CHOICES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.apply_order not in APPLY_ORDERS:
            raise ValueError(f"unknown apply order {self.apply_order!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.trace_format not in TRACE_FORMATS:
            raise ValueError(f"unknown trace format {self.trace_format!r}")
        if self.taut_threshold < 0:
            raise ValueError("taut threshold must be non-negative")

    def as_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "budget": self.budget,
            "apply_order": self.apply_order,
            "mode": self.mode,
            "trace_format": self.trace_format,
            "taut_threshold": self.taut_threshold,
        }


class UsageError(Exception):
    pass


def schema() -> dict:
    text = resources.files("epsub").joinpath("data/trace.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


# -- output helpers ----------------------------------------------------------


class Style:
    def __init__(self, enabled: bool):
        self.enabled = enabled

    def _wrap(self, code: str, text: str) -> str:
        return f"\033[{code}m{text}\033[0m" if self.enabled else text

    def good(self, text: str) -> str:
        return self._wrap("32", text)

    def bad(self, text: str) -> str:
        return self._wrap("31", text)

    def note(self, text: str) -> str:
        return self._wrap("33", text)

    def head(self, text: str) -> str:
        return self._wrap("1", text)


def style_from_env() -> Style:
    return Style(os.environ.get("EPSUB_COLOR", "").lower() in ("1", "true", "yes", "always", "on"))


class Abbreviations:
    """Print closed terms under the names the input gave them."""

    def __init__(self, names: dict[str, Term] | None = None):
        items = sorted((names or {}).items(), key=lambda kv: -size(kv[1]))
        self.items = [(term, FunctionApp(name)) for name, term in items]

    def __call__(self, node: Node) -> str:
        for term, short in self.items:
            node = substitute(node, term, short)
        return to_str(node)


def loop_names(n: int = 12) -> dict[str, Term]:
    return {f"e{i}": loop_term(i) for i in range(n)}


# -- trace documents ---------------------------------------------------------


def digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def result_summary(outcome, error: DestroyedCriticalFormula | None = None) -> dict:
    if error is not None:
        return {
            "status": "destroyed",
            "steps": len(error.trace),
            "diagnostics": [{"step": error.step, "branch": str(error.branch), "formula": to_str(error.formula)}],
            "error": str(error),
        }
    diags = [{"step": i, "branch": str(lab), "formula": to_str(f)} for i, lab, f in outcome.diagnostics]
    if isinstance(outcome, Diverged):
        return {
            "status": "diverged",
            "steps": outcome.steps,
            "reason": outcome.reason,
            "loop_step": outcome.loop_step,
            "diagnostics": diags,
        }
    out = {
        "status": "solved",
        "steps": outcome.steps,
        "leaves": [[[to_str(s.epsilon_term), to_str(s.replacement)] for s in leaf] for leaf in outcome.leaves],
        "disjunction": to_str(outcome.disjunction),
        "verdict": "Tautology" if outcome.verdict else "Countermodel",
        "measure_decreasing": outcome.measure_decreasing,
        "all_critical": outcome.all_critical,
        "diagnostics": diags,
    }
    if isinstance(outcome.verdict, Countermodel):
        out["countermodel"] = outcome.verdict.serialize()
    return out


def trace_document(
    name: str,
    source: str,
    system: SystemE,
    config: RunConfig,
    outcome,
    error: DestroyedCriticalFormula | None = None,
    timestamp: str | None = None,
) -> dict:
    trace: Sequence[StepRecord] = error.trace if error is not None else outcome.trace
    return {
        "tool": "epsub",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "input_digest": digest(source),
        "system_name": name,
        "config": config.as_dict(),
        "system": [to_str(f) for f in system.formulas],
        "steps": [r.to_dict() for r in trace],
        "result": result_summary(outcome, error),
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# -- text rendering ----------------------------------------------------------


def render_step(r: StepRecord, show: Abbreviations, st: Style) -> list[str]:
    lines = [
        st.head(f"step {r.index}: eliminate {show(r.chosen)} {complexity(r.chosen)}"),
        "  witnesses: " + ", ".join(show(t) for t in r.witnesses),
        f"  measure {r.parent_measure} -> {r.child_measure}"
        + ("" if r.decreased else st.note("  (not smaller)")),
    ]
    for f in r.result.formulas:
        lines.append(f"    {show(f)}")
    for lab, f in r.destroyed:
        lines.append(st.bad(f"  destroyed in {lab}: {show(f)}"))
    if r.loop:
        lines.append(st.note("  loop detector: system shape repeats an earlier step"))
    return lines


def render_outcome(outcome, show: Abbreviations, st: Style) -> list[str]:
    if isinstance(outcome, Diverged):
        where = f", detector first fired at step {outcome.loop_step}" if outcome.loop_step else ""
        return [st.bad(f"diverged ({outcome.reason}) after {outcome.steps} steps{where}")]
    lines = [f"solved in {outcome.steps} step(s); {len(outcome.leaves)} leaves"]
    for leaf in outcome.leaves:
        inner = ", ".join(f"({show(s.epsilon_term)} := {show(s.replacement)})" for s in leaf)
        lines.append(f"  S = [{inner}]")
    lines.append("disjunction: " + show(outcome.disjunction))
    if outcome.verdict:
        lines.append("verdict: " + st.good("Tautology"))
    else:
        lines.append("verdict: " + st.bad(str(outcome.verdict)))
    return lines


# -- commands ----------------------------------------------------------------


def read_source(source: str, inline: bool) -> str:
    if inline:
        return source
    if source == "-":
        return sys.stdin.read()
    path = Path(source)
    if not path.is_file():
        raise UsageError(f"no such file: {source}")
    return path.read_text(encoding="utf-8")


def _looks_like_program(text: str) -> bool:
    return re.search(r"^\s*(let|system)\b", text, re.MULTILINE) is not None


def cmd_parse(args, out: TextIO) -> int:
    text = read_source(args.source, args.expr)
    if _looks_like_program(text):
        prog = parse_program(text)
        for name, term in prog.lets.items():
            print(f"let {name} = {to_str(term)};", file=out)
        for name, formulas in prog.systems:
            print(f"system {name} {{", file=out)
            for f in formulas:
                print(f"  {to_str(f)};", file=out)
            print("}", file=out)
    else:
        print(to_str(parse(text.strip())), file=out)
    return EXIT_OK


def cmd_translate(args, out: TextIO) -> int:
    text = read_source(args.source, args.expr)
    if _looks_like_program(text):
        for name, formulas in parse_program(text).systems:
            print(f"system {name} {{", file=out)
            for f in formulas:
                print(f"  {to_str(epsilon_translate(f))};", file=out)
            print("}", file=out)
    else:
        print(to_str(epsilon_translate(parse(text.strip()))), file=out)
    return EXIT_OK


def outcome_code(outcome) -> int:
    if isinstance(outcome, Diverged):
        return EXIT_DIVERGED
    return EXIT_OK if verified(outcome) else EXIT_UNVERIFIED


def verified(result: SolveResult) -> bool:
    """Kernel verdict, plus an independent evaluation of any countermodel."""
    if isinstance(result.verdict, Countermodel):
        assert not evaluate(result.disjunction, result.verdict.assignment)
        return False
    return True


def run_system(
    name: str,
    source: str,
    system: SystemE,
    config: RunConfig,
    show: Abbreviations,
    st: Style,
    out: TextIO,
    quiet: bool = False,
) -> tuple[int, dict]:
    error = None
    outcome = None
    try:
        outcome = solve(system, config.strategy, config.budget, config.mode, config.apply_order, config.taut_threshold)
    except DestroyedCriticalFormula as exc:
        error = exc
    doc = trace_document(name, source, system, config, outcome, error)
    code = EXIT_UNVERIFIED if error is not None else outcome_code(outcome)
    if config.trace_format == "text" and not quiet:
        print(st.head(f"== system {name} ({config.strategy}, {config.mode})"), file=out)
        for f in system.formulas:
            print(f"    {show(f)}", file=out)
        trace = error.trace if error is not None else outcome.trace
        for r in trace:
            print("\n".join(render_step(r, show, st)), file=out)
        if error is not None:
            print(st.bad(f"step {error.step}: eliminating {show(error.chosen)} destroyed "
                         f"{show(error.formula)} in branch {error.branch}"), file=out)
        else:
            print("\n".join(render_outcome(outcome, show, st)), file=out)
    return code, doc


def combine(codes: Sequence[int]) -> int:
    for c in (EXIT_ERROR, EXIT_UNVERIFIED, EXIT_DIVERGED):
        if c in codes:
            return c
    return EXIT_OK


def emit_documents(docs: list[dict], config: RunConfig, trace_out: str | None, out: TextIO) -> None:
    if config.trace_format != "json" and trace_out is None:
        return
    payload = docs[0] if len(docs) == 1 else docs
    if trace_out:
        Path(trace_out).write_text(dump_json(payload), encoding="utf-8")
    else:
        out.write(dump_json(payload))


def config_from(args) -> RunConfig:
    strategy = getattr(args, "strategy", None) or "maximal"
    return RunConfig(
        strategy=strategy,
        budget=args.budget,
        apply_order=args.apply_order,
        mode=args.mode or default_mode(strategy),
        trace_format=args.trace_format,
        taut_threshold=args.taut_threshold,
    )


def cmd_solve(args, out: TextIO) -> int:
    text = read_source(args.source, args.expr)
    config = config_from(args)
    prog = parse_program(text)
    systems = prog.systems
    if args.system:
        systems = [s for s in systems if s[0] == args.system]
        if not systems:
            raise UsageError(f"no system named {args.system!r}")
    if not systems:
        raise UsageError("input contains no system block")
    show = Abbreviations(prog.lets if args.abbreviate else None)
    st = style_from_env()
    codes, docs = [], []
    for name, formulas in systems:
        code, doc = run_system(name, text, build_system(formulas), config, show, st, out)
        codes.append(code)
        docs.append(doc)
    emit_documents(docs, config, args.trace_out, out)
    return combine(codes)


def cmd_verify(args, out: TextIO) -> int:
    """Re-check a JSON trace document, or decide a formula directly."""
    text = read_source(args.source, args.expr)
    st = style_from_env()
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        return verify_document(json.loads(text), args.taut_threshold, st, out)
    verdict = is_tautology(parse(text.strip()), args.taut_threshold)
    print(st.good("Tautology") if verdict else st.bad(str(verdict)), file=out)
    return EXIT_OK if verdict else EXIT_UNVERIFIED


def verify_document(payload, threshold: int, st: Style, out: TextIO) -> int:
    jsonschema.validate(payload, schema())
    docs = payload if isinstance(payload, list) else [payload]
    codes = []
    for doc in docs:
        res = doc["result"]
        if res["status"] != "solved":
            print(f"{doc['system_name']}: {res['status']}, nothing to verify", file=out)
            codes.append(EXIT_DIVERGED if res["status"] == "diverged" else EXIT_UNVERIFIED)
            continue
        system = build_system(parse(f) for f in doc["system"])
        leaves = [
            tuple(SubstitutionStep(parse_term(e), parse_term(t)) for e, t in leaf)
            for leaf in res["leaves"]
        ]
        disj = assemble_disjunction(system, leaves, doc["config"]["apply_order"])
        same = canonical(disj) == canonical(parse(res["disjunction"]))
        verdict = is_tautology(disj, threshold)
        ok = same and bool(verdict) and res["verdict"] == "Tautology"
        status = st.good("verified") if ok else st.bad("verification failed")
        print(f"{doc['system_name']}: {status} (disjunction reproduced: {same}; verdict: {verdict})", file=out)
        codes.append(EXIT_OK if ok else EXIT_UNVERIFIED)
    return combine(codes)


# -- demos -------------------------------------------------------------------


def demo_ackermann(args, out: TextIO) -> int:
    prog = parse_program(LOOP_SOURCE)
    (name, formulas), = prog.systems
    system = build_system(formulas)
    show = Abbreviations(loop_names())
    st = style_from_env()
    if args.strategy:
        config = config_from(args)
        code, doc = run_system(name, LOOP_SOURCE, system, config, show, st, out)
        if config.trace_format == "text" and config.strategy == "first-listed":
            print(loop_comparison(doc, show), file=out)
        emit_documents([doc], config, args.trace_out, out)
        return code
    results = {}
    docs = []
    for strategy in ("first-listed", "maximal"):
        config = RunConfig(strategy, args.budget, args.apply_order, default_mode(strategy),
                           args.trace_format, args.taut_threshold)
        code, doc = run_system(name, LOOP_SOURCE, system, config, show, st, out, quiet=True)
        results[strategy] = (code, doc)
        docs.append(doc)
    if args.trace_format == "text":
        print(st.head("ackermann-loop: the same system under two selection strategies"), file=out)
        for f in system.formulas:
            print(f"    {show(f)}", file=out)
        for strategy, (code, doc) in results.items():
            res = doc["result"]
            if res["status"] == "solved":
                summary = f"solved in {res['steps']} steps, {len(res['leaves'])} leaves, {res['verdict']}"
            else:
                summary = f"{res['status']} ({res.get('reason')}) after {res['steps']} steps"
            print(f"  {strategy:>13}: {summary} [exit {code}]", file=out)
    emit_documents(docs, RunConfig(trace_format=args.trace_format), args.trace_out, out)
    expected = results["first-listed"][0] == EXIT_DIVERGED and results["maximal"][0] == EXIT_OK
    return EXIT_OK if expected else EXIT_UNVERIFIED


def loop_comparison(doc: dict, show: Abbreviations) -> str:
    """Check each recorded step against the closed form.

    The first elimination already yields the closed form at ``n = 0``, so
    expansion ``k`` is compared with ``n = k - 1``.
    """
    lines = ["closed form {P(e[n+2],e[n]) -> P(e[n+1],e[n]), P(e[n+3],e[n+1]) -> P(e[n+2],e[n+1])}:"]
    for step in doc["steps"]:
        k = step["step"]
        got = build_system(parse(f) for f in step["system"])
        want = build_system(loop_step_system(k - 1))
        lines.append(f"  step {k}: {'matches' if got.alpha_eq(want) else 'differs from'} n = {k - 1}")
    return "\n".join(lines)


def demo_so_step(args, out: TextIO) -> int:
    system = so_step_system()
    st = style_from_env()
    e = select_second_order(system)
    branches = so_principal_step(system, e, "permissive")
    report = complexity_report(system, branches, [CONSTRUCTED_NOTE])
    print(st.head("so-step: one principal step on a second-order system"), file=out)
    print(f"  owner {SO_OWNER}, witness {SO_WITNESS}", file=out)
    print("  system:", file=out)
    for f in system.formulas:
        print(f"    {to_str(f)}", file=out)
    print(f"  eliminate {to_str(e)} {complexity(e)}", file=out)
    for lab, s in branches:
        print(f"  branch {lab}:", file=out)
        for f in s.formulas:
            print(f"    {to_str(f)}", file=out)
    print(report.render(), file=out)
    if args.i_know_this_is_open:
        current = union(s for _, s in branches)
        for k in range(2, args.steps + 1):
            if not current:
                break
            owner = select_second_order(current)
            nxt = so_principal_step(current, owner, "permissive")
            print(st.note(f"-- repeated step {k} (no termination claim)"), file=out)
            print(complexity_report(current, nxt).render(), file=out)
            current = union(s for _, s in nxt)
    return EXIT_OK


def demo_identity(args, out: TextIO) -> int:
    (name, formulas), = parse_program(IDENTITY_SOURCE).systems
    config = config_from(args)
    code, doc = run_system(name, IDENTITY_SOURCE, build_system(formulas), config, Abbreviations(), style_from_env(), out)
    emit_documents([doc], config, args.trace_out, out)
    return code


def cmd_demo(args, out: TextIO) -> int:
    match args.name:
        case "ackermann-loop":
            return demo_ackermann(args, out)
        case "so-step":
            return demo_so_step(args, out)
        case "identity":
            return demo_identity(args, out)
    raise UsageError(f"unknown demo {args.name!r}; available: {', '.join(DEMOS)}")


# -- argument parsing --------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _run_flags(p: argparse.ArgumentParser, strategy_default: str | None) -> None:
    p.add_argument("--strategy", choices=STRATEGY_CHOICES, default=strategy_default)
    p.add_argument("--budget", type=_positive, default=100, help="maximum number of expansions")
    p.add_argument("--apply-order", choices=APPLY_ORDERS, default="recorded")
    p.add_argument("--mode", choices=MODES, default=None,
                   help="strict stops on a destroyed critical formula (default for maximal)")
    p.add_argument("--trace-format", choices=TRACE_FORMATS, default="text")
    p.add_argument("--trace-out", metavar="PATH", help="write the JSON trace here instead of stdout")
    p.add_argument("--taut-threshold", type=int, default=DEFAULT_THRESHOLD,
                   help="largest atom count decided by truth table")


def _source(p: argparse.ArgumentParser) -> None:
    p.add_argument("source", help="input file, '-' for stdin, or text with -e")
    p.add_argument("-e", "--expr", action="store_true", help="treat SOURCE as literal text")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="epsub", description="Epsilon substitution method toolkit.")
    parser.add_argument("--version", action="version", version=f"epsub {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("parse", help="parse and pretty-print input")
    _source(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("translate", help="replace quantifiers by epsilon terms")
    _source(p)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("solve", help="run the substitution process on system blocks")
    _source(p)
    p.add_argument("--system", help="solve only the named system")
    p.add_argument("--no-abbreviate", dest="abbreviate", action="store_false",
                   help="print epsilon terms in full instead of by their let names")
    _run_flags(p, "maximal")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="re-check a JSON trace, or decide a quantifier-free formula")
    _source(p)
    p.add_argument("--taut-threshold", type=int, default=DEFAULT_THRESHOLD)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo", help=f"run a built-in scenario ({', '.join(DEMOS)})")
    p.add_argument("name")
    _run_flags(p, None)
    p.add_argument("--i-know-this-is-open", action="store_true",
                   help="so-step only: repeat the step; termination is not claimed")
    p.add_argument("--steps", type=_positive, default=2, help="number of steps with --i-know-this-is-open")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", FreeVariableWarning)
        try:
            return args.func(args, out)
        except (UsageError, ParseError, NotCritical, ValueError, OSError, jsonschema.ValidationError) as exc:
            print(f"epsub: error: {getattr(exc, 'message', None) or exc}", file=sys.stderr)
            return EXIT_ERROR
        finally:
            for w in caught:
                print(f"epsub: warning: {w.message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
