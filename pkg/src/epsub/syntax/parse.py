"""Recursive-descent parser for the epsilon-calculus input language.

Grammar summary::

    formula  := quant | imp
    quant    := ("exists" | "forall") ID "." formula
    imp      := disj ["->" imp]
    disj     := conj ["|" disj]
    conj     := unary ["&" conj]
    unary    := "~" unary | quant | primary
    primary  := "(" formula ")" | "(" predexpr ")" args | ID [args] | "true"
    term     := "eps" ID "." formula | ID [args] | NUMBER
    predexpr := "EPS" ID "." formula | "lam" ID+ "." formula

Identifiers in term position resolve to a bound variable when a binder is in
scope, to a free variable when they start with one of ``u``-``z`` (reported
through :class:`FreeVariableWarning`), and to a constant otherwise.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field

from .ast import (
    TOP,
    Atom,
    Conjunction,
    Disjunction,
    EpsilonTerm,
    Exists,
    Forall,
    Formula,
    FunctionApp,
    Implication,
    LambdaAbstraction,
    Negation,
    Node,
    PredicateApplication,
    PredicateVariable,
    SecondOrderEpsilon,
    SOExists,
    SOForall,
    Term,
    Variable,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class ArityError(ParseError):
    pass


class FreeVariableWarning(UserWarning):
    pass


KEYWORDS = {"eps", "EPS", "lam", "exists", "forall", "let", "system", "true"}
FREE_VARIABLE_INITIALS = "uvwxyz"

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*)
  | (?P<arrow>->) | (?P<num>[0-9]+) | (?P<id>[A-Za-z][A-Za-z0-9_]*)
  | (?P<punct>[~&|().,;{}=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("arrow", "num", "id", "punct"):
            tok_kind = "kw" if kind == "id" and m.group() in KEYWORDS else kind
            out.append(Token(tok_kind, m.group(), line, col))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


@dataclass
class _Binding:
    kind: str  # "ind", "pred" or "quant" (undetermined until used)
    arity: int | None = None
    used_as_term: bool = False


@dataclass
class Program:
    """A parsed input file: abbreviations plus named systems of formulas."""

    lets: dict[str, Term] = field(default_factory=dict)
    systems: list[tuple[str, list[Formula]]] = field(default_factory=list)


class Parser:
    def __init__(self, text: str, lets: dict[str, Term] | None = None):
        self.tokens = tokenize(text)
        self.i = 0
        self.scope: list[tuple[str, _Binding]] = []
        self.pred_arity: dict[str, int] = {}
        self.func_arity: dict[str, int] = {}
        self.lets: dict[str, Term] = dict(lets or {})

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def expect(self, text: str) -> Token:
        if not self.at(text):
            got = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {got!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self) -> Token:
        if self.tok.kind != "id":
            raise self.error(f"expected identifier, found {self.tok.text or 'end of input'!r}")
        tok = self.tok
        self.i += 1
        return tok

    def lookup(self, name: str) -> _Binding | None:
        for n, b in reversed(self.scope):
            if n == name:
                return b
        return None

    def check_arity(self, table: dict[str, int], name: str, n: int, tok: Token, what: str) -> None:
        known = table.setdefault(name, n)
        if known != n:
            raise ArityError(f"{what} {name!r} used with arity {n}, declared with arity {known}", tok.line, tok.column)

    # -- entry points --------------------------------------------------------

    def finish(self) -> None:
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")

    def expression(self) -> Node:
        if self.at("eps"):
            return self.term()
        if self.at("EPS") or self.at("lam"):
            return self.predexpr()
        return self.formula()

    def program(self) -> Program:
        prog = Program(lets=self.lets)
        anon = 0
        # Arity tables are per system block, seeded from the abbreviations.
        let_tables = (dict(self.pred_arity), dict(self.func_arity))
        while self.tok.kind != "eof":
            if self.at("let"):
                self.i += 1
                name = self.ident()
                self.expect("=")
                self.lets[name.text] = self.term()
                let_tables = (dict(self.pred_arity), dict(self.func_arity))
                if self.at(";"):
                    self.i += 1
            elif self.at("system"):
                self.i += 1
                if self.tok.kind == "id":
                    label = self.ident().text
                else:
                    anon += 1
                    label = f"system{anon}"
                self.expect("{")
                self.pred_arity, self.func_arity = dict(let_tables[0]), dict(let_tables[1])
                formulas: list[Formula] = []
                while not self.at("}"):
                    formulas.append(self.formula())
                    if self.at(";"):
                        self.i += 1
                    elif not self.at("}"):
                        raise self.error(f"expected ';' or '}}', found {self.tok.text!r}")
                self.expect("}")
                self.pred_arity, self.func_arity = dict(let_tables[0]), dict(let_tables[1])
                prog.systems.append((label, formulas))
            else:
                raise self.error(f"expected 'let' or 'system', found {self.tok.text or 'end of input'!r}")
        return prog

    # -- formulas ------------------------------------------------------------

    def formula(self) -> Formula:
        if self.at("exists") or self.at("forall"):
            return self.quantifier()
        return self.implication()

    def quantifier(self) -> Formula:
        kw = self.tok.text
        self.i += 1
        name = self.ident().text
        self.expect(".")
        binding = _Binding("quant")
        self.scope.append((name, binding))
        try:
            body = self.formula()
        finally:
            self.scope.pop()
        if binding.kind == "pred":
            if binding.used_as_term:
                raise self.error(f"{name!r} used both as individual and predicate variable")
            cls = SOExists if kw == "exists" else SOForall
            return cls(name, binding.arity, body)
        return (Exists if kw == "exists" else Forall)(name, body)

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.tok.kind == "arrow":
            self.i += 1
            return Implication(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        if self.at("|"):
            self.i += 1
            return Disjunction(left, self.disjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        if self.at("&"):
            self.i += 1
            return Conjunction(left, self.conjunction())
        return left

    def unary(self) -> Formula:
        if self.at("~"):
            self.i += 1
            return Negation(self.unary())
        if self.at("exists") or self.at("forall"):
            return self.quantifier()
        return self.primary()

    def primary(self) -> Formula:
        tok = self.tok
        if self.at("("):
            if self.peek().text in ("lam", "EPS") and self.peek().kind == "kw":
                self.i += 1
                head = self.predexpr()
                self.expect(")")
                args = self.arguments() if self.at("(") else ()
                if len(args) != head.arity:
                    raise ArityError(f"predicate expression of arity {head.arity} applied to {len(args)} arguments",
                                     tok.line, tok.column)
                return PredicateApplication(head, args)
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        if self.at("true"):
            self.i += 1
            return TOP
        name = self.ident()
        args = self.arguments() if self.at("(") else ()
        binding = self.lookup(name.text)
        if binding is not None:
            if binding.kind == "ind":
                raise self.error(f"individual variable {name.text!r} used as a predicate", name)
            if binding.kind == "quant":
                binding.kind = "pred"
                binding.arity = len(args)
            if binding.arity != len(args):
                raise ArityError(f"predicate variable {name.text!r} has arity {binding.arity}, applied to {len(args)}",
                                 name.line, name.column)
            return PredicateApplication(PredicateVariable(name.text, binding.arity), args)
        self.check_arity(self.pred_arity, name.text, len(args), name, "predicate")
        return Atom(name.text, args)

    def arguments(self) -> tuple[Term, ...]:
        self.expect("(")
        args: list[Term] = []
        if not self.at(")"):
            args.append(self.term())
            while self.at(","):
                self.i += 1
                args.append(self.term())
        self.expect(")")
        return tuple(args)

    # -- terms ---------------------------------------------------------------

    def term(self) -> Term:
        tok = self.tok
        if self.at("eps"):
            self.i += 1
            name = self.ident().text
            self.expect(".")
            self.scope.append((name, _Binding("ind")))
            try:
                body = self.formula()
            finally:
                self.scope.pop()
            return EpsilonTerm(name, body)
        if tok.kind == "num":
            self.i += 1
            self.check_arity(self.func_arity, tok.text, 0, tok, "function")
            return FunctionApp(tok.text, ())
        name = self.ident()
        args = self.arguments() if self.at("(") else None
        binding = self.lookup(name.text)
        if binding is not None:
            if args is not None:
                raise self.error(f"variable {name.text!r} applied to arguments", name)
            if binding.kind == "pred":
                raise self.error(f"predicate variable {name.text!r} used as a term", name)
            binding.used_as_term = True
            return Variable(name.text)
        if args is None and name.text in self.lets:
            return self.lets[name.text]
        if args is None and name.text[0] in FREE_VARIABLE_INITIALS:
            warnings.warn(FreeVariableWarning(
                f"free variable {name.text!r} at line {name.line}, column {name.column}"), stacklevel=4)
            return Variable(name.text)
        args = args or ()
        self.check_arity(self.func_arity, name.text, len(args), name, "function")
        return FunctionApp(name.text, args)

    def predexpr(self) -> SecondOrderEpsilon | LambdaAbstraction:
        if self.at("EPS"):
            self.i += 1
            name = self.ident()
            self.expect(".")
            binding = _Binding("pred", arity=None)
            self.scope.append((name.text, binding))
            # Arity is fixed by the first application inside the body.
            binding.kind = "quant"
            try:
                body = self.formula()
            finally:
                self.scope.pop()
            if binding.used_as_term:
                raise self.error(f"{name.text!r} bound by EPS used as a term", name)
            return SecondOrderEpsilon(name.text, binding.arity if binding.arity is not None else 0, body)
        self.expect("lam")
        names = [self.ident().text]
        while self.tok.kind == "id":
            names.append(self.ident().text)
        self.expect(".")
        for n in names:
            self.scope.append((n, _Binding("ind")))
        try:
            body = self.formula()
        finally:
            del self.scope[-len(names):]
        return LambdaAbstraction(tuple(names), body)


def parse(text: str, lets: dict[str, Term] | None = None) -> Node:
    """Parse a formula, an epsilon term, or a predicate expression."""
    p = Parser(text, lets)
    node = p.expression()
    p.finish()
    return node


def parse_formula(text: str, lets: dict[str, Term] | None = None) -> Formula:
    p = Parser(text, lets)
    node = p.formula()
    p.finish()
    return node


def parse_term(text: str, lets: dict[str, Term] | None = None) -> Term:
    p = Parser(text, lets)
    node = p.term()
    p.finish()
    return node


def parse_program(text: str) -> Program:
    return Parser(text).program()
