"""Immutable syntax trees for first-order logic with epsilon terms.

The second-order extension nodes (predicate variables, second-order epsilon
terms, lambda abstractions) live here as well so that every generic
traversal (free names, alpha-normalisation, substitution, printing) handles
them without special cases elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union


class Node:
    """Marker base class for all syntax nodes."""

    __slots__ = ()


class Term(Node):
    __slots__ = ()


class Formula(Node):
    __slots__ = ()


class PredicateExpr(Node):
    """Anything that can stand in head position of a predicate application."""

    __slots__ = ()


# -- terms -------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Variable(Term):
    name: str


@dataclass(frozen=True, slots=True)
class FunctionApp(Term):
    symbol: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class EpsilonTerm(Term):
    var: str
    body: Formula


# -- formulas ----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    predicate: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class Negation(Formula):
    operand: Formula


@dataclass(frozen=True, slots=True)
class Conjunction(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Disjunction(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implication(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class Forall(Formula):
    var: str
    body: Formula


# -- second-order extension --------------------------------------------------


@dataclass(frozen=True, slots=True)
class PredicateVariable(PredicateExpr):
    name: str
    arity: int


@dataclass(frozen=True, slots=True)
class SecondOrderEpsilon(PredicateExpr):
    var: str
    arity: int
    body: Formula


@dataclass(frozen=True, slots=True)
class LambdaAbstraction(PredicateExpr):
    vars: tuple[str, ...]
    body: Formula

    @property
    def arity(self) -> int:
        return len(self.vars)


@dataclass(frozen=True, slots=True)
class PredicateApplication(Formula):
    head: PredicateExpr
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class SOExists(Formula):
    var: str
    arity: int
    body: Formula


@dataclass(frozen=True, slots=True)
class SOForall(Formula):
    var: str
    arity: int
    body: Formula


AnyNode = Union[Term, Formula, PredicateExpr]
Position = tuple[int, ...]

BINARY = (Conjunction, Disjunction, Implication)
QUANTIFIERS = (Exists, Forall, SOExists, SOForall)
EPSILON_LIKE = (EpsilonTerm, SecondOrderEpsilon)


def children(node: Node) -> tuple[Node, ...]:
    match node:
        case Variable() | PredicateVariable():
            return ()
        case FunctionApp(_, args) | Atom(_, args):
            return args
        case PredicateApplication(head, args):
            return (head, *args)
        case Negation(op):
            return (op,)
        case Conjunction(l, r) | Disjunction(l, r) | Implication(l, r):
            return (l, r)
        case EpsilonTerm(_, body) | Exists(_, body) | Forall(_, body):
            return (body,)
        case SecondOrderEpsilon(_, _, body) | SOExists(_, _, body) | SOForall(_, _, body):
            return (body,)
        case LambdaAbstraction(_, body):
            return (body,)
    raise TypeError(f"not a syntax node: {node!r}")


def rebuild(node: Node, kids: tuple[Node, ...]) -> Node:
    """Return a copy of ``node`` with its children replaced by ``kids``."""
    match node:
        case FunctionApp(sym, _):
            return FunctionApp(sym, tuple(kids))
        case Atom(pred, _):
            return Atom(pred, tuple(kids))
        case PredicateApplication():
            return PredicateApplication(kids[0], tuple(kids[1:]))
        case Negation():
            return Negation(kids[0])
        case Conjunction() | Disjunction() | Implication():
            return type(node)(kids[0], kids[1])
        case _ if binders(node):
            return with_binders(node, binders(node), kids[0])
        case Variable() | PredicateVariable():
            return node
    raise TypeError(f"not a syntax node: {node!r}")


def binders(node: Node) -> tuple[str, ...]:
    """Names bound by ``node`` over its (single) body child."""
    match node:
        case EpsilonTerm(v, _) | Exists(v, _) | Forall(v, _):
            return (v,)
        case SecondOrderEpsilon(v, _, _) | SOExists(v, _, _) | SOForall(v, _, _):
            return (v,)
        case LambdaAbstraction(vs, _):
            return vs
    return ()


def with_binders(node: Node, names: tuple[str, ...], body: Node) -> Node:
    match node:
        case EpsilonTerm() | Exists() | Forall():
            return type(node)(names[0], body)
        case SecondOrderEpsilon(_, arity, _) | SOExists(_, arity, _) | SOForall(_, arity, _):
            return type(node)(names[0], arity, body)
        case LambdaAbstraction():
            return LambdaAbstraction(tuple(names), body)
    raise TypeError(f"{type(node).__name__} binds nothing")


def body_of(node: Node) -> Node:
    return children(node)[0]


@lru_cache(maxsize=1 << 16)
def free_names(node: Node) -> frozenset[str]:
    """Free individual and predicate variable names of ``node``."""
    match node:
        case Variable(name):
            return frozenset((name,))
        case PredicateVariable(name, _):
            return frozenset((name,))
    kids = children(node)
    out = frozenset().union(*(free_names(k) for k in kids)) if kids else frozenset()
    bound = binders(node)
    return out - frozenset(bound) if bound else out


@lru_cache(maxsize=1 << 16)
def all_names(node: Node) -> frozenset[str]:
    """Every identifier occurring anywhere in ``node`` (symbols included)."""
    match node:
        case Variable(name) | PredicateVariable(name, _):
            return frozenset((name,))
        case FunctionApp(sym, _):
            own = frozenset((sym,))
        case Atom(pred, _):
            own = frozenset((pred,))
        case _:
            own = frozenset(binders(node))
    kids = children(node)
    return own.union(*(all_names(k) for k in kids)) if kids else own


def is_closed(node: Node) -> bool:
    return not free_names(node)


def walk(node: Node, pos: Position = ()) -> Iterator[tuple[Node, Position]]:
    """Pre-order (leftmost-outermost) traversal yielding nodes with positions."""
    stack = [(node, pos)]
    while stack:
        cur, p = stack.pop()
        yield cur, p
        kids = children(cur)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((kids[i], p + (i,)))


def subterm_at(node: Node, pos: Position) -> Node:
    for i in pos:
        node = children(node)[i]
    return node


def replace_at(node: Node, pos: Position, new: Node) -> Node:
    if not pos:
        return new
    kids = list(children(node))
    kids[pos[0]] = replace_at(kids[pos[0]], pos[1:], new)
    return rebuild(node, tuple(kids))


def size(node: Node) -> int:
    return 1 + sum(size(k) for k in children(node))


def is_quantifier_free(node: Node) -> bool:
    return not any(isinstance(n, QUANTIFIERS) for n, _ in walk(node))


def conjoin(formulas) -> Formula:
    """Right-associated conjunction; the empty conjunction is ``Top``."""
    formulas = list(formulas)
    if not formulas:
        return TOP
    out = formulas[-1]
    for f in reversed(formulas[:-1]):
        out = Conjunction(f, out)
    return out


def disjoin(formulas) -> Formula:
    formulas = list(formulas)
    if not formulas:
        return Negation(TOP)
    out = formulas[-1]
    for f in reversed(formulas[:-1]):
        out = Disjunction(f, out)
    return out


def constant(name: str) -> FunctionApp:
    return FunctionApp(name, ())


# Nullary atom used as the empty conjunction; printed as ``true``.
TOP = Atom("true", ())
