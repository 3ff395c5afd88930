"""Concrete-syntax printer; output re-parses to an alpha-equivalent tree."""

from __future__ import annotations

from .ast import (
    TOP,
    Atom,
    Conjunction,
    Disjunction,
    EpsilonTerm,
    Exists,
    Forall,
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
    Variable,
    all_names,
    binders,
    body_of,
    walk,
)
from .ops import fresh_name, substitute_var

# Precedence levels; binders extend as far right as possible.
_IMP, _OR, _AND, _NOT, _ATOM = 1, 2, 3, 4, 5
_OPS = {Implication: ("->", _IMP), Disjunction: ("|", _OR), Conjunction: ("&", _AND)}


def _level(f: Node) -> int:
    if isinstance(f, (Exists, Forall, SOExists, SOForall)):
        return 0
    if type(f) in _OPS:
        return _OPS[type(f)][1]
    if isinstance(f, Negation):
        return _NOT
    return _ATOM


def _args(args) -> str:
    parts = [to_str(a) for a in args]
    simple = all(isinstance(a, Variable) or (isinstance(a, FunctionApp) and not a.args) for a in args)
    return "(" + ("," if simple else ", ").join(parts) + ")"


def _symbols(node: Node) -> set[str]:
    return {n.symbol for n, _ in walk(node) if isinstance(n, FunctionApp)}


def _safe_binder(node: Node) -> Node:
    """Rename a binder whose name would re-parse as a different identifier."""
    names = binders(node)
    body = body_of(node)
    clash = _symbols(body) | {n.predicate for n, _ in walk(body) if isinstance(n, Atom)}
    bad = [n for n in names if n in clash]
    if not bad:
        return node
    taken = set(all_names(body)) | set(names)
    new_names = list(names)
    for i, n in enumerate(names):
        if n in clash:
            m = fresh_name("x" if n[:1].islower() or n[:1].isdigit() else "X", taken)
            taken.add(m)
            new_names[i] = m
            repl = Variable(m)
            for sub, _ in walk(body):
                if isinstance(sub, PredicateVariable) and sub.name == n:
                    repl = PredicateVariable(m, sub.arity)
                    break
            body = substitute_var(body, n, repl)
    return type(node)(*_rebinder_fields(node, tuple(new_names), body))


def _rebinder_fields(node, names, body):
    if isinstance(node, LambdaAbstraction):
        return (names, body)
    if isinstance(node, (SecondOrderEpsilon, SOExists, SOForall)):
        return (names[0], node.arity, body)
    return (names[0], body)


def to_str(node: Node) -> str:
    """Render ``node`` in the input grammar."""
    if binders(node):
        node = _safe_binder(node)
    match node:
        case Variable(name):
            return name
        case FunctionApp(sym, ()):
            return sym
        case FunctionApp(sym, args):
            return sym + _args(args)
        case EpsilonTerm(v, body):
            return f"eps {v}. {to_str(body)}"
        case _ if node == TOP:
            return "true"
        case Atom(pred, ()):
            return pred
        case Atom(pred, args):
            return pred + _args(args)
        case PredicateVariable(name, _):
            return name
        case SecondOrderEpsilon(v, _, body):
            return f"EPS {v}. {to_str(body)}"
        case LambdaAbstraction(vs, body):
            return f"lam {' '.join(vs)}. {to_str(body)}"
        case PredicateApplication(head, args):
            h = to_str(head) if isinstance(head, PredicateVariable) else f"({to_str(head)})"
            return h + (_args(args) if args else ("()" if not isinstance(head, PredicateVariable) else ""))
        case Negation(op):
            inner = to_str(op)
            return "~" + (inner if _level(op) >= _NOT else f"({inner})")
        case Exists(v, body) | Forall(v, body):
            kw = "exists" if isinstance(node, Exists) else "forall"
            return f"{kw} {v}. {to_str(body)}"
        case SOExists(v, _, body) | SOForall(v, _, body):
            kw = "exists" if isinstance(node, SOExists) else "forall"
            return f"{kw} {v}. {to_str(body)}"
    if type(node) in _OPS:
        sym, lvl = _OPS[type(node)]
        left, right = node.left, node.right
        # & and | associate to the right, like ->; binders always get parens.
        ls = to_str(left)
        if _level(left) <= lvl:
            ls = f"({ls})"
        rs = to_str(right)
        if _level(right) < lvl or _level(right) == 0:
            rs = f"({rs})"
        return f"{ls} {sym} {rs}"
    raise TypeError(f"cannot print {node!r}")

