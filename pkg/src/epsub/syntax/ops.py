"""Alpha-equivalence, capture-avoiding substitution and epsilon enumeration."""

from __future__ import annotations

import itertools
import re
from functools import lru_cache
from typing import Mapping

from .ast import (
    EPSILON_LIKE,
    EpsilonTerm,
    Node,
    Position,
    PredicateVariable,
    Variable,
    all_names,
    binders,
    body_of,
    children,
    free_names,
    rebuild,
    walk,
    with_binders,
)

# Canonical bound names cannot clash with parsed identifiers.
_CANON = "·"


def _canon(node: Node, env: Mapping[str, str], depth: int) -> Node:
    match node:
        case Variable(name):
            return Variable(env[name]) if name in env else node
        case PredicateVariable(name, arity):
            return PredicateVariable(env[name], arity) if name in env else node
    names = binders(node)
    if names:
        fresh = tuple(f"{_CANON}{depth + i}" for i in range(len(names)))
        inner = {**env, **dict(zip(names, fresh))}
        return with_binders(node, fresh, _canon(body_of(node), inner, depth + len(names)))
    kids = children(node)
    if not kids:
        return node
    return rebuild(node, tuple(_canon(k, env, depth) for k in kids))


_CANON_NAME = re.compile(re.escape(_CANON) + r"(\d+)$")


@lru_cache(maxsize=1 << 16)
def canonical(node: Node) -> Node:
    """Alpha-normal form: bound names replaced by binder-depth indices.

    Subterms cut out of a canonical form can have canonical names free;
    numbering then starts above them so that nothing is captured.
    """
    start = 0
    for name in free_names(node):
        m = _CANON_NAME.match(name)
        if m:
            start = max(start, int(m.group(1)) + 1)
    return _canon(node, {}, start)


def alpha_eq(a: Node, b: Node) -> bool:
    if a is b:
        return True
    return canonical(a) == canonical(b)


_TRAILING_DIGITS = re.compile(r"\d+$")


def fresh_name(base: str, avoid: set[str] | frozenset[str]) -> str:
    stem = _TRAILING_DIGITS.sub("", base) or "v"
    for i in itertools.count(1):
        cand = f"{stem}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def _rename_binders(node: Node, clash: set[str], avoid: set[str]) -> Node:
    """Alpha-rename the binders of ``node`` that appear in ``clash``."""
    names = binders(node)
    body = body_of(node)
    taken = set(avoid) | all_names(body) | set(names)
    mapping: dict[str, Node] = {}
    new_names = []
    for n in names:
        if n in clash:
            m = fresh_name(n, taken)
            taken.add(m)
            new_names.append(m)
            mapping[n] = _same_kind_var(body, n, m)
        else:
            new_names.append(n)
    if mapping:
        body = _subst_vars(body, mapping)
    return with_binders(node, tuple(new_names), body)


def _same_kind_var(body: Node, old: str, new: str) -> Node:
    for n, _ in walk(body):
        if isinstance(n, PredicateVariable) and n.name == old:
            return PredicateVariable(new, n.arity)
    return Variable(new)


def _subst_vars(host: Node, mapping: Mapping[str, Node]) -> Node:
    """Simultaneous capture-avoiding substitution for free variables.

    Keys of ``mapping`` are variable names (individual or predicate);
    predicate variables are replaced wholesale, so a replacement for a
    predicate variable must itself be a predicate expression.
    """
    if not mapping:
        return host
    repl_free = set().union(*(free_names(r) for r in mapping.values()))

    def go(node: Node, live: Mapping[str, Node]) -> Node:
        match node:
            case Variable(name) | PredicateVariable(name, _):
                return live.get(name, node)
        names = binders(node)
        if names:
            inner = {k: v for k, v in live.items() if k not in names}
            if not inner:
                return node
            if not (free_names(node) & inner.keys()):
                return node
            clash = set(names) & repl_free
            if clash:
                node = _rename_binders(node, clash, repl_free | inner.keys())
                names = binders(node)
            new_body = go(body_of(node), inner)
            return with_binders(node, names, new_body)
        kids = children(node)
        if not kids:
            return node
        new = tuple(go(k, live) for k in kids)
        if all(a is b for a, b in zip(new, kids)):
            return node
        return rebuild(node, new)

    return go(host, dict(mapping))


def substitute_var(host: Node, name: str, replacement: Node) -> Node:
    """Replace free occurrences of variable ``name`` by ``replacement``."""
    return _subst_vars(host, {name: replacement})


def substitute_vars(host: Node, mapping: Mapping[str, Node]) -> Node:
    return _subst_vars(host, mapping)


def substitute(host: Node, target: Node, replacement: Node) -> Node:
    """Replace every occurrence of ``target`` (up to alpha) by ``replacement``.

    An occurrence only counts when none of its free variables is bound by a
    binder of ``host`` above it. The replacement is inserted as-is and never
    rescanned, so ``target`` occurring inside ``replacement`` is harmless.
    Host binders that would capture free variables of ``replacement`` are
    renamed.
    """
    key = canonical(target)
    kind = type(target)
    repl_free = free_names(replacement)
    target_size = _size(key)

    def go(node: Node, bound: frozenset[str]) -> Node:
        if type(node) is kind and _size(node) == target_size and canonical(node) == key:
            if not (free_names(node) & bound):
                return replacement
        names = binders(node)
        if names:
            new_body = go(body_of(node), bound | frozenset(names))
            if new_body is body_of(node):
                return node
            clash = set(names) & repl_free
            if clash:
                node = _rename_binders(node, clash, repl_free | bound)
                names = binders(node)
                new_body = go(body_of(node), bound | frozenset(names))
            return with_binders(node, names, new_body)
        kids = children(node)
        if not kids:
            return node
        new = tuple(go(k, bound) for k in kids)
        if all(a is b for a, b in zip(new, kids)):
            return node
        return rebuild(node, new)

    return go(host, frozenset())


@lru_cache(maxsize=1 << 16)
def _size(node: Node) -> int:
    return 1 + sum(_size(k) for k in children(node))


def epsilon_subterms(x: Node) -> list[tuple[EpsilonTerm, Position]]:
    """All first-order epsilon-term occurrences, leftmost-outermost."""
    return [(n, p) for n, p in walk(x) if isinstance(n, EpsilonTerm)]


def epsilon_like_subterms(x: Node) -> list[tuple[Node, Position]]:
    """Occurrences of first- and second-order epsilon terms."""
    return [(n, p) for n, p in walk(x) if isinstance(n, EPSILON_LIKE)]


def occurs(target: Node, host: Node) -> bool:
    return substitute(host, target, _SENTINEL) is not host


_SENTINEL = Variable(_CANON + "hole")


def distinct(nodes) -> list:
    """Deduplicate up to alpha-equivalence, keeping first occurrences."""
    seen: set[Node] = set()
    out = []
    for n in nodes:
        k = canonical(n)
        if k not in seen:
            seen.add(k)
            out.append(n)
    return out
