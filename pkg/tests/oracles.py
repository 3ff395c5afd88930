"""Independent reference implementations used to check the library.

Nothing here imports the library's own alpha-normaliser, evaluator,
complexity recursion or multiset comparison.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import fields

from epsub.syntax import (
    Atom,
    Conjunction,
    Disjunction,
    EpsilonTerm,
    Exists,
    Forall,
    Implication,
    LambdaAbstraction,
    Negation,
    PredicateApplication,
    PredicateVariable,
    SecondOrderEpsilon,
    SOExists,
    SOForall,
    Variable,
)

_BINDING = (EpsilonTerm, Exists, Forall, SecondOrderEpsilon, SOExists, SOForall)


def debruijn(node, env=()):
    """Nameless form: bound names become their distance to the binder."""
    match node:
        case Variable(name) | PredicateVariable(name, _):
            tag = type(node).__name__
            if name in env:
                return (tag, "bound", env.index(name), getattr(node, "arity", None))
            return (tag, "free", name, getattr(node, "arity", None))
        case LambdaAbstraction(names, body):
            return ("lam", len(names), debruijn(body, tuple(reversed(names)) + env))
        case _ if isinstance(node, _BINDING):
            extra = getattr(node, "arity", None) if not isinstance(node, (EpsilonTerm, Exists, Forall)) else None
            return (type(node).__name__, extra, debruijn(node.body, (node.var,) + env))
    out = [type(node).__name__]
    for f in fields(node):
        v = getattr(node, f.name)
        if isinstance(v, tuple):
            out.append(tuple(debruijn(k, env) for k in v))
        elif isinstance(v, str) or isinstance(v, int):
            out.append(v)
        else:
            out.append(debruijn(v, env))
    return tuple(out)


def alpha_equal(a, b) -> bool:
    return debruijn(a) == debruijn(b)


# -- propositional ----------------------------------------------------------


def atoms_of(f) -> list:
    """Distinct atoms up to alpha, in first-occurrence order."""
    seen, out = set(), []

    def go(n):
        match n:
            case Atom() | PredicateApplication():
                k = debruijn(n)
                if k not in seen:
                    seen.add(k)
                    out.append(n)
            case Negation(op):
                go(op)
            case Conjunction(l, r) | Disjunction(l, r) | Implication(l, r):
                go(l)
                go(r)
            case _:
                raise TypeError(n)

    go(f)
    return out


def value(f, model: dict) -> bool:
    match f:
        case Atom("true", ()):
            return True
        case Atom() | PredicateApplication():
            return model[debruijn(f)]
        case Negation(op):
            return not value(op, model)
        case Conjunction(l, r):
            return value(l, model) and value(r, model)
        case Disjunction(l, r):
            return value(l, model) or value(r, model)
        case Implication(l, r):
            return (not value(l, model)) or value(r, model)
    raise TypeError(f)


def brute_force_tautology(f) -> bool:
    """Exhaustive truth table, all rows at once: atom ``i`` is an integer
    whose row bits alternate in blocks of ``2**i``."""
    index: dict = {}
    tree = _lower(f, index)
    rows = 1 << len(index)
    full = (1 << rows) - 1
    cols = []
    for i in range(len(index)):
        block = 1 << i
        unit = ((1 << block) - 1) << block  # 2*block bits, upper half set
        col, width = unit, 2 * block
        while width < rows:
            col |= col << width
            width *= 2
        cols.append(col & full)

    def go(t):
        if t is True:
            return full
        if isinstance(t, int):
            return cols[t]
        if t[0] == "not":
            return full & ~go(t[1])
        a, b = go(t[1]), go(t[2])
        return a & b if t[0] == "and" else a | b

    return go(tree) == full


def _lower(f, index: dict):
    match f:
        case Atom("true", ()):
            return True
        case Atom() | PredicateApplication():
            return index.setdefault(debruijn(f), len(index))
        case Negation(op):
            return ("not", _lower(op, index))
        case Conjunction(l, r):
            return ("and", _lower(l, index), _lower(r, index))
        case Disjunction(l, r):
            return ("or", _lower(l, index), _lower(r, index))
        case Implication(l, r):
            return ("or", ("not", _lower(l, index)), _lower(r, index))
    raise TypeError(f)


def _fix(t, atom: int, v: bool):
    """Set one atom and fold constants."""
    if isinstance(t, bool):
        return t
    if isinstance(t, int):
        return v if t == atom else t
    if t[0] == "not":
        a = _fix(t[1], atom, v)
        return (not a) if isinstance(a, bool) else ("not", a)
    a, b = _fix(t[1], atom, v), _fix(t[2], atom, v)
    absorbing = t[0] == "or"
    if a is absorbing or b is absorbing:
        return absorbing
    if isinstance(a, bool):
        return b
    if isinstance(b, bool):
        return a
    return (t[0], a, b)


def _first_atom(t):
    if isinstance(t, int) and not isinstance(t, bool):
        return t
    for k in t[1:]:
        if not isinstance(k, bool):
            return _first_atom(k)


def shannon_tautology(f) -> bool:
    """Case split on atoms with constant folding; exponential only in the
    atoms that survive simplification."""
    def go(t):
        if isinstance(t, bool):
            return t
        a = _first_atom(t)
        return go(_fix(t, a, True)) and go(_fix(t, a, False))

    return go(_lower(f, {}))


def tautology_oracle(f, brute_limit: int = 20) -> bool:
    if len(atoms_of(f)) <= brute_limit:
        return brute_force_tautology(f)
    return shannon_tautology(f)


def value_under_keys(f, assignment: dict[str, bool], key) -> bool:
    """Evaluate with a model keyed by the library's printed atom keys."""
    model = {}
    for a in atoms_of(f):
        if a != Atom("true", ()):
            model[debruijn(a)] = assignment[key(a)]
    return value(f, model)


# -- complexity ---------------------------------------------------------------


def _free(node, bound=frozenset()) -> set:
    match node:
        case Variable(name) | PredicateVariable(name, _):
            return set() if name in bound else {name}
        case LambdaAbstraction(names, body):
            return _free(body, bound | set(names))
        case _ if isinstance(node, _BINDING):
            return _free(node.body, bound | {node.var})
    out = set()
    for f in fields(node):
        v = getattr(node, f.name)
        for k in (v if isinstance(v, tuple) else (v,)):
            if not isinstance(k, (str, int)):
                out |= _free(k, bound)
    return out


def _subnodes(node):
    for f in fields(node):
        v = getattr(node, f.name)
        for k in (v if isinstance(v, tuple) else (v,)):
            if not isinstance(k, (str, int)):
                yield k


def _eps_below(node, var=None):
    """Epsilon-like nodes strictly below ``node``; when ``var`` is given,
    stop at rebinding of ``var``."""
    for k in _subnodes(node):
        if isinstance(k, (EpsilonTerm, SecondOrderEpsilon)):
            yield k
        if var is not None:
            if isinstance(k, _BINDING) and k.var == var:
                continue
            if isinstance(k, LambdaAbstraction) and var in k.vars:
                continue
        yield from _eps_below(k, var)


def oracle_rank(e) -> int:
    subs = [s for s in _eps_below(e, e.var) if e.var in _free(s)]
    return 1 + max((oracle_rank(s) for s in subs), default=0)


def oracle_degree(e) -> int:
    return 1 + max((oracle_degree(s) for s in _eps_below(e)), default=0)


# -- multisets ----------------------------------------------------------------


def sub_multisets(m: Counter):
    keys = list(m)
    for counts in itertools.product(*(range(m[k] + 1) for k in keys)):
        yield Counter({k: c for k, c in zip(keys, counts) if c})


def dm_less(m: Counter, n: Counter) -> bool:
    """``m < n`` iff ``m = (n - X) + Y`` with ``X`` non-empty, ``X <= n`` and
    each element of ``Y`` below some element of ``X``."""
    for x in sub_multisets(n):
        if not x:
            continue
        rest = n - x
        if any(rest[k] > m[k] for k in rest):
            continue
        y = m - rest
        if all(any(b < a for a in x) for b in y):
            return True
    return False
