"""Epsilon translation, critical formulas, and systems of critical formulas."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .syntax import (
    EpsilonTerm,
    Exists,
    Forall,
    Formula,
    Implication,
    Negation,
    Node,
    PredicateVariable,
    SecondOrderEpsilon,
    SOExists,
    SOForall,
    Term,
    Variable,
    alpha_eq,
    canonical,
    children,
    epsilon_subterms,
    free_names,
    fresh_name,
    is_quantifier_free,
    rebuild,
    substitute,
    substitute_var,
    to_str,
)
from .syntax.ast import all_names, binders, body_of

Matrix = tuple[str, Formula]


class NotCritical(ValueError):
    def __init__(self, index: int, formula: Formula):
        self.index = index
        self.formula = formula
        super().__init__(f"formula {index} is not a critical formula: {to_str(formula)}")


def epsilon_translate(f: Formula) -> Formula:
    """Eliminate quantifiers, innermost first.

    ``exists x. F`` becomes ``F'[eps x. F' / x]`` and ``forall x. F`` becomes
    ``F'[eps x. ~F' / x]`` where ``F'`` is the translated body.
    """
    match f:
        case Exists(v, body):
            b = epsilon_translate(body)
            return substitute_var(b, v, EpsilonTerm(v, b))
        case Forall(v, body):
            b = epsilon_translate(body)
            return substitute_var(b, v, EpsilonTerm(v, Negation(b)))
        case SOExists(v, arity, body):
            b = epsilon_translate(body)
            return substitute_var(b, v, SecondOrderEpsilon(v, arity, b))
        case SOForall(v, arity, body):
            b = epsilon_translate(body)
            return substitute_var(b, v, SecondOrderEpsilon(v, arity, Negation(b)))
    kids = children(f)
    if not kids:
        return f
    new = tuple(epsilon_translate(k) for k in kids)
    if all(a is b for a, b in zip(new, kids)):
        return f
    return rebuild(f, new)


@dataclass(frozen=True)
class CriticalFormula:
    """``F[t] -> F[eps x. F]`` together with its decomposition."""

    formula: Formula
    epsilon_term: EpsilonTerm
    witness: Term
    alternatives: tuple[tuple[EpsilonTerm, Term, Matrix], ...] = field(default=(), compare=False)

    @property
    def matrix(self) -> Matrix:
        return self.epsilon_term.var, self.epsilon_term.body

    def __str__(self) -> str:
        return to_str(self.formula)


def make_critical_formula(matrix: Matrix, witness: Term) -> CriticalFormula:
    var, body = matrix
    if not is_quantifier_free(body):
        raise ValueError(f"matrix body contains a quantifier: {to_str(body)}")
    e = EpsilonTerm(var, body)
    cf = Implication(substitute_var(body, var, witness), substitute_var(body, var, e))
    return CriticalFormula(cf, e, witness)


def _match_hole(pattern: Node, subject: Node, hole: str) -> tuple[bool, Node | None]:
    """Alpha-aware match of ``subject`` against ``pattern`` with one hole.

    Returns ``(matched, t)`` where every occurrence of the free variable
    ``hole`` in ``pattern`` corresponds (up to alpha) to ``t`` in ``subject``;
    ``t`` is ``None`` when the hole does not occur.
    """
    found: list[Node] = []

    def go(p: Node, s: Node, penv: dict[str, int], senv: dict[str, int], depth: int) -> bool:
        if isinstance(p, Variable) and p.name == hole and p.name not in penv:
            if free_names(s) & senv.keys():
                return False
            if found:
                return alpha_eq(found[0], s)
            found.append(s)
            return True
        if type(p) is not type(s):
            return False
        if isinstance(p, (Variable, PredicateVariable)):
            if getattr(p, "arity", None) != getattr(s, "arity", None):
                return False
            pin, sin = penv.get(p.name), senv.get(s.name)
            if pin is None and sin is None:
                return p.name == s.name
            return pin == sin
        pb, sb = binders(p), binders(s)
        if pb or sb:
            if len(pb) != len(sb) or _binder_extra(p) != _binder_extra(s):
                return False
            pe = {**penv, **{n: depth + i for i, n in enumerate(pb)}}
            se = {**senv, **{n: depth + i for i, n in enumerate(sb)}}
            return go(body_of(p), body_of(s), pe, se, depth + len(pb))
        if _label(p) != _label(s):
            return False
        pk, sk = children(p), children(s)
        return len(pk) == len(sk) and all(go(a, b, penv, senv, depth) for a, b in zip(pk, sk))

    ok = go(pattern, subject, {}, {}, 0)
    return ok, (found[0] if ok and found else None)


def _binder_extra(node: Node):
    return getattr(node, "arity", None)


def _label(node: Node):
    return getattr(node, "symbol", None) or getattr(node, "predicate", None)


def recognize_critical(f: Formula) -> list[tuple[EpsilonTerm, Term, Matrix]]:
    """All decompositions of ``f`` as a critical formula, leftmost-outermost.

    An identity implication ``A -> A`` with no other decomposition is
    recognised as the degenerate critical formula of ``eps v. A`` (``v`` not
    free in ``A``) with that term as its own witness.
    """
    if not isinstance(f, Implication):
        return []
    ante, cons = f.left, f.right
    out: list[tuple[EpsilonTerm, Term, Matrix]] = []
    seen: set[Node] = set()
    for e, _ in epsilon_subterms(cons):
        key = canonical(e)
        if key in seen:
            continue
        seen.add(key)
        hole = fresh_name("h", all_names(f) | {e.var})
        pattern = substitute_var(e.body, e.var, Variable(hole))
        if not alpha_eq(substitute(cons, e, Variable(hole)), pattern):
            continue
        ok, t = _match_hole(pattern, ante, hole)
        if not ok:
            continue
        if t is None:
            t = e
        out.append((e, t, (e.var, e.body)))
    if not out and alpha_eq(ante, cons) and is_quantifier_free(cons):
        v = fresh_name("x", all_names(cons))
        e = EpsilonTerm(v, cons)
        out.append((e, e, (v, cons)))
    return out


def critical_formula(f: Formula) -> CriticalFormula | None:
    """Validate ``f`` and wrap it with its primary decomposition."""
    decomp = recognize_critical(f)
    if not decomp:
        return None
    e, t, _ = decomp[0]
    return CriticalFormula(f, e, t, tuple(decomp))


@dataclass(frozen=True)
class SystemE:
    """Ordered finite set of critical formulas (deduplicated up to alpha).

    ``dropped`` carries formulas that failed re-validation after a
    substitution (permissive mode only); they are not members.
    """

    members: tuple[CriticalFormula, ...] = ()
    dropped: tuple[Formula, ...] = field(default=(), compare=False)

    @classmethod
    def of(cls, members: Iterable[CriticalFormula], dropped: Sequence[Formula] = ()) -> "SystemE":
        seen: set[Node] = set()
        kept = []
        for m in members:
            k = canonical(m.formula)
            if k not in seen:
                seen.add(k)
                kept.append(m)
        return cls(tuple(kept), tuple(dropped))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __bool__(self) -> bool:
        return bool(self.members)

    @property
    def formulas(self) -> list[Formula]:
        return [m.formula for m in self.members]

    def owners(self) -> list[EpsilonTerm]:
        """Distinct owning epsilon terms, in order of first ownership."""
        seen: set[Node] = set()
        out = []
        for m in self.members:
            k = canonical(m.epsilon_term)
            if k not in seen:
                seen.add(k)
                out.append(m.epsilon_term)
        return out

    def alpha_eq(self, other: "SystemE") -> bool:
        """Same formulas up to alpha, ignoring order."""
        a = {canonical(f) for f in self.formulas}
        b = {canonical(f) for f in other.formulas}
        return a == b and len(self) == len(other)

    def __str__(self) -> str:
        return "{" + "; ".join(to_str(f) for f in self.formulas) + "}"


def build_system(formulas: Iterable[Formula]) -> SystemE:
    members = []
    for i, f in enumerate(formulas):
        cf = critical_formula(f)
        if cf is None:
            raise NotCritical(i, f)
        members.append(cf)
    return SystemE.of(members)


__all__ = [
    "CriticalFormula",
    "Matrix",
    "NotCritical",
    "SystemE",
    "build_system",
    "critical_formula",
    "epsilon_translate",
    "make_critical_formula",
    "recognize_critical",
]
