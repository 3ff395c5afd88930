"""One principal step for second-order epsilon systems.

Second-order critical formulas ``F[T] -> F[EPS X. F]`` carry their witness
``T`` (a lambda abstraction) explicitly, since recognising them would need
higher-order matching. After every substitution the result is beta-reduced.
Only a single step is offered: iterating the second-order process has no
known termination argument, and the complexity report shows why the
first-order one does not carry over.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .complexity import SystemMeasure, measure, select_maximal
from .engine import (
    MODES,
    BranchLabel,
    DestroyedCriticalFormula,
    Keep,
    Witness,
    partition,
    union,
)
from .syntax import (
    ArityError,
    Formula,
    Implication,
    LambdaAbstraction,
    Node,
    PredicateApplication,
    PredicateExpr,
    SecondOrderEpsilon,
    Term,
    alpha_eq,
    children,
    rebuild,
    substitute,
    substitute_var,
    substitute_vars,
    to_str,
)
from .translate import CriticalFormula, SystemE, critical_formula

Owner = Term | SecondOrderEpsilon


# -- beta reduction ----------------------------------------------------------


def _contract(app: PredicateApplication) -> Formula:
    lam = app.head
    if lam.arity != len(app.args):
        raise ArityError(f"lambda of arity {lam.arity} applied to {len(app.args)} arguments: {to_str(app)}")
    return substitute_vars(lam.body, dict(zip(lam.vars, app.args)))


def is_redex(node: Node) -> bool:
    return isinstance(node, PredicateApplication) and isinstance(node.head, LambdaAbstraction)


def beta_reduce(node: Node, order: str = "innermost") -> Node:
    """Beta-normal form.

    Lambdas bind individual variables only and are never applied to
    themselves, so contraction substitutes terms for term variables and
    cannot create new redexes above it; both orders terminate and agree up
    to alpha.
    """
    if order == "innermost":
        return _inner(node)
    if order == "outermost":
        return _outer(node)
    raise ValueError(f"unknown reduction order {order!r}")


def _map_children(node: Node, f) -> Node:
    kids = children(node)
    if not kids:
        return node
    new = tuple(f(k) for k in kids)
    if all(a is b for a, b in zip(new, kids)):
        return node
    return rebuild(node, new)


def _inner(node: Node) -> Node:
    node = _map_children(node, _inner)
    if is_redex(node):
        return _inner(_contract(node))
    return node


def _outer(node: Node) -> Node:
    while is_redex(node):
        node = _contract(node)
    return _map_children(node, _outer)


def is_beta_normal(node: Node) -> bool:
    return not is_redex(node) and all(is_beta_normal(k) for k in children(node))


def instantiate(e: SecondOrderEpsilon, witness: PredicateExpr) -> Formula:
    """``F[T]`` for ``e = EPS X. F[X]``, beta-reduced."""
    if witness.arity != e.arity:
        raise ArityError(f"witness of arity {witness.arity} for a predicate epsilon of arity {e.arity}")
    return beta_reduce(substitute_var(e.body, e.var, witness))


# -- second-order critical formulas ------------------------------------------


@dataclass(frozen=True)
class SOCriticalFormula:
    formula: Formula
    epsilon_term: SecondOrderEpsilon
    witness: PredicateExpr

    @property
    def matrix(self) -> tuple[str, Formula]:
        return self.epsilon_term.var, self.epsilon_term.body

    def __str__(self) -> str:
        return to_str(self.formula)


def make_so_critical(e: SecondOrderEpsilon, witness: PredicateExpr) -> SOCriticalFormula:
    """``F[T] -> F[e]`` where ``F[e]`` reads the body with ``X := e``."""
    if not isinstance(e, SecondOrderEpsilon):
        raise TypeError(f"not a second-order epsilon term: {to_str(e)}")
    f = Implication(instantiate(e, witness), instantiate(e, e))
    return SOCriticalFormula(f, e, witness)


def is_so_critical(m: SOCriticalFormula) -> bool:
    return alpha_eq(m.formula, make_so_critical(m.epsilon_term, m.witness).formula)


Member = CriticalFormula | SOCriticalFormula


def so_system(members: Iterable[Member | Formula]) -> SystemE:
    """A system mixing first-order formulas (recognised) and explicit
    second-order critical formulas."""
    out = []
    for i, m in enumerate(members):
        if isinstance(m, (CriticalFormula, SOCriticalFormula)):
            out.append(m)
            continue
        cf = critical_formula(m)
        if cf is None:
            raise ValueError(f"formula {i} is not a critical formula: {to_str(m)}")
        out.append(cf)
    return SystemE.of(out)


def _apply(node: Node, e: Owner, t: Node) -> Node:
    return beta_reduce(substitute(node, e, t))


def revalidate_member(m: Member, e: Owner, t: Node) -> Member | Formula:
    """Substitute ``e := t`` into ``m``; return the new member, or the
    resulting formula when it is no longer critical."""
    f = _apply(m.formula, e, t)
    if isinstance(m, SOCriticalFormula):
        owner = _apply(m.epsilon_term, e, t)
        witness = _apply(m.witness, e, t)
        if isinstance(owner, SecondOrderEpsilon):
            cand = SOCriticalFormula(f, owner, witness)
            if is_so_critical(cand):
                return cand
        return critical_formula(f) or f
    return critical_formula(f) or f


def so_principal_step(system: SystemE, e: Owner, mode: str = "strict") -> list[tuple[BranchLabel, SystemE]]:
    """Branches ``remainder`` (Keep) and ``beta(remainder[e := T_i])``."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    witnesses, remainder = partition(system, e)
    branches: list[tuple[BranchLabel, SystemE]] = [(Keep(), remainder)]
    for t in witnesses:
        label = Witness(t)
        kept, destroyed = [], []
        for m in remainder:
            r = revalidate_member(m, e, t)
            (kept if isinstance(r, (CriticalFormula, SOCriticalFormula)) else destroyed).append(r)
        if destroyed and mode == "strict":
            raise DestroyedCriticalFormula(label, destroyed[0])
        branches.append((label, SystemE.of(kept, destroyed)))
    return branches


def select_second_order(system: SystemE) -> Owner:
    """Maximal-complexity owner; predicate epsilon terms are measured by the
    same recursion as individual ones."""
    return select_maximal(system)


# -- complexity report -------------------------------------------------------

MEASURE_HEADER = (
    "Measure: multiset of (rank, degree) over distinct owners, compared by the "
    "multiset extension of the lexicographic order. Rank counts subordinate "
    "epsilon terms and degree counts nesting; predicate epsilon binders are "
    "counted exactly like individual ones."
)

CONSTRUCTED_NOTE = (
    "The demo instance is a constructed example: the witness body contains a "
    "rank-2 predicate epsilon term that lands in the scope of the remaining "
    "owner, whose rank therefore rises from 1 to 3."
)


@dataclass(frozen=True)
class BranchReport:
    label: BranchLabel
    measure: SystemMeasure
    relation: str  # smaller | equal | higher | incomparable

    @property
    def flagged(self) -> bool:
        return self.relation != "smaller"


@dataclass(frozen=True)
class ComplexityReport:
    header: str
    parent: SystemMeasure
    branches: tuple[BranchReport, ...]
    union: SystemMeasure
    union_relation: str
    notes: tuple[str, ...] = ()

    @property
    def flagged(self) -> list[BranchReport]:
        return [b for b in self.branches if b.flagged]

    @property
    def any_increase(self) -> bool:
        return bool(self.flagged) or self.union_relation != "smaller"

    def render(self) -> str:
        lines = [self.header, *self.notes, f"parent measure: {self.parent}"]
        for b in self.branches:
            mark = "  <-- not smaller" if b.flagged else ""
            lines.append(f"  {b.label}: {b.measure} ({b.relation}){mark}")
        lines.append(f"  union: {self.union} ({self.union_relation})")
        return "\n".join(lines)


def relation(child: SystemMeasure, parent: SystemMeasure) -> str:
    if child == parent:
        return "equal"
    if child < parent:
        return "smaller"
    if parent < child:
        return "higher"
    return "incomparable"


def complexity_report(
    parent: SystemE,
    children_: Sequence[tuple[BranchLabel, SystemE]],
    notes: Sequence[str] = (),
) -> ComplexityReport:
    pm = measure(parent)
    reports = tuple(BranchReport(lab, measure(s), relation(measure(s), pm)) for lab, s in children_)
    um = measure(union(s for _, s in children_))
    return ComplexityReport(MEASURE_HEADER, pm, reports, um, relation(um, pm), tuple(notes))


__all__ = [
    "BranchReport",
    "CONSTRUCTED_NOTE",
    "ComplexityReport",
    "MEASURE_HEADER",
    "SOCriticalFormula",
    "beta_reduce",
    "complexity_report",
    "instantiate",
    "is_beta_normal",
    "is_redex",
    "is_so_critical",
    "make_so_critical",
    "relation",
    "revalidate_member",
    "select_second_order",
    "so_principal_step",
    "so_system",
]
