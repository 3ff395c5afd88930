"""The epsilon substitution process.

Each principal step picks an owner ``e`` of the current system, splits off
its critical formulas ``F[t_i] -> F[e]`` and replaces the system by the
union of the remainder and its instances ``remainder[e := t_i]``. The
process runs until the system is empty. A leaf substitution sequence picks,
at every step, either Keep (no substitution) or one of that step's
witnesses; the disjunction of the instances of the original system under
all leaf sequences is then checked for tautology.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .complexity import SystemMeasure, complexity, degree, measure, rank, select_maximal
from .syntax import (
    EpsilonTerm,
    Formula,
    FunctionApp,
    Node,
    Term,
    canonical,
    children,
    conjoin,
    disjoin,
    distinct,
    rebuild,
    substitute,
    substitute_var,
    to_str,
)
from .taut import DEFAULT_THRESHOLD, Verdict, is_tautology
from .translate import CriticalFormula, Matrix, SystemE, critical_formula

log = logging.getLogger(__name__)

APPLY_ORDERS = ("recorded", "reverse")
MODES = ("strict", "permissive")


@dataclass(frozen=True)
class Keep:
    def __str__(self) -> str:
        return "Keep"


@dataclass(frozen=True)
class Witness:
    term: Term

    def __str__(self) -> str:
        return f"Witness({to_str(self.term)})"


BranchLabel = Keep | Witness


@dataclass(frozen=True)
class SubstitutionStep:
    epsilon_term: EpsilonTerm
    replacement: Term

    def __str__(self) -> str:
        return f"({to_str(self.epsilon_term)}, {to_str(self.replacement)})"


SubstitutionSequence = tuple[SubstitutionStep, ...]


class NotAnOwner(ValueError):
    pass


class DestroyedCriticalFormula(Exception):
    """A substitution turned a member into something that is not critical."""

    def __init__(self, branch: BranchLabel, formula: Formula):
        self.branch = branch
        self.formula = formula
        # Filled in by solve: the expansions completed before the failure.
        self.trace: tuple = ()
        self.step: int | None = None
        self.chosen: EpsilonTerm | None = None
        super().__init__(f"{branch}: destroyed critical formula {to_str(formula)}")


# -- strategies --------------------------------------------------------------


def first_listed(system: SystemE) -> EpsilonTerm:
    """Owner of the first formula in system order."""
    if not system:
        raise ValueError("cannot select from an empty system")
    return system.members[0].epsilon_term


def min_degree(system: SystemE) -> EpsilonTerm:
    """Among owners of maximal rank, the one of minimal degree."""
    owners = system.owners()
    if not owners:
        raise ValueError("cannot select from an empty system")
    top = max(rank(e) for e in owners)
    return min((e for e in owners if rank(e) == top), key=lambda e: (degree(e), to_str(e)))


def min_rank(system: SystemE) -> EpsilonTerm:
    """Owner of lexicographically minimal (rank, degree)."""
    owners = system.owners()
    if not owners:
        raise ValueError("cannot select from an empty system")
    return min(owners, key=lambda e: (complexity(e), to_str(e)))


STRATEGIES: dict[str, Callable[[SystemE], EpsilonTerm]] = {
    "maximal": select_maximal,
    "first-listed": first_listed,
    "min-degree": min_degree,
    "min-rank": min_rank,
}


def default_mode(strategy: str) -> str:
    return "strict" if strategy == "maximal" else "permissive"


# -- the principal step ------------------------------------------------------


def partition(system: SystemE, e: EpsilonTerm) -> tuple[list[Term], SystemE]:
    key = canonical(e)
    owned = [m for m in system if canonical(m.epsilon_term) == key]
    if not owned:
        raise NotAnOwner(f"{to_str(e)} owns no formula of the system")
    rest = [m for m in system if canonical(m.epsilon_term) != key]
    return distinct(m.witness for m in owned), SystemE.of(rest)


def revalidate(formulas: Iterable[Formula]) -> tuple[list[CriticalFormula], list[Formula]]:
    kept, destroyed = [], []
    for f in formulas:
        cf = critical_formula(f)
        if cf is None:
            destroyed.append(f)
        else:
            kept.append(cf)
    return kept, destroyed


def principal_step(system: SystemE, e: EpsilonTerm, mode: str = "strict") -> list[tuple[BranchLabel, SystemE]]:
    """Branch systems ``remainder`` (Keep) and ``remainder[e := t_i]``."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    witnesses, remainder = partition(system, e)
    branches: list[tuple[BranchLabel, SystemE]] = [(Keep(), remainder)]
    for t in witnesses:
        label = Witness(t)
        kept, destroyed = revalidate(substitute(m.formula, e, t) for m in remainder)
        if destroyed and mode == "strict":
            raise DestroyedCriticalFormula(label, destroyed[0])
        branches.append((label, SystemE.of(kept, destroyed)))
    return branches


def union(systems: Iterable[SystemE]) -> SystemE:
    members, dropped = [], []
    for s in systems:
        members.extend(s.members)
        dropped.extend(s.dropped)
    return SystemE.of(members, dropped)


# -- instances and the disjunction -------------------------------------------


def apply_sequence(f: Formula, seq: Sequence[SubstitutionStep], apply_order: str = "recorded") -> Formula:
    steps = seq if apply_order == "recorded" else tuple(reversed(seq))
    for step in steps:
        f = substitute(f, step.epsilon_term, step.replacement)
    return f


def _formulas(system) -> list[Formula]:
    return system.formulas if isinstance(system, SystemE) else list(system)


def instance(system, seq: Sequence[SubstitutionStep], apply_order: str = "recorded") -> Formula:
    """Conjunction of every formula of ``system`` under ``seq``."""
    return conjoin(apply_sequence(f, seq, apply_order) for f in _formulas(system))


def assemble_disjunction(system, leaves: Sequence[SubstitutionSequence], apply_order: str = "recorded") -> Formula:
    if not leaves:
        raise ValueError("no leaves to assemble")
    return disjoin(distinct(instance(system, s, apply_order) for s in leaves))


def herbrand_check(matrix: Matrix, witnesses: Sequence[Term], threshold: int = DEFAULT_THRESHOLD) -> Verdict:
    """Verdict on ``F[t_1] | ... | F[t_n]``."""
    if not witnesses:
        raise ValueError("Herbrand disjunction needs at least one witness")
    var, body = matrix
    return is_tautology(disjoin(substitute_var(body, var, t) for t in witnesses), threshold)


# -- loop detection ----------------------------------------------------------


def _opaque(node: Node, table: dict[Node, int]) -> Node:
    if isinstance(node, EpsilonTerm):
        k = canonical(node)
        if k not in table:
            table[k] = len(table) + 1
        return FunctionApp(f"ε{table[k]}")
    kids = children(node)
    if not kids:
        return node
    return rebuild(node, tuple(_opaque(k, table) for k in kids))


def signature(system) -> tuple[str, ...]:
    """System shape with each distinct epsilon term replaced by an index in
    first-occurrence order; epsilon terms are not looked into."""
    table: dict[Node, int] = {}
    return tuple(to_str(_opaque(f, table)) for f in _formulas(system))


def detect_loop(signatures: Sequence[tuple[str, ...]]) -> bool:
    """True iff the last signature equals an earlier one."""
    if len(signatures) < 2:
        return False
    return signatures[-1] in signatures[:-1]


# -- solving -----------------------------------------------------------------


@dataclass(frozen=True)
class Branch:
    label: BranchLabel
    system: SystemE
    measure: SystemMeasure

    @property
    def destroyed(self) -> tuple[Formula, ...]:
        return self.system.dropped


@dataclass(frozen=True)
class StepRecord:
    index: int
    system: SystemE
    chosen: EpsilonTerm
    witnesses: tuple[Term, ...]
    branches: tuple[Branch, ...]
    result: SystemE
    parent_measure: SystemMeasure
    child_measure: SystemMeasure
    signature: tuple[str, ...]
    loop: bool

    @property
    def decreased(self) -> bool:
        return self.child_measure < self.parent_measure

    @property
    def destroyed(self) -> list[tuple[BranchLabel, Formula]]:
        return [(b.label, f) for b in self.branches for f in b.destroyed]

    @property
    def all_critical(self) -> bool:
        return not self.destroyed

    def options(self) -> list[SubstitutionStep | None]:
        return [None] + [SubstitutionStep(self.chosen, t) for t in self.witnesses]

    def to_dict(self) -> dict:
        return {
            "step": self.index,
            "branch_path": [self.index],
            "chosen": to_str(self.chosen),
            "chosen_complexity": [rank(self.chosen), degree(self.chosen)],
            "witnesses": [to_str(t) for t in self.witnesses],
            "parent_measure": [[c.rank, c.degree] for c in self.parent_measure.sorted()],
            "child_measure": [[c.rank, c.degree] for c in self.child_measure.sorted()],
            "decreased": self.decreased,
            "branches": [
                {
                    "label": str(b.label),
                    "measure": [[c.rank, c.degree] for c in b.measure.sorted()],
                    "formulas": [{"formula": to_str(f), "status": "critical"} for f in b.system.formulas]
                    + [{"formula": to_str(f), "status": "destroyed"} for f in b.destroyed],
                }
                for b in self.branches
            ],
            "system": [to_str(f) for f in self.result.formulas],
            "signature": list(self.signature),
            "loop": self.loop,
        }


@dataclass(frozen=True)
class SolveResult:
    system: SystemE
    leaves: tuple[SubstitutionSequence, ...]
    disjunction: Formula
    verdict: Verdict
    trace: tuple[StepRecord, ...]
    strategy: str
    apply_order: str = "recorded"

    @property
    def steps(self) -> int:
        return len(self.trace)

    @property
    def diagnostics(self) -> list[tuple[int, BranchLabel, Formula]]:
        return [(r.index, lab, f) for r in self.trace for lab, f in r.destroyed]

    @property
    def measure_decreasing(self) -> bool:
        return all(r.decreased for r in self.trace)

    @property
    def all_critical(self) -> bool:
        return all(r.all_critical for r in self.trace)


@dataclass(frozen=True)
class Diverged:
    reason: str  # "budget" or "loop"
    system: SystemE
    trace: tuple[StepRecord, ...]
    strategy: str
    loop_step: int | None = None

    @property
    def steps(self) -> int:
        return len(self.trace)

    @property
    def diagnostics(self) -> list[tuple[int, BranchLabel, Formula]]:
        return [(r.index, lab, f) for r in self.trace for lab, f in r.destroyed]


class TooManyLeaves(RuntimeError):
    pass


class InvariantViolation(AssertionError):
    """Maximal selection produced a branch that is not smaller, or not
    entirely critical. Either would be a defect in the engine."""


def check_maximal_step(record: StepRecord) -> None:
    for b in record.branches:
        if not b.measure < record.parent_measure:
            raise InvariantViolation(f"step {record.index}: branch {b.label} has measure {b.measure}, "
                                     f"parent {record.parent_measure}")
        if b.destroyed:
            raise InvariantViolation(f"step {record.index}: branch {b.label} is not all critical")


def enumerate_leaves(trace: Sequence[StepRecord], limit: int | None = None) -> list[SubstitutionSequence]:
    """Every Keep/Witness choice sequence, depth-first with Keep first."""
    total = 1
    for r in trace:
        total *= 1 + len(r.witnesses)
    if limit is not None and total > limit:
        raise TooManyLeaves(f"{total} leaf sequences exceed the limit of {limit}")
    out = []
    for combo in itertools.product(*(r.options() for r in trace)):
        out.append(tuple(s for s in combo if s is not None))
    return out


def _incremental_instances(system: SystemE, trace: Sequence[StepRecord]) -> list[Formula]:
    """Instances for all leaves, sharing substituted prefixes."""
    out: list[Formula] = []
    seen: set[Node] = set()

    def go(i: int, formulas: list[Formula]) -> None:
        if i == len(trace):
            inst = conjoin(formulas)
            k = canonical(inst)
            if k not in seen:
                seen.add(k)
                out.append(inst)
            return
        for opt in trace[i].options():
            if opt is None:
                go(i + 1, formulas)
            else:
                go(i + 1, [substitute(f, opt.epsilon_term, opt.replacement) for f in formulas])

    go(0, system.formulas)
    return out


def solve(
    system: SystemE,
    strategy: str | Callable[[SystemE], EpsilonTerm] = "maximal",
    budget: int = 100,
    mode: str | None = None,
    apply_order: str = "recorded",
    taut_threshold: int = DEFAULT_THRESHOLD,
    loop_patience: int = 4,
    detect_loops: bool = True,
    max_leaves: int | None = 1 << 16,
) -> SolveResult | Diverged:
    """Run the substitution process until the system is empty.

    Returns :class:`Diverged` when ``budget`` expansions do not empty the
    system, or when the loop detector has fired and kept firing for
    ``loop_patience`` further expansions.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if apply_order not in APPLY_ORDERS:
        raise ValueError(f"unknown apply order {apply_order!r}")
    name = strategy if isinstance(strategy, str) else getattr(strategy, "__name__", "custom")
    select = STRATEGIES[strategy] if isinstance(strategy, str) else strategy
    mode = mode or default_mode(name)

    trace: list[StepRecord] = []
    signatures = [signature(system)]
    current = system
    fired_at: int | None = None
    while current:
        if len(trace) >= budget:
            return Diverged("budget", current, tuple(trace), name, fired_at)
        e = select(current)
        try:
            branches = principal_step(current, e, mode)
        except DestroyedCriticalFormula as exc:
            exc.trace = tuple(trace)
            exc.step = len(trace) + 1
            exc.chosen = e
            raise
        result = union(s for _, s in branches)
        sig = signature(result)
        signatures.append(sig)
        looped = detect_loops and detect_loop(signatures)
        record = StepRecord(
            index=len(trace) + 1,
            system=current,
            chosen=e,
            witnesses=tuple(lab.term for lab, _ in branches if isinstance(lab, Witness)),
            branches=tuple(Branch(lab, s, measure(s)) for lab, s in branches),
            result=result,
            parent_measure=measure(current),
            child_measure=measure(result),
            signature=sig,
            loop=looped,
        )
        if select is select_maximal:
            check_maximal_step(record)
        trace.append(record)
        log.debug("step %d: chose %s, system now %s", record.index, to_str(e), result)
        if looped:
            fired_at = fired_at or record.index
            if record.index - fired_at >= loop_patience and result:
                return Diverged("loop", result, tuple(trace), name, fired_at)
        else:
            fired_at = None
        current = result

    if apply_order == "recorded":
        enumerate_leaves(trace, max_leaves)  # size guard
        instances = _incremental_instances(system, trace)
        leaves = enumerate_leaves(trace)
    else:
        leaves = enumerate_leaves(trace, max_leaves)
        instances = distinct(instance(system, s, apply_order) for s in leaves)
    disjunction = disjoin(instances)
    verdict = is_tautology(disjunction, taut_threshold)
    return SolveResult(system, tuple(leaves), disjunction, verdict, tuple(trace), name, apply_order)


__all__ = [
    "APPLY_ORDERS",
    "Branch",
    "BranchLabel",
    "InvariantViolation",
    "check_maximal_step",
    "DestroyedCriticalFormula",
    "Diverged",
    "Keep",
    "MODES",
    "NotAnOwner",
    "STRATEGIES",
    "SolveResult",
    "StepRecord",
    "SubstitutionSequence",
    "SubstitutionStep",
    "SystemE",
    "TooManyLeaves",
    "Witness",
    "apply_sequence",
    "assemble_disjunction",
    "default_mode",
    "detect_loop",
    "enumerate_leaves",
    "first_listed",
    "herbrand_check",
    "instance",
    "min_degree",
    "min_rank",
    "partition",
    "principal_step",
    "revalidate",
    "signature",
    "solve",
    "union",
]
