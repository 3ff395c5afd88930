"""Seeded random generators for syntax trees, formulas and systems.

All generators take a :class:`random.Random` so runs are reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .syntax import (
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
    PredicateApplication,
    PredicateVariable,
    SecondOrderEpsilon,
    SOExists,
    SOForall,
    Term,
    Variable,
    constant,
    free_names,
)
from .translate import SystemE, build_system, make_critical_formula

PREDICATES = {"P": 1, "Q": 2, "R": 1}
FUNCTIONS = {"f": 1, "g": 2}
CONSTANTS = ("a", "b", "c", "0")
BINDERS = ("x", "y", "z", "u", "v", "w")
PRED_BINDERS = (("X", 1), ("Y", 2), ("Z", 1))


@dataclass
class AstConfig:
    max_depth: int = 4
    second_order: bool = True
    free_variables: bool = True


class AstGenerator:
    """Random well-formed ASTs that the parser can read back.

    Individual binders and free variables use names the parser treats as
    variables; predicate variables only occur under their binders and with
    that binder's arity.
    """

    def __init__(self, rng: random.Random, config: AstConfig | None = None):
        self.rng = rng
        self.cfg = config or AstConfig()

    def term(self, depth: int, scope: tuple[str, ...], pscope: tuple[tuple[str, int], ...]) -> Term:
        r = self.rng
        roll = r.random()
        if depth <= 0 or roll < 0.35:
            pool = [Variable(v) for v in scope]
            if self.cfg.free_variables and r.random() < 0.1:
                pool.append(Variable(r.choice(("v", "w"))))
            if not pool or r.random() < 0.5:
                return constant(r.choice(CONSTANTS))
            return r.choice(pool)
        if roll < 0.6:
            name = r.choice(sorted(FUNCTIONS))
            return FunctionApp(name, tuple(self.term(depth - 1, scope, pscope) for _ in range(FUNCTIONS[name])))
        v = r.choice(BINDERS)
        return EpsilonTerm(v, self.formula(depth - 1, scope + (v,), pscope))

    def atom(self, depth: int, scope, pscope) -> Formula:
        r = self.rng
        if pscope and r.random() < 0.4:
            name, arity = r.choice(pscope)
            return PredicateApplication(PredicateVariable(name, arity),
                                        tuple(self.term(depth - 1, scope, pscope) for _ in range(arity)))
        if self.cfg.second_order and depth > 1 and r.random() < 0.1:
            head = self.predexpr(depth - 1, scope, pscope)
            return PredicateApplication(head, tuple(self.term(depth - 1, scope, pscope) for _ in range(head.arity)))
        name = r.choice(sorted(PREDICATES))
        return Atom(name, tuple(self.term(depth - 1, scope, pscope) for _ in range(PREDICATES[name])))

    def predexpr(self, depth: int, scope, pscope):
        r = self.rng
        if r.random() < 0.5:
            name, arity = r.choice(PRED_BINDERS)
            inner = pscope + ((name, arity),)
            body = self._using_pred(depth, scope, inner, name, arity)
            return SecondOrderEpsilon(name, arity, body)
        k = r.randint(1, 2)
        names = tuple(r.sample(("x", "y", "z"), k))
        return LambdaAbstraction(names, self.formula(depth, scope + names, pscope))

    def _using_pred(self, depth, scope, pscope, name, arity) -> Formula:
        # The parser infers predicate binders from use, so make sure there is one.
        use = PredicateApplication(PredicateVariable(name, arity),
                                   tuple(self.term(depth - 1, scope, pscope) for _ in range(arity)))
        if self.rng.random() < 0.5:
            return use
        other = self.formula(depth - 1, scope, pscope)
        return Conjunction(use, other) if self.rng.random() < 0.5 else Implication(other, use)

    def formula(self, depth: int, scope: tuple[str, ...] = (), pscope: tuple[tuple[str, int], ...] = ()) -> Formula:
        r = self.rng
        if depth <= 0:
            return self.atom(0, scope, pscope)
        roll = r.random()
        if roll < 0.3:
            return self.atom(depth, scope, pscope)
        if roll < 0.4:
            return Negation(self.formula(depth - 1, scope, pscope))
        if roll < 0.7:
            cls = r.choice((Conjunction, Disjunction, Implication))
            return cls(self.formula(depth - 1, scope, pscope), self.formula(depth - 1, scope, pscope))
        if self.cfg.second_order and roll < 0.8:
            name, arity = r.choice(PRED_BINDERS)
            cls = r.choice((SOExists, SOForall))
            return cls(name, arity, self._using_pred(depth - 1, scope, pscope + ((name, arity),), name, arity))
        v = r.choice(BINDERS)
        cls = r.choice((Exists, Forall))
        return cls(v, self.formula(depth - 1, scope + (v,), pscope))


def random_formula(rng: random.Random, depth: int = 4, second_order: bool = True) -> Formula:
    return AstGenerator(rng, AstConfig(max_depth=depth, second_order=second_order)).formula(depth)


def random_term(rng: random.Random, depth: int = 3) -> Term:
    return AstGenerator(rng, AstConfig(max_depth=depth)).term(depth, (), ())


# -- quantifier-free propositional formulas ----------------------------------


def random_qf_formula(rng: random.Random, n_atoms: int = 12, size: int = 20) -> Formula:
    """Random connective tree over ``n_atoms`` nullary atoms ``A1..An``."""
    atoms = [Atom(f"A{i}", ()) for i in range(1, n_atoms + 1)]

    def go(budget: int) -> Formula:
        if budget <= 1:
            return rng.choice(atoms)
        roll = rng.random()
        if roll < 0.2:
            return Negation(go(budget - 1))
        cls = rng.choice((Conjunction, Disjunction, Implication))
        left = rng.randint(1, budget - 1)
        return cls(go(left), go(budget - left))

    return go(size)


# -- critical-formula systems ------------------------------------------------


@dataclass
class SystemConfig:
    n_predicates: int = 3
    max_chain: int = 3
    max_witnesses: int = 4
    max_owners: int = 3
    subordinate_rate: float = 0.25


class SystemGenerator:
    """Random first-order systems of critical formulas.

    Epsilon terms are built bottom-up so that epsilon chains stay within
    ``max_chain``; with probability ``subordinate_rate`` a matrix contains an
    epsilon term with the outer variable free, giving rank 2.
    """

    def __init__(self, rng: random.Random, config: SystemConfig | None = None):
        self.rng = rng
        self.cfg = config or SystemConfig()
        names = sorted(PREDICATES)[: self.cfg.n_predicates]
        self.preds = {n: PREDICATES[n] for n in names}

    def _arg(self, var: str, pool: list[tuple[Term, int]], depth: int) -> Term:
        r = self.rng
        roll = r.random()
        if roll < 0.45:
            return Variable(var)
        usable = [t for t, d in pool if d < depth]
        if usable and roll < 0.75:
            return r.choice(usable)
        return constant(r.choice(CONSTANTS[:3]))

    def _matrix(self, var: str, pool: list[tuple[Term, int]], depth: int) -> Formula:
        r = self.rng
        atoms = []
        for _ in range(r.randint(1, 2)):
            name = r.choice(sorted(self.preds))
            atoms.append(Atom(name, tuple(self._arg(var, pool, depth) for _ in range(self.preds[name]))))
        body = atoms[0]
        if len(atoms) == 2:
            body = r.choice((Conjunction, Disjunction, Implication))(atoms[0], atoms[1])
        elif r.random() < 0.2:
            body = Negation(body)
        if var not in free_names(body):
            name = r.choice(sorted(self.preds))
            args = tuple(Variable(var) if i == 0 else constant("c") for i in range(self.preds[name]))
            body = Conjunction(body, Atom(name, args)) if args else body
        return body

    def epsilon_pool(self) -> list[tuple[EpsilonTerm, int]]:
        r = self.rng
        pool: list[tuple[Term, int]] = []
        for depth in range(1, self.cfg.max_chain + 1):
            for _ in range(r.randint(1, 2)):
                var = r.choice(("x", "y"))
                body = self._matrix(var, pool, depth)
                if depth >= 2 and r.random() < self.cfg.subordinate_rate:
                    inner_var = "z"
                    inner = EpsilonTerm(inner_var, Atom("Q", (Variable(inner_var), Variable(var))))
                    if "Q" in self.preds:
                        body = Disjunction(body, Atom("Q", (inner, Variable(var))))
                pool.append((EpsilonTerm(var, body), depth))
            if r.random() < 0.3:
                break
        return pool

    def system(self) -> SystemE:
        r = self.rng
        pool = self.epsilon_pool()
        owners = r.sample(pool, k=min(len(pool), r.randint(1, self.cfg.max_owners)))
        grounds: list[Term] = [constant(c) for c in CONSTANTS[:3]] + [t for t, _ in pool]
        budget = r.randint(len(owners), max(len(owners), self.cfg.max_witnesses))
        formulas = []
        for i, (e, _) in enumerate(owners):
            share = 1 if i < len(owners) - 1 else budget
            k = max(1, min(share, budget - (len(owners) - 1 - i)))
            budget -= k
            for t in r.sample(grounds, k=min(k, len(grounds))):
                formulas.append(make_critical_formula((e.var, e.body), t).formula)
        return build_system(formulas)


def random_system(rng: random.Random, config: SystemConfig | None = None) -> SystemE:
    return SystemGenerator(rng, config).system()


__all__ = [
    "AstConfig",
    "AstGenerator",
    "SystemConfig",
    "SystemGenerator",
    "random_formula",
    "random_qf_formula",
    "random_system",
    "random_term",
]
