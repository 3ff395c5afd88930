"""Built-in scenarios and the loop family ``e_{n+1} = eps x. P(x, e_n)``."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .syntax import (
    Atom,
    EpsilonTerm,
    Formula,
    Implication,
    PredicateApplication,
    Variable,
    constant,
    parse,
    parse_program,
)
from .translate import SystemE, build_system
from .second_order import make_so_critical, so_system

LOOP_SOURCE = """\
let e0 = eps x. P(x,0);
let e1 = eps x. P(x,e0);
let e2 = eps x. P(x,e1);
system ackermann_loop {
  P(e1,0) -> P(e0,0);
  P(e2,e0) -> P(e1,e0)
}
"""

IDENTITY_SOURCE = "system identity { P(c) -> P(eps x. P(x)) }\n"


def loop_term(n: int) -> EpsilonTerm:
    """``e_0 = eps x. P(x,0)`` and ``e_{n+1} = eps x. P(x, e_n)``."""
    if n < 0:
        raise ValueError("index must be non-negative")
    e = EpsilonTerm("x", Atom("P", (Variable("x"), constant("0"))))
    for _ in range(n):
        e = EpsilonTerm("x", Atom("P", (Variable("x"), e)))
    return e


def _loop_formula(i: int, j: int, k: int) -> Formula:
    return Implication(Atom("P", (loop_term(i), loop_term(k))), Atom("P", (loop_term(j), loop_term(k))))


def loop_step_system(n: int) -> list[Formula]:
    """``{P(e_{n+2},e_n) -> P(e_{n+1},e_n), P(e_{n+3},e_{n+1}) -> P(e_{n+2},e_{n+1})}``."""
    return [_loop_formula(n + 2, n + 1, n), _loop_formula(n + 3, n + 2, n + 1)]


def ackermann_loop_system() -> SystemE:
    (_, formulas), = parse_program(LOOP_SOURCE).systems
    return build_system(formulas)


def identity_system() -> SystemE:
    (_, formulas), = parse_program(IDENTITY_SOURCE).systems
    return build_system(formulas)


SO_OWNER = "EPS X. X(eps z. X(z))"
SO_WITNESS = "lam x. (EPS Y. Y(x) & Y(eps w. Y(w)))(x)"


def so_step_system() -> SystemE:
    """A constructed second-order system whose one step raises the measure.

    The owner ``e = EPS X. X(eps z. X(z))`` has complexity (2,2) and is
    eliminated first. The first-order member ``e(a) -> e(d)`` with
    ``d = eps y. e(y)`` has complexity (1,3). Substituting the witness turns
    ``d`` into a term with a rank-2 predicate epsilon term in its scope, so
    the new owner has rank 3.
    """
    e = parse(SO_OWNER)
    t = parse(SO_WITNESS)
    d = EpsilonTerm("y", PredicateApplication(e, (Variable("y"),)))
    remainder = Implication(PredicateApplication(e, (constant("a"),)), PredicateApplication(e, (d,)))
    return so_system([make_so_critical(e, t), remainder])


@lru_cache(maxsize=1)
def corpus_source() -> str:
    return resources.files("epsub").joinpath("data/corpus.eps").read_text(encoding="utf-8")


def corpus() -> list[tuple[str, SystemE]]:
    """The curated corpus as ``(name, system)`` pairs."""
    return [(name, build_system(fs)) for name, fs in parse_program(corpus_source()).systems]


DEMOS = ("ackermann-loop", "so-step", "identity")

__all__ = [
    "DEMOS",
    "IDENTITY_SOURCE",
    "LOOP_SOURCE",
    "SO_OWNER",
    "SO_WITNESS",
    "ackermann_loop_system",
    "corpus",
    "corpus_source",
    "identity_system",
    "loop_step_system",
    "loop_term",
    "so_step_system",
]
