"""Rank, degree and system measures for epsilon terms.

``rank`` follows subordination: an epsilon term ``inner`` is subordinate to
``outer = eps x. B`` when it occurs in ``B`` with ``x`` free, so that it
cannot be eliminated before ``outer``. ``degree`` is plain nesting depth.
Both recursions count second-order epsilon binders like first-order ones.

System measures are multisets compared with the Dershowitz-Manna ordering
over lexicographic ``(rank, degree)`` pairs.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache, total_ordering
from typing import Iterable

from .syntax import EPSILON_LIKE, Node, canonical, children, free_names, to_str
from .syntax.ast import binders, body_of


@total_ordering
@dataclass(frozen=True)
class Complexity:
    rank: int
    degree: int

    def __post_init__(self):
        if self.rank < 1 or self.degree < 1:
            raise ValueError(f"invalid complexity {self}")

    def __lt__(self, other: "Complexity") -> bool:
        return (self.rank, self.degree) < (other.rank, other.degree)

    def __str__(self) -> str:
        return f"({self.rank},{self.degree})"


def _occurrences_with_var_free(body: Node, var: str) -> list[Node]:
    """Epsilon-like subterm occurrences of ``body`` in which ``var`` is free
    and refers to the enclosing binder (not shadowed on the way down)."""
    out: list[Node] = []

    def go(n: Node) -> None:
        if isinstance(n, EPSILON_LIKE) and var in free_names(n):
            out.append(n)
        if var in binders(n):
            return
        for k in children(n):
            go(k)

    go(body)
    return out


def is_subordinate(inner: Node, outer: Node) -> bool:
    if not isinstance(outer, EPSILON_LIKE):
        return False
    key = canonical(inner)
    return any(canonical(n) == key for n in _occurrences_with_var_free(body_of(outer), outer.var))


@lru_cache(maxsize=1 << 15)
def _rank(key: Node) -> int:
    subs = _occurrences_with_var_free(body_of(key), key.var)
    return 1 + max((_rank(canonical(s)) for s in subs), default=0)


def rank(e: Node) -> int:
    return _rank(canonical(e))


@lru_cache(maxsize=1 << 15)
def _degree(key: Node) -> int:
    best = 0
    stack = list(children(key))
    while stack:
        n = stack.pop()
        if isinstance(n, EPSILON_LIKE):
            best = max(best, _degree(canonical(n)))
        else:
            stack.extend(children(n))
    return 1 + best


def degree(e: Node) -> int:
    return _degree(canonical(e))


def complexity(e: Node) -> Complexity:
    return Complexity(rank(e), degree(e))


def nesting_depth(e: Node) -> int:
    """Maximum number of epsilon binders on a root-to-leaf path of ``e``."""
    here = 1 if isinstance(e, EPSILON_LIKE) else 0
    return here + max((nesting_depth(k) for k in children(e)), default=0)


@dataclass(frozen=True)
class SystemMeasure:
    """Multiset of complexities, one per distinct owner epsilon term."""

    counts: frozenset[tuple[Complexity, int]]

    @classmethod
    def of(cls, values: Iterable[Complexity]) -> "SystemMeasure":
        return cls(frozenset(Counter(values).items()))

    @property
    def multiset(self) -> Counter:
        return Counter(dict(self.counts))

    def __len__(self) -> int:
        return sum(n for _, n in self.counts)

    def __lt__(self, other: "SystemMeasure") -> bool:
        return multiset_less(self.multiset, other.multiset)

    def __le__(self, other: "SystemMeasure") -> bool:
        return self == other or self < other

    def sorted(self) -> list[Complexity]:
        return sorted(self.multiset.elements(), reverse=True)

    def __str__(self) -> str:
        return "{" + ", ".join(str(c) for c in self.sorted()) + "}"


def multiset_less(a: Counter, b: Counter) -> bool:
    """Dershowitz-Manna: ``a < b`` iff ``a != b`` and every element with
    surplus in ``a`` is dominated by some element with surplus in ``b``."""
    a, b = +a, +b
    if a == b:
        return False
    surplus_b = [y for y in b if b[y] > a.get(y, 0)]
    return all(
        any(x < y for y in surplus_b)
        for x in a
        if a[x] > b.get(x, 0)
    )


def owner_measure(owners: Iterable[Node]) -> SystemMeasure:
    return SystemMeasure.of(complexity(e) for e in owners)


def measure(system) -> SystemMeasure:
    """Measure of a system of critical formulas (anything with ``owners()``)."""
    return owner_measure(system.owners())


def select_maximal(system) -> Node:
    """Owner of lexicographically maximal (rank, degree); ties go to the
    owner whose printed form sorts first."""
    owners = system.owners()
    if not owners:
        raise ValueError("cannot select from an empty system")
    return min(owners, key=lambda e: (-rank(e), -degree(e), to_str(e)))


__all__ = [
    "Complexity",
    "SystemMeasure",
    "complexity",
    "degree",
    "is_subordinate",
    "measure",
    "multiset_less",
    "nesting_depth",
    "owner_measure",
    "rank",
    "select_maximal",
]
