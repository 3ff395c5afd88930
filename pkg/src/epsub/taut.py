"""Propositional abstraction and an exact tautology decision procedure.

Atoms are opaque after alpha-normalisation. Small formulas are decided by a
vectorised truth table; larger ones by DPLL on a Tseitin encoding of the
negation. Either way a falsifying total assignment is returned on failure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from .syntax import (
    TOP,
    Atom,
    Conjunction,
    Disjunction,
    Formula,
    Implication,
    Negation,
    PredicateApplication,
    canonical,
    is_quantifier_free,
    to_str,
)

DEFAULT_THRESHOLD = 20

# Skeleton nodes: ("var", i) | ("const", b) | ("not", s) | ("and", [s...]) |
# ("or", [s...]) | ("imp", s, s)
Skeleton = tuple


class QuantifierError(ValueError):
    pass


@dataclass(frozen=True)
class Tautology:
    def __bool__(self) -> bool:
        return True

    def __str__(self) -> str:
        return "Tautology"


@dataclass(frozen=True)
class Countermodel:
    assignment: dict[str, bool] = field(hash=False)

    def __bool__(self) -> bool:
        return False

    def serialize(self) -> list[list]:
        return [[k, v] for k, v in sorted(self.assignment.items())]

    def __str__(self) -> str:
        inner = ", ".join(f"{k}={'T' if v else 'F'}" for k, v in sorted(self.assignment.items()))
        return "Countermodel {" + inner + "}"


Verdict = Tautology | Countermodel


@lru_cache(maxsize=1 << 16)
def atom_key(atom: Formula) -> str:
    return to_str(canonical(atom))


def abstract(f: Formula) -> tuple[Skeleton, list[tuple[str, Formula]]]:
    """Replace atoms by indices into a table of ``(AtomKey, representative)``."""
    if not is_quantifier_free(f):
        raise QuantifierError(f"quantifier in tautology input: {to_str(f)}")
    index: dict[str, int] = {}
    table: list[tuple[str, Formula]] = []

    def var(a: Formula) -> Skeleton:
        k = atom_key(a)
        if k not in index:
            index[k] = len(table)
            table.append((k, a))
        return ("var", index[k])

    def flatten(node: Formula, cls) -> list[Formula]:
        out, stack = [], [node]
        while stack:
            n = stack.pop()
            if isinstance(n, cls):
                stack.append(n.right)
                stack.append(n.left)
            else:
                out.append(n)
        return out

    def go(n: Formula) -> Skeleton:
        match n:
            case _ if n == TOP:
                return ("const", True)
            case Atom() | PredicateApplication():
                return var(n)
            case Negation(op):
                return ("not", go(op))
            case Conjunction():
                return ("and", [go(k) for k in flatten(n, Conjunction)])
            case Disjunction():
                return ("or", [go(k) for k in flatten(n, Disjunction)])
            case Implication(l, r):
                return ("imp", go(l), go(r))
        raise TypeError(f"not a quantifier-free formula: {n!r}")

    return go(f), table


def evaluate(f: Formula, assignment: dict[str, bool]) -> bool:
    """Directly evaluate ``f`` under an assignment of AtomKeys."""
    stack: list = [(f, False)]
    values: list[bool] = []
    # Post-order evaluation without recursion; deep disjunction chains are common.
    while stack:
        n, done = stack.pop()
        if not done:
            match n:
                case _ if n == TOP:
                    values.append(True)
                case Atom() | PredicateApplication():
                    values.append(assignment[atom_key(n)])
                case Negation(op):
                    stack += [(n, True), (op, False)]
                case Conjunction(l, r) | Disjunction(l, r) | Implication(l, r):
                    stack += [(n, True), (r, False), (l, False)]
                case _:
                    raise TypeError(f"cannot evaluate {n!r}")
            continue
        if isinstance(n, Negation):
            values.append(not values.pop())
        else:
            r, l = values.pop(), values.pop()
            if isinstance(n, Conjunction):
                values.append(l and r)
            elif isinstance(n, Disjunction):
                values.append(l or r)
            else:
                values.append((not l) or r)
    return values[0]


def _eval_skeleton(s: Skeleton, cols):
    kind = s[0]
    if kind == "var":
        return cols[s[1]]
    if kind == "const":
        return np.full(cols.shape[1] if cols.ndim == 2 else 1, s[1], dtype=bool)
    if kind == "not":
        return ~_eval_skeleton(s[1], cols)
    if kind == "imp":
        return ~_eval_skeleton(s[1], cols) | _eval_skeleton(s[2], cols)
    parts = [_eval_skeleton(k, cols) for k in s[1]]
    out = parts[0].copy()
    for p in parts[1:]:
        if kind == "and":
            out &= p
        else:
            out |= p
    return out


def truth_table(skeleton: Skeleton, n: int, chunk_bits: int = 16) -> int | None:
    """Index of the first falsifying row (bit ``i`` = value of atom ``i``), or None."""
    total = 1 << n
    step = 1 << min(chunk_bits, n)
    for start in range(0, total, step):
        rows = np.arange(start, min(start + step, total), dtype=np.int64)
        cols = ((rows[None, :] >> np.arange(n, dtype=np.int64)[:, None]) & 1).astype(bool)
        vals = _eval_skeleton(skeleton, cols)
        vals = np.broadcast_to(vals, rows.shape)
        bad = np.flatnonzero(~vals)
        if bad.size:
            return int(rows[bad[0]])
    return None


# -- CNF and DPLL ------------------------------------------------------------


def tseitin(skeleton: Skeleton, n_atoms: int) -> tuple[int, list[list[int]], int]:
    """Return ``(n_vars, clauses, root_literal)``; atom ``i`` is variable ``i + 1``."""
    clauses: list[list[int]] = []
    counter = [n_atoms]

    def new() -> int:
        counter[0] += 1
        return counter[0]

    def go(s: Skeleton) -> int:
        kind = s[0]
        if kind == "var":
            return s[1] + 1
        if kind == "const":
            v = new()
            clauses.append([v] if s[1] else [-v])
            return v
        if kind == "not":
            return -go(s[1])
        if kind == "imp":
            parts = [-go(s[1]), go(s[2])]
            kind = "or"
        else:
            parts = [go(k) for k in s[1]]
        v = new()
        if kind == "and":
            for p in parts:
                clauses.append([-v, p])
            clauses.append([v] + [-p for p in parts])
        else:
            for p in parts:
                clauses.append([v, -p])
            clauses.append([-v] + parts)
        return v

    root = go(skeleton)
    return counter[0], clauses, root


def dpll(n_vars: int, clauses: Iterable[list[int]]) -> dict[int, bool] | None:
    """Complete DPLL search with two watched literals; returns a model or None."""
    value: list[int] = [0] * (n_vars + 1)  # 0 unassigned, 1 true, -1 false
    watches: dict[int, list[int]] = {}
    cls: list[list[int]] = []
    units: list[int] = []
    for c in clauses:
        c = list(dict.fromkeys(c))
        if any(-l in c for l in c):
            continue
        if not c:
            return None
        if len(c) == 1:
            units.append(c[0])
            continue
        idx = len(cls)
        cls.append(c)
        watches.setdefault(c[0], []).append(idx)
        watches.setdefault(c[1], []).append(idx)

    trail: list[int] = []
    decisions: list[tuple[int, bool]] = []  # (trail length before decision, flipped already)

    def lit_val(l: int) -> int:
        v = value[abs(l)]
        return v if l > 0 else -v

    def assign(l: int) -> bool:
        cur = lit_val(l)
        if cur == 1:
            return True
        if cur == -1:
            return False
        value[abs(l)] = 1 if l > 0 else -1
        trail.append(l)
        return True

    def propagate(qhead: int) -> bool:
        while qhead < len(trail):
            false_lit = -trail[qhead]
            qhead += 1
            ws = watches.get(false_lit)
            if not ws:
                continue
            keep = []
            i = 0
            conflict = False
            while i < len(ws):
                ci = ws[i]
                i += 1
                c = cls[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                if lit_val(c[0]) == 1:
                    keep.append(ci)
                    continue
                for k in range(2, len(c)):
                    if lit_val(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        watches.setdefault(c[1], []).append(ci)
                        break
                else:
                    keep.append(ci)
                    if not assign(c[0]):
                        conflict = True
                        keep.extend(ws[i:])
                        break
            watches[false_lit] = keep
            if conflict:
                return False
        return True

    for u in units:
        if not assign(u):
            return None
    if not propagate(0):
        return None

    occurrence = [0] * (n_vars + 1)
    for c in cls:
        for l in c:
            occurrence[abs(l)] += 1
    order = sorted(range(1, n_vars + 1), key=lambda v: -occurrence[v])
    pos = 0

    while True:
        while pos < len(order) and value[order[pos]] != 0:
            pos += 1
        if pos == len(order):
            return {v: value[v] == 1 for v in range(1, n_vars + 1)}
        v = order[pos]
        decisions.append((len(trail), False))
        qhead = len(trail)
        assign(-v)
        ok = propagate(qhead)
        while not ok:
            # Chronological backtracking: flip the most recent unflipped decision.
            while decisions and decisions[-1][1]:
                size, _ = decisions.pop()
                _undo(trail, value, size)
            if not decisions:
                return None
            size, _ = decisions.pop()
            lit = trail[size]
            _undo(trail, value, size)
            decisions.append((size, True))
            assign(-lit)
            ok = propagate(size)
        pos = 0


def _undo(trail: list[int], value: list[int], size: int) -> None:
    while len(trail) > size:
        value[abs(trail.pop())] = 0


def is_tautology(f: Formula, threshold: int = DEFAULT_THRESHOLD) -> Verdict:
    """Decide whether ``f`` is a propositional tautology over its atoms."""
    skeleton, table = abstract(f)
    n = len(table)
    if n <= threshold:
        row = truth_table(skeleton, n)
        if row is None:
            return Tautology()
        return Countermodel({k: bool((row >> i) & 1) for i, (k, _) in enumerate(table)})
    n_vars, clauses, root = tseitin(skeleton, n)
    model = dpll(n_vars, clauses + [[-root]])
    if model is None:
        return Tautology()
    return Countermodel({k: model[i + 1] for i, (k, _) in enumerate(table)})


__all__ = [
    "Countermodel",
    "DEFAULT_THRESHOLD",
    "QuantifierError",
    "Tautology",
    "Verdict",
    "abstract",
    "atom_key",
    "dpll",
    "evaluate",
    "is_tautology",
    "truth_table",
    "tseitin",
]
