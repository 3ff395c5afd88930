from __future__ import annotations

import random
from pathlib import Path

import pytest

from epsub.demos import corpus
from epsub.engine import (
    DestroyedCriticalFormula,
    Diverged,
    Keep,
    NotAnOwner,
    SolveResult,
    SubstitutionStep,
    Witness,
    assemble_disjunction,
    detect_loop,
    enumerate_leaves,
    herbrand_check,
    instance,
    partition,
    principal_step,
    signature,
    solve,
)
from epsub.generate import random_system
from epsub.syntax import (
    Atom,
    Conjunction,
    Disjunction,
    Implication,
    Variable,
    alpha_eq,
    constant,
    parse,
    parse_formula,
    parse_program,
)
from epsub.taut import Countermodel, Tautology, evaluate
from epsub.translate import SystemE, build_system

from oracles import brute_force_tautology, shannon_tautology, tautology_oracle

GOLDEN = Path(__file__).parent / "golden"
zero, c = constant("0"), constant("c")


def P(*args):
    return Atom("P", tuple(args))


def imp(a, b):
    return Implication(a, b)


def sys_of(*texts):
    return build_system(parse_formula(t) for t in texts)


class TestPartition:
    def test_owner_e1(self, loop_system, e):
        wit, rest = partition(loop_system, e(1))
        assert len(wit) == 1 and alpha_eq(wit[0], e(2))
        assert rest.alpha_eq(build_system([imp(P(e(1), zero), P(e(0), zero))]))

    def test_owner_e0(self, loop_system, e):
        wit, rest = partition(loop_system, e(0))
        assert alpha_eq(wit[0], e(1))
        assert rest.alpha_eq(build_system([imp(P(e(2), e(0)), P(e(1), e(0)))]))

    def test_single_formula(self):
        s = sys_of("P(c) -> P(eps x. P(x))")
        wit, rest = partition(s, parse("eps x. P(x)"))
        assert wit == [c] and not rest

    def test_shared_witness_deduplicated(self):
        s = sys_of("P(c) -> P(eps x. P(x))", "P(c) -> P(eps y. P(y))", "P(a) -> P(eps x. P(x))")
        wit, _ = partition(s, parse("eps x. P(x)"))
        assert [str(w.symbol) for w in wit] == ["c", "a"]

    def test_not_an_owner(self, loop_system):
        with pytest.raises(NotAnOwner):
            partition(loop_system, parse("eps x. R(x)"))


class TestPrincipalStep:
    def test_naive_choice(self, loop_system, e):
        branches = principal_step(loop_system, e(0))
        assert [type(lab) for lab, _ in branches] == [Keep, Witness]
        keep, wit = branches[0][1], branches[1][1]
        assert keep.alpha_eq(build_system([imp(P(e(2), e(0)), P(e(1), e(0)))]))
        assert wit.alpha_eq(build_system([imp(P(e(3), e(1)), P(e(2), e(1)))]))
        union = SystemE.of(keep.members + wit.members)
        assert union.alpha_eq(build_system([imp(P(e(2), e(0)), P(e(1), e(0))), imp(P(e(3), e(1)), P(e(2), e(1)))]))

    def test_maximal_choice(self, loop_system, e):
        (_, keep), (lab, wit) = principal_step(loop_system, e(1))
        assert alpha_eq(lab.term, e(2))
        assert keep.alpha_eq(build_system([imp(P(e(1), zero), P(e(0), zero))]))
        assert wit.alpha_eq(build_system([imp(P(e(2), zero), P(e(0), zero))]))

    def test_empty_remainder(self):
        s = sys_of("P(a) -> P(eps x. P(x))", "P(b) -> P(eps x. P(x))")
        branches = principal_step(s, parse("eps x. P(x)"))
        assert len(branches) == 3 and all(not b for _, b in branches)

    def test_destruction_strict_and_permissive(self):
        s = dict(corpus())["subordinate_destruction"]
        low = parse("eps x. Q(x,c)")
        with pytest.raises(DestroyedCriticalFormula) as info:
            principal_step(s, low, "strict")
        assert isinstance(info.value.branch, Witness)
        branches = principal_step(s, low, "permissive")
        assert len(branches[1][1].dropped) == 1 and not branches[1][1]


class TestSolve:
    def test_first_listed_loops(self, loop_system):
        r = solve(loop_system, "first-listed", budget=20)
        assert isinstance(r, Diverged) and r.reason == "loop"
        assert r.loop_step == 2 and r.steps == 6

    def test_first_listed_matches_golden(self, loop_system):
        expected = [build_system(fs) for _, fs in parse_program((GOLDEN / "ackermann_loop_first_listed.eps").read_text()).systems]
        r = solve(loop_system, "first-listed", budget=20)
        assert len(r.trace) == len(expected)
        for step, want in zip(r.trace, expected):
            assert step.result.alpha_eq(want), step.index

    def test_first_listed_matches_closed_form(self, loop_system, e):
        r = solve(loop_system, "first-listed", budget=20)
        for step in r.trace:
            n = step.index - 1
            want = build_system([imp(P(e(n + 2), e(n)), P(e(n + 1), e(n))),
                                 imp(P(e(n + 3), e(n + 1)), P(e(n + 2), e(n + 1)))])
            assert step.result.alpha_eq(want)

    def test_budget_reported_separately(self, loop_system):
        r = solve(loop_system, "first-listed", budget=3)
        assert isinstance(r, Diverged) and r.reason == "budget" and r.steps == 3
        r = solve(loop_system, "first-listed", budget=50, detect_loops=False)
        assert r.reason == "budget" and r.steps == 50

    def test_maximal_solves(self, loop_system):
        r = solve(loop_system, "maximal", budget=100)
        assert isinstance(r, SolveResult) and isinstance(r.verdict, Tautology)
        assert r.measure_decreasing and r.all_critical
        assert brute_force_tautology(r.disjunction)
        assert not any(step.loop for step in r.trace)
        assert len(r.leaves) == 6

    def test_identity_system(self):
        s = sys_of("P(c) -> P(eps x. P(x))")
        r = solve(s)
        ex = parse("eps x. P(x)")
        assert any(len(l) == 1 and alpha_eq(l[0].epsilon_term, ex) and l[0].replacement == c for l in r.leaves)
        assert isinstance(r.verdict, Tautology)

    def test_strict_destruction_propagates(self):
        s = dict(corpus())["subordinate_destruction"]
        with pytest.raises(DestroyedCriticalFormula) as info:
            solve(s, "min-rank", mode="strict")
        assert info.value.step == 1 and info.value.trace == ()

    def test_permissive_destruction_is_diagnosed(self):
        s = dict(corpus())["subordinate_destruction"]
        r = solve(s, "first-listed")
        assert r.diagnostics and not r.all_critical
        assert isinstance(r.verdict, Countermodel)

    def test_determinism(self, loop_system):
        a, b = solve(loop_system), solve(loop_system)
        assert a.leaves == b.leaves and a.disjunction == b.disjunction
        assert [s.to_dict() for s in a.trace] == [s.to_dict() for s in b.trace]

    def test_budget_validation(self, loop_system):
        with pytest.raises(ValueError):
            solve(loop_system, budget=0)

    def test_reverse_order(self, loop_system):
        # Composing witness steps last-first does not yield the Herbrand
        # disjunction here; the verdict must still be honest.
        r = solve(loop_system, apply_order="reverse")
        assert r.apply_order == "reverse"
        assert isinstance(r.verdict, Countermodel)
        assert not brute_force_tautology(r.disjunction)
        assert not evaluate(r.disjunction, r.verdict.assignment)
        forward = solve(loop_system)
        assert r.trace == forward.trace and r.leaves == forward.leaves

    def test_empty_system(self):
        r = solve(build_system([]))
        assert r.leaves == ((),) and r.steps == 0

    def test_random_systems_maximal(self):
        for seed in range(40):
            s = random_system(random.Random(seed))
            r = solve(s)
            assert isinstance(r, SolveResult)
            assert r.measure_decreasing and r.all_critical
            assert bool(r.verdict) == tautology_oracle(r.disjunction)


class TestInstances:
    def test_empty_sequence(self, loop_system):
        got = instance(loop_system, ())
        assert got == Conjunction(*loop_system.formulas)

    def test_single_step(self):
        ex = parse("eps x. P(x)")
        s = build_system([imp(P(c), P(ex))])
        assert instance(s, (SubstitutionStep(ex, c),)) == imp(P(c), P(c))

    def test_loop_system_e0(self, loop_system, e):
        got = instance(loop_system, (SubstitutionStep(e(0), e(1)),))
        want = Conjunction(imp(P(e(2), zero), P(e(1), zero)), imp(P(e(3), e(1)), P(e(2), e(1))))
        assert alpha_eq(got, want)

    def test_assemble(self):
        ex = parse("eps x. P(x)")
        s = build_system([imp(P(c), P(ex))])
        assert assemble_disjunction(s, [()]) == instance(s, ())
        got = assemble_disjunction(s, [(), (SubstitutionStep(ex, c),)])
        assert got == Disjunction(imp(P(c), P(ex)), imp(P(c), P(c)))

    def test_assemble_deduplicates(self):
        ex = parse("eps x. P(x)")
        s = build_system([imp(P(c), P(ex))])
        step = SubstitutionStep(ex, c)
        assert assemble_disjunction(s, [(step,), (step,)]) == imp(P(c), P(c))

    def test_assemble_needs_leaves(self, loop_system):
        with pytest.raises(ValueError):
            assemble_disjunction(loop_system, [])

    def test_leaf_enumeration_order(self, loop_system):
        r = solve(loop_system)
        assert enumerate_leaves(r.trace) == list(r.leaves)
        assert r.leaves[0] == ()


class TestLoopDetection:
    def test_signature_of_step_systems(self, e):
        a = build_system([imp(P(e(2), e(0)), P(e(1), e(0))), imp(P(e(3), e(1)), P(e(2), e(1)))])
        b = build_system([imp(P(e(3), e(1)), P(e(2), e(1))), imp(P(e(4), e(2)), P(e(3), e(2)))])
        assert signature(a) == signature(b) == ("P(ε1,ε2) -> P(ε3,ε2)", "P(ε4,ε3) -> P(ε1,ε3)")

    def test_detector(self, loop_system):
        r = solve(loop_system, "first-listed", budget=20)
        sigs = [signature(loop_system)] + [s.signature for s in r.trace]
        assert not detect_loop(sigs[:2])
        assert detect_loop(sigs[:3])

    def test_single_step(self):
        assert not detect_loop([("x",)])

    def test_maximal_never_fires(self, loop_system):
        assert not any(s.loop for s in solve(loop_system).trace)


class TestHerbrand:
    def test_identity(self):
        x = Variable("x")
        assert herbrand_check(("x", imp(P(x), P(c))), [c])

    def test_countermodel(self):
        v = herbrand_check(("x", P(Variable("x"))), [constant("a")])
        assert isinstance(v, Countermodel) and v.serialize() == [["P(a)", False]]

    def test_two_disjuncts(self):
        # Falsifying both disjuncts needs P(f(c)) false and true at once, so
        # the two-witness disjunction is valid.
        x = Variable("x")
        body = imp(P(x), P(parse("f(x)")))
        v = herbrand_check(("x", body), [c, parse("f(c)")])
        disj = parse_formula("(P(c) -> P(f(c))) | (P(f(c)) -> P(f(f(c))))")
        assert brute_force_tautology(disj)
        assert isinstance(v, Tautology)
        assignment = {"P(c)": True, "P(f(c))": False, "P(f(f(c)))": False}
        assert evaluate(disj, assignment)

    def test_one_step_short(self):
        x = Variable("x")
        v = herbrand_check(("x", imp(P(x), P(parse("f(x)")))), [c])
        assert isinstance(v, Countermodel)
        assert v.assignment == {"P(c)": True, "P(f(c))": False}

    def test_empty(self):
        with pytest.raises(ValueError):
            herbrand_check(("x", P(Variable("x"))), [])


def test_oracles_agree():
    rng = random.Random(11)
    from epsub.generate import random_qf_formula

    for _ in range(300):
        f = random_qf_formula(rng, n_atoms=rng.randint(1, 8), size=rng.randint(2, 20))
        assert brute_force_tautology(f) == shannon_tautology(f)


def test_bit_parallel_oracle_matches_row_by_row():
    import itertools

    from oracles import atoms_of, debruijn, value

    rng = random.Random(12)
    from epsub.generate import random_qf_formula

    for _ in range(200):
        f = random_qf_formula(rng, n_atoms=rng.randint(1, 6), size=rng.randint(2, 16))
        atoms = [debruijn(a) for a in atoms_of(f)]
        rows = all(value(f, dict(zip(atoms, bits))) for bits in itertools.product((False, True), repeat=len(atoms)))
        assert brute_force_tautology(f) == rows


def test_maximal_invariant_check_rejects_bad_steps(loop_system):
    from epsub.engine import InvariantViolation, check_maximal_step

    bad = solve(dict(corpus())["subordinate_destruction"], "first-listed").trace[0]
    with pytest.raises(InvariantViolation):
        check_maximal_step(bad)
    looping = solve(loop_system, "first-listed", budget=20).trace[1]
    assert not all(b.measure < looping.parent_measure for b in looping.branches)
    with pytest.raises(InvariantViolation):
        check_maximal_step(looping)
    for step in solve(loop_system).trace:
        check_maximal_step(step)
