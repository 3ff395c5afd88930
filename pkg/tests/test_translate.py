from __future__ import annotations

import random

import pytest

from epsub.generate import SystemGenerator
from epsub.syntax import (
    Atom,
    EpsilonTerm,
    Implication,
    Negation,
    Variable,
    alpha_eq,
    constant,
    is_quantifier_free,
    parse,
    parse_formula,
    substitute_var,
    to_str,
)
from epsub.taut import is_tautology
from epsub.translate import (
    NotCritical,
    SystemE,
    build_system,
    critical_formula,
    epsilon_translate,
    make_critical_formula,
    recognize_critical,
)

x, zero, c = Variable("x"), constant("0"), constant("c")


def P(*args):
    return Atom("P", tuple(args))


class TestTranslate:
    def test_exists(self, e):
        got = epsilon_translate(parse_formula("exists x. P(x,0)"))
        assert alpha_eq(got, P(e(0), zero))
        assert to_str(got) == "P(eps x. P(x,0), 0)"

    def test_quantifier_free_unchanged(self):
        f = parse_formula("P(a) -> Q(b)")
        assert epsilon_translate(f) is f

    def test_forall(self):
        got = epsilon_translate(parse_formula("forall x. P(x)"))
        assert to_str(got) == "P(eps x. ~P(x))"

    def test_forall_dual(self):
        # ~forall x. P(x) and exists x. ~P(x) agree propositionally.
        a = epsilon_translate(parse_formula("~forall x. P(x)"))
        b = epsilon_translate(parse_formula("exists x. ~P(x)"))
        assert is_tautology(Implication(a, b)) and is_tautology(Implication(b, a))

    def test_innermost_first(self):
        got = epsilon_translate(parse_formula("exists y. forall x. Q(x,y)"))
        assert is_quantifier_free(got)
        inner = parse("eps x. ~Q(x, y)")
        body = Atom("Q", (inner, Variable("y")))
        want = substitute_var(body, "y", EpsilonTerm("y", body))
        assert alpha_eq(got, want)

    def test_second_order_quantifier(self):
        got = epsilon_translate(parse_formula("exists X. X(c)"))
        assert is_quantifier_free(got)
        assert to_str(got) == "(EPS X. X(c))(c)"


class TestMakeCritical:
    def test_first_loop_formula(self, e):
        cf = make_critical_formula(("x", P(x, zero)), e(1))
        assert alpha_eq(cf.formula, Implication(P(e(1), zero), P(e(0), zero)))
        assert alpha_eq(cf.epsilon_term, e(0)) and alpha_eq(cf.witness, e(1))

    def test_second_loop_formula(self, e):
        cf = make_critical_formula(("x", P(x, e(0))), e(2))
        assert alpha_eq(cf.formula, Implication(P(e(2), e(0)), P(e(1), e(0))))

    def test_degenerate(self):
        cf = make_critical_formula(("x", P(c)), constant("d"))
        assert cf.formula == Implication(P(c), P(c))

    def test_quantifier_rejected(self):
        with pytest.raises(ValueError):
            make_critical_formula(("x", parse_formula("exists y. Q(x,y)")), c)


class TestRecognize:
    def test_first_loop_formula(self, e):
        f = Implication(P(e(1), zero), P(e(0), zero))
        [(owner, wit, (var, body))] = recognize_critical(f)
        assert alpha_eq(owner, e(0)) and alpha_eq(wit, e(1))
        assert alpha_eq(EpsilonTerm(var, body), e(0))

    def test_not_critical(self):
        assert recognize_critical(parse_formula("P(a) -> Q(a)")) == []

    def test_second_loop_formula_candidates(self, e):
        f = Implication(P(e(2), e(0)), P(e(1), e(0)))
        got = recognize_critical(f)
        # e1 with witness e2 is the only decomposition: the consequent's e0
        # occurs next to e1, whose body mentions e0 too, so abstracting it
        # does not reproduce e0's matrix.
        assert len(got) == 1
        owner, wit, _ = got[0]
        assert alpha_eq(owner, e(1)) and alpha_eq(wit, e(2))

    def test_multiple_decompositions(self):
        # Q(a, p) -> Q(d, p) where d = eps y. Q(y, p) and p = eps x. R(x)
        f = parse_formula("Q(a, eps x. R(x)) -> Q(eps y. Q(y, eps x. R(x)), eps x. R(x))")
        got = recognize_critical(f)
        assert len(got) == 1
        assert to_str(got[0][1]) == "a"

    def test_identity_uses_epsilon_owner(self, e):
        f = Implication(P(e(0), zero), P(e(0), zero))
        [(owner, wit, _)] = recognize_critical(f)
        assert alpha_eq(owner, e(0)) and alpha_eq(wit, e(0))

    def test_degenerate_identity(self):
        f = Implication(P(c), P(c))
        [(owner, wit, (var, body))] = recognize_critical(f)
        assert owner == wit and body == P(c) and var not in ("c",)

    def test_witness_must_not_capture(self):
        f = parse_formula("(exists y. P(y)) -> exists y. P(eps x. P(x))")
        assert critical_formula(f) is None

    def test_wrong_shape(self):
        assert recognize_critical(Negation(P(c))) == []

    def test_soundness_and_completeness_on_random(self):
        rng = random.Random(3)
        gen = SystemGenerator(rng)
        for _ in range(150):
            pool = gen.epsilon_pool()
            e_, _ = rng.choice(pool)
            t_ = rng.choice([constant("a"), constant("b")] + [p for p, _ in pool])
            cf = make_critical_formula((e_.var, e_.body), t_)
            triples = recognize_critical(cf.formula)
            assert triples
            for owner, wit, matrix in triples:
                assert alpha_eq(make_critical_formula(matrix, wit).formula, cf.formula)
            assert any(alpha_eq(o, e_) and alpha_eq(w, t_) for o, w, _ in triples)


class TestSystems:
    def test_loop_system(self, loop_system):
        assert len(loop_system) == 2

    def test_empty(self):
        assert len(build_system([])) == 0 and not build_system([])

    def test_not_critical(self):
        with pytest.raises(NotCritical) as info:
            build_system([parse_formula("P(c) -> P(eps x. P(x))"), parse_formula("P(a) -> Q(a)")])
        assert info.value.index == 1

    def test_alpha_duplicates_collapse(self):
        s = build_system([parse_formula("P(c) -> P(eps x. P(x))"), parse_formula("P(c) -> P(eps y. P(y))")])
        assert len(s) == 1

    def test_owners_in_order(self, loop_system, e):
        o = loop_system.owners()
        assert alpha_eq(o[0], e(0)) and alpha_eq(o[1], e(1))

    def test_alpha_eq_ignores_order(self, loop_system):
        flipped = SystemE.of(reversed(loop_system.members))
        assert flipped.alpha_eq(loop_system) and flipped != loop_system
