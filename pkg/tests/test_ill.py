import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import formulas, terms
from lambekdial.generators import random_terms
from lambekdial.ill import (
    ILLTypeError, embed_context, embed_formula, embed_term, ill_distance,
    ill_typecheck, preservation_report,
)
from lambekdial.rewrite import BETA_FAMILY, reducts
from lambekdial.typecheck import typecheck
from lambekdial.syntax import (
    App, Atom, Bang, CalculusLevel, DerelictBang, ExchL, ExchR, Kappa, Lam,
    LamL, Lolli, PromoteBang, TensorIntro, Var, alpha_eq, children,
    parse_formula, parse_judgment, parse_term,
)

a, b = Atom("a"), Atom("b")


def walk(t):
    yield t
    for k in children(t):
        yield from walk(k)


def f(text):
    return parse_formula(text)


class TestFormulas:
    def test_implications_collapse(self):
        assert embed_formula(f("a \\ b")) == Lolli(a, b)
        assert embed_formula(f("b / a")) == Lolli(a, b)

    def test_non_injective(self):
        assert f("a \\ b") != f("b / a")
        assert embed_formula(f("a \\ b")) == embed_formula(f("b / a"))

    def test_modalities(self):
        assert embed_formula(Kappa(a)) == Bang(a)
        assert embed_formula(Bang(a)) == Bang(a)
        assert embed_formula(f("I")) == f("I")

    @given(formulas(bang=True, kappa=True))
    def test_image_is_ill(self, x):
        def ok(y):
            if isinstance(y, Kappa):
                return False
            return all(ok(getattr(y, fl.name)) for fl in dataclasses.fields(y)
                       if not isinstance(getattr(y, fl.name), str))
        assert ok(embed_formula(x))


class TestTerms:
    def test_lambda(self):
        assert embed_term(LamL("x", a, Var("x"))) == Lam("x", a, Var("x"))

    def test_application(self):
        assert embed_term(parse_term("appr f x")) == App(Var("f"), Var("x"))

    def test_exchange_is_erased(self):
        t = parse_term("exchl u, v with x, y in y * x")
        assert embed_term(t) == TensorIntro(Var("u"), Var("v"))
        t = parse_term("exchr u, v with x, y in x * y")
        assert embed_term(t) == TensorIntro(Var("v"), Var("u"))

    def test_kappa_terms(self):
        assert embed_term(parse_term("derelictk s")) == DerelictBang(Var("s"))
        assert isinstance(embed_term(parse_term("promotek s for x in x")), PromoteBang)

    @given(terms())
    def test_image_has_no_source_only_constructs(self, t):
        image = embed_term(t)
        assert not any(isinstance(u, (ExchL, ExchR, LamL)) for u in walk(image))


class TestCheck:
    @pytest.mark.parametrize("text,ty", [
        ("x:a |- x", "a"),
        ("x:!a |- copy x as y, z in y * z", "!a * !a"),
        ("x:a, y:b |- y * x", "b * a"),
        ("x:a |- \\r f:a \\ b. appr f x", "(a \\ b) \\ b"),
    ])
    def test_examples(self, text, ty):
        ctx, t = parse_judgment(text)
        expected = embed_formula(f(ty))
        assert ill_typecheck(embed_context(ctx), embed_term(t), expected) == expected

    @pytest.mark.parametrize("text", [
        "x:a |- x * x",
        "x:a, y:b |- x",
        "x:a |- derelict! x",
    ])
    def test_rejects(self, text):
        ctx, t = parse_judgment(text)
        with pytest.raises(ILLTypeError):
            ill_typecheck(embed_context(ctx), embed_term(t))

    def test_expected_type_mismatch(self):
        with pytest.raises(ILLTypeError):
            ill_typecheck((("x", a),), Var("x"), b)


class TestPreservation:
    def test_beta_takes_at_least_one_step(self):
        ctx, t = parse_judgment("y:a |- appl (\\l x:a. x) y")
        rep = preservation_report([(ctx, t, a)])
        assert rep.ok
        (s,) = rep.entries[0].steps
        assert s.rule == "BetaL" and s.target_steps == 1

    def test_exchange_conversion_takes_no_step(self):
        ctx, t = parse_judgment(
            "x:k a, y:b |- let (exchl x, y with u, v in u * v) be p * q in p * q")
        assert typecheck(ctx, t, CalculusLevel.LKappa) == f("b * k a")
        (r, u), = [(r, u) for r, u in reducts(t) if r.rule.value == "NatEl"]
        assert alpha_eq(embed_term(t), embed_term(u))
        assert ill_distance(embed_term(t), embed_term(u)) == 0
        rep = preservation_report([(ctx, t, f("b * k a"))])
        assert rep.ok
        assert rep.entries[0].steps[0].flagged

    def test_distance_is_none_when_unreachable(self):
        assert ill_distance(Var("x"), Var("y")) is None

    @pytest.mark.parametrize("level", list(CalculusLevel))
    def test_generated(self, level):
        corpus = random_terms(level, 80, seed=7)
        rep = preservation_report(corpus)
        assert rep.type_preserved == len(corpus)
        assert rep.ok, rep.violations
        for s in rep.all_steps:
            assert s.target_steps is not None and s.target_steps <= 10
            if s.rule in {r.value for r in BETA_FAMILY}:
                assert s.target_steps >= 1

    def test_summary(self):
        rep = preservation_report(random_terms(CalculusLevel.L, 5, seed=1))
        assert rep.summary().startswith("5/5 judgments preserved")
