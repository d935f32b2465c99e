import pytest
from hypothesis import given
from hypothesis import strategies as st

from lambekdial.generators import random_terms
from lambekdial.sequent import Rule, check_derivation, rules_used
from lambekdial.syntax import (
    CalculusLevel, PromoteBang, Sequent, UnitTerm, Var, parse_formula,
    parse_judgment, render,
)
from lambekdial.typecheck import (
    TypeCheckError, TypeErrorKind, elaborate, subject_reduction_report, typecheck,
    well_typed,
)

L, LB, LK, LBK = (CalculusLevel.L, CalculusLevel.LBang, CalculusLevel.LKappa,
                  CalculusLevel.LBangKappa)
K = TypeErrorKind


def judge(text, level=L):
    ctx, t = parse_judgment(text)
    return typecheck(ctx, t, level)


def kind_of(text, level=L):
    ctx, t = parse_judgment(text)
    with pytest.raises(TypeCheckError) as e:
        typecheck(ctx, t, level)
    return e.value.kind


@pytest.mark.parametrize("text,level,expected", [
    ("x:a |- x", L, "a"),
    ("|- unit", L, "I"),
    ("|- \\r x:a. x", L, "a \\ a"),
    ("|- \\l x:a. x", L, "a / a"),
    ("x:a, y:a \\ b |- appr y x", L, "b"),
    ("y:b / a, x:a |- appl y x", L, "b"),
    ("x:a, y:b |- x * y", L, "a * b"),
    ("p:a * b |- let p be u * v in u * v", L, "a * b"),
    ("x:a, y:I, z:b |- let y be unit in x * z", L, "a * b"),
    ("x:a, y:I |- let y be - in x", L, "a"),
    ("x:!a |- copy x as y, z in derelict! y * derelict! z", LB, "a * a"),
    ("x:!a, y:b |- discard x in y", LB, "b"),
    ("x:!a |- promote! x for y in y", LB, "!!a"),
    ("x:k a, y:b |- exchl x, y with u, v in u * v", LK, "b * k a"),
    ("x:a, y:k b |- exchr x, y with u, v in u * v", LK, "k b * a"),
    ("x:k a |- derelictk x", LK, "a"),
    ("x:k a |- promotek x for y in y", LK, "k k a"),
])
def test_examples(text, level, expected):
    assert judge(text, level) == parse_formula(expected)


@pytest.mark.parametrize("text,level,kind", [
    ("x:a |- y", L, K.UnboundVar),
    ("x:a, y:b |- y * x", L, K.OrderViolation),
    ("x:a |- x * x", L, K.NonLinearUse),
    ("x:a, y:b |- x", L, K.NonLinearUse),
    ("x:!a |- derelict! x", L, K.ConnectiveAtWrongLevel),
    ("x:k a |- derelictk x", LB, K.ConnectiveAtWrongLevel),
    ("x:a, y:b \\ c |- appr y x", L, K.Mismatch),
    ("x:a |- derelict! x", LB, K.Mismatch),
    ("x:a, y:b |- let y be - in x", L, K.Mismatch),
])
def test_errors(text, level, kind):
    assert kind_of(text, level) is kind


def test_promote_arity():
    t = PromoteBang((Var("x"),), ("y", "z"), Var("y"))
    with pytest.raises((TypeCheckError, ValueError)):
        typecheck((("x", parse_formula("!a")),), t, LB)


def test_promote_body_uses_only_its_binders():
    kind_of("x:!a, w:b |- promote! x for y in y * w", LB)


def test_error_location_addresses_a_subterm():
    ctx, t = parse_judgment("x:a, y:b \\ c |- appr y x")
    with pytest.raises(TypeCheckError) as e:
        typecheck(ctx, t, L)
    assert all(isinstance(i, int) for i in e.value.location)


class TestElaborate:
    def test_unit(self):
        d = elaborate((), UnitTerm(), L)
        assert d.rule is Rule.Ur

    def test_exchange_uses_e1(self):
        ctx, t = parse_judgment("x:k a, y:b |- exchl x, y with u, v in u * v")
        d = elaborate(ctx, t, LK)
        assert check_derivation(d, LK) == Sequent(tuple(a for _, a in ctx), judge(
            "x:k a, y:b |- exchl x, y with u, v in u * v", LK))
        assert Rule.E1 in rules_used(d)

    @pytest.mark.parametrize("level", list(CalculusLevel))
    def test_generated_terms_elaborate(self, level):
        for ctx, t, ty in random_terms(level, 40, seed=11):
            a = typecheck(ctx, t, level)
            d = elaborate(ctx, t, level)
            assert check_derivation(d, level) == Sequent(tuple(f for _, f in ctx), a)


@pytest.mark.parametrize("level", list(CalculusLevel))
def test_generated_types_are_recorded(level):
    for ctx, t, ty in random_terms(level, 40, seed=5):
        assert typecheck(ctx, t, level) == ty


def test_erasure_to_higher_levels():
    for ctx, t, ty in random_terms(L, 60, seed=2):
        for level in CalculusLevel:
            assert typecheck(ctx, t, level) == ty


class TestSubjectReduction:
    def test_examples(self):
        ctx, t = parse_judgment("y:a |- appl (\\l x:a. x) y")
        rep = subject_reduction_report(ctx, t, L)
        assert rep.ok and rep.reducts == 1 and render(rep.type) == "a"
        ctx, t = parse_judgment("|- let unit be unit in unit")
        rep = subject_reduction_report(ctx, t, L)
        assert rep.ok and rep.reducts == 1

    @given(st.integers(0, 10_000), st.sampled_from(list(CalculusLevel)))
    def test_generated(self, seed, level):
        for ctx, t, ty in random_terms(level, 3, seed=seed):
            assert subject_reduction_report(ctx, t, level).ok


def test_linearity_property():
    # dropping or duplicating a hypothesis is always rejected
    for ctx, t, ty in random_terms(L, 40, seed=8):
        if ctx:
            assert not well_typed(ctx[1:], t, L)
            assert not well_typed(ctx + (("fresh", parse_formula("a")),), t, L)
