import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import terms
from lambekdial.generators import random_terms
from lambekdial.rewrite import (
    BETA_FAMILY, CONVERSIONS, FuelExhausted, InvalidRedex, NormalForm, Redex,
    RewriteRule, conversion_equal, format_path, join_status, joinable, normalize,
    peak_pairs, reducts, redexes, step, trace_lines,
)
from lambekdial.syntax import CalculusLevel, Var, alpha_eq, free_vars, parse_term, render
from lambekdial.typecheck import typecheck

R = RewriteRule


def t(text):
    return parse_term(text)


def only_redex(text):
    rs = redexes(t(text))
    assert len(rs) == 1
    return rs[0]


class TestRedexes:
    def test_examples(self):
        assert redexes(t("appl (\\l x:a. x) y")) == [Redex((), R.BetaL)]
        assert redexes(t("unit")) == []
        assert redexes(t("derelict! (promote! z for x in x)")) == [Redex((), R.BetaDR)]

    def test_leftmost_outermost_order(self):
        rs = redexes(t("appl (\\l x:a. appl (\\l y:a. y) x) (appr (\\r z:a. z) w)"))
        assert [r.rule for r in rs] == [R.BetaL, R.BetaL, R.BetaR]
        assert rs[0].path == ()
        assert len(rs[1].path) > 0 and rs[1].path < rs[2].path

    def test_rule_families_partition(self):
        assert BETA_FAMILY | CONVERSIONS == set(RewriteRule)
        assert not BETA_FAMILY & CONVERSIONS


@pytest.mark.parametrize("text,rule,expected", [
    ("appl (\\l x:a. x) y", R.BetaL, "y"),
    ("appr (\\r x:a. x) y", R.BetaR, "y"),
    ("let unit be unit in s", R.BetaU, "s"),
    ("let a * b be x * y in y * x", R.BetaT1, "b * a"),
    ("let (a * b) * c be (x * y) * z in x * y * z", R.BetaT2,
     "let a * b be x * y in x * y * c"),
    ("let (let s be x * y in x * y) be u * v in u * v", R.NatT,
     "let s be x * y in let x * y be u * v in u * v"),
    ("let (let s be unit in w) be unit in u", R.NatU,
     "let s be unit in let w be unit in u"),
    ("let s be - in w", R.LetU, "let s be unit in w"),
    ("derelict! (promote! z for x in x)", R.BetaDR, "z"),
    ("discard (promote! z for x in x) in y", R.BetaDI, "discard z in y"),
    ("let (discard s in w) be u * v in u * v", R.NatD,
     "discard s in let w be u * v in u * v"),
    ("let (copy s as p, q in w) be u * v in u * v", R.NatC,
     "copy s as p, q in let w be u * v in u * v"),
    ("derelictk (promotek z for x in x)", R.BetaEDR, "z"),
    ("let (exchl a, b with x, y in w) be u * v in u * v", R.NatEl,
     "exchl a, b with x, y in let w be u * v in u * v"),
    ("let (exchr a, b with x, y in w) be u * v in u * v", R.NatEr,
     "exchr a, b with x, y in let w be u * v in u * v"),
])
def test_step_examples(text, rule, expected):
    r = only_redex(text)
    assert r.rule is rule
    assert alpha_eq(step(t(text), r), t(expected))


def test_copy_of_promotion_copies_the_sources():
    src = t("copy (promote! z for x in x) as y1, y2 in y1 * y2")
    r = only_redex("copy (promote! z for x in x) as y1, y2 in y1 * y2")
    assert r.rule is R.BetaC
    out = step(src, r)
    assert render(out).startswith("copy z as ")
    # both halves are promotions over the fresh copies
    assert free_vars(out) == {"z"}


def test_invalid_redex():
    with pytest.raises(InvalidRedex):
        step(t("unit"), Redex((), R.BetaL))
    with pytest.raises((InvalidRedex, IndexError)):
        step(t("x * y"), Redex((5,), R.BetaU))


class TestNormalize:
    def test_variable(self):
        assert normalize(Var("y")) == NormalForm(Var("y"), 0)

    def test_nested(self):
        nf = normalize(t("appl (\\l x:a. x) (appl (\\l y:b. y) z)"))
        assert nf.term == Var("z") and nf.steps == 2

    def test_fuel_exhaustion(self):
        omega = t("appl (\\l x:a. appl x x) (\\l x:a. appl x x)")
        with pytest.raises(FuelExhausted) as e:
            normalize(omega, fuel=50)
        assert e.value.steps == 50

    def test_trace_format(self):
        lines = trace_lines(t("appl (\\l x:a. x) (appl (\\l y:b. y) z)"))
        assert len(lines) == 2
        assert all(line.startswith("BetaL @ ") for line in lines)
        assert lines[0].split(" : ")[0] == f"BetaL @ {format_path(())}"
        assert lines[1].endswith(" : (var z)")

    @given(terms())
    def test_deterministic(self, u):
        try:
            a = normalize(u, fuel=200)
        except FuelExhausted as e:
            with pytest.raises(FuelExhausted) as e2:
                normalize(u, fuel=200)
            assert e2.value.steps == e.steps
        else:
            assert normalize(u, fuel=200) == a

    @pytest.mark.parametrize("level", list(CalculusLevel))
    def test_typed_terms_terminate_and_keep_their_type(self, level):
        for ctx, u, ty in random_terms(level, 60, seed=21):
            nf = normalize(u, fuel=10_000)
            assert redexes(nf.term) == []
            assert typecheck(ctx, nf.term, level) == ty


class TestSafety:
    @given(terms())
    def test_no_new_free_variables(self, u):
        for _, v in reducts(u):
            assert free_vars(v) <= free_vars(u)

    @given(terms())
    def test_reducts_follow_redexes(self, u):
        assert [r for r, _ in reducts(u)] == redexes(u)


class TestJoinability:
    def test_reflexive(self):
        u = t("let p be x * y in y * x")
        assert joinable(u, u)

    def test_peak_example(self):
        u = t("let (appl (\\l x:a. x) y) be unit in unit")
        # a single redex sits in the scrutinee, so the peak is the term itself
        # against its one reduct
        rs = reducts(u)
        assert [r.rule for r, _ in rs] == [R.BetaL]
        assert list(peak_pairs(u)) == []
        assert joinable(u, rs[0][1])
        assert join_status(u, rs[0][1]) == "joined"

    def test_distinct(self):
        assert join_status(t("x * y"), t("y * x")) == "distinct"

    def test_indeterminate_is_not_false(self):
        omega = t("appl (\\l x:a. appl x x) (\\l x:a. appl x x)")
        assert join_status(omega, omega, fuel=20) == "indeterminate"
        with pytest.raises(FuelExhausted):
            joinable(omega, t("x"), fuel=20)

    def test_independent_lets_commute(self):
        a = t("let p be x * y in let q be unit in x * y")
        b = t("let q be unit in let p be x * y in x * y")
        assert conversion_equal(a, b)
        assert not conversion_equal(t("let p be x * y in x * y"), t("x * y"))

    @pytest.mark.parametrize("level", list(CalculusLevel))
    def test_generated_peaks_join(self, level):
        for _, u, _ in random_terms(level, 60, seed=4):
            for (_, u1), (_, u2) in peak_pairs(u):
                assert joinable(u1, u2), render(u)

    @settings(max_examples=40)
    @given(st.integers(0, 10_000))
    def test_peaks_join_on_random_seeds(self, seed):
        for _, u, _ in random_terms(CalculusLevel.LBangKappa, 4, seed=seed):
            for (_, u1), (_, u2) in peak_pairs(u):
                assert joinable(u1, u2)
