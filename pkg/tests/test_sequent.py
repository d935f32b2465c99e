import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import l_formulas, sequents
from oracles import naive_provable, oracle_formulas
from lambekdial.generators import cut_derivations
from lambekdial.sequent import (
    BudgetExceeded, CutNotAdmissible, Derivation, DerivationError, Found,
    FuelExhausted, NotProvable, Rule, SearchBudget, ax, balanced, check_derivation,
    count_cuts, cut, dumps_derivation, eliminate_cut, is_cut_free, loads_derivation,
    premise_sequents, prove, rules_for,
)
from lambekdial.syntax import (
    Atom, Bang, CalculusLevel, I, Kappa, RImp, Sequent, Tensor, parse_sequent,
)

L, LB, LK, LBK = (CalculusLevel.L, CalculusLevel.LBang, CalculusLevel.LKappa,
                  CalculusLevel.LBangKappa)
a, b = Atom("a"), Atom("b")


def seq(text):
    return parse_sequent(text)


class TestRules:
    def test_rule_sets(self):
        base = {Rule.Ax, Rule.Cut, Rule.Ur, Rule.Ul, Rule.Tl, Rule.Tr,
                Rule.IRl, Rule.ILl, Rule.IRr, Rule.ILr}
        assert rules_for(L) == base
        assert rules_for(LB) == base | {Rule.C, Rule.W, Rule.Br, Rule.Bl}
        assert rules_for(LK) == base | {Rule.Er, Rule.El, Rule.E1, Rule.E2}
        assert rules_for(LBK) == rules_for(LB) | rules_for(LK)

    def test_premise_layout_of_right_implication_left_rule(self):
        # Δ1, Γ, A\B, Δ2 |- C  from  Γ |- A  and  Δ1, B, Δ2 |- C
        concl = seq("c, a, a \\ b, d |- e")
        p0, p1 = premise_sequents(Rule.ILr, concl, (1,), 2)
        assert p0 == seq("a |- a")
        assert p1 == seq("c, b, d |- e")

    def test_premise_layout_of_left_implication_left_rule(self):
        concl = seq("c, b / a, a, d |- e")
        p0, p1 = premise_sequents(Rule.ILl, concl, (3,), 1)
        assert p0 == seq("a |- a")
        assert p1 == seq("c, b, d |- e")


class TestCheck:
    def test_axiom(self):
        assert check_derivation(ax(a), L) == seq("a |- a")

    def test_axiom_mismatch(self):
        with pytest.raises(DerivationError):
            check_derivation(Derivation(Rule.Ax, seq("a |- b")), L)

    def test_exchange_derivation(self):
        s = seq("k a, b |- b * k a")
        tr = Derivation(Rule.Tr, seq("b, k a |- b * k a"), (ax(b), ax(Kappa(a))), (1,))
        d = Derivation(Rule.E1, s, (tr,), (), 0)
        assert check_derivation(d, LK) == s
        with pytest.raises(DerivationError):
            check_derivation(d, L)

    def test_promotion_needs_bang_context(self):
        d = Derivation(Rule.Br, seq("k a |- !k a"), (ax(Kappa(a)),))
        with pytest.raises(DerivationError):
            check_derivation(d, LBK)

    def test_wrong_level(self):
        d = Derivation(Rule.W, seq("!a, b |- b"), (ax(b),), (), 0)
        assert check_derivation(d, LB) == seq("!a, b |- b")
        with pytest.raises(DerivationError):
            check_derivation(d, LK)

    def test_bad_split(self):
        d = Derivation(Rule.Tr, seq("a, b |- a * b"), (ax(a), ax(b)), (2,))
        with pytest.raises(DerivationError):
            check_derivation(d, L)

    def test_serialisation_round_trip(self):
        d = prove(seq("(a * b) * c |- a * (b * c)")).derivation
        assert loads_derivation(dumps_derivation(d)) == d


class TestProve:
    def test_axiom(self):
        res = prove(seq("a |- a"))
        assert isinstance(res, Found) and res.derivation.rule is Rule.Ax

    def test_no_exchange(self):
        assert isinstance(prove(seq("a, b |- b * a")), NotProvable)

    @pytest.mark.parametrize("text,level", [
        ("!a |- !a * !a", LB), ("!a |- I", LB), ("!a |- a", LB), ("!a |- !!a", LB),
        ("k a, b |- b * k a", LK), ("a, k b |- k b * a", LK),
    ])
    def test_modal_arrows(self, text, level):
        res = prove(seq(text), level)
        assert isinstance(res, Found)
        assert check_derivation(res.derivation, level) == seq(text)

    def test_modal_not_provable(self):
        assert isinstance(prove(seq("a |- !a"), LB), NotProvable)
        assert isinstance(prove(seq("a, b |- b * a"), LK), NotProvable)

    def test_budget(self):
        res = prove(seq("!a, !b |- (b * a) * (b * a) * (b * a)"), LB, SearchBudget(max_visited=5))
        assert isinstance(res, BudgetExceeded)

    def test_level_guard(self):
        with pytest.raises(ValueError):
            prove(seq("!a |- a"), L)

    def test_budget_must_be_positive(self):
        with pytest.raises(ValueError):
            SearchBudget(max_depth=0)

    def test_deterministic(self):
        s = seq("a / b, b, b \\ c |- a * c")
        assert prove(s) == prove(s)

    @given(st.sampled_from("abcde"), st.sampled_from("abcde"))
    def test_kappa_exchange_for_all_atoms(self, x, y):
        A, B = Atom(x), Atom(y)
        assert isinstance(prove(Sequent((Kappa(A), B), Tensor(B, Kappa(A))), LK), Found)
        assert isinstance(prove(Sequent((A, Kappa(B)), Tensor(Kappa(B), A)), LK), Found)
        if x != y:
            assert isinstance(prove(Sequent((A, B), Tensor(B, A))), NotProvable)


class TestOracleAgreement:
    def test_exhaustive_small_universe(self):
        # every sequent of up to two hypotheses over one-connective formulas
        fs = oracle_formulas(1, unit=True)
        for k in range(3):
            for ante in itertools.product(fs, repeat=k):
                for s in fs:
                    got = isinstance(prove(Sequent(ante, s)), Found)
                    assert got == naive_provable(ante, s), Sequent(ante, s)

    @given(sequents(l_formulas(atoms=("a", "b"), max_leaves=4), max_ante=4))
    def test_random(self, s):
        assert isinstance(prove(s), Found) == naive_provable(s.antecedent, s.succedent)

    @given(sequents(l_formulas(atoms=("a", "b"), max_leaves=4), max_ante=4))
    def test_balance_is_necessary(self, s):
        if naive_provable(s.antecedent, s.succedent):
            assert balanced(s)

    @given(sequents(l_formulas(max_leaves=4), max_ante=3))
    def test_found_checks_and_lifts(self, s):
        res = prove(s)
        if isinstance(res, Found):
            assert is_cut_free(res.derivation)
            for level in CalculusLevel:
                assert check_derivation(res.derivation, level) == s


class TestCutElimination:
    def test_axiom_against_axiom(self):
        d = cut(ax(a), ax(a), 0)
        assert check_derivation(d, L) == seq("a |- a")
        assert eliminate_cut(d) == ax(a)

    def test_unit_into_unit_left(self):
        ur = Derivation(Rule.Ur, Sequent((), I))
        irr = Derivation(Rule.IRr, seq("|- a \\ a"), (ax(a),))
        ul = Derivation(Rule.Ul, Sequent((I,), RImp(a, a)), (irr,), (), 0)
        d = cut(ur, ul, 0)
        out = eliminate_cut(d)
        assert is_cut_free(out)
        assert check_derivation(out, L) == seq("|- a \\ a")
        assert out.conclusion == prove(seq("|- a \\ a")).derivation.conclusion

    def test_found_is_unchanged(self):
        d = prove(seq("a / b, b / c |- a / c")).derivation
        assert eliminate_cut(d) == d

    @pytest.mark.parametrize("level", [L, LK])
    def test_generated(self, level):
        for lv, d in cut_derivations(12, seed=3, levels=(level,)):
            assert lv is level
            assert count_cuts(d) >= 1
            out = eliminate_cut(d)
            assert is_cut_free(out)
            assert check_derivation(out, level) == d.conclusion

    def test_fuel(self):
        ds = [d for _, d in cut_derivations(20, seed=1) if count_cuts(d) >= 2]
        with pytest.raises(FuelExhausted):
            for d in ds:
                eliminate_cut(d, fuel=1)

    def test_promotion_against_contraction_needs_exchange(self):
        # !a, !b |- !(a * b) cut into a contraction on !(a * b)
        s1 = seq("!a, !b |- !(a * b)")
        d1 = prove(s1, LB).derivation
        s2 = seq("!(a * b) |- (a * b) * (a * b)")
        d2 = prove(s2, LB).derivation
        assert d2.rule is Rule.C
        with pytest.raises(CutNotAdmissible):
            eliminate_cut(cut(d1, d2, 0))

    def test_modal_cut(self):
        d1 = prove(seq("!a |- !!a"), LB).derivation
        d2 = prove(seq("!!a |- !a * !a"), LB).derivation
        out = eliminate_cut(cut(d1, d2, 0))
        assert is_cut_free(out)
        assert check_derivation(out, LB) == seq("!a |- !a * !a")
