import io
import subprocess
import sys

import pytest

from lambekdial.algebra import dumps_model, two
from lambekdial.cli import (
    INPUT_ERROR, NEGATIVE, OK, UNKNOWN, InputError, load_corpus, parse_corpus,
    run, run_corpus,
)
from lambekdial.sequent import Derivation, Rule, dumps_derivation, prove
from lambekdial.syntax import parse_sequent


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


class TestProve:
    def test_not_provable(self):
        code, out, _ = cli("prove", "--level", "l", "a, b |- b * a")
        assert code == NEGATIVE == 1
        assert "NotProvable" in out

    def test_exchange_at_kappa(self):
        code, out, _ = cli("prove", "--level", "lkappa", "k a, b |- b * k a")
        assert code == OK == 0
        assert "E1" in out

    def test_budget(self):
        code, out, _ = cli("prove", "--level", "lbang", "--budget", "5",
                           "!a, !b |- (b * a) * (b * a) * (b * a)")
        assert code == UNKNOWN == 2

    def test_level_defaults_to_the_sequent(self):
        assert cli("prove", "!a |- a")[0] == OK

    def test_bad_input(self):
        code, _, err = cli("prove", "a *")
        assert code == INPUT_ERROR == 3
        assert "position" in err

    def test_level_too_low(self):
        assert cli("prove", "--level", "l", "!a |- a")[0] == INPUT_ERROR


class TestMachineFormat:
    def test_key_value_lines(self):
        code, out, _ = cli("prove", "--format", "machine", "a |- a")
        assert code == OK
        assert all("=" in line for line in out.splitlines())
        assert "status=found" in out

    @pytest.mark.parametrize("argv", [
        ("prove", "a / b, b / c |- a / c"),
        ("countermodel", "a, b |- b * a"),
        ("normalize", "--trace", "appl (\\l x:a. x) (appl (\\l y:b. y) z)"),
        ("laws", "--model", "builtin:two", "--samples", "2"),
    ])
    def test_deterministic(self, argv):
        first = cli(argv[0], "--format", "machine", *argv[1:])
        assert first == cli(argv[0], "--format", "machine", *argv[1:])


class TestOtherCommands:
    def test_parse(self):
        code, out, _ = cli("parse", "a * b \\ c")
        assert code == OK and "a * b \\ c" in out

    def test_parse_sequent_round_trip(self):
        code, out, _ = cli("parse", "--format", "machine", "a, b |- b * a")
        assert code == OK and "a, b |- b * a" in out

    def test_typecheck(self):
        code, out, _ = cli("typecheck", "x:a, y:a \\ b |- appr y x")
        assert code == OK and "b" in out
        code, out, _ = cli("typecheck", "x:a, y:b |- y * x")
        assert code == NEGATIVE and "OrderViolation" in out

    def test_normalize(self):
        code, out, _ = cli("normalize", "--trace", "appl (\\l x:a. x) (appl (\\l y:b. y) z)")
        assert code == OK
        assert out.count("BetaL @ ") == 2

    def test_normalize_out_of_fuel(self):
        code, _, _ = cli("normalize", "--fuel", "5", "appl (\\l x:a. appl x x) (\\l x:a. appl x x)")
        assert code == UNKNOWN

    def test_embed(self):
        code, out, _ = cli("embed", "--level", "lkappa",
                           "x:k a, y:b |- exchl x, y with u, v in u * v")
        assert code == OK
        assert "b * !a" in out

    def test_eval(self):
        code, _, _ = cli("eval", "--model", "builtin:rel2", "--valuation", "a={01},b={10}",
                         "a, b |- b * a")
        assert code == NEGATIVE
        assert cli("eval", "--model", "builtin:two", "--valuation", "a=1", "a |- a")[0] == OK

    def test_countermodel(self):
        code, out, _ = cli("countermodel", "a, b |- b * a")
        assert code == NEGATIVE and "rel2" in out
        assert cli("countermodel", "a |- a")[0] == OK
        assert cli("countermodel", "--level", "lbang", "!a |- a")[0] == OK

    def test_laws(self):
        code, out, _ = cli("laws", "--model", "builtin:trivial", "--samples", "2")
        assert code == OK
        assert "pentagon" in out

    def test_model_file(self, tmp_path):
        p = tmp_path / "two.model"
        p.write_text(dumps_model(two()))
        assert cli("eval", "--model", str(p), "--valuation", "a=0", "a |- a")[0] == OK

    def test_unknown_model(self):
        assert cli("laws", "--model", "builtin:nope")[0] == INPUT_ERROR


class TestCheck:
    def test_valid_file(self, tmp_path):
        p = tmp_path / "d.sexp"
        p.write_text(dumps_derivation(prove(parse_sequent("a / b, b |- a")).derivation))
        assert cli("check", str(p))[0] == OK

    def test_rejected_derivation(self, tmp_path):
        p = tmp_path / "d.sexp"
        p.write_text(dumps_derivation(Derivation(Rule.Ax, parse_sequent("a |- b"))))
        assert cli("check", str(p))[0] == NEGATIVE

    def test_malformed_file(self, tmp_path):
        p = tmp_path / "d.sexp"
        p.write_text("(rule Ax")
        assert cli("check", str(p))[0] == INPUT_ERROR

    def test_missing_file(self):
        assert cli("check", "/nonexistent/file")[0] == INPUT_ERROR


class TestCorpus:
    def test_golden_corpus(self):
        code, out, _ = cli("corpus")
        assert code == OK
        assert "fail: 0" in out

    def test_golden_corpus_size(self):
        entries = load_corpus()
        assert len(entries) >= 60
        assert {e.kind for e in entries} == {"sequent", "judgment", "reduction"}

    def test_flipped_expectation(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("ok l sequent a |- a => provable\n"
                     "flip l sequent a, b |- b * a => provable\n")
        code, out, _ = cli("corpus", str(p))
        assert code == NEGATIVE
        assert "flip" in out and "fail: 1" in out

    def test_empty(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("# nothing here\n")
        code, out, _ = cli("corpus", str(p))
        assert code == OK
        assert "total: 0" in out

    @pytest.mark.parametrize("line", [
        "x1 l sequent a |- a",
        "x1 q sequent a |- a => provable",
        "x1 l sequent a |- a => maybe",
        "x1 l teapot a => provable",
    ])
    def test_malformed(self, tmp_path, line):
        p = tmp_path / "c.txt"
        p.write_text(line + "\n")
        assert cli("corpus", str(p))[0] == INPUT_ERROR

    def test_duplicate_ids(self):
        with pytest.raises(InputError):
            parse_corpus("a l sequent a |- a => provable\na l sequent a |- a => provable\n")

    def test_parallel_keeps_order(self):
        entries = load_corpus()
        serial = run_corpus(entries, jobs=1)
        parallel = run_corpus(entries, jobs=2)
        assert [r for r in serial.results] == [r for r in parallel.results]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "lambekdial", "prove", "a |- a"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "provable" in res.stdout
