"""Command-line front end.

Exit codes: 0 affirmative, 1 definite negative, 2 indeterminate (budget,
fuel or bound exceeded), 3 input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import algebra, dialectica, ill, rewrite, sequent, sexp, typecheck
from .syntax import (
    CalculusLevel, ParseError, alpha_eq, context_to_sexp, formula_to_sexp,
    parse_formula, parse_judgment, parse_sequent, parse_term, render, render_context,
    sequent_atoms, sequent_level, sequent_to_sexp, term_to_sexp,
)

OK, NEGATIVE, UNKNOWN, INPUT_ERROR = 0, 1, 2, 3


class InputError(Exception):
    pass


class Output:
    """Collects records; machine format prints ``key=value`` lines."""

    def __init__(self, fmt):
        self.fmt = fmt
        self.lines = []

    def rec(self, key, value, text=None):
        if self.fmt == "machine":
            value = str(value).replace("\n", " ")
            self.lines.append(f"{key}={value}")
        elif text is not None:
            self.lines.append(text)
        else:
            self.lines.append(f"{key}: {value}")

    def text(self, line):
        if self.fmt == "text":
            self.lines.append(line)

    def dump(self, stream):
        for line in self.lines:
            print(line, file=stream)


def _level(args, default):
    if args.level:
        return CalculusLevel.parse(args.level)
    return default


def _check_level(level, needed, what):
    if not level.admits(needed):
        raise InputError(f"{what} needs level {needed.value}, got {level.value}")


def _judgment_or_term(text):
    if "|-" in text:
        return parse_judgment(text)
    return (), parse_term(text)


# ---------------------------------------------------------------------------
# Commands


def cmd_parse(args, out):
    text = args.input
    kind = args.kind
    if kind == "auto":
        if "|-" in text:
            head = text.split("|-", 1)[0]
            kind = "judgment" if ":" in head else "sequent"
            if kind == "sequent" and not head.strip():
                # "|- x" could be either; a formula parse decides
                try:
                    parse_sequent(text)
                except ParseError:
                    kind = "judgment"
        else:
            try:
                parse_formula(text)
                kind = "formula"
            except ParseError:
                kind = "term"
    if kind == "formula":
        f = parse_formula(text)
        out.rec("kind", kind)
        out.rec("render", render(f))
        out.rec("sexp", sexp.dumps(formula_to_sexp(f)))
    elif kind == "sequent":
        s = parse_sequent(text)
        out.rec("kind", kind)
        out.rec("render", render(s))
        out.rec("level", sequent_level(s).value)
        out.rec("sexp", sexp.dumps(sequent_to_sexp(s)))
    elif kind == "term":
        t = parse_term(text)
        out.rec("kind", kind)
        out.rec("render", render(t))
        out.rec("sexp", sexp.dumps(term_to_sexp(t)))
    else:
        ctx, t = parse_judgment(text)
        out.rec("kind", "judgment")
        out.rec("render", f"{render_context(ctx)} |- {render(t)}".lstrip())
        out.rec("sexp", sexp.dumps([context_to_sexp(ctx), term_to_sexp(t)]))
    return OK


def cmd_check(args, out):
    try:
        with open(args.file) as fh:
            d = sequent.loads_derivation(fh.read())
    except OSError as e:
        raise InputError(str(e)) from None
    except (sexp.SexpError, ValueError, KeyError) as e:
        if isinstance(e, sequent.DerivationError):
            raise
        raise InputError(f"malformed derivation file: {e}") from None
    level = _level(args, CalculusLevel.LBangKappa)
    try:
        concl = sequent.check_derivation(d, level)
    except sequent.DerivationError as e:
        out.rec("status", "invalid", f"invalid derivation: {e}")
        return NEGATIVE
    out.rec("status", "valid", "valid derivation")
    out.rec("conclusion", render(concl))
    out.rec("cuts", sequent.count_cuts(d))
    out.rec("height", sequent.height(d))
    return OK


def cmd_prove(args, out):
    s = parse_sequent(args.input)
    level = _level(args, sequent_level(s))
    _check_level(level, sequent_level(s), "sequent")
    budget = sequent.SearchBudget(max_visited=args.budget) if args.budget else None
    res = sequent.prove(s, level, budget)
    if isinstance(res, sequent.Found):
        out.rec("status", "found", "provable")
        out.rec("sequent", render(s))
        out.rec("rules", sequent.derivation_size(res.derivation))
        if args.format == "machine":
            out.rec("derivation", sequent.dumps_derivation(res.derivation))
        else:
            out.text(res.derivation.render())
        return OK
    if isinstance(res, sequent.NotProvable):
        out.rec("status", "not-provable", f"NotProvable: {render(s)} at level {level.value}")
        return NEGATIVE
    out.rec("status", "budget-exceeded", f"BudgetExceeded after {res.visited} nodes")
    out.rec("visited", res.visited)
    return UNKNOWN


def cmd_typecheck(args, out):
    ctx, t = parse_judgment(args.input)
    level = _level(args, CalculusLevel.LBangKappa)
    try:
        a = typecheck.typecheck(ctx, t, level)
    except typecheck.TypeCheckError as e:
        out.rec("status", "ill-typed", f"ill-typed: {e}")
        out.rec("error", e.kind.value)
        out.rec("location", "/".join(map(str, e.location)) or "root")
        return NEGATIVE
    out.rec("status", "well-typed", "well-typed")
    out.rec("type", render(a))
    return OK


def cmd_normalize(args, out):
    ctx, t = _judgment_or_term(args.input)
    if ctx:
        level = _level(args, CalculusLevel.LBangKappa)
        try:
            typecheck.typecheck(ctx, t, level)
        except typecheck.TypeCheckError as e:
            raise InputError(f"term is not well typed: {e}") from None
    trace = [] if args.trace else None
    try:
        nf = rewrite.normalize(t, args.fuel, trace)
    except rewrite.FuelExhausted as e:
        out.rec("status", "fuel-exhausted", f"no normal form within {e.steps} steps")
        return UNKNOWN
    for i, line in enumerate(trace or []):
        out.rec(f"step{i + 1}", line, f"  {line}")
    out.rec("status", "normal", "normal form")
    out.rec("normal_form", render(nf.term))
    out.rec("steps", nf.steps)
    return OK


def cmd_embed(args, out):
    ctx, t = parse_judgment(args.input)
    level = _level(args, CalculusLevel.LBangKappa)
    try:
        a = typecheck.typecheck(ctx, t, level)
    except typecheck.TypeCheckError as e:
        raise InputError(f"term is not well typed: {e}") from None
    out.rec("context", render_context(ill.embed_context(ctx)))
    out.rec("term", render(ill.embed_term(t)))
    out.rec("type", render(ill.embed_formula(a)))
    rep = ill.preservation_report([(ctx, t, a)], max_steps=args.bound or 10)
    entry = rep.entries[0]
    out.rec("typed", str(entry.typed).lower())
    for s in entry.steps:
        where = ".".join(map(str, s.path)) or "root"
        out.rec("step", f"{s.rule}@{where} ill_steps={s.target_steps} joined={str(s.joined).lower()}")
    if rep.ok:
        out.rec("status", "preserved")
        return OK
    for v in rep.violations:
        out.rec("violation", " | ".join(map(str, v)))
    out.rec("status", "violated")
    return NEGATIVE


def _load_model(spec):
    try:
        return algebra.load_model(spec)
    except algebra.InvalidModel as e:
        raise InputError(f"invalid model: {e}") from None
    except (OSError, ValueError) as e:
        raise InputError(str(e)) from None


def _parse_valuation(m, text):
    v = {}
    for part in text.split(","):
        if "=" not in part:
            raise InputError(f"bad valuation entry {part!r}; expected atom=element")
        atom, name = (x.strip() for x in part.split("=", 1))
        if name not in m.names:
            raise InputError(f"{name!r} is not an element of {m.label}")
        v[atom] = m.names.index(name)
    return v


def cmd_eval(args, out):
    s = parse_sequent(args.input)
    m = _load_model(args.model or "builtin:two").with_residuals()
    level = _level(args, sequent_level(s))
    if not algebra.applicable(m, level):
        raise InputError(f"model {m.label} cannot interpret level {level.value}")
    atoms = sequent_atoms(s)
    if args.valuation:
        vals = [_parse_valuation(m, args.valuation)]
        missing = set(atoms) - set(vals[0])
        if missing:
            raise InputError(f"valuation misses {sorted(missing)}")
    else:
        vals = algebra.valuations(m, atoms, seed=args.seed)
    checked = 0
    for v in vals:
        checked += 1
        if not algebra.eval_sequent(m, v, s):
            out.rec("status", "false", "false")
            out.rec("witness", algebra.Witness(m, v).describe())
            return NEGATIVE
    out.rec("status", "true", "true")
    out.rec("model", m.label)
    out.rec("valuations", checked)
    return OK


def cmd_countermodel(args, out):
    s = parse_sequent(args.input)
    level = _level(args, sequent_level(s))
    _check_level(level, sequent_level(s), "sequent")
    models = [_load_model(args.model)] if args.model else None
    w = algebra.find_countermodel(s, level, models, seed=args.seed)
    if w is None:
        out.rec("status", "none", "no countermodel among the searched models")
        return OK
    out.rec("status", "found", "countermodel found")
    out.rec("witness", w.describe())
    if args.format == "text" and w.model.n <= 4:
        out.text(algebra.dumps_model(w.model).rstrip())
    return NEGATIVE


def cmd_laws(args, out):
    host = _load_model(args.model or "builtin:two")
    k = args.bound if args.bound is not None else 2
    rep = dialectica.check_laws(host, samples=args.samples, k=k, seed=args.seed)
    for line in rep.lines():
        out.rec("law", line, line)
    out.rec("host", rep.host)
    if rep.failed_laws() and any(rep.laws[n].failed for n in rep.failed_laws()):
        out.rec("status", "failed", f"FAILED: {', '.join(rep.failed_laws())}")
        return NEGATIVE
    if rep.bound_exceeded:
        out.rec("status", "bound-exceeded", f"bound exceeded {rep.bound_exceeded} times")
        return UNKNOWN
    out.rec("status", "pass", "all laws pass")
    return OK


# ---------------------------------------------------------------------------
# Corpus files

SEQUENT_EXPECT = {"provable", "not-provable"}
JUDGMENT_EXPECT = {"type", "untypable", "preserved", "normal-form"}
REDUCTION_EXPECT = {"normal-form", "joins"}


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    level: CalculusLevel
    kind: str
    payload: str
    expectation: str
    argument: str = ""
    line: int = 0


def parse_corpus(text):
    """Entries of a corpus file; ``#`` starts a comment line."""
    entries = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if " => " not in line:
            raise InputError(f"line {no}: missing ' => expectation'")
        head, expect = line.rsplit(" => ", 1)
        parts = head.split(None, 3)
        if len(parts) < 4:
            raise InputError(f"line {no}: expected '<id> <level> <kind> <payload> => ...'")
        eid, lvl, kind, payload = parts
        try:
            level = CalculusLevel.parse(lvl)
        except ValueError as e:
            raise InputError(f"line {no}: {e}") from None
        exp, _, arg = expect.strip().partition(" ")
        allowed = {"sequent": SEQUENT_EXPECT, "judgment": JUDGMENT_EXPECT,
                   "reduction": REDUCTION_EXPECT}.get(kind)
        if allowed is None:
            raise InputError(f"line {no}: unknown kind {kind!r}")
        if exp not in allowed:
            raise InputError(f"line {no}: expectation {exp!r} does not fit kind {kind}")
        entry = CorpusEntry(eid, level, kind, payload, exp, arg.strip(), no)
        try:
            parse_payload(entry)
        except (ParseError, ValueError) as e:
            raise InputError(f"line {no}: {e}") from None
        entries.append(entry)
    ids = [e.id for e in entries]
    if len(set(ids)) != len(ids):
        raise InputError("duplicate entry ids")
    return entries


def parse_payload(e):
    if e.kind == "sequent":
        s = parse_sequent(e.payload)
        if not e.level.admits(sequent_level(s)):
            raise ValueError(f"sequent is outside level {e.level.value}")
        return s
    if e.kind == "reduction":
        if " ~> " not in e.payload:
            raise ValueError("reduction payload needs 'judgment ~> term'")
        left, right = e.payload.split(" ~> ", 1)
        ctx, t = _judgment_or_term(left)
        return ctx, t, parse_term(right)
    ctx, t = parse_judgment(e.payload)
    if e.expectation == "type":
        return ctx, t, parse_formula(e.argument)
    if e.expectation == "normal-form":
        return ctx, t, parse_term(e.argument)
    return ctx, t, None


def golden_corpus_path():
    return os.path.join(os.path.dirname(__file__), "data", "golden_corpus.txt")


def load_corpus(path=None):
    with open(path or golden_corpus_path()) as fh:
        return parse_corpus(fh.read())


def run_entry(e: CorpusEntry, fuel=10_000, budget=None):
    """(verdict, detail) where verdict is pass, fail or indeterminate."""
    parsed = parse_payload(e)
    if e.kind == "sequent":
        res = sequent.prove(parsed, e.level, budget)
        if isinstance(res, sequent.BudgetExceeded):
            return "indeterminate", "budget exceeded"
        got = "provable" if isinstance(res, sequent.Found) else "not-provable"
        return ("pass" if got == e.expectation else "fail"), got
    ctx, t, target = parsed
    if e.kind == "reduction":
        if ctx:
            try:
                typecheck.typecheck(ctx, t, e.level)
            except typecheck.TypeCheckError as err:
                return "fail", str(err)
        try:
            nf = rewrite.normalize(t, fuel).term
            if e.expectation == "normal-form":
                ok = alpha_eq(nf, target)
            else:
                ok = rewrite.joinable(t, target, fuel)
        except rewrite.FuelExhausted:
            return "indeterminate", "fuel exhausted"
        return ("pass" if ok else "fail"), render(nf)
    try:
        a = typecheck.typecheck(ctx, t, e.level)
    except typecheck.TypeCheckError as err:
        if e.expectation == "untypable":
            return "pass", err.kind.value
        return "fail", str(err)
    if e.expectation == "untypable":
        return "fail", f"typed as {render(a)}"
    if e.expectation == "type":
        return ("pass" if a == target else "fail"), render(a)
    if e.expectation == "normal-form":
        try:
            nf = rewrite.normalize(t, fuel).term
        except rewrite.FuelExhausted:
            return "indeterminate", "fuel exhausted"
        ok = alpha_eq(nf, target) and typecheck.typecheck(ctx, nf, e.level) == a
        return ("pass" if ok else "fail"), render(nf)
    rep = ill.preservation_report([(ctx, t, a)])
    return ("pass" if rep.ok else "fail"), rep.summary()


def _run_one(job):
    e, fuel, budget = job
    try:
        return run_entry(e, fuel, budget)
    except Exception as err:  # reported per entry, never fatal
        return "fail", f"{type(err).__name__}: {err}"


@dataclass
class CorpusSummary:
    results: list

    def count(self, verdict):
        return sum(1 for _, v, _ in self.results if v == verdict)

    @property
    def exit_code(self):
        if self.count("fail"):
            return NEGATIVE
        if self.count("indeterminate"):
            return UNKNOWN
        return OK


def run_corpus(entries, fuel=10_000, budget=None, jobs=None):
    """Run every entry; results come back in corpus order."""
    jobs = jobs if jobs is not None else min(4, os.cpu_count() or 1)
    work = [(e, fuel, budget) for e in entries]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            verdicts = list(pool.map(_run_one, work))
    else:
        verdicts = [_run_one(w) for w in work]
    return CorpusSummary([(e, v, d) for e, (v, d) in zip(entries, verdicts)])


def cmd_corpus(args, out):
    try:
        with open(args.file or golden_corpus_path()) as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(str(e)) from None
    entries = parse_corpus(text)
    budget = sequent.SearchBudget(max_visited=args.budget) if args.budget else None
    summary = run_corpus(entries, args.fuel, budget, args.jobs)
    for e, verdict, detail in summary.results:
        if args.format == "machine":
            out.rec("entry", f"{e.id} {verdict} {detail}")
        elif verdict != "pass" or args.verbose:
            out.text(f"{verdict.upper():<13} {e.id} (line {e.line}): expected {e.expectation}; {detail}")
    for v in ("pass", "fail", "indeterminate"):
        out.rec(v, summary.count(v))
    out.rec("total", len(entries))
    return summary.exit_code


# ---------------------------------------------------------------------------
# Entry point

COMMANDS = {
    "parse": cmd_parse, "check": cmd_check, "prove": cmd_prove,
    "typecheck": cmd_typecheck, "normalize": cmd_normalize, "embed": cmd_embed,
    "eval": cmd_eval, "countermodel": cmd_countermodel, "laws": cmd_laws,
    "corpus": cmd_corpus,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(INPUT_ERROR)


def _positive(text):
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--level", choices=[c.value for c in CalculusLevel])
    common.add_argument("--budget", type=_positive, help="max search nodes")
    common.add_argument("--fuel", type=_positive, default=10_000)
    common.add_argument("--model", help="FILE or builtin:NAME")
    common.add_argument("--bound", type=_positive)
    common.add_argument("--seed", type=int, default=algebra.DEFAULT_SEED)
    common.add_argument("--format", choices=["text", "machine"], default="text")

    p = _Parser(prog="lambekdial", description="Lambek calculus toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sp = sub.add_parser("parse", parents=[common], help="parse and re-render input")
    sp.add_argument("input")
    sp.add_argument("--kind", choices=["auto", "formula", "sequent", "term", "judgment"],
                    default="auto")
    sp = sub.add_parser("check", parents=[common], help="check a derivation file")
    sp.add_argument("file")
    for name, what in [("prove", "sequent"), ("typecheck", "judgment"),
                       ("embed", "judgment"), ("eval", "sequent"),
                       ("countermodel", "sequent")]:
        sp = sub.add_parser(name, parents=[common], help=f"{name} a {what}")
        sp.add_argument("input")
        if name == "eval":
            sp.add_argument("--valuation", help="atom=element,...")
    sp = sub.add_parser("normalize", parents=[common], help="normalize a term or judgment")
    sp.add_argument("input")
    sp.add_argument("--trace", action="store_true")
    sp = sub.add_parser("laws", parents=[common], help="dialectica law suite")
    sp.add_argument("--samples", type=_positive, default=50)
    sp = sub.add_parser("corpus", parents=[common], help="run a corpus file")
    sp.add_argument("file", nargs="?", help="defaults to the shipped golden corpus")
    sp.add_argument("--jobs", type=_positive)
    sp.add_argument("--verbose", action="store_true")
    return p


def run(argv, stdout=None, stderr=None):
    """Run one command; returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else INPUT_ERROR
    out = Output(args.format)
    try:
        code = COMMANDS[args.command](args, out)
    except (InputError, ParseError, sexp.SexpError) as e:
        out.dump(stdout)
        print(f"error: {e}", file=stderr)
        return INPUT_ERROR
    except ValueError as e:
        out.dump(stdout)
        print(f"error: {e}", file=stderr)
        return INPUT_ERROR
    except Exception as e:  # keep the exit code contract even on a bug
        out.dump(stdout)
        print(f"internal error: {type(e).__name__}: {e}", file=stderr)
        return INPUT_ERROR
    out.dump(stdout)
    return code


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
