"""Abstract syntax, concrete syntax and structural utilities.

Formulas are built from atoms, ``I``, ``*`` (tensor), ``\\`` (the implication
consuming its argument on the left) and ``/`` (consuming on the right), plus
the prefix modalities ``!`` and ``k``.  Terms cover the four typed calculi;
the two ILL-only constructors (``Lam``, ``App``) live here as well so that
traversal and substitution are shared.

>>> render(parse_formula("!a * b"))
'!a * b'
>>> parse_formula("a \\\\ b \\\\ c") == RImp(Atom("a"), RImp(Atom("b"), Atom("c")))
True
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Optional, Union

from . import sexp

# ---------------------------------------------------------------------------
# Formulas


class Formula:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Unit(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Tensor(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class RImp(Formula):
    """``arg \\ res``: consumes an ``arg`` on its left."""

    arg: Formula
    res: Formula


@dataclass(frozen=True, slots=True)
class LImp(Formula):
    """``res / arg``: consumes an ``arg`` on its right."""

    res: Formula
    arg: Formula


@dataclass(frozen=True, slots=True)
class Bang(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class Kappa(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class Lolli(Formula):
    """Linear implication of the ILL target; never produced by the parser."""

    arg: Formula
    res: Formula


I = Unit()


@dataclass(frozen=True, slots=True)
class Sequent:
    antecedent: tuple
    succedent: Formula

    def __post_init__(self):
        if not isinstance(self.antecedent, tuple):
            object.__setattr__(self, "antecedent", tuple(self.antecedent))


class CalculusLevel(enum.Enum):
    L = "l"
    LBang = "lbang"
    LKappa = "lkappa"
    LBangKappa = "lbangkappa"

    @property
    def has_bang(self):
        return self in (CalculusLevel.LBang, CalculusLevel.LBangKappa)

    @property
    def has_kappa(self):
        return self in (CalculusLevel.LKappa, CalculusLevel.LBangKappa)

    def admits(self, other: "CalculusLevel") -> bool:
        """True when everything legal at ``other`` is legal here."""
        return (self.has_bang or not other.has_bang) and (
            self.has_kappa or not other.has_kappa
        )

    @classmethod
    def parse(cls, text):
        try:
            return cls(text.lower())
        except ValueError:
            raise ValueError(f"unknown level {text!r}") from None


def formula_level(a: Formula) -> CalculusLevel:
    """The smallest level whose syntax contains ``a``."""
    bang = kappa = False
    stack = [a]
    while stack:
        f = stack.pop()
        if isinstance(f, Bang):
            bang = True
        elif isinstance(f, Kappa):
            kappa = True
        stack.extend(formula_children(f))
    return _level_of(bang, kappa)


def _level_of(bang, kappa):
    if bang and kappa:
        return CalculusLevel.LBangKappa
    if bang:
        return CalculusLevel.LBang
    if kappa:
        return CalculusLevel.LKappa
    return CalculusLevel.L


def sequent_level(s: Sequent) -> CalculusLevel:
    bang = kappa = False
    for f in (*s.antecedent, s.succedent):
        lv = formula_level(f)
        bang |= lv.has_bang
        kappa |= lv.has_kappa
    return _level_of(bang, kappa)


def formula_children(f):
    if isinstance(f, (Tensor,)):
        return (f.left, f.right)
    if isinstance(f, (RImp, Lolli)):
        return (f.arg, f.res)
    if isinstance(f, LImp):
        return (f.res, f.arg)
    if isinstance(f, (Bang, Kappa)):
        return (f.body,)
    return ()


def formula_size(f) -> int:
    return 1 + sum(formula_size(c) for c in formula_children(f))


def formula_depth(f) -> int:
    kids = formula_children(f)
    return 0 if not kids else 1 + max(formula_depth(c) for c in kids)


def atoms_of(*fs) -> list:
    """Atom names in first-occurrence order."""
    seen = {}
    stack = list(reversed(fs))
    while stack:
        f = stack.pop()
        if isinstance(f, Atom):
            seen.setdefault(f.name, None)
        stack.extend(reversed(formula_children(f)))
    return list(seen)


def sequent_atoms(s: Sequent) -> list:
    return atoms_of(*s.antecedent, s.succedent)


# ---------------------------------------------------------------------------
# Patterns and terms


class Pattern:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Wildcard(Pattern):
    pass


@dataclass(frozen=True, slots=True)
class PVar(Pattern):
    name: str


@dataclass(frozen=True, slots=True)
class UnitPat(Pattern):
    pass


@dataclass(frozen=True, slots=True)
class TensorPat(Pattern):
    left: Pattern
    right: Pattern


def pattern_vars(p: Pattern) -> list:
    if isinstance(p, PVar):
        return [p.name]
    if isinstance(p, TensorPat):
        return pattern_vars(p.left) + pattern_vars(p.right)
    return []


def rename_pattern(p: Pattern, ren: dict) -> Pattern:
    if isinstance(p, PVar):
        return PVar(ren.get(p.name, p.name))
    if isinstance(p, TensorPat):
        return TensorPat(rename_pattern(p.left, ren), rename_pattern(p.right, ren))
    return p


class Term:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


@dataclass(frozen=True, slots=True)
class UnitTerm(Term):
    pass


@dataclass(frozen=True, slots=True)
class TensorIntro(Term):
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class LamL(Term):
    var: str
    ann: Formula
    body: Term


@dataclass(frozen=True, slots=True)
class LamR(Term):
    var: str
    ann: Formula
    body: Term


@dataclass(frozen=True, slots=True)
class AppL(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class AppR(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class Let(Term):
    scrutinee: Term
    pattern: Pattern
    body: Term


@dataclass(frozen=True, slots=True)
class Copy(Term):
    src: Term
    x: str
    y: str
    body: Term


@dataclass(frozen=True, slots=True)
class Discard(Term):
    src: Term
    body: Term


@dataclass(frozen=True, slots=True)
class PromoteBang(Term):
    srcs: tuple
    vars: tuple
    body: Term


@dataclass(frozen=True, slots=True)
class DerelictBang(Term):
    term: Term


@dataclass(frozen=True, slots=True)
class ExchL(Term):
    t1: Term
    t2: Term
    x: str
    y: str
    body: Term


@dataclass(frozen=True, slots=True)
class ExchR(Term):
    t1: Term
    t2: Term
    x: str
    y: str
    body: Term


@dataclass(frozen=True, slots=True)
class PromoteKappa(Term):
    srcs: tuple
    vars: tuple
    body: Term


@dataclass(frozen=True, slots=True)
class DerelictKappa(Term):
    term: Term


@dataclass(frozen=True, slots=True)
class Lam(Term):
    """ILL abstraction."""

    var: str
    ann: Formula
    body: Term


@dataclass(frozen=True, slots=True)
class App(Term):
    """ILL application."""

    fun: Term
    arg: Term


UNIT = UnitTerm()

_PROMOTES = (PromoteBang, PromoteKappa)
_EXCHS = (ExchL, ExchR)
_LAMS = (LamL, LamR, Lam)
_APPS = (AppL, AppR, App)


def _check_promote(t):
    if len(t.srcs) != len(t.vars):
        raise ValueError("promote: sources and variables differ in length")


for _cls in _PROMOTES:
    _cls.__post_init__ = lambda self: (
        object.__setattr__(self, "srcs", tuple(self.srcs)),
        object.__setattr__(self, "vars", tuple(self.vars)),
        _check_promote(self),
    ) and None


def children(t: Term) -> tuple:
    """Immediate subterms in left-to-right order."""
    if isinstance(t, (Var, UnitTerm)):
        return ()
    if isinstance(t, TensorIntro):
        return (t.left, t.right)
    if isinstance(t, _LAMS):
        return (t.body,)
    if isinstance(t, _APPS):
        return (t.fun, t.arg)
    if isinstance(t, Let):
        return (t.scrutinee, t.body)
    if isinstance(t, Copy):
        return (t.src, t.body)
    if isinstance(t, Discard):
        return (t.src, t.body)
    if isinstance(t, _PROMOTES):
        return (*t.srcs, t.body)
    if isinstance(t, (DerelictBang, DerelictKappa)):
        return (t.term,)
    if isinstance(t, _EXCHS):
        return (t.t1, t.t2, t.body)
    raise TypeError(f"not a term: {t!r}")


def child_binders(t: Term) -> tuple:
    """For each child, the names the node binds in it."""
    if isinstance(t, _LAMS):
        return ((t.var,),)
    if isinstance(t, Let):
        return ((), tuple(pattern_vars(t.pattern)))
    if isinstance(t, Copy):
        return ((), (t.x, t.y))
    if isinstance(t, _PROMOTES):
        return tuple(() for _ in t.srcs) + (tuple(t.vars),)
    if isinstance(t, _EXCHS):
        return ((), (), (t.x, t.y))
    return tuple(() for _ in children(t))


def with_children(t: Term, kids) -> Term:
    kids = tuple(kids)
    if isinstance(t, (Var, UnitTerm)):
        return t
    if isinstance(t, TensorIntro):
        return TensorIntro(*kids)
    if isinstance(t, _LAMS):
        return type(t)(t.var, t.ann, kids[0])
    if isinstance(t, _APPS):
        return type(t)(*kids)
    if isinstance(t, Let):
        return Let(kids[0], t.pattern, kids[1])
    if isinstance(t, Copy):
        return Copy(kids[0], t.x, t.y, kids[1])
    if isinstance(t, Discard):
        return Discard(*kids)
    if isinstance(t, _PROMOTES):
        return type(t)(kids[:-1], t.vars, kids[-1])
    if isinstance(t, (DerelictBang, DerelictKappa)):
        return type(t)(kids[0])
    if isinstance(t, _EXCHS):
        return type(t)(kids[0], kids[1], t.x, t.y, kids[2])
    raise TypeError(f"not a term: {t!r}")


def rename_binders(t: Term, ren: dict) -> Term:
    """Rename the names bound at the root of ``t`` (bodies untouched)."""
    if not ren:
        return t
    r = lambda n: ren.get(n, n)  # noqa: E731
    if isinstance(t, _LAMS):
        return type(t)(r(t.var), t.ann, t.body)
    if isinstance(t, Let):
        return Let(t.scrutinee, rename_pattern(t.pattern, ren), t.body)
    if isinstance(t, Copy):
        return Copy(t.src, r(t.x), r(t.y), t.body)
    if isinstance(t, _PROMOTES):
        return type(t)(t.srcs, tuple(r(v) for v in t.vars), t.body)
    if isinstance(t, _EXCHS):
        return type(t)(t.t1, t.t2, r(t.x), r(t.y), t.body)
    return t


def free_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    out = set()
    for kid, bound in zip(children(t), child_binders(t)):
        out |= free_vars(kid) - set(bound)
    return frozenset(out)


def free_occurrences(t: Term) -> list:
    """Free variable occurrences in left-to-right textual order (with repeats)."""
    if isinstance(t, Var):
        return [t.name]
    out = []
    for kid, bound in zip(children(t), child_binders(t)):
        out.extend(v for v in free_occurrences(kid) if v not in bound)
    return out


def all_names(t: Term) -> set:
    """Every variable name occurring in ``t``, free or bound."""
    out = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            out.add(u.name)
        for bound in child_binders(u):
            out.update(bound)
        stack.extend(children(u))
    return out


def term_size(t: Term) -> int:
    return 1 + sum(term_size(k) for k in children(t))


def term_depth(t: Term) -> int:
    kids = children(t)
    return 0 if not kids else 1 + max(term_depth(k) for k in kids)


_SUFFIX = re.compile(r"\$\d+$")


def fresh(base: str, avoid) -> str:
    """Deterministic fresh name ``base$n`` with the least ``n`` not in ``avoid``."""
    stem = _SUFFIX.sub("", base)
    n = 1
    while f"{stem}${n}" in avoid:
        n += 1
    return f"{stem}${n}"


def substitute(t: Term, x: str, s: Term) -> Term:
    """Capture-avoiding ``[s/x]t``.

    >>> render(substitute(parse_term("appl f x"), "x", parse_term("u * v")))
    'appl f (u * v)'
    """
    return substitute_many(t, {x: s})


def substitute_many(t: Term, mapping: dict) -> Term:
    """Simultaneous capture-avoiding substitution."""
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if not mapping:
        return t
    kids = children(t)
    binders = child_binders(t)
    all_bound = {b for bs in binders for b in bs}
    ren = {}
    new_kids = []
    for kid, bound in zip(kids, binders):
        fv = free_vars(kid)
        sub = {k: v for k, v in mapping.items() if k not in bound and k in fv}
        if not sub:
            new_kids.append(kid)
            continue
        image_fv = set()
        for v in sub.values():
            image_fv |= free_vars(v)
        clash = [b for b in bound if b in image_fv]
        if clash:
            avoid = image_fv | fv | all_bound | set(ren.values()) | set(mapping)
            local = {}
            for b in clash:
                nb = fresh(b, avoid)
                avoid.add(nb)
                local[b] = nb
            ren.update(local)
            kid = substitute_many(kid, {b: Var(nb) for b, nb in local.items()})
        new_kids.append(substitute_many(kid, sub))
    return rename_binders(with_children(t, new_kids), ren)


def canonical(t: Term) -> Term:
    """Rename bound variables to ``_0, _1, ...`` in binding order.

    Two terms are alpha-equivalent iff their canonical forms are equal.
    """
    counter = [0]

    def go(u, env):
        if isinstance(u, Var):
            return Var(env.get(u.name, u.name))
        kids = children(u)
        binders = child_binders(u)
        ren = {}
        new = []
        for kid, bound in zip(kids, binders):
            local = dict(env)
            for b in bound:
                nb = f"_{counter[0]}"
                counter[0] += 1
                ren[b] = nb
                local[b] = nb
            new.append(go(kid, local))
        return rename_binders(with_children(u, new), ren)

    return go(t, {})


def alpha_eq(t1: Term, t2: Term) -> bool:
    return t1 == t2 or canonical(t1) == canonical(t2)


def term_level(t: Term) -> CalculusLevel:
    """Smallest level whose syntax contains ``t`` (annotations included)."""
    bang = kappa = False
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, (Copy, Discard, PromoteBang, DerelictBang)):
            bang = True
        if isinstance(u, (ExchL, ExchR, PromoteKappa, DerelictKappa)):
            kappa = True
        if isinstance(u, _LAMS):
            lv = formula_level(u.ann)
            bang |= lv.has_bang
            kappa |= lv.has_kappa
        stack.extend(children(u))
    return _level_of(bang, kappa)


# ---------------------------------------------------------------------------
# Tokenizer and parsers


class ParseError(ValueError):
    def __init__(self, message, pos):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


KEYWORDS = {
    "appl", "appr", "let", "be", "in", "copy", "as", "discard", "promote!",
    "derelict!", "promotek", "derelictk", "exchl", "exchr", "with", "for",
    "unit",
}

_TOK = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<turnstile>\|-)
  | (?P<lam>\\[lr](?![A-Za-z0-9_'$]))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_'$]*!?)
  | (?P<sym>[()*\\/!,:.\-])
    """,
    re.VERBOSE,
)


def _tokenize(text, term_mode):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOK.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        val = m.group()
        if kind == "lam" and not term_mode:
            # a formula such as "a \l": backslash followed by atom l
            out.append(("sym", "\\", pos))
            pos += 1
            continue
        if kind == "ident" and val.endswith("!") and val not in ("promote!", "derelict!"):
            val = val[:-1]
            out.append(("ident", val, pos))
            pos += len(val)
            continue
        if kind != "ws":
            out.append((kind, val, pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, term_mode=False):
        self.toks = _tokenize(text, term_mode)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def at(self, val):
        return self.peek()[1] == val and self.peek()[0] != "eof"

    def expect(self, val):
        tok = self.next()
        if tok[1] != val or tok[0] == "eof":
            raise ParseError(f"expected {val!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def done(self):
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])

    # formulas -------------------------------------------------------------

    def formula(self):
        first = self.tensor_formula()
        operands = [first]
        ops = []
        while self.peek()[0] == "sym" and self.peek()[1] in ("\\", "/"):
            tok = self.next()
            ops.append(tok)
            operands.append(self.tensor_formula())
        if not ops:
            return first
        kinds = {op[1] for op in ops}
        if len(kinds) > 1:
            bad = next(op for op in ops if op[1] != ops[0][1])
            raise ParseError("mixing '\\' and '/' needs parentheses", bad[2])
        if ops[0][1] == "\\":
            acc = operands[-1]
            for a in reversed(operands[:-1]):
                acc = RImp(a, acc)
            return acc
        acc = operands[0]
        for b in operands[1:]:
            acc = LImp(acc, b)
        return acc

    def tensor_formula(self):
        acc = self.prefix_formula()
        while self.peek()[0] == "sym" and self.peek()[1] == "*":
            self.next()
            acc = Tensor(acc, self.prefix_formula())
        return acc

    def prefix_formula(self):
        kind, val, pos = self.peek()
        if kind == "sym" and val == "!":
            self.next()
            return Bang(self.prefix_formula())
        if kind == "ident" and val == "k":
            self.next()
            return Kappa(self.prefix_formula())
        return self.atomic_formula()

    def atomic_formula(self):
        kind, val, pos = self.next()
        if kind == "sym" and val == "(":
            f = self.formula()
            self.expect(")")
            return f
        if kind == "ident" and val == "I":
            return I
        if kind == "ident" and re.fullmatch(r"[a-z][a-z0-9_']*", val) and val not in KEYWORDS:
            return Atom(val)
        raise ParseError(f"expected a formula, found {val or 'end of input'!r}", pos)

    # sequents -------------------------------------------------------------

    def sequent(self):
        ant = []
        if not self.at("|-"):
            ant.append(self.formula())
            while self.at(","):
                self.next()
                ant.append(self.formula())
        self.expect("|-")
        succ = self.formula()
        return Sequent(tuple(ant), succ)

    def typed_context(self):
        ctx = []
        if self.at("|-"):
            return ctx
        while True:
            name = self.variable()
            self.expect(":")
            ctx.append((name, self.formula()))
            if not self.at(","):
                return ctx
            self.next()

    # terms ----------------------------------------------------------------

    def variable(self):
        kind, val, pos = self.next()
        if kind != "ident" or val in KEYWORDS:
            raise ParseError(f"expected a variable, found {val or 'end of input'!r}", pos)
        return val

    def term(self):
        kind, val, pos = self.peek()
        if kind == "lam":
            self.next()
            x = self.variable()
            self.expect(":")
            ann = self.formula()
            self.expect(".")
            body = self.term()
            return (LamL if val == "\\l" else LamR)(x, ann, body)
        if kind == "ident":
            if val == "let":
                self.next()
                s = self.term()
                self.expect("be")
                p = self.pattern()
                self.expect("in")
                return Let(s, p, self.term())
            if val == "copy":
                self.next()
                s = self.term()
                self.expect("as")
                x = self.variable()
                self.expect(",")
                y = self.variable()
                self.expect("in")
                return Copy(s, x, y, self.term())
            if val == "discard":
                self.next()
                s = self.term()
                self.expect("in")
                return Discard(s, self.term())
            if val in ("promote!", "promotek"):
                self.next()
                srcs = []
                if not self.at("for"):
                    srcs.append(self.term())
                    while self.at(","):
                        self.next()
                        srcs.append(self.term())
                self.expect("for")
                names = []
                if not self.at("in"):
                    names.append(self.variable())
                    while self.at(","):
                        self.next()
                        names.append(self.variable())
                self.expect("in")
                if len(srcs) != len(names):
                    raise ParseError(
                        f"promote arity mismatch: {len(srcs)} sources, {len(names)} variables", pos
                    )
                body = self.term()
                cls = PromoteBang if val == "promote!" else PromoteKappa
                return cls(tuple(srcs), tuple(names), body)
            if val in ("exchl", "exchr"):
                self.next()
                t1 = self.term()
                self.expect(",")
                t2 = self.term()
                self.expect("with")
                x = self.variable()
                self.expect(",")
                y = self.variable()
                self.expect("in")
                cls = ExchL if val == "exchl" else ExchR
                return cls(t1, t2, x, y, self.term())
        return self.tensor_term()

    def tensor_term(self):
        acc = self.app_term()
        while self.at("*"):
            self.next()
            acc = TensorIntro(acc, self.app_term())
        return acc

    def app_term(self):
        kind, val, pos = self.peek()
        if kind == "ident" and val in ("appl", "appr"):
            self.next()
            f = self.atomic_term()
            a = self.atomic_term()
            return (AppL if val == "appl" else AppR)(f, a)
        if kind == "ident" and val in ("derelict!", "derelictk"):
            self.next()
            t = self.atomic_term()
            return (DerelictBang if val == "derelict!" else DerelictKappa)(t)
        return self.atomic_term()

    def atomic_term(self):
        kind, val, pos = self.peek()
        if kind == "sym" and val == "(":
            self.next()
            t = self.term()
            self.expect(")")
            return t
        if kind == "ident" and val == "unit":
            self.next()
            return UNIT
        if kind == "ident" and val not in KEYWORDS:
            self.next()
            return Var(val)
        raise ParseError(f"expected a term, found {val or 'end of input'!r}", pos)

    def pattern(self):
        acc = self.atomic_pattern()
        while self.at("*"):
            self.next()
            acc = TensorPat(acc, self.atomic_pattern())
        return acc

    def atomic_pattern(self):
        kind, val, pos = self.next()
        if kind == "sym" and val == "-":
            return Wildcard()
        if kind == "sym" and val == "(":
            p = self.pattern()
            self.expect(")")
            return p
        if kind == "ident" and val == "unit":
            return UnitPat()
        if kind == "ident" and val not in KEYWORDS:
            return PVar(val)
        raise ParseError(f"expected a pattern, found {val or 'end of input'!r}", pos)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.done()
    return f


def parse_sequent(text: str) -> Sequent:
    p = _Parser(text)
    s = p.sequent()
    p.done()
    return s


def parse_term(text: str) -> Term:
    p = _Parser(text, term_mode=True)
    t = p.term()
    p.done()
    _check_distinct_binders(t)
    return t


def parse_pattern(text: str) -> Pattern:
    p = _Parser(text, term_mode=True)
    pat = p.pattern()
    p.done()
    return pat


def parse_judgment(text: str):
    """``x:a, y:b |- term`` -> (context, term)."""
    p = _Parser(text, term_mode=True)
    ctx = p.typed_context()
    p.expect("|-")
    t = p.term()
    p.done()
    names = [n for n, _ in ctx]
    if len(set(names)) != len(names):
        raise ParseError("context variables must be distinct", 0)
    return tuple(ctx), t


def _check_distinct_binders(t):
    stack = [t]
    while stack:
        u = stack.pop()
        for bound in child_binders(u):
            if len(set(bound)) != len(bound):
                raise ParseError(f"repeated binder in {render(u)!r}", 0)
        stack.extend(children(u))


# ---------------------------------------------------------------------------
# Rendering

_F_IMP, _F_TENSOR, _F_PREFIX = 1, 2, 3


def _rf(f, ctx_prec=0, forbid=None):
    text, prec, kind = _rf_raw(f)
    if prec < ctx_prec or (forbid is not None and kind == forbid):
        return f"({text})"
    return text


def _rf_raw(f):
    if isinstance(f, Atom):
        return f.name, 4, None
    if isinstance(f, Unit):
        return "I", 4, None
    if isinstance(f, Tensor):
        return f"{_rf(f.left, _F_TENSOR)} * {_rf(f.right, _F_PREFIX)}", _F_TENSOR, "t"
    if isinstance(f, RImp):
        # right-associative; a '/' chain on either side needs parentheses.
        # A tensor to the right of an implication is bracketed for readability.
        res = f"({_rf(f.res)})" if isinstance(f.res, Tensor) else _rf(f.res, _F_IMP, "l")
        return f"{_rf(f.arg, _F_TENSOR)} \\ {res}", _F_IMP, "r"
    if isinstance(f, LImp):
        return f"{_rf(f.res, _F_IMP, 'r')} / {_rf(f.arg, _F_TENSOR, 't')}", _F_IMP, "l"
    if isinstance(f, Lolli):
        return f"{_rf(f.arg, _F_TENSOR)} -o {_rf(f.res, _F_IMP)}", _F_IMP, "o"
    if isinstance(f, Bang):
        return "!" + _rf(f.body, _F_PREFIX), _F_PREFIX, None
    if isinstance(f, Kappa):
        return "k " + _rf(f.body, _F_PREFIX), _F_PREFIX, None
    raise TypeError(f"not a formula: {f!r}")


def _rp(p, ctx_prec=0):
    if isinstance(p, Wildcard):
        return "-"
    if isinstance(p, PVar):
        return p.name
    if isinstance(p, UnitPat):
        return "unit"
    if isinstance(p, TensorPat):
        text = f"{_rp(p.left, 1)} * {_rp(p.right, 2)}"
        return f"({text})" if ctx_prec > 1 else text
    raise TypeError(f"not a pattern: {p!r}")


_T_BIND, _T_TENSOR, _T_APP, _T_ATOM = 0, 1, 2, 3


def _rt(t, ctx_prec=0):
    text, prec = _rt_raw(t)
    return f"({text})" if prec < ctx_prec else text


def _rt_raw(t):
    if isinstance(t, Var):
        return t.name, _T_ATOM
    if isinstance(t, UnitTerm):
        return "unit", _T_ATOM
    if isinstance(t, TensorIntro):
        return f"{_rt(t.left, _T_TENSOR)} * {_rt(t.right, _T_APP)}", _T_TENSOR
    if isinstance(t, (LamL, LamR, Lam)):
        head = {LamL: "\\l ", LamR: "\\r ", Lam: "\\ "}[type(t)]
        return f"{head}{t.var}:{_rf(t.ann)}. {_rt(t.body)}", _T_BIND
    if isinstance(t, (AppL, AppR, App)):
        head = {AppL: "appl", AppR: "appr", App: "app"}[type(t)]
        return f"{head} {_rt(t.fun, _T_ATOM)} {_rt(t.arg, _T_ATOM)}", _T_APP
    if isinstance(t, (DerelictBang, DerelictKappa)):
        head = "derelict!" if isinstance(t, DerelictBang) else "derelictk"
        return f"{head} {_rt(t.term, _T_ATOM)}", _T_APP
    if isinstance(t, Let):
        return (
            f"let {_rt(t.scrutinee, _T_TENSOR)} be {_rp(t.pattern)} in {_rt(t.body)}",
            _T_BIND,
        )
    if isinstance(t, Copy):
        return f"copy {_rt(t.src, _T_TENSOR)} as {t.x}, {t.y} in {_rt(t.body)}", _T_BIND
    if isinstance(t, Discard):
        return f"discard {_rt(t.src, _T_TENSOR)} in {_rt(t.body)}", _T_BIND
    if isinstance(t, (PromoteBang, PromoteKappa)):
        head = "promote!" if isinstance(t, PromoteBang) else "promotek"
        parts = [head]
        if t.srcs:
            parts.append(", ".join(_rt(s, _T_TENSOR) for s in t.srcs))
        parts.append("for")
        if t.vars:
            parts.append(", ".join(t.vars))
        parts.append("in")
        parts.append(_rt(t.body))
        return " ".join(parts), _T_BIND
    if isinstance(t, (ExchL, ExchR)):
        head = "exchl" if isinstance(t, ExchL) else "exchr"
        return (
            f"{head} {_rt(t.t1, _T_TENSOR)}, {_rt(t.t2, _T_TENSOR)} with {t.x}, {t.y} "
            f"in {_rt(t.body)}",
            _T_BIND,
        )
    raise TypeError(f"not a term: {t!r}")


def render_context(ctx) -> str:
    return ", ".join(f"{x}:{_rf(a)}" for x, a in ctx)


def render(ast) -> str:
    """Concrete syntax with minimal parentheses."""
    if isinstance(ast, Formula):
        return _rf(ast)
    if isinstance(ast, Term):
        return _rt(ast)
    if isinstance(ast, Pattern):
        return _rp(ast)
    if isinstance(ast, Sequent):
        ant = ", ".join(_rf(a) for a in ast.antecedent)
        return f"{ant} |- {_rf(ast.succedent)}" if ant else f"|- {_rf(ast.succedent)}"
    render_derivation = getattr(ast, "render", None)
    if render_derivation is not None:
        return render_derivation()
    raise TypeError(f"cannot render {ast!r}")


# ---------------------------------------------------------------------------
# Canonical S-expressions

_F_TAGS = {Tensor: "tensor", RImp: "rimp", LImp: "limp", Lolli: "lolli"}


def formula_to_sexp(f):
    if isinstance(f, Atom):
        return ["atom", f.name]
    if isinstance(f, Unit):
        return ["unit"]
    if isinstance(f, Bang):
        return ["bang", formula_to_sexp(f.body)]
    if isinstance(f, Kappa):
        return ["kappa", formula_to_sexp(f.body)]
    a, b = (f.left, f.right) if isinstance(f, Tensor) else (
        (f.arg, f.res) if isinstance(f, (RImp, Lolli)) else (f.res, f.arg)
    )
    return [_F_TAGS[type(f)], formula_to_sexp(a), formula_to_sexp(b)]


def formula_from_sexp(x):
    if not isinstance(x, list) or not x:
        raise sexp.SexpError(f"bad formula {x!r}")
    tag, args = x[0], x[1:]
    if tag == "atom" and len(args) == 1:
        return Atom(args[0])
    if tag == "unit" and not args:
        return I
    if tag in ("bang", "kappa") and len(args) == 1:
        return (Bang if tag == "bang" else Kappa)(formula_from_sexp(args[0]))
    if tag in ("tensor", "rimp", "limp", "lolli") and len(args) == 2:
        cls = {"tensor": Tensor, "rimp": RImp, "limp": LImp, "lolli": Lolli}[tag]
        return cls(formula_from_sexp(args[0]), formula_from_sexp(args[1]))
    raise sexp.SexpError(f"bad formula {x!r}")


def sequent_to_sexp(s: Sequent):
    return ["seq", [formula_to_sexp(a) for a in s.antecedent], formula_to_sexp(s.succedent)]


def sequent_from_sexp(x) -> Sequent:
    if not (isinstance(x, list) and len(x) == 3 and x[0] == "seq" and isinstance(x[1], list)):
        raise sexp.SexpError(f"bad sequent {x!r}")
    return Sequent(tuple(formula_from_sexp(a) for a in x[1]), formula_from_sexp(x[2]))


def pattern_to_sexp(p):
    if isinstance(p, Wildcard):
        return ["wild"]
    if isinstance(p, PVar):
        return ["pvar", p.name]
    if isinstance(p, UnitPat):
        return ["punit"]
    return ["ptensor", pattern_to_sexp(p.left), pattern_to_sexp(p.right)]


def pattern_from_sexp(x):
    tag = x[0]
    if tag == "wild":
        return Wildcard()
    if tag == "pvar":
        return PVar(x[1])
    if tag == "punit":
        return UnitPat()
    if tag == "ptensor":
        return TensorPat(pattern_from_sexp(x[1]), pattern_from_sexp(x[2]))
    raise sexp.SexpError(f"bad pattern {x!r}")


def term_to_sexp(t):
    s = term_to_sexp
    if isinstance(t, Var):
        return ["var", t.name]
    if isinstance(t, UnitTerm):
        return ["unit"]
    if isinstance(t, TensorIntro):
        return ["pair", s(t.left), s(t.right)]
    if isinstance(t, (LamL, LamR, Lam)):
        tag = {LamL: "laml", LamR: "lamr", Lam: "lam"}[type(t)]
        return [tag, t.var, formula_to_sexp(t.ann), s(t.body)]
    if isinstance(t, (AppL, AppR, App)):
        tag = {AppL: "appl", AppR: "appr", App: "app"}[type(t)]
        return [tag, s(t.fun), s(t.arg)]
    if isinstance(t, Let):
        return ["let", s(t.scrutinee), pattern_to_sexp(t.pattern), s(t.body)]
    if isinstance(t, Copy):
        return ["copy", s(t.src), t.x, t.y, s(t.body)]
    if isinstance(t, Discard):
        return ["discard", s(t.src), s(t.body)]
    if isinstance(t, (PromoteBang, PromoteKappa)):
        tag = "promote!" if isinstance(t, PromoteBang) else "promotek"
        return [tag, [s(u) for u in t.srcs], list(t.vars), s(t.body)]
    if isinstance(t, (DerelictBang, DerelictKappa)):
        return ["derelict!" if isinstance(t, DerelictBang) else "derelictk", s(t.term)]
    if isinstance(t, (ExchL, ExchR)):
        tag = "exchl" if isinstance(t, ExchL) else "exchr"
        return [tag, s(t.t1), s(t.t2), t.x, t.y, s(t.body)]
    raise TypeError(f"not a term: {t!r}")


def term_from_sexp(x):
    f = term_from_sexp
    tag = x[0]
    if tag == "var":
        return Var(x[1])
    if tag == "unit":
        return UNIT
    if tag == "pair":
        return TensorIntro(f(x[1]), f(x[2]))
    if tag in ("laml", "lamr", "lam"):
        cls = {"laml": LamL, "lamr": LamR, "lam": Lam}[tag]
        return cls(x[1], formula_from_sexp(x[2]), f(x[3]))
    if tag in ("appl", "appr", "app"):
        cls = {"appl": AppL, "appr": AppR, "app": App}[tag]
        return cls(f(x[1]), f(x[2]))
    if tag == "let":
        return Let(f(x[1]), pattern_from_sexp(x[2]), f(x[3]))
    if tag == "copy":
        return Copy(f(x[1]), x[2], x[3], f(x[4]))
    if tag == "discard":
        return Discard(f(x[1]), f(x[2]))
    if tag in ("promote!", "promotek"):
        cls = PromoteBang if tag == "promote!" else PromoteKappa
        return cls(tuple(f(u) for u in x[1]), tuple(x[2]), f(x[3]))
    if tag in ("derelict!", "derelictk"):
        return (DerelictBang if tag == "derelict!" else DerelictKappa)(f(x[1]))
    if tag in ("exchl", "exchr"):
        cls = ExchL if tag == "exchl" else ExchR
        return cls(f(x[1]), f(x[2]), x[3], x[4], f(x[5]))
    raise sexp.SexpError(f"bad term {x!r}")


def context_to_sexp(ctx):
    return [[x, formula_to_sexp(a)] for x, a in ctx]


def judgment_to_sexp(ctx, t, a):
    return ["judge", ":ctx", context_to_sexp(ctx), ":term", term_to_sexp(t), ":type",
            formula_to_sexp(a)]


AST = Union[Formula, Term, Pattern, Sequent]
Optional  # re-exported for annotations elsewhere
