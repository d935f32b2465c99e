"""Typing for the four term calculi, with elaboration to sequent derivations.

Checking is syntax directed.  Linear terms over ordered contexts determine
their own context splits: the hypotheses used by a subterm are exactly its
free variables, and these have to form a contiguous block of the context in
the right order.  The only freedom left is where a binder with a closed
scrutinee (``let unit be x * y in ...``) puts its new variables; those
positions are tried left to right.

Exchange terms bind their two variables as ``x : B`` and ``y : k A`` (for
``exchl``) so that erasing them to ``[t2/x][t1/y] t3`` is well typed:

    G1 |- t1 : k A    G2 |- t2 : B    D1, x:B, y:k A, D2 |- t3 : C
    --------------------------------------------------------------
           D1, G1, G2, D2 |- exchl t1, t2 with x, y in t3 : C

and symmetrically ``exchr`` with ``t1 : A``, ``t2 : k B`` and body context
``D1, x:k B, y:A, D2``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .sequent import Derivation, Rule, check_derivation
from .syntax import (
    AppL, AppR, Bang, CalculusLevel, Copy, DerelictBang, DerelictKappa,
    Discard, ExchL, ExchR, Formula, I, Kappa, LamL, LamR, Let, LImp,
    PromoteBang, PromoteKappa, PVar, RImp, Sequent, Tensor, TensorIntro,
    TensorPat, Term, Unit, UnitPat, UnitTerm, Var, Wildcard, formula_level,
    free_vars, render, render_context,
)


class TypeErrorKind(enum.Enum):
    UnboundVar = "UnboundVar"
    OrderViolation = "OrderViolation"
    NonLinearUse = "NonLinearUse"
    ConnectiveAtWrongLevel = "ConnectiveAtWrongLevel"
    Mismatch = "Mismatch"
    PromoteArity = "PromoteArity"


class TypeCheckError(Exception):
    def __init__(self, kind: TypeErrorKind, location, detail: str):
        self.kind = kind
        self.location = tuple(location)
        self.detail = detail
        where = "/".join(map(str, self.location)) or "root"
        super().__init__(f"{kind.value} at {where}: {detail}")


K = TypeErrorKind

_BANG_TERMS = (Copy, Discard, PromoteBang, DerelictBang)
_KAPPA_TERMS = (ExchL, ExchR, PromoteKappa, DerelictKappa)


def _cut(d1, d2, i):
    gamma = d1.conclusion.antecedent
    ctx2 = d2.conclusion.antecedent
    concl = Sequent(ctx2[:i] + gamma + ctx2[i + 1:], d2.conclusion.succedent)
    return Derivation(Rule.Cut, concl, (d1, d2), (i, i + len(gamma)))


def _forms(ctx):
    return tuple(a for _, a in ctx)


def _names(ctx):
    return [x for x, _ in ctx]


class _Checker:
    def __init__(self, level):
        self.level = level

    def fail(self, kind, path, detail):
        raise TypeCheckError(kind, path, detail)

    def level_ok(self, f, path):
        if not self.level.admits(formula_level(f)):
            self.fail(K.ConnectiveAtWrongLevel, path,
                      f"type {render(f)} is not available at level {self.level.value}")

    # context bookkeeping --------------------------------------------------

    def split(self, ctx, blocks, path):
        """Partition ``ctx`` into consecutive blocks with the given variable sets."""
        seen = set()
        for b in blocks:
            both = seen & b
            if both:
                self.fail(K.NonLinearUse, path, f"variable(s) {sorted(both)} used more than once")
            seen |= b
        names = set(_names(ctx))
        extra = seen - names
        if extra:
            self.fail(K.UnboundVar, path, f"variable(s) {sorted(extra)} not in context")
        unused = names - seen
        if unused:
            self.fail(K.NonLinearUse, path, f"hypothesis(es) {sorted(unused)} not used")
        out = []
        pos = 0
        for b in blocks:
            chunk = ctx[pos:pos + len(b)]
            if set(_names(chunk)) != b:
                self.fail(K.OrderViolation, path,
                          f"context {render_context(ctx)} cannot be split in the order the term uses it")
            out.append(chunk)
            pos += len(b)
        return out

    def around(self, ctx, used, body_free, path):
        """Locate ``used`` as one block in ``ctx``.

        Returns a list of candidate (delta1, gamma, delta2); more than one
        only when ``used`` is empty.
        """
        names = _names(ctx)
        both = used & body_free
        if both:
            self.fail(K.NonLinearUse, path, f"variable(s) {sorted(both)} used more than once")
        extra = (used | body_free) - set(names)
        if extra:
            self.fail(K.UnboundVar, path, f"variable(s) {sorted(extra)} not in context")
        unused = set(names) - used - body_free
        if unused:
            self.fail(K.NonLinearUse, path, f"hypothesis(es) {sorted(unused)} not used")
        if not used:
            return [(ctx[:k], (), ctx[k:]) for k in range(len(ctx) + 1)]
        idx = [i for i, n in enumerate(names) if n in used]
        lo, hi = idx[0], idx[-1] + 1
        if hi - lo != len(used):
            self.fail(K.OrderViolation, path,
                      f"hypotheses {sorted(used)} are not contiguous in {render_context(ctx)}")
        return [(ctx[:lo], ctx[lo:hi], ctx[hi:])]

    def with_block(self, ctx, used, body_free, path, build):
        """Try ``build(d1, gamma, d2)`` on each admissible placement."""
        cands = self.around(ctx, used, body_free, path)
        first = None
        for d1, g, d2 in cands:
            try:
                return build(d1, g, d2)
            except TypeCheckError as e:
                if len(cands) == 1:
                    raise
                first = first or e
        raise first

    # typing ---------------------------------------------------------------

    def infer(self, ctx, t, path):
        """Return (type, derivation) for ``ctx |- t``."""
        if isinstance(t, _BANG_TERMS) and not self.level.has_bang:
            self.fail(K.ConnectiveAtWrongLevel, path, f"{type(t).__name__} needs the ! modality")
        if isinstance(t, _KAPPA_TERMS) and not self.level.has_kappa:
            self.fail(K.ConnectiveAtWrongLevel, path, f"{type(t).__name__} needs the k modality")

        if isinstance(t, Var):
            if not ctx or t.name not in _names(ctx):
                self.fail(K.UnboundVar, path, f"variable {t.name} not in context")
            if len(ctx) != 1:
                others = sorted(n for n in _names(ctx) if n != t.name)
                self.fail(K.NonLinearUse, path, f"hypothesis(es) {others} not used")
            a = ctx[0][1]
            return a, Derivation(Rule.Ax, Sequent((a,), a))

        if isinstance(t, UnitTerm):
            if ctx:
                self.fail(K.NonLinearUse, path, f"hypothesis(es) {_names(ctx)} not used")
            return I, Derivation(Rule.Ur, Sequent((), I))

        if isinstance(t, TensorIntro):
            g, dl = self.split(ctx, [set(free_vars(t.left)), set(free_vars(t.right))], path)
            a, da = self.infer(g, t.left, path + (0,))
            b, db = self.infer(dl, t.right, path + (1,))
            return Tensor(a, b), Derivation(
                Rule.Tr, Sequent(_forms(ctx), Tensor(a, b)), (da, db), (len(g),)
            )

        if isinstance(t, LamR):
            self.level_ok(t.ann, path)
            b, d = self.infer(((t.var, t.ann),) + tuple(ctx), t.body, path + (0,))
            f = RImp(t.ann, b)
            return f, Derivation(Rule.IRr, Sequent(_forms(ctx), f), (d,))

        if isinstance(t, LamL):
            self.level_ok(t.ann, path)
            a, d = self.infer(tuple(ctx) + ((t.var, t.ann),), t.body, path + (0,))
            f = LImp(a, t.ann)
            return f, Derivation(Rule.IRl, Sequent(_forms(ctx), f), (d,))

        if isinstance(t, AppR):
            # argument context first, then the function's
            dl, g = self.split(ctx, [set(free_vars(t.arg)), set(free_vars(t.fun))], path)
            f, df = self.infer(g, t.fun, path + (0,))
            if not isinstance(f, RImp):
                self.fail(K.Mismatch, path + (0,), f"appr expects a function of type A \\ B, got {render(f)}")
            a, da = self.infer(dl, t.arg, path + (1,))
            if a != f.arg:
                self.fail(K.Mismatch, path + (1,), f"argument has type {render(a)}, expected {render(f.arg)}")
            n = len(dl)
            inner = Derivation(
                Rule.ILr, Sequent(_forms(dl) + (f,), f.res),
                (da, Derivation(Rule.Ax, Sequent((f.res,), f.res))), (0,), n,
            )
            return f.res, _cut(df, inner, n)

        if isinstance(t, AppL):
            g, dl = self.split(ctx, [set(free_vars(t.fun)), set(free_vars(t.arg))], path)
            f, df = self.infer(g, t.fun, path + (0,))
            if not isinstance(f, LImp):
                self.fail(K.Mismatch, path + (0,), f"appl expects a function of type A / B, got {render(f)}")
            b, db = self.infer(dl, t.arg, path + (1,))
            if b != f.arg:
                self.fail(K.Mismatch, path + (1,), f"argument has type {render(b)}, expected {render(f.arg)}")
            inner = Derivation(
                Rule.ILl, Sequent((f,) + _forms(dl), f.res),
                (db, Derivation(Rule.Ax, Sequent((f.res,), f.res))), (1 + len(dl),), 0,
            )
            return f.res, _cut(df, inner, 0)

        if isinstance(t, Let):
            if isinstance(t.pattern, PVar):
                self.fail(K.Mismatch, path, "a let needs a unit or tensor pattern, not a bare variable")
            pvars = _pattern_names(t.pattern)
            if len(set(pvars)) != len(pvars):
                self.fail(K.NonLinearUse, path, "pattern binds a variable twice")
            body_free = set(free_vars(t.body)) - set(pvars)

            def build(d1, g, d2):
                p, dp = self.infer(g, t.scrutinee, path + (0,))
                binds = self.bind(t.pattern, p, path)
                c, db = self.infer(tuple(d1) + tuple(binds) + tuple(d2), t.body, path + (1,))
                folded = self.fold(t.pattern, p, len(d1), db)
                return c, _cut(dp, folded, len(d1))

            return self.with_block(ctx, set(free_vars(t.scrutinee)), body_free, path, build)

        if isinstance(t, (Copy, Discard)):
            bound = (t.x, t.y) if isinstance(t, Copy) else ()
            if len(set(bound)) != len(bound):
                self.fail(K.NonLinearUse, path, "copy binds the same name twice")
            body_free = set(free_vars(t.body)) - set(bound)

            def build(d1, g, d2):
                a, ds = self.infer(g, t.src, path + (0,))
                if not isinstance(a, Bang):
                    self.fail(K.Mismatch, path + (0,), f"expected a !-type, got {render(a)}")
                binds = tuple((v, a) for v in bound)
                c, db = self.infer(tuple(d1) + binds + tuple(d2), t.body, path + (1,))
                p = len(d1)
                rule = Rule.C if bound else Rule.W
                concl = Sequent(_forms(d1) + (a,) + _forms(d2), c)
                return c, _cut(ds, Derivation(rule, concl, (db,), (), p), p)

            return self.with_block(ctx, set(free_vars(t.src)), body_free, path, build)

        if isinstance(t, (PromoteBang, PromoteKappa)):
            modal = Bang if isinstance(t, PromoteBang) else Kappa
            if len(t.srcs) != len(t.vars):
                self.fail(K.PromoteArity, path, f"{len(t.srcs)} sources for {len(t.vars)} variables")
            if len(set(t.vars)) != len(t.vars):
                self.fail(K.NonLinearUse, path, "promote binds the same name twice")
            extra = set(free_vars(t.body)) - set(t.vars)
            if extra:
                self.fail(K.Mismatch, path + (len(t.srcs),),
                          f"promoted body may only use its bound variables; found {sorted(extra)}")
            chunks = self.split(ctx, [set(free_vars(s)) for s in t.srcs], path)
            binds, ds = [], []
            for k, (chunk, s) in enumerate(zip(chunks, t.srcs)):
                a, d = self.infer(chunk, s, path + (k,))
                if not isinstance(a, modal):
                    self.fail(K.Mismatch, path + (k,), f"expected a {modal.__name__} type, got {render(a)}")
                binds.append((t.vars[k], a))
                ds.append(d)
            b, db = self.infer(tuple(binds), t.body, path + (len(t.srcs),))
            rule = Rule.Br if modal is Bang else Rule.Er
            out = Derivation(rule, Sequent(tuple(a for _, a in binds), modal(b)), (db,))
            pos = 0
            for d in ds:
                out = _cut(d, out, pos)
                pos += len(d.conclusion.antecedent)
            return modal(b), out

        if isinstance(t, (DerelictBang, DerelictKappa)):
            modal = Bang if isinstance(t, DerelictBang) else Kappa
            a, d = self.infer(ctx, t.term, path + (0,))
            if not isinstance(a, modal):
                self.fail(K.Mismatch, path + (0,), f"expected a {modal.__name__} type, got {render(a)}")
            rule = Rule.Bl if modal is Bang else Rule.El
            inner = Derivation(rule, Sequent((a,), a.body), (Derivation(Rule.Ax, Sequent((a.body,), a.body)),), (), 0)
            return a.body, _cut(d, inner, 0)

        if isinstance(t, (ExchL, ExchR)):
            if t.x == t.y:
                self.fail(K.NonLinearUse, path, "exchange binds the same name twice")
            f1, f2 = set(free_vars(t.t1)), set(free_vars(t.t2))
            body_free = set(free_vars(t.body)) - {t.x, t.y}

            def build(d1, g, d2):
                g1, g2 = self.split(g, [f1, f2], path)
                a1, dd1 = self.infer(g1, t.t1, path + (0,))
                a2, dd2 = self.infer(g2, t.t2, path + (1,))
                if isinstance(t, ExchL):
                    if not isinstance(a1, Kappa):
                        self.fail(K.Mismatch, path + (0,), f"exchl moves a k-type, got {render(a1)}")
                    binds = ((t.x, a2), (t.y, a1))
                else:
                    if not isinstance(a2, Kappa):
                        self.fail(K.Mismatch, path + (1,), f"exchr moves a k-type, got {render(a2)}")
                    binds = ((t.x, a2), (t.y, a1))
                c, db = self.infer(tuple(d1) + binds + tuple(d2), t.body, path + (2,))
                p = len(d1)
                concl = Sequent(_forms(d1) + (a1, a2) + _forms(d2), c)
                if isinstance(t, ExchL):
                    ex = Derivation(Rule.E1, concl, (db,), (), p)
                else:
                    ex = Derivation(Rule.E2, concl, (db,), (), p + 1)
                out = _cut(dd1, ex, p)
                out = _cut(dd2, out, p + len(g1))
                return c, out

            used = f1 | f2
            if f1 & f2:
                self.fail(K.NonLinearUse, path, f"variable(s) {sorted(f1 & f2)} used more than once")
            return self.with_block(ctx, used, body_free, path, build)

        raise TypeCheckError(K.Mismatch, path, f"not a term of the Lambek calculi: {type(t).__name__}")

    def bind(self, p, a, path):
        if isinstance(p, PVar):
            return [(p.name, a)]
        if isinstance(p, (UnitPat, Wildcard)):
            if a != I:
                self.fail(K.Mismatch, path, f"unit pattern against {render(a)}")
            return []
        if isinstance(p, TensorPat):
            if not isinstance(a, Tensor):
                self.fail(K.Mismatch, path, f"tensor pattern against {render(a)}")
            return self.bind(p.left, a.left, path) + self.bind(p.right, a.right, path)
        raise TypeCheckError(K.Mismatch, path, f"bad pattern {p!r}")

    def fold(self, p, a, pos, d):
        """Collapse the pattern's hypotheses starting at ``pos`` into ``a``."""
        if isinstance(p, PVar):
            return d
        ctx = d.conclusion.antecedent
        succ = d.conclusion.succedent
        if isinstance(p, (UnitPat, Wildcard)):
            return Derivation(Rule.Ul, Sequent(ctx[:pos] + (I,) + ctx[pos:], succ), (d,), (), pos)
        d1 = self.fold(p.left, a.left, pos, d)
        d2 = self.fold(p.right, a.right, pos + 1, d1)
        ctx2 = d2.conclusion.antecedent
        return Derivation(Rule.Tl, Sequent(ctx2[:pos] + (a,) + ctx2[pos + 2:], succ), (d2,), (), pos)


def _pattern_names(p):
    if isinstance(p, PVar):
        return [p.name]
    if isinstance(p, TensorPat):
        return _pattern_names(p.left) + _pattern_names(p.right)
    return []


def _prepare(ctx, level):
    ctx = tuple((x, a) for x, a in ctx)
    names = _names(ctx)
    if len(set(names)) != len(names):
        raise TypeCheckError(K.NonLinearUse, (), "context variables must be distinct")
    chk = _Checker(level)
    for _, a in ctx:
        chk.level_ok(a, ())
    return ctx, chk


def typecheck(ctx, t: Term, level: CalculusLevel = CalculusLevel.L) -> Formula:
    """Type of ``t`` under the ordered context ``ctx``; raises TypeCheckError."""
    ctx, chk = _prepare(ctx, level)
    return chk.infer(ctx, t, ())[0]


def elaborate(ctx, t: Term, level: CalculusLevel = CalculusLevel.L) -> Derivation:
    """Sequent derivation (with cuts) whose endsequent is ``ctx |- type``."""
    ctx, chk = _prepare(ctx, level)
    return chk.infer(ctx, t, ())[1]


def well_typed(ctx, t, level=CalculusLevel.L) -> bool:
    try:
        typecheck(ctx, t, level)
        return True
    except TypeCheckError:
        return False


@dataclass
class SubjectReductionReport:
    type: Formula
    reducts: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def subject_reduction_report(ctx, t: Term, level: CalculusLevel = CalculusLevel.L):
    """Retype every one-step reduct of ``t`` and list those whose type changed."""
    from .rewrite import redexes, step

    a = typecheck(ctx, t, level)
    rep = SubjectReductionReport(a)
    for r in redexes(t):
        u = step(t, r)
        rep.reducts += 1
        try:
            b = typecheck(ctx, u, level)
        except TypeCheckError as e:
            rep.violations.append((r, u, str(e)))
            continue
        if b != a:
            rep.violations.append((r, u, f"type changed to {render(b)}"))
    return rep


__all__ = [
    "TypeErrorKind", "TypeCheckError", "typecheck", "elaborate", "well_typed",
    "subject_reduction_report", "SubjectReductionReport", "check_derivation",
]
