"""Intuitionistic linear logic as an embedding target.

Both Lambek implications become ``-o``, ``k`` becomes ``!``, and exchange
terms vanish: ``exchl t1, t2 with x, y in t3`` becomes the simultaneous
substitution of ``t2`` for ``x`` and ``t1`` for ``y`` in ``t3``.  Contexts of
the target are multisets, so the checker only counts uses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .rewrite import BETA_FAMILY, reducts
from .syntax import (
    App, AppL, AppR, Atom, Bang, CalculusLevel, Copy, DerelictBang,
    DerelictKappa, Discard, ExchL, ExchR, Kappa, Lam, LamL, LamR, Let, LImp,
    Lolli, PromoteBang, PromoteKappa, PVar, RImp, Tensor, TensorIntro,
    TensorPat, Unit, UnitPat, UnitTerm, Var, Wildcard, canonical, children,
    free_vars, render, substitute_many, with_children,
)


def embed_formula(a):
    if isinstance(a, (Atom, Unit)):
        return a
    if isinstance(a, Tensor):
        return Tensor(embed_formula(a.left), embed_formula(a.right))
    if isinstance(a, RImp):
        return Lolli(embed_formula(a.arg), embed_formula(a.res))
    if isinstance(a, LImp):
        # A / B consumes a B and yields an A
        return Lolli(embed_formula(a.arg), embed_formula(a.res))
    if isinstance(a, (Bang, Kappa)):
        return Bang(embed_formula(a.body))
    if isinstance(a, Lolli):
        return Lolli(embed_formula(a.arg), embed_formula(a.res))
    raise TypeError(f"not a formula: {a!r}")


def embed_context(ctx):
    return tuple((x, embed_formula(a)) for x, a in ctx)


def embed_term(t):
    if isinstance(t, (Var, UnitTerm)):
        return t
    if isinstance(t, (LamL, LamR, Lam)):
        return Lam(t.var, embed_formula(t.ann), embed_term(t.body))
    if isinstance(t, (AppL, AppR, App)):
        return App(embed_term(t.fun), embed_term(t.arg))
    if isinstance(t, PromoteKappa):
        return PromoteBang(tuple(embed_term(s) for s in t.srcs), t.vars, embed_term(t.body))
    if isinstance(t, DerelictKappa):
        return DerelictBang(embed_term(t.term))
    if isinstance(t, (ExchL, ExchR)):
        return substitute_many(embed_term(t.body), {t.x: embed_term(t.t2), t.y: embed_term(t.t1)})
    return with_children(t, [embed_term(k) for k in children(t)])


# ---------------------------------------------------------------------------
# Checking with multiset contexts


class ILLTypeError(Exception):
    pass


def _split(ctx: dict, parts):
    out = []
    for fv in parts:
        out.append({x: ctx[x] for x in fv if x in ctx})
    return out


def _need_exact(ctx: dict, used: set, what):
    missing = used - set(ctx)
    if missing:
        raise ILLTypeError(f"{what}: unbound {sorted(missing)}")
    unused = set(ctx) - used
    if unused:
        raise ILLTypeError(f"{what}: unused {sorted(unused)}")


def _disjoint(parts, what):
    seen = set()
    for p in parts:
        if seen & p:
            raise ILLTypeError(f"{what}: {sorted(seen & p)} used twice")
        seen |= p


def _bind(p, a):
    if isinstance(p, PVar):
        return {p.name: a}
    if isinstance(p, (UnitPat, Wildcard)):
        if not isinstance(a, Unit):
            raise ILLTypeError(f"unit pattern against {render(a)}")
        return {}
    if not isinstance(a, Tensor):
        raise ILLTypeError(f"tensor pattern against {render(a)}")
    left = _bind(p.left, a.left)
    right = _bind(p.right, a.right)
    if set(left) & set(right):
        raise ILLTypeError("pattern binds a variable twice")
    return {**left, **right}


def ill_infer(ctx: dict, t):
    """Type of ``t`` under the multiset context ``ctx`` (a dict)."""
    what = type(t).__name__
    if isinstance(t, Var):
        _need_exact(ctx, {t.name}, what)
        return ctx[t.name]
    if isinstance(t, UnitTerm):
        _need_exact(ctx, set(), what)
        return Unit()
    if isinstance(t, TensorIntro):
        f1, f2 = set(free_vars(t.left)), set(free_vars(t.right))
        _disjoint([f1, f2], what)
        _need_exact(ctx, f1 | f2, what)
        c1, c2 = _split(ctx, [f1, f2])
        return Tensor(ill_infer(c1, t.left), ill_infer(c2, t.right))
    if isinstance(t, Lam):
        if t.var in ctx:
            raise ILLTypeError(f"binder {t.var} shadows a hypothesis")
        b = ill_infer({**ctx, t.var: t.ann}, t.body)
        return Lolli(t.ann, b)
    if isinstance(t, App):
        f1, f2 = set(free_vars(t.fun)), set(free_vars(t.arg))
        _disjoint([f1, f2], what)
        _need_exact(ctx, f1 | f2, what)
        c1, c2 = _split(ctx, [f1, f2])
        f = ill_infer(c1, t.fun)
        if not isinstance(f, Lolli):
            raise ILLTypeError(f"applying a non-function of type {render(f)}")
        a = ill_infer(c2, t.arg)
        if a != f.arg:
            raise ILLTypeError(f"argument {render(a)} where {render(f.arg)} expected")
        return f.res
    if isinstance(t, (Let, Copy, Discard)):
        src = t.scrutinee if isinstance(t, Let) else t.src
        if isinstance(t, Let):
            bound = None
        else:
            bound = (t.x, t.y) if isinstance(t, Copy) else ()
        f1 = set(free_vars(src))
        c1 = {x: ctx[x] for x in f1 if x in ctx}
        a = ill_infer(c1, src)
        if isinstance(t, Let):
            if isinstance(t.pattern, PVar):
                raise ILLTypeError("let needs a unit or tensor pattern")
            binds = _bind(t.pattern, a)
        else:
            if not isinstance(a, Bang):
                raise ILLTypeError(f"{what} of non-! type {render(a)}")
            binds = {v: a for v in bound}
        f2 = set(free_vars(t.body)) - set(binds)
        _disjoint([f1, f2], what)
        _need_exact(ctx, f1 | f2, what)
        c2 = {x: ctx[x] for x in f2}
        if set(binds) & set(c2):
            raise ILLTypeError(f"{what}: binder shadows a hypothesis")
        return ill_infer({**c2, **binds}, t.body)
    if isinstance(t, PromoteBang):
        fvs = [set(free_vars(s)) for s in t.srcs]
        _disjoint(fvs, what)
        _need_exact(ctx, set().union(*fvs) if fvs else set(), what)
        binds = {}
        for s, fv, v in zip(t.srcs, fvs, t.vars):
            a = ill_infer({x: ctx[x] for x in fv}, s)
            if not isinstance(a, Bang):
                raise ILLTypeError(f"promote source of non-! type {render(a)}")
            binds[v] = a
        return Bang(ill_infer(binds, t.body))
    if isinstance(t, DerelictBang):
        a = ill_infer(ctx, t.term)
        if not isinstance(a, Bang):
            raise ILLTypeError(f"derelict of non-! type {render(a)}")
        return a.body
    raise ILLTypeError(f"not an ILL term: {what}")


def ill_typecheck(ctx, t, expected=None):
    """Check ``ctx |- t : expected`` (or just infer).  Returns the type."""
    ctx = list(ctx)
    d = dict(ctx)
    if len(d) != len(ctx):
        raise ILLTypeError("context variables must be distinct")
    a = ill_infer(d, t)
    if expected is not None and a != expected:
        raise ILLTypeError(f"type {render(a)} where {render(expected)} expected")
    return a


# ---------------------------------------------------------------------------
# Preservation


def ill_distance(t1, t2, max_steps=10, max_nodes=20_000):
    """Fewest ILL steps from ``t1`` to a term alpha-equal to ``t2`` (or None)."""
    goal = canonical(t2)
    start = canonical(t1)
    if start == goal:
        return 0
    seen = {start}
    frontier = [start]
    for d in range(1, max_steps + 1):
        nxt = []
        for u in frontier:
            for _, v in reducts(u, ill=True):
                cv = canonical(v)
                if cv == goal:
                    return d
                if cv not in seen and len(seen) < max_nodes:
                    seen.add(cv)
                    nxt.append(cv)
        frontier = nxt
        if not frontier:
            break
    return None


@dataclass
class StepOutcome:
    rule: str
    path: tuple
    target_steps: object  # int or None
    joined: bool
    flagged: bool


@dataclass
class EntryOutcome:
    judgment: str
    typed: bool
    detail: str = ""
    steps: list = field(default_factory=list)


@dataclass
class PreservationReport:
    entries: list = field(default_factory=list)

    @property
    def type_preserved(self):
        return sum(e.typed for e in self.entries)

    @property
    def all_steps(self):
        return [s for e in self.entries for s in e.steps]

    @property
    def violations(self):
        out = []
        for e in self.entries:
            if not e.typed:
                out.append((e.judgment, "type", e.detail))
            for s in e.steps:
                if not s.joined:
                    out.append((e.judgment, s.rule, "no ILL join within bound"))
                elif s.rule in {r.value for r in BETA_FAMILY} and not s.target_steps:
                    out.append((e.judgment, s.rule, "beta step maps to 0 ILL steps"))
        return out

    @property
    def ok(self):
        return not self.violations

    def rows(self):
        for e in self.entries:
            yield {"judgment": e.judgment, "typed": e.typed, "detail": e.detail,
                   "steps": [(s.rule, ".".join(map(str, s.path)) or "root", s.target_steps,
                              s.joined, s.flagged) for s in e.steps]}

    def summary(self):
        steps = self.all_steps
        return (f"{self.type_preserved}/{len(self.entries)} judgments preserved; "
                f"{sum(s.joined for s in steps)}/{len(steps)} steps joined; "
                f"{sum(s.flagged for s in steps)} flagged for audit (0 or >=2 target steps)")


def preservation_report(corpus, max_steps=10):
    """``corpus``: iterable of (ctx, term, type) judgments already typed in
    their source calculus.  Every one-step reduct of each term is checked."""
    rep = PreservationReport()
    for ctx, t, a in corpus:
        label = f"{', '.join(f'{x}:{render(f)}' for x, f in ctx)} |- {render(t)} : {render(a)}"
        entry = EntryOutcome(label, True)
        try:
            ill_typecheck(embed_context(ctx), embed_term(t), embed_formula(a))
        except ILLTypeError as e:
            entry.typed = False
            entry.detail = str(e)
        te = embed_term(t)
        for r, u in reducts(t):
            ue = embed_term(u)
            d = ill_distance(te, ue, max_steps)
            joined = d is not None
            entry.steps.append(StepOutcome(r.rule.value, r.path, d, joined, d != 1))
        rep.entries.append(entry)
    return rep


__all__ = [
    "embed_formula", "embed_term", "embed_context", "ill_typecheck", "ill_infer",
    "ILLTypeError", "preservation_report", "PreservationReport", "ill_distance",
]
