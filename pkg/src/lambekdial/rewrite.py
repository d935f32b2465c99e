"""One-step reduction, normalisation and joinability for the term calculi.

Rules fall in two groups.  The beta family computes (an introduction meets
its elimination).  The ``Nat*`` rules are commuting conversions: they hoist a
binding form (``let``, ``discard``, ``copy``, ``exchl``, ``exchr``) out of the
scrutinee position of an enclosing eliminator::

    E[let s be p in t]  ~>  let s be p in E[t]

where ``E`` is one of ``let [] be q in u``, ``copy [] as y, z in u``,
``discard [] in u``, ``derelict! []``, ``derelictk []``, ``appl [] u`` and
``appr [] u``.

Contracting ``copy`` against a promotion duplicates each promoted source
with a nested ``copy``; with two or more sources the duplicates come out
interleaved (``x1', x1'', x2', x2''``) while the two promotions need them
grouped, and an ordered context cannot regroup them.  ``BetaC`` therefore
fires only when the promotion has at most one source.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

from . import sexp
from .syntax import (
    App, AppL, AppR, Copy, DerelictBang, DerelictKappa, Discard, ExchL,
    ExchR, Lam, LamL, LamR, Let, PVar, PromoteBang, PromoteKappa, TensorIntro,
    TensorPat, Term, UnitPat, UnitTerm, Var, Wildcard, all_names, canonical,
    child_binders, children, free_vars, fresh, pattern_vars, rename_binders,
    rename_pattern, substitute_many, term_to_sexp, with_children,
)


class RewriteRule(enum.Enum):
    BetaL = "BetaL"
    BetaR = "BetaR"
    BetaU = "BetaU"
    BetaT1 = "BetaT1"
    BetaT2 = "BetaT2"
    NatU = "NatU"
    NatT = "NatT"
    LetU = "LetU"
    BetaDR = "BetaDR"
    BetaDI = "BetaDI"
    BetaC = "BetaC"
    NatD = "NatD"
    NatC = "NatC"
    BetaEDR = "BetaEDR"
    NatEl = "NatEl"
    NatEr = "NatEr"
    # ILL application, used only on embedded terms
    Beta = "Beta"


R = RewriteRule

BETA_FAMILY = frozenset({
    R.BetaL, R.BetaR, R.BetaU, R.BetaT1, R.BetaT2, R.BetaDR, R.BetaDI, R.BetaC,
    R.BetaEDR, R.Beta,
})
CONVERSIONS = frozenset({R.NatU, R.NatT, R.LetU, R.NatD, R.NatC, R.NatEl, R.NatEr})


@dataclass(frozen=True)
class Redex:
    path: tuple
    rule: RewriteRule


@dataclass(frozen=True)
class NormalForm:
    term: Term
    steps: int


class InvalidRedex(ValueError):
    pass


class FuelExhausted(RuntimeError):
    def __init__(self, steps, term=None):
        super().__init__(f"no normal form within {steps} steps")
        self.steps = steps
        self.term = term


# ---------------------------------------------------------------------------
# Addressing


def subterm(t: Term, path) -> Term:
    for k in path:
        kids = children(t)
        if not 0 <= k < len(kids):
            raise InvalidRedex(f"path {format_path(path)} leaves the term")
        t = kids[k]
    return t


def replace_at(t: Term, path, new: Term) -> Term:
    if not path:
        return new
    kids = list(children(t))
    k = path[0]
    if not 0 <= k < len(kids):
        raise InvalidRedex(f"path {format_path(path)} leaves the term")
    kids[k] = replace_at(kids[k], path[1:], new)
    return with_children(t, kids)


def format_path(path) -> str:
    return ".".join(map(str, path)) if path else "root"


# ---------------------------------------------------------------------------
# Eliminator contexts and hoisting

_HOLE = "$hole"


def _eliminator(t):
    """If ``t`` is an eliminator, its scrutinee and a plug function."""
    if isinstance(t, Let):
        return t.scrutinee, lambda u: Let(u, t.pattern, t.body)
    if isinstance(t, Copy):
        return t.src, lambda u: Copy(u, t.x, t.y, t.body)
    if isinstance(t, Discard):
        return t.src, lambda u: Discard(u, t.body)
    if isinstance(t, DerelictBang):
        return t.term, DerelictBang
    if isinstance(t, DerelictKappa):
        return t.term, DerelictKappa
    if isinstance(t, AppL):
        return t.fun, lambda u: AppL(u, t.arg)
    if isinstance(t, AppR):
        return t.fun, lambda u: AppR(u, t.arg)
    if isinstance(t, App):
        return t.fun, lambda u: App(u, t.arg)
    return None


def _hoist_rule(inner):
    if isinstance(inner, Let):
        return R.NatT if isinstance(inner.pattern, (TensorPat, PVar)) else R.NatU
    if isinstance(inner, Discard):
        return R.NatD
    if isinstance(inner, Copy):
        return R.NatC
    if isinstance(inner, ExchL):
        return R.NatEl
    if isinstance(inner, ExchR):
        return R.NatEr
    return None


def _hoist(t):
    inner, plug = _eliminator(t)
    others = free_vars(plug(Var(_HOLE))) - {_HOLE}
    kids = children(inner)
    bound = child_binders(inner)[-1]
    body = kids[-1]
    clash = [b for b in bound if b in others]
    if clash:
        avoid = all_names(t) | others
        ren = {}
        for b in clash:
            ren[b] = fresh(b, avoid)
            avoid.add(ren[b])
        body = substitute_many(body, {b: Var(n) for b, n in ren.items()})
        inner = rename_binders(inner, ren)
    return with_children(inner, kids[:-1] + (plug(body),))


# ---------------------------------------------------------------------------
# Rules


def _has_wildcard(p):
    if isinstance(p, Wildcard):
        return True
    if isinstance(p, TensorPat):
        return _has_wildcard(p.left) or _has_wildcard(p.right)
    return False


def _no_wildcards(p):
    if isinstance(p, Wildcard):
        return UnitPat()
    if isinstance(p, TensorPat):
        return TensorPat(_no_wildcards(p.left), _no_wildcards(p.right))
    return p


def rules_at(t: Term, ill: bool = False) -> list:
    """Rules whose left-hand side matches ``t`` at the root, in rule order.

    ``ill`` selects the unordered target calculus, where ``BetaC`` is
    unrestricted.
    """
    out = []
    if isinstance(t, AppL) and isinstance(t.fun, LamL):
        out.append(R.BetaL)
    if isinstance(t, AppR) and isinstance(t.fun, LamR):
        out.append(R.BetaR)
    if isinstance(t, Let):
        s, p = t.scrutinee, t.pattern
        if isinstance(s, UnitTerm) and isinstance(p, UnitPat):
            out.append(R.BetaU)
        if isinstance(s, TensorIntro) and isinstance(p, TensorPat):
            if isinstance(p.left, PVar) and isinstance(p.right, PVar):
                out.append(R.BetaT1)
            else:
                out.append(R.BetaT2)
    elim = _eliminator(t)
    hoist = _hoist_rule(elim[0]) if elim else None
    if hoist in (R.NatU, R.NatT):
        out.append(hoist)
    if isinstance(t, Let) and _has_wildcard(t.pattern):
        out.append(R.LetU)
    if isinstance(t, DerelictBang) and isinstance(t.term, PromoteBang):
        out.append(R.BetaDR)
    if isinstance(t, Discard) and isinstance(t.src, PromoteBang):
        out.append(R.BetaDI)
    if isinstance(t, Copy) and isinstance(t.src, PromoteBang) and (ill or len(t.src.srcs) <= 1):
        out.append(R.BetaC)
    if hoist in (R.NatD, R.NatC):
        out.append(hoist)
    if isinstance(t, DerelictKappa) and isinstance(t.term, PromoteKappa):
        out.append(R.BetaEDR)
    if hoist in (R.NatEl, R.NatEr):
        out.append(hoist)
    if isinstance(t, App) and isinstance(t.fun, Lam):
        out.append(R.Beta)
    return out


def contract(rule: RewriteRule, t: Term, ill: bool = False) -> Term:
    """Contractum of ``t`` under ``rule`` (which must match at the root)."""
    if rule not in rules_at(t, ill):
        raise InvalidRedex(f"{rule.value} does not match here")
    if rule in (R.BetaL, R.BetaR, R.Beta):
        lam = t.fun
        return substitute_many(lam.body, {lam.var: t.arg})
    if rule is R.BetaU:
        return t.body
    if rule is R.BetaT1:
        s, p = t.scrutinee, t.pattern
        return substitute_many(t.body, {p.left.name: s.left, p.right.name: s.right})
    if rule is R.BetaT2:
        return _beta_t2(t)
    if rule in (R.NatU, R.NatT, R.NatD, R.NatC, R.NatEl, R.NatEr):
        return _hoist(t)
    if rule is R.LetU:
        return Let(t.scrutinee, _no_wildcards(t.pattern), t.body)
    if rule in (R.BetaDR, R.BetaEDR):
        pr = t.term
        return substitute_many(pr.body, dict(zip(pr.vars, pr.srcs)))
    if rule is R.BetaDI:
        out = t.body
        for s in reversed(t.src.srcs):
            out = Discard(s, out)
        return out
    if rule is R.BetaC:
        return _beta_c(t)
    raise InvalidRedex(f"no contraction for {rule}")


def _beta_t2(t):
    (t1, t2), (p1, p2), body = (t.scrutinee.left, t.scrutinee.right), (
        t.pattern.left, t.pattern.right), t.body
    # binders of p1 will scope over t2; rename any that would capture it
    clash = set(pattern_vars(p1)) & free_vars(t2)
    if clash:
        avoid = all_names(t)
        ren = {}
        for b in sorted(clash):
            ren[b] = fresh(b, avoid)
            avoid.add(ren[b])
        p1 = rename_pattern(p1, ren)
        body = substitute_many(body, {b: Var(n) for b, n in ren.items()})
    sub = {}
    inner = body
    if isinstance(p2, PVar):
        sub[p2.name] = t2
    if isinstance(p1, PVar):
        sub[p1.name] = t1
    if sub:
        inner = substitute_many(inner, sub)
    if not isinstance(p2, PVar):
        inner = Let(t2, p2, inner)
    if not isinstance(p1, PVar):
        inner = Let(t1, p1, inner)
    return inner


def _beta_c(t):
    pr = t.src
    avoid = all_names(t)
    left, right = [], []
    for x in pr.vars:
        a = fresh(x, avoid)
        avoid.add(a)
        b = fresh(x, avoid)
        avoid.add(b)
        left.append(a)
        right.append(b)
    p1 = PromoteBang(tuple(Var(a) for a in left), pr.vars, pr.body)
    p2 = PromoteBang(tuple(Var(b) for b in right), pr.vars, pr.body)
    out = substitute_many(t.body, {t.x: p1, t.y: p2})
    for s, a, b in reversed(list(zip(pr.srcs, left, right))):
        out = Copy(s, a, b, out)
    return out


# ---------------------------------------------------------------------------
# Driving


def redexes(t: Term, rules=None, ill=False) -> list:
    """All redexes, leftmost-outermost (preorder) first."""
    out = []
    stack = [(t, ())]
    while stack:
        u, path = stack.pop()
        for r in rules_at(u, ill):
            if rules is None or r in rules:
                out.append(Redex(path, r))
        kids = children(u)
        for k in range(len(kids) - 1, -1, -1):
            stack.append((kids[k], path + (k,)))
    return out


def first_redex(t: Term, rules=None, ill=False):
    stack = [(t, ())]
    while stack:
        u, path = stack.pop()
        for r in rules_at(u, ill):
            if rules is None or r in rules:
                return Redex(path, r)
        kids = children(u)
        for k in range(len(kids) - 1, -1, -1):
            stack.append((kids[k], path + (k,)))
    return None


def step(t: Term, r: Redex, ill: bool = False) -> Term:
    return replace_at(t, r.path, contract(r.rule, subterm(t, r.path), ill))


def reducts(t: Term, ill: bool = False) -> list:
    """(redex, reduct) for every one-step reduct."""
    return [(r, step(t, r, ill)) for r in redexes(t, ill=ill)]


def normalize(t: Term, fuel: int = 10_000, trace=None, rules=None, ill=False) -> NormalForm:
    """Leftmost-outermost normalisation; ``trace`` collects formatted steps."""
    n = 0
    while True:
        r = first_redex(t, rules, ill)
        if r is None:
            return NormalForm(t, n)
        if n >= fuel:
            raise FuelExhausted(n, t)
        t = step(t, r, ill)
        n += 1
        if trace is not None:
            trace.append(format_step(r, t))


def format_step(r: Redex, result: Term) -> str:
    return f"{r.rule.value} @ {format_path(r.path)} : {sexp.dumps(term_to_sexp(result))}"


def trace_lines(t: Term, fuel: int = 10_000) -> list:
    lines = []
    normalize(t, fuel, lines)
    return lines


# ---------------------------------------------------------------------------
# Joinability modulo independent binder swaps

_BINDERS = (Let, Copy, Discard, ExchL, ExchR)


def _swaps(t):
    """Terms obtained by exchanging two nested, independent binding forms."""
    out = []
    stack = [(t, ())]
    while stack:
        u, path = stack.pop()
        if isinstance(u, _BINDERS) and isinstance(children(u)[-1], _BINDERS):
            v = children(u)[-1]
            outer_bound = set(child_binders(u)[-1])
            inner_bound = set(child_binders(v)[-1])
            v_heads = children(v)[:-1]
            u_heads = children(u)[:-1]
            heads_free = set().union(*(free_vars(h) for h in v_heads)) if v_heads else set()
            u_free = set().union(*(free_vars(h) for h in u_heads)) if u_heads else set()
            if not (outer_bound & heads_free) and not (inner_bound & (u_free | outer_bound)):
                body = children(v)[-1]
                new_u = with_children(u, u_heads + (body,))
                new_v = with_children(v, v_heads + (new_u,))
                out.append(replace_at(t, path, new_v))
        for k, kid in enumerate(children(u)):
            stack.append((kid, path + (k,)))
    return out


def conversion_equal(n1: Term, n2: Term, limit: int = 10_000) -> bool:
    goal = canonical(n2)
    start = canonical(n1)
    if start == goal:
        return True
    seen = {start}
    queue = deque([start])
    while queue and len(seen) < limit:
        u = queue.popleft()
        for v in _swaps(u):
            cv = canonical(v)
            if cv == goal:
                return True
            if cv not in seen:
                seen.add(cv)
                queue.append(cv)
    return False


def joinable(t1: Term, t2: Term, fuel: int = 10_000, ill: bool = False) -> bool:
    """Do the normal forms agree up to alpha and binder commutation?

    Raises FuelExhausted when either side fails to normalise (indeterminate).
    """
    n1 = normalize(t1, fuel, ill=ill).term
    n2 = normalize(t2, fuel, ill=ill).term
    return conversion_equal(n1, n2)


def join_status(t1: Term, t2: Term, fuel: int = 10_000) -> str:
    try:
        return "joined" if joinable(t1, t2, fuel) else "distinct"
    except FuelExhausted:
        return "indeterminate"


def peak_pairs(t: Term):
    """Every pair of distinct one-step reducts of ``t``."""
    rs = reducts(t)
    for i in range(len(rs)):
        for j in range(i + 1, len(rs)):
            yield rs[i], rs[j]


__all__ = [
    "RewriteRule", "Redex", "NormalForm", "InvalidRedex", "FuelExhausted",
    "redexes", "first_redex", "step", "contract", "rules_at", "reducts",
    "normalize", "joinable", "join_status", "conversion_equal", "peak_pairs",
    "format_step", "trace_lines", "subterm", "replace_at", "format_path",
    "BETA_FAMILY", "CONVERSIONS",
]
