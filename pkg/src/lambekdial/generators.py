"""Seeded generators for sequents, cut derivations and well-typed terms."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .sequent import Found, SearchBudget, count_cuts, prove
from .syntax import (
    I, AppL, AppR, Atom, Bang, CalculusLevel, Copy, DerelictBang, DerelictKappa,
    Discard, ExchL, ExchR, Kappa, LamL, LamR, Let, LImp, PromoteBang,
    PromoteKappa, PVar, RImp, Sequent, Tensor, TensorIntro, TensorPat, Unit,
    UnitPat, UnitTerm, Var, Wildcard, canonical, term_depth,
)
from .typecheck import TypeCheckError, elaborate, typecheck

L = CalculusLevel.L
ATOMS = ("a", "b")
# draws are cheap to discard, so the modal search gets a small budget
DRAW_BUDGET = SearchBudget(max_depth=12, max_visited=1500)


# ---------------------------------------------------------------------------
# Formulas and sequents


def l_formulas(depth, atoms=ATOMS, unit=True):
    """Every formula of the base calculus up to ``depth``, smallest first."""
    layer = [Atom(a) for a in atoms] + ([I] if unit else [])
    seen = list(layer)
    for _ in range(depth):
        new = list(layer)
        for x, y in itertools.product(seen, repeat=2):
            new += [Tensor(x, y), RImp(x, y), LImp(x, y)]
        seen = list(dict.fromkeys(new))
    return seen


def connectives(a):
    if isinstance(a, (Atom, Unit)):
        return 0
    if isinstance(a, (Bang, Kappa)):
        return 1 + connectives(a.body)
    kids = (a.left, a.right) if isinstance(a, Tensor) else (a.arg, a.res)
    return 1 + sum(connectives(k) for k in kids)


def bounded_universe(max_connectives, max_ante=4, depth=2, atoms=ATOMS, unit=True):
    """All sequents with at most ``max_ante`` hypotheses, formulas of depth at
    most ``depth`` and at most ``max_connectives`` connectives in total."""
    by_size = {}
    for f in l_formulas(depth, atoms, unit):
        c = connectives(f)
        if c <= max_connectives:
            by_size.setdefault(c, []).append(f)

    def tuples(n, budget):
        if n == 0:
            yield (), 0
            return
        for c, fs in sorted(by_size.items()):
            if c > budget:
                break
            for rest, used in tuples(n - 1, budget - c):
                for f in fs:
                    yield (f,) + rest, used + c

    for n in range(max_ante + 1):
        for forms, _ in tuples(n + 1, max_connectives):
            yield Sequent(forms[:-1], forms[-1])


def sample_universe(n, seed=0, max_ante=4, depth=2, atoms=ATOMS, unit=True):
    """``n`` sequents drawn uniformly per position from the full universe."""
    rng = random.Random(seed)
    pool = l_formulas(depth, atoms, unit)
    out = []
    for _ in range(n):
        k = rng.randint(0, max_ante)
        out.append(Sequent(tuple(rng.choice(pool) for _ in range(k)), rng.choice(pool)))
    return out


def random_formula(rng, level=L, depth=2, atoms=ATOMS):
    if depth <= 0 or rng.random() < 0.3:
        return I if rng.random() < 0.1 else Atom(rng.choice(atoms))
    ops = ["t", "r", "l"]
    if level.has_bang:
        ops.append("!")
    if level.has_kappa:
        ops.append("k")
    op = rng.choice(ops)
    if op == "!":
        return Bang(random_formula(rng, level, depth - 1, atoms))
    if op == "k":
        return Kappa(random_formula(rng, level, depth - 1, atoms))
    x = random_formula(rng, level, depth - 1, atoms)
    y = random_formula(rng, level, depth - 1, atoms)
    return {"t": Tensor, "r": RImp, "l": LImp}[op](x, y)


def random_sequent(rng, level=L, max_ante=3, depth=2, atoms=ATOMS):
    k = rng.randint(0, max_ante)
    return Sequent(tuple(random_formula(rng, level, depth, atoms) for _ in range(k)),
                   random_formula(rng, level, depth, atoms))


# ---------------------------------------------------------------------------
# Well-typed terms


@dataclass(frozen=True)
class Item:
    ctx: tuple  # ((name, type), ...)
    term: object
    type: object


class TermGenerator:
    """Builds terms bottom-up so that they are well typed by construction;
    each result is still confirmed by the type checker."""

    def __init__(self, level=L, seed=0, atoms=("a", "b", "c")):
        self.level = level
        self.rng = random.Random(seed)
        self.atoms = atoms
        self.n = 0
        self.rejected = 0

    def name(self):
        self.n += 1
        return f"x{self.n}"

    def ty(self, depth=1):
        return random_formula(self.rng, self.level, depth, self.atoms)

    def var(self, a=None):
        a = a if a is not None else self.ty()
        x = self.name()
        return Item(((x, a),), Var(x), a)

    def constructors(self):
        out = ["pair", "lamr", "laml", "appr", "appl", "let", "letu", "appr", "appl", "let"]
        if self.level.has_bang:
            out += ["copy", "discard", "promote", "derelict", "copy", "derelict"]
        if self.level.has_kappa:
            out += ["promotek", "derelictk", "exchl", "exchr", "exchl", "exchr"]
        return out

    def gen(self, d):
        rng = self.rng
        if d <= 0 or rng.random() < 0.12:
            return Item((), UnitTerm(), I) if rng.random() < 0.1 else self.var()
        return getattr(self, "_" + rng.choice(self.constructors()))(d)

    # pieces -------------------------------------------------------------

    def use_vars(self, binds, d, left_edge=False, right_edge=False):
        """An item whose context has ``binds`` adjacent and in order."""
        rng = self.rng
        parts = []
        for x, a in binds:
            t, ty = Var(x), a
            if isinstance(a, Bang) and rng.random() < 0.4:
                t, ty = DerelictBang(t), a.body
            elif isinstance(a, Kappa) and rng.random() < 0.4:
                t, ty = DerelictKappa(t), a.body
            parts.append(Item(((x, a),), t, ty))
        if not parts:
            core = Item((), UnitTerm(), I)
        else:
            core = parts[0]
            for p in parts[1:]:
                core = self.pair(core, p)
        if d > 0 and not left_edge and rng.random() < 0.3:
            core = self.pair(self.gen(d - 1), core)
        if d > 0 and not right_edge and rng.random() < 0.3:
            core = self.pair(core, self.gen(d - 1))
        return core

    def pair(self, i1, i2):
        return Item(i1.ctx + i2.ctx, TensorIntro(i1.term, i2.term), Tensor(i1.type, i2.type))

    def modal_src(self, d, modal):
        """A closed-or-open term of type ``modal(A)``."""
        rng = self.rng
        if d > 0 and rng.random() < 0.6:
            return (self._promote if modal is Bang else self._promotek)(d - 1)
        return self.var(modal(self.ty()))

    # constructors -------------------------------------------------------

    def _pair(self, d):
        return self.pair(self.gen(d - 1), self.gen(d - 1))

    def _lamr(self, d):
        a = self.ty()
        x = self.name()
        body = self.use_vars([(x, a)], d - 1, left_edge=True)
        return Item(body.ctx[1:], LamR(x, a, body.term), RImp(a, body.type))

    def _laml(self, d):
        a = self.ty()
        x = self.name()
        body = self.use_vars([(x, a)], d - 1, right_edge=True)
        return Item(body.ctx[:-1], LamL(x, a, body.term), LImp(body.type, a))

    def _appr(self, d):
        arg = self.gen(d - 1)
        if self.rng.random() < 0.6:
            x = self.name()
            body = self.use_vars([(x, arg.type)], d - 1, left_edge=True)
            fun = Item(body.ctx[1:], LamR(x, arg.type, body.term), RImp(arg.type, body.type))
        else:
            fun = self.var(RImp(arg.type, self.ty()))
        return Item(arg.ctx + fun.ctx, AppR(fun.term, arg.term), fun.type.res)

    def _appl(self, d):
        arg = self.gen(d - 1)
        if self.rng.random() < 0.6:
            x = self.name()
            body = self.use_vars([(x, arg.type)], d - 1, right_edge=True)
            fun = Item(body.ctx[:-1], LamL(x, arg.type, body.term), LImp(body.type, arg.type))
        else:
            fun = self.var(LImp(self.ty(), arg.type))
        return Item(fun.ctx + arg.ctx, AppL(fun.term, arg.term), fun.type.res)

    def _tensor_src(self, d):
        rng = self.rng
        for _ in range(3):
            if rng.random() < 0.5:
                break
            s = self.gen(d - 1)
            if isinstance(s.type, Tensor):
                return s
        if rng.random() < 0.7:
            return self.pair(self.gen(d - 1), self.gen(d - 1))
        return self.var(Tensor(self.ty(), self.ty()))

    def _pattern(self, a, depth=0):
        """A pattern for type ``a`` plus the bindings it makes."""
        rng = self.rng
        if isinstance(a, Unit) and depth > 0 and rng.random() < 0.5:
            return (Wildcard() if rng.random() < 0.5 else UnitPat()), []
        if isinstance(a, Tensor) and depth > 0 and rng.random() < 0.3:
            pl, bl = self._pattern(a.left, depth + 1)
            pr, br = self._pattern(a.right, depth + 1)
            return TensorPat(pl, pr), bl + br
        x = self.name()
        return PVar(x), [(x, a)]

    def _let(self, d):
        src = self._tensor_src(d)
        a = src.type
        pl, bl = self._pattern(a.left, 1)
        pr, br = self._pattern(a.right, 1)
        binds = bl + br
        body = self.use_vars(binds, d - 1)
        k = self._index(body.ctx, binds)
        ctx = body.ctx[:k] + src.ctx + body.ctx[k + len(binds):]
        return Item(ctx, Let(src.term, TensorPat(pl, pr), body.term), body.type)

    def _index(self, ctx, binds):
        if not binds:
            return 0
        names = [x for x, _ in ctx]
        return names.index(binds[0][0])

    def _letu(self, d):
        rng = self.rng
        r = rng.random()
        if r < 0.5:
            src = Item((), UnitTerm(), I)
        elif r < 0.75:
            src = self.var(I)
        else:
            inner = self._letu(d - 1) if d > 1 else Item((), UnitTerm(), I)
            src = inner if isinstance(inner.type, Unit) else Item((), UnitTerm(), I)
        body = self.gen(d - 1)
        pat = UnitPat() if rng.random() < 0.8 else Wildcard()
        return Item(src.ctx + body.ctx, Let(src.term, pat, body.term), body.type)

    def _copy(self, d):
        src = self.modal_src(d, Bang)
        x, y = self.name(), self.name()
        binds = [(x, src.type), (y, src.type)]
        body = self.use_vars(binds, d - 1)
        k = self._index(body.ctx, binds)
        ctx = body.ctx[:k] + src.ctx + body.ctx[k + 2:]
        return Item(ctx, Copy(src.term, x, y, body.term), body.type)

    def _discard(self, d):
        src = self.modal_src(d, Bang)
        body = self.gen(d - 1)
        return Item(src.ctx + body.ctx, Discard(src.term, body.term), body.type)

    def _promote_any(self, d, modal):
        n = self.rng.choice([0, 1, 1, 2])
        srcs = [self.modal_src(d - 1, modal) for _ in range(n)]
        vs = [self.name() for _ in srcs]
        body = self.use_vars(list(zip(vs, [s.type for s in srcs])), 0)
        ctx = tuple(itertools.chain.from_iterable(s.ctx for s in srcs))
        cls = PromoteBang if modal is Bang else PromoteKappa
        return Item(ctx, cls(tuple(s.term for s in srcs), tuple(vs), body.term), modal(body.type))

    def _promote(self, d):
        return self._promote_any(d, Bang)

    def _promotek(self, d):
        return self._promote_any(d, Kappa)

    def _derelict(self, d):
        src = self.modal_src(d, Bang)
        return Item(src.ctx, DerelictBang(src.term), src.type.body)

    def _derelictk(self, d):
        src = self.modal_src(d, Kappa)
        return Item(src.ctx, DerelictKappa(src.term), src.type.body)

    def _exchl(self, d):
        t1 = self.modal_src(d, Kappa)
        t2 = self.gen(d - 1)
        x, y = self.name(), self.name()
        binds = [(x, t2.type), (y, t1.type)]
        body = self.use_vars(binds, d - 1)
        k = self._index(body.ctx, binds)
        ctx = body.ctx[:k] + t1.ctx + t2.ctx + body.ctx[k + 2:]
        return Item(ctx, ExchL(t1.term, t2.term, x, y, body.term), body.type)

    def _exchr(self, d):
        t1 = self.gen(d - 1)
        t2 = self.modal_src(d, Kappa)
        x, y = self.name(), self.name()
        binds = [(x, t2.type), (y, t1.type)]
        body = self.use_vars(binds, d - 1)
        k = self._index(body.ctx, binds)
        ctx = body.ctx[:k] + t1.ctx + t2.ctx + body.ctx[k + 2:]
        return Item(ctx, ExchR(t1.term, t2.term, x, y, body.term), body.type)

    # driver -------------------------------------------------------------

    def terms(self, n, depth=4, max_depth=7, max_tries=None):
        """``n`` distinct well-typed ``(ctx, term, type)`` triples."""
        out, seen = [], set()
        tries = 0
        limit = max_tries or 40 * n
        while len(out) < n and tries < limit:
            tries += 1
            self.n = 0
            it = self.gen(self.rng.randint(1, depth))
            if term_depth(it.term) > max_depth:
                continue
            key = (it.ctx, canonical(it.term))
            if key in seen:
                continue
            try:
                got = typecheck(it.ctx, it.term, self.level)
            except TypeCheckError:
                self.rejected += 1
                continue
            if got != it.type:
                self.rejected += 1
                continue
            seen.add(key)
            out.append((it.ctx, it.term, it.type))
        return out


def random_terms(level, n, seed=0, depth=4, max_depth=7):
    return TermGenerator(level, seed).terms(n, depth, max_depth)


# ---------------------------------------------------------------------------
# Derivations containing cuts


def _provable(rng, level, tries=200, **kw):
    for _ in range(tries):
        s = random_sequent(rng, level, **kw)
        r = prove(s, level, DRAW_BUDGET)
        if isinstance(r, Found):
            return r.derivation
    raise RuntimeError("no provable sequent drawn")


def _identity_proof(a, level):
    r = prove(Sequent((a,), a), level)
    assert isinstance(r, Found)
    return r.derivation


def _cut(d1, d2, i):
    from .sequent import cut
    return cut(d1, d2, i)


def cut_derivations(n, seed=0, levels=(CalculusLevel.L, CalculusLevel.LKappa)):
    """``n`` checked derivations with at least one cut each.

    Three sources, in rotation: elaborations of random well-typed terms,
    cuts against an expanded identity proof on either side, and cuts joining
    two independently found proofs.
    """
    rng = random.Random(seed)
    gens = {lv: TermGenerator(lv, seed + i) for i, lv in enumerate(levels)}
    out = []
    k = 0
    while len(out) < n:
        level = levels[k % len(levels)]
        kind = k % 3
        k += 1
        if kind == 0:
            got = gens[level].terms(1, depth=4)
            if not got:
                continue
            ctx, t, _ = got[0]
            d = elaborate(ctx, t, level)
        elif kind == 1:
            d0 = _provable(rng, level)
            a = d0.conclusion.succedent
            if rng.random() < 0.5 or not d0.conclusion.antecedent:
                d = _cut(d0, _identity_proof(a, level), 0)
            else:
                i = rng.randrange(len(d0.conclusion.antecedent))
                h = d0.conclusion.antecedent[i]
                d = _cut(_identity_proof(h, level), d0, i)
        else:
            d2 = _provable(rng, level)
            ants = d2.conclusion.antecedent
            if not ants:
                continue
            i = rng.randrange(len(ants))
            a = ants[i]
            d1 = None
            for _ in range(20):
                s = random_sequent(rng, level, max_ante=2)
                s = Sequent(s.antecedent, a)
                r = prove(s, level, DRAW_BUDGET)
                if isinstance(r, Found):
                    d1 = r.derivation
                    break
            if d1 is None:
                d1 = _identity_proof(a, level)
            d = _cut(d1, d2, i)
        if count_cuts(d) >= 1:
            out.append((level, d))
    return out


__all__ = [
    "l_formulas", "bounded_universe", "sample_universe", "random_formula",
    "random_sequent", "TermGenerator", "random_terms", "cut_derivations",
    "connectives",
]
