"""Derivations for the four sequent calculi: checking, search and cut elimination.

Every rule is described once, by ``premise_layout``: given a conclusion plus
the node's split/principal indices it returns the premise sequents, each
antecedent entry being either an ``int`` (the conclusion position it is
copied from) or a new ``Formula``.  The checker, the prover and the cut
eliminator all go through it, so the three cannot disagree on a schema.

Conventions for indices (all refer to the conclusion antecedent):

* ``Ul Tl C W Bl El``: principal = position of the rule's formula.
* ``Tr``: splits = (s,), left premise gets ``ctx[:s]``.
* ``ILr``: principal p holds ``A \\ B``, splits = (s,) with s <= p; the
  argument premise proves ``A`` from ``ctx[s:p]``.
* ``ILl``: principal p holds ``A / B``, splits = (s,) with s > p; the argument
  premise proves ``B`` from ``ctx[p+1:s]``.
* ``Cut``: splits = (i, j); the left premise proves the cut formula from
  ``ctx[i:j]``.
* ``E1``: principal p holds ``k A`` and the premise swaps positions p, p+1
  (conclusion ``.., k A, B, ..`` from premise ``.., B, k A, ..``).
* ``E2``: principal p holds ``k B`` and the premise swaps positions p-1, p
  (conclusion ``.., A, k B, ..`` from premise ``.., k B, A, ..``).
"""

from __future__ import annotations

import enum
from collections import deque
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Optional

from . import sexp
from .syntax import (
    Atom, Bang, CalculusLevel, Formula, I, Kappa, LImp, RImp, Sequent, Tensor,
    Unit, formula_from_sexp, formula_level, render, sequent_from_sexp,
    sequent_level, sequent_to_sexp,
)


class Rule(enum.Enum):
    Ax = "Ax"
    Cut = "Cut"
    Ur = "Ur"
    Ul = "Ul"
    Tl = "Tl"
    Tr = "Tr"
    IRl = "IRl"
    ILl = "ILl"
    IRr = "IRr"
    ILr = "ILr"
    C = "C"
    W = "W"
    Br = "Br"
    Bl = "Bl"
    Er = "Er"
    El = "El"
    E1 = "E1"
    E2 = "E2"


RULE_ORDER = list(Rule)
_L_RULES = frozenset(RULE_ORDER[:10])
_BANG_RULES = frozenset({Rule.C, Rule.W, Rule.Br, Rule.Bl})
_KAPPA_RULES = frozenset({Rule.Er, Rule.El, Rule.E1, Rule.E2})

# rules whose principal formula sits in the antecedent
LEFT_RULES = frozenset({
    Rule.Ul, Rule.Tl, Rule.ILl, Rule.ILr, Rule.C, Rule.W, Rule.Bl, Rule.El,
    Rule.E1, Rule.E2,
})
RIGHT_RULES = frozenset({Rule.Ur, Rule.Tr, Rule.IRl, Rule.IRr, Rule.Br, Rule.Er})


def rules_for(level: CalculusLevel) -> frozenset:
    out = set(_L_RULES)
    if level.has_bang:
        out |= _BANG_RULES
    if level.has_kappa:
        out |= _KAPPA_RULES
    return frozenset(out)


@dataclass(frozen=True)
class Derivation:
    rule: Rule
    conclusion: Sequent
    premises: tuple = ()
    splits: tuple = ()
    principal: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))
        object.__setattr__(self, "splits", tuple(self.splits))

    def render(self, indent=0):
        tag = self.rule.value
        extra = []
        if self.principal is not None:
            extra.append(f"@{self.principal}")
        if self.splits:
            extra.append("|" + ",".join(map(str, self.splits)))
        head = " " * indent + f"{render(self.conclusion)}   [{tag}{' ' + ' '.join(extra) if extra else ''}]"
        return "\n".join([head] + [p.render(indent + 2) for p in self.premises])


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = 24
    max_visited: int = 50_000

    def __post_init__(self):
        if self.max_depth <= 0 or self.max_visited <= 0:
            raise ValueError("search budget must be positive")


@dataclass(frozen=True)
class Found:
    derivation: Derivation


@dataclass(frozen=True)
class NotProvable:
    visited: int = 0


@dataclass(frozen=True)
class BudgetExceeded:
    visited: int = 0


class DerivationError(ValueError):
    def __init__(self, message, path=()):
        where = "/".join(map(str, path)) or "root"
        super().__init__(f"{message} (at {where})")
        self.path = tuple(path)


class FuelExhausted(RuntimeError):
    def __init__(self, remaining_cuts):
        super().__init__(f"fuel exhausted with {remaining_cuts} cut(s) remaining")
        self.remaining_cuts = remaining_cuts


class CutNotAdmissible(RuntimeError):
    """A principal cut of promotion against contraction on a context of two or
    more formulas: reducing it would need exchange between ``!``-formulas,
    which the ordered calculus does not have."""


class _Shape(Exception):
    pass


# ---------------------------------------------------------------------------
# Rule schemas


def premise_layout(rule, ctx, succ, splits=(), principal=None, cut_formula=None):
    """Premises of a rule instance as (items, succedent) pairs.

    Raises ``_Shape`` with a message when the conclusion does not fit.
    """
    n = len(ctx)
    idx = list(range(n))

    def need(cond, msg):
        if not cond:
            raise _Shape(msg)

    def at(p, cls):
        need(p is not None and 0 <= p < n, "principal index out of range")
        need(isinstance(ctx[p], cls), f"principal formula is not a {cls.__name__}")
        return ctx[p]

    if rule is Rule.Ax:
        need(n == 1 and ctx[0] == succ, "axiom needs A |- A")
        return []
    if rule is Rule.Ur:
        need(n == 0 and succ == I, "unit right needs |- I")
        return []
    if rule is Rule.Ul:
        at(principal, Unit)
        return [(idx[:principal] + idx[principal + 1:], succ)]
    if rule is Rule.Tl:
        f = at(principal, Tensor)
        return [(idx[:principal] + [f.left, f.right] + idx[principal + 1:], succ)]
    if rule is Rule.Tr:
        need(isinstance(succ, Tensor), "succedent is not a tensor")
        need(len(splits) == 1 and 0 <= splits[0] <= n, "bad split")
        s = splits[0]
        return [(idx[:s], succ.left), (idx[s:], succ.right)]
    if rule is Rule.IRr:
        need(isinstance(succ, RImp), "succedent is not A \\ B")
        return [([succ.arg] + idx, succ.res)]
    if rule is Rule.IRl:
        need(isinstance(succ, LImp), "succedent is not A / B")
        return [(idx + [succ.arg], succ.res)]
    if rule is Rule.ILr:
        f = at(principal, RImp)
        need(len(splits) == 1 and 0 <= splits[0] <= principal, "bad split")
        s = splits[0]
        return [(idx[s:principal], f.arg), (idx[:s] + [f.res] + idx[principal + 1:], succ)]
    if rule is Rule.ILl:
        f = at(principal, LImp)
        need(len(splits) == 1 and principal < splits[0] <= n, "bad split")
        s = splits[0]
        return [(idx[principal + 1:s], f.arg), (idx[:principal] + [f.res] + idx[s:], succ)]
    if rule is Rule.Cut:
        need(len(splits) == 2 and 0 <= splits[0] <= splits[1] <= n, "bad cut split")
        need(cut_formula is not None, "cut formula unknown")
        i, j = splits
        return [(idx[i:j], cut_formula), (idx[:i] + [cut_formula] + idx[j:], succ)]
    if rule is Rule.C:
        f = at(principal, Bang)
        return [(idx[:principal + 1] + [f] + idx[principal + 1:], succ)]
    if rule is Rule.W:
        at(principal, Bang)
        return [(idx[:principal] + idx[principal + 1:], succ)]
    if rule is Rule.Bl:
        f = at(principal, Bang)
        return [(idx[:principal] + [f.body] + idx[principal + 1:], succ)]
    if rule is Rule.Br:
        need(isinstance(succ, Bang), "succedent is not !A")
        need(all(isinstance(a, Bang) for a in ctx), "promotion needs every hypothesis !-prefixed")
        return [(idx, succ.body)]
    if rule is Rule.El:
        f = at(principal, Kappa)
        return [(idx[:principal] + [f.body] + idx[principal + 1:], succ)]
    if rule is Rule.Er:
        need(isinstance(succ, Kappa), "succedent is not k A")
        need(all(isinstance(a, Kappa) for a in ctx), "promotion needs every hypothesis k-prefixed")
        return [(idx, succ.body)]
    if rule is Rule.E1:
        at(principal, Kappa)
        need(principal + 1 < n, "nothing to the right of the exchanged formula")
        p = principal
        return [(idx[:p] + [p + 1, p] + idx[p + 2:], succ)]
    if rule is Rule.E2:
        at(principal, Kappa)
        need(principal >= 1, "nothing to the left of the exchanged formula")
        p = principal
        return [(idx[:p - 1] + [p, p - 1] + idx[p + 1:], succ)]
    raise _Shape(f"unknown rule {rule}")


def _materialize(ctx, layout):
    return [
        Sequent(tuple(ctx[x] if isinstance(x, int) else x for x in items), s)
        for items, s in layout
    ]


def premise_sequents(rule, concl, splits=(), principal=None, cut_formula=None):
    lay = premise_layout(rule, concl.antecedent, concl.succedent, splits, principal, cut_formula)
    return _materialize(concl.antecedent, lay)


# ---------------------------------------------------------------------------
# Checking


def check_derivation(d: Derivation, level: CalculusLevel) -> Sequent:
    """Validate every node; return the endsequent or raise DerivationError."""
    allowed = rules_for(level) | {Rule.Cut}
    stack = [(d, ())]
    while stack:
        node, path = stack.pop()
        if not isinstance(node.rule, Rule):
            raise DerivationError(f"unknown rule {node.rule!r}", path)
        if node.rule not in allowed:
            raise DerivationError(f"rule {node.rule.value} not available at level {level.value}", path)
        if not level.admits(sequent_level(node.conclusion)):
            raise DerivationError(
                f"sequent {render(node.conclusion)} uses connectives outside level {level.value}", path
            )
        cut_formula = None
        if node.rule is Rule.Cut:
            if len(node.premises) != 2:
                raise DerivationError("cut needs two premises", path)
            cut_formula = node.premises[0].conclusion.succedent
        try:
            expected = premise_sequents(
                node.rule, node.conclusion, node.splits, node.principal, cut_formula
            )
        except _Shape as e:
            raise DerivationError(f"{node.rule.value}: {e}", path) from None
        if len(expected) != len(node.premises):
            raise DerivationError(
                f"{node.rule.value} expects {len(expected)} premise(s), got {len(node.premises)}", path
            )
        for k, (want, prem) in enumerate(zip(expected, node.premises)):
            if prem.conclusion != want:
                raise DerivationError(
                    f"{node.rule.value} premise {k}: expected {render(want)}, "
                    f"found {render(prem.conclusion)}",
                    path,
                )
            stack.append((prem, path + (k,)))
    return d.conclusion


def is_cut_free(d: Derivation) -> bool:
    return count_cuts(d) == 0


def count_cuts(d: Derivation) -> int:
    n = 0
    stack = [d]
    while stack:
        x = stack.pop()
        n += x.rule is Rule.Cut
        stack.extend(x.premises)
    return n


def height(d: Derivation) -> int:
    return 1 + max((height(p) for p in d.premises), default=0)


def derivation_size(d: Derivation) -> int:
    return 1 + sum(derivation_size(p) for p in d.premises)


def rules_used(d: Derivation) -> set:
    out = set()
    stack = [d]
    while stack:
        x = stack.pop()
        out.add(x.rule)
        stack.extend(x.premises)
    return out


# ---------------------------------------------------------------------------
# Backward proof search


def alternatives(seq: Sequent, level: CalculusLevel):
    """Every backward rule instance for ``seq`` in the fixed canonical order.

    Yields ``(rule, splits, principal, premise_sequents)``.
    """
    ctx, succ = seq.antecedent, seq.succedent
    n = len(ctx)
    rules = rules_for(level)

    def inst(rule, splits=(), principal=None):
        return rule, tuple(splits), principal, premise_sequents(rule, seq, splits, principal)

    if n == 1 and ctx[0] == succ:
        yield inst(Rule.Ax)
    if n == 0 and succ == I:
        yield inst(Rule.Ur)
    for p in range(n):
        if isinstance(ctx[p], Unit):
            yield inst(Rule.Ul, (), p)
    for p in range(n):
        if isinstance(ctx[p], Tensor):
            yield inst(Rule.Tl, (), p)
    if isinstance(succ, Tensor):
        for s in range(n + 1):
            yield inst(Rule.Tr, (s,))
    if isinstance(succ, LImp):
        yield inst(Rule.IRl)
    for p in range(n):
        if isinstance(ctx[p], LImp):
            for s in range(p + 1, n + 1):
                yield inst(Rule.ILl, (s,), p)
    if isinstance(succ, RImp):
        yield inst(Rule.IRr)
    for p in range(n):
        if isinstance(ctx[p], RImp):
            for s in range(p + 1):
                yield inst(Rule.ILr, (s,), p)
    if Rule.C in rules:
        for p in range(n):
            if isinstance(ctx[p], Bang):
                yield inst(Rule.C, (), p)
        for p in range(n):
            if isinstance(ctx[p], Bang):
                yield inst(Rule.W, (), p)
        if isinstance(succ, Bang) and all(isinstance(a, Bang) for a in ctx):
            yield inst(Rule.Br)
        for p in range(n):
            if isinstance(ctx[p], Bang):
                yield inst(Rule.Bl, (), p)
    if Rule.Er in rules:
        if isinstance(succ, Kappa) and all(isinstance(a, Kappa) for a in ctx):
            yield inst(Rule.Er)
        for p in range(n):
            if isinstance(ctx[p], Kappa):
                yield inst(Rule.El, (), p)
        for p in range(n - 1):
            if isinstance(ctx[p], Kappa):
                yield inst(Rule.E1, (), p)
        for p in range(1, n):
            if isinstance(ctx[p], Kappa):
                yield inst(Rule.E2, (), p)


_INVERTIBLE = frozenset({Rule.Ul, Rule.Tl, Rule.IRr, Rule.IRl})


@lru_cache(maxsize=None)
def _atom_balance(a: Formula) -> tuple:
    """Signed atom occurrences of ``a`` as a succedent, sorted by name."""
    out = {}

    def walk(f, sign):
        if isinstance(f, Atom):
            out[f.name] = out.get(f.name, 0) + sign
        elif isinstance(f, Tensor):
            walk(f.left, sign)
            walk(f.right, sign)
        elif isinstance(f, (RImp, LImp)):
            walk(f.arg, -sign)
            walk(f.res, sign)

    walk(a, 1)
    return tuple(sorted(out.items()))


def balanced(seq: Sequent) -> bool:
    """Every atom occurs as often positively as negatively.  Each L rule
    preserves the count, so an unbalanced sequent has no L proof."""
    total = dict(_atom_balance(seq.succedent))
    for a in seq.antecedent:
        for name, c in _atom_balance(a):
            total[name] = total.get(name, 0) - c
    return not any(total.values())


class LProver:
    """Complete memoised search for level L.

    Every L rule strictly shrinks the sequent, so plain recursion terminates.
    The memo table may be shared across queries; answers do not depend on it.
    """

    def __init__(self):
        self.memo = {}

    def search(self, seq: Sequent) -> Optional[Derivation]:
        if not balanced(seq):
            return None
        hit = self.memo.get(seq, False)
        if hit is not False:
            return hit
        result = None
        for rule, splits, principal, prems in alternatives(seq, CalculusLevel.L):
            subs = []
            for q in prems:
                sub = self.search(q)
                if sub is None:
                    break
                subs.append(sub)
            else:
                result = Derivation(rule, seq, tuple(subs), splits, principal)
                break
            if rule in _INVERTIBLE:
                # the premise of an invertible rule is derivable from the
                # conclusion, so its failure settles the question
                break
        self.memo[seq] = result
        return result


def _modal_search(seq, level, budget):
    index = {seq: 0}
    nodes = [seq]
    alts = []  # per node: list of (rule, splits, principal, premise ids)
    depth = [0]
    frontier = deque([0])
    closed = True
    h = [None]

    def fixpoint():
        changed = True
        while changed:
            changed = False
            for v, options in enumerate(alts):
                best = h[v]
                for rule, splits, principal, prem_ids in options:
                    hs = [h[q] for q in prem_ids]
                    if any(x is None for x in hs):
                        continue
                    cand = 1 + max(hs, default=-1)
                    if best is None or cand < best:
                        best = cand
                if best != h[v]:
                    h[v] = best
                    changed = True

    current_layer = 0
    while frontier:
        v = frontier.popleft()
        if depth[v] > current_layer:
            fixpoint()
            if h[0] is not None:
                break
            current_layer = depth[v]
        if depth[v] >= budget.max_depth:
            closed = False
            alts.append([])
            continue
        options = []
        for rule, splits, principal, prems in alternatives(nodes[v], level):
            ids = []
            for q in prems:
                if q not in index:
                    if len(nodes) >= budget.max_visited:
                        closed = False
                        ids = None
                        break
                    index[q] = len(nodes)
                    nodes.append(q)
                    depth.append(depth[v] + 1)
                    h.append(None)
                    frontier.append(index[q])
                ids.append(index[q])
            if ids is None:
                break
            options.append((rule, splits, principal, ids))
        alts.append(options)
    # nodes still queued were never expanded
    while len(alts) < len(nodes):
        alts.append([])
    fixpoint()
    if h[0] is None:
        return (NotProvable if closed and not frontier else BudgetExceeded)(len(nodes))

    built = {}

    def build(v):
        if v in built:
            return built[v]
        for rule, splits, principal, prem_ids in alts[v]:
            hs = [h[q] for q in prem_ids]
            if all(x is not None and x < h[v] for x in hs) and 1 + max(hs, default=-1) == h[v]:
                d = Derivation(rule, nodes[v], tuple(build(q) for q in prem_ids), splits, principal)
                built[v] = d
                return d
        raise AssertionError("height table inconsistent")

    return Found(build(0))


def prove(seq: Sequent, level: CalculusLevel = CalculusLevel.L, budget: SearchBudget = None,
          prover: LProver = None):
    """Cut-free backward search.  Returns Found, NotProvable or BudgetExceeded."""
    if not level.admits(sequent_level(seq)):
        raise ValueError(f"sequent {render(seq)} uses connectives outside level {level.value}")
    budget = budget or SearchBudget()
    if level is CalculusLevel.L:
        d = (prover or LProver()).search(seq)
        return Found(d) if d is not None else NotProvable()
    return _modal_search(seq, level, budget)


# ---------------------------------------------------------------------------
# Cut elimination


def _shift(d: Derivation, at: int, by: int) -> tuple:
    """Indices of ``d`` with every index greater than ``at`` moved by ``by``."""
    sp = tuple(s + by if s > at else s for s in d.splits)
    pr = d.principal
    if pr is not None and pr > at:
        pr += by
    return sp, pr


class _Eliminator:
    def __init__(self, fuel, total_cuts):
        self.fuel = fuel
        self.remaining = total_cuts

    def tick(self):
        self.fuel -= 1
        if self.fuel < 0:
            raise FuelExhausted(self.remaining)

    def elim(self, d):
        prems = tuple(self.elim(p) for p in d.premises)
        if d.rule is not Rule.Cut:
            if prems == d.premises:
                return d
            return Derivation(d.rule, d.conclusion, prems, d.splits, d.principal)
        i, j = d.splits
        out = self.reduce(prems[0], prems[1], i)
        self.remaining -= 1
        return out

    def reduce(self, d1, d2, i):
        """Cut-free derivation of the conclusion of Cut(d1, d2) at position i."""
        self.tick()
        gamma = d1.conclusion.antecedent
        n = len(gamma)
        ctx2 = d2.conclusion.antecedent
        concl = Sequent(ctx2[:i] + gamma + ctx2[i + 1:], d2.conclusion.succedent)
        if d1.rule is Rule.Ax:
            return d2
        if d2.rule is Rule.Ax:
            return d1
        if d1.rule in LEFT_RULES:
            main = 1 if d1.rule in (Rule.ILr, Rule.ILl) else 0
            prems = list(d1.premises)
            prems[main] = self.reduce(prems[main], d2, i)
            splits = tuple(s + i for s in d1.splits)
            pr = None if d1.principal is None else d1.principal + i
            return Derivation(d1.rule, concl, prems, splits, pr)
        if d2.principal == i and d2.rule in LEFT_RULES:
            return self.principal(d1, d2, i, concl)
        if d2.rule is Rule.E1 and d2.principal == i - 1:
            p = d2.principal
            x = self.reduce(d1, d2.premises[0], p)
            for m in range(n, 0, -1):
                x = _swap_step(Rule.E1, x, p + m - 1, p + m - 1, d2.conclusion.succedent)
            return x
        if d2.rule is Rule.E2 and d2.principal == i + 1:
            p = d2.principal
            x = self.reduce(d1, d2.premises[0], p)
            for q in range(p - 1, p - 1 + n):
                x = _swap_step(Rule.E2, x, q, q + 1, d2.conclusion.succedent)
            return x
        return self.into_right(d1, d2, i, concl)

    def into_right(self, d1, d2, i, concl):
        ctx2 = d2.conclusion.antecedent
        cutf = d2.premises[0].conclusion.succedent if d2.rule is Rule.Cut else None
        lay = premise_layout(d2.rule, ctx2, d2.conclusion.succedent, d2.splits, d2.principal, cutf)
        prems = list(d2.premises)
        for k, (items, _) in enumerate(lay):
            if i in items:
                prems[k] = self.reduce(d1, prems[k], items.index(i))
                break
        else:
            raise AssertionError("cut formula not found in any premise")
        splits, pr = _shift(d2, i, len(d1.conclusion.antecedent) - 1)
        return Derivation(d2.rule, concl, prems, splits, pr)

    def principal(self, d1, d2, i, concl):
        r1, r2 = d1.rule, d2.rule
        gamma = d1.conclusion.antecedent
        n = len(gamma)
        succ = concl.succedent
        if r2 is Rule.Ul:
            assert r1 is Rule.Ur
            return d2.premises[0]
        if r2 is Rule.Tl:
            assert r1 is Rule.Tr
            q1, q2 = d1.premises
            x = self.reduce(q2, d2.premises[0], i + 1)
            return self.reduce(q1, x, i)
        if r2 is Rule.ILr:
            assert r1 is Rule.IRr
            (q,) = d1.premises
            t1, t2 = d2.premises
            (s,) = d2.splits
            x = self.reduce(t1, q, 0)
            return self.reduce(x, t2, s)
        if r2 is Rule.ILl:
            assert r1 is Rule.IRl
            (q,) = d1.premises
            t1, t2 = d2.premises
            x = self.reduce(t1, q, n)
            return self.reduce(x, t2, i)
        if r2 in (Rule.Bl, Rule.El):
            assert r1 in (Rule.Br, Rule.Er)
            return self.reduce(d1.premises[0], d2.premises[0], i)
        if r2 is Rule.W:
            assert r1 is Rule.Br
            x = d2.premises[0]
            for k in range(n):
                ctx = x.conclusion.antecedent
                x = Derivation(Rule.W, Sequent(ctx[:i + k] + (gamma[k],) + ctx[i + k:], succ),
                               (x,), (), i + k)
            return x
        if r2 is Rule.C:
            assert r1 is Rule.Br
            if n >= 2:
                raise CutNotAdmissible(
                    f"contraction on {render(d2.conclusion.antecedent[i])} against promotion "
                    f"over {n} hypotheses needs exchange"
                )
            x = self.reduce(d1, d2.premises[0], i + 1)
            y = self.reduce(d1, x, i)
            if n == 1:
                y = Derivation(Rule.C, concl, (y,), (), i)
            return y
        if r2 is Rule.E1:
            assert r1 is Rule.Er
            x = self.reduce(d1, d2.premises[0], i + 1)
            for m in range(n):
                x = _swap_step(Rule.E1, x, i + m, i + m, succ)
            return x
        if r2 is Rule.E2:
            assert r1 is Rule.Er
            x = self.reduce(d1, d2.premises[0], i - 1)
            for q in range(i - 1 + n, i - 1, -1):
                x = _swap_step(Rule.E2, x, q - 1, q, succ)
            return x
        raise AssertionError(f"no principal reduction for {r1} against {r2}")


def _swap_step(rule, x, lo, principal, succ):
    """Apply E1/E2 to ``x`` exchanging conclusion positions lo, lo+1."""
    ctx = list(x.conclusion.antecedent)
    ctx[lo], ctx[lo + 1] = ctx[lo + 1], ctx[lo]
    return Derivation(rule, Sequent(tuple(ctx), succ), (x,), (), principal)


def eliminate_cut(d: Derivation, fuel: int = 10_000) -> Derivation:
    """Cut-free derivation with the same endsequent.

    Raises FuelExhausted after ``fuel`` reduction steps and CutNotAdmissible
    for the one principal case that has no ordered reduct.
    """
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    return _Eliminator(fuel, count_cuts(d)).elim(d)


# ---------------------------------------------------------------------------
# Serialisation


def derivation_to_sexp(d: Derivation):
    return [
        "rule", d.rule.value,
        ":concl", sequent_to_sexp(d.conclusion),
        ":splits", [str(s) for s in d.splits],
        ":principal", "nil" if d.principal is None else str(d.principal),
        ":prems", [derivation_to_sexp(p) for p in d.premises],
    ]


def derivation_from_sexp(x) -> Derivation:
    if not (isinstance(x, list) and len(x) == 10 and x[0] == "rule"):
        raise sexp.SexpError("derivation must be (rule NAME :concl .. :splits .. :principal .. :prems ..)")
    fields = dict(zip(x[2::2], x[3::2]))
    if set(fields) != {":concl", ":splits", ":principal", ":prems"}:
        raise sexp.SexpError(f"derivation fields must be :concl :splits :principal :prems, got {sorted(fields)}")
    try:
        rule = Rule(x[1])
    except ValueError:
        raise sexp.SexpError(f"unknown rule {x[1]!r}") from None
    pr = fields[":principal"]
    return Derivation(
        rule,
        sequent_from_sexp(fields[":concl"]),
        tuple(derivation_from_sexp(p) for p in fields[":prems"]),
        tuple(int(s) for s in fields[":splits"]),
        None if pr == "nil" else int(pr),
    )


def dumps_derivation(d: Derivation) -> str:
    return sexp.dumps(derivation_to_sexp(d))


def loads_derivation(text: str) -> Derivation:
    return derivation_from_sexp(sexp.loads(text))


# convenience constructors used by tests and the type checker

def ax(a: Formula) -> Derivation:
    return Derivation(Rule.Ax, Sequent((a,), a))


def cut(d1: Derivation, d2: Derivation, i: int) -> Derivation:
    """Cut ``d1`` into the antecedent position ``i`` of ``d2``."""
    gamma = d1.conclusion.antecedent
    ctx2 = d2.conclusion.antecedent
    if ctx2[i] != d1.conclusion.succedent:
        raise DerivationError("cut formula mismatch")
    concl = Sequent(ctx2[:i] + gamma + ctx2[i + 1:], d2.conclusion.succedent)
    return Derivation(Rule.Cut, concl, (d1, d2), (i, i + len(gamma)))


__all__ = [
    "Rule", "Derivation", "SearchBudget", "Found", "NotProvable", "BudgetExceeded",
    "DerivationError", "FuelExhausted", "CutNotAdmissible", "rules_for",
    "check_derivation", "prove", "eliminate_cut", "alternatives", "premise_layout",
    "premise_sequents", "LProver", "is_cut_free", "count_cuts", "height",
    "derivation_to_sexp", "derivation_from_sexp", "dumps_derivation",
    "loads_derivation", "ax", "cut",
]
