"""Finite biclosed posets: validation, construction, enumeration, evaluation.

Elements are indices ``0..n-1``.  ``rres[a][b]`` is the largest ``x`` with
``a . x <= b`` (interpreting ``A \\ B``) and ``lres[a][b]`` the largest ``x``
with ``x . a <= b`` (so ``A / B`` is ``lres[B][A]``).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from typing import Optional

from .syntax import (
    Atom, Bang, CalculusLevel, Kappa, LImp, RImp, Sequent, Tensor, Unit,
    render, sequent_atoms, sequent_level,
)

DEFAULT_SEED = 20240611


@dataclass
class FinBiclosedPoset:
    names: list
    leq: list  # leq[a][b] is a <= b
    op: list
    unit: int
    rres: Optional[list] = None
    lres: Optional[list] = None
    kappa: Optional[list] = None
    bang: Optional[list] = None
    label: str = "M"

    @property
    def n(self):
        return len(self.names)

    def le(self, a, b):
        return self.leq[a][b]

    def mul(self, a, b):
        return self.op[a][b]

    def fold(self, xs):
        acc = self.unit
        for x in xs:
            acc = self.op[acc][x]
        return acc

    def with_residuals(self):
        r, l = compute_residuals(self)
        return replace(self, rres=r, lres=l)

    def is_commutative(self):
        return all(self.op[a][b] == self.op[b][a] for a in range(self.n) for b in range(self.n))

    def __repr__(self):
        extra = "".join(f"+{t}" for t in ("kappa", "bang") if getattr(self, t) is not None)
        return f"<{self.label}: {self.n} elements{extra}>"


class NoMaximum(ValueError):
    def __init__(self, a, b, side):
        super().__init__(f"no largest x with {'a.x' if side == 'right' else 'x.a'} <= b for a={a}, b={b}")
        self.a, self.b, self.side = a, b, side


class NotConstructible(ValueError):
    pass


class MissingTable(ValueError):
    pass


class InvalidModel(ValueError):
    def __init__(self, report):
        super().__init__("invalid model: " + "; ".join(f"{ax} {w}" for ax, w in report.failures[:5]))
        self.report = report


# ---------------------------------------------------------------------------
# Residuals


def _maximum(m, candidates):
    """The greatest element of ``candidates`` under m.leq, or None."""
    for x in candidates:
        if all(m.leq[y][x] for y in candidates):
            return x
    return None


def compute_residuals(m):
    n = m.n
    rres = [[None] * n for _ in range(n)]
    lres = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            right = [x for x in range(n) if m.leq[m.op[a][x]][b]]
            mx = _maximum(m, right)
            if mx is None:
                raise NoMaximum(a, b, "right")
            rres[a][b] = mx
            left = [x for x in range(n) if m.leq[m.op[x][a]][b]]
            mx = _maximum(m, left)
            if mx is None:
                raise NoMaximum(a, b, "left")
            lres[a][b] = mx
    return rres, lres


# ---------------------------------------------------------------------------
# Validation


@dataclass
class ValidationReport:
    failures: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def fail(self, axiom, *witness):
        self.failures.append((axiom, witness))

    def failed_axioms(self):
        return sorted({a for a, _ in self.failures})


def validate(m: FinBiclosedPoset, stop_early=False) -> ValidationReport:
    """Check every axiom exhaustively; failures carry a witness tuple."""
    rep = ValidationReport()
    n = m.n
    R = range(n)
    le, op = m.leq, m.op

    def shape(tab, name, arity):
        rows = tab if arity == 2 else [tab]
        if len(rows) != n or any(len(r) != n for r in rows):
            rep.fail(f"{name}-shape", len(rows))
            return False
        if any(not (0 <= x < n) for r in rows for x in r) if name != "leq" else False:
            rep.fail(f"{name}-range")
            return False
        return True

    if not shape(le, "leq", 2) or not shape(op, "op", 2) or not (0 <= m.unit < n):
        if not (0 <= m.unit < n):
            rep.fail("unit-range", m.unit)
        return rep
    for t in ("kappa", "bang"):
        tab = getattr(m, t)
        if tab is not None and (len(tab) != n or any(not (0 <= x < n) for x in tab)):
            rep.fail(f"{t}-shape")
            return rep

    def done():
        return stop_early and rep.failures

    for a in R:
        if not le[a][a]:
            rep.fail("reflexivity", a)
    for a in R:
        for b in R:
            if a != b and le[a][b] and le[b][a]:
                rep.fail("antisymmetry", a, b)
            for c in R:
                if le[a][b] and le[b][c] and not le[a][c]:
                    rep.fail("transitivity", a, b, c)
    if done():
        return rep
    for a in R:
        if op[m.unit][a] != a:
            rep.fail("left-unit", a)
        if op[a][m.unit] != a:
            rep.fail("right-unit", a)
    for a in R:
        for b in R:
            for c in R:
                if op[op[a][b]][c] != op[a][op[b][c]]:
                    rep.fail("associativity", a, b, c)
    for a in R:
        for b in R:
            if not le[a][b]:
                continue
            for c in R:
                if not le[op[a][c]][op[b][c]]:
                    rep.fail("monotone-left", a, b, c)
                if not le[op[c][a]][op[c][b]]:
                    rep.fail("monotone-right", a, b, c)
    if done():
        return rep

    try:
        rr, lr = compute_residuals(m)
    except NoMaximum as e:
        rep.fail(f"residual-{e.side}-exists", e.a, e.b)
        return rep
    for name, given, want in (("rres", m.rres, rr), ("lres", m.lres, lr)):
        if given is None:
            continue
        for a in R:
            for b in R:
                if given[a][b] != want[a][b]:
                    rep.fail(f"{name}-maximum", a, b, given[a][b])

    k = m.kappa
    if k is not None:
        for a in R:
            if not le[k[a]][a]:
                rep.fail("kappa-minimality", a)
            if not le[k[a]][k[k[a]]]:
                rep.fail("kappa-duplication", a)
            for b in R:
                if le[a][b] and not le[k[a]][k[b]]:
                    rep.fail("kappa-compatibility", a, b)
                if not le[op[k[a]][b]][op[b][k[a]]]:
                    rep.fail("kappa-left-exchange", a, b)
                if not le[op[a][k[b]]][op[k[b]][a]]:
                    rep.fail("kappa-right-exchange", a, b)
        # soundness of promotion over k-contexts needs these too
        if not le[m.unit][k[m.unit]]:
            rep.warnings.append(("kappa-promotion-unit", (m.unit,)))
        for a in R:
            for b in R:
                g = op[k[a]][k[b]]
                if not le[g][k[g]]:
                    rep.warnings.append(("kappa-promotion-product", (a, b)))

    b_ = m.bang
    if b_ is not None:
        if not le[m.unit][b_[m.unit]]:
            rep.fail("bang-unit", m.unit)
        for a in R:
            if not le[b_[a]][a]:
                rep.fail("bang-dereliction", a)
            if not le[b_[a]][b_[b_[a]]]:
                rep.fail("bang-digging", a)
            if not le[b_[a]][m.unit]:
                rep.fail("bang-weakening", a)
            if not le[b_[a]][op[b_[a]][b_[a]]]:
                rep.fail("bang-contraction", a)
            for c in R:
                if le[a][c] and not le[b_[a]][b_[c]]:
                    rep.fail("bang-monotone", a, c)
                if not le[op[b_[a]][b_[c]]][b_[op[a][c]]]:
                    rep.fail("bang-product", a, c)
                # derived rule check: promotion over a two-element context
                g = op[b_[a]][b_[c]]
                if not le[g][b_[g]]:
                    rep.fail("bang-promotion", a, c)
    return rep


def is_valid(m) -> bool:
    return validate(m, stop_early=True).ok


def require_valid(m):
    rep = validate(m)
    if not rep.ok:
        raise InvalidModel(rep)
    return m


# ---------------------------------------------------------------------------
# Modal operators


def center_kappa(m: FinBiclosedPoset) -> list:
    """``k a`` = the largest central element below ``a``."""
    n = m.n
    center = [c for c in range(n) if all(m.op[c][b] == m.op[b][c] for b in range(n))]
    table = []
    for a in range(n):
        below = [c for c in center if m.leq[c][a]]
        mx = _maximum(m, below)
        if mx is None:
            raise NotConstructible(f"no largest central element below {m.names[a]}")
        table.append(mx)
    rep = validate(replace(m, kappa=table, bang=None))
    bad = [f for f in rep.failures if f[0].startswith("kappa")]
    if bad:
        raise NotConstructible(f"central interior fails {bad[0][0]} at {bad[0][1]}")
    return table


def unit_bang(m: FinBiclosedPoset) -> list:
    """``!a`` = ``e`` when ``e <= a``, otherwise the least element."""
    n = m.n
    bottoms = [x for x in range(n) if all(m.leq[x][y] for y in range(n))]
    if not bottoms:
        raise NotConstructible("no least element")
    bot = bottoms[0]
    table = [m.unit if m.leq[m.unit][a] else bot for a in range(n)]
    rep = validate(replace(m, bang=table, kappa=None))
    bad = [f for f in rep.failures if f[0].startswith("bang")]
    if bad:
        raise NotConstructible(f"unit interior fails {bad[0][0]} at {bad[0][1]}")
    return table


def with_modalities(m: FinBiclosedPoset) -> FinBiclosedPoset:
    """Attach whichever of the two operators can be constructed."""
    out = m if m.rres is not None else m.with_residuals()
    try:
        out = replace(out, kappa=center_kappa(out))
    except NotConstructible:
        pass
    try:
        out = replace(out, bang=unit_bang(out))
    except NotConstructible:
        pass
    return out


# ---------------------------------------------------------------------------
# Library


def trivial() -> FinBiclosedPoset:
    return FinBiclosedPoset(["*"], [[True]], [[0]], 0, [[0]], [[0]], [0], [0], "trivial")


def two() -> FinBiclosedPoset:
    m = FinBiclosedPoset(
        ["0", "1"], [[True, True], [False, True]], [[0, 0], [0, 1]], 1, label="two"
    )
    m = m.with_residuals()
    return replace(m, kappa=[0, 1], bang=[0, 1])


def _bit(i, j, k=2):
    return 1 << (i * k + j)


def rel_name(mask, k=2):
    pairs = [f"{i}{j}" for i in range(k) for j in range(k) if mask & _bit(i, j, k)]
    return "{" + ",".join(pairs) + "}"


def compose(r, s, k=2):
    out = 0
    for i in range(k):
        for j in range(k):
            if r & _bit(i, j, k):
                for l in range(k):
                    if s & _bit(j, l, k):
                        out |= _bit(i, l, k)
    return out


def converse(r, k=2):
    return sum(_bit(j, i, k) for i in range(k) for j in range(k) if r & _bit(i, j, k))


def rel_quantale(k: int = 2, modal: bool = True) -> FinBiclosedPoset:
    """All binary relations on a k-set under composition and inclusion."""
    if k > 2:
        raise ValueError("relation quantales above k=2 exceed the desk-scale cap")
    size = 1 << (k * k)
    leq = [[(a & ~b) == 0 for b in range(size)] for a in range(size)]
    op = [[compose(a, b, k) for b in range(size)] for a in range(size)]
    ident = sum(_bit(i, i, k) for i in range(k))
    m = FinBiclosedPoset([rel_name(a, k) for a in range(size)], leq, op, ident,
                         label=f"rel{k}").with_residuals()
    if modal:
        m = replace(m, kappa=center_kappa(m), bang=unit_bang(m), label=f"rel{k}+center")
    return m


def chain3() -> FinBiclosedPoset:
    """Three-element chain with min: a Heyting algebra that is not Boolean."""
    leq = [[a <= b for b in range(3)] for a in range(3)]
    op = [[min(a, b) for b in range(3)] for a in range(3)]
    m = FinBiclosedPoset(["0", "h", "1"], leq, op, 2, label="chain3").with_residuals()
    return with_modalities(m)


def library_models() -> list:
    return [trivial(), two(), chain3(), rel_quantale(2)]


BUILTINS = {
    "trivial": trivial,
    "two": two,
    "chain3": chain3,
    "rel2": lambda: rel_quantale(2),
    "rel2-plain": lambda: rel_quantale(2, modal=False),
}


# ---------------------------------------------------------------------------
# Enumeration

MAX_ENUM = 3


def _partial_orders(n):
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    for bits in itertools.product([False, True], repeat=len(pairs)):
        leq = [[a == b for b in range(n)] for a in range(n)]
        for (a, b), on in zip(pairs, bits):
            leq[a][b] = on
        ok = all(not (leq[a][b] and leq[b][a]) for a, b in pairs)
        ok = ok and all(
            not (leq[a][b] and leq[b][c]) or leq[a][c]
            for a in range(n) for b in range(n) for c in range(n)
        )
        if ok:
            yield leq


def _encode(m, perm):
    """Table encoding of ``m`` relabelled by ``perm`` (old -> new)."""
    n = m.n
    inv = [0] * n
    for old, new in enumerate(perm):
        inv[new] = old
    leq = tuple(m.leq[inv[a]][inv[b]] for a in range(n) for b in range(n))
    op = tuple(perm[m.op[inv[a]][inv[b]]] for a in range(n) for b in range(n))
    return (perm[m.unit], leq, op)


def canonical_code(m):
    return min(_encode(m, list(p)) for p in itertools.permutations(range(m.n)))


def isomorphic(m1, m2) -> bool:
    return m1.n == m2.n and canonical_code(m1) == canonical_code(m2)


def enumerate_biclosed(n: int):
    """All biclosed posets on ``n`` elements up to isomorphism (n <= 3).

    Yields models in the order of their canonical codes.
    """
    if not 1 <= n <= MAX_ENUM:
        raise ValueError(f"enumeration supports 1..{MAX_ENUM} elements")
    found = {}
    for leq in _partial_orders(n):
        for u in range(n):
            free = [(a, b) for a in range(n) for b in range(n) if a != u and b != u]
            for vals in itertools.product(range(n), repeat=len(free)):
                op = [[None] * n for _ in range(n)]
                for x in range(n):
                    op[u][x] = x
                    op[x][u] = x
                for (a, b), v in zip(free, vals):
                    op[a][b] = v
                m = FinBiclosedPoset([str(i) for i in range(n)], leq, op, u)
                if not validate(m, stop_early=True).ok:
                    continue
                code = canonical_code(m)
                if code not in found:
                    found[code] = m
    for i, code in enumerate(sorted(found)):
        unit, leq_flat, op_flat = code
        leq = [[leq_flat[a * n + b] for b in range(n)] for a in range(n)]
        op = [[op_flat[a * n + b] for b in range(n)] for a in range(n)]
        m = FinBiclosedPoset([str(k) for k in range(n)], leq, op, unit, label=f"enum{n}.{i}")
        yield m.with_residuals()


# ---------------------------------------------------------------------------
# Evaluation and countermodels


def eval_formula(m, v, a):
    if isinstance(a, Atom):
        return v[a.name]
    if isinstance(a, Unit):
        return m.unit
    if isinstance(a, Tensor):
        return m.op[eval_formula(m, v, a.left)][eval_formula(m, v, a.right)]
    if isinstance(a, RImp):
        return m.rres[eval_formula(m, v, a.arg)][eval_formula(m, v, a.res)]
    if isinstance(a, LImp):
        return m.lres[eval_formula(m, v, a.arg)][eval_formula(m, v, a.res)]
    if isinstance(a, Bang):
        if m.bang is None:
            raise MissingTable(f"{m.label} has no ! table")
        return m.bang[eval_formula(m, v, a.body)]
    if isinstance(a, Kappa):
        if m.kappa is None:
            raise MissingTable(f"{m.label} has no k table")
        return m.kappa[eval_formula(m, v, a.body)]
    raise TypeError(f"cannot evaluate {a!r}")


def eval_sequent(m: FinBiclosedPoset, v: dict, s: Sequent) -> bool:
    if m.rres is None:
        m = m.with_residuals()
    lhs = m.fold(eval_formula(m, v, a) for a in s.antecedent)
    return m.leq[lhs][eval_formula(m, v, s.succedent)]


def applicable(m, level: CalculusLevel) -> bool:
    """Can ``m`` interpret every rule of ``level`` soundly?"""
    if level.has_bang and m.bang is None:
        return False
    if level.has_kappa and m.kappa is None:
        return False
    rep = validate(m)
    if not rep.ok:
        return False
    if level.has_kappa and rep.warnings:
        return False
    return True


def valuations(m, atoms, sample=2000, seed=DEFAULT_SEED):
    """All valuations if there are at most ``sample`` of them, else a seeded sample."""
    total = m.n ** len(atoms)
    if total <= sample:
        for combo in itertools.product(range(m.n), repeat=len(atoms)):
            yield dict(zip(atoms, combo))
        return
    rng = random.Random(seed)
    for _ in range(sample):
        yield {a: rng.randrange(m.n) for a in atoms}


@dataclass
class Witness:
    model: FinBiclosedPoset
    valuation: dict

    def describe(self):
        vals = ", ".join(f"{a}={self.model.names[x]}" for a, x in self.valuation.items())
        return f"{self.model.label}: {vals}"


_CANDIDATES = None


def default_models() -> list:
    global _CANDIDATES
    if _CANDIDATES is None:
        out = library_models()
        for n in (2, 3):
            out.extend(with_modalities(m) for m in enumerate_biclosed(n))
        _CANDIDATES = out
    return list(_CANDIDATES)


def find_countermodel(s: Sequent, level: CalculusLevel = None, models=None,
                      sample: int = 2000, seed: int = DEFAULT_SEED):
    """First (model, valuation) falsifying ``s`` among models sound for ``level``."""
    level = level or sequent_level(s)
    atoms = sequent_atoms(s)
    for m in (models if models is not None else default_models()):
        if not applicable(m, level):
            continue
        for v in valuations(m, atoms, sample, seed):
            if not eval_sequent(m, v, s):
                return Witness(m, v)
    return None


# ---------------------------------------------------------------------------
# Model files


def dumps_model(m: FinBiclosedPoset) -> str:
    lines = [f"# {m.label}", "elements: " + " ".join(m.names), f"unit: {m.names[m.unit]}", "leq:"]
    lines += ["  " + " ".join("1" if x else "0" for x in row) for row in m.leq]
    lines.append("op:")
    lines += ["  " + " ".join(m.names[x] for x in row) for row in m.op]
    if m.kappa is not None:
        lines.append("kappa: " + " ".join(m.names[x] for x in m.kappa))
    if m.bang is not None:
        lines.append("bang: " + " ".join(m.names[x] for x in m.bang))
    return "\n".join(lines) + "\n"


def loads_model(text: str, label="file") -> FinBiclosedPoset:
    names = unit = kappa = bang = None
    leq, op = [], []
    section = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if not raw[:1].isspace() and ":" in line:
            key, _, rest = line.partition(":")
            key, rest = key.strip(), rest.split()
            section = None
            if key == "elements":
                names = rest
            elif key == "unit":
                unit = rest[0]
            elif key in ("leq", "op"):
                section = key
            elif key == "kappa":
                kappa = rest
            elif key == "bang":
                bang = rest
            elif key == "label":
                label = " ".join(rest)
            else:
                raise ValueError(f"unknown model key {key!r}")
            continue
        if section == "leq":
            leq.append([tok == "1" for tok in line.split()])
        elif section == "op":
            op.append(line.split())
        else:
            raise ValueError(f"stray line {raw!r}")
    if names is None or unit is None:
        raise ValueError("model needs 'elements' and 'unit'")
    idx = {nm: i for i, nm in enumerate(names)}
    try:
        m = FinBiclosedPoset(
            names, leq, [[idx[x] for x in row] for row in op], idx[unit],
            kappa=None if kappa is None else [idx[x] for x in kappa],
            bang=None if bang is None else [idx[x] for x in bang], label=label,
        )
    except KeyError as e:
        raise ValueError(f"unknown element {e.args[0]!r}") from None
    rep = validate(m)
    if not rep.ok:
        raise InvalidModel(rep)
    return m.with_residuals()


def load_model(spec: str) -> FinBiclosedPoset:
    """``builtin:NAME`` or a path to a model file."""
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        if name not in BUILTINS:
            raise ValueError(f"unknown builtin model {name!r}; choose from {sorted(BUILTINS)}")
        return BUILTINS[name]()
    with open(spec) as fh:
        return loads_model(fh.read(), label=spec)


__all__ = [
    "FinBiclosedPoset", "ValidationReport", "validate", "compute_residuals",
    "center_kappa", "unit_bang", "with_modalities", "trivial", "two", "chain3",
    "rel_quantale", "library_models", "enumerate_biclosed", "eval_sequent",
    "eval_formula", "find_countermodel", "Witness", "NoMaximum",
    "NotConstructible", "MissingTable", "InvalidModel", "loads_model",
    "dumps_model", "load_model", "isomorphic", "applicable", "valuations",
]
