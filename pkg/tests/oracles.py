"""Independent reference implementations used to cross-check the package.

These are deliberately naive: they share no code with the modules under
test beyond the AST dataclasses.
"""

import itertools
from functools import lru_cache

from lambekdial.syntax import Atom, LImp, RImp, Tensor, Unit


# ---------------------------------------------------------------------------
# Cut-free provability in L by exhaustive rule application


def _polarity(f, sign, acc):
    if isinstance(f, Atom):
        acc[f.name] = acc.get(f.name, 0) + sign
    elif isinstance(f, Tensor):
        _polarity(f.left, sign, acc)
        _polarity(f.right, sign, acc)
    elif isinstance(f, (RImp, LImp)):
        _polarity(f.arg, -sign, acc)
        _polarity(f.res, sign, acc)
    return acc


def count_ok(ante, succ) -> bool:
    """Atom count invariant: provable sequents balance every atom."""
    acc = _polarity(succ, 1, {})
    for f in ante:
        _polarity(f, -1, acc)
    return all(v == 0 for v in acc.values())


def naive_provable(ante: tuple, succ, prune=True) -> bool:
    """Cut-free provability by trying every rule instance and every split.
    ``prune`` skips sequents failing the count invariant."""
    if prune and not count_ok(ante, succ):
        return False
    return _search(ante, succ, prune)


@lru_cache(maxsize=None)
def _search(ante: tuple, succ, prune) -> bool:
    def naive_provable(x, y):
        return (not prune or count_ok(x, y)) and _search(x, y, prune)

    n = len(ante)
    if n == 1 and ante[0] == succ:
        return True
    # right rules
    if isinstance(succ, Unit) and n == 0:
        return True
    if isinstance(succ, Tensor):
        for i in range(n + 1):
            if naive_provable(ante[:i], succ.left) and naive_provable(ante[i:], succ.right):
                return True
    if isinstance(succ, RImp) and naive_provable((succ.arg,) + ante, succ.res):
        return True
    if isinstance(succ, LImp) and naive_provable(ante + (succ.arg,), succ.res):
        return True
    # left rules
    for p, f in enumerate(ante):
        pre, post = ante[:p], ante[p + 1:]
        if isinstance(f, Unit) and naive_provable(pre + post, succ):
            return True
        if isinstance(f, Tensor) and naive_provable(pre + (f.left, f.right) + post, succ):
            return True
        if isinstance(f, RImp):
            # Δ1, Γ, A\B, Δ2 with Γ ⊢ A taken from the left of the principal
            for s in range(p + 1):
                if naive_provable(ante[s:p], f.arg) and naive_provable(ante[:s] + (f.res,) + post, succ):
                    return True
        if isinstance(f, LImp):
            for s in range(p + 1, n + 1):
                if naive_provable(ante[p + 1:s], f.arg) and naive_provable(pre + (f.res,) + ante[s:], succ):
                    return True
    return False


def oracle_formulas(depth, atoms=("a", "b"), unit=True):
    """Every formula over the L connectives up to ``depth``."""
    level = [Atom(a) for a in atoms] + ([Unit()] if unit else [])
    seen = list(level)
    for _ in range(depth):
        new = []
        for x, y in itertools.product(seen, repeat=2):
            new += [Tensor(x, y), RImp(x, y), LImp(x, y)]
        seen = list(dict.fromkeys(seen + new))
    return seen


# ---------------------------------------------------------------------------
# Finite algebra


def brute_rres(leq, op):
    """Largest x with a*x <= b, or None when some maximum is missing."""
    n = len(leq)
    out = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            sols = [x for x in range(n) if leq[op[a][x]][b]]
            tops = [x for x in sols if all(leq[y][x] for y in sols)]
            if len(tops) != 1:
                return None
            out[a][b] = tops[0]
    return out


def brute_lres(leq, op):
    """Largest x with x*a <= b, or None."""
    n = len(leq)
    flipped = [[op[y][x] for y in range(n)] for x in range(n)]
    return brute_rres(leq, flipped)


def _orders(n):
    pairs = [(a, b) for a in range(n) for b in range(n) if a < b]
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        leq = [[int(a == b) for b in range(n)] for a in range(n)]
        for (a, b), c in zip(pairs, choice):
            if c == 1:
                leq[a][b] = 1
            elif c == 2:
                leq[b][a] = 1
        if all(not (leq[a][b] and leq[b][c]) or leq[a][c]
               for a in range(n) for b in range(n) for c in range(n)):
            yield leq


def _is_biclosed(leq, op, e):
    n = len(leq)
    r = range(n)
    if any(op[e][x] != x or op[x][e] != x for x in r):
        return False
    if any(op[op[a][b]][c] != op[a][op[b][c]] for a in r for b in r for c in r):
        return False
    for a, b, c in itertools.product(r, r, r):
        if leq[a][b] and not (leq[op[a][c]][op[b][c]] and leq[op[c][a]][op[c][b]]):
            return False
    return brute_rres(leq, op) is not None and brute_lres(leq, op) is not None


def _iso(m1, m2):
    (l1, o1, e1), (l2, o2, e2) = m1, m2
    n = len(l1)
    for p in itertools.permutations(range(n)):
        if p[e1] != e2:
            continue
        if all(l1[a][b] == l2[p[a]][p[b]] and p[o1[a][b]] == o2[p[a]][p[b]]
               for a in range(n) for b in range(n)):
            return True
    return False


def brute_biclosed(n):
    """Isomorphism classes of biclosed posets on n elements as (leq, op, unit)."""
    classes = []
    for leq in _orders(n):
        for e in range(n):
            free = [(a, b) for a in range(n) for b in range(n) if e not in (a, b)]
            for vals in itertools.product(range(n), repeat=len(free)):
                op = [[b if a == e else a for b in range(n)] for a in range(n)]
                for (a, b), v in zip(free, vals):
                    op[a][b] = v
                if not _is_biclosed(leq, op, e):
                    continue
                m = (leq, op, e)
                if not any(_iso(m, c) for c in classes):
                    classes.append(m)
    return classes


# ---------------------------------------------------------------------------
# Binary relations on {0, 1} as 2x2 boolean matrices


def rel_matrix(pairs):
    return tuple(tuple(int((i, j) in pairs) for j in range(2)) for i in range(2))


def rel_compose(r, s):
    """Relational composition r;s (first r, then s)."""
    return tuple(tuple(int(any(r[i][k] and s[k][j] for k in range(2))) for j in range(2))
                 for i in range(2))


def rel_residual(a, b):
    """Closed form of the right residual: not (a^T ; not b)."""
    at = tuple(tuple(a[j][i] for j in range(2)) for i in range(2))
    nb = tuple(tuple(1 - b[i][j] for j in range(2)) for i in range(2))
    c = rel_compose(at, nb)
    return tuple(tuple(1 - c[i][j] for j in range(2)) for i in range(2))


# ---------------------------------------------------------------------------
# Dialectica


def weak_adjoint(alpha, beta, f, F, leq):
    """First (u, y) with alpha(u, F y) not below beta(f u, y), else None."""
    for u in range(len(alpha)):
        for y in range(len(beta[0]) if beta else 0):
            if not leq[alpha[u][F[y]]][beta[f[u]][y]]:
                return (u, y)
    return None
