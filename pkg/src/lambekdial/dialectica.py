"""Finite dialectica Lambek spaces over a biclosed poset.

An object is ``(U, X, alpha)`` with ``alpha : U x X -> M``; a morphism
``(f, F) : (U, X, alpha) -> (V, Y, beta)`` has ``f : U -> V``, ``F : Y -> X``
and satisfies ``alpha(u, F y) <= beta(f u, y)``.  Carriers are lists of
hashable labels and every table is indexed by position, so function-space
carriers are tuples of indices.

The ``!`` object is truncated: ``bang_obj(A, k)`` only holds multisets of
size at most ``k``.  Arrows that merge multisets take a source with a large
enough bound (``d : !_{j+k} A -> !_j A (x) !_k A``), so they are total; the
inclusion ``!_j A -> !_k A`` (``j >= k``) relates different truncations.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache

from .algebra import FinBiclosedPoset

DEFAULT_CAP = 100_000


class SizeExceeded(ValueError):
    pass


class BoundExceeded(ValueError):
    def __init__(self, msg, node=None):
        super().__init__(msg if node is None else f"{msg} (at {node})")
        self.node = node


class MissingKappaTable(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


@dataclass(eq=False)
class DialObject:
    U: tuple
    X: tuple
    alpha: tuple  # alpha[u][x]
    host: FinBiclosedPoset
    shape: tuple = ("atom", "?")

    def __post_init__(self):
        self.U = tuple(self.U)
        self.X = tuple(self.X)
        self.alpha = tuple(tuple(r) for r in self.alpha)
        if len(self.alpha) != len(self.U) or any(len(r) != len(self.X) for r in self.alpha):
            raise ShapeMismatch("alpha must be total on U x X")
        self._key = (self.U, self.X, self.alpha)
        self._uidx = None
        self._xidx = None

    def __eq__(self, other):
        return isinstance(other, DialObject) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @property
    def nU(self):
        return len(self.U)

    @property
    def nX(self):
        return len(self.X)

    def u_index(self, label):
        if self._uidx is None:
            self._uidx = {l: i for i, l in enumerate(self.U)}
        return self._uidx[label]

    def x_index(self, label):
        if self._xidx is None:
            self._xidx = {l: i for i, l in enumerate(self.X)}
        return self._xidx[label]

    def describe(self):
        m = self.host
        rows = [" ".join(m.names[a] for a in row) for row in self.alpha]
        return f"U={self.nU} X={self.nX}\n" + "\n".join(rows)

    def __repr__(self):
        return f"<DialObject {self.shape[0]} |U|={self.nU} |X|={self.nX}>"


@dataclass(eq=False)
class DialMorphism:
    src: DialObject
    tgt: DialObject
    f: tuple  # U_src -> U_tgt
    F: tuple  # X_tgt -> X_src

    def __post_init__(self):
        self.f = tuple(self.f)
        self.F = tuple(self.F)
        if len(self.f) != self.src.nU or len(self.F) != self.tgt.nX:
            raise ShapeMismatch("morphism tables do not fit the carriers")

    def __eq__(self, other):
        return (isinstance(other, DialMorphism) and self.src == other.src
                and self.tgt == other.tgt and self.f == other.f and self.F == other.F)

    def __hash__(self):
        return hash((self.f, self.F))

    def __repr__(self):
        return f"<DialMorphism {self.src!r} -> {self.tgt!r}>"


def _same_host(*objs):
    h = objs[0].host
    for o in objs[1:]:
        if o.host is not h and o.host.op != h.op:
            raise ShapeMismatch("objects live over different hosts")
    return h


def make_object(host, alpha, name="A", U=None, X=None):
    """Object with carriers ``0..n-1`` unless labels are given."""
    alpha = [list(r) for r in alpha]
    U = tuple(range(len(alpha))) if U is None else U
    X = tuple(range(len(alpha[0]) if alpha else 0)) if X is None else X
    return DialObject(U, X, alpha, host, ("atom", name))


def unit_obj(host):
    return DialObject((0,), (0,), ((host.unit,),), host, ("unit",))


def check_morphism(src, tgt, f, F):
    """``(True, None)`` or ``(False, (u, y))`` for the first failing pair."""
    if len(f) != src.nU or len(F) != tgt.nX:
        raise ShapeMismatch("morphism tables do not fit the carriers")
    le = src.host.leq
    a, b = src.alpha, tgt.alpha
    for u in range(src.nU):
        fu = f[u]
        for y in range(tgt.nX):
            if not le[a[u][F[y]]][b[fu][y]]:
                return False, (u, y)
    return True, None


def is_morphism(m, *args):
    if args:
        return check_morphism(m, *args)
    return check_morphism(m.src, m.tgt, m.f, m.F)


def identity(a):
    return DialMorphism(a, a, range(a.nU), range(a.nX))


def compose(g, f):
    """``g . f`` (first ``f``)."""
    if f.tgt != g.src:
        raise ShapeMismatch("composing morphisms whose objects do not meet")
    return DialMorphism(f.src, g.tgt, [g.f[x] for x in f.f], [f.F[y] for y in g.F])


def compose_all(*ms):
    """``compose_all(h, g, f) = h . g . f``."""
    out = ms[-1]
    for m in reversed(ms[:-1]):
        out = compose(m, out)
    return out


def hom_set(src, tgt, limit=DEFAULT_CAP):
    """Every morphism ``src -> tgt`` (exhaustive; guarded by ``limit``)."""
    n = _size((tgt.nU, src.nU), (src.nX, tgt.nX), cap=limit)
    if n > limit:
        raise SizeExceeded(f"hom-set search space {n} above {limit}")
    fs = list(itertools.product(range(tgt.nU), repeat=src.nU))
    out = []
    for F in itertools.product(range(src.nX), repeat=tgt.nX):
        for f in fs:
            if check_morphism(src, tgt, f, F)[0]:
                out.append(DialMorphism(src, tgt, f, F))
    return out


def _funcs(dom, cod):
    return list(itertools.product(range(cod), repeat=dom))


def _size(*factors, cap=DEFAULT_CAP):
    """Product of ``base ** exp`` factors, saturating just above ``cap``."""
    n = 1
    for base, exp in factors:
        for _ in range(exp):
            n *= base
            if n > cap:
                return cap + 1
    return n


def _guard(n, cap, what):
    if n > cap:
        raise SizeExceeded(f"{what} carrier exceeds cap {cap}")


# ---------------------------------------------------------------------------
# Tensor and unit


def tensor_obj(a, b, cap=DEFAULT_CAP):
    host = _same_host(a, b)
    _guard(_size((a.nX, b.nU), (b.nX, a.nU), cap=cap), cap, "tensor")
    op = host.op
    U = tuple((u, v) for u in range(a.nU) for v in range(b.nU))
    fs = _funcs(b.nU, a.nX)
    gs = _funcs(a.nU, b.nX)
    X = tuple((f, g) for f in fs for g in gs)
    alpha = [[op[a.alpha[u][f[v]]][b.alpha[v][g[u]]] for (f, g) in X] for (u, v) in U]
    return DialObject(U, X, alpha, host, ("tensor", a, b))


def _parts(t, kind="tensor"):
    if t.shape[0] != kind:
        raise ShapeMismatch(f"expected a {kind} object, got {t.shape[0]}")
    return t.shape[1], t.shape[2]


def tensor_mor(m1, m2, cap=DEFAULT_CAP):
    """``m1 (x) m2 : A (x) B -> C (x) D``."""
    src = tensor_obj(m1.src, m2.src, cap)
    tgt = tensor_obj(m1.tgt, m2.tgt, cap)
    nB, nD = m2.src.nU, m2.tgt.nU
    f = [m1.f[u] * nD + m2.f[v] for u in range(m1.src.nU) for v in range(nB)]
    F = []
    for (h, k) in tgt.X:
        ff = tuple(m1.F[h[m2.f[v]]] for v in range(nB))
        gg = tuple(m2.F[k[m1.f[u]]] for u in range(m1.src.nU))
        F.append(src.x_index((ff, gg)))
    return DialMorphism(src, tgt, f, F)


def left_unitor(a, cap=DEFAULT_CAP):
    """``I (x) A -> A``."""
    ia = tensor_obj(unit_obj(a.host), a, cap)
    F = [ia.x_index(((0,) * a.nU, (x,))) for x in range(a.nX)]
    return DialMorphism(ia, a, range(a.nU), F)


def left_unitor_inv(a, cap=DEFAULT_CAP):
    ia = tensor_obj(unit_obj(a.host), a, cap)
    return DialMorphism(a, ia, range(a.nU), [g[0] for (_, g) in ia.X])


def right_unitor(a, cap=DEFAULT_CAP):
    """``A (x) I -> A``."""
    ai = tensor_obj(a, unit_obj(a.host), cap)
    F = [ai.x_index(((x,), (0,) * a.nU)) for x in range(a.nX)]
    return DialMorphism(ai, a, range(a.nU), F)


def right_unitor_inv(a, cap=DEFAULT_CAP):
    ai = tensor_obj(a, unit_obj(a.host), cap)
    return DialMorphism(a, ai, range(a.nU), [f[0] for (f, _) in ai.X])


def associator(a, b, c, cap=DEFAULT_CAP):
    """``(A (x) B) (x) C -> A (x) (B (x) C)``, written out by hand."""
    ab = tensor_obj(a, b, cap)
    bc = tensor_obj(b, c, cap)
    src = tensor_obj(ab, c, cap)
    tgt = tensor_obj(a, bc, cap)
    f = []
    for (uv, w) in src.U:
        u, v = ab.U[uv]
        f.append(tgt.u_index((u, bc.u_index((v, w)))))
    F = []
    for (H, K) in tgt.X:
        # H : U_bc -> X_a ; K : U_a -> X_bc with X_bc = (W -> Y_b) x (V -> Z_c)
        Fm = tuple(
            ab.x_index((
                tuple(H[bc.u_index((v, w))] for v in range(b.nU)),
                tuple(bc.X[K[u]][0][w] for u in range(a.nU)),
            ))
            for w in range(c.nU)
        )
        G = tuple(bc.X[K[u]][1][v] for (u, v) in ab.U)
        F.append(src.x_index((Fm, G)))
    return DialMorphism(src, tgt, f, F)


# ---------------------------------------------------------------------------
# Structural isomorphisms between bracketings


def leaves(t):
    """Non-unit factors of a nested tensor, left to right."""
    if t.shape[0] == "unit":
        return []
    if t.shape[0] == "tensor":
        return leaves(t.shape[1]) + leaves(t.shape[2])
    return [t]


def _decode_u(t, u):
    k = t.shape[0]
    if k == "unit":
        return ()
    if k == "tensor":
        a, b = t.shape[1], t.shape[2]
        i, j = t.U[u]
        return _decode_u(a, i) + _decode_u(b, j)
    return (u,)


def _encode_u(t, us):
    k = t.shape[0]
    if k == "unit":
        return 0
    if k == "tensor":
        a, b = t.shape[1], t.shape[2]
        na = len(leaves(a))
        return t.u_index((_encode_u(a, us[:na]), _encode_u(b, us[na:])))
    return us[0]


def _leaf_x(t, x, i, us):
    """X-component of leaf ``i`` selected by ``x`` when the other leaves
    sit at ``us`` (``us[i]`` is ignored)."""
    k = t.shape[0]
    if k == "tensor":
        a, b = t.shape[1], t.shape[2]
        na = len(leaves(a))
        f, g = t.X[x]
        if i < na:
            return _leaf_x(a, f[_encode_u(b, us[na:])], i, us[:na])
        return _leaf_x(b, g[_encode_u(a, us[:na])], i - na, us[na:])
    return x


def _encode_x(t, fns, pre=(), post=()):
    """Inverse of ``_leaf_x``: ``fns[i](us)`` gives leaf ``i``'s component."""
    k = t.shape[0]
    if k == "unit":
        return 0
    if k == "tensor":
        a, b = t.shape[1], t.shape[2]
        la, lb = leaves(a), leaves(b)
        na = len(la)
        f = []
        for v in range(b.nU):
            vs = _decode_u(b, v)
            f.append(_encode_x(a, fns[:na], pre, vs + post))
        g = []
        for u in range(a.nU):
            us = _decode_u(a, u)
            g.append(_encode_x(b, fns[na:], pre + us, post))
        return t.x_index((tuple(f), tuple(g)))
    fn = fns[0]
    return fn(pre + (0,) + post)


def structural_iso(s, t):
    """The unique rebracketing ``s -> t``; both must have the same factors."""
    ls, lt = leaves(s), leaves(t)
    if ls != lt:
        raise ShapeMismatch("bracketings have different factors")
    n = len(ls)
    f = [_encode_u(t, _decode_u(s, u)) for u in range(s.nU)]
    F = []
    for y in range(t.nX):
        fns = [
            (lambda us, i=i: _leaf_x(t, y, i, us)) for i in range(n)
        ]
        F.append(_encode_x(s, fns))
    return DialMorphism(s, t, f, F)


def fold_objects(objs, host, cap=DEFAULT_CAP):
    """Left-nested tensor of ``objs`` (``I`` when empty)."""
    if not objs:
        return unit_obj(host)
    out = objs[0]
    for o in objs[1:]:
        out = tensor_obj(out, o, cap)
    return out


# ---------------------------------------------------------------------------
# Internal homs


def hom_r(a, c, cap=DEFAULT_CAP):
    """``A \\ C``: maps that consume an ``A`` on the left."""
    host = _same_host(a, c)
    _guard(_size((c.nU, a.nU), (a.nX, c.nX), cap=cap), cap, "hom")
    U = tuple((k1, k2) for k1 in _funcs(a.nU, c.nU) for k2 in _funcs(c.nX, a.nX))
    X = tuple((u, z) for u in range(a.nU) for z in range(c.nX))
    rr = host.rres
    alpha = [[rr[a.alpha[u][k2[z]]][c.alpha[k1[u]][z]] for (u, z) in X] for (k1, k2) in U]
    return DialObject(U, X, alpha, host, ("hom_r", a, c))


def hom_l(c, b, cap=DEFAULT_CAP):
    """``C / B``: maps that consume a ``B`` on the right."""
    host = _same_host(c, b)
    _guard(_size((c.nU, b.nU), (b.nX, c.nX), cap=cap), cap, "hom")
    U = tuple((k1, k2) for k1 in _funcs(b.nU, c.nU) for k2 in _funcs(c.nX, b.nX))
    X = tuple((v, z) for v in range(b.nU) for z in range(c.nX))
    lr = host.lres
    alpha = [[lr[b.alpha[v][k2[z]]][c.alpha[k1[v]][z]] for (v, z) in X] for (k1, k2) in U]
    return DialObject(U, X, alpha, host, ("hom_l", c, b))


def curry_r(m, cap=DEFAULT_CAP):
    """``A (x) B -> C`` to ``B -> A \\ C``."""
    a, b = _parts(m.src)
    c = m.tgt
    h = hom_r(a, c, cap)
    f = []
    for v in range(b.nU):
        k1 = tuple(m.f[m.src.u_index((u, v))] for u in range(a.nU))
        k2 = tuple(m.src.X[m.F[z]][0][v] for z in range(c.nX))
        f.append(h.u_index((k1, k2)))
    F = [m.src.X[m.F[z]][1][u] for (u, z) in h.X]
    return DialMorphism(b, h, f, F)


def uncurry_r(n, cap=DEFAULT_CAP):
    """``B -> A \\ C`` to ``A (x) B -> C``."""
    b = n.src
    a, c = _parts(n.tgt, "hom_r")
    src = tensor_obj(a, b, cap)
    f = [n.tgt.U[n.f[v]][0][u] for (u, v) in src.U]
    F = []
    for z in range(c.nX):
        ff = tuple(n.tgt.U[n.f[v]][1][z] for v in range(b.nU))
        gg = tuple(n.F[n.tgt.x_index((u, z))] for u in range(a.nU))
        F.append(src.x_index((ff, gg)))
    return DialMorphism(src, c, f, F)


def curry_l(m, cap=DEFAULT_CAP):
    """``A (x) B -> C`` to ``A -> C / B``."""
    a, b = _parts(m.src)
    c = m.tgt
    h = hom_l(c, b, cap)
    f = []
    for u in range(a.nU):
        k1 = tuple(m.f[m.src.u_index((u, v))] for v in range(b.nU))
        k2 = tuple(m.src.X[m.F[z]][1][u] for z in range(c.nX))
        f.append(h.u_index((k1, k2)))
    F = [m.src.X[m.F[z]][0][v] for (v, z) in h.X]
    return DialMorphism(a, h, f, F)


def uncurry_l(n, cap=DEFAULT_CAP):
    """``A -> C / B`` to ``A (x) B -> C``."""
    a = n.src
    c, b = _parts(n.tgt, "hom_l")
    src = tensor_obj(a, b, cap)
    f = [n.tgt.U[n.f[u]][0][v] for (u, v) in src.U]
    F = []
    for z in range(c.nX):
        ff = tuple(n.F[n.tgt.x_index((v, z))] for v in range(b.nU))
        gg = tuple(n.tgt.U[n.f[u]][1][z] for u in range(a.nU))
        F.append(src.x_index((ff, gg)))
    return DialMorphism(src, c, f, F)


def eval_r(a, c, cap=DEFAULT_CAP):
    """``A (x) (A \\ C) -> C``."""
    return uncurry_r(identity(hom_r(a, c, cap)), cap)


def eval_l(c, b, cap=DEFAULT_CAP):
    """``(C / B) (x) B -> C``."""
    return uncurry_l(identity(hom_l(c, b, cap)), cap)


def hom_r_mor(p, q, cap=DEFAULT_CAP):
    """``p : A' -> A``, ``q : C -> C'`` give ``A \\ C -> A' \\ C'``."""
    src = hom_r(p.tgt, q.src, cap)
    tgt = hom_r(p.src, q.tgt, cap)
    f = []
    for (k1, k2) in src.U:
        n1 = tuple(q.f[k1[p.f[u]]] for u in range(p.src.nU))
        n2 = tuple(p.F[k2[q.F[z]]] for z in range(q.tgt.nX))
        f.append(tgt.u_index((n1, n2)))
    F = [src.x_index((p.f[u], q.F[z])) for (u, z) in tgt.X]
    return DialMorphism(src, tgt, f, F)


def hom_l_mor(q, p, cap=DEFAULT_CAP):
    """``q : C -> C'``, ``p : B' -> B`` give ``C / B -> C' / B'``."""
    src = hom_l(q.src, p.tgt, cap)
    tgt = hom_l(q.tgt, p.src, cap)
    f = []
    for (k1, k2) in src.U:
        n1 = tuple(q.f[k1[p.f[v]]] for v in range(p.src.nU))
        n2 = tuple(p.F[k2[q.F[z]]] for z in range(q.tgt.nX))
        f.append(tgt.u_index((n1, n2)))
    F = [src.x_index((p.f[v], q.F[z])) for (v, z) in tgt.X]
    return DialMorphism(src, tgt, f, F)


# ---------------------------------------------------------------------------
# The exchange modality


def kappa_obj(a):
    k = a.host.kappa
    if k is None:
        raise MissingKappaTable(f"{a.host.label} has no k table")
    alpha = [[k[x] for x in row] for row in a.alpha]
    return DialObject(a.U, a.X, alpha, a.host, ("kappa", a))


def kappa_mor(m):
    return DialMorphism(kappa_obj(m.src), kappa_obj(m.tgt), m.f, m.F)


def eps_kappa(a):
    """``k A -> A``."""
    return DialMorphism(kappa_obj(a), a, range(a.nU), range(a.nX))


def delta_kappa(a):
    """``k A -> k k A``."""
    ka = kappa_obj(a)
    return DialMorphism(ka, kappa_obj(ka), range(a.nU), range(a.nX))


def kappa_promote(m):
    """Reuse the tables of ``m : (x) k G_i -> A`` as a map into ``k A``."""
    return DialMorphism(m.src, kappa_obj(m.tgt), m.f, m.F)


def _swap(a, b, src, tgt):
    """Tables of the symmetry ``a (x) b -> b (x) a`` between given objects."""
    f = [tgt.u_index((v, u)) for (u, v) in src.U]
    F = [src.x_index((g, f_)) for (f_, g) in tgt.X]
    return DialMorphism(src, tgt, f, F)


def beta_l(a, b, cap=DEFAULT_CAP):
    """``k A (x) B -> B (x) k A``."""
    ka = kappa_obj(a)
    return _swap(ka, b, tensor_obj(ka, b, cap), tensor_obj(b, ka, cap))


def beta_r(a, b, cap=DEFAULT_CAP):
    """``A (x) k B -> k B (x) A``."""
    kb = kappa_obj(b)
    return _swap(a, kb, tensor_obj(a, kb, cap), tensor_obj(kb, a, cap))


# ---------------------------------------------------------------------------
# The of-course modality, truncated


@lru_cache(maxsize=None)
def multisets(n, k):
    """Sorted tuples over ``range(n)`` of length at most ``k``."""
    out = []
    for size in range(k + 1):
        out.extend(itertools.combinations_with_replacement(range(n), size))
    return tuple(out)


def bang_obj(a, k, cap=DEFAULT_CAP):
    """``!_k A``: the multiset product is taken in the order of ``X``."""
    if k < 0:
        raise ValueError("bound must be non-negative")
    ms = multisets(a.nX, k)
    _guard(_size((len(ms), a.nU), cap=cap), cap, "bang")
    host = a.host
    X = tuple(itertools.product(ms, repeat=a.nU))
    alpha = []
    for u in range(a.nU):
        row = []
        for h in X:
            acc = host.unit
            for x in h[u]:
                acc = host.op[acc][a.alpha[u][x]]
            row.append(acc)
        alpha.append(row)
    return DialObject(a.U, X, alpha, host, ("bang", k, a))


def bang_parts(t):
    if t.shape[0] != "bang":
        raise ShapeMismatch("expected a ! object")
    return t.shape[2], t.shape[1]


def bang_mor(m, k, cap=DEFAULT_CAP):
    """``!_k m : !_k A -> !_k B``."""
    src = bang_obj(m.src, k, cap)
    tgt = bang_obj(m.tgt, k, cap)
    F = []
    for h in tgt.X:
        g = tuple(tuple(sorted(m.F[y] for y in h[m.f[u]])) for u in range(m.src.nU))
        F.append(src.x_index(g))
    return DialMorphism(src, tgt, m.f, F)


def bang_incl(a, j, k, cap=DEFAULT_CAP):
    """``!_j A -> !_k A`` for ``j >= k``: forget that fewer copies were asked for."""
    if j < k:
        raise BoundExceeded(f"no inclusion from bound {j} into bound {k}")
    src, tgt = bang_obj(a, j, cap), bang_obj(a, k, cap)
    return DialMorphism(src, tgt, range(a.nU), [src.x_index(h) for h in tgt.X])


def eps_bang(a, k=1, cap=DEFAULT_CAP):
    """``!_k A -> A`` (dereliction), ``k >= 1``."""
    if k < 1:
        raise BoundExceeded("dereliction needs bound at least 1")
    src = bang_obj(a, k, cap)
    return DialMorphism(src, a, range(a.nU), [src.x_index(((x,),) * a.nU) for x in range(a.nX)])


def e_arrow(a, k=0, cap=DEFAULT_CAP):
    """``!_k A -> I`` (weakening)."""
    src = bang_obj(a, k, cap)
    return DialMorphism(src, unit_obj(a.host), [0] * a.nU, [src.x_index(((),) * a.nU)])


def d_arrow(a, j, k, cap=DEFAULT_CAP):
    """``!_{j+k} A -> !_j A (x) !_k A`` (contraction)."""
    src = bang_obj(a, j + k, cap)
    left, right = bang_obj(a, j, cap), bang_obj(a, k, cap)
    tgt = tensor_obj(left, right, cap)
    n = a.nU
    f = [u * n + u for u in range(n)]
    F = []
    for (g1, g2) in tgt.X:
        h = tuple(tuple(sorted(left.X[g1[u]][u] + right.X[g2[u]][u])) for u in range(n))
        F.append(src.x_index(h))
    return DialMorphism(src, tgt, f, F)


def delta_bang(a, outer, inner, cap=DEFAULT_CAP):
    """``!_{outer*inner} A -> !_outer !_inner A`` (digging)."""
    src = bang_obj(a, outer * inner, cap)
    mid = bang_obj(a, inner, cap)
    tgt = bang_obj(mid, outer, cap)
    F = []
    for h in tgt.X:
        flat = tuple(
            tuple(sorted(x for g in h[u] for x in mid.X[g][u])) for u in range(a.nU)
        )
        F.append(src.x_index(flat))
    return DialMorphism(src, tgt, range(a.nU), F)


def bang_promote(m, k, cap=DEFAULT_CAP):
    """From ``m : (x)_i !_{n_i} G_i -> A`` build ``(x)_i !_{k n_i} G_i -> !_k A``.

    Each leaf of the source must be a ``!`` object.
    """
    src_leaves = leaves(m.src)
    raised = []
    for lf in src_leaves:
        g, n = bang_parts(lf)
        raised.append(bang_obj(g, k * n, cap))
    src = _rebuild(m.src, raised, cap)
    tgt = bang_obj(m.tgt, k, cap)
    nl = len(src_leaves)
    F = []
    for h in tgt.X:
        fns = []
        for i in range(nl):
            lf_old, lf_new = src_leaves[i], raised[i]

            def fn(us, i=i, lf_old=lf_old, lf_new=lf_new, h=h):
                comp = []
                for w in range(lf_old.nU):
                    full = us[:i] + (w,) + us[i + 1:]
                    u_src = _encode_u(m.src, full)
                    got = []
                    for x in h[m.f[u_src]]:
                        xi = _leaf_x(m.src, m.F[x], i, full)
                        got.extend(lf_old.X[xi][w])
                    comp.append(tuple(sorted(got)))
                return lf_new.x_index(tuple(comp))

            fns.append(fn)
        F.append(_encode_x(src, fns))
    return DialMorphism(src, tgt, m.f, F)


def _rebuild(t, new_leaves, cap=DEFAULT_CAP):
    """``t`` with its factors replaced, keeping the bracketing."""
    it = iter(new_leaves)

    def go(s):
        k = s.shape[0]
        if k == "unit":
            return s
        if k == "tensor":
            left = go(s.shape[1])
            return tensor_obj(left, go(s.shape[2]), cap)
        return next(it)

    return go(t)


def comonad_arrows(a, b=None, k=2, cap=DEFAULT_CAP):
    """Every structural arrow at bound ``k`` that the host supports."""
    b = a if b is None else b
    out = {}
    out["eps_bang"] = eps_bang(a, k, cap)
    out["delta_bang"] = delta_bang(a, k, k, cap)
    out["e_arrow"] = e_arrow(a, k, cap)
    out["d_arrow"] = d_arrow(a, k, k, cap)
    if a.host.kappa is not None:
        out["eps_kappa"] = eps_kappa(a)
        out["delta_kappa"] = delta_kappa(a)
        out["beta_l"] = beta_l(a, b, cap)
        out["beta_r"] = beta_r(b, a, cap)
    return out


# ---------------------------------------------------------------------------
# Interpreting derivations
#
# Each formula occurrence is read at a "bounded formula": the formula tree
# with a bound on every ! node.  A node of the derivation returns the bounded
# formulas its antecedent needs and the one its succedent provides; where two
# readings of one formula must meet (cut, contraction) a coercion built from
# inclusions bridges them.


def default_bf(a, k):
    from .syntax import Atom, Bang, Kappa, LImp, RImp, Tensor, Unit

    if isinstance(a, Atom):
        return ("atom", a.name)
    if isinstance(a, Unit):
        return ("unit",)
    if isinstance(a, Tensor):
        return ("tensor", default_bf(a.left, k), default_bf(a.right, k))
    if isinstance(a, RImp):
        return ("rimp", default_bf(a.arg, k), default_bf(a.res, k))
    if isinstance(a, LImp):
        return ("limp", default_bf(a.res, k), default_bf(a.arg, k))
    if isinstance(a, Bang):
        return ("bang", k, default_bf(a.body, k))
    if isinstance(a, Kappa):
        return ("kappa", default_bf(a.body, k))
    raise TypeError(f"no dialectica reading for {a!r}")


def join_bf(b1, b2, positive=True):
    """A reading that coerces into both ``b1`` and ``b2``."""
    if b1 == b2:
        return b1
    tag = b1[0]
    if tag == "tensor":
        return ("tensor", join_bf(b1[1], b2[1], positive), join_bf(b1[2], b2[2], positive))
    if tag == "rimp":
        return ("rimp", join_bf(b1[1], b2[1], not positive), join_bf(b1[2], b2[2], positive))
    if tag == "limp":
        return ("limp", join_bf(b1[1], b2[1], positive), join_bf(b1[2], b2[2], not positive))
    if tag == "kappa":
        return ("kappa", join_bf(b1[1], b2[1], positive))
    if tag == "bang":
        k = max(b1[1], b2[1]) if positive else min(b1[1], b2[1])
        return ("bang", k, join_bf(b1[2], b2[2], positive))
    return b1


class Interpreter:
    def __init__(self, atom_map, host, k=2, cap=DEFAULT_CAP):
        self.atom_map = atom_map
        self.host = host
        self.k = k
        self.cap = cap
        self._objs = {}

    def obj(self, bf):
        if bf in self._objs:
            return self._objs[bf]
        tag = bf[0]
        if tag == "atom":
            o = self.atom_map[bf[1]]
        elif tag == "unit":
            o = unit_obj(self.host)
        elif tag == "tensor":
            o = tensor_obj(self.obj(bf[1]), self.obj(bf[2]), self.cap)
        elif tag == "rimp":
            o = hom_r(self.obj(bf[1]), self.obj(bf[2]), self.cap)
        elif tag == "limp":
            o = hom_l(self.obj(bf[1]), self.obj(bf[2]), self.cap)
        elif tag == "kappa":
            o = kappa_obj(self.obj(bf[1]))
        elif tag == "bang":
            o = bang_obj(self.obj(bf[2]), bf[1], self.cap)
        else:
            raise ValueError(f"bad reading {bf!r}")
        self._objs[bf] = o
        return o

    def ctx(self, bfs):
        return fold_objects([self.obj(b) for b in bfs], self.host, self.cap)

    def coerce(self, src, tgt):
        """Morphism from reading ``src`` to reading ``tgt`` of one formula."""
        if src == tgt:
            return identity(self.obj(src))
        tag = src[0]
        if tag == "tensor":
            return tensor_mor(self.coerce(src[1], tgt[1]), self.coerce(src[2], tgt[2]), self.cap)
        if tag == "rimp":
            return hom_r_mor(self.coerce(tgt[1], src[1]), self.coerce(src[2], tgt[2]), self.cap)
        if tag == "limp":
            return hom_l_mor(self.coerce(src[1], tgt[1]), self.coerce(tgt[2], src[2]), self.cap)
        if tag == "kappa":
            return kappa_mor(self.coerce(src[1], tgt[1]))
        if tag == "bang":
            j, k = src[1], tgt[1]
            if j < k:
                raise BoundExceeded(f"needs !-bound {k} but only {j} is available")
            inner = self.coerce(src[2], tgt[2])
            return compose(bang_mor(inner, k, self.cap), bang_incl(self.obj(src[2]), j, k, self.cap))
        raise ShapeMismatch(f"cannot coerce {src!r} to {tgt!r}")

    def frame(self, pre, mid, post, concl, prem):
        """``concl -> (pre (x) mid.src) (x) post -> ... mid.tgt ... -> prem``."""
        p, q = self.ctx(pre), self.ctx(post)
        t_src = tensor_obj(tensor_obj(p, mid.src, self.cap), q, self.cap)
        t_tgt = tensor_obj(tensor_obj(p, mid.tgt, self.cap), q, self.cap)
        body = tensor_mor(tensor_mor(identity(p), mid, self.cap), identity(q), self.cap)
        return compose_all(structural_iso(t_tgt, prem), body, structural_iso(concl, t_src))

    def run(self, d, hint=None, path=()):
        from .sequent import Rule

        try:
            return self._run(d, hint, path, Rule)
        except (BoundExceeded, SizeExceeded) as e:
            if getattr(e, "_located", False):
                raise
            where = "/".join(map(str, path)) or "root"
            err = type(e)(f"{e} [node {where}: {d.rule.value}]")
            err._located = True
            raise err from None

    def _run(self, d, hint, path, Rule):
        r = d.rule
        seq = d.conclusion
        prem = d.premises
        p = d.principal
        sub = lambda i, h=None: self.run(prem[i], h, path + (i,))  # noqa: E731

        if r is Rule.Ax:
            bf = hint if hint is not None else default_bf(seq.succedent, self.k)
            return identity(self.obj(bf)), [bf], bf
        if r is Rule.Ur:
            return identity(unit_obj(self.host)), [], ("unit",)
        if r is Rule.Ul:
            m, a, s = sub(0, hint)
            ants = a[:p] + [("unit",)] + a[p:]
            return compose(m, structural_iso(self.ctx(ants), self.ctx(a))), ants, s
        if r is Rule.Tl:
            m, a, s = sub(0, hint)
            ants = a[:p] + [("tensor", a[p], a[p + 1])] + a[p + 2:]
            return compose(m, structural_iso(self.ctx(ants), self.ctx(a))), ants, s
        if r is Rule.Tr:
            h1 = h2 = None
            if hint is not None and hint[0] == "tensor":
                h1, h2 = hint[1], hint[2]
            m1, a1, s1 = sub(0, h1)
            m2, a2, s2 = sub(1, h2)
            ants = a1 + a2
            split = tensor_obj(self.ctx(a1), self.ctx(a2), self.cap)
            m = compose(tensor_mor(m1, m2, self.cap), structural_iso(self.ctx(ants), split))
            return m, ants, ("tensor", s1, s2)
        if r is Rule.IRr:
            m, a, sb = sub(0, hint[2] if hint is not None and hint[0] == "rimp" else None)
            rest = a[1:]
            shaped = tensor_obj(self.obj(a[0]), self.ctx(rest), self.cap)
            m2 = compose(m, structural_iso(shaped, self.ctx(a)))
            return curry_r(m2, self.cap), rest, ("rimp", a[0], sb)
        if r is Rule.IRl:
            m, a, sb = sub(0, hint[1] if hint is not None and hint[0] == "limp" else None)
            rest = a[:-1]
            shaped = tensor_obj(self.ctx(rest), self.obj(a[-1]), self.cap)
            m2 = compose(m, structural_iso(shaped, self.ctx(a)))
            return curry_l(m2, self.cap), rest, ("limp", sb, a[-1])
        if r is Rule.ILr:
            s = d.splits[0]
            m2, a2, sc = sub(1, hint)
            m1, a1, sa = sub(0)
            imp = ("rimp", sa, a2[s])
            ants = a2[:s] + a1 + [imp] + a2[s + 1:]
            mid = compose(eval_r(self.obj(sa), self.obj(a2[s]), self.cap),
                          tensor_mor(m1, identity(self.obj(imp)), self.cap))
            fr = self.frame(a2[:s], mid, a2[s + 1:], self.ctx(ants), self.ctx(a2))
            return compose(m2, fr), ants, sc
        if r is Rule.ILl:
            s = d.splits[0]
            m2, a2, sc = sub(1, hint)
            m1, a1, sa = sub(0)
            imp = ("limp", a2[p], sa)
            ants = a2[:p] + [imp] + a1 + a2[p + 1:]
            mid = compose(eval_l(self.obj(a2[p]), self.obj(sa), self.cap),
                          tensor_mor(identity(self.obj(imp)), m1, self.cap))
            fr = self.frame(a2[:p], mid, a2[p + 1:], self.ctx(ants), self.ctx(a2))
            return compose(m2, fr), ants, sc
        if r is Rule.Cut:
            i, _ = d.splits
            m2, a2, sc = sub(1, hint)
            m1, a1, sa = sub(0, a2[i])
            mid = compose(self.coerce(sa, a2[i]), m1)
            ants = a2[:i] + a1 + a2[i + 1:]
            fr = self.frame(a2[:i], mid, a2[i + 1:], self.ctx(ants), self.ctx(a2))
            return compose(m2, fr), ants, sc
        if r is Rule.C:
            m, a, s = sub(0, hint)
            (_, n1, i1), (_, n2, i2) = a[p], a[p + 1]
            j = join_bf(i1, i2)
            bf = ("bang", n1 + n2, j)
            mid = compose(
                tensor_mor(self.coerce(("bang", n1, j), a[p]),
                           self.coerce(("bang", n2, j), a[p + 1]), self.cap),
                d_arrow(self.obj(j), n1, n2, self.cap),
            )
            ants = a[:p] + [bf] + a[p + 2:]
            return compose(m, self.frame(a[:p], mid, a[p + 2:], self.ctx(ants), self.ctx(a))), ants, s
        if r is Rule.W:
            m, a, s = sub(0, hint)
            inner = default_bf(seq.antecedent[p].body, self.k)
            bf = ("bang", 0, inner)
            mid = e_arrow(self.obj(inner), 0, self.cap)
            ants = a[:p] + [bf] + a[p:]
            return compose(m, self.frame(a[:p], mid, a[p:], self.ctx(ants), self.ctx(a))), ants, s
        if r in (Rule.Bl, Rule.El):
            m, a, s = sub(0, hint)
            if r is Rule.Bl:
                bf = ("bang", 1, a[p])
                mid = eps_bang(self.obj(a[p]), 1, self.cap)
            else:
                bf = ("kappa", a[p])
                mid = eps_kappa(self.obj(a[p]))
            ants = a[:p] + [bf] + a[p + 1:]
            return compose(m, self.frame(a[:p], mid, a[p + 1:], self.ctx(ants), self.ctx(a))), ants, s
        if r is Rule.Br:
            k = hint[1] if hint is not None and hint[0] == "bang" else self.k
            m, a, sa = sub(0, hint[2] if hint is not None and hint[0] == "bang" else None)
            ants = [("bang", k * b[1], b[2]) for b in a]
            return bang_promote(m, k, self.cap), ants, ("bang", k, sa)
        if r is Rule.Er:
            m, a, sa = sub(0, hint[1] if hint is not None and hint[0] == "kappa" else None)
            return kappa_promote(m), a, ("kappa", sa)
        if r is Rule.E1:
            m, a, s = sub(0, hint)
            kb, b = a[p + 1], a[p]
            mid = beta_l(self.obj(kb[1]), self.obj(b), self.cap)
            ants = a[:p] + [kb, b] + a[p + 2:]
            return compose(m, self.frame(a[:p], mid, a[p + 2:], self.ctx(ants), self.ctx(a))), ants, s
        if r is Rule.E2:
            m, a, s = sub(0, hint)
            kb, b = a[p - 1], a[p]
            mid = beta_r(self.obj(b), self.obj(kb[1]), self.cap)
            ants = a[:p - 1] + [b, kb] + a[p + 1:]
            return compose(m, self.frame(a[:p - 1], mid, a[p + 1:], self.ctx(ants), self.ctx(a))), ants, s
        raise ValueError(f"no interpretation for rule {r}")


def interpret(d, atom_map, k=2, cap=DEFAULT_CAP, host=None):
    """Morphism ``[[antecedent]] -> [[succedent]]`` for derivation ``d``."""
    if host is None:
        if not atom_map:
            raise ValueError("need a host when no atoms are mapped")
        host = next(iter(atom_map.values())).host
    m, _, _ = Interpreter(atom_map, host, k, cap).run(d)
    return m


# ---------------------------------------------------------------------------
# Law suite


@dataclass
class LawResult:
    name: str
    checked: int = 0
    failed: int = 0
    skipped: int = 0
    bound_exceeded: int = 0
    witness: object = None
    note: str = ""

    @property
    def ok(self):
        return self.failed == 0 and self.bound_exceeded == 0


@dataclass
class LawReport:
    host: str
    samples: int
    k: int
    laws: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(r.ok for r in self.laws.values())

    @property
    def bound_exceeded(self):
        return sum(r.bound_exceeded for r in self.laws.values())

    def failed_laws(self):
        return [n for n, r in self.laws.items() if not r.ok]

    def lines(self):
        for n, r in self.laws.items():
            status = "pass" if r.ok else "FAIL"
            extra = f" skipped={r.skipped}" if r.skipped else ""
            if r.bound_exceeded:
                extra += f" bound_exceeded={r.bound_exceeded}"
            if r.note:
                extra += f" note={r.note}"
            yield f"{status} {n}: checked={r.checked} failed={r.failed}{extra}"


class _Sampler:
    def __init__(self, host, rng, cap):
        self.host, self.rng, self.cap = host, rng, cap

    def obj(self, nu=None, nx=None):
        rng = self.rng
        nu = nu or rng.randint(1, 2)
        nx = nx or rng.randint(1, 2)
        return make_object(self.host, [[rng.randrange(self.host.n) for _ in range(nx)] for _ in range(nu)])

    def mor(self, src, tries=6):
        """A random morphism out of ``src`` into a fresh object."""
        for _ in range(tries):
            tgt = self.obj()
            ms = hom_set(src, tgt)
            if ms:
                return self.rng.choice(ms)
        return identity(src)


def check_laws(host, samples=50, k=2, seed=0, cap=DEFAULT_CAP):
    """Sample objects and morphisms with carriers of size at most 2 and check
    the monoidal, closed and comonad equations tablewise."""
    rng = random.Random(seed)
    S = _Sampler(host, rng, cap)
    rep = LawReport(host.label, samples, k)
    order_note = "" if host.is_commutative() else "host not commutative; ! multiplies in carrier order"

    def law(name, thunk, bang=False):
        r = rep.laws.setdefault(name, LawResult(name, note=order_note if bang else ""))
        try:
            res = thunk()
        except SizeExceeded:
            r.skipped += 1
            return
        except BoundExceeded as e:
            r.bound_exceeded += 1
            r.witness = r.witness or str(e)
            return
        r.checked += 1
        if res is not True:
            r.failed += 1
            if r.witness is None:
                r.witness = res

    def eq(lhs, rhs):
        return True if lhs == rhs else ("tables differ", lhs.f, rhs.f)

    def valid(*ms):
        for m in ms:
            ok, w = is_morphism(m)
            if not ok:
                return ("not a morphism", repr(m), w)
        return True

    I = unit_obj(host)
    for _ in range(samples):
        a, b, c = S.obj(), S.obj(), S.obj()
        f = S.mor(a)
        g = S.mor(b)
        h = S.mor(c)
        f2 = S.mor(f.tgt)
        g2 = S.mor(g.tgt)

        law("tensor-preserves-identity",
            lambda: eq(tensor_mor(identity(a), identity(b), cap), identity(tensor_obj(a, b, cap))))
        law("tensor-preserves-composition",
            lambda: eq(tensor_mor(compose(f2, f), compose(g2, g), cap),
                       compose(tensor_mor(f2, g2, cap), tensor_mor(f, g, cap))))
        law("constructed-arrows-are-morphisms",
            lambda: valid(tensor_mor(f, g, cap), left_unitor(a, cap), right_unitor(a, cap),
                          left_unitor_inv(a, cap), right_unitor_inv(a, cap), associator(a, b, c, cap)))
        law("left-unitor-natural",
            lambda: eq(compose(left_unitor(f.tgt, cap), tensor_mor(identity(I), f, cap)),
                       compose(f, left_unitor(a, cap))))
        law("right-unitor-natural",
            lambda: eq(compose(right_unitor(f.tgt, cap), tensor_mor(f, identity(I), cap)),
                       compose(f, right_unitor(a, cap))))
        law("unitors-invertible",
            lambda: True if (compose(left_unitor(a, cap), left_unitor_inv(a, cap)) == identity(a)
                             and compose(left_unitor_inv(a, cap), left_unitor(a, cap))
                             == identity(tensor_obj(I, a, cap))
                             and compose(right_unitor(a, cap), right_unitor_inv(a, cap)) == identity(a)
                             and compose(right_unitor_inv(a, cap), right_unitor(a, cap))
                             == identity(tensor_obj(a, I, cap))) else "unitor round trip differs")
        law("associator-natural",
            lambda: eq(compose(associator(f.tgt, g.tgt, h.tgt, cap),
                               tensor_mor(tensor_mor(f, g, cap), h, cap)),
                       compose(tensor_mor(f, tensor_mor(g, h, cap), cap), associator(a, b, c, cap))))
        law("triangle",
            lambda: eq(compose(tensor_mor(identity(a), left_unitor(b, cap), cap), associator(a, I, b, cap)),
                       tensor_mor(right_unitor(a, cap), identity(b), cap)))
        law("pentagon", lambda: _pentagon(S, cap))

        law("curry-right-bijection", lambda: _bijection(a, b, c, curry_r, uncurry_r, hom_r(a, c, cap), cap, "b"))
        law("curry-left-bijection", lambda: _bijection(a, b, c, curry_l, uncurry_l, hom_l(c, b, cap), cap, "a"))
        law("curry-right-natural", lambda: _curry_natural(S, a, b, c, "r", cap))
        law("curry-left-natural", lambda: _curry_natural(S, a, b, c, "l", cap))

        if host.kappa is not None:
            ka = kappa_obj(a)
            law("kappa-arrows-are-morphisms",
                lambda: valid(eps_kappa(a), delta_kappa(a), kappa_mor(f), beta_l(a, b, cap), beta_r(b, a, cap)))
            law("kappa-counit",
                lambda: True if (compose(eps_kappa(ka), delta_kappa(a)) == identity(ka)
                                 and compose(kappa_mor(eps_kappa(a)), delta_kappa(a)) == identity(ka))
                else "counit law differs")
            law("kappa-coassociative",
                lambda: eq(compose(kappa_mor(delta_kappa(a)), delta_kappa(a)),
                           compose(delta_kappa(ka), delta_kappa(a))))
            law("kappa-counit-natural",
                lambda: eq(compose(eps_kappa(f.tgt), kappa_mor(f)), compose(f, eps_kappa(a))))
            law("kappa-comultiplication-natural",
                lambda: eq(compose(delta_kappa(f.tgt), kappa_mor(f)),
                           compose(kappa_mor(kappa_mor(f)), delta_kappa(a))))
            law("beta-left-natural",
                lambda: eq(compose(beta_l(f.tgt, g.tgt, cap), tensor_mor(kappa_mor(f), g, cap)),
                           compose(tensor_mor(g, kappa_mor(f), cap), beta_l(a, b, cap))))
            law("beta-right-natural",
                lambda: eq(compose(beta_r(g.tgt, f.tgt, cap), tensor_mor(g, kappa_mor(f), cap)),
                           compose(tensor_mor(kappa_mor(f), g, cap), beta_r(b, a, cap))))
            law("beta-round-trip",
                lambda: eq(compose(beta_r(b, a, cap), beta_l(a, b, cap)), identity(tensor_obj(ka, b, cap))))

        law("bang-arrows-are-morphisms", lambda: _bang_arrows_valid(a, f, k, cap), bang=True)
        law("bang-counit",
            lambda: True if (compose(eps_bang(bang_obj(a, k, cap), 1, cap), delta_bang(a, 1, k, cap))
                             == identity(bang_obj(a, k, cap))
                             and compose(bang_mor(eps_bang(a, 1, cap), k, cap), delta_bang(a, k, 1, cap))
                             == identity(bang_obj(a, k, cap))) else "counit law differs",
            bang=True)
        law("bang-coassociative", lambda: _bang_coassoc(S, k, cap), bang=True)
        law("bang-counit-natural",
            lambda: eq(compose(eps_bang(f.tgt, 1, cap), bang_mor(f, 1, cap)), compose(f, eps_bang(a, 1, cap))),
            bang=True)
        law("bang-comultiplication-natural", lambda: _bang_delta_natural(S, k, cap), bang=True)
        law("bang-inclusions-compose",
            lambda: eq(compose(bang_incl(a, k, 1, cap), bang_incl(a, 2 * k, k, cap)), bang_incl(a, 2 * k, 1, cap)),
            bang=True)
        law("bang-weakening-counit", lambda: _weakening_counit(a, k, cap), bang=True)
        law("bang-contraction-coassociative", lambda: _contraction_coassoc(S, cap), bang=True)
    return rep


def _pentagon(S, cap):
    """Objects are drawn until the four-fold tensor fits under ``cap``."""
    for _ in range(20):
        a, b, c, d = (S.obj() for _ in range(4))
        try:
            lhs = compose(associator(a, b, tensor_obj(c, d, cap), cap),
                          associator(tensor_obj(a, b, cap), c, d, cap))
            rhs = compose_all(tensor_mor(identity(a), associator(b, c, d, cap), cap),
                              associator(a, tensor_obj(b, c, cap), d, cap),
                              tensor_mor(associator(a, b, c, cap), identity(d), cap))
        except SizeExceeded:
            continue
        return True if lhs == rhs else ("pentagon differs", lhs.f, rhs.f)
    raise SizeExceeded("no pentagon sample fits")


def _bijection(a, b, c, cur, unc, hom, cap, side):
    left = hom_set(tensor_obj(a, b, cap), c)
    right = hom_set(b if side == "b" else a, hom)
    if len(left) != len(right):
        return ("hom-set sizes differ", len(left), len(right))
    images = set()
    for m in left:
        n = cur(m, cap)
        ok, w = is_morphism(n)
        if not ok:
            return ("curried map is not a morphism", w)
        if unc(n, cap) != m:
            return ("uncurry . curry != id",)
        images.add((n.f, n.F))
    if len(images) != len(left):
        return ("curry is not injective",)
    for n in right:
        if cur(unc(n, cap), cap) != n:
            return ("curry . uncurry != id",)
    return True


def _curry_natural(S, a, b, c, side, cap):
    ab = tensor_obj(a, b, cap)
    ms = hom_set(ab, c)
    for _ in range(10):
        if ms:
            break
        c = S.obj()
        ms = hom_set(ab, c)
    else:
        raise SizeExceeded("no non-empty hom-set drawn")
    m = S.rng.choice(ms)
    h = S.mor(c)
    if side == "r":
        p = _into(S, b)
        lhs = curry_r(compose(m, tensor_mor(identity(a), p, cap)), cap)
        rhs = compose(curry_r(m, cap), p)
        lhs2 = curry_r(compose(h, m), cap)
        rhs2 = compose(hom_r_mor(identity(a), h, cap), curry_r(m, cap))
    else:
        p = _into(S, a)
        lhs = curry_l(compose(m, tensor_mor(p, identity(b), cap)), cap)
        rhs = compose(curry_l(m, cap), p)
        lhs2 = curry_l(compose(h, m), cap)
        rhs2 = compose(hom_l_mor(h, identity(b), cap), curry_l(m, cap))
    if lhs != rhs:
        return ("precomposition square differs",)
    if lhs2 != rhs2:
        return ("postcomposition square differs",)
    return True


def _into(S, tgt, tries=6):
    """A random morphism into ``tgt`` from a fresh object."""
    for _ in range(tries):
        src = S.obj()
        ms = hom_set(src, tgt)
        if ms:
            return S.rng.choice(ms)
    return identity(tgt)


def _bang_arrows_valid(a, f, k, cap):
    """Every ! arrow whose total bound is at most ``2k``; splits that do not
    fit under ``cap`` are left out, and at least one of each kind must fit."""
    kinds = {
        "eps": [lambda: eps_bang(a, k, cap)],
        "e": [lambda: e_arrow(a, k, cap)],
        "d": [lambda j=j: d_arrow(a, j, k - j, cap) for j in range(k + 1)]
        + [lambda: d_arrow(a, k, k, cap)],
        "delta": [lambda: delta_bang(a, k, 1, cap), lambda: delta_bang(a, 1, k, cap),
                  lambda: delta_bang(a, k, k, cap)],
        "map": [lambda: bang_mor(f, k, cap)],
        "incl": [lambda: bang_incl(a, 2 * k, k, cap)],
    }
    for kind, makers in kinds.items():
        built = 0
        for mk in makers:
            try:
                m = mk()
            except SizeExceeded:
                continue
            built += 1
            ok, w = is_morphism(m)
            if not ok:
                return (f"{kind} arrow is not a morphism", w)
        if not built:
            raise SizeExceeded(f"no {kind} arrow fits")
    return True


def _weakening_counit(a, k, cap):
    ba = bang_obj(a, k, cap)
    left = compose_all(left_unitor(ba, cap), tensor_mor(e_arrow(a, 0, cap), identity(ba), cap),
                       d_arrow(a, 0, k, cap))
    right = compose_all(right_unitor(ba, cap), tensor_mor(identity(ba), e_arrow(a, 0, cap), cap),
                        d_arrow(a, k, 0, cap))
    if left != identity(ba) or right != identity(ba):
        return ("weakening does not cancel contraction",)
    return True


def _bang_coassoc(S, k, cap):
    a = S.obj()
    for o, j, i in ((k, 1, 1), (1, k, 1), (1, 1, k), (k, k, 1), (k, 1, k), (1, k, k), (k, k, k)):
        try:
            lhs = compose(bang_mor(delta_bang(a, j, i, cap), o, cap), delta_bang(a, o, j * i, cap))
            rhs = compose(delta_bang(bang_obj(a, i, cap), o, j, cap), delta_bang(a, o * j, i, cap))
        except SizeExceeded:
            continue
        if lhs != rhs:
            return ("coassociativity differs", (o, j, i))
    return True


def _bang_delta_natural(S, k, cap):
    a = S.obj()
    f = S.mor(a)
    for o, i in ((k, 1), (1, k), (k, k)):
        try:
            lhs = compose(bang_mor(bang_mor(f, i, cap), o, cap), delta_bang(a, o, i, cap))
            rhs = compose(delta_bang(f.tgt, o, i, cap), bang_mor(f, o * i, cap))
        except SizeExceeded:
            continue
        if lhs != rhs:
            return ("naturality differs", (o, i))
    return True


def _contraction_coassoc(S, cap):
    """``(d (x) id) . d`` against ``assoc^-1 . (id (x) d) . d`` at bound 1,
    compared after the associator.  Drawn with a single-point ``U`` so the
    triple tensor stays small."""
    a = S.obj(nu=1)
    b1 = bang_obj(a, 1, cap)
    lhs = compose_all(associator(b1, b1, b1, cap),
                      tensor_mor(d_arrow(a, 1, 1, cap), identity(b1), cap),
                      d_arrow(a, 2, 1, cap))
    rhs = compose(tensor_mor(identity(b1), d_arrow(a, 1, 1, cap), cap), d_arrow(a, 1, 2, cap))
    return True if lhs == rhs else ("contraction coassociativity differs",)
