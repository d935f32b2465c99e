import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from lambekdial.syntax import (  # noqa: E402
    AppL, AppR, Atom, Bang, Copy, DerelictBang, DerelictKappa, Discard, ExchL,
    ExchR, Kappa, LamL, LamR, Let, LImp, PromoteBang, PromoteKappa, PVar, RImp,
    Sequent, Tensor, TensorIntro, TensorPat, Unit, UnitPat, UnitTerm, Var, Wildcard,
)

settings.register_profile(
    "default", deadline=None, max_examples=150,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

NAMES = ["x", "y", "z", "u", "v", "w"]


def formulas(atoms=("a", "b", "c"), unit=True, bang=True, kappa=True, max_leaves=12):
    base = st.sampled_from([Atom(a) for a in atoms] + ([Unit()] if unit else []))

    def grow(kids):
        options = [
            st.builds(Tensor, kids, kids),
            st.builds(RImp, kids, kids),
            st.builds(LImp, kids, kids),
        ]
        if bang:
            options.append(st.builds(Bang, kids))
        if kappa:
            options.append(st.builds(Kappa, kids))
        return st.one_of(options)

    return st.recursive(base, grow, max_leaves=max_leaves)


def l_formulas(**kw):
    return formulas(bang=False, kappa=False, **kw)


def sequents(fs=None, max_ante=4):
    fs = formulas() if fs is None else fs
    return st.builds(Sequent, st.lists(fs, max_size=max_ante).map(tuple), fs)


names = st.sampled_from(NAMES)


@st.composite
def _two_names(draw):
    return tuple(draw(st.lists(names, min_size=2, max_size=2, unique=True)))


patterns = st.recursive(
    st.one_of(st.just(UnitPat()), st.just(Wildcard()), names.map(PVar)),
    lambda kids: st.builds(TensorPat, kids, kids),
    max_leaves=4,
).filter(lambda p: _distinct_pattern(p))


def _distinct_pattern(p):
    from lambekdial.syntax import pattern_vars
    vs = pattern_vars(p)
    return len(vs) == len(set(vs))


@st.composite
def _promote(draw, kids, cls):
    n = draw(st.integers(0, 2))
    vs = tuple(draw(st.lists(names, min_size=n, max_size=n, unique=True)))
    srcs = tuple(draw(kids) for _ in range(n))
    return cls(srcs, vs, draw(kids))


@st.composite
def _binder2(draw, kids, cls):
    x, y = draw(_two_names())
    return cls(draw(kids), x, y, draw(kids))


@st.composite
def _exch(draw, kids, cls):
    x, y = draw(_two_names())
    return cls(draw(kids), draw(kids), x, y, draw(kids))


def terms(max_leaves=10):
    """Arbitrary (not necessarily well-typed) terms."""
    base = st.one_of(names.map(Var), st.just(UnitTerm()))
    fs = formulas(max_leaves=3)

    def grow(kids):
        return st.one_of(
            st.builds(TensorIntro, kids, kids),
            st.builds(LamL, names, fs, kids),
            st.builds(LamR, names, fs, kids),
            st.builds(AppL, kids, kids),
            st.builds(AppR, kids, kids),
            st.builds(Let, kids, patterns, kids),
            _binder2(kids, Copy),
            st.builds(Discard, kids, kids),
            _promote(kids, PromoteBang),
            _promote(kids, PromoteKappa),
            st.builds(DerelictBang, kids),
            st.builds(DerelictKappa, kids),
            _exch(kids, ExchL),
            _exch(kids, ExchR),
        )

    return st.recursive(base, grow, max_leaves=max_leaves)
