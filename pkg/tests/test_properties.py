"""Generator-based property suite; runs standalone with ``pytest tests/test_properties.py``."""
import itertools

from hypothesis import HealthCheck, given, settings, strategies as st

from effet import build_config
from effet.finset import FinFn, compose, factorise, factorise_square, fill_in, identity, sized
from effet.generators import GROUND_TYPES, TermGenerator
from effet.grading import inclusion
from effet.lifting import Rel, check_initiality, check_lift_closed, free_lift
from effet.semantics import REFINED, UNREFINED, denote
from effet.syntax import parse_term, parse_type, print_term, print_type, Arrow, Prod, Sum, UNIT, Base
from effet.typecheck import infer

STATE = build_config("state", loc=("loc", "lop"), int_mod=3)
SMALL = build_config("state", loc=("loc",), int_mod=2)
EFFECTS = [frozenset(), frozenset({"get"}), frozenset({"set"}), frozenset({"get", "set"})]
FAST = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def fn_from(dom_size: int, cod_size: int, values: list) -> FinFn:
    X, Y = sized(dom_size, "a"), sized(cod_size, "b")
    return FinFn(X, Y, {x: Y.elems[v % cod_size] for x, v in zip(X.elems, values)})


@st.composite
def finfns(draw, dom_size=None, cod_size=None):
    n = dom_size if dom_size is not None else draw(st.integers(0, 4))
    m = cod_size if cod_size is not None else draw(st.integers(1, 4))
    vals = draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n))
    return fn_from(n, m, vals)


def retarget(f: FinFn, dom, cod) -> FinFn:
    """The map with f's shape between same-sized sets dom and cod, matched by position."""
    return FinFn(dom, cod, {x: cod.elems[f.cod.index[f(d)]] for x, d in zip(dom.elems, f.dom.elems)})


types = st.recursive(
    st.sampled_from([Base("int"), Base("Loc"), UNIT]),
    lambda inner: st.one_of(
        st.builds(Prod, inner, inner),
        st.builds(Sum, inner, inner),
        st.builds(Arrow, inner, st.sampled_from(EFFECTS), inner),
    ),
    max_leaves=5,
)


# ---------------------------------------------------------------- parser


@FAST
@given(st.integers(0, 10_000), st.sampled_from(GROUND_TYPES))
def test_term_print_parse_roundtrip(seed, A):
    M = TermGenerator(STATE, seed, max_depth=3).term(A)
    assert parse_term(print_term(M), STATE.signature) == M


@FAST
@given(types)
def test_type_print_parse_roundtrip(A):
    assert parse_type(print_type(A)) == A


# ---------------------------------------------------------------- factorisation


@FAST
@given(finfns())
def test_factorisation_is_epi_mono(f):
    fac = factorise(f)
    assert fac.e.is_surjective() and fac.m.is_injective()
    assert compose(fac.m, fac.e) == f


@FAST
@given(finfns())
def test_factorisation_preserves_identity_squares(f):
    h = factorise_square(f, f, identity(f.dom), identity(f.cod))
    assert h == identity(factorise(f).image)


@FAST
@given(st.data())
def test_factorisation_preserves_composition(data):
    # A -a-> A' -b-> B -c-> B' gives squares (b.a -> b) and (b -> c.b) whose paste is (b.a -> c.b)
    n = data.draw(st.integers(0, 3))
    a = data.draw(finfns(dom_size=n, cod_size=3))
    b = retarget(data.draw(finfns(dom_size=3, cod_size=3)), a.cod, sized(3, "m"))
    c = retarget(data.draw(finfns(dom_size=3, cod_size=2)), b.cod, sized(2, "z"))
    f, f3 = compose(b, a), compose(c, b)
    h1 = factorise_square(f, b, a, identity(b.cod))
    h2 = factorise_square(b, f3, identity(a.cod), c)
    assert compose(h2, h1) == factorise_square(f, f3, a, c)


def all_maps(X, Y):
    for vals in itertools.product(Y.elems, repeat=len(X)):
        yield FinFn(X, Y, dict(zip(X.elems, vals)))


@FAST
@given(finfns(cod_size=3), st.data())
def test_fill_in_is_unique_by_enumeration(f, data):
    # square m . f' = g . e with e = image part of some w, m = inclusion
    w = data.draw(finfns(dom_size=len(f.dom), cod_size=3))
    fw = factorise(w)
    ff = factorise(f)
    e, m = fw.e, ff.m
    # g must satisfy m . ff.e = g . e, which exists iff ker(e) <= ker(f)
    g_table = {}
    for x in f.dom.elems:
        if g_table.setdefault(e(x), f(x)) != f(x):
            return
    g = FinFn(e.cod, f.cod, g_table)
    h = fill_in(e, m, ff.e, g)
    candidates = [k for k in all_maps(e.cod, m.dom) if compose(k, e) == ff.e and compose(m, k) == g]
    assert candidates == [h]


# ---------------------------------------------------------------- coercions


@FAST
@given(st.sampled_from(EFFECTS), st.sampled_from(EFFECTS), st.sampled_from(EFFECTS), st.integers(1, 2))
def test_inclusions_compose(e1, e2, e3, n):
    a, b, c = e1, e1 | e2, e1 | e2 | e3
    X = sized(n)
    fam = SMALL.family
    assert compose(inclusion(fam, b, c, X), inclusion(fam, a, b, X)) == inclusion(fam, a, c, X)
    assert inclusion(fam, a, a, X) == identity(fam.carrier(a, X).subset)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(GROUND_TYPES))
def test_coerced_denotations_agree(seed, A):
    M = TermGenerator(SMALL, seed, max_depth=2).term(A)
    _, eps = infer(SMALL.signature, (), M)
    plain = denote(SMALL, M, UNREFINED).value
    for bigger in EFFECTS:
        if eps <= bigger:
            d = denote(SMALL, M, REFINED, eps=bigger, verify=True)
            assert d.value == plain


# ---------------------------------------------------------------- lifting


@st.composite
def relations(draw):
    n = draw(st.integers(1, 2))
    m = draw(st.integers(1, 2))
    X, Y = sized(n, "p"), sized(m, "q")
    everything = [(x, y) for x in X.elems for y in Y.elems]
    chosen = draw(st.lists(st.sampled_from(everything), unique=True, max_size=len(everything)))
    return Rel(X, Y, frozenset(chosen))


@settings(max_examples=30, deadline=None)
@given(relations(), st.sampled_from(EFFECTS))
def test_free_lift_is_closed_and_initial(R, eps):
    L = free_lift(SMALL, eps, R)
    assert not check_lift_closed(L)
    assert check_initiality(L, samples=40).ok


@settings(max_examples=20, deadline=None)
@given(relations(), relations(), st.sampled_from(EFFECTS))
def test_free_lift_is_monotone(R, S, eps):
    if (R.left, R.right) != (S.left, S.right):
        return
    small = Rel(R.left, R.right, R.pairs & S.pairs)
    assert free_lift(SMALL, eps, small).pairs <= free_lift(SMALL, eps, R).pairs
